#ifndef TROJAN_UNITS_HPP
#define TROJAN_UNITS_HPP

#include "common.hpp"

#include <sstream>
#include <iomanip>

namespace trojan {

namespace constants {
// CODATA values, SI-facing conversions only; all internal physics is unitless.
inline constexpr double bohr_radius_nm = 0.0529177210544;
inline constexpr double flux_density_au_tesla = 2.35051757077e5;   // hbar/(e a0^2)
inline constexpr double angular_frequency_au = 4.1341373336493e16; // E_h/hbar, 1/s
inline constexpr double field_au_volts_per_m = 5.14220675112e11;   // E_h/(e a0)
}  // namespace constants

// Laboratory-frame drive parameters, atomic units throughout.  The sign of
// cyclotron_frequency encodes the magnetic field orientation relative to the
// sense of the CP rotation; |cyclotron_frequency| sets the scale.
struct LabParams {
    double cp_frequency = 0.0;        // Omega, a.u. angular frequency
    double cp_strength = 0.0;         // field amplitude, a.u.
    double cyclotron_frequency = 0.0; // Omega_c, signed, a.u.

    void validate() const {
        if (!std::isfinite(cp_frequency) || !std::isfinite(cp_strength) ||
            !std::isfinite(cyclotron_frequency))
            throw invalid_input("LabParams: non-finite field");
        if (cp_frequency <= 0.0) throw invalid_input("LabParams: cp_frequency must be > 0");
        if (cyclotron_frequency == 0.0)
            throw invalid_input("LabParams: cyclotron_frequency must be nonzero");
    }
};

// Conversion factors from one scaled unit back to atomic units.  The scaling
// is the unique power law that sends the cyclotron frequency to magnitude 1
// while preserving the kinetic, Coulomb, and uniform-field coefficients.
struct ScaledUnits {
    double length_au = 1.0; // |Omega_c|^{-2/3}
    double energy_au = 1.0; // |Omega_c|^{2/3}
    double time_au = 1.0;   // 1/|Omega_c|
    double field_au = 1.0;  // |Omega_c|^{4/3}
};

inline ScaledUnits scale_units(double cyclotron_frequency) {
    const double w = std::abs(cyclotron_frequency);
    if (!(w > 0.0) || !std::isfinite(w))
        throw invalid_input("scale_units: cyclotron frequency must be nonzero and finite");
    ScaledUnits u;
    u.length_au = std::pow(w, -2.0 / 3.0);
    u.energy_au = std::pow(w, 2.0 / 3.0);
    u.time_au = 1.0 / w;
    u.field_au = std::pow(w, 4.0 / 3.0);
    return u;
}

struct ScaledParams {
    FieldParams params;
    ScaledUnits units;
};

// omega = Omega/|Omega_c|, epsilon = E_lab/|Omega_c|^{4/3}; branch from the
// sign of Omega_c (+1 cyclotron orientation -> branch -1 and vice versa).
inline ScaledParams to_scaled(const LabParams& lab, int dims = 3, double charge = 2.0) {
    lab.validate();
    ScaledParams out;
    out.units = scale_units(lab.cyclotron_frequency);
    out.params.omega = lab.cp_frequency * out.units.time_au;
    out.params.epsilon = lab.cp_strength / out.units.field_au;
    out.params.branch = lab.cyclotron_frequency > 0.0 ? -1 : +1;
    out.params.dims = dims;
    out.params.charge = charge;
    out.params.validate();
    return out;
}

inline LabParams from_scaled(const FieldParams& params, double cyclotron_frequency) {
    params.validate();
    if (cyclotron_frequency == 0.0 || !std::isfinite(cyclotron_frequency))
        throw invalid_input("from_scaled: cyclotron frequency must be nonzero and finite");
    const int want = params.cyclotron_sign();
    if ((cyclotron_frequency > 0.0 ? +1 : -1) != want)
        throw invalid_input("from_scaled: cyclotron frequency sign inconsistent with branch");
    const ScaledUnits u = scale_units(cyclotron_frequency);
    LabParams lab;
    lab.cyclotron_frequency = cyclotron_frequency;
    lab.cp_frequency = params.omega / u.time_au;
    lab.cp_strength = params.epsilon * u.field_au;
    lab.validate();
    return lab;
}

// Quantum-dot inputs in laboratory units.  Material constants are caller
// supplied; the impurity is a point charge Z_eff at distance
// impurity_displacement from the dot center, along the in-plane axis.
struct DotParams {
    double b_field = 0.0;              // tesla
    double effective_mass = 0.0;       // m*/m_e
    double dielectric_constant = 0.0;  // relative permittivity
    double confinement_radius = 0.0;   // nm, parabolic in-plane oscillator length
    double impurity_charge = 0.0;      // units of e
    double impurity_displacement = 0.0; // nm

    void validate() const {
        const double f[] = {b_field, effective_mass, dielectric_constant,
                            confinement_radius, impurity_charge, impurity_displacement};
        for (double v : f)
            if (!std::isfinite(v)) throw invalid_input("DotParams: non-finite field");
        if (impurity_displacement == 0.0)
            throw invalid_input("DotParams: impurity displacement is zero; "
                                "degenerate geometry has no field direction");
        if (b_field <= 0.0 || effective_mass <= 0.0 || dielectric_constant <= 0.0 ||
            confinement_radius <= 0.0 || impurity_charge <= 0.0 || impurity_displacement < 0.0)
            throw invalid_input("DotParams: all fields must be positive");
    }
};

struct DotReport {
    FieldParams params;          // scaled model parameters (branch -1, dims 3)
    ScaledUnits units;           // effective a.u. per scaled unit
    double effective_bohr_nm = 0.0;
    double effective_hartree = 0.0;     // in vacuum hartree
    double cyclotron_au = 0.0;          // bare cyclotron, effective a.u.
    double confinement_au = 0.0;        // omega_0
    double hybrid_cyclotron_au = 0.0;   // sqrt(cyclotron^2 + 4 omega_0^2)
    double rotation_au = 0.0;           // stationary-configuration rotation rate
    double field_eff_au = 0.0;          // linearized impurity field, effective a.u.
    double frequency_ghz = 0.0;         // rotation_au as an SI frequency
    double field_kv_per_m = 0.0;        // field_eff_au in SI
    double scaled_length_nm = 0.0;      // nm per scaled length unit
    std::string text;                   // human-readable summary
};

// Map a dot (parabolic in-plane confinement + perpendicular B + displaced
// impurity charge, central charge Z) onto the scaled field parameters.
//
// In effective atomic units the in-plane one-body terms are
//   p^2/2 + (w_c/2) l_z + (w_c^2/8 + w_0^2/2) rho^2
// which is the rotating-frame form with hybrid cyclotron frequency
// w~ = sqrt(w_c^2 + 4 w_0^2) and frame rotation Omega~ = (w~ - w_c)/2; the
// lab-static impurity plays the role of the corotating field, so the branch
// is always -1 and omega = Omega~/w~ lies in (0, 1/2].  Linearizing the
// impurity potential about the dot center gives field strength Z_eff/d^2.
inline DotReport dot_effective_units(const DotParams& dot, double charge = 2.0) {
    dot.validate();
    DotReport rep;
    const double mass = dot.effective_mass;
    const double eps_r = dot.dielectric_constant;
    rep.effective_bohr_nm = constants::bohr_radius_nm * eps_r / mass;
    rep.effective_hartree = mass / (eps_r * eps_r);

    const double b_au = dot.b_field / constants::flux_density_au_tesla;
    rep.cyclotron_au = b_au * eps_r * eps_r / (mass * mass);
    const double l0 = dot.confinement_radius / rep.effective_bohr_nm;
    rep.confinement_au = 1.0 / (l0 * l0);
    rep.hybrid_cyclotron_au = std::sqrt(rep.cyclotron_au * rep.cyclotron_au +
                                        4.0 * rep.confinement_au * rep.confinement_au);
    rep.rotation_au = 0.5 * (rep.hybrid_cyclotron_au - rep.cyclotron_au);

    const double d = dot.impurity_displacement / rep.effective_bohr_nm;
    rep.field_eff_au = dot.impurity_charge / (d * d);

    LabParams lab;
    lab.cp_frequency = rep.rotation_au;
    lab.cp_strength = rep.field_eff_au;
    lab.cyclotron_frequency = rep.hybrid_cyclotron_au;
    const ScaledParams scaled = to_scaled(lab, 3, charge);
    rep.params = scaled.params;
    rep.units = scaled.units;
    rep.scaled_length_nm = rep.effective_bohr_nm * rep.units.length_au;

    const double omega_si = rep.rotation_au * rep.effective_hartree *
                            constants::angular_frequency_au;
    rep.frequency_ghz = omega_si / (2.0 * M_PI * 1.0e9);
    rep.field_kv_per_m = rep.field_eff_au * (mass * mass / (eps_r * eps_r * eps_r)) *
                         constants::field_au_volts_per_m / 1.0e3;

    std::ostringstream os;
    os << std::setprecision(6);
    os << "effective Bohr radius: " << rep.effective_bohr_nm << " nm\n"
       << "effective hartree: " << rep.effective_hartree << " Ha\n"
       << "cyclotron frequency: " << rep.cyclotron_au << " eff. a.u.\n"
       << "confinement frequency: " << rep.confinement_au << " eff. a.u.\n"
       << "hybrid cyclotron frequency: " << rep.hybrid_cyclotron_au << " eff. a.u.\n"
       << "stationary rotation rate: " << rep.rotation_au << " eff. a.u. ("
       << rep.frequency_ghz << " GHz)\n"
       << "linearized impurity field: " << rep.field_eff_au << " eff. a.u. ("
       << rep.field_kv_per_m << " kV/m)\n"
       << "scaled length unit: " << rep.scaled_length_nm << " nm\n"
       << "scaled parameters: omega=" << rep.params.omega
       << " epsilon=" << rep.params.epsilon << " branch=" << rep.params.branch << "\n";
    rep.text = os.str();
    return rep;
}

}  // namespace trojan

#endif
