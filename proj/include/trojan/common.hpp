#ifndef TROJAN_COMMON_HPP
#define TROJAN_COMMON_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace trojan {

// ---------------------------------------------------------------------------
// Error taxonomy. Domain failures are typed so callers (and the CLI) can map
// them to exit codes without string matching.
// ---------------------------------------------------------------------------

struct invalid_input : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct singular_configuration : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct not_an_equilibrium : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct root_not_found : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct rank_deficiency : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct convergence_failure : std::runtime_error {
    double residual;
    explicit convergence_failure(const std::string& what, double r = -1.0)
        : std::runtime_error(what), residual(r) {}
};

struct collision_error : std::runtime_error {
    double time;
    explicit collision_error(const std::string& what, double t)
        : std::runtime_error(what), time(t) {}
};

struct tolerance_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct unsupported_regime : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct population_control_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Field parameters in scaled units (cyclotron magnitude 1).
//
// branch selects the sign of the angular coefficient -(omega + branch/2):
//   branch = +1  <->  omega_c = -1   (anti-centrifugal Lorentz force)
//   branch = -1  <->  omega_c = +1   (co-centrifugal Lorentz force)
// The mapping is a convention fixed once here; the Hamiltonian alone does not
// determine it.
// ---------------------------------------------------------------------------

struct FieldParams {
    double omega = 0.5;    // scaled CP frequency, > 0
    double epsilon = 0.0;  // scaled field strength
    int branch = -1;       // +1 or -1
    int dims = 3;          // 2 or 3
    double charge = 2.0;   // nuclear charge Z, > 0

    // angular coefficient g: H carries -g * (x p_y - y p_x) per electron
    double g() const { return omega + 0.5 * static_cast<double>(branch); }

    // cubic/ZVS coefficient c = omega^2 + branch*omega = g^2 - 1/4
    double c() const { return omega * omega + static_cast<double>(branch) * omega; }

    int cyclotron_sign() const { return -branch; }

    void validate() const {
        if (!(omega > 0.0)) throw invalid_input("FieldParams: omega must be > 0");
        if (branch != 1 && branch != -1) throw invalid_input("FieldParams: branch must be +1 or -1");
        if (dims != 2 && dims != 3) throw invalid_input("FieldParams: dims must be 2 or 3");
        if (!(charge > 0.0)) throw invalid_input("FieldParams: charge must be > 0");
        if (!std::isfinite(omega) || !std::isfinite(epsilon) || !std::isfinite(charge))
            throw invalid_input("FieldParams: non-finite entry");
    }
};

// ---------------------------------------------------------------------------
// Two-electron configuration, coordinates flattened as [q1; q2], each block of
// size dims, rotating-frame Cartesian axes: CP field along +x, magnetic field
// along z (absent for dims = 2).
// ---------------------------------------------------------------------------

struct Configuration {
    int dims = 3;
    Eigen::VectorXd q;  // size 2*dims

    Configuration() : q(Eigen::VectorXd::Zero(6)) {}
    Configuration(int d, Eigen::VectorXd coords) : dims(d), q(std::move(coords)) {
        if (dims != 2 && dims != 3) throw invalid_input("Configuration: dims must be 2 or 3");
        if (q.size() != 2 * dims) throw invalid_input("Configuration: coordinate size mismatch");
    }

    Eigen::VectorBlock<Eigen::VectorXd> pos(int i) { return q.segment(i * dims, dims); }
    Eigen::VectorBlock<const Eigen::VectorXd> pos(int i) const { return q.segment(i * dims, dims); }

    double r(int i) const { return pos(i).norm(); }
    double r12() const { return (pos(0) - pos(1)).norm(); }

    double x(int i) const { return q[i * dims]; }
    double y(int i) const { return q[i * dims + 1]; }
    double z(int i) const { return dims == 3 ? q[i * dims + 2] : 0.0; }

    // minimum separation below which Coulomb terms are treated as singular
    static constexpr double singular_floor = 1e-12;

    void check_nonsingular() const {
        if (!q.allFinite()) throw singular_configuration("configuration has non-finite coordinates");
        if (r(0) < singular_floor || r(1) < singular_floor)
            throw singular_configuration("electron coincides with nucleus");
        if (r12() < singular_floor)
            throw singular_configuration("electrons coincide");
    }

    Configuration swapped() const {
        Configuration s(*this);
        s.q.segment(0, dims) = q.segment(dims, dims);
        s.q.segment(dims, dims) = q.segment(0, dims);
        return s;
    }
};

struct PhaseState {
    Configuration config;
    Eigen::VectorXd p;  // size 2*dims, canonical momenta, same layout as config.q

    PhaseState() : p(Eigen::VectorXd::Zero(6)) {}
    PhaseState(Configuration c, Eigen::VectorXd mom) : config(std::move(c)), p(std::move(mom)) {
        if (p.size() != config.q.size()) throw invalid_input("PhaseState: momentum size mismatch");
    }

    int dims() const { return config.dims; }
};

}  // namespace trojan

#endif
