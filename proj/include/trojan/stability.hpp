#ifndef TROJAN_STABILITY_HPP
#define TROJAN_STABILITY_HPP

#include "equilibria.hpp"

#include <complex>
#include <limits>
#include <utility>
#include <vector>

namespace trojan {

// Phase-space linearization about an equilibrium, ordering (p1, p2, q1, q2):
//   d/dt [dp; dq] = [ A  -V'' ] [dp]
//                   [ I    A  ] [dq]
// with A the per-electron angular block [[0, g], [-g, 0]] (z row zero in 3D)
// and V'' the coordinate Hessian of the full potential including 1/r_12.
// This is the exact Jacobian of the canonical flow.
struct LinearizationMatrix {
    Eigen::MatrixXd entries;  // (4*dims) x (4*dims)
    int dims = 3;
};

namespace detail {

inline Eigen::MatrixXd angular_block(double g, int dims) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * dims, 2 * dims);
    for (int i = 0; i < 2; ++i) {
        a(i * dims, i * dims + 1) = g;
        a(i * dims + 1, i * dims) = -g;
    }
    return a;
}

// Parlett-Reinsch balancing (radix 2, similarity by diagonal scaling);
// leaves eigenvalues unchanged but improves eigensolver conditioning.
inline Eigen::MatrixXd balanced(Eigen::MatrixXd m) {
    const int n = static_cast<int>(m.rows());
    constexpr double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(m(j, i));
                r += std::abs(m(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            const double s = c + r;
            double f = 1.0;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                m.row(i) /= f;
                m.col(i) *= f;
            }
        }
    }
    return m;
}

}  // namespace detail

inline LinearizationMatrix linearization(const Equilibrium& eq, const FieldParams& params) {
    params.validate();
    if (eq.config.dims != params.dims) throw invalid_input("linearization: dims mismatch");
    if (!(eq.residual <= 1e-8)) {
        std::ostringstream os;
        os << "linearization: residual " << eq.residual << " exceeds 1e-8";
        throw not_an_equilibrium(os.str());
    }
    const int d = params.dims;
    const int n = 2 * d;
    LinearizationMatrix s;
    s.dims = d;
    s.entries = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    const Eigen::MatrixXd a = detail::angular_block(params.g(), d);
    s.entries.block(0, 0, n, n) = a;
    s.entries.block(n, n, n, n) = a;
    s.entries.block(n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
    s.entries.block(0, n, n, n) = -potential_hessian(eq.config, params);
    return s;
}

struct StabilityReport {
    Eigen::VectorXcd eigenvalues;
    double max_real_part = 0.0;  // max |Re(lambda)|
    bool stable = false;
    double tolerance = 1e-8;
    double quartet_defect = 0.0;  // distance of spectrum from {-l, conj l} closure
};

inline StabilityReport classify(const LinearizationMatrix& s, double tolerance = 1e-8) {
    if (s.entries.rows() != s.entries.cols() || s.entries.rows() == 0)
        throw invalid_input("classify: matrix must be square and nonempty");
    if (!s.entries.allFinite()) throw invalid_input("classify: non-finite matrix");
    const Eigen::MatrixXd b = detail::balanced(s.entries);
    Eigen::EigenSolver<Eigen::MatrixXd> es(b, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        std::ostringstream os;
        os << "classify: eigenvalue iteration failed (matrix max-norm "
           << s.entries.lpNorm<Eigen::Infinity>() << ")";
        throw numeric_error(os.str());
    }
    StabilityReport rep;
    rep.eigenvalues = es.eigenvalues();
    rep.tolerance = tolerance;
    rep.max_real_part = rep.eigenvalues.real().cwiseAbs().maxCoeff();
    rep.stable = rep.max_real_part < tolerance;
    const auto& ev = rep.eigenvalues;
    double defect = 0.0;
    for (int i = 0; i < ev.size(); ++i) {
        double dneg = std::numeric_limits<double>::infinity();
        double dconj = dneg;
        for (int j = 0; j < ev.size(); ++j) {
            dneg = std::min(dneg, std::abs(ev[j] + ev[i]));
            dconj = std::min(dconj, std::abs(ev[j] - std::conj(ev[i])));
        }
        defect = std::max(defect, std::max(dneg, dconj));
    }
    rep.quartet_defect = defect;
    return rep;
}

// One grid cell of a stability map.  Multi-root cells carry one verdict per
// root, ascending in side length; any_stable is the cell-level flag.
struct StabilityCell {
    bool has_equilibrium = false;
    bool any_stable = false;
    std::vector<double> side_lengths;
    std::vector<double> max_real_parts;
    std::vector<char> stable;  // 0/1 per root
    std::string note;          // per-cell failure report, empty if clean
};

struct StabilityMap {
    std::vector<double> omega_axis;
    std::vector<double> epsilon_axis;
    int branch = -1;
    std::vector<StabilityCell> cells;  // row-major, omega index outer

    const StabilityCell& cell(int i_omega, int j_epsilon) const {
        return cells[static_cast<std::size_t>(i_omega) * epsilon_axis.size() +
                     static_cast<std::size_t>(j_epsilon)];
    }
};

namespace detail {

inline std::vector<double> linspace(double start, double stop, int count) {
    if (count < 2) throw invalid_input("scan: resolution must be >= 2");
    if (!(stop > start)) throw invalid_input("scan: range must have positive length");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] = start + (stop - start) * i / (count - 1);
    return v;
}

inline StabilityCell scan_cell(const FieldParams& params, const EquilibriumClass& cls) {
    StabilityCell cell;
    auto add_root = [&](const Equilibrium& eq, double side) {
        const StabilityReport rep = classify(linearization(eq, params));
        cell.has_equilibrium = true;
        cell.side_lengths.push_back(side);
        cell.max_real_parts.push_back(rep.max_real_part);
        cell.stable.push_back(rep.stable ? 1 : 0);
        if (rep.stable) cell.any_stable = true;
    };
    try {
        if (cls.type == EquilibriumType::TypeI_Langmuir) {
            const std::vector<double> roots = langmuir_cubic(params);
            for (double a : roots) {
                try {
                    add_root(refine(langmuir_config(a, params).config, params), a);
                } catch (const std::runtime_error& e) {
                    cell.note += std::string(cell.note.empty() ? "" : "; ") + e.what();
                }
            }
        } else if (cls.type == EquilibriumType::TypeII_Transverse) {
            const Equilibrium eq = type2_config(params, cls.angle > 0.0 ? cls.angle : M_PI);
            add_root(eq, 0.0);
        } else if (cls.type == EquilibriumType::TypeIIIa_Collinear ||
                   cls.type == EquilibriumType::TypeIIIb_Collinear) {
            const Equilibrium eq =
                type3_config(params, cls.type == EquilibriumType::TypeIIIa_Collinear
                                         ? CollinearVariant::IIIa
                                         : CollinearVariant::IIIb);
            add_root(eq, 0.0);
        } else {
            cell.note = "unclassified equilibrium class has no constructor";
        }
    } catch (const std::runtime_error& e) {
        if (cell.note.empty()) cell.note = e.what();
    }
    return cell;
}

}  // namespace detail

// Sweep a (omega, epsilon) grid; per-cell failures are recorded in the cell,
// never thrown.  Cells are independent; execution may be parallel but the
// assembly order is fixed by grid indices.
inline StabilityMap scan(std::pair<double, double> omega_range,
                         std::pair<double, double> epsilon_range,
                         std::pair<int, int> resolution, const FieldParams& base,
                         EquilibriumClass cls = {EquilibriumType::TypeI_Langmuir, 0.0}) {
    base.validate();
    StabilityMap map;
    map.omega_axis = detail::linspace(omega_range.first, omega_range.second, resolution.first);
    map.epsilon_axis =
        detail::linspace(epsilon_range.first, epsilon_range.second, resolution.second);
    map.branch = base.branch;
    const std::size_t n_cells = map.omega_axis.size() * map.epsilon_axis.size();
    map.cells.resize(n_cells);
    const long long total = static_cast<long long>(n_cells);
#pragma omp parallel for schedule(dynamic)
    for (long long k = 0; k < total; ++k) {
        const std::size_t i = static_cast<std::size_t>(k) / map.epsilon_axis.size();
        const std::size_t j = static_cast<std::size_t>(k) % map.epsilon_axis.size();
        FieldParams p = base;
        p.omega = map.omega_axis[i];
        p.epsilon = map.epsilon_axis[j];
        StabilityCell cell;
        try {
            p.validate();
            cell = detail::scan_cell(p, cls);
        } catch (const std::runtime_error& e) {
            cell.note = e.what();
        }
        map.cells[static_cast<std::size_t>(k)] = std::move(cell);
    }
    return map;
}

inline StabilityMap scan(std::pair<double, double> omega_range,
                         std::pair<double, double> epsilon_range, int resolution,
                         const FieldParams& base,
                         EquilibriumClass cls = {EquilibriumType::TypeI_Langmuir, 0.0}) {
    return scan(omega_range, epsilon_range, std::pair<int, int>(resolution, resolution), base,
                cls);
}

}  // namespace trojan

#endif
