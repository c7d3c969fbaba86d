#ifndef TROJAN_EQUILIBRIA_HPP
#define TROJAN_EQUILIBRIA_HPP

#include "model.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace trojan {

enum class EquilibriumType {
    TypeI_Langmuir,
    TypeII_Transverse,
    TypeIIIa_Collinear,
    TypeIIIb_Collinear,
    Unclassified
};

struct EquilibriumClass {
    EquilibriumType type = EquilibriumType::Unclassified;
    double angle = 0.0;  // Type II only: subtended angle at nucleus, (0, pi]
};

inline const char* to_string(EquilibriumType t) {
    switch (t) {
        case EquilibriumType::TypeI_Langmuir: return "TypeI_Langmuir";
        case EquilibriumType::TypeII_Transverse: return "TypeII_Transverse";
        case EquilibriumType::TypeIIIa_Collinear: return "TypeIIIa_Collinear";
        case EquilibriumType::TypeIIIb_Collinear: return "TypeIIIb_Collinear";
        default: return "Unclassified";
    }
}

struct Equilibrium {
    Configuration config;
    Eigen::VectorXd momenta;  // zero rotating-frame velocity
    EquilibriumClass cls;
    double side_length = 0.0;  // Type I only: equilateral side a
    double residual = 0.0;     // max-norm of zvs_gradient

    PhaseState state() const { return PhaseState(config, momenta); }
};

// Geometry-based classification; precedence equilateral > collinear > equal
// radii, all with relative tolerance 1e-8.
inline EquilibriumClass classify_equilibrium(const Configuration& cfg) {
    constexpr double tol = 1e-8;
    const double r1 = cfg.r(0), r2 = cfg.r(1), r12 = cfg.r12();
    const double scale = std::max({r1, r2, r12});
    EquilibriumClass cls;
    if (std::abs(r1 - r2) <= tol * scale && std::abs(r1 - r12) <= tol * scale &&
        std::abs(r2 - r12) <= tol * scale) {
        cls.type = EquilibriumType::TypeI_Langmuir;
        return cls;
    }
    const bool planar = std::abs(cfg.z(0)) <= tol * scale && std::abs(cfg.z(1)) <= tol * scale;
    if (planar) {
        // collinear with the nucleus: radius vectors parallel or antiparallel
        const Eigen::Vector3d a(cfg.x(0), cfg.y(0), cfg.z(0));
        const Eigen::Vector3d b(cfg.x(1), cfg.y(1), cfg.z(1));
        if (a.cross(b).norm() <= tol * r1 * r2) {
            cls.type = a.dot(b) > 0.0 ? EquilibriumType::TypeIIIa_Collinear
                                      : EquilibriumType::TypeIIIb_Collinear;
            return cls;
        }
        if (std::abs(r1 - r2) <= tol * scale) {
            cls.type = EquilibriumType::TypeII_Transverse;
            double ca = a.dot(b) / (r1 * r2);
            ca = std::clamp(ca, -1.0, 1.0);
            cls.angle = std::acos(ca);
            return cls;
        }
    }
    cls.type = EquilibriumType::Unclassified;
    return cls;
}

namespace detail {

// Cubic (c/2) a^3 + (sqrt(3)/3) eps a^2 - 1 evaluated in extended precision so
// the residual check is meaningful even when the balanced terms are ~1e4.
inline double langmuir_poly(double A, double B, double a) {
    const long double al = a;
    return static_cast<double>(((static_cast<long double>(A) * al +
                                 static_cast<long double>(B)) * al) * al - 1.0L);
}

inline double langmuir_poly_deriv(double A, double B, double a) {
    return (3.0 * A * a + 2.0 * B) * a;
}

}  // namespace detail

// Positive real roots of the Langmuir cubic (c/2) a^3 + (sqrt(3)/3) eps a^2 = 1,
// ascending.  Empty when no positive root exists.
inline std::vector<double> langmuir_cubic(const FieldParams& params) {
    params.validate();
    if (std::abs(params.charge - 2.0) > 0.0)
        throw invalid_input("langmuir_cubic: equilateral geometry requires charge 2");
    const double A = 0.5 * params.c();
    // x -> -x maps eps -> -eps, so root magnitudes depend on |eps| only
    const double B = std::sqrt(3.0) / 3.0 * std::abs(params.epsilon);

    std::vector<double> roots;
    if (A == 0.0) {
        if (B > 0.0) roots.push_back(1.0 / std::sqrt(B));
    } else {
        // companion matrix of a^3 + (B/A) a^2 + 0 a - 1/A
        Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
        comp(1, 0) = 1.0;
        comp(2, 1) = 1.0;
        comp(0, 2) = 1.0 / A;
        comp(1, 2) = 0.0;
        comp(2, 2) = -B / A;
        const Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
        for (int i = 0; i < 3; ++i) {
            const std::complex<double> lam = es.eigenvalues()[i];
            if (std::abs(lam.imag()) > 1e-8 * (1.0 + std::abs(lam.real()))) continue;
            double a = lam.real();
            if (!(a > 0.0)) continue;
            for (int it = 0; it < 60; ++it) {  // Newton polish
                const double f = detail::langmuir_poly(A, B, a);
                const double df = detail::langmuir_poly_deriv(A, B, a);
                if (df == 0.0) break;
                const double step = f / df;
                a -= step;
                if (std::abs(step) < 1e-16 * std::abs(a)) break;
            }
            if (a > 0.0) roots.push_back(a);
        }
    }
    std::sort(roots.begin(), roots.end());
    // collapse near-tangent duplicates
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double p, double q) { return std::abs(p - q) <= 1e-9 * std::max(p, q); }),
                roots.end());
    for (double a : roots) {
        // evaluation noise grows with the term magnitudes; scale the guard
        const double scale = 1.0 + std::abs(A) * a * a * a + B * a * a;
        if (std::abs(detail::langmuir_poly(A, B, a)) >= 1e-12 * scale)
            throw numeric_error("langmuir_cubic: root residual exceeds tolerance");
    }
    return roots;
}

namespace detail {

inline Equilibrium make_equilibrium(Configuration cfg, const FieldParams& params,
                                    EquilibriumClass cls, double side_length) {
    Equilibrium eq;
    eq.config = std::move(cfg);
    eq.momenta = zero_velocity_momenta(eq.config, params);
    eq.cls = cls;
    eq.side_length = side_length;
    eq.residual = zvs_gradient(eq.config, params).lpNorm<Eigen::Infinity>();
    return eq;
}

}  // namespace detail

// Equilateral Langmuir configuration of side a: electrons at (x0, 0, +-a/2)
// with x0 = -(sqrt(3)/2) a for eps >= 0 (mirrored for eps < 0).
inline Equilibrium langmuir_config(double a, const FieldParams& params) {
    params.validate();
    if (params.dims != 3) throw invalid_input("langmuir_config: requires dims = 3");
    if (std::abs(params.charge - 2.0) > 0.0)
        throw invalid_input("langmuir_config: axial balance requires charge 2");
    if (!(a > 0.0) || !std::isfinite(a)) throw invalid_input("langmuir_config: side must be > 0");
    const double x0 = (params.epsilon >= 0.0 ? -1.0 : 1.0) * std::sqrt(3.0) / 2.0 * a;
    Eigen::VectorXd q(6);
    q << x0, 0.0, 0.5 * a, x0, 0.0, -0.5 * a;
    Equilibrium eq = detail::make_equilibrium(Configuration(3, q), params,
                                              {EquilibriumType::TypeI_Langmuir, 0.0}, a);
    if (eq.residual > 1e-10) {
        std::ostringstream os;
        os << "langmuir_config: side " << a << " is not a cubic root (residual "
           << eq.residual << ")";
        throw not_an_equilibrium(os.str());
    }
    return eq;
}

namespace detail {

// Damped Newton on F with Jacobian J, backtracking on the gradient norm.
// Shared by the reduced Type II / Type III solvers.
template <typename F, typename J>
inline Eigen::VectorXd damped_newton(Eigen::VectorXd x, F func, J jac, int max_iter,
                                     double tol, const char* who) {
    Eigen::VectorXd f = func(x);
    for (int it = 0; it < max_iter; ++it) {
        if (f.lpNorm<Eigen::Infinity>() < tol) return x;
        Eigen::MatrixXd m = jac(x);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
        if (cod.rank() == 0) throw rank_deficiency(std::string(who) + ": zero-rank Jacobian");
        Eigen::VectorXd step = cod.solve(-f);
        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h < 30; ++h) {
            Eigen::VectorXd trial = x + lambda * step;
            Eigen::VectorXd ftrial;
            try {
                ftrial = func(trial);
            } catch (const singular_configuration&) {
                lambda *= 0.5;
                continue;
            }
            if (ftrial.norm() < f.norm() || ftrial.lpNorm<Eigen::Infinity>() < tol) {
                x = trial;
                f = ftrial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted)
            throw convergence_failure(std::string(who) + ": backtracking stalled",
                                      f.lpNorm<Eigen::Infinity>());
    }
    if (f.lpNorm<Eigen::Infinity>() < tol) return x;
    throw convergence_failure(std::string(who) + ": iteration cap exceeded",
                              f.lpNorm<Eigen::Infinity>());
}

}  // namespace detail

// Transverse configuration: electrons at (X, +-Y), mirror-symmetric about the
// x axis through the nucleus.  `angle` seeds the subtended angle; the solver
// converges to the nearby equilibrium and records the achieved angle.
inline Equilibrium type2_config(const FieldParams& params, double angle) {
    params.validate();
    if (params.dims != 2) throw invalid_input("type2_config: requires dims = 2");
    if (!(angle > 0.0) || !(angle <= M_PI + 1e-12))
        throw invalid_input("type2_config: angle must lie in (0, pi]");
    const double c = params.c();
    // radius scale: single-electron circular balance where it exists
    const double r0 = c > 1e-12 ? std::cbrt(params.charge / c) : 1.0;

    auto embed = [&](const Eigen::Vector2d& v) {
        Eigen::VectorXd q(4);
        q << v[0], v[1], v[0], -v[1];
        return Configuration(2, q);
    };
    auto reduced = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        const Configuration cfg = embed(Eigen::Vector2d(v[0], v[1]));
        return zvs_gradient(cfg, params).head(2);
    };
    auto reduced_jac = [&](const Eigen::VectorXd& v) -> Eigen::MatrixXd {
        const Configuration cfg = embed(Eigen::Vector2d(v[0], v[1]));
        const Eigen::MatrixXd h = zvs_hessian(cfg, params);
        // d/dX hits x of both electrons, d/dY hits +y of e1 and -y of e2
        Eigen::MatrixXd m(2, 2);
        m(0, 0) = h(0, 0) + h(0, 2);
        m(0, 1) = h(0, 1) - h(0, 3);
        m(1, 0) = h(1, 0) + h(1, 2);
        m(1, 1) = h(1, 1) - h(1, 3);
        return m;
    };

    // the transverse solutions can sit at very different radii from the
    // circular-balance scale, so walk a radius ladder out from the seed and
    // keep the first genuinely transverse solution
    const double bisector = params.epsilon >= 0.0 ? -1.0 : 1.0;
    Eigen::VectorXd sol;
    bool found = false;
    double last_residual = std::numeric_limits<double>::quiet_NaN();
    for (double scale : {1.0, 0.5, 2.0, 0.25, 4.0, 0.1, 10.0}) {
        Eigen::VectorXd seed(2);
        seed << bisector * scale * r0 * std::cos(0.5 * angle),
            scale * r0 * std::sin(0.5 * angle);
        try {
            Eigen::VectorXd cand =
                detail::damped_newton(seed, reduced, reduced_jac, 100, 1e-12, "type2_config");
            if (std::abs(cand[1]) > Configuration::singular_floor) {
                sol = cand;
                found = true;
                break;
            }
        } catch (const convergence_failure& e) {
            last_residual = e.residual;
        }
    }
    if (!found) {
        std::ostringstream os;
        os << "type2_config: no transverse equilibrium found from angle seed " << angle
           << " (radius ladder " << 0.1 * r0 << ".." << 10.0 * r0 << ", last residual "
           << last_residual << ")";
        throw root_not_found(os.str());
    }
    Configuration cfg = embed(Eigen::Vector2d(sol[0], std::abs(sol[1])));
    const double X = sol[0], Y = std::abs(sol[1]);
    EquilibriumClass cls;
    cls.type = EquilibriumType::TypeII_Transverse;
    cls.angle = std::acos(std::clamp((X * X - Y * Y) / (X * X + Y * Y), -1.0, 1.0));
    Equilibrium eq = detail::make_equilibrium(std::move(cfg), params, cls, 0.0);
    if (eq.residual > 1e-10)
        throw convergence_failure("type2_config: residual above tolerance", eq.residual);
    return eq;
}

enum class CollinearVariant { IIIa, IIIb };

// Collinear configuration: both electrons on the x axis, positions (x1, x2)
// from the 2-unknown on-axis force balance.  IIIa: same side of the nucleus
// (requires the uniform field); IIIb: opposite sides.
inline Equilibrium type3_config(const FieldParams& params, CollinearVariant variant) {
    params.validate();
    const double c = params.c();
    const double Z = params.charge;
    const double eps = params.epsilon;

    auto embed = [&](double x1, double x2) {
        Eigen::VectorXd q = Eigen::VectorXd::Zero(2 * params.dims);
        q[0] = x1;
        q[params.dims] = x2;
        return Configuration(params.dims, q);
    };
    auto reduced = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        const Configuration cfg = embed(v[0], v[1]);
        const Eigen::VectorXd g = zvs_gradient(cfg, params);
        Eigen::VectorXd f(2);
        f << g[0], g[params.dims];
        return f;
    };
    auto reduced_jac = [&](const Eigen::VectorXd& v) -> Eigen::MatrixXd {
        const Configuration cfg = embed(v[0], v[1]);
        const Eigen::MatrixXd h = zvs_hessian(cfg, params);
        Eigen::MatrixXd m(2, 2);
        m(0, 0) = h(0, 0);
        m(0, 1) = h(0, params.dims);
        m(1, 0) = h(params.dims, 0);
        m(1, 1) = h(params.dims, params.dims);
        return m;
    };

    Eigen::VectorXd seed(2);
    if (variant == CollinearVariant::IIIa) {
        if (!(std::abs(eps) > 0.0))
            throw root_not_found("type3_config: IIIa needs a nonzero field to hold both "
                                 "electrons on one side");
        const double side = eps > 0.0 ? -1.0 : 1.0;
        const double inner = side * std::sqrt(Z / std::abs(eps));
        double outer = c < -1e-12 ? eps / c : 3.0 * inner;
        if (std::abs(outer) < 2.0 * std::abs(inner)) outer = 3.0 * inner;
        seed << inner, outer;
    } else {
        if (c > 1e-12) {
            const double r = std::cbrt((Z - 0.25) / c);
            seed << r, -r;
        } else if (std::abs(eps) > 0.0) {
            const double side = eps > 0.0 ? -1.0 : 1.0;
            seed << side * std::sqrt(Z / std::abs(eps)),
                    (c < -1e-12 ? eps / c : -side * std::sqrt(Z / std::abs(eps)));
            if (seed[0] * seed[1] > 0.0) seed[1] = -seed[0];
        } else {
            throw root_not_found("type3_config: IIIb has no root at epsilon = 0 with "
                                 "non-confining rotation (c <= 0)");
        }
    }

    Eigen::VectorXd sol;
    try {
        sol = detail::damped_newton(seed, reduced, reduced_jac, 100, 1e-12, "type3_config");
    } catch (const convergence_failure& e) {
        std::ostringstream os;
        os << "type3_config: no collinear root from seed (" << seed[0] << ", " << seed[1]
           << "), last residual " << e.residual;
        throw root_not_found(os.str());
    }
    const bool same_side = sol[0] * sol[1] > 0.0;
    if (variant == CollinearVariant::IIIa && !same_side)
        throw root_not_found("type3_config: solver left the same-side branch");
    if (variant == CollinearVariant::IIIb && same_side)
        throw root_not_found("type3_config: solver left the opposite-side branch");
    const EquilibriumClass cls{same_side ? EquilibriumType::TypeIIIa_Collinear
                                         : EquilibriumType::TypeIIIb_Collinear,
                               0.0};
    Equilibrium eq = detail::make_equilibrium(embed(sol[0], sol[1]), params, cls, 0.0);
    if (eq.residual > 1e-10)
        throw convergence_failure("type3_config: residual above tolerance", eq.residual);
    return eq;
}

// Damped Newton refinement of an arbitrary guess to a ZVS extremum.  The
// Hessian is rank-revealed (minimum-norm step), so the rotational zero mode
// at eps = 0 does not stall the iteration.
inline Equilibrium refine(const Configuration& guess, const FieldParams& params,
                          int max_iter = 100) {
    params.validate();
    if (guess.dims != params.dims) throw invalid_input("refine: dims mismatch");
    guess.check_nonsingular();

    Configuration cfg = guess;
    Eigen::VectorXd g = zvs_gradient(cfg, params);
    double res = g.lpNorm<Eigen::Infinity>();
    int it = 0;
    while (res > 1e-12 && it < max_iter) {
        const Eigen::MatrixXd h = zvs_hessian(cfg, params);
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(h);
        if (cod.rank() == 0) throw rank_deficiency("refine: zero-rank Hessian");
        const Eigen::VectorXd step = cod.solve(-g);
        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 30; ++half) {
            Configuration trial = cfg;
            trial.q += lambda * step;
            Eigen::VectorXd gt;
            try {
                trial.check_nonsingular();
                gt = zvs_gradient(trial, params);
            } catch (const singular_configuration&) {
                lambda *= 0.5;
                continue;
            }
            if (gt.norm() < g.norm() || gt.lpNorm<Eigen::Infinity>() < 1e-12) {
                cfg = trial;
                g = gt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        res = g.lpNorm<Eigen::Infinity>();
        if (!accepted) break;
        ++it;
    }
    if (res > 1e-10) {
        std::ostringstream os;
        os << "refine: no convergence after " << it << " iterations, residual " << res;
        throw convergence_failure(os.str(), res);
    }
    EquilibriumClass cls = classify_equilibrium(cfg);
    double side = 0.0;
    if (cls.type == EquilibriumType::TypeI_Langmuir)
        side = (cfg.r(0) + cfg.r(1) + cfg.r12()) / 3.0;
    Equilibrium eq = detail::make_equilibrium(std::move(cfg), params, cls, side);
    eq.residual = res;
    return eq;
}

}  // namespace trojan

#endif
