#ifndef TROJAN_MODEL_HPP
#define TROJAN_MODEL_HPP

#include "common.hpp"

namespace trojan {

// Rotating-frame Hamiltonian (scaled units):
//   H = sum_i [ p_i^2/2 - Z/r_i - g (x_i p_{y_i} - y_i p_{x_i})
//               + (x_i^2 + y_i^2)/8 + eps x_i ] + 1/r_12,   g = omega + branch/2.
inline double hamiltonian(const PhaseState& state, const FieldParams& params) {
    params.validate();
    const Configuration& cfg = state.config;
    if (cfg.dims != params.dims) throw invalid_input("hamiltonian: dims mismatch");
    cfg.check_nonsingular();
    const double g = params.g();
    double h = 1.0 / cfg.r12();
    for (int i = 0; i < 2; ++i) {
        const auto p = state.p.segment(i * cfg.dims, cfg.dims);
        const double x = cfg.x(i), y = cfg.y(i);
        h += 0.5 * p.squaredNorm() - params.charge / cfg.r(i)
             - g * (x * p[1] - y * p[0])
             + 0.125 * (x * x + y * y) + params.epsilon * x;
    }
    return h;
}

// Momenta that make all rotating-frame velocities vanish at a configuration:
// qdot = p + g(y, -x[, 0]) = 0  =>  p = (-g y, g x[, 0]).
inline Eigen::VectorXd zero_velocity_momenta(const Configuration& cfg, const FieldParams& params) {
    const double g = params.g();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(2 * cfg.dims);
    for (int i = 0; i < 2; ++i) {
        p[i * cfg.dims] = -g * cfg.y(i);
        p[i * cfg.dims + 1] = g * cfg.x(i);
    }
    return p;
}

// Canonical equations (dq/dt, dp/dt) = (dH/dp, -dH/dq), analytic.
// Layout matches PhaseState: [q1; q2; p1; p2] time derivatives as [dq; dp].
inline void equations_of_motion(const PhaseState& state, const FieldParams& params,
                                Eigen::VectorXd& dq, Eigen::VectorXd& dp) {
    const Configuration& cfg = state.config;
    if (cfg.dims != params.dims) throw invalid_input("equations_of_motion: dims mismatch");
    cfg.check_nonsingular();
    const int d = cfg.dims;
    const double g = params.g();
    const double Z = params.charge;
    dq.resize(2 * d);
    dp.resize(2 * d);
    const Eigen::VectorXd u = cfg.pos(0) - cfg.pos(1);
    const double ru3 = std::pow(u.norm(), 3);
    for (int i = 0; i < 2; ++i) {
        const auto qi = cfg.pos(i);
        const auto pi = state.p.segment(i * d, d);
        const double r3 = std::pow(qi.norm(), 3);
        const double sgn = (i == 0) ? 1.0 : -1.0;
        dq.segment(i * d, d) = pi;
        dq[i * d] += g * qi[1];
        dq[i * d + 1] -= g * qi[0];
        dp.segment(i * d, d) = -Z * qi / r3 + sgn * u / ru3;
        dp[i * d] += g * pi[1] - 0.25 * qi[0] - params.epsilon;
        dp[i * d + 1] += -g * pi[0] - 0.25 * qi[1];
    }
}

inline Eigen::VectorXd equations_of_motion(const PhaseState& state, const FieldParams& params) {
    Eigen::VectorXd dq, dp, out(2 * state.p.size());
    equations_of_motion(state, params, dq, dp);
    out << dq, dp;
    return out;
}

// Zero-velocity surface:
//   ZVS = sum_i [ -Z/r_i + eps x_i - (c/2)(x_i^2 + y_i^2) ] + 1/r_12,
//   c = omega^2 + branch*omega.
// Substituting the zero-velocity momenta into H reproduces this exactly; its
// extrema are the rotating-frame equilibria.
inline double zvs(const Configuration& cfg, const FieldParams& params) {
    params.validate();
    if (cfg.dims != params.dims) throw invalid_input("zvs: dims mismatch");
    cfg.check_nonsingular();
    const double c = params.c();
    double v = 1.0 / cfg.r12();
    for (int i = 0; i < 2; ++i) {
        const double x = cfg.x(i), y = cfg.y(i);
        v += -params.charge / cfg.r(i) + params.epsilon * x - 0.5 * c * (x * x + y * y);
    }
    return v;
}

inline Eigen::VectorXd zvs_gradient(const Configuration& cfg, const FieldParams& params) {
    params.validate();
    if (cfg.dims != params.dims) throw invalid_input("zvs_gradient: dims mismatch");
    cfg.check_nonsingular();
    const int d = cfg.dims;
    const double c = params.c();
    const double Z = params.charge;
    Eigen::VectorXd grad(2 * d);
    const Eigen::VectorXd u = cfg.pos(0) - cfg.pos(1);
    const double ru3 = std::pow(u.norm(), 3);
    for (int i = 0; i < 2; ++i) {
        const auto qi = cfg.pos(i);
        const double r3 = std::pow(qi.norm(), 3);
        const double sgn = (i == 0) ? 1.0 : -1.0;
        grad.segment(i * d, d) = Z * qi / r3 - sgn * u / ru3;
        grad[i * d] += params.epsilon - c * qi[0];
        grad[i * d + 1] += -c * qi[1];
    }
    return grad;
}

namespace detail {

// Hessian of -1/|v| : (I/|v|^3 - 3 v v^T/|v|^5). Scaled by charge for -Z/r.
inline Eigen::MatrixXd attractive_coulomb_hessian(const Eigen::VectorXd& v) {
    const double r = v.norm();
    const double r3 = r * r * r;
    const double r5 = r3 * r * r;
    const int d = static_cast<int>(v.size());
    return Eigen::MatrixXd::Identity(d, d) / r3 - 3.0 * v * v.transpose() / r5;
}

}  // namespace detail

inline Eigen::MatrixXd zvs_hessian(const Configuration& cfg, const FieldParams& params) {
    params.validate();
    if (cfg.dims != params.dims) throw invalid_input("zvs_hessian: dims mismatch");
    cfg.check_nonsingular();
    const int d = cfg.dims;
    const double c = params.c();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    for (int i = 0; i < 2; ++i) {
        Eigen::MatrixXd blk = params.charge * detail::attractive_coulomb_hessian(cfg.pos(i));
        blk(0, 0) -= c;
        blk(1, 1) -= c;
        h.block(i * d, i * d, d, d) = blk;
    }
    // interaction +1/r_12: diagonal blocks -K, off-diagonal +K with
    // K = attractive_coulomb_hessian(q1 - q2)
    const Eigen::MatrixXd k = detail::attractive_coulomb_hessian(cfg.pos(0) - cfg.pos(1));
    h.block(0, 0, d, d) -= k;
    h.block(d, d, d, d) -= k;
    h.block(0, d, d, d) += k;
    h.block(d, 0, d, d) += k;
    return h;
}

// True potential of the Hamiltonian, V = sum_i [-Z/r_i + rho_i^2/8 + eps x_i] + 1/r_12.
// Differs from the ZVS by (g^2/2) sum_i rho_i^2; equals it when g = 0.
inline double potential(const Configuration& cfg, const FieldParams& params) {
    const double g = params.g();
    double v = zvs(cfg, params);
    for (int i = 0; i < 2; ++i) {
        const double x = cfg.x(i), y = cfg.y(i);
        v += 0.5 * g * g * (x * x + y * y);
    }
    return v;
}

inline Eigen::MatrixXd potential_hessian(const Configuration& cfg, const FieldParams& params) {
    const double g2 = params.g() * params.g();
    Eigen::MatrixXd h = zvs_hessian(cfg, params);
    for (int i = 0; i < 2; ++i) {
        h(i * cfg.dims, i * cfg.dims) += g2;
        h(i * cfg.dims + 1, i * cfg.dims + 1) += g2;
    }
    return h;
}

}  // namespace trojan

#endif
