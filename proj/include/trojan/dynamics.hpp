#ifndef TROJAN_DYNAMICS_HPP
#define TROJAN_DYNAMICS_HPP

#include "model.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <functional>
#include <sstream>
#include <vector>

namespace trojan {

struct IntegrationControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    int samples_per_period = 200;  // rotation period 2*pi/omega
};

struct Trajectory {
    struct Sample {
        double t = 0.0;
        PhaseState state;
    };
    std::vector<Sample> samples;
    double energy_drift = 0.0;  // max relative deviation of hamiltonian
};

namespace detail {

// collision guard threshold for the flow (coarser than the configuration
// singular floor; trajectories of interest never get near it)
constexpr double collision_floor = 1e-6;

struct FlowSystem {
    const FieldParams* params;
    int direction;  // +1 forward, -1 time-reversed
    mutable PhaseState scratch;
    mutable Eigen::VectorXd dq, dp;

    void operator()(const std::vector<double>& y, std::vector<double>& dydt, double t) const {
        const int d = params->dims;
        const int n = 2 * d;
        for (int i = 0; i < n; ++i) {
            scratch.config.q[i] = y[static_cast<std::size_t>(i)];
            scratch.p[i] = y[static_cast<std::size_t>(n + i)];
        }
        const double rmin =
            std::min({scratch.config.r(0), scratch.config.r(1), scratch.config.r12()});
        if (rmin < collision_floor) {
            std::ostringstream os;
            os << "collision: interparticle distance " << rmin << " below "
               << collision_floor << " at t = " << t;
            throw collision_error(os.str(), t);
        }
        equations_of_motion(scratch, *params, dq, dp);
        dydt.resize(static_cast<std::size_t>(2 * n));
        for (int i = 0; i < n; ++i) {
            dydt[static_cast<std::size_t>(i)] = direction * dq[i];
            dydt[static_cast<std::size_t>(n + i)] = direction * dp[i];
        }
    }
};

}  // namespace detail

// Adaptive RKF78 integration of the canonical equations.  Samples are taken
// on a fixed stride (samples_per_period per 2*pi/omega) plus the exact final
// time; the stepper lands on sample times exactly (no interpolation).
// direction = -1 integrates the time-reversed flow (for reversibility checks).
inline Trajectory integrate(const PhaseState& initial, const FieldParams& params,
                            double t_final, IntegrationControl control = {},
                            int direction = +1) {
    params.validate();
    if (initial.dims() != params.dims) throw invalid_input("integrate: dims mismatch");
    if (!(t_final > 0.0) || !std::isfinite(t_final))
        throw invalid_input("integrate: t_final must be positive and finite");
    if (!(control.rel_tol > 0.0) || !(control.abs_tol > 0.0))
        throw invalid_input("integrate: tolerances must be positive");
    if (control.samples_per_period < 1)
        throw invalid_input("integrate: samples_per_period must be >= 1");
    if (direction != 1 && direction != -1)
        throw invalid_input("integrate: direction must be +1 or -1");
    initial.config.check_nonsingular();

    const int d = params.dims;
    const int n = 2 * d;
    detail::FlowSystem sys;
    sys.params = &params;
    sys.direction = direction;
    sys.scratch = initial;
    sys.dq.resize(n);
    sys.dp.resize(n);

    std::vector<double> y(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] = initial.config.q[i];
        y[static_cast<std::size_t>(n + i)] = initial.p[i];
    }

    const double period = 2.0 * M_PI / params.omega;
    const double dt_sample = period / control.samples_per_period;

    std::vector<double> schedule;
    schedule.push_back(0.0);
    for (long long k = 1; k * dt_sample < t_final * (1.0 - 1e-12); ++k)
        schedule.push_back(k * dt_sample);
    schedule.push_back(t_final);

    auto unpack = [&](double t) {
        PhaseState s = initial;
        for (int i = 0; i < n; ++i) {
            s.config.q[i] = y[static_cast<std::size_t>(i)];
            s.p[i] = y[static_cast<std::size_t>(n + i)];
        }
        return Trajectory::Sample{t, std::move(s)};
    };

    namespace ode = boost::numeric::odeint;
    using stepper_t = ode::runge_kutta_fehlberg78<std::vector<double>>;
    auto stepper = ode::make_controlled<stepper_t>(control.abs_tol, control.rel_tol);

    Trajectory traj;
    traj.samples.reserve(schedule.size());
    traj.samples.push_back(unpack(0.0));
    const double e0 = hamiltonian(traj.samples.front().state, params);
    const double e_denom = std::max(std::abs(e0), 1e-12);
    double drift = 0.0;

    double t = 0.0;
    double h = std::min(dt_sample, period / 1000.0);
    long long attempts = 0;
    for (std::size_t k = 1; k < schedule.size(); ++k) {
        const double ts = schedule[k];
        while (t < ts - 1e-13 * std::max(1.0, ts)) {
            const bool clamped = h > ts - t;
            double trial = clamped ? ts - t : h;
            if (trial < 1e-14 * std::max(1.0, std::abs(t))) {
                Eigen::Map<const Eigen::VectorXd> q(y.data(), n);
                const double rmin =
                    std::min({q.segment(0, d).norm(), q.segment(d, d).norm(),
                              (q.segment(0, d) - q.segment(d, d)).norm()});
                std::ostringstream os;
                if (rmin < 1e-3) {
                    os << "collision: step size underflow at t = " << t
                       << " with minimum separation " << rmin;
                    throw collision_error(os.str(), t);
                }
                os << "integrate: step size underflow at t = " << t
                   << " (requested tolerances not achievable)";
                throw tolerance_failure(os.str());
            }
            const auto res = stepper.try_step(std::ref(sys), y, t, trial);
            if (res == ode::success) {
                if (!clamped) h = trial;  // accept the new suggestion
            } else {
                h = trial;  // reduced suggestion, retry
            }
            if (++attempts > 200000000LL)
                throw tolerance_failure("integrate: step budget exhausted");
        }
        t = ts;  // guard against roundoff creep
        traj.samples.push_back(unpack(ts));
        drift = std::max(drift,
                         std::abs(hamiltonian(traj.samples.back().state, params) - e0) / e_denom);
    }
    traj.energy_drift = drift;
    return traj;
}

// Rotate every sample to the laboratory frame: positions and canonical
// momenta both rotate by angle omega*t about z (for the time-reversed
// direction pass the signed omega the caller used).
inline Trajectory to_lab_frame(const Trajectory& traj, double omega) {
    Trajectory out = traj;
    for (auto& s : out.samples) {
        const double a = omega * s.t;
        const double ca = std::cos(a), sa = std::sin(a);
        const int d = s.state.dims();
        for (int i = 0; i < 2; ++i) {
            auto rot = [&](Eigen::VectorXd& v) {
                const double vx = v[i * d], vy = v[i * d + 1];
                v[i * d] = ca * vx - sa * vy;
                v[i * d + 1] = sa * vx + ca * vy;
            };
            rot(s.state.config.q);
            rot(s.state.p);
        }
    }
    return out;
}

}  // namespace trojan

#endif
