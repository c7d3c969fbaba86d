#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <trojan/trojan.hpp>

#include "test_util.hpp"

using namespace trojan;
using testutil::params;

namespace {

// outer (stable) Langmuir equilibrium on the g = 0 line
Equilibrium stable_equilibrium(const FieldParams& p) {
    const std::vector<double> roots = langmuir_cubic(p);
    REQUIRE(roots.size() == 2);
    return langmuir_config(roots.back(), p);
}

PhaseState perturbed(const Equilibrium& eq, double delta) {
    PhaseState s = eq.state();
    s.config.q.array() += delta;
    s.p.array() += delta;
    return s;
}

double max_state_distance(const PhaseState& a, const PhaseState& b) {
    return std::max((a.config.q - b.config.q).lpNorm<Eigen::Infinity>(),
                    (a.p - b.p).lpNorm<Eigen::Infinity>());
}

}  // namespace

TEST_CASE("an equilibrium is a fixed point of the flow") {
    const FieldParams p = params(0.5, 1.5, -1);
    const Equilibrium eq = stable_equilibrium(p);
    const double period = 2.0 * M_PI / p.omega;
    const Trajectory traj = integrate(eq.state(), p, 10.0 * period);
    for (const auto& s : traj.samples)
        CHECK(max_state_distance(s.state, eq.state()) < 1e-8);
}

TEST_CASE("energy is conserved along a perturbed orbit") {
    const FieldParams p = params(0.5, 1.5, -1);
    const Equilibrium eq = stable_equilibrium(p);
    const double period = 2.0 * M_PI / p.omega;
    IntegrationControl ctl;
    ctl.rel_tol = 1e-12;
    ctl.abs_tol = 1e-12;
    const Trajectory traj = integrate(perturbed(eq, 1e-3), p, 10.0 * period, ctl);

    CHECK(traj.energy_drift < 1e-9);

    // the reported drift is the max relative deviation over the samples
    const double e0 = hamiltonian(traj.samples.front().state, p);
    double drift = 0.0;
    for (const auto& s : traj.samples)
        drift = std::max(drift, std::abs(hamiltonian(s.state, p) - e0) /
                                    std::max(std::abs(e0), 1e-12));
    CHECK(traj.energy_drift == Catch::Approx(drift).margin(1e-15));
}

TEST_CASE("time reversal returns to the initial state") {
    const FieldParams p = params(0.5, 1.5, -1);
    const PhaseState start = perturbed(stable_equilibrium(p), 1e-3);
    const double t_final = 3.0 * 2.0 * M_PI / p.omega;
    IntegrationControl ctl;
    ctl.rel_tol = 1e-12;
    ctl.abs_tol = 1e-12;
    const Trajectory fwd = integrate(start, p, t_final, ctl);
    const Trajectory back = integrate(fwd.samples.back().state, p, t_final, ctl, -1);
    CHECK(max_state_distance(back.samples.back().state, start) < 1e-7);
}

TEST_CASE("exchange plus z-reflection symmetry is preserved by the flow") {
    const FieldParams p = params(0.5, 1.5, -1);
    const Equilibrium eq = stable_equilibrium(p);
    PhaseState s = eq.state();
    // symmetric perturbation: electron 2 gets the z-mirrored copy
    const double dx = 2e-3, dy = -1e-3, dz = 3e-3;
    s.config.q[0] += dx;
    s.config.q[1] += dy;
    s.config.q[2] += dz;
    s.config.q[3] += dx;
    s.config.q[4] += dy;
    s.config.q[5] -= dz;
    const Trajectory traj = integrate(s, p, 2.0 * 2.0 * M_PI / p.omega);
    for (const auto& smp : traj.samples) {
        const auto& q = smp.state.config.q;
        const auto& mom = smp.state.p;
        CHECK(std::abs(q[0] - q[3]) < 1e-8);
        CHECK(std::abs(q[1] - q[4]) < 1e-8);
        CHECK(std::abs(q[2] + q[5]) < 1e-8);
        CHECK(std::abs(mom[2] + mom[5]) < 1e-8);
    }
}

TEST_CASE("head-on electron encounter raises collision_error") {
    const FieldParams p = params(0.5, 0.0, -1);
    Eigen::VectorXd q(6), mom(6);
    q << 0.1, 0.0, 0.0, -0.1, 0.0, 0.0;
    const double g = p.g();
    mom << -2.0, g * 0.1, 0.0, 2.0, -g * 0.1, 0.0;
    const PhaseState s(Configuration(3, q), mom);
    bool thrown = false;
    try {
        integrate(s, p, 1.0);
    } catch (const collision_error& e) {
        thrown = true;
        CHECK(e.time > 0.0);
        CHECK(e.time < 1.0);
    }
    CHECK(thrown);
}

TEST_CASE("lab frame transform rotates by omega t about z") {
    const FieldParams p = params(0.7, 1.2, -1);
    const Equilibrium eq = langmuir_config(langmuir_cubic(p).back(), p);
    const PhaseState start = perturbed(eq, 1e-3);

    // half a rotation period: x and y negate, z is untouched
    const double half = M_PI / p.omega;
    const Trajectory rot = integrate(start, p, half);
    const Trajectory lab = to_lab_frame(rot, p.omega);
    REQUIRE(lab.samples.size() == rot.samples.size());
    const auto& r = rot.samples.back().state;
    const auto& l = lab.samples.back().state;
    for (int e = 0; e < 2; ++e) {
        CHECK(l.config.q[3 * e + 0] == Catch::Approx(-r.config.q[3 * e + 0]).margin(1e-9));
        CHECK(l.config.q[3 * e + 1] == Catch::Approx(-r.config.q[3 * e + 1]).margin(1e-9));
        CHECK(l.config.q[3 * e + 2] == r.config.q[3 * e + 2]);
        CHECK(l.p[3 * e + 0] == Catch::Approx(-r.p[3 * e + 0]).margin(1e-9));
        CHECK(l.p[3 * e + 1] == Catch::Approx(-r.p[3 * e + 1]).margin(1e-9));
        CHECK(l.p[3 * e + 2] == r.p[3 * e + 2]);
    }
    // t = 0 sample is identical in both frames
    CHECK(max_state_distance(lab.samples.front().state, rot.samples.front().state) == 0.0);

    // a full period returns the lab frame to the rotating coordinates
    const Trajectory rot2 = integrate(start, p, 2.0 * half);
    const Trajectory lab2 = to_lab_frame(rot2, p.omega);
    CHECK(max_state_distance(lab2.samples.back().state, rot2.samples.back().state) < 1e-9);
}

TEST_CASE("samples sit on the fixed stride plus the exact final time") {
    const FieldParams p = params(0.5, 1.5, -1);
    const Equilibrium eq = stable_equilibrium(p);
    const double period = 2.0 * M_PI / p.omega;
    const double dt = period / 200.0;
    const double t_final = 3.7;
    const Trajectory traj = integrate(eq.state(), p, t_final);
    REQUIRE(traj.samples.size() >= 2);
    CHECK(traj.samples.front().t == 0.0);
    CHECK(traj.samples.back().t == t_final);
    for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k)
        CHECK(traj.samples[k].t == static_cast<double>(k) * dt);
    for (std::size_t k = 1; k < traj.samples.size(); ++k)
        CHECK(traj.samples[k].t > traj.samples[k - 1].t);
}

TEST_CASE("integrate validates its inputs") {
    const FieldParams p = params(0.5, 1.5, -1);
    const PhaseState s = stable_equilibrium(p).state();
    CHECK_THROWS_AS(integrate(s, p, 0.0), invalid_input);
    CHECK_THROWS_AS(integrate(s, p, -1.0), invalid_input);
    IntegrationControl bad;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate(s, p, 1.0, bad), invalid_input);
    bad = {};
    bad.samples_per_period = 0;
    CHECK_THROWS_AS(integrate(s, p, 1.0, bad), invalid_input);
    CHECK_THROWS_AS(integrate(s, p, 1.0, {}, 0), invalid_input);
    CHECK_THROWS_AS(integrate(s, params(0.5, 1.5, -1, 2), 1.0), invalid_input);
}

TEST_CASE("two dimensional transverse equilibrium is a fixed point") {
    const FieldParams p = params(0.5, 1.2, -1, 2);
    // the outer pair is the mildest saddle here, so integration noise stays
    // far below the fixed-point tolerance over two periods
    const Equilibrium eq = type2_config(p, M_PI);
    const Trajectory traj = integrate(eq.state(), p, 2.0 * 2.0 * M_PI / p.omega);
    for (const auto& s : traj.samples)
        CHECK(max_state_distance(s.state, eq.state()) < 1e-8);
    CHECK(traj.energy_drift < 1e-10);
}
