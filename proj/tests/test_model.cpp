#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>

#include <trojan/trojan.hpp>

#include "test_util.hpp"

using namespace trojan;
using testutil::params;
using testutil::random_config;
using testutil::random_state;

namespace {

// Reference phase point used by the frozen-value checks below.
PhaseState reference_state() {
    Eigen::VectorXd q(6), p(6);
    q << 1.1, -0.3, 0.4, -0.7, 0.8, -0.2;
    p << 0.2, 0.5, -0.1, -0.4, 0.3, 0.6;
    return PhaseState(Configuration(3, q), p);
}

double fd_partial(const std::function<double(const Eigen::VectorXd&)>& f,
                  const Eigen::VectorXd& x, int i, double h) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    return (f(a) - f(b)) / (2.0 * h);
}

}  // namespace

TEST_CASE("hamiltonian and zvs match independently computed reference values") {
    const FieldParams p = params(0.7, 0.9, -1);
    const PhaseState s = reference_state();
    CHECK(hamiltonian(s, p) == Catch::Approx(-2.073501678701279).epsilon(1e-13));
    CHECK(zvs(s.config, p) == Catch::Approx(-2.433101678701279).epsilon(1e-13));

    const Eigen::VectorXd g = zvs_gradient(s.config, p);
    const double expected[6] = {2.207447562924012,   -0.2988382402316554, 0.39660607753185645,
                                -0.1826099041085641, 1.3280001827274772,  -0.25919188672325083};
    for (int i = 0; i < 6; ++i) CHECK(g[i] == Catch::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("hamiltonian at zero-velocity momenta equals the zvs") {
    std::mt19937 rng(11);
    for (int dims : {2, 3}) {
        const FieldParams p = params(0.8, 0.6, dims == 3 ? -1 : 1, dims);
        for (int k = 0; k < 200; ++k) {
            const Configuration cfg = random_config(rng, dims);
            const PhaseState s(cfg, zero_velocity_momenta(cfg, p));
            const double h = hamiltonian(s, p);
            const double v = zvs(cfg, p);
            CHECK(h == Catch::Approx(v).epsilon(1e-12).margin(1e-12));
        }
    }
}

TEST_CASE("equations of motion are the canonical flow of the hamiltonian") {
    std::mt19937 rng(23);
    const double h = 1e-6;
    for (int dims : {3, 2}) {
        for (int branch : {-1, 1}) {
            const FieldParams p = params(0.6, 0.4, branch, dims);
            for (int k = 0; k < 25; ++k) {
                const PhaseState s = random_state(rng, dims);
                Eigen::VectorXd dq(2 * dims), dp(2 * dims);
                equations_of_motion(s, p, dq, dp);

                const auto h_of_q = [&](const Eigen::VectorXd& q) {
                    return hamiltonian(PhaseState(Configuration(dims, q), s.p), p);
                };
                const auto h_of_p = [&](const Eigen::VectorXd& mom) {
                    return hamiltonian(PhaseState(s.config, mom), p);
                };
                for (int i = 0; i < 2 * dims; ++i) {
                    const double dHdp = fd_partial(h_of_p, s.p, i, h);
                    const double dHdq = fd_partial(h_of_q, s.config.q, i, h);
                    CHECK(dq[i] == Catch::Approx(dHdp).margin(2e-6));
                    CHECK(dp[i] == Catch::Approx(-dHdq).margin(2e-6));
                }
            }
        }
    }
}

TEST_CASE("zvs gradient and hessian agree with finite differences") {
    std::mt19937 rng(37);
    const FieldParams p = params(0.5, 1.2, -1);
    const auto v = [&](const Eigen::VectorXd& q) { return zvs(Configuration(3, q), p); };
    for (int k = 0; k < 20; ++k) {
        const Configuration cfg = random_config(rng, 3);
        const Eigen::VectorXd g = zvs_gradient(cfg, p);
        const Eigen::MatrixXd hess = zvs_hessian(cfg, p);

        CHECK((hess - hess.transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
        for (int i = 0; i < 6; ++i) {
            CHECK(g[i] == Catch::Approx(fd_partial(v, cfg.q, i, 1e-6)).margin(2e-6));
            const auto gi = [&](const Eigen::VectorXd& q) {
                return zvs_gradient(Configuration(3, q), p)[i];
            };
            for (int j = 0; j < 6; ++j)
                CHECK(hess(i, j) == Catch::Approx(fd_partial(gi, cfg.q, j, 1e-6)).margin(5e-6));
        }
    }
}

TEST_CASE("potential splits into zvs plus the centrifugal completion") {
    std::mt19937 rng(41);
    const FieldParams p = params(0.9, 0.7, -1);
    const double g = p.g();
    for (int k = 0; k < 50; ++k) {
        const Configuration cfg = random_config(rng, 3);
        double rho2 = 0.0;
        for (int e = 0; e < 2; ++e)
            rho2 += cfg.x(e) * cfg.x(e) + cfg.y(e) * cfg.y(e);
        CHECK(potential(cfg, p) ==
              Catch::Approx(zvs(cfg, p) + 0.5 * g * g * rho2).epsilon(1e-13).margin(1e-13));

        const Eigen::MatrixXd diff = potential_hessian(cfg, p) - zvs_hessian(cfg, p);
        Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(6, 6);
        for (int e = 0; e < 2; ++e)
            for (int a = 0; a < 2; ++a) expected(3 * e + a, 3 * e + a) = g * g;
        CHECK((diff - expected).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("zvs is rotation invariant exactly when the field is absent") {
    std::mt19937 rng(53);
    const double theta = 0.3;
    Eigen::Matrix3d rot;
    rot << std::cos(theta), -std::sin(theta), 0, std::sin(theta), std::cos(theta), 0, 0, 0, 1;
    const Configuration cfg = random_config(rng, 3);
    Eigen::VectorXd qr(6);
    qr.segment<3>(0) = rot * cfg.pos(0);
    qr.segment<3>(3) = rot * cfg.pos(1);
    const Configuration rotated(3, qr);

    const FieldParams free_field = params(0.8, 0.0, -1);
    CHECK(zvs(rotated, free_field) ==
          Catch::Approx(zvs(cfg, free_field)).epsilon(1e-12).margin(1e-12));

    const FieldParams with_field = params(0.8, 0.5, -1);
    CHECK(std::abs(zvs(rotated, with_field) - zvs(cfg, with_field)) > 1e-6);
}

TEST_CASE("zvs and hamiltonian respect exchange and z-reflection symmetry") {
    std::mt19937 rng(67);
    const FieldParams p = params(0.6, 1.1, -1);
    for (int k = 0; k < 50; ++k) {
        const PhaseState s = random_state(rng, 3);
        const Configuration sw = s.config.swapped();
        Eigen::VectorXd psw(6);
        psw << s.p.segment<3>(3), s.p.segment<3>(0);
        CHECK(zvs(sw, p) == Catch::Approx(zvs(s.config, p)).epsilon(1e-13).margin(1e-13));
        CHECK(hamiltonian(PhaseState(sw, psw), p) ==
              Catch::Approx(hamiltonian(s, p)).epsilon(1e-13).margin(1e-13));

        Eigen::VectorXd qz = s.config.q;
        qz[2] = -qz[2];
        qz[5] = -qz[5];
        CHECK(zvs(Configuration(3, qz), p) ==
              Catch::Approx(zvs(s.config, p)).epsilon(1e-13).margin(1e-13));
    }
}

TEST_CASE("planar 3d states reproduce the 2d model") {
    std::mt19937 rng(71);
    for (int branch : {-1, 1}) {
        const FieldParams p2 = params(0.7, 0.8, branch, 2);
        const FieldParams p3 = params(0.7, 0.8, branch, 3);
        for (int k = 0; k < 30; ++k) {
            const PhaseState s2 = random_state(rng, 2);
            Eigen::VectorXd q3(6), mom3(6);
            q3 << s2.config.q[0], s2.config.q[1], 0.0, s2.config.q[2], s2.config.q[3], 0.0;
            mom3 << s2.p[0], s2.p[1], 0.0, s2.p[2], s2.p[3], 0.0;
            const PhaseState s3(Configuration(3, q3), mom3);
            CHECK(hamiltonian(s2, p2) ==
                  Catch::Approx(hamiltonian(s3, p3)).epsilon(1e-14).margin(1e-14));
            CHECK(zvs(s2.config, p2) ==
                  Catch::Approx(zvs(s3.config, p3)).epsilon(1e-14).margin(1e-14));
        }
    }
}

TEST_CASE("singular configurations are rejected") {
    const FieldParams p = params(0.5, 0.0, -1);
    Eigen::VectorXd q(6);
    q << 0.0, 0.0, 0.0, 1.0, 0.0, 0.0;  // electron 1 on the nucleus
    CHECK_THROWS_AS(zvs(Configuration(3, q), p), singular_configuration);
    q << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;  // coincident electrons
    CHECK_THROWS_AS(zvs(Configuration(3, q), p), singular_configuration);
}

TEST_CASE("dimension mismatches and invalid parameters are rejected") {
    const FieldParams p = params(0.5, 0.0, -1, 2);
    std::mt19937 rng(5);
    const Configuration cfg3 = random_config(rng, 3);
    CHECK_THROWS_AS(zvs(cfg3, p), invalid_input);

    FieldParams bad = params(0.5, 0.0, -1);
    bad.branch = 0;
    CHECK_THROWS_AS(bad.validate(), invalid_input);
    bad = params(-0.5, 0.0, -1);
    CHECK_THROWS_AS(bad.validate(), invalid_input);
}
