#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <trojan/trojan.hpp>

#include "test_util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace trojan;
using testutil::params;

namespace {

// Flow in the linearization's phase-space ordering z = [p1, p2, q1, q2].
Eigen::VectorXd flow(const Eigen::VectorXd& z, const FieldParams& p) {
    const int n = static_cast<int>(z.size()) / 2;
    const PhaseState s(Configuration(p.dims, z.tail(n)), z.head(n));
    Eigen::VectorXd dq(n), dp(n);
    equations_of_motion(s, p, dq, dp);
    Eigen::VectorXd out(2 * n);
    out.head(n) = dp;
    out.tail(n) = dq;
    return out;
}

Eigen::MatrixXd fd_jacobian(const Equilibrium& eq, const FieldParams& p, double h = 1e-5) {
    const int n = 2 * p.dims;
    Eigen::VectorXd z(2 * n);
    z.head(n) = eq.momenta;
    z.tail(n) = eq.config.q;
    Eigen::MatrixXd j(2 * n, 2 * n);
    for (int k = 0; k < 2 * n; ++k) {
        Eigen::VectorXd a = z, b = z;
        a[k] += h;
        b[k] -= h;
        j.col(k) = (flow(a, p) - flow(b, p)) / (2.0 * h);
    }
    return j;
}

std::vector<std::pair<FieldParams, Equilibrium>> sample_equilibria() {
    std::vector<std::pair<FieldParams, Equilibrium>> out;
    const auto add_langmuir = [&](double w, double e, int b) {
        const FieldParams p = params(w, e, b);
        for (double a : langmuir_cubic(p)) out.emplace_back(p, langmuir_config(a, p));
    };
    add_langmuir(0.5, 1.5, -1);
    add_langmuir(0.3, 2.0, -1);
    add_langmuir(1.0, 0.0, 1);
    add_langmuir(2.0, 1.0, 1);
    add_langmuir(1.2, 0.5, -1);
    const FieldParams p2 = params(0.5, 1.2, -1, 2);
    out.emplace_back(p2, type2_config(p2, M_PI / 2));
    const FieldParams p3a = params(0.3, 2.0, -1);
    out.emplace_back(p3a, type3_config(p3a, CollinearVariant::IIIa));
    const FieldParams p3b = params(1.5, 0.0, -1);
    out.emplace_back(p3b, type3_config(p3b, CollinearVariant::IIIb));
    return out;
}

}  // namespace

TEST_CASE("analytic linearization matches the finite-difference flow jacobian") {
    for (const auto& [p, eq] : sample_equilibria()) {
        const LinearizationMatrix s = linearization(eq, p);
        const Eigen::MatrixXd fd = fd_jacobian(eq, p);
        REQUIRE(s.entries.rows() == fd.rows());
        CHECK((s.entries - fd).lpNorm<Eigen::Infinity>() < 1e-6);
    }
}

TEST_CASE("linearization block structure") {
    const FieldParams p = params(0.8, 1.2, -1);
    const Equilibrium eq = langmuir_config(langmuir_cubic(p).back(), p);
    const LinearizationMatrix s = linearization(eq, p);
    const int n = 2 * p.dims;
    const double g = p.g();

    // bottom-left identity, top-right -V'', both A blocks antisymmetric in g
    CHECK((s.entries.block(n, 0, n, n) - Eigen::MatrixXd::Identity(n, n))
              .lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK((s.entries.block(0, n, n, n) + potential_hessian(eq.config, p))
              .lpNorm<Eigen::Infinity>() < 1e-12);
    for (const int corner : {0, n}) {
        const Eigen::MatrixXd a = s.entries.block(corner, corner, n, n);
        for (int e = 0; e < 2; ++e) {
            CHECK(a(3 * e, 3 * e + 1) == Catch::Approx(g).epsilon(1e-14));
            CHECK(a(3 * e + 1, 3 * e) == Catch::Approx(-g).epsilon(1e-14));
            CHECK(a(3 * e + 2, 3 * e + 2) == 0.0);
        }
    }
    CHECK(std::abs(s.entries.trace()) < 1e-12);

    // g = 0 at omega = 1/2 on branch -1: the A blocks vanish identically
    const FieldParams pg0 = params(0.5, 1.5, -1);
    const Equilibrium eq0 = langmuir_config(langmuir_cubic(pg0).back(), pg0);
    const LinearizationMatrix s0 = linearization(eq0, pg0);
    CHECK(s0.entries.block(0, 0, n, n).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("two dimensional problems produce an 8x8 linearization") {
    const FieldParams p = params(0.5, 1.2, -1, 2);
    const LinearizationMatrix s = linearization(type2_config(p, M_PI / 2), p);
    CHECK(s.entries.rows() == 8);
    CHECK(s.entries.cols() == 8);
}

TEST_CASE("spectra form quartets and classification is strict") {
    for (const auto& [p, eq] : sample_equilibria()) {
        const StabilityReport rep = classify(linearization(eq, p));
        CHECK(rep.quartet_defect < 1e-8);
        CHECK(rep.eigenvalues.size() == 4 * p.dims);
        CHECK(rep.stable == (rep.max_real_part < rep.tolerance));
    }

    // negative control: a matrix without Hamiltonian structure has a large
    // quartet defect and an honest max real part
    LinearizationMatrix fake;
    fake.dims = 3;
    fake.entries = Eigen::MatrixXd::Identity(12, 12);
    const StabilityReport rep = classify(fake);
    CHECK(rep.quartet_defect > 1.0);
    CHECK(rep.max_real_part == Catch::Approx(1.0));
    CHECK_FALSE(rep.stable);
}

TEST_CASE("known stable and unstable roots classify as such") {
    const FieldParams p = params(0.5, 1.5, -1);
    const std::vector<double> roots = langmuir_cubic(p);
    REQUIRE(roots.size() == 2);
    const StabilityReport inner = classify(linearization(langmuir_config(roots[0], p), p));
    const StabilityReport outer = classify(linearization(langmuir_config(roots[1], p), p));
    CHECK_FALSE(inner.stable);
    CHECK(inner.max_real_part > 0.1);
    CHECK(outer.stable);
    CHECK(outer.max_real_part < 1e-8);
}

TEST_CASE("rotational zero mode at eps = 0") {
    // the rotation generator is a structural null vector of S…
    const FieldParams p = params(2.0, 0.0, -1);
    const Equilibrium eq = langmuir_config(langmuir_cubic(p)[0], p);
    const LinearizationMatrix s = linearization(eq, p);
    const int n = 2 * p.dims;
    Eigen::VectorXd v(2 * n);
    for (int e = 0; e < 2; ++e) {
        v[3 * e + 0] = -eq.momenta[3 * e + 1];
        v[3 * e + 1] = eq.momenta[3 * e + 0];
        v[3 * e + 2] = 0.0;
        v[n + 3 * e + 0] = -eq.config.q[3 * e + 1];
        v[n + 3 * e + 1] = eq.config.q[3 * e + 0];
        v[n + 3 * e + 2] = 0.0;
    }
    CHECK((s.entries * v).lpNorm<Eigen::Infinity>() < 1e-8 * v.lpNorm<Eigen::Infinity>());

    // …and the eigensolver sees it as a (defective) zero pair.  A Jordan
    // block's zero splits as sqrt(machine epsilon) under roundoff, so the
    // attainable bound here is ~1e-7, not machine precision.
    const StabilityReport rep = classify(s);
    double min_abs = 1e300;
    for (int i = 0; i < rep.eigenvalues.size(); ++i)
        min_abs = std::min(min_abs, std::abs(rep.eigenvalues[i]));
    CHECK(min_abs < 2e-7);
}

TEST_CASE("linearization rejects non-equilibria") {
    const FieldParams p = params(0.5, 1.5, -1);
    Eigen::VectorXd q(6);
    q << -1.0, 0.2, 0.8, -0.9, -0.4, -0.7;
    const Configuration cfg(3, q);
    Equilibrium fake;
    fake.config = cfg;
    fake.momenta = zero_velocity_momenta(cfg, p);
    fake.cls = EquilibriumClass{EquilibriumType::Unclassified, 0.0};
    fake.residual = zvs_gradient(cfg, p).lpNorm<Eigen::Infinity>();
    REQUIRE(fake.residual > 1e-8);
    CHECK_THROWS_AS(linearization(fake, p), not_an_equilibrium);
}

TEST_CASE("scan grid matches per-cell reconstruction and is thread invariant") {
    const FieldParams base = params(0.5, 1.0, -1);
    const StabilityMap map = scan({0.3, 0.7}, {0.9, 2.0}, {4, 5}, base);
    REQUIRE(map.omega_axis.size() == 4);
    REQUIRE(map.epsilon_axis.size() == 5);
    CHECK(map.omega_axis.front() == 0.3);
    CHECK(map.omega_axis.back() == 0.7);
    CHECK(map.epsilon_axis.front() == 0.9);
    CHECK(map.epsilon_axis.back() == 2.0);

    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 5; ++j) {
            const StabilityCell& cell = map.cell(i, j);
            FieldParams p = base;
            p.omega = map.omega_axis[static_cast<std::size_t>(i)];
            p.epsilon = map.epsilon_axis[static_cast<std::size_t>(j)];
            const std::vector<double> roots = langmuir_cubic(p);
            REQUIRE(cell.side_lengths.size() == roots.size());
            CHECK(cell.has_equilibrium == !roots.empty());
            for (std::size_t k = 0; k < roots.size(); ++k) {
                CHECK(cell.side_lengths[k] == Catch::Approx(roots[k]).epsilon(1e-12));
                const StabilityReport rep =
                    classify(linearization(langmuir_config(roots[k], p), p));
                CHECK((cell.stable[k] != 0) == rep.stable);
                CHECK(cell.max_real_parts[k] ==
                      Catch::Approx(rep.max_real_part).margin(1e-9));
            }
        }
    }

#ifdef _OPENMP
    omp_set_num_threads(1);
    const StabilityMap m1 = scan({0.3, 0.7}, {0.9, 2.0}, {4, 5}, base);
    omp_set_num_threads(3);
    const StabilityMap m3 = scan({0.3, 0.7}, {0.9, 2.0}, {4, 5}, base);
    for (std::size_t k = 0; k < m1.cells.size(); ++k) {
        CHECK(m1.cells[k].side_lengths == m3.cells[k].side_lengths);
        CHECK(m1.cells[k].max_real_parts == m3.cells[k].max_real_parts);
    }
#endif
}

TEST_CASE("scan validates its ranges") {
    const FieldParams base = params(0.5, 1.0, -1);
    CHECK_THROWS_AS(scan({0.3, 0.7}, {0.9, 2.0}, {1, 5}, base), invalid_input);
    CHECK_THROWS_AS(scan({0.7, 0.3}, {0.9, 2.0}, {4, 5}, base), invalid_input);
}
