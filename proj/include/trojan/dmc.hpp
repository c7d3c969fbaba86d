#ifndef TROJAN_DMC_HPP
#define TROJAN_DMC_HPP

#include "equilibria.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace trojan {

struct DmcConfig {
    int walker_target = 2000;      // >= 100
    double time_step = 0.01;       // imaginary time, > 0
    int equilibration_steps = 500;
    int accumulation_steps = 500;
    std::uint64_t seed = 1;
    double box_hint = 0.0;         // optional init extent; 0 = derive from geometry
    bool guided = false;           // optional Gaussian guiding function
    double guide_width = 0.0;      // 0 = derive from geometry
    int snapshot_stride = 0;       // 0 = auto (bounded total sample count)

    void validate() const {
        if (walker_target < 100) throw invalid_input("DmcConfig: walker_target must be >= 100");
        if (!(time_step > 0.0)) throw invalid_input("DmcConfig: time_step must be > 0");
        if (equilibration_steps < 0 || accumulation_steps < 1)
            throw invalid_input("DmcConfig: step counts invalid");
        if (box_hint < 0.0 || guide_width < 0.0 || snapshot_stride < 0)
            throw invalid_input("DmcConfig: negative optional parameter");
    }
};

struct WalkerEnsemble {
    std::vector<Eigen::VectorXd> walkers;  // each 2*dims coordinates
    double reference_energy = 0.0;         // E_T
    long long generation = 0;
};

struct LobeCenter {
    int electron = 0;       // 0 or 1
    int z_sign = 0;         // +1 / -1 (0 when dims = 2)
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double weight = 0.0;    // accumulated walker count
};

struct DmcResult {
    double energy = 0.0;
    double error = 0.0;
    std::vector<double> generation_energies;        // accumulation phase
    std::vector<double> equilibration_energies;     // diagnostics
    std::vector<double> reference_energy_trace;     // E_T per generation
    std::vector<LobeCenter> lobe_centers;
    double matched_cubic_root = 0.0;
    int matched_root_index = -1;
    std::vector<double> cubic_roots;
    double host_root = 0.0;                         // root seeding initialization
    std::vector<WalkerEnsemble> snapshots;          // thinned accumulation ensembles
    Eigen::Vector3d hist_center = Eigen::Vector3d::Zero();
    double hist_halfwidth = 0.0;                    // deterministic histogram range
    WalkerEnsemble final_ensemble;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based stream keyed by (seed, generation, walker slot): draws are
// reproducible for any thread count and any evaluation order.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t generation, std::uint64_t walker) {
        std::uint64_t k = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
        k = splitmix64(k ^ generation);
        state_ = splitmix64(k ^ (walker * 0x9e3779b97f4a7c15ULL));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double normal() {  // Box-Muller, pairs cached
        if (have_cache_) {
            have_cache_ = false;
            return cache_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cache_ = r * std::sin(a);
        have_cache_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_ = 0;
    bool have_cache_ = false;
    double cache_ = 0.0;
};

// Optional Gaussian guiding function: symmetrized product of isotropic
// Gaussians on the two lobe centers,
//   psi_G(R) = G(r1;A) G(r2;B) + G(r1;B) G(r2;A).
// Provides the drift and the local kinetic correction for guided runs.
struct GaussianGuide {
    bool active = false;
    int dims = 3;
    Eigen::VectorXd lobe_a;  // dims
    Eigen::VectorXd lobe_b;
    double sigma2 = 1.0;

    // log-domain term weights for numerical safety
    void terms(const Eigen::VectorXd& r, double& t1, double& t2, double& scale) const {
        const auto q1 = r.segment(0, dims);
        const auto q2 = r.segment(dims, dims);
        const double e1 = ((q1 - lobe_a).squaredNorm() + (q2 - lobe_b).squaredNorm()) / (2.0 * sigma2);
        const double e2 = ((q1 - lobe_b).squaredNorm() + (q2 - lobe_a).squaredNorm()) / (2.0 * sigma2);
        scale = std::min(e1, e2);
        t1 = std::exp(-(e1 - scale));
        t2 = std::exp(-(e2 - scale));
    }

    void drift(const Eigen::VectorXd& r, Eigen::VectorXd& out) const {
        double t1, t2, scale;
        terms(r, t1, t2, scale);
        const double denom = t1 + t2;
        const auto q1 = r.segment(0, dims);
        const auto q2 = r.segment(dims, dims);
        out.resize(2 * dims);
        out.segment(0, dims) =
            (-(q1 - lobe_a) * t1 - (q1 - lobe_b) * t2) / (sigma2 * denom);
        out.segment(dims, dims) =
            (-(q2 - lobe_b) * t1 - (q2 - lobe_a) * t2) / (sigma2 * denom);
    }

    // -(1/2) laplacian(psi_G)/psi_G
    double kinetic(const Eigen::VectorXd& r) const {
        double t1, t2, scale;
        terms(r, t1, t2, scale);
        const double denom = t1 + t2;
        const auto q1 = r.segment(0, dims);
        const auto q2 = r.segment(dims, dims);
        const double n = 2.0 * dims;
        const double s1 = (q1 - lobe_a).squaredNorm() + (q2 - lobe_b).squaredNorm();
        const double s2 = (q1 - lobe_b).squaredNorm() + (q2 - lobe_a).squaredNorm();
        const double lap =
            (t1 * (s1 / (sigma2 * sigma2) - n / sigma2) + t2 * (s2 / (sigma2 * sigma2) - n / sigma2)) /
            denom;
        return -0.5 * lap;
    }
};

struct DmcCoreOutput {
    std::vector<double> equil_energies;
    std::vector<double> accum_energies;
    std::vector<double> et_trace;
    WalkerEnsemble final_ensemble;
};

// Generic driver: Gaussian diffusion + branching against an arbitrary
// potential.  `accumulate(walkers, E_T, generation)` is called serially once
// per accumulation generation with the post-branching ensemble.
template <typename Potential, typename Accumulate>
DmcCoreOutput run_dmc_core(int dims, const DmcConfig& cfg,
                           std::vector<Eigen::VectorXd> walkers, Potential&& potential,
                           Accumulate&& accumulate, const GaussianGuide& guide = {}) {
    cfg.validate();
    if (dims != 2 && dims != 3) throw invalid_input("run_dmc_core: dims must be 2 or 3");
    if (walkers.empty()) throw invalid_input("run_dmc_core: empty initial ensemble");
    for (const auto& w : walkers)
        if (w.size() != 2 * dims) throw invalid_input("run_dmc_core: walker size mismatch");

    const int n_target = cfg.walker_target;
    const double dtau = cfg.time_step;
    const double sigma = std::sqrt(dtau);
    const long long lo = static_cast<long long>(std::floor(0.5 * n_target));
    const long long hi = static_cast<long long>(std::ceil(2.0 * n_target));
    constexpr double weight_cap = 10.0;
    constexpr int mult_cap = 3;

    auto local_energy = [&](const Eigen::VectorXd& r) -> double {
        const double v = potential(r);
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        return guide.active ? v + guide.kinetic(r) : v;
    };

    // reference energy from the initial ensemble
    double et = 0.0;
    {
        double sum = 0.0;
        long long cnt = 0;
        for (const auto& w : walkers) {
            const double e = local_energy(w);
            if (std::isfinite(e)) {
                sum += e;
                ++cnt;
            }
        }
        if (cnt == 0) throw invalid_input("run_dmc_core: no finite-energy initial walker");
        et = sum / static_cast<double>(cnt);
    }

    DmcCoreOutput out;
    out.equil_energies.reserve(static_cast<std::size_t>(cfg.equilibration_steps));
    out.accum_energies.reserve(static_cast<std::size_t>(cfg.accumulation_steps));
    out.et_trace.reserve(static_cast<std::size_t>(cfg.equilibration_steps + cfg.accumulation_steps));

    std::vector<double> elocal_old(walkers.size());
    for (std::size_t i = 0; i < walkers.size(); ++i) elocal_old[i] = local_energy(walkers[i]);

    const long long total_steps =
        static_cast<long long>(cfg.equilibration_steps) + cfg.accumulation_steps;
    std::vector<Eigen::VectorXd> proposals;
    std::vector<double> weights, branch_u, elocal_new;

    for (long long gen = 0; gen < total_steps; ++gen) {
        const long long n = static_cast<long long>(walkers.size());
        proposals.assign(static_cast<std::size_t>(n), Eigen::VectorXd());
        weights.assign(static_cast<std::size_t>(n), 0.0);
        branch_u.assign(static_cast<std::size_t>(n), 0.0);
        elocal_new.assign(static_cast<std::size_t>(n), 0.0);

#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i) {
            CounterRng rng(cfg.seed, static_cast<std::uint64_t>(gen),
                           static_cast<std::uint64_t>(i));
            const Eigen::VectorXd& r = walkers[static_cast<std::size_t>(i)];
            Eigen::VectorXd rp(2 * dims);
            if (guide.active) {
                Eigen::VectorXd b;
                guide.drift(r, b);
                for (int k = 0; k < 2 * dims; ++k)
                    rp[k] = r[k] + b[k] * dtau + sigma * rng.normal();
            } else {
                for (int k = 0; k < 2 * dims; ++k) rp[k] = r[k] + sigma * rng.normal();
            }
            const double el_new = local_energy(rp);
            const double el_old = elocal_old[static_cast<std::size_t>(i)];
            double w = 0.0;
            if (std::isfinite(el_new) && std::isfinite(el_old))
                w = std::exp(-dtau * (0.5 * (el_new + el_old) - et));
            proposals[static_cast<std::size_t>(i)] = std::move(rp);
            weights[static_cast<std::size_t>(i)] = w;
            elocal_new[static_cast<std::size_t>(i)] = el_new;
            branch_u[static_cast<std::size_t>(i)] = rng.uniform();
        }

        // serial reduction and branching: deterministic for any thread count
        double esum = 0.0, wsum = 0.0;
        for (long long i = 0; i < n; ++i) {
            const double w = std::min(weights[static_cast<std::size_t>(i)], weight_cap);
            if (w > 0.0) {
                esum += w * elocal_new[static_cast<std::size_t>(i)];
                wsum += w;
            }
        }
        const double gen_energy = wsum > 0.0 ? esum / wsum : et;

        std::vector<Eigen::VectorXd> next;
        std::vector<double> next_el;
        next.reserve(static_cast<std::size_t>(n));
        next_el.reserve(static_cast<std::size_t>(n));
        for (long long i = 0; i < n; ++i) {
            const double w = weights[static_cast<std::size_t>(i)];
            int m = static_cast<int>(w + branch_u[static_cast<std::size_t>(i)]);
            m = std::min(m, mult_cap);
            for (int c = 0; c < m; ++c) {
                next.push_back(proposals[static_cast<std::size_t>(i)]);
                next_el.push_back(elocal_new[static_cast<std::size_t>(i)]);
            }
        }
        const long long np = static_cast<long long>(next.size());
        if (np < lo || np > hi) {
            std::ostringstream os;
            os << "population control lost at generation " << gen << ": " << np
               << " walkers outside [" << lo << ", " << hi << "] (target " << n_target
               << ", E_T " << et << ")";
            throw population_control_error(os.str());
        }
        walkers = std::move(next);
        elocal_old = std::move(next_el);

        const double n_clamped = std::min(std::max(static_cast<double>(np), 0.5 * n_target),
                                          2.0 * n_target);
        et = gen_energy - std::log(n_clamped / n_target) / dtau;
        out.et_trace.push_back(et);

        if (gen < cfg.equilibration_steps) {
            out.equil_energies.push_back(gen_energy);
        } else {
            out.accum_energies.push_back(gen_energy);
            accumulate(walkers, et, gen);
        }
    }

    out.final_ensemble.walkers = std::move(walkers);
    out.final_ensemble.reference_energy = et;
    out.final_ensemble.generation = total_steps - 1;
    return out;
}

// blocking analysis: standard error of the mean from ~32 block means
inline std::pair<double, double> blocked_mean(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n == 0) return {0.0, 0.0};
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    const std::size_t nblocks = std::min<std::size_t>(32, n);
    const std::size_t bs = n / nblocks;
    if (bs == 0 || nblocks < 2) return {mean, 0.0};
    double var = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        double bm = 0.0;
        for (std::size_t k = 0; k < bs; ++k) bm += xs[b * bs + k];
        bm /= static_cast<double>(bs);
        var += (bm - mean) * (bm - mean);
    }
    var /= static_cast<double>(nblocks - 1);
    return {mean, std::sqrt(var / static_cast<double>(nblocks))};
}

}  // namespace detail

// Diffusion Monte Carlo for the zero-angular-coefficient Hamiltonian
// (omega = 1/2, branch = -1), where H is a real Schroedinger operator and the
// walker cloud samples the ground-state wavefunction itself.
inline DmcResult run_dmc(const FieldParams& params, const DmcConfig& cfg) {
    params.validate();
    cfg.validate();
    if (std::abs(params.g()) > 1e-12)
        throw unsupported_regime(
            "run_dmc: nonzero angular coefficient requires a fixed-phase extension, which is "
            "out of scope; supported regime is omega = 1/2 with branch = -1");

    const std::vector<double> roots = langmuir_cubic(params);
    if (roots.empty())
        throw root_not_found("run_dmc: no Langmuir root to initialize from at these fields");

    // host root: deepest ZVS well among the cubic roots
    double host = roots.front();
    double best = std::numeric_limits<double>::infinity();
    for (double a : roots) {
        const double v = zvs(langmuir_config(a, params).config, params);
        if (v < best) {
            best = v;
            host = a;
        }
    }
    const Equilibrium host_eq = langmuir_config(host, params);
    const double x0 = host_eq.config.x(0);

    const int dims = params.dims;
    const double width = (cfg.box_hint > 0.0 ? cfg.box_hint : host) / 10.0;

    // exchange- and z-symmetric initialization on the two classical lobes
    std::vector<Eigen::VectorXd> walkers(static_cast<std::size_t>(cfg.walker_target));
    for (int i = 0; i < cfg.walker_target; ++i) {
        detail::CounterRng rng(cfg.seed ^ 0xa02bdbf7bb3c0a7ULL, 0,
                               static_cast<std::uint64_t>(i));
        Eigen::VectorXd w = host_eq.config.q;
        if (i % 2 == 1) {  // swap electron blocks
            w.segment(0, dims).swap(w.segment(dims, dims));
        }
        for (int k = 0; k < 2 * dims; ++k) w[k] += width * rng.normal();
        walkers[static_cast<std::size_t>(i)] = std::move(w);
    }

    auto potential_fn = [&params, dims](const Eigen::VectorXd& r) -> double {
        thread_local Configuration scratch;
        if (scratch.dims != dims || scratch.q.size() != 2 * dims) {
            scratch.dims = dims;
            scratch.q.resize(2 * dims);
        }
        scratch.q = r;
        try {
            return potential(scratch, params);
        } catch (const singular_configuration&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    detail::GaussianGuide guide;
    if (cfg.guided) {
        guide.active = true;
        guide.dims = dims;
        guide.lobe_a = host_eq.config.q.segment(0, dims);
        guide.lobe_b = host_eq.config.q.segment(dims, dims);
        const double gw = cfg.guide_width > 0.0 ? cfg.guide_width : host / 4.0;
        guide.sigma2 = gw * gw;
    }

    // streamed lobe accumulation (z-split centroids) + thinned snapshots
    const long long per_gen = cfg.walker_target;
    int stride = cfg.snapshot_stride;
    if (stride <= 0) {
        const long long budget = 2000000;
        stride = static_cast<int>(std::max<long long>(
            1, (static_cast<long long>(cfg.accumulation_steps) * per_gen + budget - 1) / budget));
    }

    DmcResult result;
    Eigen::Matrix<double, 3, 4> lobe_sum = Eigen::Matrix<double, 3, 4>::Zero();
    Eigen::Vector4d lobe_cnt = Eigen::Vector4d::Zero();
    long long accum_index = 0;

    auto accumulate = [&](const std::vector<Eigen::VectorXd>& ws, double et, long long gen) {
        for (const auto& w : ws) {
            for (int e = 0; e < 2; ++e) {
                Eigen::Vector3d q = Eigen::Vector3d::Zero();
                for (int k = 0; k < dims; ++k) q[k] = w[e * dims + k];
                const int zi = dims == 3 ? (q[2] >= 0.0 ? 0 : 1) : 0;
                const int col = e * 2 + zi;
                lobe_sum.col(col) += q;
                lobe_cnt[col] += 1.0;
            }
        }
        if (accum_index % stride == 0) {
            WalkerEnsemble ens;
            ens.walkers = ws;
            ens.reference_energy = et;
            ens.generation = gen;
            result.snapshots.push_back(std::move(ens));
        }
        ++accum_index;
    };

    detail::DmcCoreOutput core = detail::run_dmc_core(dims, cfg, std::move(walkers),
                                                      potential_fn, accumulate, guide);

    const auto [energy, error] = detail::blocked_mean(core.accum_energies);
    result.energy = energy;
    result.error = error;
    result.generation_energies = std::move(core.accum_energies);
    result.equilibration_energies = std::move(core.equil_energies);
    result.reference_energy_trace = std::move(core.et_trace);
    result.final_ensemble = std::move(core.final_ensemble);
    result.cubic_roots = roots;
    result.host_root = host;
    result.hist_center = Eigen::Vector3d(x0, 0.0, 0.0);
    result.hist_halfwidth = 1.2 * host;

    for (int e = 0; e < 2; ++e) {
        const int nsplit = dims == 3 ? 2 : 1;
        for (int zi = 0; zi < nsplit; ++zi) {
            const int col = e * 2 + zi;
            if (lobe_cnt[col] <= 0.0) continue;
            LobeCenter lc;
            lc.electron = e;
            lc.z_sign = dims == 3 ? (zi == 0 ? +1 : -1) : 0;
            lc.center = lobe_sum.col(col) / lobe_cnt[col];
            lc.weight = lobe_cnt[col];
            result.lobe_centers.push_back(lc);
        }
    }

    // match the accumulated lobe geometry against the cubic roots
    if (!result.lobe_centers.empty()) {
        double best_err = std::numeric_limits<double>::infinity();
        for (std::size_t ri = 0; ri < roots.size(); ++ri) {
            const double a = roots[ri];
            double err = 0.0;
            for (const auto& lc : result.lobe_centers) {
                const double rho = std::hypot(lc.center[0], lc.center[1]);
                const double dz = dims == 3 ? std::abs(lc.center[2]) - 0.5 * a : 0.0;
                err += std::hypot(rho - std::sqrt(3.0) / 2.0 * a, dz) / a;
            }
            if (err < best_err) {
                best_err = err;
                result.matched_root_index = static_cast<int>(ri);
                result.matched_cubic_root = a;
            }
        }
    }
    return result;
}

// 2D marginal histogram of walker coordinates.
struct Histogram2D {
    std::string plane;  // xz | xy | yz
    int bins = 0;
    double min1 = 0.0, max1 = 0.0, min2 = 0.0, max2 = 0.0;  // axis ranges (edges)
    Eigen::MatrixXd counts;                                  // bins x bins, [i1][i2]
    std::vector<double> centers1, centers2;                  // bin centers
};

namespace detail {

inline void plane_axes(const std::string& plane, int dims, int& a1, int& a2) {
    if (plane == "xz") {
        a1 = 0;
        a2 = 2;
    } else if (plane == "xy") {
        a1 = 0;
        a2 = 1;
    } else if (plane == "yz") {
        a1 = 1;
        a2 = 2;
    } else {
        throw invalid_input("density_histogram: plane must be one of xz, xy, yz");
    }
    if (dims == 2 && (a1 == 2 || a2 == 2))
        throw invalid_input("density_histogram: z plane requested for a 2D ensemble");
}

template <typename WalkerRange>
Histogram2D histogram_impl(const WalkerRange& ensembles, int dims, const std::string& plane,
                           int bins, int electron, const Eigen::Vector3d& center,
                           double halfwidth) {
    if (bins < 1) throw invalid_input("density_histogram: bins must be >= 1");
    if (electron != 1 && electron != 2 && electron != 0)
        throw invalid_input("density_histogram: electron must be 1, 2, or 0 (both)");
    int a1 = 0, a2 = 0;
    plane_axes(plane, dims, a1, a2);

    Histogram2D h;
    h.plane = plane;
    h.bins = bins;
    h.min1 = center[a1] - halfwidth;
    h.max1 = center[a1] + halfwidth;
    h.min2 = center[a2] - halfwidth;
    h.max2 = center[a2] + halfwidth;
    h.counts = Eigen::MatrixXd::Zero(bins, bins);
    const double w1 = (h.max1 - h.min1) / bins;
    const double w2 = (h.max2 - h.min2) / bins;
    for (int b = 0; b < bins; ++b) {
        h.centers1.push_back(h.min1 + (b + 0.5) * w1);
        h.centers2.push_back(h.min2 + (b + 0.5) * w2);
    }
    auto clampi = [bins](int i) { return std::min(std::max(i, 0), bins - 1); };
    bool any = false;
    for (const auto& ens : ensembles) {
        for (const auto& w : ens.walkers) {
            any = true;
            for (int e = 0; e < 2; ++e) {
                if (electron == 1 && e != 0) continue;
                if (electron == 2 && e != 1) continue;
                const double c1 = w[e * dims + a1];
                const double c2 = w[e * dims + a2];
                const int i1 = clampi(static_cast<int>(std::floor((c1 - h.min1) / w1)));
                const int i2 = clampi(static_cast<int>(std::floor((c2 - h.min2) / w2)));
                h.counts(i1, i2) += 1.0;
            }
        }
    }
    if (!any) throw invalid_input("density_histogram: empty ensemble");
    return h;
}

}  // namespace detail

// electron: 1, 2, or 0 for both.  Ranges are the deterministic window fixed
// by the classical geometry at run time.
inline Histogram2D density_histogram(const DmcResult& result, const std::string& plane,
                                     int bins, int electron) {
    if (result.snapshots.empty()) throw invalid_input("density_histogram: empty ensemble");
    const int dims = static_cast<int>(result.snapshots.front().walkers.front().size()) / 2;
    return detail::histogram_impl(result.snapshots, dims, plane, bins, electron,
                                  result.hist_center, result.hist_halfwidth);
}

// Ensemble overload: range derived from the data (centroid +- max deviation).
inline Histogram2D density_histogram(const WalkerEnsemble& ensemble, const std::string& plane,
                                     int bins, int electron) {
    if (ensemble.walkers.empty()) throw invalid_input("density_histogram: empty ensemble");
    const int dims = static_cast<int>(ensemble.walkers.front().size()) / 2;
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double count = 0.0;
    for (const auto& w : ensemble.walkers) {
        for (int e = 0; e < 2; ++e)
            for (int k = 0; k < dims; ++k) center[k] += w[e * dims + k];
        count += 2.0;
    }
    center /= count;
    double dev = 0.0;
    for (const auto& w : ensemble.walkers) {
        for (int e = 0; e < 2; ++e) {
            Eigen::Vector3d q = Eigen::Vector3d::Zero();
            for (int k = 0; k < dims; ++k) q[k] = w[e * dims + k];
            dev = std::max(dev, (q - center).lpNorm<Eigen::Infinity>());
        }
    }
    const double halfwidth = dev > 0.0 ? 1.05 * dev : 1.0;
    const std::vector<WalkerEnsemble> one{ensemble};
    return detail::histogram_impl(one, dims, plane, bins, electron, center, halfwidth);
}

}  // namespace trojan

#endif
