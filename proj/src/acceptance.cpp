#include "fbc/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "fbc/analytics.hpp"
#include "fbc/brownian.hpp"
#include "fbc/currents.hpp"
#include "fbc/fbm.hpp"
#include "fbc/io.hpp"
#include "fbc/kernel.hpp"
#include "fbc/vortex.hpp"
#include "fbc/wick.hpp"

namespace fbc {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Gate {
    bool ok = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (note.tellp() > 0) note << "; ";
            note << what;
        }
    }
    void info(const std::string& what) {
        if (note.tellp() > 0) note << "; ";
        note << what;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ---- 1: closed-form kernel values ---------------------------------------

Gate crit_kernel_closed_forms() {
    Gate g;
    KernelSpec k31 = KernelSpec::make(1.0, 3);
    KernelSpec k11 = KernelSpec::make(1.0, 1);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        double r = 0.05 * std::pow(100.0, i / 19.0); // log-spaced in [0.05, 5]
        double ex3 = std::exp(-r) / (4.0 * kPi * r);
        double ex1 = 0.5 * std::exp(-r);
        double e3 = std::fabs(eval_K(k31, r) - ex3) / ex3;
        double e1 = std::fabs(eval_K(k11, r) - ex1) / ex1;
        worst = std::max({worst, e3, e1});
    }
    g.require(worst < 1e-6, "closed-form mismatch " + fmt(worst));

    struct ZeroCase {
        int d;
        double alpha, want;
    };
    // gamma_alpha * Gamma(alpha - d/2), frozen independently
    const ZeroCase zeros[] = {{1, 1.0, 0.5},
                              {3, 2.0, 0.039788735772973834},
                              {2, 2.0, 0.079577471545947668}};
    double wz = 0.0;
    for (const auto& z : zeros) {
        double got = eval_K_zero(KernelSpec::make(z.alpha, z.d));
        wz = std::max(wz, std::fabs(got - z.want) / z.want);
    }
    g.require(wz < 1e-10, "K(0) mismatch " + fmt(wz));
    g.info("profile rel " + fmt(worst) + ", K0 rel " + fmt(wz));
    return g;
}

// ---- 2: mass, semigroup, Laplacian identities ----------------------------

Gate crit_kernel_identities() {
    Gate g;
    struct MassCase {
        double alpha;
        int d;
    };
    const MassCase masses[] = {{1.0, 1}, {2.0, 3}, {1.0, 2}};
    double wm = 0.0;
    for (const auto& m : masses)
        wm = std::max(wm, std::fabs(kernel_mass(KernelSpec::make(m.alpha, m.d)) - 1.0));
    g.require(wm < 1e-4, "unit mass off by " + fmt(wm));

    double ws = 0.0;
    for (double r : {0.0, 0.5, 1.0})
        ws = std::max(ws, check_semigroup(1.0, 1, r, 12.0, 1 << 20).residual);
    g.require(ws < 1e-3, "semigroup residual " + fmt(ws));

    // five-point radial Laplacian of the kernel profile at r = 1 against
    // K_alpha - K_{alpha-1}; the d=1 value is a near-zero crossing, so the
    // relative scale falls back to K_alpha(1)
    struct LapCase {
        int d;
        double alpha;
    };
    double wl = 0.0;
    for (const auto& c : {LapCase{1, 2.0}, LapCase{3, 2.0}}) {
        KernelSpec ks = KernelSpec::make(c.alpha, c.d);
        const double h = 0.02, r = 1.0;
        auto f = [&](double x) { return eval_K(ks, x); };
        double d2 = (-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) + 16 * f(r - h) -
                     f(r - 2 * h)) /
                    (12 * h * h);
        double d1 = (-f(r + 2 * h) + 8 * f(r + h) - 8 * f(r - h) + f(r - 2 * h)) /
                    (12 * h);
        double fd = d2 + (c.d - 1) / r * d1;
        double target = -laplacian_K(ks, r); // laplacian_K is the negative Laplacian
        double scale = std::max(std::fabs(target), f(r));
        wl = std::max(wl, std::fabs(fd - target) / scale);
    }
    g.require(wl < 1e-3, "Laplacian mismatch " + fmt(wl));
    g.info("mass " + fmt(wm) + ", semigroup " + fmt(ws) + ", laplacian " + fmt(wl));
    return g;
}

// ---- 3: sampler covariance ------------------------------------------------

Gate crit_fbm_covariance(int threads) {
    Gate g;
    const int pairs[10][2] = {{256, 256}, {128, 128}, {64, 64},  {128, 256}, {64, 192},
                              {32, 96},   {13, 77},   {100, 200}, {5, 250},  {160, 240}};
    const double hs[] = {0.3, 0.5, 0.7};
    double worst_z = 0.0;
    for (int hi = 0; hi < 3; ++hi) {
        FbmParams p;
        p.H = hs[hi];
        p.d = 1;
        p.T = 1.0;
        p.n_steps = 256;
        p.seed = derive_seed(303, uint64_t(hi));
        for (const auto& pr : pairs) {
            MCStats st = empirical_covariance(p, pr[0], pr[1], 0, 10000, threads);
            double want = fbm_R(pr[0] / 256.0, pr[1] / 256.0, p.H);
            double z = std::fabs(st.mean - want) / st.stderror;
            worst_z = std::max(worst_z, z);
        }
    }
    g.require(worst_z < 4.0, "covariance z " + fmt(worst_z));
    g.info("worst z " + fmt(worst_z));
    return g;
}

// ---- 4: covariance atoms, exact vs closed form vs MC ----------------------

Gate crit_covariance_algebra(int threads) {
    Gate g;
    double worst = 0.0;
    for (double H : {0.3, 0.7})
        for (Scheme kind : {Scheme::symmetric, Scheme::forward})
            for (double tau : {0.5, 1.0, 2.0})
                for (double eps : {0.05, 0.1, 0.25}) {
                    double t = 2.0;
                    auto atoms = cov_exact(kind, H, t, t + tau, eps);
                    auto ref = reference_atoms(kind, H, tau, eps);
                    double err =
                        std::fabs(atoms.c - ref.c_ref) / std::max(1.0, std::fabs(ref.c_ref));
                    worst = std::max(worst, err);
                }
    g.require(worst < 1e-12, "closed-form atom mismatch " + fmt(worst));

    // coupled-path check of the same atoms: shared replicas, three stencil
    // placements (interior x2 schemes, one clamped symmetric stencil)
    const double eps = 0.0625; // 16 lattice steps of the n = 256 grid
    const int kt = 128, ks = 192, kb = 8;
    double worst_z = 0.0;
    for (double H : {0.3, 0.7}) {
        const int n_rep = 10000;
        std::vector<double> sym_i(n_rep), fwd_i(n_rep), sym_b(n_rep);
        FbmParams p;
        p.H = H;
        p.d = 1;
        p.T = 1.0;
        p.n_steps = 256;
        p.seed = derive_seed(404, H < 0.5 ? 0 : 1);
        parallel_for(n_rep, threads, [&](int r) {
            FbmParams q = p;
            q.seed = derive_seed(p.seed, uint64_t(r));
            FbmPath path = sample_fbm(q);
            double dt_s[1], ds_s[1], dt_f[1], ds_f[1], db_s[1];
            DerivScheme sym{Scheme::symmetric, eps}, fwd{Scheme::forward, eps};
            discrete_derivative(path, sym, kt, dt_s);
            discrete_derivative(path, sym, ks, ds_s);
            discrete_derivative(path, fwd, kt, dt_f);
            discrete_derivative(path, fwd, ks, ds_f);
            discrete_derivative(path, sym, kb, db_s);
            sym_i[r] = dt_s[0] * ds_s[0];
            fwd_i[r] = dt_f[0] * ds_f[0];
            sym_b[r] = db_s[0] * ds_s[0];
        });
        struct Check {
            const std::vector<double>* vals;
            Scheme kind;
            double t;
        } checks[] = {{&sym_i, Scheme::symmetric, kt / 256.0},
                      {&fwd_i, Scheme::forward, kt / 256.0},
                      {&sym_b, Scheme::symmetric, kb / 256.0}};
        for (const auto& c : checks) {
            MCStats st = summarize(*c.vals);
            double want = cov_exact(c.kind, H, c.t, ks / 256.0, eps).c;
            worst_z = std::max(worst_z, std::fabs(st.mean - want) / st.stderror);
        }
    }
    g.require(worst_z < 4.0, "MC atom z " + fmt(worst_z));
    g.info("atoms rel " + fmt(worst) + ", MC z " + fmt(worst_z));
    return g;
}

// ---- 5: field norm vs double integral -------------------------------------

Gate crit_field_norm(int threads) {
    Gate g;
    auto spec = CurrentGridSpec::make(0.5, 3, 0.05, 1.0, 4);
    BesselKernel full(2.0, 3), half(1.0, 3);
    double worst = 0.0;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        CurrentPath cp = sample_current_path(spec, seed);
        double Z = Z_double_integral(cp, 2.0, Scheme::symmetric, full).Z;
        SpatialGrid grid = grid_around(cp, 3.0, 0.1);
        EtaField eta = eta_field(cp, 2.0, Scheme::symmetric, grid, half, threads);
        double rel = std::fabs(eta.norm2 + eta.tail_estimate - Z) / Z;
        worst = std::max(worst, rel);
    }
    g.require(worst < 0.05, "norm identity off by " + fmt(worst));
    g.info("worst rel gap " + fmt(worst));
    return g;
}

// ---- 6: ordering in alpha --------------------------------------------------

Gate crit_monotonicity(int threads) {
    Gate g;
    auto spec = CurrentGridSpec::make(0.5, 3, 0.05, 1.0, 4);
    const std::vector<double> alphas = {1.2, 1.6, 2.0, 2.5};
    std::vector<BesselKernel> kernels;
    kernels.reserve(alphas.size());
    for (double a : alphas) kernels.emplace_back(a, 3);
    const int n_seeds = 20;
    std::vector<double> zs(size_t(n_seeds) * alphas.size());
    parallel_for(n_seeds, threads, [&](int s) {
        CurrentPath cp = sample_current_path(spec, uint64_t(s + 1));
        for (size_t ai = 0; ai < alphas.size(); ++ai)
            zs[size_t(s) * alphas.size() + ai] =
                Z_double_integral(cp, alphas[ai], Scheme::symmetric, kernels[ai]).Z;
    });
    double worst_gap = 1e300;
    bool ordered = true;
    for (int s = 0; s < n_seeds; ++s)
        for (size_t ai = 0; ai + 1 < alphas.size(); ++ai) {
            double lo = zs[size_t(s) * alphas.size() + ai];
            double hi = zs[size_t(s) * alphas.size() + ai + 1];
            worst_gap = std::min(worst_gap, lo - hi);
            if (hi > lo + 1e-9 * (1.0 + std::fabs(lo))) ordered = false;
        }
    g.require(ordered, "ordering violated, min adjacent gap " + fmt(worst_gap));
    g.info("min adjacent gap " + fmt(worst_gap));
    return g;
}

// ---- 7: integration-by-parts identity --------------------------------------

Gate crit_wick_identity(int threads) {
    Gate g;
    auto suite = wick_builtin_suite(4242, threads);
    double worst = 0.0;
    for (const auto& c : suite) {
        worst = std::max(worst, std::fabs(c.z_score));
        g.require(c.pass, c.name + " z " + fmt(c.z_score));
    }
    std::vector<double> eye = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    auto spec = GaussianVectorSpec::make(3, eye);
    auto cf = characteristic_check(spec, {1.0, 0.0, 0.0}, 16000000, 777, threads);
    double rel = std::fabs(cf.re_mc - cf.re_exact) / cf.re_exact;
    g.require(rel < 1e-3, "cos moment rel err " + fmt(rel));
    g.require(std::fabs(cf.im_mc) < 4.0 * cf.im_stderr, "sin moment " + fmt(cf.im_mc));
    g.info("suite max z " + fmt(worst) + ", cf rel " + fmt(rel));
    return g;
}

// ---- 8: deterministic expectation vs MC ------------------------------------

Gate crit_expected_oracles(int threads) {
    Gate g;
    double worst_z = 0.0;
    int idx = 0;
    for (double H : {0.3, 0.5, 0.7}) {
        double alpha = alpha_H(H, 3) + 0.5;
        GaussMoments moments(alpha, 3);
        BesselKernel kernel(alpha, 3);
        for (double eps : {0.1, 0.05}) {
            auto grid = CurrentGridSpec::make(H, 3, eps, 1.0, 4);
            double exact = expected_Z_exact(grid, alpha, Scheme::symmetric, moments).value;
            McZ mc = mc_expected_Z(grid, alpha, Scheme::symmetric, kernel, 1000,
                                   derive_seed(888, uint64_t(idx++)), threads);
            double z = (mc.stats.mean - exact) / mc.stats.stderror;
            worst_z = std::max(worst_z, std::fabs(z));
        }
    }
    g.require(worst_z < 3.0, "exact-vs-MC z " + fmt(worst_z));
    g.info("worst z " + fmt(worst_z));
    return g;
}

// ---- 9: bounded vs divergent classification --------------------------------

Gate crit_threshold(int threads) {
    Gate g;
    std::vector<double> eps;
    for (int k = 3; k <= 9; ++k) eps.push_back(std::pow(2.0, -k));

    auto classify = [&](double H, Scheme kind, Gate& gg, const char* tag) {
        auto sweep = threshold_sweep(H, 3, {1.0, 2.0}, eps, kind, "exact", 1.0, 0, 1,
                                     threads);
        for (const auto& s : sweep.summary) {
            if (s.alpha == 1.0) {
                gg.require(s.diverging && s.slope > 0.2,
                           std::string(tag) + " alpha=1 slope " + fmt(s.slope));
            } else {
                gg.require(!s.diverging && s.max_min_ratio < 2.0,
                           std::string(tag) + " alpha=2 ratio " + fmt(s.max_min_ratio));
            }
        }
    };
    classify(0.5, Scheme::symmetric, g, "sym");
    classify(0.5, Scheme::forward, g, "fwd");

    auto sign_check = [&](double H, Scheme kind, Gate& gg, const char* tag) {
        double ah = alpha_H(H, 3);
        auto sweep = threshold_sweep(H, 3, {ah - 0.5, ah + 0.5}, eps, kind, "exact", 1.0,
                                     0, 1, threads);
        for (const auto& s : sweep.summary) {
            if (s.alpha < ah)
                gg.require(s.slope > 0.2, std::string(tag) + " below-threshold slope " +
                                              fmt(s.slope));
            else
                gg.require(s.max_min_ratio < 2.0, std::string(tag) +
                                                      " above-threshold ratio " +
                                                      fmt(s.max_min_ratio));
        }
    };
    sign_check(0.35, Scheme::symmetric, g, "sym H=0.35");
    sign_check(0.7, Scheme::forward, g, "fwd H=0.7");
    if (g.ok) g.info("all eight classifications correct");
    return g;
}

// ---- 10: pathwise decomposition --------------------------------------------

Gate crit_wick_decomposition(int threads) {
    Gate g;
    auto spec = CurrentGridSpec::make(0.5, 3, 0.05, 1.0, 4);
    BesselKernel full(2.0, 3), lower(1.0, 3);
    const int n_rep = 200;
    std::vector<double> qs(n_rep);
    std::vector<double> worst_resid(n_rep, 0.0), worst_a(n_rep, 0.0);
    parallel_for(n_rep, threads, [&](int r) {
        CurrentPath cp = sample_current_path(spec, derive_seed(1010, uint64_t(r)));
        WickTerms wt = wick_decompose(cp, 2.0, full, lower);
        qs[r] = wt.Q;
        worst_resid[r] = std::fabs(wt.A + wt.B1 - wt.B2 + wt.Q - wt.Z) /
                         std::max(1.0, std::fabs(wt.Z));
        worst_a[r] = wt.A + wt.A_floor; // must stay >= 0
    });
    double resid = *std::max_element(worst_resid.begin(), worst_resid.end());
    double min_a = *std::min_element(worst_a.begin(), worst_a.end());
    MCStats qstat = summarize(qs);
    double qz = std::fabs(qstat.mean) / qstat.stderror;
    g.require(resid < 1e-10, "reassembly residual " + fmt(resid));
    g.require(min_a >= 0.0, "A dipped to " + fmt(min_a));
    g.require(qz < 4.0, "E[Q] z " + fmt(qz));
    g.info("resid " + fmt(resid) + ", E[Q] z " + fmt(qz));
    return g;
}

// ---- 11: vortex energies ----------------------------------------------------

Gate crit_vortex(int threads) {
    Gate g;
    auto gauss = SpectralMeasure::gaussian_measure(1.0);

    double worst_perp = 0.0;
    const std::array<double, 3> qs[] = {
        {0.3, -1.2, 0.7}, {2.0, 0.0, 0.0}, {1e-3, 2e-3, -5e-4}};
    for (const auto& q : qs) {
        auto m = fourier_kernel_matrix(gauss, q);
        double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
        double frob = 0.0;
        for (double v : m) frob += v * v;
        frob = std::sqrt(frob);
        for (int i = 0; i < 3; ++i) {
            double dot = m[3 * i] * q[0] + m[3 * i + 1] * q[1] + m[3 * i + 2] * q[2];
            worst_perp = std::max(worst_perp, std::fabs(dot) / (frob * qn));
        }
    }
    g.require(worst_perp < 1e-14, "ghat q residual " + fmt(worst_perp));

    auto rep = check_conditions(gauss, 0.5, 2.0);
    const double want = 2.0 * kPi * std::sqrt(kPi); // 11.1366...
    double sp_rel = std::fabs(rep.spectral_value - want) / want;
    g.require(sp_rel < 1e-6, "spectral integral rel " + fmt(sp_rel));
    g.require(!rep.sobolev_holds, "gaussian unexpectedly passes the sup condition");
    auto rep_d = check_conditions(SpectralMeasure::dipole_measure(1.0, 2.0), 0.5, 2.0);
    g.require(rep_d.sobolev_holds, "dipole fails the sup condition");

    double emax = 0.0, emin = 1e300;
    for (int k = 3; k <= 8; ++k) {
        auto grid = CurrentGridSpec::make(0.4, 3, std::pow(2.0, -k), 1.0, 4);
        double e = expected_energy_exact(grid, gauss, Scheme::symmetric).value;
        emax = std::max(emax, e);
        emin = std::min(emin, e);
    }
    g.require(emax / emin < 3.0, "energy sweep ratio " + fmt(emax / emin));

    auto grid = CurrentGridSpec::make(0.5, 3, 0.05, 1.0, 4);
    double exact = expected_energy_exact(grid, gauss, Scheme::symmetric).value;
    GKernel gk(gauss);
    McEnergy mc = mc_energy(grid, gauss, Scheme::symmetric, gk, 200, 2020, threads);
    double z = (mc.stats.mean - exact) / mc.stats.stderror;
    g.require(std::fabs(z) < 3.0, "MC energy z " + fmt(z));
    g.info("spectral rel " + fmt(sp_rel) + ", sweep ratio " + fmt(emax / emin) +
           ", MC z " + fmt(z));
    return g;
}

// ---- 12: Brownian estimates --------------------------------------------------

Gate crit_brownian(int threads) {
    Gate g;
    BesselMomentCase deg;
    deg.d = 3;
    deg.theta = 1.0;
    deg.q = 2.0;
    deg.x = {1.0, 0.0, 0.0};
    deg.T = 1.0;
    deg.n_paths = 100;
    deg.n_steps = 128;
    deg.seed = 55;
    auto rep = bessel_moment_estimates(deg, threads);
    double err = std::fabs(rep.lhs.mean - 1.0);
    g.require(err < 1e-12 && rep.lhs.sd < 1e-12, "theta=1 case off by " + fmt(err));

    auto rows = max_exceedance_check(3, 1.0, {2.0, 4.0, 8.0}, 10000, 512, 66, threads);
    for (const auto& row : rows)
        g.require(row.within, "exceedance at radius " + fmt(row.radius) + ": " +
                                  fmt(row.empirical) + " vs bound " + fmt(row.bound));

    auto occ1 = occupation_integral_estimate(2, 1.8, 1.5, 1.0, 2000, 77, threads);
    auto occ2 = occupation_integral_estimate(2, 1.8, 1.5, 1.0, 4000, 78, threads);
    double gap = std::fabs(occ1.stats.mean - occ2.stats.mean);
    double tol = 3.0 * std::hypot(occ1.stats.stderror, occ2.stats.stderror);
    g.require(occ1.condition_holds, "condition flag wrong for (2, 1.8, 1.5)");
    g.require(gap <= tol, "occupation estimate moved " + fmt(gap) + " > " + fmt(tol));
    auto occ3 = occupation_integral_estimate(3, 1.2, 4.0, 1.0, 200, 79, threads);
    g.require(!occ3.condition_holds && !occ3.note.empty(),
              "divergence flag missing for (3, 1.2, 4)");
    g.info("theta=1 err " + fmt(err) + ", occupation gap " + fmt(gap) + " tol " +
           fmt(tol));
    return g;
}

// ---- 13: byte determinism -----------------------------------------------------

Gate crit_determinism(const std::string& scratch) {
    namespace fs = std::filesystem;
    Gate g;
    fs::path base = scratch.empty()
                        ? fs::temp_directory_path() / "fbc-acceptance"
                        : fs::path(scratch);
    fs::remove_all(base);
    fs::create_directories(base / "t1");
    fs::create_directories(base / "t8");
    auto out1 = suite_outputs((base / "t1").string(), 1, 90001);
    auto out8 = suite_outputs((base / "t8").string(), 8, 90001);

    auto csv_only = [](std::vector<std::string> v) {
        v.erase(std::remove_if(v.begin(), v.end(),
                               [](const std::string& p) {
                                   return p.size() < 4 ||
                                          p.compare(p.size() - 4, 4, ".csv") != 0;
                               }),
                v.end());
        std::sort(v.begin(), v.end());
        return v;
    };
    auto a = csv_only(out1), b = csv_only(out8);
    g.require(a.size() == b.size() && !a.empty(), "output inventories differ");
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    int n_same = 0;
    for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (slurp(a[i]) == slurp(b[i]))
            ++n_same;
        else
            g.require(false, "bytes differ: " + fs::path(a[i]).filename().string());
    }
    g.info(std::to_string(n_same) + " CSV files byte-identical across {1, 8} threads");
    return g;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
    struct Entry {
        int id;
        const char* name;
        std::function<Gate()> run;
    };
    const int T = opt.threads;
    std::vector<Entry> entries = {
        {1, "kernel-closed-forms", [] { return crit_kernel_closed_forms(); }},
        {2, "kernel-identities", [] { return crit_kernel_identities(); }},
        {3, "fbm-covariance", [T] { return crit_fbm_covariance(T); }},
        {4, "covariance-algebra", [T] { return crit_covariance_algebra(T); }},
        {5, "field-norm-identity", [T] { return crit_field_norm(T); }},
        {6, "alpha-monotonicity", [T] { return crit_monotonicity(T); }},
        {7, "wick-identity", [T] { return crit_wick_identity(T); }},
        {8, "expected-value-oracles", [T] { return crit_expected_oracles(T); }},
        {9, "threshold-classification", [T] { return crit_threshold(T); }},
        {10, "wick-decomposition", [T] { return crit_wick_decomposition(T); }},
        {11, "vortex-energy", [T] { return crit_vortex(T); }},
        {12, "brownian-bounds", [T] { return crit_brownian(T); }},
        {13, "determinism", [&opt] { return crit_determinism(opt.scratch_dir); }},
    };
    std::vector<CriterionResult> results;
    results.reserve(entries.size());
    for (auto& e : entries) {
        CriterionResult res;
        res.id = e.id;
        res.name = e.name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            Gate gate = e.run();
            res.pass = gate.ok;
            res.detail = gate.note.str();
        } catch (const std::exception& ex) {
            res.pass = false;
            res.detail = std::string("exception: ") + ex.what();
        }
        res.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (opt.on_result) opt.on_result(res);
        results.push_back(std::move(res));
    }
    return results;
}

std::vector<std::string> suite_outputs(const std::string& dir, int threads,
                                       uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto at = [&](const char* name) { return (fs::path(dir) / name).string(); };

    {
        CsvWriter csv(at("kernel_profile.csv"), "kernel_profile", 1,
                      {"r", "K", "lower", "upper", "closed_rel_resid"});
        BesselKernel k(1.0, 3);
        for (int i = 0; i < 24; ++i) {
            double r = 0.05 * std::pow(100.0, i / 23.0);
            double v = k(r);
            auto env = k.envelope(r);
            double closed = std::exp(-r) / (4.0 * kPi * r);
            csv.row({r, v, env.lower, env.upper, std::fabs(v - closed) / closed});
        }
        written.push_back(csv.path());
    }

    {
        CsvWriter csv(at("cov_table.csv"), "cov_table", 1,
                      {"H", "scheme", "tau", "eps", "c_exact", "c_reference", "b_t",
                       "b_reference"});
        for (double H : {0.3, 0.7})
            for (Scheme kind : {Scheme::symmetric, Scheme::forward})
                for (double tau : {0.5, 1.0, 2.0})
                    for (double eps : {0.05, 0.1, 0.25}) {
                        auto atoms = cov_exact(kind, H, 2.0, 2.0 + tau, eps);
                        auto ref = reference_atoms(kind, H, tau, eps);
                        csv.row({H, kind == Scheme::symmetric ? 0.0 : 1.0, tau, eps,
                                 atoms.c, ref.c_ref, atoms.b_t, ref.b_ref});
                    }
        written.push_back(csv.path());
    }

    {
        CsvWriter csv(at("sweep.csv"), "sweep", 1,
                      {"H", "d", "alpha", "epsilon", "scheme", "mode", "value",
                       "stderr"});
        auto emit = [&](const SweepTable& t, double H) {
            for (const auto& r : t.rows)
                csv.row({H, 3.0, r.alpha, r.eps,
                         t.kind == Scheme::symmetric ? 0.0 : 1.0,
                         t.mode == "exact" ? 0.0 : 1.0, r.value, r.stderror});
        };
        std::vector<double> eps_exact = {0.125, 0.0625, 0.03125, 0.015625};
        emit(threshold_sweep(0.5, 3, {1.0, 2.0}, eps_exact, Scheme::symmetric, "exact",
                             1.0, 0, seed, threads),
             0.5);
        std::vector<double> eps_mc = {0.125, 0.0625};
        emit(threshold_sweep(0.5, 3, {2.0}, eps_mc, Scheme::symmetric, "mc", 1.0, 64,
                             derive_seed(seed, 1), threads),
             0.5);
        written.push_back(csv.path());
    }

    {
        CsvWriter csv(at("wick.csv"), "wick_decomposition", 1,
                      {"replica", "A", "B1", "B2", "Q", "Z"});
        auto grid = CurrentGridSpec::make(0.5, 3, 0.1, 1.0, 4);
        BesselKernel full(2.0, 3), lower(1.0, 3);
        const int n_rep = 48;
        std::vector<WickTerms> terms(n_rep);
        parallel_for(n_rep, threads, [&](int r) {
            auto cp = sample_current_path(grid, derive_seed(seed, 100 + uint64_t(r)));
            terms[r] = wick_decompose(cp, 2.0, full, lower);
        });
        for (int r = 0; r < n_rep; ++r)
            csv.row({double(r), terms[r].A, terms[r].B1, terms[r].B2, terms[r].Q,
                     terms[r].Z});
        written.push_back(csv.path());
    }

    {
        CsvWriter csv(at("vortex.csv"), "vortex_energy", 1,
                      {"H", "eps", "mode", "energy", "stderr", "sobolev",
                       "spectral_finite"});
        auto gauss = SpectralMeasure::gaussian_measure(1.0);
        for (double H : {0.4, 0.5}) {
            auto rep = check_conditions(gauss, H, 2.0);
            for (double eps : {0.125, 0.0625}) {
                auto grid = CurrentGridSpec::make(H, 3, eps, 1.0, 4);
                double e = expected_energy_exact(grid, gauss, Scheme::symmetric).value;
                csv.row({H, eps, 0.0, e, 0.0, rep.sobolev_holds ? 1.0 : 0.0,
                         rep.spectral_finite ? 1.0 : 0.0});
            }
        }
        auto grid = CurrentGridSpec::make(0.5, 3, 0.0625, 1.0, 4);
        GKernel gk(gauss);
        McEnergy mc = mc_energy(grid, gauss, Scheme::symmetric, gk, 48,
                                derive_seed(seed, 2), threads);
        auto rep = check_conditions(gauss, 0.5, 2.0);
        csv.row({0.5, 0.0625, 1.0, mc.stats.mean, mc.stats.stderror,
                 rep.sobolev_holds ? 1.0 : 0.0, rep.spectral_finite ? 1.0 : 0.0});
        written.push_back(csv.path());
    }

    {
        CsvWriter csv(at("brownian.csv"), "brownian_checks", 1,
                      {"check", "param", "value", "stderr", "flag"});
        auto rows = max_exceedance_check(3, 1.0, {2.0, 4.0, 8.0}, 4000, 256,
                                         derive_seed(seed, 3), threads);
        for (const auto& r : rows)
            csv.row({0.0, r.radius, r.empirical, r.stderror, r.within ? 1.0 : 0.0});
        auto occ = occupation_integral_estimate(2, 1.8, 1.5, 1.0, 1000,
                                                derive_seed(seed, 4), threads);
        csv.row({1.0, 1.8, occ.stats.mean, occ.stats.stderror,
                 occ.condition_holds ? 1.0 : 0.0});
        BesselMomentCase c;
        c.d = 3;
        c.theta = 0.9;
        c.q = 1.2;
        c.x = {1.0, 0.0, 0.0};
        c.T = 1.0;
        c.n_paths = 1000;
        c.n_steps = 128;
        c.seed = derive_seed(seed, 5);
        auto rep = bessel_moment_estimates(c, threads);
        csv.row({2.0, c.theta, rep.ratio, rep.lhs.stderror,
                 rep.unreliable ? 1.0 : 0.0});
        written.push_back(csv.path());
    }

    {
        FbmParams p;
        p.H = 0.5;
        p.d = 3;
        p.T = 1.0;
        p.n_steps = 64;
        p.seed = derive_seed(seed, 6);
        FbmPath path = sample_fbm(p);
        write_path_csv(path, at("fbm_path.csv"));
        written.push_back(at("fbm_path.csv"));
    }

    RunManifest man;
    man.subcommand = "full-suite";
    man.base_seed = seed;
    man.threads = threads;
    std::ostringstream cfg;
    cfg << "suite:" << seed;
    man.config_hash = fnv1a64(cfg.str());
    man.module_versions = {{"kernel", "1"}, {"fbm", "1"},      {"analytics", "1"},
                           {"wick", "1"},   {"currents", "1"}, {"vortex", "1"},
                           {"brownian", "1"}};
    for (const auto& p : written)
        man.outputs.push_back(std::filesystem::path(p).filename().string());
    man.write(at("manifest.json"));
    written.push_back(at("manifest.json"));
    return written;
}

} // namespace fbc
