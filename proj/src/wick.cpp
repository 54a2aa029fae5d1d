#include "fbc/wick.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbc {

GaussianVectorSpec GaussianVectorSpec::make(int n, std::vector<double> cov) {
    if (n <= 0) throw std::invalid_argument("GaussianVectorSpec: n must be positive");
    if (cov.size() != size_t(n) * n)
        throw std::invalid_argument("GaussianVectorSpec: covariance size != n*n");
    double scale = 0.0;
    for (double v : cov) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) scale = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double a = cov[size_t(i) * n + j], b = cov[size_t(j) * n + i];
            if (std::fabs(a - b) > 1e-12 * scale)
                throw std::invalid_argument("GaussianVectorSpec: covariance not symmetric");
        }
    auto ev = symmetric_eigenvalues(cov, n);
    if (ev.front() < -1e-10 * scale)
        throw std::invalid_argument("GaussianVectorSpec: covariance not positive semidefinite");
    GaussianVectorSpec s;
    s.n = n;
    s.cov = std::move(cov);
    return s;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
    auto at = [&](int i, int j) -> double& { return a[size_t(i) * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = at(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<double> cholesky_psd(const GaussianVectorSpec& spec) {
    int n = spec.n;
    std::vector<double> L(size_t(n) * n, 0.0);
    double scale = 0.0;
    for (double v : spec.cov) scale = std::max(scale, std::fabs(v));
    double tol = 1e-12 * std::max(scale, 1e-300);
    for (int j = 0; j < n; ++j) {
        double diag = spec.at(j, j);
        for (int k = 0; k < j; ++k) diag -= L[size_t(j) * n + k] * L[size_t(j) * n + k];
        if (diag <= tol) {
            // semidefinite direction; the whole column is dependent
            L[size_t(j) * n + j] = 0.0;
            continue;
        }
        double ljj = std::sqrt(diag);
        L[size_t(j) * n + j] = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = spec.at(i, j);
            for (int k = 0; k < j; ++k) s -= L[size_t(i) * n + k] * L[size_t(j) * n + k];
            L[size_t(i) * n + j] = s / ljj;
        }
    }
    return L;
}

namespace {

void sample_z(const std::vector<double>& L, int n, Rng& rng, std::vector<double>& g,
              std::vector<double>& z) {
    for (int i = 0; i < n; ++i) g[i] = rng.gaussian();
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k <= i; ++k) s += L[size_t(i) * n + k] * g[k];
        z[i] = s;
    }
}

void spot_check_gradient(const GaussianVectorSpec& spec, const ScalarFn& f,
                         const GradientFn& grad_f, uint64_t seed) {
    Rng rng(derive_seed(seed, 0x67726164));
    int n = spec.n;
    std::vector<double> x(n);
    for (int pt = 0; pt < 10; ++pt) {
        for (int i = 0; i < n; ++i) x[i] = rng.gaussian();
        auto g = grad_f(x);
        if (int(g.size()) != n)
            throw std::invalid_argument("verify_wick: gradient dimension mismatch");
        for (int i = 0; i < n; ++i) {
            double h = 1e-5 * (1.0 + std::fabs(x[i]));
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            double fd = (f(xp) - f(xm)) / (2.0 * h);
            double ref = std::max({std::fabs(g[i]), std::fabs(fd), 1e-6});
            if (std::fabs(fd - g[i]) > 1e-4 * ref)
                throw std::invalid_argument(
                    "verify_wick: grad_f disagrees with finite differences of f");
        }
    }
}

} // namespace

WickReport verify_wick(const GaussianVectorSpec& spec, const ScalarFn& f,
                       const GradientFn& grad_f, int ell, size_t n_samples,
                       uint64_t seed, int threads) {
    if (ell < 0 || ell >= spec.n) throw std::invalid_argument("verify_wick: ell out of range");
    if (n_samples == 0) throw std::invalid_argument("verify_wick: n_samples == 0");
    spot_check_gradient(spec, f, grad_f, seed);

    auto L = cholesky_psd(spec);
    int n = spec.n;
    const size_t block = 8192;
    int n_blocks = int((n_samples + block - 1) / block);

    struct Partial {
        double sa = 0, sb = 0, sd = 0, sd2 = 0;
        size_t cnt = 0;
    };
    std::vector<Partial> parts(n_blocks);

    parallel_for(n_blocks, threads, [&](int bi) {
        Rng rng(derive_seed(seed, uint64_t(bi) + 1));
        std::vector<double> g(n), z(n);
        size_t lo = size_t(bi) * block;
        size_t hi = std::min(n_samples, lo + block);
        Partial p;
        for (size_t s = lo; s < hi; ++s) {
            sample_z(L, n, rng, g, z);
            double a = z[ell] * f(z);
            auto gr = grad_f(z);
            double b = 0.0;
            for (int j = 0; j < n; ++j) b += spec.at(ell, j) * gr[j];
            double d = a - b;
            p.sa += a;
            p.sb += b;
            p.sd += d;
            p.sd2 += d * d;
            p.cnt += 1;
        }
        parts[bi] = p;
    });

    Partial tot;
    for (const auto& p : parts) {
        tot.sa += p.sa;
        tot.sb += p.sb;
        tot.sd += p.sd;
        tot.sd2 += p.sd2;
        tot.cnt += p.cnt;
    }
    double N = double(tot.cnt);
    WickReport rep;
    rep.n_samples = tot.cnt;
    rep.lhs = tot.sa / N;
    rep.rhs = tot.sb / N;
    double dm = tot.sd / N;
    double var = std::max(0.0, tot.sd2 / N - dm * dm);
    rep.diff_stderr = std::sqrt(var / N);
    rep.z_score = rep.diff_stderr > 0 ? dm / rep.diff_stderr : 0.0;
    return rep;
}

CharFnReport characteristic_check(const GaussianVectorSpec& spec,
                                  const std::vector<double>& t, size_t n_samples,
                                  uint64_t seed, int threads) {
    if (t.size() != size_t(spec.n))
        throw std::invalid_argument("characteristic_check: t dimension mismatch");
    auto L = cholesky_psd(spec);
    int n = spec.n;
    double q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q += t[i] * spec.at(i, j) * t[j];

    const size_t block = 8192;
    int n_blocks = int((n_samples + block - 1) / block);
    struct Partial {
        double sc = 0, sc2 = 0, ss = 0, ss2 = 0;
        size_t cnt = 0;
    };
    std::vector<Partial> parts(n_blocks);
    parallel_for(n_blocks, threads, [&](int bi) {
        Rng rng(derive_seed(seed, uint64_t(bi) + 1));
        std::vector<double> g(n), z(n);
        size_t lo = size_t(bi) * block;
        size_t hi = std::min(n_samples, lo + block);
        Partial p;
        for (size_t s = lo; s < hi; ++s) {
            sample_z(L, n, rng, g, z);
            double phase = 0.0;
            for (int i = 0; i < n; ++i) phase += t[i] * z[i];
            double c = std::cos(phase), sn = std::sin(phase);
            p.sc += c;
            p.sc2 += c * c;
            p.ss += sn;
            p.ss2 += sn * sn;
            p.cnt += 1;
        }
        parts[bi] = p;
    });
    Partial tot;
    for (const auto& p : parts) {
        tot.sc += p.sc;
        tot.sc2 += p.sc2;
        tot.ss += p.ss;
        tot.ss2 += p.ss2;
        tot.cnt += p.cnt;
    }
    double N = double(tot.cnt);
    CharFnReport rep;
    rep.n_samples = tot.cnt;
    rep.re_mc = tot.sc / N;
    rep.im_mc = tot.ss / N;
    rep.re_exact = std::exp(-0.5 * q);
    rep.re_stderr = std::sqrt(std::max(0.0, tot.sc2 / N - rep.re_mc * rep.re_mc) / N);
    rep.im_stderr = std::sqrt(std::max(0.0, tot.ss2 / N - rep.im_mc * rep.im_mc) / N);
    return rep;
}

std::vector<WickSuiteCase> wick_builtin_suite(uint64_t seed, int threads) {
    std::vector<WickSuiteCase> out;

    auto push = [&](const std::string& name, const WickReport& r, double tol) {
        WickSuiteCase c;
        c.name = name;
        c.lhs = r.lhs;
        c.rhs = r.rhs;
        c.z_score = r.z_score;
        c.tolerance = tol;
        c.pass = std::fabs(r.z_score) < tol;
        out.push_back(c);
    };

    {
        auto spec = GaussianVectorSpec::make(1, {1.7});
        WickReport r = verify_wick(
            spec, [](const std::vector<double>& z) { return z[0]; },
            [](const std::vector<double>& z) { return std::vector<double>{1.0 + 0.0 * z[0]}; },
            0, 200000, derive_seed(seed, 11), threads);
        push("n1_linear_variance", r, 3.0);
    }
    {
        auto spec = GaussianVectorSpec::make(2, {1.0, 0.6, 0.6, 2.0});
        WickReport r = verify_wick(
            spec, [](const std::vector<double>& z) { return z[1]; },
            [](const std::vector<double>& z) {
                (void)z;
                return std::vector<double>{0.0, 1.0};
            },
            0, 200000, derive_seed(seed, 12), threads);
        push("n2_cross_covariance", r, 3.0);
    }
    {
        // random-looking but pinned PSD covariance: M M^T for a fixed M
        std::vector<double> M = {0.9, 0.2, -0.4, 0.1, 1.1, 0.3, -0.5, 0.25, 0.8};
        std::vector<double> cov(9, 0.0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) cov[i * 3 + j] += M[i * 3 + k] * M[j * 3 + k];
        auto spec = GaussianVectorSpec::make(3, cov);
        WickReport r = verify_wick(
            spec,
            [](const std::vector<double>& z) {
                double q = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
                return std::exp(-0.5 * q);
            },
            [](const std::vector<double>& z) {
                double q = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
                double e = std::exp(-0.5 * q);
                return std::vector<double>{-z[0] * e, -z[1] * e, -z[2] * e};
            },
            1, 1000000, derive_seed(seed, 13), threads);
        push("n3_gaussian_bump", r, 3.0);
    }
    return out;
}

} // namespace fbc
