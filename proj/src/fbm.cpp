#include "fbc/fbm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fbc {

int default_threads() {
    if (const char* env = std::getenv("FBC_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = default_threads();
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

MCStats summarize(const std::vector<double>& xs) {
    MCStats s;
    s.n = int(xs.size());
    if (s.n == 0) return s;
    double mean = 0.0, m2 = 0.0;
    int k = 0;
    for (double x : xs) {
        ++k;
        double delta = x - mean;
        mean += delta / k;
        m2 += delta * (x - mean);
    }
    s.mean = mean;
    if (s.n > 1) {
        s.sd = std::sqrt(m2 / (s.n - 1));
        s.stderror = s.sd / std::sqrt(double(s.n));
    }
    return s;
}

double fbm_R(double u, double v, double H) {
    double tu = std::pow(std::fabs(u), 2 * H);
    double tv = std::pow(std::fabs(v), 2 * H);
    double td = std::pow(std::fabs(u - v), 2 * H);
    return 0.5 * (tu + tv - td);
}

double fbm_cov_increments(double a, double b, double c, double d, double H) {
    auto p = [H](double x) { return std::pow(std::fabs(x), 2 * H); };
    return 0.5 * (-p(a - c) + p(a - d) + p(b - c) - p(b - d));
}

void fft_pow2(std::vector<std::complex<double>>& a, int sign) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_pow2: size must be a power of two");
    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = 3.141592653589793238462643383279502884;
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = sign * 2.0 * pi / double(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

namespace {

size_t next_pow2(size_t n) {
    size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

// fGn autocovariance at lag k for step h: E[(X_{(k+1)h}-X_{kh}) (X_h-X_0)]
double fgn_gamma(int k, double H, double h) {
    double a = std::pow(std::fabs(double(k + 1)), 2 * H);
    double b = std::pow(std::fabs(double(k - 1)), 2 * H);
    double c = std::pow(std::fabs(double(k)), 2 * H);
    return 0.5 * std::pow(h, 2 * H) * (a + b - 2 * c);
}

// One component of fGn by circulant embedding. Returns false if the
// embedding eigenvalues are too negative to repair.
bool fgn_circulant(int n, double H, double h, Rng& rng, std::vector<double>& out) {
    const size_t m = next_pow2(size_t(n));
    const size_t L = 2 * m;
    std::vector<std::complex<double>> c(L);
    for (size_t k = 0; k <= m; ++k) c[k] = fgn_gamma(int(k), H, h);
    for (size_t k = 1; k < m; ++k) c[L - k] = c[k];
    fft_pow2(c, -1);

    double lmax = 0.0, lmin = 0.0;
    for (auto& z : c) {
        lmax = std::max(lmax, z.real());
        lmin = std::min(lmin, z.real());
    }
    if (lmin < -1e-8 * lmax) return false;

    std::vector<std::complex<double>> V(L);
    V[0] = std::sqrt(std::max(0.0, c[0].real())) * rng.gaussian();
    for (size_t k = 1; k < m; ++k) {
        double s = std::sqrt(std::max(0.0, c[k].real()) / 2.0);
        double a = rng.gaussian(), b = rng.gaussian();
        V[k] = std::complex<double>(s * a, s * b);
        V[L - k] = std::conj(V[k]);
    }
    V[m] = std::sqrt(std::max(0.0, c[m].real())) * rng.gaussian();

    fft_pow2(V, -1);
    const double norm = 1.0 / std::sqrt(double(L));
    out.resize(n);
    for (int j = 0; j < n; ++j) out[j] = V[j].real() * norm;
    return true;
}

// Dense Cholesky of the Toeplitz fGn covariance; O(n^3) fallback.
void fgn_cholesky(int n, double H, double h, Rng& rng, std::vector<double>& out) {
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = fgn_gamma(k, H, h);
    std::vector<double> Lm(size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = g[i - j];
            for (int k = 0; k < j; ++k) s -= Lm[size_t(i) * n + k] * Lm[size_t(j) * n + k];
            if (i == j) {
                if (s <= 0) throw std::runtime_error("fgn_cholesky: matrix not positive definite");
                Lm[size_t(i) * n + j] = std::sqrt(s);
            } else {
                Lm[size_t(i) * n + j] = s / Lm[size_t(j) * n + j];
            }
        }
    }
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.gaussian();
    out.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k <= i; ++k) s += Lm[size_t(i) * n + k] * z[k];
        out[i] = s;
    }
}

} // namespace

FbmPath sample_fbm(const FbmParams& p) {
    if (!(p.H > 0.0 && p.H < 1.0)) throw std::invalid_argument("sample_fbm: H must be in (0,1)");
    if (p.d < 1) throw std::invalid_argument("sample_fbm: d must be >= 1");
    if (!(p.T > 0.0)) throw std::invalid_argument("sample_fbm: T must be > 0");
    if (p.n_steps < 1) throw std::invalid_argument("sample_fbm: n_steps must be >= 1");

    FbmPath path;
    path.params = p;
    path.dt = p.T / p.n_steps;
    path.values.assign(size_t(p.n_steps + 1) * p.d, 0.0);

    const int n = p.n_steps;
    std::vector<double> incr;
    for (int comp = 0; comp < p.d; ++comp) {
        Rng rng(derive_seed(p.seed, uint64_t(comp)));
        if (fgn_circulant(n, p.H, path.dt, rng, incr)) {
            path.method = SynthMethod::circulant;
        } else {
            // re-derive so the fallback consumes a fresh stream
            Rng rng2(derive_seed(p.seed, uint64_t(comp)));
            fgn_cholesky(n, p.H, path.dt, rng2, incr);
            path.method = SynthMethod::cholesky;
        }
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
            acc += incr[k];
            path.values[size_t(k + 1) * p.d + comp] = acc;
        }
    }
    return path;
}

void discrete_derivative(const FbmPath& path, const DerivScheme& ds, int k, double* out) {
    const int n = path.params.n_steps, d = path.params.d;
    const int m = int(std::lround(ds.eps / path.dt));
    if (m < 1 || std::fabs(m * path.dt - ds.eps) > 1e-9 * std::max(1.0, ds.eps))
        throw std::invalid_argument("discrete_derivative: eps must be a positive lattice multiple");
    int hi, lo;
    double den;
    if (ds.kind == Scheme::symmetric) {
        hi = std::min(k + m, n);
        lo = std::max(k - m, 0);
        den = 2.0 * ds.eps;
    } else {
        hi = std::min(k + m, n);
        lo = k;
        den = ds.eps;
    }
    for (int i = 0; i < d; ++i)
        out[i] = (path.at(hi, i) - path.at(lo, i)) / den;
}

std::vector<double> derivative_series(const FbmPath& path, const DerivScheme& ds,
                                      const std::vector<int>& nodes) {
    const int d = path.params.d;
    std::vector<double> out(nodes.size() * size_t(d));
    for (size_t r = 0; r < nodes.size(); ++r)
        discrete_derivative(path, ds, nodes[r], &out[r * d]);
    return out;
}

MCStats empirical_covariance(const FbmParams& p, int node_a, int node_b,
                             int comp, int n_replicas, int threads) {
    std::vector<double> prods(n_replicas);
    parallel_for(n_replicas, threads, [&](int r) {
        FbmParams q = p;
        q.seed = derive_seed(p.seed, uint64_t(r));
        FbmPath path = sample_fbm(q);
        prods[r] = path.at(node_a, comp) * path.at(node_b, comp);
    });
    return summarize(prods);
}

namespace {
#pragma pack(push, 1)
struct PathHeader {
    uint16_t magic;
    uint16_t d;
    double H;
    double T;
    uint32_t n_steps;
    uint64_t seed;
};
#pragma pack(pop)
static_assert(sizeof(PathHeader) == 32, "path header must be 32 bytes");
constexpr uint16_t kPathMagic = 0x4246; // "FB"
} // namespace

void write_path_binary(const FbmPath& path, const std::string& file) {
    PathHeader h{kPathMagic, uint16_t(path.params.d), path.params.H, path.params.T,
                 uint32_t(path.params.n_steps), path.params.seed};
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("write_path_binary: cannot open " + file);
    os.write(reinterpret_cast<const char*>(&h), sizeof h);
    os.write(reinterpret_cast<const char*>(path.values.data()),
             std::streamsize(path.values.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write_path_binary: write failed for " + file);
}

FbmPath read_path_binary(const std::string& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("read_path_binary: cannot open " + file);
    PathHeader h{};
    is.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!is || h.magic != kPathMagic)
        throw std::runtime_error("read_path_binary: bad header in " + file);
    FbmPath path;
    path.params.H = h.H;
    path.params.d = h.d;
    path.params.T = h.T;
    path.params.n_steps = int(h.n_steps);
    path.params.seed = h.seed;
    path.dt = h.T / h.n_steps;
    path.values.resize(size_t(h.n_steps + 1) * h.d);
    is.read(reinterpret_cast<char*>(path.values.data()),
            std::streamsize(path.values.size() * sizeof(double)));
    if (!is) throw std::runtime_error("read_path_binary: truncated data in " + file);
    return path;
}

void write_path_csv(const FbmPath& path, const std::string& file) {
    std::FILE* f = std::fopen(file.c_str(), "w");
    if (!f) throw std::runtime_error("write_path_csv: cannot open " + file);
    std::fprintf(f, "t");
    for (int i = 1; i <= path.params.d; ++i) std::fprintf(f, ",x%d", i);
    std::fprintf(f, "\n");
    for (int k = 0; k < path.n_nodes(); ++k) {
        std::fprintf(f, "%.17g", path.time_of(k));
        for (int i = 0; i < path.params.d; ++i) std::fprintf(f, ",%.17g", path.at(k, i));
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

} // namespace fbc
