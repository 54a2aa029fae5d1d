#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "fbc/rng.hpp"

namespace fbc {

struct FbmParams {
    double H = 0.5;       // Hurst index, 0 < H < 1
    int d = 1;            // ambient dimension, independent components
    double T = 1.0;       // horizon
    int n_steps = 256;    // lattice steps; nodes are t_k = k*T/n_steps
    uint64_t seed = 1;    // component c uses derive_seed(seed, c)
};

enum class Scheme { forward, symmetric };

struct DerivScheme {
    Scheme kind = Scheme::symmetric;
    double eps = 0.0625;
};

enum class SynthMethod { circulant, cholesky };

struct FbmPath {
    FbmParams params;
    double dt = 0.0;
    SynthMethod method = SynthMethod::circulant;
    // (n_steps+1) x d row-major; values[k*d + i] = X^i_{t_k}, X_0 = 0
    std::vector<double> values;

    int n_nodes() const { return params.n_steps + 1; }
    double at(int k, int i) const { return values[size_t(k) * params.d + i]; }
    double time_of(int k) const { return dt * k; }
};

// Exact fBm covariance R(u,v) = (u^{2H} + v^{2H} - |u-v|^{2H}) / 2.
double fbm_R(double u, double v, double H);

// Cov(X_a - X_b, X_c - X_d) for one component, via the R expansion.
double fbm_cov_increments(double a, double b, double c, double d, double H);

// Exact sampler. Circulant embedding of the increment process (embedding
// length = 2 * next_pow2(n_steps)); if the embedding spectrum has a
// significantly negative eigenvalue we fall back to dense Cholesky and
// record that in `method`.
FbmPath sample_fbm(const FbmParams& p);

// Difference quotients at node k (time k*dt). eps must sit on the lattice.
// Stencil times outside [0, T] are clamped to the ends (left clamp hits
// X_0 = 0); the denominator is not rescaled.
void discrete_derivative(const FbmPath& path, const DerivScheme& ds, int k,
                         double* out /* d doubles */);

// Derivatives at every requested node index, row-major (nodes x d).
std::vector<double> derivative_series(const FbmPath& path, const DerivScheme& ds,
                                      const std::vector<int>& nodes);

// Monte Carlo check helper: mean/stderr of X^comp_{t_a} * X^comp_{t_b}
// over independent replicas (replica r seeds with derive_seed(p.seed, r)).
MCStats empirical_covariance(const FbmParams& p, int node_a, int node_b,
                             int comp, int n_replicas, int threads = 0);

// Binary layout: 32-byte little-endian header
//   u16 magic 0x4246 ("FB"), u16 d, f64 H, f64 T, u32 n_steps, u64 seed
// followed by (n_steps+1)*d doubles, row-major.
void write_path_binary(const FbmPath& path, const std::string& file);
FbmPath read_path_binary(const std::string& file);

// CSV columns: t, x1..xd
void write_path_csv(const FbmPath& path, const std::string& file);

// In-place radix-2 complex FFT, n a power of two. sign = -1 forward
// (e^{-2pi i jk/n}), +1 inverse, no normalization. Deterministic.
void fft_pow2(std::vector<std::complex<double>>& a, int sign);

} // namespace fbc
