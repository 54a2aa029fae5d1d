#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbc/rng.hpp"

namespace fbc {

// Mean-zero Gaussian vector described by its covariance matrix.
// make() enforces symmetry to 1e-12 (relative to the largest entry) and
// eigenvalues >= -1e-10 * ||cov||; both violations throw.
struct GaussianVectorSpec {
    int n = 0;
    std::vector<double> cov; // row-major n x n

    double at(int i, int j) const { return cov[size_t(i) * n + j]; }

    static GaussianVectorSpec make(int n, std::vector<double> cov);
};

// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n);

// Lower-triangular L with L L^T = cov, tolerant of semidefinite input:
// a pivot below tol collapses its column to zero instead of failing.
std::vector<double> cholesky_psd(const GaussianVectorSpec& spec);

using ScalarFn = std::function<double(const std::vector<double>&)>;
using GradientFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct WickReport {
    double lhs = 0.0;         // MC estimate of E[Z_ell f(Z)]
    double rhs = 0.0;         // MC estimate of sum_j Cov(ell,j) E[d_j f(Z)]
    double z_score = 0.0;     // of lhs - rhs, stderr from the paired samples
    double diff_stderr = 0.0;
    size_t n_samples = 0;
};

// Checks E[Z_ell f(Z)] = sum_j Cov(Z_ell, Z_j) E[d_j f(Z)] by Monte Carlo,
// both sides on the same sample stream so the difference is low-variance.
// grad_f is spot-checked against central differences at 10 random points
// (relative tolerance 1e-4) before any sampling; a mismatch throws.
WickReport verify_wick(const GaussianVectorSpec& spec, const ScalarFn& f,
                       const GradientFn& grad_f, int ell, size_t n_samples,
                       uint64_t seed, int threads = 0);

// E exp(i<t, Z>) against the closed form exp(-t' cov t / 2); the imaginary
// part has exact value 0. Deterministic target, MC on the left.
struct CharFnReport {
    double re_mc = 0.0, im_mc = 0.0;
    double re_exact = 1.0;
    double re_stderr = 0.0, im_stderr = 0.0;
    size_t n_samples = 0;
};
CharFnReport characteristic_check(const GaussianVectorSpec& spec,
                                  const std::vector<double>& t, size_t n_samples,
                                  uint64_t seed, int threads = 0);

// Fixed regression suite used by tests and the wick-check subcommand.
struct WickSuiteCase {
    std::string name;
    double lhs = 0.0, rhs = 0.0, z_score = 0.0;
    double tolerance = 3.0; // pass when |z| < tolerance (or stated otherwise)
    bool pass = false;
};
std::vector<WickSuiteCase> wick_builtin_suite(uint64_t seed, int threads = 0);

} // namespace fbc
