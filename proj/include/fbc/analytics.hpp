#pragma once
#include "fbc/fbm.hpp"

namespace fbc {

// Covariances of one coordinate of the difference-quotient field.
// Everything is computed from the covariance form
//   Cov(X_a - X_b, X_c - X_d) = (-|a-c|^{2H} + |a-d|^{2H} + |b-c|^{2H} - |b-d|^{2H}) / 2,
// which is the ground truth here; the closed forms in reference_atoms are
// only compared against, never used in computations.
//
// Stencil convention: times below 0 are clamped to 0 (X_0 = 0, matching
// zero extension); no upper clamp is applied, callers are expected to pad
// the horizon. boundary flags any clamped stencil.
struct CovarianceAtoms {
    double H = 0.5, eps = 0.0, tau = 0.0;
    Scheme kind = Scheme::symmetric;
    double c = 0.0;    // Cov(D X_t, D X_s), one coordinate
    double b_t = 0.0;  // Cov(D X_t, X_t - X_s)
    double b_s = 0.0;  // Cov(D X_s, X_t - X_s)
    bool boundary = false;
};

CovarianceAtoms cov_exact(Scheme kind, double H, double t, double s, double eps);

// Atoms for one quadrature cell where the difference quotients sit at
// (t, s) but the kernel argument is X_p - X_q (the diagonal cells of the
// double integral use a staggered pair). sigma is the per-coordinate sd of
// X_p - X_q.
struct CellAtoms {
    double c = 0.0, b_t = 0.0, b_s = 0.0;
    double sigma = 0.0;
    bool boundary = false;
};

CellAtoms cell_atoms(Scheme kind, double H, double t, double s, double p, double q,
                     double eps);

// Scaling functions used by the closed-form covariance expressions.
//   Phi(x)  = (|1+x|^{2H} + |1-x|^{2H} - 2) / x^2
//   psi(x)  = (|1+x|^{2H} - |1-x|^{2H}) / (2x)
//   psit(x) = (x^{2H} + 1 - (1-x)^{2H}) / (2x)
struct PhiPsi {
    double Phi = 0.0, psi = 0.0, psi_tilde = 0.0;
};
PhiPsi phi_psi_reference(double H, double x);

// Small-x limits, both the measured one (Richardson on the definition,
// equals 2H(2H-1)) and the one quoted alongside Phi in the derivation
// notes (2H-1). The module reports both; nothing downstream assumes either.
double phi_limit_measured(double H);
double phi_limit_quoted(double H);

// Closed-form counterparts of cov_exact at interior points:
//   c_ref  = tau^{2H-2}/2 * Phi(k eps/tau)  (k = 2 symmetric, 1 forward)
//   b_ref  = tau^{2H-1}/2 * psi(eps/tau)    (symmetric)
//          = tau^{2H-1}/2 * psi_tilde(eps/tau) (forward)
struct ReferenceAtoms {
    double c_ref = 0.0, b_ref = 0.0;
};
ReferenceAtoms reference_atoms(Scheme kind, double H, double tau, double eps);

// Sobolev-integrability threshold of the kernel index for the expected
// double integral, and the stricter index at which even the diagonal
// (coincidence) contribution stays integrable.
double alpha_H(double H, int d);
double condition_B_threshold(double H, int d);

// E|N|^gamma for N standard d-dim normal: 2^{gamma/2} Gamma((d+gamma)/2) / Gamma(d/2).
// Throws std::domain_error("moment_N: divergent...") when gamma <= -d.
double moment_N(double gamma, int d);

} // namespace fbc
