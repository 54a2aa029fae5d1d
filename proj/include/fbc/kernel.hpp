#pragma once
#include <stdexcept>
#include <vector>

namespace fbc {

// Radial kernel with Fourier symbol (1 + |q|^2)^{-alpha}:
//   K(r) = gamma_const * Int_0^inf t^{alpha - d/2} exp(-r^2/(4t) - t) dt/t,
//   gamma_const = 1 / (Gamma(alpha) (4 pi)^{d/2}).
// Regime refers to the small-r behaviour: subcritical alpha < d/2 (power
// blowup r^{2 alpha - d}), critical alpha = d/2 (log), supercritical
// alpha > d/2 (finite at 0).
enum class KernelRegime { subcritical, critical, supercritical };

struct KernelSpec {
    double alpha = 1.0;
    int d = 1;
    double gamma_const = 0.0;
    KernelRegime regime = KernelRegime::supercritical;

    static KernelSpec make(double alpha, int d);
};

// Direct quadrature (slow path; log-axis trapezoid with step halving).
double eval_K(const KernelSpec& ks, double r, double rel_tol = 1e-10);

// K(0) = gamma_const * Gamma(alpha - d/2); finite iff alpha > d/2.
bool K_zero_finite(const KernelSpec& ks);
double eval_K_zero(const KernelSpec& ks);

// K_{alpha-1}(r) - K_alpha(r), i.e. the NEGATIVE Laplacian of K: the sign
// is fixed by the operator identity (1 - Lap) K_alpha = K_{alpha-1}.
// Needs alpha > 1 so the lower-index kernel exists.
double laplacian_K(const KernelSpec& ks, double r);

// E[K(sigma N)] and E[(Lap K)(sigma N)] for N standard d-dim normal.
// Both reduce to single Gamma-type integrals:
//   m(sigma) = gamma_const Int t^{alpha-1} e^{-t} (t + sigma^2/2)^{-d/2} dt
//   w(sigma) = -(d/2) gamma_const Int t^{alpha-1} e^{-t} (t + sigma^2/2)^{-d/2-1} dt
// (w is d/ds of m at s = sigma^2/2, negative since m decreases with spread.)
// m needs alpha > d/2 at sigma = 0 but any alpha > 0 for sigma > 0;
// w is finite for all alpha > 0, sigma > 0, and equals
// m_alpha - m_{alpha-1} whenever alpha > 1 (Lap K = K_alpha - K_{alpha-1}).
double gaussian_expectation_K(const KernelSpec& ks, double sigma, double rel_tol = 1e-10);
double gaussian_expectation_lapK(const KernelSpec& ks, double sigma, double rel_tol = 1e-10);

// |(K_{alpha/2} * K_{alpha/2})(r e_1) - K_alpha(r)| / K_alpha(r) by
// midpoint tensor-grid quadrature over the box [-L, L]^d shifted to the
// segment midpoint, n nodes per axis. tail_estimate bounds the truncated
// mass; practical for d <= 2.
struct SemigroupCheck {
    double residual = 0.0;
    double tail_estimate = 0.0;
    bool box_warning = false;
};
SemigroupCheck check_semigroup(double alpha, int d, double r, double box, int n_nodes);

// Int_{R^d} K dx via the radial profile; equals 1 for every alpha > 0.
double kernel_mass(const KernelSpec& ks, double rel_tol = 1e-8);

// Second, independent route to the semigroup identity in d = 1: direct
// convolution quadrature with the endpoint singularities mapped away
// (logistic substitution), accurate to ~1e-8. Returns |lhs - K_alpha(r)|.
double semigroup_residual_1d(double alpha, double r);

struct Envelope {
    double lower = 0.0;
    double upper = 0.0;
};

// Fritsch-Carlson node slopes for a C^1 cubic Hermite interpolant that
// preserves monotone segments (flat at interior extrema).
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y);

// Monotone-cubic interpolant of (log x, log y) samples; strictly positive
// y required. Fritsch-Carlson slopes, C^1, preserves monotone segments.
class PchipLogLog {
  public:
    PchipLogLog() = default;
    PchipLogLog(std::vector<double> log_x, std::vector<double> log_y);
    double operator()(double x) const; // x inside [x_min, x_max]
    double x_min() const;
    double x_max() const;

  private:
    std::vector<double> lx_, ly_, slope_;
};

// Memoised kernel: log-spaced table on [1e-6, 80] interpolated in log-log,
// target relative error ~1e-7 against eval_K; outside the table the small-r
// regime form or 0 is used. Also owns calibrated envelope constants.
class BesselKernel {
  public:
    BesselKernel(double alpha, int d);

    const KernelSpec& spec() const { return spec_; }
    double operator()(double r) const; // memoised
    double exact(double r) const { return eval_K(spec_, r); }
    Envelope envelope(double r) const; // regime-appropriate bounds
    double table_r_min() const { return r_min_; }

  private:
    KernelSpec spec_;
    PchipLogLog interp_;
    double r_min_ = 0.0, r_max_ = 0.0;
    double k_at_rmin_ = 0.0;
    double env_lower_c_ = 0.0, env_upper_c_ = 0.0;
};

// Memoised sigma -> E[K(sigma N)] and sigma -> E[(Lap K)(sigma N)] tables.
// w is stored through the always-positive split u = m - w, so both
// interpolants act on strictly positive, power-law-like profiles.
class GaussMoments {
  public:
    GaussMoments(double alpha, int d, double sigma_min = 1e-5, double sigma_max = 24.0);

    double m(double sigma) const;
    double w(double sigma) const;
    double exact_m(double sigma) const { return gaussian_expectation_K(spec_, sigma); }
    double exact_w(double sigma) const { return gaussian_expectation_lapK(spec_, sigma); }
    const KernelSpec& spec() const { return spec_; }

  private:
    KernelSpec spec_;
    PchipLogLog m_interp_, u_interp_;
    double s_min_ = 0.0, s_max_ = 0.0;
};

} // namespace fbc
