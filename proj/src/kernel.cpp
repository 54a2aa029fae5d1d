#include "fbc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace fbc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Integral of exp(logf(y)) dy over the real line, for integrands with one
// effective bump and (at least) exponential decay on both sides: scan for
// the peak on an integer grid, widen until 46 e-folds below it, then
// trapezoid with step halving. The integrand is rescaled by the peak value
// so the sums stay in range.
double integrate_log_bump(const std::function<double(double)>& logf, double rel_tol) {
    double ymax = 0.0, lmax = -std::numeric_limits<double>::infinity();
    for (double y = -700.0; y <= 8.0; y += 1.0) {
        double v = logf(y);
        if (v > lmax) { lmax = v; ymax = y; }
    }
    if (!std::isfinite(lmax)) return 0.0;
    const double drop = 46.0;
    double a = ymax, b = ymax;
    while (a > -745.0 && logf(a) > lmax - drop) a -= 1.0;
    while (b < 16.0 && logf(b) > lmax - drop) b += 1.0;

    auto trap = [&](int n) {
        double h = (b - a) / n;
        double s = 0.5 * (std::exp(logf(a) - lmax) + std::exp(logf(b) - lmax));
        for (int i = 1; i < n; ++i) s += std::exp(logf(a + i * h) - lmax);
        return s * h;
    };
    double prev = trap(64);
    for (int n = 128; n <= (1 << 19); n *= 2) {
        double cur = trap(n);
        if (std::fabs(cur - prev) <= rel_tol * std::fabs(cur) + 1e-300) {
            prev = cur;
            break;
        }
        prev = cur;
    }
    return prev * std::exp(lmax);
}

// Same machinery for integrands given on (0, 1) with integrable endpoint
// singularities: logistic substitution maps them to a two-sided decaying
// bump on the u axis.
double integrate_unit_interval(const std::function<double(double)>& f, double rel_tol) {
    auto logf = [&](double u) {
        double s = 1.0 / (1.0 + std::exp(-u));
        double jac = s * (1.0 - s);
        if (jac <= 0.0) return -std::numeric_limits<double>::infinity();
        double v = f(s);
        if (v <= 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(v) + std::log(jac);
    };
    return integrate_log_bump(logf, rel_tol);
}

} // namespace

KernelSpec KernelSpec::make(double alpha, int d) {
    if (!(alpha > 0.0)) throw std::invalid_argument("KernelSpec: alpha must be > 0");
    if (d < 1) throw std::invalid_argument("KernelSpec: d must be >= 1");
    KernelSpec ks;
    ks.alpha = alpha;
    ks.d = d;
    ks.gamma_const = 1.0 / (std::tgamma(alpha) * std::pow(4.0 * kPi, d / 2.0));
    double diff = alpha - 0.5 * d;
    if (std::fabs(diff) < 1e-12)
        ks.regime = KernelRegime::critical;
    else
        ks.regime = diff < 0 ? KernelRegime::subcritical : KernelRegime::supercritical;
    return ks;
}

double eval_K(const KernelSpec& ks, double r, double rel_tol) {
    r = std::fabs(r);
    const double a = ks.alpha - 0.5 * ks.d;
    if (r == 0.0) return eval_K_zero(ks);
    const double q = 0.25 * r * r;
    auto logf = [a, q](double y) { return a * y - q * std::exp(-y) - std::exp(y); };
    return ks.gamma_const * integrate_log_bump(logf, rel_tol);
}

bool K_zero_finite(const KernelSpec& ks) { return ks.alpha > 0.5 * ks.d; }

double eval_K_zero(const KernelSpec& ks) {
    if (!K_zero_finite(ks))
        throw std::domain_error("eval_K_zero: kernel diverges at 0 for alpha <= d/2");
    return ks.gamma_const * std::tgamma(ks.alpha - 0.5 * ks.d);
}

double laplacian_K(const KernelSpec& ks, double r) {
    if (!(ks.alpha > 1.0))
        throw std::domain_error("laplacian_K: needs alpha > 1");
    KernelSpec lower = KernelSpec::make(ks.alpha - 1.0, ks.d);
    return eval_K(lower, r) - eval_K(ks, r);
}

double gaussian_expectation_K(const KernelSpec& ks, double sigma, double rel_tol) {
    if (sigma == 0.0) return eval_K_zero(ks);
    const double s = 0.5 * sigma * sigma;
    const double alpha = ks.alpha, d2 = 0.5 * ks.d;
    auto logf = [alpha, d2, s](double y) {
        return alpha * y - std::exp(y) - d2 * std::log(std::exp(y) + s);
    };
    return ks.gamma_const * integrate_log_bump(logf, rel_tol);
}

double gaussian_expectation_lapK(const KernelSpec& ks, double sigma, double rel_tol) {
    if (!(sigma > 0.0))
        throw std::domain_error("gaussian_expectation_lapK: sigma must be > 0");
    const double s = 0.5 * sigma * sigma;
    const double alpha = ks.alpha, d2 = 0.5 * ks.d;
    auto logf = [alpha, d2, s](double y) {
        return alpha * y - std::exp(y) - (d2 + 1.0) * std::log(std::exp(y) + s);
    };
    return -d2 * ks.gamma_const * integrate_log_bump(logf, rel_tol);
}

double kernel_mass(const KernelSpec& ks, double rel_tol) {
    // surface(d) * Int_0^inf K(r) r^{d-1} dr, radial in log coordinates
    const double surface = 2.0 * std::pow(kPi, 0.5 * ks.d) / std::tgamma(0.5 * ks.d);
    auto logf = [&](double x) {
        double r = std::exp(x);
        double K = eval_K(ks, r, 1e-9);
        if (K <= 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(K) + ks.d * x;
    };
    return surface * integrate_log_bump(logf, rel_tol);
}

double semigroup_residual_1d(double alpha, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("semigroup_residual_1d: r must be > 0");
    BesselKernel half(0.5 * alpha, 1), full(alpha, 1);

    // middle segment [0, r]
    double mid = r * integrate_unit_interval(
                         [&](double s) { return half(r * s) * half(r * (1.0 - s)); }, 1e-9);
    // tail y > r (by symmetry of the two factors, equals the y < 0 tail
    // only when the kernels match; compute both explicitly)
    auto tail = [&](double rel_tol) {
        auto logf = [&](double u) {
            double e = std::exp(u);
            double v = half(e) * half(r + e);
            if (v <= 0.0) return -std::numeric_limits<double>::infinity();
            return std::log(v) + u;
        };
        return integrate_log_bump(logf, rel_tol);
    };
    double tails = 2.0 * tail(1e-9);
    double conv = mid + tails;
    return std::fabs(conv - full.exact(r));
}

SemigroupCheck check_semigroup(double alpha, int d, double r, double box, int n_nodes) {
    if (d != 1 && d != 2)
        throw std::invalid_argument("check_semigroup: tensor grid practical for d in {1,2}");
    if (n_nodes < 8) throw std::invalid_argument("check_semigroup: need n_nodes >= 8");
    if (!(r >= 0.0) || !(box > r))
        throw std::invalid_argument("check_semigroup: need 0 <= r < box");
    BesselKernel half(0.5 * alpha, d), full(alpha, d);
    if (r == 0.0 && !K_zero_finite(full.spec()))
        throw std::invalid_argument("check_semigroup: r = 0 needs alpha > d/2");

    // box centred between the two kernel centres 0 and r*e1; midpoint rule
    const double h = 2.0 * box / n_nodes;
    const double y0 = 0.5 * r - box;
    double sum = 0.0;
    if (d == 1) {
        for (int i = 0; i < n_nodes; ++i) {
            double y = y0 + (i + 0.5) * h;
            sum += half(std::fabs(y)) * half(std::fabs(y - r));
        }
        sum *= h;
    } else {
        for (int i = 0; i < n_nodes; ++i) {
            double y1 = y0 + (i + 0.5) * h;
            double row = 0.0;
            for (int j = 0; j < n_nodes; ++j) {
                double y2 = -box + (j + 0.5) * h;
                row += half(std::hypot(y1, y2)) * half(std::hypot(y1 - r, y2));
            }
            sum += row;
        }
        sum *= h * h;
    }

    SemigroupCheck out;
    double ref = r > 0.0 ? full.exact(r) : eval_K_zero(full.spec());
    out.residual = std::fabs(sum - ref) / ref;
    // outside the box both distances exceed box - r/2; bound one factor by
    // monotonicity and integrate the other over all of R^d (mass 1)
    out.tail_estimate = half(box - 0.5 * r);
    out.box_warning = out.tail_estimate > 1e-3 * ref;
    return out;
}

std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 3 || y.size() != n)
        throw std::invalid_argument("pchip_slopes: need >= 3 samples");
    std::vector<double> h(n - 1), delta(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    std::vector<double> slope(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            slope[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // one-sided ends, clamped to keep the end intervals monotone
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) m = 0.0;
        else if (d0 * d1 < 0.0 && std::fabs(m) > 3.0 * std::fabs(d0)) m = 3.0 * d0;
        return m;
    };
    slope[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    slope[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return slope;
}

PchipLogLog::PchipLogLog(std::vector<double> log_x, std::vector<double> log_y)
    : lx_(std::move(log_x)), ly_(std::move(log_y)) {
    slope_ = pchip_slopes(lx_, ly_);
}

double PchipLogLog::x_min() const { return std::exp(lx_.front()); }
double PchipLogLog::x_max() const { return std::exp(lx_.back()); }

double PchipLogLog::operator()(double x) const {
    double t = std::log(x);
    size_t lo = std::upper_bound(lx_.begin(), lx_.end(), t) - lx_.begin();
    if (lo == 0) lo = 1;
    if (lo >= lx_.size()) lo = lx_.size() - 1;
    size_t i = lo - 1;
    double h = lx_[i + 1] - lx_[i];
    double u = (t - lx_[i]) / h;
    double y0 = ly_[i], y1 = ly_[i + 1], m0 = slope_[i] * h, m1 = slope_[i + 1] * h;
    double u2 = u * u, u3 = u2 * u;
    double val = (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
                 (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
    return std::exp(val);
}

BesselKernel::BesselKernel(double alpha, int d) : spec_(KernelSpec::make(alpha, d)) {
    r_min_ = 1e-6;
    r_max_ = 80.0;
    const int n = 1400;
    std::vector<double> lx(n), ly(n);
    const double l0 = std::log(r_min_), l1 = std::log(r_max_);
    for (int i = 0; i < n; ++i) {
        lx[i] = l0 + (l1 - l0) * i / (n - 1);
        double K = eval_K(spec_, std::exp(lx[i]), 1e-11);
        ly[i] = std::log(K);
    }
    k_at_rmin_ = std::exp(ly.front());
    interp_ = PchipLogLog(std::move(lx), std::move(ly));

    // calibrate envelope constants on a log grid in [1e-3, 30]
    const int m = 240;
    double best_lo = std::numeric_limits<double>::infinity();
    double best_up = -std::numeric_limits<double>::infinity();
    const double g0 = std::log(1e-3), g1 = std::log(30.0);
    for (int i = 0; i < m; ++i) {
        double r = std::exp(g0 + (g1 - g0) * i / (m - 1));
        double logK = std::log((*this)(r));
        double log_lo_shape, log_up_shape;
        double p = 2.0 * spec_.alpha - spec_.d;
        switch (spec_.regime) {
            case KernelRegime::subcritical:
                log_lo_shape = p * std::log(r) - 2.0 * r * r;
                log_up_shape = p * std::log(r) - r / 8.0;
                break;
            case KernelRegime::critical:
                log_lo_shape = -2.0 * r * r;
                log_up_shape = std::log1p(std::fabs(std::log(r))) - r / 8.0;
                break;
            default:
                log_lo_shape = -2.0 * r * r;
                log_up_shape = -r / 8.0;
        }
        best_lo = std::min(best_lo, logK - log_lo_shape);
        best_up = std::max(best_up, logK - log_up_shape);
    }
    env_lower_c_ = best_lo - 1e-3;
    env_upper_c_ = best_up + 1e-3;
}

double BesselKernel::operator()(double r) const {
    r = std::fabs(r);
    if (r >= r_max_) return 0.0;
    if (r <= r_min_) {
        double p = 2.0 * spec_.alpha - spec_.d;
        switch (spec_.regime) {
            case KernelRegime::subcritical:
                return k_at_rmin_ * std::pow(r / r_min_, p);
            case KernelRegime::critical:
                return r > 0.0
                           ? k_at_rmin_ * (1.0 + std::fabs(std::log(r))) /
                                 (1.0 + std::fabs(std::log(r_min_)))
                           : std::numeric_limits<double>::infinity();
            default:
                return k_at_rmin_;
        }
    }
    return interp_(r);
}

Envelope BesselKernel::envelope(double r) const {
    double p = 2.0 * spec_.alpha - spec_.d;
    double log_lo_shape, log_up_shape;
    switch (spec_.regime) {
        case KernelRegime::subcritical:
            log_lo_shape = p * std::log(r) - 2.0 * r * r;
            log_up_shape = p * std::log(r) - r / 8.0;
            break;
        case KernelRegime::critical:
            log_lo_shape = -2.0 * r * r;
            log_up_shape = std::log1p(std::fabs(std::log(r))) - r / 8.0;
            break;
        default:
            log_lo_shape = -2.0 * r * r;
            log_up_shape = -r / 8.0;
    }
    Envelope e;
    e.lower = std::exp(env_lower_c_ + log_lo_shape);
    e.upper = std::exp(env_upper_c_ + log_up_shape);
    return e;
}

GaussMoments::GaussMoments(double alpha, int d, double sigma_min, double sigma_max)
    : spec_(KernelSpec::make(alpha, d)), s_min_(sigma_min), s_max_(sigma_max) {
    const int n = 900;
    std::vector<double> lx(n), lm(n), lu(n);
    const double l0 = std::log(s_min_), l1 = std::log(s_max_);
    for (int i = 0; i < n; ++i) {
        lx[i] = l0 + (l1 - l0) * i / (n - 1);
        double sig = std::exp(lx[i]);
        double mv = gaussian_expectation_K(spec_, sig, 1e-11);
        double wv = gaussian_expectation_lapK(spec_, sig, 1e-11);
        lm[i] = std::log(mv);
        lu[i] = std::log(mv - wv); // w < 0, so this is a sum of positives
    }
    std::vector<double> lx2 = lx;
    m_interp_ = PchipLogLog(std::move(lx), std::move(lm));
    u_interp_ = PchipLogLog(std::move(lx2), std::move(lu));
}

double GaussMoments::m(double sigma) const {
    if (sigma < s_min_ || sigma > s_max_) return exact_m(sigma);
    return m_interp_(sigma);
}

double GaussMoments::w(double sigma) const {
    if (sigma < s_min_ || sigma > s_max_) return exact_w(sigma);
    return m_interp_(sigma) - u_interp_(sigma);
}

} // namespace fbc
