#include "fbc/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace fbc {

namespace {

struct Stencil {
    double hi = 0.0, lo = 0.0; // X_hi - X_lo, divided by den
    double den = 1.0;
    bool clamped = false;
};

Stencil stencil_at(Scheme kind, double t, double eps) {
    Stencil st;
    if (kind == Scheme::symmetric) {
        st.hi = t + eps;
        st.lo = t - eps;
        st.den = 2.0 * eps;
        if (st.lo < 0.0) {
            st.lo = 0.0;
            st.clamped = true;
        }
    } else {
        st.hi = t + eps;
        st.lo = t;
        st.den = eps;
    }
    return st;
}

} // namespace

CovarianceAtoms cov_exact(Scheme kind, double H, double t, double s, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("cov_exact: eps must be > 0");
    if (t < 0.0 || s < 0.0) throw std::invalid_argument("cov_exact: times must be >= 0");
    CovarianceAtoms a;
    a.H = H;
    a.eps = eps;
    a.tau = std::fabs(t - s);
    a.kind = kind;
    Stencil yt = stencil_at(kind, t, eps), ys = stencil_at(kind, s, eps);
    a.boundary = yt.clamped || ys.clamped;
    a.c = fbm_cov_increments(yt.hi, yt.lo, ys.hi, ys.lo, H) / (yt.den * ys.den);
    a.b_t = fbm_cov_increments(yt.hi, yt.lo, t, s, H) / yt.den;
    a.b_s = fbm_cov_increments(ys.hi, ys.lo, t, s, H) / ys.den;
    return a;
}

CellAtoms cell_atoms(Scheme kind, double H, double t, double s, double p, double q,
                     double eps) {
    CellAtoms a;
    Stencil yt = stencil_at(kind, t, eps), ys = stencil_at(kind, s, eps);
    a.boundary = yt.clamped || ys.clamped;
    a.c = fbm_cov_increments(yt.hi, yt.lo, ys.hi, ys.lo, H) / (yt.den * ys.den);
    a.b_t = fbm_cov_increments(yt.hi, yt.lo, p, q, H) / yt.den;
    a.b_s = fbm_cov_increments(ys.hi, ys.lo, p, q, H) / ys.den;
    a.sigma = std::pow(std::fabs(p - q), H);
    return a;
}

PhiPsi phi_psi_reference(double H, double x) {
    if (x == 0.0) throw std::invalid_argument("phi_psi_reference: x must be nonzero");
    PhiPsi out;
    double up = std::pow(std::fabs(1.0 + x), 2 * H);
    double um = std::pow(std::fabs(1.0 - x), 2 * H);
    out.Phi = (up + um - 2.0) / (x * x);
    out.psi = (up - um) / (2.0 * x);
    out.psi_tilde = (std::pow(std::fabs(x), 2 * H) + 1.0 - std::pow(std::fabs(1.0 - x), 2 * H)) /
                    (2.0 * x);
    return out;
}

double phi_limit_measured(double H) {
    // Richardson on Phi(x) at x -> 0 (two geometric levels kill the x^2 term)
    double x1 = 1e-3, x2 = 5e-4;
    double p1 = phi_psi_reference(H, x1).Phi;
    double p2 = phi_psi_reference(H, x2).Phi;
    return (4.0 * p2 - p1) / 3.0;
}

double phi_limit_quoted(double H) { return 2.0 * H - 1.0; }

ReferenceAtoms reference_atoms(Scheme kind, double H, double tau, double eps) {
    if (!(tau > 0.0)) throw std::invalid_argument("reference_atoms: tau must be > 0");
    ReferenceAtoms out;
    double x = eps / tau;
    double scale_c = 0.5 * std::pow(tau, 2 * H - 2);
    double scale_b = 0.5 * std::pow(tau, 2 * H - 1);
    if (kind == Scheme::symmetric) {
        out.c_ref = scale_c * phi_psi_reference(H, 2.0 * x).Phi;
        out.b_ref = scale_b * phi_psi_reference(H, x).psi;
    } else {
        out.c_ref = scale_c * phi_psi_reference(H, x).Phi;
        out.b_ref = scale_b * phi_psi_reference(H, x).psi_tilde;
    }
    return out;
}

double alpha_H(double H, int d) { return 0.5 * d - 1.0 + 0.5 / H; }

double condition_B_threshold(double H, int d) {
    return std::max(0.0, 0.5 * d - 0.5 / H);
}

double moment_N(double gamma, int d) {
    if (gamma <= -double(d))
        throw std::domain_error("moment_N: divergent for gamma <= -d");
    return std::pow(2.0, 0.5 * gamma) * std::tgamma(0.5 * (d + gamma)) /
           std::tgamma(0.5 * d);
}

} // namespace fbc
