#include "fbc/vortex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fbc/kernel.hpp"

namespace fbc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;

double lerp_profile(const std::vector<double>& q_nodes, const std::vector<double>& profile,
                    double q) {
    if (q <= q_nodes.front()) return profile.front();
    if (q >= q_nodes.back()) return 0.0;
    auto it = std::upper_bound(q_nodes.begin(), q_nodes.end(), q);
    size_t i = size_t(it - q_nodes.begin()) - 1;
    double t = (q - q_nodes[i]) / (q_nodes[i + 1] - q_nodes[i]);
    return (1.0 - t) * profile[i] + t * profile[i + 1];
}

// j0(z) - j1(z)/z and j2(z) = 3 j1(z)/z - j0(z), series-switched near 0
double sphere_iso(double z) {
    if (z < 0.1) {
        double z2 = z * z;
        return 2.0 / 3.0 + z2 * (-2.0 / 15.0 + z2 * (1.0 / 140.0 - z2 / 5670.0));
    }
    double s = std::sin(z), c = std::cos(z);
    return s / z - (s - z * c) / (z * z * z);
}

double sphere_aniso(double z) {
    if (z < 0.1) {
        double z2 = z * z;
        return z2 * (1.0 / 15.0 + z2 * (-1.0 / 210.0 + z2 / 7560.0));
    }
    double s = std::sin(z), c = std::cos(z);
    return 3.0 * (s - z * c) / (z * z * z) - s / z;
}

} // namespace

double SpectralMeasure::rho_hat(double q) const {
    switch (kind) {
        case Kind::gaussian:
            return mass * std::exp(-0.5 * sigma1 * sigma1 * q * q);
        case Kind::dipole:
            return std::exp(-0.5 * sigma1 * sigma1 * q * q) -
                   std::exp(-0.5 * sigma2 * sigma2 * q * q);
        case Kind::tabulated:
            return lerp_profile(q_nodes, profile, q);
    }
    return 0.0;
}

double SpectralMeasure::rho_hat_sq(double q) const {
    double v = rho_hat(q);
    return v * v;
}

SpectralMeasure SpectralMeasure::gaussian_measure(double sigma, double mass) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_measure: sigma must be > 0");
    SpectralMeasure sm;
    sm.kind = Kind::gaussian;
    sm.sigma1 = sigma;
    sm.mass = mass;
    sm.total_variation = std::fabs(mass);
    sm.has_asymptotes = true;
    sm.origin_exponent = 0.0;
    sm.decays_fast = true;
    return sm;
}

SpectralMeasure SpectralMeasure::dipole_measure(double sigma1, double sigma2) {
    if (!(sigma1 > 0.0 && sigma2 > 0.0) || sigma1 == sigma2)
        throw std::invalid_argument("dipole_measure: need distinct positive widths");
    SpectralMeasure sm;
    sm.kind = Kind::dipole;
    sm.sigma1 = sigma1;
    sm.sigma2 = sigma2;
    sm.mass = 0.0; // equal and opposite charge
    sm.total_variation = 2.0;
    sm.has_asymptotes = true;
    sm.origin_exponent = 2.0; // rho_hat ~ (sigma2^2 - sigma1^2) q^2 / 2
    sm.decays_fast = true;
    return sm;
}

SpectralMeasure SpectralMeasure::tabulated_measure(std::vector<double> q_nodes,
                                                   std::vector<double> profile) {
    if (q_nodes.size() < 2 || q_nodes.size() != profile.size())
        throw std::invalid_argument("tabulated_measure: need matching arrays, >= 2 nodes");
    for (size_t i = 0; i + 1 < q_nodes.size(); ++i)
        if (!(q_nodes[i] < q_nodes[i + 1]))
            throw std::invalid_argument("tabulated_measure: q nodes must be ascending");
    if (q_nodes.front() < 0.0)
        throw std::invalid_argument("tabulated_measure: q nodes must be >= 0");
    SpectralMeasure sm;
    sm.kind = Kind::tabulated;
    sm.q_nodes = std::move(q_nodes);
    sm.profile = std::move(profile);
    sm.mass = sm.profile.front();
    sm.total_variation = 0.0;
    for (double v : sm.profile)
        sm.total_variation = std::max(sm.total_variation, std::fabs(v));
    sm.has_asymptotes = false;
    return sm;
}

std::array<double, 9> fourier_kernel_matrix(const SpectralMeasure& sm,
                                            const std::array<double, 3>& q) {
    double q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    if (!(q2 > 0.0))
        throw std::invalid_argument("fourier_kernel_matrix: q must be nonzero");
    double f = sm.rho_hat_sq(std::sqrt(q2)) / q2;
    std::array<double, 9> out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out[3 * i + j] = f * ((i == j ? 1.0 : 0.0) - q[i] * q[j] / q2);
    return out;
}

double fourier_kernel_trace(const SpectralMeasure& sm, double q_norm) {
    if (!(q_norm > 0.0))
        throw std::invalid_argument("fourier_kernel_trace: q must be nonzero");
    return 2.0 * sm.rho_hat_sq(q_norm) / (q_norm * q_norm);
}

std::array<double, 3> biot_savart(const std::array<double, 3>& x) {
    double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    if (!(r2 > 0.0)) throw std::invalid_argument("biot_savart: singular at x = 0");
    double f = 1.0 / (4.0 * kPi * r2 * std::sqrt(r2));
    return {f * x[0], f * x[1], f * x[2]};
}

namespace {

// log-axis trapezoid of f(y) = integrand(e^y) e^y over the window where it
// is non-negligible; the integrand must be continuous and eventually tiny
double integrate_radial(const SpectralMeasure& sm, double power) {
    auto f = [&](double y) {
        double r = std::exp(y);
        return sm.rho_hat_sq(r) * std::pow(r, power + 1.0);
    };
    double y_lo = std::log(1e-9), y_hi = std::log(1e4);
    if (sm.kind == SpectralMeasure::Kind::tabulated)
        y_hi = std::log(sm.q_nodes.back());
    // locate the peak, then trim the window to where f matters
    int scan_n = 800;
    double peak = 0.0;
    for (int i = 0; i <= scan_n; ++i) {
        double y = y_lo + (y_hi - y_lo) * i / scan_n;
        peak = std::max(peak, f(y));
    }
    if (peak <= 0.0) return 0.0;
    double cut = peak * 1e-22;
    double a = y_lo, b = y_hi;
    for (int i = 0; i <= scan_n; ++i) {
        double y = y_lo + (y_hi - y_lo) * i / scan_n;
        if (f(y) > cut) { a = y; break; }
    }
    for (int i = scan_n; i >= 0; --i) {
        double y = y_lo + (y_hi - y_lo) * i / scan_n;
        if (f(y) > cut) { b = y; break; }
    }
    a = std::max(y_lo, a - (y_hi - y_lo) / scan_n);
    b = std::min(y_hi, b + (y_hi - y_lo) / scan_n);
    int n = 512;
    double prev = 0.0;
    for (int pass = 0; pass < 12; ++pass, n *= 2) {
        double hstep = (b - a) / n;
        double s = 0.5 * (f(a) + f(b));
        for (int i = 1; i < n; ++i) s += f(a + i * hstep);
        s *= hstep;
        if (pass > 0 && std::fabs(s - prev) <= 1e-10 * std::fabs(s)) return s;
        prev = s;
    }
    return prev;
}

} // namespace

ConditionsReport check_conditions(const SpectralMeasure& sm, double H, double alpha) {
    if (!(H > 0.25 && H < 1.0))
        throw std::invalid_argument("check_conditions: H must lie in (1/4, 1)");
    ConditionsReport rep;
    if (sm.kind == SpectralMeasure::Kind::tabulated && !sm.has_asymptotes) {
        rep.decidable = false;
        rep.sobolev_witness =
            "tabulated profile carries no origin/decay asymptotes; finiteness undecidable";
        return rep;
    }
    double p = sm.origin_exponent;
    rep.sobolev_holds = (p >= 1.0) && sm.decays_fast;

    // witness: scan the weighted profile on a log grid
    double sup = 0.0, sup_q = 0.0;
    for (int i = 0; i <= 400; ++i) {
        double q = std::exp(std::log(1e-8) + (std::log(1e6) - std::log(1e-8)) * i / 400.0);
        double w = std::fabs(sm.rho_hat(q)) / q * std::pow(1.0 + q * q, 0.5 * alpha);
        if (w > sup) { sup = w; sup_q = q; }
    }
    std::ostringstream os;
    if (rep.sobolev_holds) {
        os << "bounded; scan sup " << sup << " at q = " << sup_q;
    } else if (p < 1.0) {
        os << "diverges at the origin (profile ~ q^" << p
           << ", weight ~ q^" << (p - 1.0) << "); scan sup " << sup << " at q = " << sup_q;
    } else {
        os << "insufficient decay at infinity; scan sup " << sup << " at q = " << sup_q;
    }
    rep.sobolev_witness = os.str();

    // radial spectral integral 4 pi Int |rho_hat|^2 q^{1/H - 2} dq; the
    // origin is integrable iff 2 p + 1/H - 2 > -1
    rep.spectral_finite = (2.0 * p + 1.0 / H - 2.0 > -1.0) && sm.decays_fast;
    if (rep.spectral_finite)
        rep.spectral_value = 4.0 * kPi * integrate_radial(sm, 1.0 / H - 2.0);
    else
        rep.spectral_value = std::numeric_limits<double>::infinity();
    return rep;
}

namespace {

double gaussian_flux_profile(double sigma, double mass, double r) {
    if (r == 0.0) return 0.0;
    double u = r / (std::sqrt(2.0) * sigma);
    double q;
    if (u < 1e-2) {
        double u2 = u * u;
        q = (2.0 / kSqrtPi) * u * u2 * (2.0 / 3.0 + u2 * (-2.0 / 5.0 + u2 / 7.0));
    } else {
        q = std::erf(u) - (2.0 / kSqrtPi) * u * std::exp(-u * u);
    }
    return mass * q / (4.0 * kPi * r * r);
}

} // namespace

double coulomb_field_profile(const SpectralMeasure& sm, double r) {
    if (r < 0.0) throw std::invalid_argument("coulomb_field_profile: r must be >= 0");
    switch (sm.kind) {
        case SpectralMeasure::Kind::gaussian:
            return gaussian_flux_profile(sm.sigma1, sm.mass, r);
        case SpectralMeasure::Kind::dipole:
            return gaussian_flux_profile(sm.sigma1, 1.0, r) -
                   gaussian_flux_profile(sm.sigma2, 1.0, r);
        case SpectralMeasure::Kind::tabulated:
            throw std::invalid_argument(
                "coulomb_field_profile: tabulated measures are not supported here");
    }
    return 0.0;
}

std::array<double, 3> velocity_at(const CurrentPath& cp, const SpectralMeasure& sm,
                                  Scheme kind, const std::array<double, 3>& x) {
    if (cp.grid.d != 3)
        throw std::invalid_argument("velocity_at: requires d = 3");
    int n = cp.grid.n_cells;
    std::array<double, 3> u{0.0, 0.0, 0.0};
    std::vector<double> dv(3);
    for (int j = 0; j <= n; ++j) {
        current_derivative(cp, kind, j, dv.data());
        double y0 = x[0] - cp.node(j, 0);
        double y1 = x[1] - cp.node(j, 1);
        double y2 = x[2] - cp.node(j, 2);
        double r = std::sqrt(y0 * y0 + y1 * y1 + y2 * y2);
        if (r < 1e-12) continue; // field profile vanishes linearly at 0
        double f = cp.weight(j) * coulomb_field_profile(sm, r) / r;
        u[0] += f * (y1 * dv[2] - y2 * dv[1]);
        u[1] += f * (y2 * dv[0] - y0 * dv[2]);
        u[2] += f * (y0 * dv[1] - y1 * dv[0]);
    }
    return u;
}

VelocityField velocity_field(const CurrentPath& cp, const SpectralMeasure& sm,
                             Scheme kind, const SpatialGrid& grid, int threads) {
    if (grid.dim() != 3 || cp.grid.d != 3)
        throw std::invalid_argument("velocity_field: requires d = 3");
    if (sm.kind == SpectralMeasure::Kind::tabulated)
        throw std::invalid_argument("velocity_field: tabulated measures are not supported here");
    int n_nodes = cp.grid.n_cells + 1;
    double core = sm.kind == SpectralMeasure::Kind::dipole ? std::max(sm.sigma1, sm.sigma2)
                                                           : sm.sigma1;
    double margin = 2.0 * core;
    std::array<double, 3> centroid{0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a) {
        double lo = 0.0, hi = 0.0;
        for (int j = 0; j < n_nodes; ++j) {
            double v = cp.node(j, a);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            centroid[a] += v;
        }
        centroid[a] /= n_nodes;
        if (grid.lo[a] > lo - margin || grid.hi[a] < hi + margin) {
            std::ostringstream os;
            os << "velocity_field: box too small on axis " << a << "; need ["
               << lo - margin << ", " << hi + margin << "]";
            throw std::invalid_argument(os.str());
        }
    }

    VelocityField out;
    out.grid = grid;
    size_t total = grid.n_total();
    out.values.assign(3 * total, 0.0);
    std::vector<double> step(3), norms(total, 0.0);
    for (int a = 0; a < 3; ++a)
        step[a] = (grid.hi[a] - grid.lo[a]) / (grid.n[a] - 1);

    parallel_for(int(total), threads, [&](int node) {
        size_t idx = size_t(node);
        size_t rem = idx;
        std::array<double, 3> x;
        std::array<size_t, 3> sub;
        for (int a = 2; a >= 0; --a) {
            sub[a] = rem % grid.n[a];
            rem /= grid.n[a];
            x[a] = grid.lo[a] + sub[a] * step[a];
        }
        auto u = velocity_at(cp, sm, kind, x);
        out.values[3 * idx + 0] = u[0];
        out.values[3 * idx + 1] = u[1];
        out.values[3 * idx + 2] = u[2];
        norms[idx] = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    });

    double energy = 0.0, tail = 0.0;
    for (size_t idx = 0; idx < total; ++idx) {
        size_t rem = idx;
        double wt = 1.0;
        int face_axis = -1;
        std::array<size_t, 3> sub;
        for (int a = 2; a >= 0; --a) {
            sub[a] = rem % grid.n[a];
            rem /= grid.n[a];
            bool edge = sub[a] == 0 || sub[a] + 1 == size_t(grid.n[a]);
            wt *= edge ? 0.5 * step[a] : step[a];
            if (edge && face_axis < 0) face_axis = a;
        }
        energy += wt * norms[idx];
        if (face_axis >= 0) {
            // |u| ~ r^{-2} beyond the box: integral of |u|^2 along the
            // outward ray is |u_face|^2 * dist / 3
            double coord = grid.lo[face_axis] + sub[face_axis] * step[face_axis];
            double dist = std::fabs(coord - centroid[face_axis]);
            double facew = wt / (0.5 * step[face_axis]);
            tail += facew * norms[idx] * dist / 3.0;
        }
    }
    out.energy = energy;
    out.tail_estimate = tail;
    return out;
}

GKernel::GKernel(const SpectralMeasure& sm, double r_max) : sm_(sm) {
    if (!(r_max > 1.0)) throw std::invalid_argument("GKernel: r_max must exceed 1");
    double q_max;
    switch (sm.kind) {
        case SpectralMeasure::Kind::gaussian:
            q_max = 9.0 / sm.sigma1;
            break;
        case SpectralMeasure::Kind::dipole:
            q_max = 9.0 / std::min(sm.sigma1, sm.sigma2);
            break;
        case SpectralMeasure::Kind::tabulated:
            q_max = sm.q_nodes.back();
            break;
        default:
            throw std::invalid_argument("GKernel: unknown measure kind");
    }
    const int n_q = 4096;
    std::vector<double> qs(n_q + 1), fq(n_q + 1);
    double dq = q_max / n_q;
    for (int i = 0; i <= n_q; ++i) {
        qs[i] = i * dq;
        fq[i] = sm.rho_hat_sq(qs[i]);
    }
    auto q_weight = [&](int i) { return (i == 0 || i == n_q) ? 0.5 * dq : dq; };

    double mass2 = 0.0;
    for (int i = 0; i <= n_q; ++i) mass2 += q_weight(i) * fq[i];
    g0_ = mass2 / (3.0 * kPi * kPi);

    r_min_ = 1e-3;
    r_max_ = r_max;
    const int n_r = 1600;
    lr_.resize(n_r + 1);
    gi_.resize(n_r + 1);
    gx_.resize(n_r + 1);
    double l0 = std::log(r_min_), l1 = std::log(r_max_);
    const double norm = 1.0 / (2.0 * kPi * kPi);
    for (int k = 0; k <= n_r; ++k) {
        lr_[k] = l0 + (l1 - l0) * k / n_r;
        double r = std::exp(lr_[k]);
        double si = 0.0, sx = 0.0;
        for (int i = 0; i <= n_q; ++i) {
            double z = qs[i] * r;
            double w = q_weight(i) * fq[i];
            si += w * sphere_iso(z);
            sx += w * sphere_aniso(z);
        }
        gi_[k] = norm * si;
        gx_[k] = norm * sx;
    }
    gi_slope_ = pchip_slopes(lr_, gi_);
    gx_slope_ = pchip_slopes(lr_, gx_);
    far_ci_ = gi_.back() * r_max_;
    far_cx_ = gx_.back() * r_max_;
}

double GKernel::eval(const std::vector<double>& ys, const std::vector<double>& slopes,
                     double r, double far_c) const {
    if (r <= r_min_) return ys.front();
    if (r >= r_max_) return far_c / r;
    double t = std::log(r);
    size_t lo = std::upper_bound(lr_.begin(), lr_.end(), t) - lr_.begin();
    if (lo == 0) lo = 1;
    if (lo >= lr_.size()) lo = lr_.size() - 1;
    size_t i = lo - 1;
    double h = lr_[i + 1] - lr_[i];
    double u = (t - lr_[i]) / h;
    double m0 = slopes[i] * h, m1 = slopes[i + 1] * h;
    double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * ys[i] + (u3 - 2 * u2 + u) * m0 +
           (-2 * u3 + 3 * u2) * ys[i + 1] + (u3 - u2) * m1;
}

double GKernel::gI(double r) const { return eval(gi_, gi_slope_, r, far_ci_); }
double GKernel::gX(double r) const { return eval(gx_, gx_slope_, r, far_cx_); }

double GKernel::energy_double_sum(const CurrentPath& cp, Scheme kind) const {
    if (cp.grid.d != 3)
        throw std::invalid_argument("energy_double_sum: requires d = 3");
    int n = cp.grid.n_cells;
    std::vector<double> derivs = current_derivatives(cp, kind);
    double total = 0.0;
    for (int j = 0; j <= n; ++j) {
        double wj = cp.weight(j);
        const double* dj = &derivs[3 * j];
        for (int k = j; k <= n; ++k) {
            double ww = ((j == k) ? 1.0 : 2.0) * wj * cp.weight(k);
            const double* dk = &derivs[3 * k];
            // staggered argument on the diagonal, matching the exact atoms
            int a = (j == k) ? 2 * j + 1 : 2 * j;
            int b = (j == k) ? 2 * j : 2 * k;
            double x0 = cp.path.at(a, 0) - cp.path.at(b, 0);
            double x1 = cp.path.at(a, 1) - cp.path.at(b, 1);
            double x2 = cp.path.at(a, 2) - cp.path.at(b, 2);
            double r = std::sqrt(x0 * x0 + x1 * x1 + x2 * x2);
            double dot = dj[0] * dk[0] + dj[1] * dk[1] + dj[2] * dk[2];
            if (r < 1e-300) {
                total += ww * g0_ * dot;
                continue;
            }
            double pj = (x0 * dj[0] + x1 * dj[1] + x2 * dj[2]) / r;
            double pk = (x0 * dk[0] + x1 * dk[1] + x2 * dk[2]) / r;
            total += ww * (gI(r) * dot + gX(r) * pj * pk);
        }
    }
    return total;
}

double trace_g_expectation(const SpectralMeasure& sm, double v) {
    if (v < 0.0) throw std::invalid_argument("trace_g_expectation: v must be >= 0");
    const double c = kSqrtPi / (2.0 * kPi * kPi);
    double s1 = sm.sigma1 * sm.sigma1, s2 = sm.sigma2 * sm.sigma2;
    switch (sm.kind) {
        case SpectralMeasure::Kind::gaussian:
            return c * sm.mass * sm.mass / std::sqrt(s1 + 0.5 * v);
        case SpectralMeasure::Kind::dipole:
            return c * (1.0 / std::sqrt(s1 + 0.5 * v) -
                        2.0 / std::sqrt(0.5 * (s1 + s2) + 0.5 * v) +
                        1.0 / std::sqrt(s2 + 0.5 * v));
        case SpectralMeasure::Kind::tabulated: {
            double s = 0.0;
            for (size_t i = 0; i + 1 < sm.q_nodes.size(); ++i) {
                double qa = sm.q_nodes[i], qb = sm.q_nodes[i + 1];
                double fa = sm.profile[i] * sm.profile[i] * std::exp(-0.5 * qa * qa * v);
                double fb = sm.profile[i + 1] * sm.profile[i + 1] * std::exp(-0.5 * qb * qb * v);
                s += 0.5 * (fa + fb) * (qb - qa);
            }
            return s / (kPi * kPi);
        }
    }
    return 0.0;
}

ExactEnergy expected_energy_exact(const CurrentGridSpec& grid, const SpectralMeasure& sm,
                                  Scheme kind) {
    if (grid.d != 3)
        throw std::invalid_argument("expected_energy_exact: requires d = 3");
    int n = grid.n_cells, m = grid.eps_steps;
    double h = grid.h(), eps = grid.eps, H = grid.H;
    bool symmetric = kind == Scheme::symmetric;

    // cells are c_jk S(var_jk); only the coupling-free trace term survives
    // because the columns of g are divergence-free
    double var_d = std::pow(0.5 * h, 2.0 * H);
    double t0 = m * h;
    double diag_cell;
    {
        auto atoms = cell_atoms(kind, H, t0, t0, t0 + 0.5 * h, t0, eps);
        diag_cell = atoms.c * trace_g_expectation(sm, var_d);
    }
    std::vector<double> cell(n + 1, 0.0);
    for (int delta = 1; delta <= n; ++delta) {
        double s = t0 + delta * h;
        auto atoms = cell_atoms(kind, H, t0, s, t0, s, eps);
        cell[delta] = atoms.c * trace_g_expectation(sm, std::pow(delta * h, 2.0 * H));
    }

    double total = 0.0, strip = 0.0;
    for (int j = 0; j <= n; ++j) {
        double wj = (j == 0 || j == n) ? 0.5 * h : h;
        double tj = j * h;
        for (int k = j; k <= n; ++k) {
            double ww = ((j == k) ? 1.0 : 2.0) * wj * ((k == 0 || k == n) ? 0.5 * h : h);
            bool clamped = symmetric && j < m;
            double v;
            if (!clamped) {
                v = (j == k) ? diag_cell : cell[k - j];
            } else {
                double tk = k * h;
                double p = (j == k) ? tj + 0.5 * h : tj;
                double q = (j == k) ? tj : tk;
                auto atoms = cell_atoms(kind, H, tj, tk, p, q, eps);
                double var = (j == k) ? var_d : std::pow((k - j) * h, 2.0 * H);
                v = atoms.c * trace_g_expectation(sm, var);
            }
            total += ww * v;
            if (clamped) strip += ww * v;
        }
    }
    ExactEnergy out;
    out.value = total;
    out.boundary_share = std::fabs(strip) / std::max(std::fabs(total), 1e-300);
    return out;
}

McEnergy mc_energy(const CurrentGridSpec& grid, const SpectralMeasure& sm, Scheme kind,
                   const GKernel& gk, int n_replicas, uint64_t seed, int threads) {
    (void)sm;
    if (n_replicas < 30)
        throw std::invalid_argument("mc_energy: need at least 30 replicas");
    McEnergy out;
    out.values.assign(n_replicas, 0.0);
    parallel_for(n_replicas, threads, [&](int r) {
        auto cp = sample_current_path(grid, derive_seed(seed, uint64_t(r)));
        out.values[r] = gk.energy_double_sum(cp, kind);
    });
    out.stats = summarize(out.values);
    return out;
}

} // namespace fbc
