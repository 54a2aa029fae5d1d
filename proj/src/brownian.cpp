#include "fbc/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fbc {

namespace {

double surface_area(int d) {
    // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
    return 2.0 * std::pow(3.14159265358979323846, 0.5 * d) / std::tgamma(0.5 * d);
}

double norm_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

TailDiag tail_diagnostics(const std::vector<double>& values) {
    TailDiag diag;
    if (values.empty()) return diag;
    std::vector<double> mag(values.size());
    for (size_t i = 0; i < values.size(); ++i) mag[i] = std::fabs(values[i]);
    std::sort(mag.begin(), mag.end(), std::greater<double>());
    double total = std::accumulate(mag.begin(), mag.end(), 0.0);
    size_t top = std::max<size_t>(1, mag.size() / 100);
    double head = std::accumulate(mag.begin(), mag.begin() + top, 0.0);
    diag.top1_share = total > 0.0 ? head / total : 0.0;
    MCStats st = summarize(values);
    diag.rel_stderr = std::fabs(st.mean) > 0.0 ? st.stderror / std::fabs(st.mean) : 0.0;
    diag.heavy = diag.top1_share > 0.5 || diag.rel_stderr > 0.5;
    return diag;
}

BesselMomentReport bessel_moment_estimates(const BesselMomentCase& c, int threads) {
    if (c.d < 2) throw std::invalid_argument("bessel_moment_estimates: d must be >= 2");
    if (!(c.q > 1.0)) throw std::invalid_argument("bessel_moment_estimates: q must be > 1");
    if (!(c.T > 0.0)) throw std::invalid_argument("bessel_moment_estimates: T must be > 0");
    if (int(c.x.size()) != c.d)
        throw std::invalid_argument("bessel_moment_estimates: x must have d components");
    if (c.n_paths < 2 || c.n_steps < 2)
        throw std::invalid_argument("bessel_moment_estimates: need n_paths, n_steps >= 2");

    const double lhs_exp = 2.0 * (c.theta - 1.0);
    const double time_exp = (c.theta - 2.0) * c.q;
    const double end_exp = c.theta * c.q;
    const double dt = c.T / c.n_steps;
    const double sdt = std::sqrt(dt);

    std::vector<double> lhs_vals(c.n_paths), end_vals(c.n_paths), time_vals(c.n_paths);
    parallel_for(c.n_paths, threads, [&](int r) {
        Rng rng(derive_seed(c.seed, uint64_t(r)));
        std::vector<double> w(c.x);
        double rad = norm_of(w);
        double f_lhs = std::pow(rad, lhs_exp);
        double f_time = std::pow(rad, time_exp);
        double acc_lhs = 0.5 * f_lhs, acc_time = 0.5 * f_time;
        for (int i = 1; i <= c.n_steps; ++i) {
            for (int a = 0; a < c.d; ++a) w[a] += sdt * rng.gaussian();
            rad = norm_of(w);
            f_lhs = std::pow(rad, lhs_exp);
            f_time = std::pow(rad, time_exp);
            double edge = (i == c.n_steps) ? 0.5 : 1.0;
            acc_lhs += edge * f_lhs;
            acc_time += edge * f_time;
        }
        lhs_vals[r] = std::pow(acc_lhs * dt, 0.5 * c.q);
        time_vals[r] = acc_time * dt;
        end_vals[r] = std::pow(rad, end_exp);
    });

    BesselMomentReport rep;
    rep.lhs = summarize(lhs_vals);
    rep.lhs_tail = tail_diagnostics(lhs_vals);
    rep.rhs_end = summarize(end_vals);
    rep.rhs_start = std::pow(norm_of(c.x), end_exp);
    rep.rhs_time = summarize(time_vals);
    rep.rhs_time_tail = tail_diagnostics(time_vals);
    double denom = rep.rhs_end.mean + rep.rhs_start + rep.rhs_time.mean;
    rep.ratio = denom > 0.0 ? rep.lhs.mean / denom : 0.0;
    rep.unreliable = rep.lhs_tail.heavy || rep.rhs_time_tail.heavy;
    return rep;
}

OccupationReport occupation_integral_estimate(int d, double alpha, double p_prime,
                                              double eps_decay, int n_paths,
                                              uint64_t seed, int threads) {
    if (d < 2) throw std::invalid_argument("occupation_integral_estimate: d must be >= 2");
    if (!(alpha > 1.0)) throw std::invalid_argument("occupation_integral_estimate: alpha must be > 1");
    if (!(p_prime > 1.0)) throw std::invalid_argument("occupation_integral_estimate: p' must be > 1");
    if (!(eps_decay > 0.0)) throw std::invalid_argument("occupation_integral_estimate: eps must be > 0");
    if (n_paths < 2) throw std::invalid_argument("occupation_integral_estimate: need n_paths >= 2");

    const double lambda = eps_decay * p_prime / 4.0;
    const double log_norm =
        d * std::log(lambda) - std::lgamma(double(d)) - std::log(surface_area(d));
    const int n_t = 256;
    const double dt = 1.0 / n_t;
    const double sdt = std::sqrt(dt);
    const double kernel_exp = 2.0 * alpha - 2.0 * d;

    std::vector<double> vals(n_paths);
    parallel_for(n_paths, threads, [&](int r) {
        Rng rng(derive_seed(seed, uint64_t(r)));
        // radius ~ Gamma(d, 1/lambda) via sum of exponentials, then a
        // uniform direction; pdf(x) = lambda^d e^{-lambda r} / (Gamma(d) S)
        double rad = 0.0;
        for (int i = 0; i < d; ++i) rad += -std::log(rng.uniform()) / lambda;
        std::vector<double> x(d), dir(d);
        double g2 = 0.0;
        for (int a = 0; a < d; ++a) {
            dir[a] = rng.gaussian();
            g2 += dir[a] * dir[a];
        }
        double gn = std::sqrt(std::max(g2, 1e-300));
        for (int a = 0; a < d; ++a) x[a] = rad * dir[a] / gn;

        std::vector<double> w(d, 0.0);
        auto integrand = [&]() {
            double s = 0.0;
            for (int a = 0; a < d; ++a) {
                double diff = x[a] - w[a];
                s += diff * diff;
            }
            double dist = std::sqrt(std::max(s, 1e-300));
            return std::exp(-eps_decay * dist) * std::pow(dist, kernel_exp);
        };
        double acc = 0.5 * integrand();
        for (int i = 1; i <= n_t; ++i) {
            for (int a = 0; a < d; ++a) w[a] += sdt * rng.gaussian();
            acc += ((i == n_t) ? 0.5 : 1.0) * integrand();
        }
        double inner = std::pow(acc * dt, 0.5 * p_prime);
        // the Gamma radial density spread over the sphere of area S r^{d-1}
        // cancels its own r^{d-1} factor, leaving a pure exponential
        vals[r] = inner / std::exp(log_norm - lambda * rad);
    });

    OccupationReport rep;
    rep.stats = summarize(vals);
    rep.tail = tail_diagnostics(vals);
    rep.condition_holds = (double(d) - alpha + 1.0) * p_prime < double(d);
    if (!rep.condition_holds)
        rep.note = "theory predicts possible divergence for these (d, alpha, p')";
    return rep;
}

std::vector<ExceedanceRow> max_exceedance_check(int d, double T,
                                                const std::vector<double>& radii,
                                                int n_paths, int n_steps, uint64_t seed,
                                                int threads) {
    if (d < 1 || n_paths < 2 || n_steps < 1)
        throw std::invalid_argument("max_exceedance_check: bad sampling parameters");
    if (!(T > 0.0)) throw std::invalid_argument("max_exceedance_check: T must be > 0");
    std::vector<double> maxima(n_paths, 0.0);
    const double sdt = std::sqrt(T / n_steps);
    parallel_for(n_paths, threads, [&](int r) {
        Rng rng(derive_seed(seed, uint64_t(r)));
        std::vector<double> w(d, 0.0);
        double best = 0.0;
        for (int i = 1; i <= n_steps; ++i) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) {
                w[a] += sdt * rng.gaussian();
                s += w[a] * w[a];
            }
            best = std::max(best, s);
        }
        maxima[r] = std::sqrt(best);
    });

    std::vector<ExceedanceRow> rows;
    rows.reserve(radii.size());
    for (double radius : radii) {
        int hits = 0;
        for (double m : maxima)
            if (m >= 0.5 * radius) ++hits;
        double p = double(hits) / n_paths;
        ExceedanceRow row;
        row.radius = radius;
        row.empirical = p;
        row.stderror = std::sqrt(std::max(p * (1.0 - p), 0.0) / n_paths);
        row.bound = 2.0 * std::exp(-radius / (4.0 * T));
        row.within = p <= row.bound + 3.0 * row.stderror;
        rows.push_back(row);
    }
    return rows;
}

} // namespace fbc
