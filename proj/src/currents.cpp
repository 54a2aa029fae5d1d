#include "fbc/currents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace fbc {

CurrentGridSpec CurrentGridSpec::make(double H, int d, double eps, double T,
                                      int eps_steps) {
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("CurrentGridSpec: H outside (0,1)");
    if (d < 1) throw std::invalid_argument("CurrentGridSpec: d < 1");
    if (!(eps > 0.0) || !(T > 0.0)) throw std::invalid_argument("CurrentGridSpec: eps, T must be > 0");
    if (eps_steps < 4)
        throw std::invalid_argument("CurrentGridSpec: eps must span at least 4 lattice steps");
    double h = eps / eps_steps;
    double cells = T / h;
    int n_cells = int(std::lround(cells));
    if (n_cells < 1 || std::fabs(cells - n_cells) > 1e-9 * std::max(1.0, cells))
        throw std::invalid_argument("CurrentGridSpec: T is not a multiple of eps/eps_steps");
    CurrentGridSpec g;
    g.H = H;
    g.d = d;
    g.T = T;
    g.eps = eps;
    g.n_cells = n_cells;
    g.eps_steps = eps_steps;
    return g;
}

CurrentPath sample_current_path(const CurrentGridSpec& grid, uint64_t seed) {
    FbmParams p;
    p.H = grid.H;
    p.d = grid.d;
    p.T = grid.T + grid.eps;
    p.n_steps = grid.synth_steps();
    p.seed = seed;
    CurrentPath cp;
    cp.grid = grid;
    cp.path = sample_fbm(p);
    return cp;
}

void current_derivative(const CurrentPath& cp, Scheme kind, int j, double* out) {
    const auto& g = cp.grid;
    int m2 = 2 * g.eps_steps;
    int base = 2 * j;
    int d = g.d;
    if (kind == Scheme::forward) {
        for (int i = 0; i < d; ++i)
            out[i] = (cp.path.at(base + m2, i) - cp.path.at(base, i)) / g.eps;
    } else {
        int lo = std::max(base - m2, 0); // times below 0 read X_0 = 0
        for (int i = 0; i < d; ++i)
            out[i] = (cp.path.at(base + m2, i) - cp.path.at(lo, i)) / (2.0 * g.eps);
    }
}

std::vector<double> current_derivatives(const CurrentPath& cp, Scheme kind) {
    const auto& g = cp.grid;
    std::vector<double> out(size_t(g.n_cells + 1) * g.d);
    for (int j = 0; j <= g.n_cells; ++j) current_derivative(cp, kind, j, &out[size_t(j) * g.d]);
    return out;
}

namespace {

double node_distance(const CurrentPath& cp, int node_a, int node_b) {
    double s = 0.0;
    for (int i = 0; i < cp.grid.d; ++i) {
        double diff = cp.path.at(node_a, i) - cp.path.at(node_b, i);
        s += diff * diff;
    }
    return std::sqrt(s);
}

double dot_d(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

} // namespace

CurrentEstimate Z_double_integral(const CurrentPath& cp, double alpha, Scheme kind,
                                  const BesselKernel& kernel) {
    const auto& g = cp.grid;
    if (std::fabs(kernel.spec().alpha - alpha) > 1e-12 || kernel.spec().d != g.d)
        throw std::invalid_argument("Z_double_integral: kernel memo does not match (alpha,d)");
    int n = g.n_cells, d = g.d;
    auto D = current_derivatives(cp, kind);
    bool drop_diag = alpha < condition_B_threshold(g.H, d);

    CurrentEstimate est;
    est.alpha = alpha;
    est.kind = kind;
    est.eps = g.eps;
    est.h = g.h();
    est.seed = cp.path.params.seed;
    est.diagonal_excluded = drop_diag;

    double Z = 0.0, strip = 0.0, deficit = 0.0;
    bool k0_finite = K_zero_finite(kernel.spec());
    double K0 = k0_finite ? eval_K_zero(kernel.spec()) : 0.0;
    int m = g.eps_steps;
    bool symmetric = kind == Scheme::symmetric;

    for (int j = 0; j <= n; ++j) {
        double wj = cp.weight(j);
        const double* Dj = &D[size_t(j) * d];
        if (!drop_diag) {
            double r = node_distance(cp, 2 * j + 1, 2 * j);
            double cell = wj * wj * kernel(r) * dot_d(Dj, Dj, d);
            Z += cell;
            if (symmetric && j < m) strip += cell;
            if (k0_finite) deficit += wj * wj * dot_d(Dj, Dj, d) * std::max(0.0, K0 - kernel(r));
        }
        for (int k = j + 1; k <= n; ++k) {
            double r = node_distance(cp, 2 * j, 2 * k);
            double cell = 2.0 * wj * cp.weight(k) * kernel(r) * dot_d(Dj, &D[size_t(k) * d], d);
            Z += cell;
            if (symmetric && j < m) strip += cell; // j < k, only j can clamp
        }
    }
    est.Z = Z;
    est.psd_tolerance = 1e-9 * (1.0 + std::fabs(Z)) + deficit;
    est.boundary_strip_share = std::fabs(strip) / std::max(std::fabs(Z), 1e-300);
    return est;
}

double Z_double_integral_f(const CurrentPath& cp, Scheme kind,
                           const std::function<double(double)>& f) {
    const auto& g = cp.grid;
    int n = g.n_cells, d = g.d;
    auto D = current_derivatives(cp, kind);
    double Z = 0.0;
    for (int j = 0; j <= n; ++j) {
        double wj = cp.weight(j);
        const double* Dj = &D[size_t(j) * d];
        Z += wj * wj * f(node_distance(cp, 2 * j + 1, 2 * j)) * dot_d(Dj, Dj, d);
        for (int k = j + 1; k <= n; ++k)
            Z += 2.0 * wj * cp.weight(k) * f(node_distance(cp, 2 * j, 2 * k)) *
                 dot_d(Dj, &D[size_t(k) * d], d);
    }
    return Z;
}

double regularized_current(const CurrentPath& cp, const VectorField& phi, Scheme kind) {
    const auto& g = cp.grid;
    int d = g.d;
    auto D = current_derivatives(cp, kind);
    std::vector<double> x(d);
    double acc = 0.0;
    for (int j = 0; j <= g.n_cells; ++j) {
        for (int i = 0; i < d; ++i) x[i] = cp.node(j, i);
        auto ph = phi(x);
        if (int(ph.size()) != d)
            throw std::invalid_argument("regularized_current: phi dimension mismatch");
        acc += cp.weight(j) * dot_d(ph.data(), &D[size_t(j) * d], d);
    }
    return acc;
}

size_t SpatialGrid::n_total() const {
    size_t t = 1;
    for (int ni : n) t *= size_t(ni);
    return t;
}

SpatialGrid grid_around(const CurrentPath& cp, double margin, double target_step) {
    if (!(margin > 0.0) || !(target_step > 0.0))
        throw std::invalid_argument("grid_around: margin and step must be > 0");
    SpatialGrid grid;
    int d = cp.grid.d;
    grid.lo.resize(d);
    grid.hi.resize(d);
    grid.n.resize(d);
    for (int a = 0; a < d; ++a) {
        double lo = 0.0, hi = 0.0;
        for (int j = 0; j <= cp.grid.n_cells; ++j) {
            lo = std::min(lo, cp.node(j, a));
            hi = std::max(hi, cp.node(j, a));
        }
        grid.lo[a] = lo - margin;
        grid.hi[a] = hi + margin;
        grid.n[a] = int(std::ceil((grid.hi[a] - grid.lo[a]) / target_step)) + 1;
    }
    return grid;
}

EtaField eta_field(const CurrentPath& cp, double alpha, Scheme kind,
                   const SpatialGrid& grid, const BesselKernel& half_kernel,
                   int threads) {
    const auto& g = cp.grid;
    int d = g.d;
    if (grid.dim() != d || int(grid.hi.size()) != d || int(grid.n.size()) != d)
        throw std::invalid_argument("eta_field: grid dimension mismatch");
    if (!(alpha > condition_B_threshold(g.H, d)))
        throw std::invalid_argument("eta_field: alpha at or below the integrability threshold");
    if (std::fabs(half_kernel.spec().alpha - 0.5 * alpha) > 1e-12 || half_kernel.spec().d != d)
        throw std::invalid_argument("eta_field: half_kernel must have order alpha/2");
    for (int i = 0; i < d; ++i)
        if (grid.n[i] < 2 || !(grid.hi[i] > grid.lo[i]))
            throw std::invalid_argument("eta_field: malformed grid axis");

    // box must cover the path with one decay length to spare
    const double margin = 1.0;
    std::vector<double> pmin(d, 0.0), pmax(d, 0.0);
    for (int j = 0; j <= g.n_cells; ++j)
        for (int i = 0; i < d; ++i) {
            pmin[i] = std::min(pmin[i], cp.node(j, i));
            pmax[i] = std::max(pmax[i], cp.node(j, i));
        }
    for (int i = 0; i < d; ++i)
        if (grid.lo[i] > pmin[i] - margin || grid.hi[i] < pmax[i] + margin) {
            std::ostringstream msg;
            msg << "eta_field: box too small for the path range; suggested box:";
            for (int k = 0; k < d; ++k)
                msg << " [" << pmin[k] - 2.0 * margin << ", " << pmax[k] + 2.0 * margin << "]";
            throw std::invalid_argument(msg.str());
        }

    EtaField field;
    field.grid = grid;
    field.alpha = alpha;
    field.kind = kind;
    field.values.assign(grid.n_total() * size_t(d), 0.0);

    auto D = current_derivatives(cp, kind);
    int n_nodes = g.n_cells + 1;
    double r_floor = half_kernel.table_r_min();

    std::vector<double> step(d);
    for (int i = 0; i < d; ++i) step[i] = (grid.hi[i] - grid.lo[i]) / (grid.n[i] - 1);

    size_t total = grid.n_total();
    std::vector<char> floor_hits(total, 0);
    parallel_for(int(total), threads, [&](int idx) {
        // decode the node index, last axis fastest
        size_t rem = size_t(idx);
        std::vector<double> x(d);
        for (int i = d - 1; i >= 0; --i) {
            int ni = grid.n[i];
            x[i] = grid.lo[i] + step[i] * double(rem % ni);
            rem /= ni;
        }
        std::vector<double> acc(d, 0.0);
        for (int j = 0; j < n_nodes; ++j) {
            double r2 = 0.0;
            for (int i = 0; i < d; ++i) {
                double diff = x[i] - cp.node(j, i);
                r2 += diff * diff;
            }
            double r = std::sqrt(r2);
            if (r < r_floor) {
                r = r_floor;
                floor_hits[idx] = 1;
            }
            double kw = cp.weight(j) * half_kernel(r);
            for (int i = 0; i < d; ++i) acc[i] += kw * D[size_t(j) * d + i];
        }
        for (int i = 0; i < d; ++i) field.values[size_t(idx) * d + i] = acc[i];
    });
    for (char hit : floor_hits)
        if (hit) {
            field.memo_floor_hit = true;
            break;
        }

    // trapezoid quadrature of |eta|^2, plus an exponential continuation of
    // the boundary-face values for the tail
    double norm2 = 0.0, face = 0.0;
    std::vector<int> ix(d, 0);
    for (size_t idx = 0; idx < total; ++idx) {
        size_t rem = idx;
        double wt = 1.0;
        bool on_face = false;
        for (int i = d - 1; i >= 0; --i) {
            int ni = grid.n[i];
            ix[i] = int(rem % ni);
            rem /= ni;
            wt *= (ix[i] == 0 || ix[i] == ni - 1) ? 0.5 * step[i] : step[i];
            if (ix[i] == 0 || ix[i] == ni - 1) on_face = true;
        }
        double e2 = 0.0;
        for (int i = 0; i < d; ++i) {
            double v = field.values[idx * size_t(d) + i];
            e2 += v * v;
        }
        norm2 += wt * e2;
        if (on_face) {
            // face patch area: drop the constrained axis' (half) step
            for (int i = 0; i < d; ++i)
                if (ix[i] == 0 || ix[i] == grid.n[i] - 1) {
                    face += (wt / (0.5 * step[i])) * e2;
                    break;
                }
        }
    }
    field.norm2 = norm2;
    field.tail_estimate = 0.5 * face; // |eta| ~ e^{-s} past the box face
    return field;
}

namespace {

struct WickAccum {
    double Z = 0, A = 0, B1 = 0, B2 = 0;
};

WickTerms wick_core(const CurrentPath& cp, double alpha, const BesselKernel& kernel,
                    const BesselKernel* lower_kernel) {
    const auto& g = cp.grid;
    int n = g.n_cells, d = g.d;
    double h = g.h(), eps = g.eps;
    auto D = current_derivatives(cp, Scheme::symmetric);
    bool drop_diag = alpha < condition_B_threshold(g.H, d);

    WickAccum acc;
    for (int j = 0; j <= n; ++j) {
        double tj = j * h;
        double wj = cp.weight(j);
        const double* Dj = &D[size_t(j) * d];
        for (int k = j; k <= n; ++k) {
            if (j == k && drop_diag) continue;
            double tk = k * h;
            double mult = (j == k) ? 1.0 : 2.0;
            double ww = mult * wj * cp.weight(k);
            double p = (j == k) ? tj + 0.5 * h : tj;
            double q = (j == k) ? tj : tk;
            double r = (j == k) ? node_distance(cp, 2 * j + 1, 2 * j)
                                : node_distance(cp, 2 * j, 2 * k);
            auto atoms = cell_atoms(Scheme::symmetric, g.H, tj, tk, p, q, eps);
            double Kv = kernel(r);
            double coupling = -atoms.b_t * atoms.b_s;
            acc.Z += ww * Kv * dot_d(Dj, &D[size_t(k) * d], d);
            acc.A += ww * Kv * d * atoms.c;
            acc.B2 += ww * Kv * coupling;
            if (lower_kernel) acc.B1 += ww * (*lower_kernel)(r)*coupling;
        }
    }
    WickTerms t;
    t.Z = acc.Z;
    t.A = acc.A;
    t.B2 = acc.B2;
    t.B1 = lower_kernel ? acc.B1 : 0.0;
    t.B1_available = lower_kernel != nullptr;
    t.Q = acc.Z - acc.A - t.B1 + acc.B2;
    t.A_floor = 1e-10 * std::fabs(acc.A) + 1e-12;
    return t;
}

} // namespace

WickTerms wick_decompose(const CurrentPath& cp, double alpha,
                         const BesselKernel& kernel, const BesselKernel& lower_kernel) {
    if (!(alpha > 1.0))
        throw std::invalid_argument(
            "wick_decompose: alpha <= 1 has no lower-index kernel; use wick_decompose_low_alpha");
    if (std::fabs(lower_kernel.spec().alpha - (alpha - 1.0)) > 1e-12)
        throw std::invalid_argument("wick_decompose: lower_kernel must have order alpha-1");
    return wick_core(cp, alpha, kernel, &lower_kernel);
}

WickTerms wick_decompose_low_alpha(const CurrentPath& cp, double alpha,
                                   const BesselKernel& kernel) {
    return wick_core(cp, alpha, kernel, nullptr);
}

ExactZ expected_Z_exact(const CurrentGridSpec& grid, double alpha, Scheme kind,
                        const GaussMoments& moments) {
    if (std::fabs(moments.spec().alpha - alpha) > 1e-12 || moments.spec().d != grid.d)
        throw std::invalid_argument("expected_Z_exact: moments table does not match (alpha,d)");
    int n = grid.n_cells, d = grid.d, m = grid.eps_steps;
    double h = grid.h(), eps = grid.eps;
    bool drop_diag = alpha < condition_B_threshold(grid.H, d);
    bool symmetric = kind == Scheme::symmetric;

    // Interior cells depend on |j-k| only (stationary increments, no
    // clamping); the clamped strip is j < m under the symmetric scheme.
    // sigma is the per-coordinate sd of the staggered kernel argument.
    double sig_d = std::pow(0.5 * h, grid.H);
    double mv_d = moments.m(sig_d), wv_d = moments.w(sig_d);
    double t0 = m * h; // interior representative time
    double a_diag, b_diag;
    {
        auto atoms = cell_atoms(kind, grid.H, t0, t0, t0 + 0.5 * h, t0, eps);
        a_diag = d * atoms.c * mv_d;
        b_diag = atoms.b_t * atoms.b_s * wv_d;
    }
    std::vector<double> a_int(n + 1, 0.0), b_int(n + 1, 0.0);
    for (int delta = 1; delta <= n; ++delta) {
        double s = t0 + delta * h;
        auto atoms = cell_atoms(kind, grid.H, t0, s, t0, s, eps);
        double sig = std::pow(delta * h, grid.H);
        a_int[delta] = d * atoms.c * moments.m(sig);
        b_int[delta] = atoms.b_t * atoms.b_s * moments.w(sig);
    }

    double total = 0.0, interior_total = 0.0, strip = 0.0;
    double a_total = 0.0, b_total = 0.0;
    for (int j = 0; j <= n; ++j) {
        double wj = (j == 0 || j == n) ? 0.5 * h : h;
        double tj = j * h;
        for (int k = j; k <= n; ++k) {
            if (j == k && drop_diag) continue;
            double ww = ((j == k) ? 1.0 : 2.0) * wj * ((k == 0 || k == n) ? 0.5 * h : h);
            bool clamped = symmetric && j < m; // j <= k, only j can clamp
            double a, b;
            if (!clamped) {
                a = (j == k) ? a_diag : a_int[k - j];
                b = (j == k) ? b_diag : b_int[k - j];
            } else {
                double tk = k * h;
                double p = (j == k) ? tj + 0.5 * h : tj;
                double q = (j == k) ? tj : tk;
                auto atoms = cell_atoms(kind, grid.H, tj, tk, p, q, eps);
                double sig = (j == k) ? sig_d : std::pow((k - j) * h, grid.H);
                a = d * atoms.c * moments.m(sig);
                b = atoms.b_t * atoms.b_s * moments.w(sig);
            }
            double v = ww * (a + b);
            total += v;
            a_total += ww * a;
            b_total += ww * b;
            if (clamped)
                strip += v;
            else
                interior_total += v;
        }
    }

    ExactZ out;
    out.value = total;
    out.a_term = a_total;
    out.b_term = b_total;
    out.b_term_included = true;
    out.interior_only = interior_total;
    out.boundary_share = std::fabs(strip) / std::max(std::fabs(total), 1e-300);
    return out;
}

McZ mc_expected_Z(const CurrentGridSpec& grid, double alpha, Scheme kind,
                  const BesselKernel& kernel, int n_replicas, uint64_t seed,
                  int threads) {
    if (n_replicas < 30)
        throw std::invalid_argument("mc_expected_Z: need at least 30 replicas");
    McZ out;
    out.values.assign(n_replicas, 0.0);
    parallel_for(n_replicas, threads, [&](int r) {
        auto cp = sample_current_path(grid, derive_seed(seed, uint64_t(r)));
        out.values[r] = Z_double_integral(cp, alpha, kind, kernel).Z;
    });
    out.stats = summarize(out.values);
    return out;
}

namespace {

double fit_slope_last_half(const std::vector<double>& eps_desc,
                           const std::vector<double>& values) {
    int n = int(eps_desc.size());
    int start = n / 2; // last half = smallest eps
    int cnt = n - start;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = start; i < n; ++i) {
        double x = std::log(1.0 / eps_desc[i]);
        double y = std::log(std::max(values[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = cnt * sxx - sx * sx;
    return denom != 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
}

FbmPath decimate_path(const FbmPath& fine, const CurrentGridSpec& coarse, int stride) {
    FbmPath p;
    p.params = fine.params;
    p.params.T = coarse.T + coarse.eps;
    p.params.n_steps = coarse.synth_steps();
    p.dt = 0.5 * coarse.h();
    p.method = fine.method;
    int d = fine.params.d;
    p.values.assign(size_t(p.params.n_steps + 1) * d, 0.0);
    for (int k = 0; k <= p.params.n_steps; ++k)
        for (int i = 0; i < d; ++i) p.values[size_t(k) * d + i] = fine.at(k * stride, i);
    return p;
}

} // namespace

SweepTable threshold_sweep(double H, int d, const std::vector<double>& alphas,
                           const std::vector<double>& epsilons, Scheme kind,
                           const std::string& mode, double T, int n_replicas,
                           uint64_t seed, int threads) {
    if (kind == Scheme::forward && H < 0.5)
        throw std::invalid_argument(
            "threshold_sweep: the forward-regularized integral exists only for H >= 1/2; "
            "use the symmetric scheme below that");
    if (epsilons.size() < 2)
        throw std::invalid_argument("threshold_sweep: need at least 2 eps points");
    if (mode != "exact" && mode != "mc")
        throw std::invalid_argument("threshold_sweep: mode must be exact or mc");

    std::vector<double> eps_desc = epsilons;
    std::sort(eps_desc.begin(), eps_desc.end(), std::greater<double>());

    SweepTable table;
    table.kind = kind;
    table.mode = mode;

    if (mode == "exact") {
        for (double alpha : alphas) {
            GaussMoments moments(alpha, d);
            std::vector<double> vals;
            for (double eps : eps_desc) {
                auto grid = CurrentGridSpec::make(H, d, eps, T);
                auto ez = expected_Z_exact(grid, alpha, kind, moments);
                table.rows.push_back({alpha, eps, ez.value, 0.0});
                vals.push_back(ez.value);
            }
            SweepSummary s;
            s.alpha = alpha;
            s.slope = fit_slope_last_half(eps_desc, vals);
            double lo = *std::min_element(vals.begin(), vals.end());
            double hi = *std::max_element(vals.begin(), vals.end());
            s.max_min_ratio = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
            s.diverging = s.slope > 0.05;
            table.summary.push_back(s);
        }
        return table;
    }

    // MC mode: one finest-lattice path per replica drives every (alpha,eps)
    // cell, so the eps ladder is coupled on common paths. Requires a dyadic
    // ladder so coarse lattices are strided subsets of the finest one.
    double eps_min = eps_desc.back(), eps_max = eps_desc.front();
    std::vector<int> strides;
    for (double eps : eps_desc) {
        double ratio = eps / eps_min;
        int s = int(std::lround(ratio));
        if (std::fabs(ratio - s) > 1e-9 || (s & (s - 1)) != 0)
            throw std::invalid_argument("threshold_sweep: mc mode needs a dyadic eps ladder");
        strides.push_back(s);
    }
    auto fine_grid = CurrentGridSpec::make(H, d, eps_min, T);
    double half_step = 0.5 * fine_grid.h();
    double horizon = T + eps_max;
    int fine_steps = int(std::lround(horizon / half_step));
    if (std::fabs(fine_steps * half_step - horizon) > 1e-9)
        throw std::invalid_argument("threshold_sweep: horizon does not sit on the fine lattice");

    std::vector<CurrentGridSpec> grids;
    for (double eps : eps_desc) grids.push_back(CurrentGridSpec::make(H, d, eps, T));

    size_t n_alpha = alphas.size(), n_eps = eps_desc.size();
    std::vector<std::unique_ptr<BesselKernel>> kernels;
    for (double alpha : alphas) kernels.emplace_back(new BesselKernel(alpha, d));

    // values[replica][alpha][eps]
    std::vector<double> values(size_t(n_replicas) * n_alpha * n_eps, 0.0);
    parallel_for(n_replicas, threads, [&](int r) {
        FbmParams p;
        p.H = H;
        p.d = d;
        p.T = horizon;
        p.n_steps = fine_steps;
        p.seed = derive_seed(seed, uint64_t(r));
        FbmPath fine = sample_fbm(p);
        for (size_t ei = 0; ei < n_eps; ++ei) {
            CurrentPath cp;
            cp.grid = grids[ei];
            cp.path = decimate_path(fine, grids[ei], strides[ei]);
            for (size_t ai = 0; ai < n_alpha; ++ai) {
                double z = Z_double_integral(cp, alphas[ai], kind, *kernels[ai]).Z;
                values[(size_t(r) * n_alpha + ai) * n_eps + ei] = z;
            }
        }
    });

    for (size_t ai = 0; ai < n_alpha; ++ai) {
        std::vector<double> means(n_eps, 0.0), ses(n_eps, 0.0);
        for (size_t ei = 0; ei < n_eps; ++ei) {
            std::vector<double> v(n_replicas);
            for (int r = 0; r < n_replicas; ++r)
                v[r] = values[(size_t(r) * n_alpha + ai) * n_eps + ei];
            auto st = summarize(v);
            means[ei] = st.mean;
            ses[ei] = st.stderror;
            table.rows.push_back({alphas[ai], eps_desc[ei], st.mean, st.stderror});
        }
        int increasing = 0;
        for (int r = 0; r < n_replicas; ++r) {
            bool inc = true;
            for (size_t ei = 0; ei + 1 < n_eps; ++ei) {
                double cur = values[(size_t(r) * n_alpha + ai) * n_eps + ei];
                double nxt = values[(size_t(r) * n_alpha + ai) * n_eps + ei + 1];
                if (!(nxt > cur)) {
                    inc = false;
                    break;
                }
            }
            if (inc) ++increasing;
        }
        SweepSummary s;
        s.alpha = alphas[ai];
        s.slope = fit_slope_last_half(eps_desc, means);
        double lo = *std::min_element(means.begin(), means.end());
        double hi = *std::max_element(means.begin(), means.end());
        s.max_min_ratio = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
        s.diverging = s.slope > 0.05;
        s.increasing_fraction = double(increasing) / n_replicas;
        table.summary.push_back(s);
    }
    return table;
}

} // namespace fbc
