#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbc/analytics.hpp"
#include "fbc/fbm.hpp"
#include "fbc/kernel.hpp"

namespace fbc {

// Time lattice for the double-integral functionals. Difference quotients
// live at t_j = j*h, j = 0..n_cells; the path itself is synthesized on the
// half lattice (step h/2) over [0, T + eps] so every stencil time, and the
// staggered midpoints t_j + h/2 used by diagonal cells, are honest path
// nodes. eps must span at least min_eps_steps lattice steps, keeping the
// mollification scale separated from the quadrature scale.
struct CurrentGridSpec {
    double H = 0.5;
    int d = 3;
    double T = 1.0;
    double eps = 0.0625;
    int n_cells = 64;   // so h = T / n_cells
    int eps_steps = 4;  // eps / h

    double h() const { return T / n_cells; }
    int synth_steps() const { return 2 * (n_cells + eps_steps); }

    // picks h = eps / eps_steps; T must then be a multiple of h
    static CurrentGridSpec make(double H, int d, double eps, double T = 1.0,
                                int eps_steps = 4);
};

// A path sampled on the half lattice of `grid`, plus the trapezoid weights
// used by every functional below (w_0 = w_n = h/2, else h).
struct CurrentPath {
    CurrentGridSpec grid;
    FbmPath path;

    int half_index(int j) const { return 2 * j; } // node of t_j
    double node(int j, int i) const { return path.at(2 * j, i); }
    double weight(int j) const {
        return (j == 0 || j == grid.n_cells) ? 0.5 * grid.h() : grid.h();
    }
};

CurrentPath sample_current_path(const CurrentGridSpec& grid, uint64_t seed);

// Difference quotient at t_j; symmetric stencils clamp t - eps at 0
// (X_0 = 0), the synthesized horizon covers t + eps on the right.
void current_derivative(const CurrentPath& cp, Scheme kind, int j, double* out);
std::vector<double> current_derivatives(const CurrentPath& cp, Scheme kind);

struct CurrentEstimate {
    double Z = 0.0;
    double alpha = 0.0;
    Scheme kind = Scheme::symmetric;
    double eps = 0.0, h = 0.0;
    // Floor for "Z >= 0 up to quadrature error": round-off plus the exact
    // deficit of the staggered diagonal against the coincident-point value
    // K(0), when that value is finite.
    double psd_tolerance = 0.0;
    bool diagonal_excluded = false;
    double boundary_strip_share = 0.0; // |contribution of cells with t or s < eps| / scale
    uint64_t seed = 0;
};

// Z = sum_{j,k} w_j w_k K_alpha(|X_{t_j} - X_{t_k}|) <D_eps X_{t_j}, D_eps X_{t_k}>.
// Diagonal cells evaluate the kernel at the staggered offset
// |X_{t_j + h/2} - X_{t_j}| instead of 0. When alpha is at or below the
// integrability threshold for coincident points, the diagonal is dropped
// and flagged.
CurrentEstimate Z_double_integral(const CurrentPath& cp, double alpha, Scheme kind,
                                  const BesselKernel& kernel);

// Same quadrature with a generic radial factor f(r); no PSD bookkeeping.
double Z_double_integral_f(const CurrentPath& cp, Scheme kind,
                           const std::function<double(double)>& f);

// I_eps(phi) = sum_j w_j <phi(X_{t_j}), D_eps X_{t_j}>.
using VectorField = std::function<std::vector<double>(const std::vector<double>&)>;
double regularized_current(const CurrentPath& cp, const VectorField& phi, Scheme kind);

// Axis-aligned evaluation box, lo/hi/n per dimension (n = node count per
// axis, trapezoid weights on the nodes).
struct SpatialGrid {
    std::vector<double> lo, hi;
    std::vector<int> n;
    int dim() const { return int(lo.size()); }
    size_t n_total() const;
};

// Box covering the path's node range plus `margin` on every side, node
// spacing at most `target_step`.
SpatialGrid grid_around(const CurrentPath& cp, double margin, double target_step);

struct EtaField {
    SpatialGrid grid;
    std::vector<double> values; // node-major, d components per node
    double norm2 = 0.0;         // grid quadrature of |eta|^2
    double tail_estimate = 0.0; // boundary-face continuation of |eta|^2 ~ e^{-2 dist}
    bool memo_floor_hit = false;
    double alpha = 0.0;
    Scheme kind = Scheme::symmetric;
};

// eta(x) = sum_j w_j K_{alpha/2}(|x - X_{t_j}|) D_eps X_{t_j}, evaluated on
// every grid node. Requires alpha above the expected-integrability
// threshold and a box that covers the path range with a margin of at least
// one kernel decay length; too small a box throws, suggesting one.
EtaField eta_field(const CurrentPath& cp, double alpha, Scheme kind,
                   const SpatialGrid& grid, const BesselKernel& half_kernel,
                   int threads = 0);

struct WickTerms {
    double A = 0.0, B1 = 0.0, B2 = 0.0, Q = 0.0, Z = 0.0;
    bool B1_available = true;
    double A_floor = 0.0; // round-off allowance for the A >= 0 claim
};

// Pathwise split Z = A + (B1 - B2) + Q along the Gaussian integration-by-
// parts identity: A replaces <D,D> by its expectation against the kernel
// samples, B1/B2 carry the derivative-increment coupling through the two
// kernels of the resolvent identity, and Q is the centered remainder.
// Symmetric scheme only. alpha <= 1 leaves B1 undefined (lower kernel
// index would be <= 0); then B1 = 0 is reported with B1_available = false
// and Q absorbs the whole coupling term.
WickTerms wick_decompose(const CurrentPath& cp, double alpha,
                         const BesselKernel& kernel, const BesselKernel& lower_kernel);
WickTerms wick_decompose_low_alpha(const CurrentPath& cp, double alpha,
                                   const BesselKernel& kernel);

struct ExactZ {
    double value = 0.0;
    double a_term = 0.0, b_term = 0.0;
    bool b_term_included = true;
    double boundary_share = 0.0; // relative weight of clamped-stencil cells
    double interior_only = 0.0;  // same sum with the boundary strip dropped
};

// Deterministic E[Z] on exactly the quadrature lattice used by
// Z_double_integral: cell by cell, E = d c m(sigma) + b_t b_s w(sigma)
// with m, w the Gaussian kernel moments and (c, b_t, b_s, sigma) the exact
// covariance atoms of that cell (same stencils, clamps and staggering).
// Valid for every alpha > 0; this is the bounded/divergent discriminator.
ExactZ expected_Z_exact(const CurrentGridSpec& grid, double alpha, Scheme kind,
                        const GaussMoments& moments);

// Monte Carlo companion: n_replicas >= 30 independent paths with derived
// seeds, index-ordered aggregation. Returns per-replica values too so
// callers can reuse them (monotonicity checks, CSV dumps).
struct McZ {
    MCStats stats;
    std::vector<double> values;
};
McZ mc_expected_Z(const CurrentGridSpec& grid, double alpha, Scheme kind,
                  const BesselKernel& kernel, int n_replicas, uint64_t seed,
                  int threads = 0);

struct SweepRow {
    double alpha = 0.0, eps = 0.0, value = 0.0, stderror = 0.0;
};
struct SweepSummary {
    double alpha = 0.0;
    double slope = 0.0;          // log E Z vs log(1/eps), last half of the grid
    double max_min_ratio = 1.0;  // over the whole eps grid
    bool diverging = false;      // slope > +0.05 (dead band below that)
    double increasing_fraction = -1.0; // MC mode: share of replicas with Z
                                       // strictly increasing along the grid
};
struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<SweepSummary> summary;
    Scheme kind = Scheme::symmetric;
    std::string mode; // "exact" or "mc"
};

// E Z across an (alpha, eps) grid with per-alpha slope classification.
// Exact mode prices every cell deterministically; MC mode couples the
// whole eps ladder through one finest-lattice path per replica (the eps
// grid must then be dyadic multiples of its smallest element). The forward
// scheme with H < 1/2 is rejected: the forward-regularized integral only
// exists for H >= 1/2.
SweepTable threshold_sweep(double H, int d, const std::vector<double>& alphas,
                           const std::vector<double>& epsilons, Scheme kind,
                           const std::string& mode, double T = 1.0,
                           int n_replicas = 200, uint64_t seed = 1,
                           int threads = 0);

} // namespace fbc
