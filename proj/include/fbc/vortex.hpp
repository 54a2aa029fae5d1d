#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fbc/currents.hpp"

namespace fbc {

// Radial Fourier profile of the filament cross-section measure, in the
// convention rho_hat(q) = Int e^{-i<q,x>} rho(dx) (no 2pi prefactor). The
// 2pi bookkeeping for everything derived from it is concentrated in the
// scalar reductions below (trace_g_expectation, GKernel), not here.
struct SpectralMeasure {
    enum class Kind { gaussian, dipole, tabulated };
    Kind kind = Kind::gaussian;
    double sigma1 = 1.0, sigma2 = 2.0;
    double mass = 1.0;            // rho_hat(0)
    double total_variation = 1.0; // sup bound for |rho_hat|

    // tabulated radial profile (ascending q), with optional asymptote
    // metadata; without it the finiteness conditions are undecidable
    std::vector<double> q_nodes, profile;
    bool has_asymptotes = false;
    double origin_exponent = 0.0; // rho_hat ~ c q^p near q = 0
    bool decays_fast = false;     // superpolynomial decay at infinity

    double rho_hat(double q) const;
    double rho_hat_sq(double q) const;

    static SpectralMeasure gaussian_measure(double sigma, double mass = 1.0);
    static SpectralMeasure dipole_measure(double sigma1, double sigma2);
    static SpectralMeasure tabulated_measure(std::vector<double> q_nodes,
                                             std::vector<double> profile);
};

// ghat(q) = (|rho_hat(q)|^2 / |q|^2) (I - q q^T/|q|^2), the Fourier-side
// interaction kernel; annihilates q and has trace 2 |rho_hat|^2 / |q|^2.
std::array<double, 9> fourier_kernel_matrix(const SpectralMeasure& sm,
                                            const std::array<double, 3>& q);
double fourier_kernel_trace(const SpectralMeasure& sm, double q_norm);

// (4 pi)^{-1} x / |x|^3; throws at x = 0.
std::array<double, 3> biot_savart(const std::array<double, 3>& x);

struct ConditionsReport {
    bool decidable = true;
    bool sobolev_holds = false;
    std::string sobolev_witness;
    bool spectral_finite = false;
    double spectral_value = 0.0; // Int_{R^3} |rho_hat|^2 |q|^{1/H - 4} dq
};

// The two finiteness conditions: the weighted sup bound
// sup_q |rho_hat(q)| |q|^{-1} (1+|q|^2)^{alpha/2} < infinity, decided from
// the origin/infinity asymptotes plus a log-grid scan, and the spectral
// integral above, by radial quadrature. H must lie in (1/4, 1).
ConditionsReport check_conditions(const SpectralMeasure& sm, double H, double alpha);

// Radial profile of the mollified rotation kernel (K * rho)(y) = E(|y|) y/|y|;
// closed error-function form for gaussian and dipole measures.
double coulomb_field_profile(const SpectralMeasure& sm, double r);

// u(x) = sum_j w_j (K * rho)(x - X_{t_j}) ^ D_eps X_{t_j} at one point.
std::array<double, 3> velocity_at(const CurrentPath& cp, const SpectralMeasure& sm,
                                  Scheme kind, const std::array<double, 3>& x);

struct VelocityField {
    SpatialGrid grid;
    std::vector<double> values; // 3 components per node
    double energy = 0.0;        // grid quadrature of |u|^2
    double tail_estimate = 0.0; // r^{-2} far-field continuation past the box
};
VelocityField velocity_field(const CurrentPath& cp, const SpectralMeasure& sm,
                             Scheme kind, const SpatialGrid& grid, int threads = 0);

// Position-space pair kernel g(x) = gI(r) I + gX(r) xhat xhat^T obtained by
// inverting ghat; memoised radial profiles. energy_double_sum is the
// L2(R^3) energy of the mollified field evaluated through g, i.e. the
// Fourier-side (Parseval) route: no spatial box, no truncation.
class GKernel {
  public:
    GKernel(const SpectralMeasure& sm, double r_max = 32.0);

    double gI(double r) const;
    double gX(double r) const;
    double g0() const { return g0_; } // gI(0); gX(0) = 0
    double energy_double_sum(const CurrentPath& cp, Scheme kind) const;

  private:
    SpectralMeasure sm_;
    std::vector<double> lr_, gi_, gx_; // pchip data on a log-r axis
    std::vector<double> gi_slope_, gx_slope_;
    double r_min_ = 0.0, r_max_ = 0.0, g0_ = 0.0;
    double far_ci_ = 0.0, far_cx_ = 0.0; // ~ c / r continuation
    double eval(const std::vector<double>& ys, const std::vector<double>& slopes,
                double r, double far_c) const;
};

// S(v) = E[Tr g(X)] for X ~ N(0, v I_3) = (1/pi^2) Int_0^inf |rho_hat|^2
// e^{-q^2 v / 2} dq; closed form for gaussian/dipole, quadrature otherwise.
double trace_g_expectation(const SpectralMeasure& sm, double v);

struct ExactEnergy {
    double value = 0.0;
    double boundary_share = 0.0;
};

// Deterministic E of the grid energy functional, cell-matched to the MC
// estimator: E = sum_{j,k} w_j w_k c_jk S(tau_jk^{2H}) with c from the
// exact covariance atoms (the derivative-increment coupling drops out
// because the rows of g are divergence-free).
ExactEnergy expected_energy_exact(const CurrentGridSpec& grid, const SpectralMeasure& sm,
                                  Scheme kind);

struct McEnergy {
    MCStats stats;
    std::vector<double> values;
};

// MC companion: per-replica energies through GKernel::energy_double_sum.
McEnergy mc_energy(const CurrentGridSpec& grid, const SpectralMeasure& sm, Scheme kind,
                   const GKernel& gk, int n_replicas, uint64_t seed, int threads = 0);

} // namespace fbc
