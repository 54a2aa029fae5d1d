#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "fbc/rng.hpp"

namespace fbc {

// Heavy-tail diagnostics on a replica distribution. `heavy` means the
// plain-MC average of this quantity should not be trusted at desk scale.
struct TailDiag {
    double top1_share = 0.0; // fraction of the total carried by the top 1%
    double rel_stderr = 0.0;
    bool heavy = false;
};
TailDiag tail_diagnostics(const std::vector<double>& values);

// E[(int_0^T |x+W_t|^{2(theta-1)} dt)^{q/2}] against the three-term bound
// E|x+W_T|^{theta q} + |x|^{theta q} + int_0^T E|x+W_t|^{(theta-2) q} dt.
struct BesselMomentCase {
    int d = 3;
    double theta = 0.5;
    double q = 2.0;
    std::vector<double> x; // starting offset, size d
    double T = 1.0;
    int n_paths = 1000;
    int n_steps = 512;
    uint64_t seed = 1;
};

struct BesselMomentReport {
    MCStats lhs;
    TailDiag lhs_tail;
    MCStats rhs_end;        // E |x+W_T|^{theta q}
    double rhs_start = 0.0; // |x|^{theta q}
    MCStats rhs_time;       // time integral of E |x+W_t|^{(theta-2) q}
    TailDiag rhs_time_tail;
    double ratio = 0.0; // lhs over the rhs sum; a bound constant, not a limit
    bool unreliable = false;
};

// Both sides share paths (common random numbers). The comparison asserts
// finiteness and stability only; no universal constant is pinned.
BesselMomentReport bessel_moment_estimates(const BesselMomentCase& c, int threads = 0);

// int_{R^d} E[(int_0^1 e^{-eps |x - W_t|} |x - W_t|^{2 alpha - 2 d} dt)^{p'/2}] dx
// by importance sampling: x drawn from a radial exponential envelope with
// rate eps_decay * p_prime / 4, one fresh path per draw.
struct OccupationReport {
    MCStats stats;
    TailDiag tail;
    bool condition_holds = false; // (d - alpha + 1) p' < d
    std::string note;
};
OccupationReport occupation_integral_estimate(int d, double alpha, double p_prime,
                                              double eps_decay, int n_paths,
                                              uint64_t seed, int threads = 0);

// Empirical P(max_{t <= T} |W_t| >= radius / 2) against 2 e^{-radius / 4T}.
// The discrete-grid max underestimates the running max, which only makes
// the check conservative.
struct ExceedanceRow {
    double radius = 0.0;
    double empirical = 0.0;
    double stderror = 0.0;
    double bound = 0.0;
    bool within = false; // empirical <= bound + 3 stderr
};
std::vector<ExceedanceRow> max_exceedance_check(int d, double T,
                                                const std::vector<double>& radii,
                                                int n_paths, int n_steps, uint64_t seed,
                                                int threads = 0);

} // namespace fbc
