#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fbc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    int threads = 0;         // 0 = hardware default
    std::string scratch_dir; // working area for the determinism criterion
    // invoked as each criterion finishes, so callers can stream progress;
    // results completed before an interrupt have already been reported
    std::function<void(const CriterionResult&)> on_result;
};

// The full release gate: thirteen self-contained checks with pinned seeds
// and tolerances. Each returns pass/fail plus a one-line numeric summary;
// nothing stops early, so a red run still reports every criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

// The pinned artifact set backing the determinism criterion and the batch
// driver: kernel profile, covariance table, threshold sweeps (exact and
// MC), Wick decomposition replicas, vortex energies, Brownian checks, one
// sample path. Returns the paths written. All Monte Carlo inside runs
// through the thread pool, so byte-comparing two runs at different thread
// counts is a real schedule-independence test.
std::vector<std::string> suite_outputs(const std::string& dir, int threads,
                                       uint64_t seed);

} // namespace fbc
