#pragma once
#include <cstdint>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

namespace fbc {

// splitmix64 (Steele/Lea/Flood). One 64-bit word of state, splittable by
// construction: any derived stream is just another seed pushed through the
// same finalizer, so replica/component streams never overlap by accident.
inline uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derived stream id: hash the (parent, index) pair. Used for
// (base seed, replica) -> replica seed -> (replica seed, component) chains.
inline uint64_t derive_seed(uint64_t parent, uint64_t index) {
    return mix64(parent ^ mix64(index + 0x632BE59BD9B4E019ull));
}

class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform on (0,1); 53-bit mantissa, never returns 0 or 1
    double uniform() {
        return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Box-Muller, second deviate cached. std::normal_distribution is not
    // pinned across standard libraries; this is, bit for bit.
    double gaussian() {
        if (have_cache_) {
            have_cache_ = false;
            return cache_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cache_ = r * std::sin(a);
        have_cache_ = true;
        return r * std::cos(a);
    }

  private:
    uint64_t state_;
    double cache_ = 0.0;
    bool have_cache_ = false;
};

// Number of worker threads: explicit argument wins, then FBC_THREADS env
// variable, then hardware concurrency.
int default_threads();

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items are
// handed out by an atomic counter; every fn(i) must depend only on i (and
// read-only shared state) so the schedule cannot affect results. Callers
// that aggregate do so afterwards, in index order.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct MCStats {
    double mean = 0.0;
    double stderror = 0.0;   // sd / sqrt(n)
    double sd = 0.0;
    int n = 0;
};

// Index-ordered summary (Welford), deterministic for a given vector.
MCStats summarize(const std::vector<double>& xs);

} // namespace fbc
