#pragma once

#include <cstdint>

namespace polarq {

// Counter-based generator (splitmix64 over a mixed (seed, stream) state).
// Streams derived from the same seed are independent, so per-trial streams
// reproduce identically whether trials run serially or concurrently.
class Rng {
  public:
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        Rng r;
        r.state_ = mix(seed ^ mix(stream_id + 0x632be59bd9b4e019ULL));
        return r;
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

    bool coin() { return (next() & 1) != 0; }

    // index sampled from the (sub)probability vector p[0..n); the tail
    // index absorbs any leftover mass
    int sample(const double* p, int n) {
        double u = uniform();
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += p[i];
            if (u < acc) return i;
        }
        return n - 1;
    }

  private:
    static std::uint64_t mix(std::uint64_t x) {
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t state_ = 0;
};

} // namespace polarq
