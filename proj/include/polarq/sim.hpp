#pragma once

#include "polarq/channel.hpp"
#include "polarq/polar.hpp"

#include <cstdint>
#include <string>

namespace polarq {

// q-ary symmetric channel: W(y|x) = 1-p on the diagonal, p/(q-1) elsewhere
Channel make_qsc(int q, double p);

// q-ary erasure channel: outputs 0..q-1 plus an erasure symbol at index q
Channel make_qec(int q, double eps);

// The q=4 channel whose outputs reveal the input's parity and nothing else:
// W(0|0)=W(0|2)=W(1|1)=W(1|3)=1. Equidistant in no subgroup direction; the
// cyclic-group kernel leaves it fixed while the field kernel polarizes it.
Channel make_counterexample4();

// "kind:params" channel descriptor used by the CLI and tests:
// qsc:q:p | qec:q:eps | counterexample4 | file:path (or a bare path)
Channel channel_from_descriptor(const std::string& desc);

// random q x m row-stochastic matrix (i.i.d. uniform entries, normalized);
// entries floored away from zero so metrics stay well-conditioned
Channel make_random_channel(int q, int m, std::uint64_t seed,
                            std::uint64_t stream = 0);

struct SimReport {
    std::uint64_t trials = 0;
    std::uint64_t block_errors = 0;
    std::uint64_t symbol_errors = 0;
    double bler = 0.0;
    double ser = 0.0;
    double wilson_95_halfwidth = 0.0;
    std::uint64_t seed = 0;
    std::string config_digest;
};

// Monte Carlo block-error run: uniform messages, per-symbol sampling
// through W, SC decode. Per-trial RNG streams make the result independent
// of trial ordering.
SimReport simulate_bler(const PolarCodeSpec& spec, const Channel& W,
                        std::uint64_t trials, std::uint64_t seed);

// stable FNV-1a digest of a configuration string, hex-encoded
std::string config_digest(const std::string& config);

} // namespace polarq
