#pragma once

#include "polarq/channel.hpp"
#include "polarq/polar.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace polarq {

// message symbols placed into the information set in increasing index
// order, frozen values elsewhere
std::vector<int> assemble_u(const PolarCodeSpec& spec, const std::vector<int>& msg);

std::vector<int> extract_message(const PolarCodeSpec& spec, const std::vector<int>& u);

// O(N log N) butterfly: (u1, u2) -> (u1 + u2, sigma(u2)) per schedule node
std::vector<int> encode(const PolarCodeSpec& spec, const std::vector<int>& msg);

struct DecodeResult {
    std::vector<int> message;
    std::vector<int> u; // all N estimates (frozen positions forced)
};

// Successive cancellation from per-use likelihood columns.
DecodeResult sc_decode_likelihoods(const PolarCodeSpec& spec,
                                   const std::vector<std::vector<double>>& likelihoods);

// rx holds output indices into W's output alphabet.
DecodeResult sc_decode(const PolarCodeSpec& spec, const Channel& W,
                       const std::vector<int>& rx);

// Genie-aided pass: records the normalized likelihood vector seen at every
// index, then forces the decision to the true u (so later indices see
// correct priors). decisions[i] is the free-running argmax choice.
struct DecodeTrace {
    std::vector<std::vector<double>> likelihoods; // N x q, each summing to 1
    std::vector<int> decisions;
};

DecodeTrace sc_decode_trace(const PolarCodeSpec& spec,
                            const std::vector<std::vector<double>>& likelihoods,
                            const std::vector<int>* genie_u);

// ---- multi-level pipeline for composite q ----

struct MultilevelCode {
    std::vector<int> radices;          // prime factors, LSB-first digit order
    std::vector<PolarCodeSpec> levels; // one code per digit plane
};

// per-level messages -> physical codeword over the composite alphabet
std::vector<int> multilevel_encode(const MultilevelCode& code,
                                   const std::vector<std::vector<int>>& msgs);

struct MultilevelDecodeResult {
    std::vector<std::vector<int>> messages;
    std::vector<int> codeword; // re-encoded physical symbols
};

MultilevelDecodeResult multilevel_decode(const MultilevelCode& code, const Channel& W,
                                         const std::vector<int>& rx);

// ---- spec serialization (versioned text document) ----

void save_code_spec(std::ostream& os, const PolarCodeSpec& spec);
PolarCodeSpec load_code_spec(std::istream& is);
void save_code_spec_file(const std::string& path, const PolarCodeSpec& spec);
PolarCodeSpec load_code_spec_file(const std::string& path);

} // namespace polarq
