#pragma once

#include "polarq/algebra.hpp"
#include "polarq/channel.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace polarq {

enum class KernelVariant {
    GroupDeterministic, // x2 = pi(u2), fixed pi (identity by default)
    RandomPermFull,     // averaged over all q! permutations
    RandomPermFixZero,  // averaged over the (q-1)! permutations fixing 0
    MultiplierFull,     // averaged over x2 = r*u2, r in X_*
    MultiplierHalf,     // averaged over a half-set of X_* (odd characteristic)
};

std::string kernel_variant_name(KernelVariant v);
KernelVariant kernel_variant_from_name(const std::string& name);

// The fixed map sigma applied to u2 at one tree node.
struct NodeMap {
    enum class Kind { Identity, Perm, Mult };
    Kind kind = Kind::Identity;
    Permutation perm; // Kind::Perm
    int mult = 1;     // Kind::Mult

    // image of sigma as a bijection on {0..q-1}
    std::vector<int> image(int q, const FieldTable* F) const;
};

struct KernelConfig {
    KernelVariant variant = KernelVariant::GroupDeterministic;
    std::shared_ptr<const GroupTable> group; // group / permutation variants
    std::shared_ptr<const FieldTable> field; // multiplier variants
    std::optional<Permutation> fixed_perm;   // GroupDeterministic only

    // Construction mode: at each node pick one fixed sigma from the
    // variant's randomization set (satisficing Z(W+) <= Z(W)^2, or the
    // minimizer when `minimize` is set) and split deterministically.
    bool pick_fixed = false;
    bool minimize = false;

    // addition table in use (group or field additive structure)
    const GroupTable& addition() const;
    int q() const { return addition().q; }

    static KernelConfig make(KernelVariant v, int q);
};

struct SplitPair {
    Channel minus;
    Channel plus;
    NodeMap sigma; // fixed map used, identity for averaged variants
};

SplitPair split_deterministic(const Channel& W, const GroupTable& G,
                              const std::optional<Permutation>& pi = std::nullopt);

SplitPair split_random_perm(const Channel& W, const GroupTable& G,
                            const std::vector<Permutation>& perms);

SplitPair split_multiplier(const Channel& W, const FieldTable& F,
                           const std::vector<int>& mults);

// First permutation in lexicographic order with Z(W+) <= Z(W)^2 + 1e-12
// (or the minimizer of Z(W+) when minimize is set). Exhaustive over q!.
Permutation find_good_permutation(const Channel& W, const GroupTable& G,
                                  bool minimize = false);

// Same search over a multiplier set.
int find_good_multiplier(const Channel& W, const FieldTable& F,
                         const std::vector<int>& mults, bool minimize = false);

// dispatch on cfg.variant; honors pick_fixed
SplitPair apply_kernel(const Channel& W, const KernelConfig& cfg);

// Multi-level decomposition of a composite-q channel into prime-alphabet
// subchannels. Digit order is least-significant-first:
// x = u_1 + q_1*u_2 + q_1*q_2*u_3 + ...
// W^(i) outputs are indexed y * (q_1*...*q_{i-1}) + prefix, where prefix is
// the mixed-radix encoding of (u_1..u_{i-1}), least significant first.
std::vector<Channel> decompose_composite(const Channel& W, const std::vector<int>& radices);

// Channel with input alphabet {0..m-1} and rows W(.|f(x')); the uniform
// input on the new alphabet induces P_X(x) = |f^-1(x)| / m on W.
Channel shape_channel(const Channel& W, const std::vector<int>& f);

} // namespace polarq
