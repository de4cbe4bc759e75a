#pragma once

#include "polarq/channel.hpp"
#include "polarq/kernels.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace polarq {

struct LeafReport {
    std::string path; // sign string over {-,+}, length n
    MetricsReport metrics;
    double merge_loss = 0.0; // accumulated lossy-quantization capacity loss, nats
};

// Tree nodes in heap order: root 0, children of i at 2i+1 ('-') and 2i+2 ('+').
struct EvolveResult {
    std::vector<LeafReport> leaves;  // 2^n, path-lexicographic ('-' < '+')
    std::vector<NodeMap> schedule;   // 2^n - 1 entries
};

// Recursive polarization-tree evolution. Each node applies the configured
// split, then quantizes both halves to merge_budget outputs.
EvolveResult evolve_tree(const Channel& W, int n, const KernelConfig& cfg,
                         int merge_budget = 4096);

// fraction of leaves with normalized capacity strictly inside (delta, 1-delta)
double polarization_fraction(const std::vector<LeafReport>& leaves, double delta);

// indices of the K leaves with smallest z_avg (ties to the lower index)
std::vector<int> select_information_set(const std::vector<LeafReport>& leaves, int K);

struct PolarCodeSpec {
    int q = 0;
    int n = 0;
    KernelVariant variant = KernelVariant::GroupDeterministic;
    std::vector<NodeMap> schedule;   // 2^n - 1, heap order
    std::vector<int> info_set;       // ascending
    std::vector<int> frozen_values;  // length N; entries outside info_set used
    std::shared_ptr<const GroupTable> group;
    std::shared_ptr<const FieldTable> field; // multiplier variants only

    int block_length() const { return 1 << n; }
    int dimension() const { return static_cast<int>(info_set.size()); }
    bool is_frozen(int i) const;
};

struct ConstructionResult {
    PolarCodeSpec spec;
    EvolveResult evolution;
};

// Evolve with a fixed sigma chosen per node, pick the K best leaves.
ConstructionResult construct_code(const Channel& W, int n, KernelConfig cfg, int K,
                                  int merge_budget = 4096);

struct RateEstimate {
    double probability = 0.0;
    double halfwidth = 0.0; // 95% binomial
    std::uint64_t trials = 0;
};

// Empirical P(T_n <= 2^(-2^(beta n))) over uniformly sampled sign paths.
// Binary erasure channels use the exact scalar recursion (z -> 2z - z^2 on
// '-', z -> z^2 on '+', tracked in log domain once tiny); other channels
// evolve one quantized channel per sampled path, with T = z_max for the
// prime deterministic kernel and T = z_avg otherwise.
RateEstimate rate_experiment(const Channel& W, int n, double beta, std::uint64_t trials,
                             std::uint64_t seed, const KernelConfig& cfg,
                             int merge_budget = 4096);

// detects a channel equivalent to a binary erasure channel after lossless
// merging; fills the erasure probability when asked
bool is_binary_erasure(const Channel& W, double* eps_out = nullptr);

// CSV: path, I_normalized, z_avg, z_max, merge_loss
void write_leaf_csv(std::ostream& os, const std::vector<LeafReport>& leaves,
                    const std::string& config_digest);

} // namespace polarq
