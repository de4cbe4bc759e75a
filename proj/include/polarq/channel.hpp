#pragma once

#include "polarq/algebra.hpp"
#include "polarq/label.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace polarq {

// Discrete memoryless channel: q x m row-stochastic matrix with labeled
// output symbols. Immutable after construction.
class Channel {
  public:
    Channel() = default;

    // Validates and renormalizes. Rows must sum to 1 within 1e-9 and hold
    // no negative entries; labels default to atoms 0..m-1.
    static Channel make(int q, int m, std::vector<double> probs,
                        std::vector<OutputLabel> labels = {});

    int q() const { return q_; }
    int output_count() const { return m_; }

    double at(int x, int y) const { return p_[static_cast<std::size_t>(x) * m_ + y]; }
    const double* row(int x) const { return p_.data() + static_cast<std::size_t>(x) * m_; }
    const OutputLabel& label(int y) const { return labels_[y]; }
    const std::vector<OutputLabel>& labels() const { return labels_; }

    // likelihood column W(y|.) over inputs
    std::vector<double> column(int y) const;

  private:
    int q_ = 0;
    int m_ = 0;
    std::vector<double> p_; // row-major q x m
    std::vector<OutputLabel> labels_;
};

Channel make_channel(const std::vector<std::vector<double>>& rows,
                     std::vector<OutputLabel> labels = {});

struct MetricsReport {
    double capacity_normalized = 0.0; // base-q
    double capacity_nats = 0.0;
    double z_avg = 0.0;
    double z_max = 0.0;
    double ml_error = 0.0;
    std::vector<double> z_profile; // Z_d for d = 1..q-1; empty without a group
};

// I(W) under the uniform input: (normalized base-q, nats)
std::pair<double, double> symmetric_capacity(const Channel& W);

// sum_y sqrt(W(y|x) W(y|x2))
double pairwise_z(const Channel& W, int x, int x2);

// mean pairwise_z over ordered distinct pairs
double average_z(const Channel& W);

// Z_d = (1/q) sum_x pairwise_z(x, x+d) for d != 0; returns (profile, max)
std::pair<std::vector<double>, double> z_profile(const Channel& W, const GroupTable& G);

// exact error probability of the ML decoder, lowest-index tie-break,
// uniform prior
double ml_error_probability(const Channel& W);

// (lower, upper) bracket on normalized capacity from the average
// Bhattacharyya distance; all logs base q
std::pair<double, double> capacity_bounds_from_z(double z, int q);

// merge output columns whose likelihood vectors are proportional
// (relative tolerance 1e-10); drops zero-mass columns
Channel merge_outputs_lossless(const Channel& W);

struct QuantizeResult {
    Channel channel;
    double capacity_loss_nats = 0.0;
};

// greedy merge of the cheapest column pair until at most `budget` outputs
QuantizeResult quantize_outputs(const Channel& W, int budget);

bool is_equidistant(const Channel& W, double tol);

// same matrix, labels replaced by atoms 0..m-1 (keeps synthesized-channel
// labels from nesting without bound across tree levels)
Channel relabel_atomic(const Channel& W);

MetricsReport metrics(const Channel& W, const GroupTable* G = nullptr);

// text format: "q m" line then q rows of m probabilities; '#' comments
Channel load_channel(const std::string& path);
Channel parse_channel(std::istream& in);
void save_channel(const Channel& W, const std::string& path);

// Streaming builder used by the transform kernels: accumulates candidate
// likelihood columns and merges the ones whose normalized columns agree on
// a 1e-13 grid. Candidate order decides the merged channel's column order.
class ColumnAccumulator {
  public:
    ColumnAccumulator(int q, std::size_t expected_columns = 0);

    // col has length q; ordinal identifies the candidate for labeling
    void add(const double* col, std::uint64_t ordinal);

    std::size_t group_count() const { return groups_.size(); }

    // Finalize into a channel; label_of maps a surviving group's first
    // candidate ordinal to its output label.
    template <typename LabelFn>
    Channel finish(LabelFn&& label_of) {
        auto order = finish_order();
        std::vector<double> probs(order.size() * q_);
        std::vector<OutputLabel> labels(order.size());
        for (std::size_t j = 0; j < order.size(); ++j) {
            const Group& g = groups_[order[j]];
            for (int x = 0; x < q_; ++x)
                probs[static_cast<std::size_t>(x) * order.size() + j] = g.col[x];
            labels[j] = label_of(g.first_ordinal);
        }
        return channel_from_columns(static_cast<int>(order.size()), std::move(probs),
                                    std::move(labels));
    }

  private:
    struct Group {
        std::vector<double> col;
        std::vector<std::int64_t> key;
        std::uint64_t first_ordinal = 0;
        std::uint64_t digest = 0;
    };

    std::vector<std::size_t> finish_order() const;
    Channel channel_from_columns(int m, std::vector<double> probs,
                                 std::vector<OutputLabel> labels) const;

    int q_;
    std::vector<Group> groups_;
    std::vector<std::uint32_t> slots_; // open-addressing table, 1-based ids
    std::vector<std::int64_t> key_;    // scratch
    void rehash(std::size_t new_size);
};

} // namespace polarq
