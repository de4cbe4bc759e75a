#include "polarq/polar.hpp"

#include "polarq/errors.hpp"
#include "polarq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace polarq {

namespace {

const GroupTable* profile_group(const KernelConfig& cfg) {
    return cfg.group ? cfg.group.get() : nullptr;
}

void evolve_rec(const Channel& W, int levels_left, std::size_t node_idx,
                std::string& path, double merge_loss, const KernelConfig& cfg,
                int merge_budget, EvolveResult& out) {
    if (levels_left == 0) {
        LeafReport leaf;
        leaf.path = path;
        leaf.metrics = metrics(W, profile_group(cfg));
        leaf.merge_loss = merge_loss;
        out.leaves.push_back(std::move(leaf));
        return;
    }
    SplitPair sp = apply_kernel(W, cfg);
    out.schedule[node_idx] = sp.sigma;

    auto qminus = quantize_outputs(sp.minus, merge_budget);
    sp.minus = Channel();
    path.push_back('-');
    evolve_rec(relabel_atomic(qminus.channel), levels_left - 1, 2 * node_idx + 1, path,
               merge_loss + qminus.capacity_loss_nats, cfg, merge_budget, out);
    path.back() = '+';
    qminus.channel = Channel();

    auto qplus = quantize_outputs(sp.plus, merge_budget);
    sp.plus = Channel();
    evolve_rec(relabel_atomic(qplus.channel), levels_left - 1, 2 * node_idx + 2, path,
               merge_loss + qplus.capacity_loss_nats, cfg, merge_budget, out);
    path.pop_back();
}

} // namespace

EvolveResult evolve_tree(const Channel& W, int n, const KernelConfig& cfg,
                         int merge_budget) {
    if (n < 0) throw OutOfRange("n = " + std::to_string(n));
    if (merge_budget < W.q()) throw BudgetTooSmall(std::to_string(merge_budget));
    EvolveResult out;
    out.leaves.reserve(1u << n);
    out.schedule.assign((1u << n) - 1, NodeMap{});
    std::string path;
    evolve_rec(W, n, 0, path, 0.0, cfg, merge_budget, out);
    return out;
}

double polarization_fraction(const std::vector<LeafReport>& leaves, double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw BadDelta(std::to_string(delta));
    if (leaves.empty()) return 0.0;
    std::size_t inside = 0;
    for (const auto& l : leaves) {
        double i = l.metrics.capacity_normalized;
        if (i > delta && i < 1.0 - delta) ++inside;
    }
    return static_cast<double>(inside) / leaves.size();
}

std::vector<int> select_information_set(const std::vector<LeafReport>& leaves, int K) {
    const int N = static_cast<int>(leaves.size());
    if (K < 0 || K > N) throw KOutOfRange(std::to_string(K));
    std::vector<int> idx(N);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (leaves[a].metrics.z_avg != leaves[b].metrics.z_avg)
            return leaves[a].metrics.z_avg < leaves[b].metrics.z_avg;
        return a < b;
    });
    idx.resize(K);
    std::sort(idx.begin(), idx.end());
    return idx;
}

bool PolarCodeSpec::is_frozen(int i) const {
    return !std::binary_search(info_set.begin(), info_set.end(), i);
}

ConstructionResult construct_code(const Channel& W, int n, KernelConfig cfg, int K,
                                  int merge_budget) {
    cfg.pick_fixed = true;
    ConstructionResult res;
    res.evolution = evolve_tree(W, n, cfg, merge_budget);

    PolarCodeSpec spec;
    spec.q = W.q();
    spec.n = n;
    spec.variant = cfg.variant;
    spec.schedule = res.evolution.schedule;
    spec.info_set = select_information_set(res.evolution.leaves, K);
    spec.frozen_values.assign(1u << n, 0);
    spec.group = cfg.group;
    spec.field = cfg.field;
    res.spec = std::move(spec);
    return res;
}

bool is_binary_erasure(const Channel& W, double* eps_out) {
    if (W.q() != 2) return false;
    Channel M = merge_outputs_lossless(W);
    if (M.output_count() > 3) return false;
    double erased = 0.0;
    for (int y = 0; y < M.output_count(); ++y) {
        double a = M.at(0, y), b = M.at(1, y);
        double hi = std::max(a, b);
        if (hi <= 0.0) continue;
        if (std::fabs(a - b) <= 1e-12 * hi) {
            erased += a;
        } else if (std::min(a, b) > 1e-12 * hi) {
            return false; // partially-informative output: not an erasure channel
        }
    }
    if (eps_out) *eps_out = erased;
    return true;
}

namespace {

// z value of an erasure channel along a path, in hybrid linear/log2 form
struct ErasureState {
    double z;     // valid when log2z == 0 sentinel unused; kept exact while > tiny
    double log2z; // active representation once z underflows
    bool log_mode;

    static ErasureState start(double eps) { return {eps, 0.0, false}; }

    void step(bool plus) {
        if (!log_mode) {
            if (plus)
                z = z * z;
            else
                z = 2.0 * z - z * z;
            if (z > 0.0 && z < 1e-150) {
                log2z = std::log2(z);
                log_mode = true;
            }
            return;
        }
        if (plus)
            log2z *= 2.0;
        else
            log2z += 1.0; // 2z - z^2 ~= 2z at this magnitude
    }

    // log2 of the current value; -inf for exact zero
    double log2_value() const {
        if (log_mode) return log2z;
        return z > 0.0 ? std::log2(z) : -HUGE_VAL;
    }
};

} // namespace

RateEstimate rate_experiment(const Channel& W, int n, double beta, std::uint64_t trials,
                             std::uint64_t seed, const KernelConfig& cfg,
                             int merge_budget) {
    if (!(beta > 0.0 && beta < 1.0)) throw BadBeta(std::to_string(beta));
    if (trials < 1) throw OutOfRange("trials = 0");
    if (n < 1) throw OutOfRange("n = " + std::to_string(n));

    const double log2_threshold = -std::pow(2.0, beta * n);
    double eps = 0.0;
    const bool scalar = is_binary_erasure(W, &eps) &&
                        cfg.variant == KernelVariant::GroupDeterministic;

    const bool use_zmax = cfg.variant == KernelVariant::GroupDeterministic &&
                          is_prime(W.q());

    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(seed, t);
        if (scalar) {
            ErasureState st = ErasureState::start(eps);
            for (int i = 0; i < n; ++i) st.step(rng.coin());
            if (st.log2_value() <= log2_threshold) ++hits;
        } else {
            Channel cur = W;
            for (int i = 0; i < n; ++i) {
                SplitPair sp = apply_kernel(cur, cfg);
                Channel& half = rng.coin() ? sp.plus : sp.minus;
                cur = relabel_atomic(quantize_outputs(half, merge_budget).channel);
            }
            MetricsReport m = metrics(cur, profile_group(cfg));
            double tval = use_zmax ? m.z_max : m.z_avg;
            double l = tval > 0.0 ? std::log2(tval) : -HUGE_VAL;
            if (l <= log2_threshold) ++hits;
        }
    }
    RateEstimate est;
    est.trials = trials;
    est.probability = static_cast<double>(hits) / trials;
    est.halfwidth =
        1.96 * std::sqrt(est.probability * (1.0 - est.probability) / trials);
    return est;
}

void write_leaf_csv(std::ostream& os, const std::vector<LeafReport>& leaves,
                    const std::string& config_digest) {
    os << "# config " << config_digest << '\n';
    os << "path,I_normalized,z_avg,z_max,merge_loss\n";
    os.precision(12);
    for (const auto& l : leaves)
        os << l.path << ',' << l.metrics.capacity_normalized << ',' << l.metrics.z_avg
           << ',' << l.metrics.z_max << ',' << l.merge_loss << '\n';
}

} // namespace polarq
