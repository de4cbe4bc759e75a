#include "polarq/channel.hpp"

#include "polarq/errors.hpp"
#include "polarq/simd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

namespace polarq {

namespace {

constexpr double kRowSumTol = 1e-9;
constexpr double kProportionalTol = 1e-10;

double xlog_ratio_sum(const double* p, const double* s, std::size_t n) {
    // sum p_i * ln(p_i / s_i), 0 log 0 = 0
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (p[i] > 0.0) acc += p[i] * std::log(p[i] / s[i]);
    return acc;
}

// capacity contribution (nats, before the 1/q input weight on the marginal)
// of one output column c: sum_x (1/q) c_x ln(c_x / mean(c))
double column_cap_term(const double* c, int q) {
    double mean = simd::sum(c, q) / q;
    if (mean <= 0.0) return 0.0;
    double acc = 0.0;
    for (int x = 0; x < q; ++x)
        if (c[x] > 0.0) acc += c[x] * std::log(c[x] / mean);
    return acc / q;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

Channel Channel::make(int q, int m, std::vector<double> probs,
                      std::vector<OutputLabel> labels) {
    if (q < 2) throw EmptyAlphabet("input alphabet size " + std::to_string(q));
    if (m < 1) throw EmptyAlphabet("output alphabet is empty");
    if (probs.size() != static_cast<std::size_t>(q) * m)
        throw Error("matrix size does not match q x m");
    for (double& v : probs) {
        if (v < 0.0) {
            if (v < -1e-12) throw NegativeEntry(std::to_string(v));
            v = 0.0;
        }
    }
    for (int x = 0; x < q; ++x) {
        double* r = probs.data() + static_cast<std::size_t>(x) * m;
        double s = simd::sum(r, m);
        if (std::fabs(s - 1.0) > kRowSumTol)
            throw NonStochasticRow("row " + std::to_string(x) + " sums to " +
                                   std::to_string(s));
        double inv = 1.0 / s;
        for (int y = 0; y < m; ++y) r[y] *= inv;
    }
    if (labels.empty()) {
        labels.reserve(m);
        for (int y = 0; y < m; ++y) labels.emplace_back(y);
    } else if (labels.size() != static_cast<std::size_t>(m)) {
        throw Error("label count does not match output count");
    } else {
        std::vector<const OutputLabel*> sorted(m);
        for (int y = 0; y < m; ++y) sorted[y] = &labels[y];
        std::sort(sorted.begin(), sorted.end(),
                  [](const OutputLabel* a, const OutputLabel* b) { return *a < *b; });
        for (int y = 0; y + 1 < m; ++y)
            if (*sorted[y] == *sorted[y + 1])
                throw Error("duplicate output label " + sorted[y]->str());
    }
    Channel W;
    W.q_ = q;
    W.m_ = m;
    W.p_ = std::move(probs);
    W.labels_ = std::move(labels);
    return W;
}

std::vector<double> Channel::column(int y) const {
    if (y < 0 || y >= m_) throw IndexOutOfRange("output " + std::to_string(y));
    std::vector<double> c(q_);
    for (int x = 0; x < q_; ++x) c[x] = at(x, y);
    return c;
}

Channel make_channel(const std::vector<std::vector<double>>& rows,
                     std::vector<OutputLabel> labels) {
    if (rows.empty()) throw EmptyAlphabet("no rows");
    const int q = static_cast<int>(rows.size());
    const int m = static_cast<int>(rows[0].size());
    std::vector<double> probs;
    probs.reserve(static_cast<std::size_t>(q) * m);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != m) throw Error("ragged matrix");
        probs.insert(probs.end(), r.begin(), r.end());
    }
    return Channel::make(q, m, std::move(probs), std::move(labels));
}

std::pair<double, double> symmetric_capacity(const Channel& W) {
    const int q = W.q();
    const int m = W.output_count();
    std::vector<double> marginal(m, 0.0);
    for (int x = 0; x < q; ++x) simd::axpy(marginal.data(), 1.0 / q, W.row(x), m);
    double nats = 0.0;
    for (int x = 0; x < q; ++x)
        nats += xlog_ratio_sum(W.row(x), marginal.data(), m) / q;
    nats = std::max(0.0, nats);
    return {nats / std::log(static_cast<double>(q)), nats};
}

double pairwise_z(const Channel& W, int x, int x2) {
    if (x == x2) throw EqualInputs(std::to_string(x));
    if (x < 0 || x2 < 0 || x >= W.q() || x2 >= W.q())
        throw IndexOutOfRange(std::to_string(x) + "," + std::to_string(x2));
    double z = simd::sum_sqrt_prod(W.row(x), W.row(x2), W.output_count());
    return std::clamp(z, 0.0, 1.0);
}

double average_z(const Channel& W) {
    const int q = W.q();
    double acc = 0.0;
    for (int x = 0; x < q; ++x)
        for (int x2 = x + 1; x2 < q; ++x2) acc += pairwise_z(W, x, x2);
    return std::clamp(2.0 * acc / (static_cast<double>(q) * (q - 1)), 0.0, 1.0);
}

std::pair<std::vector<double>, double> z_profile(const Channel& W, const GroupTable& G) {
    const int q = W.q();
    if (G.q != q) throw GroupSizeMismatch("group order " + std::to_string(G.q) +
                                          " vs q " + std::to_string(q));
    std::vector<double> prof(q - 1);
    double zmax = 0.0;
    for (int d = 1; d < q; ++d) {
        double acc = 0.0;
        for (int x = 0; x < q; ++x) acc += pairwise_z(W, x, G.add(x, d));
        prof[d - 1] = std::clamp(acc / q, 0.0, 1.0);
        zmax = std::max(zmax, prof[d - 1]);
    }
    return {std::move(prof), zmax};
}

double ml_error_probability(const Channel& W) {
    const int q = W.q();
    const int m = W.output_count();
    double correct = 0.0;
    for (int y = 0; y < m; ++y) {
        double best = 0.0;
        for (int x = 0; x < q; ++x) best = std::max(best, W.at(x, y));
        correct += best;
    }
    return std::clamp(1.0 - correct / q, 0.0, 1.0);
}

std::pair<double, double> capacity_bounds_from_z(double z, int q) {
    if (q < 2) throw OutOfRange("q = " + std::to_string(q));
    if (z < -1e-12 || z > 1.0 + 1e-12) throw OutOfRange("z = " + std::to_string(z));
    z = std::clamp(z, 0.0, 1.0);
    const double lq = std::log(static_cast<double>(q));
    double lower = std::log(q / (1.0 + (q - 1) * z)) / lq;
    double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    double up_cut = std::log(q / 2.0) / lq + (std::log(2.0) / lq) * s;
    double up_l1 = 2.0 * (q - 1) * s / lq;
    return {lower, std::min(up_cut, up_l1)};
}

namespace {

struct WorkColumn {
    std::vector<double> col; // length q
    double mass = 0.0;
    int first_index = 0;
};

std::vector<WorkColumn> extract_columns(const Channel& W) {
    const int q = W.q();
    const int m = W.output_count();
    std::vector<WorkColumn> cols;
    cols.reserve(m);
    for (int y = 0; y < m; ++y) {
        WorkColumn c;
        c.col = W.column(y);
        c.mass = simd::sum(c.col.data(), q);
        c.first_index = y;
        cols.push_back(std::move(c));
    }
    return cols;
}

Channel channel_of_columns(const Channel& W, const std::vector<WorkColumn>& cols) {
    const int q = W.q();
    const int m = static_cast<int>(cols.size());
    std::vector<double> probs(static_cast<std::size_t>(q) * m);
    std::vector<OutputLabel> labels(m);
    for (int j = 0; j < m; ++j) {
        for (int x = 0; x < q; ++x)
            probs[static_cast<std::size_t>(x) * m + j] = cols[j].col[x];
        labels[j] = W.label(cols[j].first_index);
    }
    return Channel::make(q, m, std::move(probs), std::move(labels));
}

bool proportional(const std::vector<double>& a, double ma, const std::vector<double>& b,
                  double mb) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        double u = a[i] / ma, v = b[i] / mb;
        if (std::fabs(u - v) > kProportionalTol * std::max({u, v, 1e-3}))
            return false;
    }
    return true;
}

// order columns by normalized likelihood direction, exact lexicographic
std::vector<std::size_t> direction_order(const std::vector<WorkColumn>& cols) {
    std::vector<std::size_t> idx(cols.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& ca = cols[a];
        const auto& cb = cols[b];
        for (std::size_t i = 0; i < ca.col.size(); ++i) {
            double u = ca.col[i] / ca.mass, v = cb.col[i] / cb.mass;
            if (u != v) return u < v;
        }
        return ca.first_index < cb.first_index;
    });
    return idx;
}

void merge_into(WorkColumn& dst, const WorkColumn& src) {
    for (std::size_t i = 0; i < dst.col.size(); ++i) dst.col[i] += src.col[i];
    dst.mass += src.mass;
    dst.first_index = std::min(dst.first_index, src.first_index);
}

// merge cost = capacity decrease of combining two columns, with the two
// single-column terms precomputed; m is scratch
double merge_cost_cached(const WorkColumn& a, double cap_a, const WorkColumn& b,
                         double cap_b, int q, double* m) {
    for (int x = 0; x < q; ++x) m[x] = a.col[x] + b.col[x];
    return cap_a + cap_b - column_cap_term(m, q);
}

void sort_by_first_index(std::vector<WorkColumn>& cols) {
    std::sort(cols.begin(), cols.end(), [](const WorkColumn& a, const WorkColumn& b) {
        return a.first_index < b.first_index;
    });
}

// Coarse stage for very large alphabets: bucket columns by their
// normalized likelihood vector on a uniform grid and merge each bucket,
// doubling the cell size until at most `target` buckets remain. Capacity
// loss is bounded by the final cell diameter, which stays small because
// the exact greedy stage below still has 4x the budget to work with.
void grid_coarsen(std::vector<WorkColumn>& cols, std::size_t target, int q) {
    double cell = 1.0 / 4096.0;
    while (cols.size() > target && cell < 1.0) {
        std::map<std::vector<long long>, std::size_t> buckets;
        std::vector<WorkColumn> next;
        next.reserve(target * 2);
        std::vector<long long> key(q);
        for (auto& wc : cols) {
            for (int x = 0; x < q; ++x)
                key[x] = static_cast<long long>(std::floor(wc.col[x] / wc.mass / cell));
            auto [it, inserted] = buckets.try_emplace(key, next.size());
            if (inserted)
                next.push_back(std::move(wc));
            else
                merge_into(next[it->second], wc);
        }
        cols = std::move(next);
        cell *= 2.0;
    }
    sort_by_first_index(cols);
}

// exact greedy: repeatedly merge the global minimum-cost pair
void exact_greedy_merge(std::vector<WorkColumn>& cols, std::size_t target, int q) {
    struct Entry {
        double cost;
        std::uint32_t a, b;       // column slots
        std::uint32_t va, vb;     // versions at computation time
    };
    auto cmp = [](const Entry& x, const Entry& y) {
        if (x.cost != y.cost) return x.cost > y.cost;
        if (x.a != y.a) return x.a > y.a;
        return x.b > y.b;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    std::vector<std::uint32_t> version(cols.size(), 0);
    std::vector<char> alive(cols.size(), 1);
    std::vector<double> cap(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        cap[j] = column_cap_term(cols[j].col.data(), q);
    std::vector<double> scratch(q);
    std::size_t remaining = cols.size();
    for (std::uint32_t a = 0; a < cols.size(); ++a)
        for (std::uint32_t b = a + 1; b < cols.size(); ++b)
            heap.push({merge_cost_cached(cols[a], cap[a], cols[b], cap[b], q,
                                         scratch.data()),
                       a, b, 0, 0});
    while (remaining > target && !heap.empty()) {
        Entry e = heap.top();
        heap.pop();
        if (!alive[e.a] || !alive[e.b] || version[e.a] != e.va || version[e.b] != e.vb)
            continue;
        merge_into(cols[e.a], cols[e.b]);
        alive[e.b] = 0;
        ++version[e.a];
        cap[e.a] = column_cap_term(cols[e.a].col.data(), q);
        --remaining;
        for (std::uint32_t c = 0; c < cols.size(); ++c) {
            if (!alive[c] || c == e.a) continue;
            std::uint32_t lo = std::min(c, e.a), hi = std::max(c, e.a);
            heap.push({merge_cost_cached(cols[lo], cap[lo], cols[hi], cap[hi], q,
                                         scratch.data()),
                       lo, hi, version[lo], version[hi]});
        }
    }
    std::vector<WorkColumn> next;
    next.reserve(remaining);
    for (std::size_t j = 0; j < cols.size(); ++j)
        if (alive[j]) next.push_back(std::move(cols[j]));
    cols = std::move(next);
}

} // namespace

Channel merge_outputs_lossless(const Channel& W) {
    auto cols = extract_columns(W);
    std::vector<WorkColumn> kept;
    kept.reserve(cols.size());
    auto order = direction_order(cols);
    for (std::size_t i = 0; i < order.size();) {
        WorkColumn group = std::move(cols[order[i]]);
        std::size_t j = i + 1;
        for (; j < order.size(); ++j) {
            const WorkColumn& cand = cols[order[j]];
            if (!proportional(group.col, group.mass, cand.col, cand.mass)) break;
            merge_into(group, cand);
        }
        if (group.mass > 0.0) kept.push_back(std::move(group));
        i = j;
    }
    if (kept.empty()) throw EmptyAlphabet("all outputs have zero mass");
    sort_by_first_index(kept);
    return channel_of_columns(W, kept);
}

QuantizeResult quantize_outputs(const Channel& W, int budget) {
    if (budget < W.q()) throw BudgetTooSmall(std::to_string(budget));
    if (W.output_count() <= budget) return {W, 0.0};

    double cap_before = symmetric_capacity(W).second;
    Channel merged = merge_outputs_lossless(W);
    auto cols = extract_columns(merged);

    // large alphabets: grid-coarsen first, then finish with exact greedy
    // selection; the quadratic exact stage stays within a small multiple
    // of the budget
    constexpr std::size_t kExactLimit = 2048;
    std::size_t coarse_target =
        std::max<std::size_t>(budget, std::min<std::size_t>(kExactLimit, 4ul * budget));
    if (cols.size() > coarse_target) grid_coarsen(cols, coarse_target, merged.q());
    if (cols.size() > static_cast<std::size_t>(budget))
        exact_greedy_merge(cols, budget, merged.q());

    sort_by_first_index(cols);
    Channel out = channel_of_columns(merged, cols);
    double cap_after = symmetric_capacity(out).second;
    return {std::move(out), std::max(0.0, cap_before - cap_after)};
}

bool is_equidistant(const Channel& W, double tol) {
    if (tol < 0.0) throw OutOfRange("tol = " + std::to_string(tol));
    const int q = W.q();
    double lo = 1.0, hi = 0.0;
    for (int x = 0; x < q; ++x)
        for (int x2 = x + 1; x2 < q; ++x2) {
            double z = pairwise_z(W, x, x2);
            lo = std::min(lo, z);
            hi = std::max(hi, z);
        }
    return hi - lo <= tol;
}

Channel relabel_atomic(const Channel& W) {
    std::vector<double> probs(W.row(0), W.row(0) + static_cast<std::size_t>(W.q()) * W.output_count());
    return Channel::make(W.q(), W.output_count(), std::move(probs));
}

MetricsReport metrics(const Channel& W, const GroupTable* G) {
    MetricsReport r;
    auto [norm, nats] = symmetric_capacity(W);
    r.capacity_normalized = norm;
    r.capacity_nats = nats;
    r.z_avg = average_z(W);
    r.ml_error = ml_error_probability(W);
    if (G) {
        auto [prof, zmax] = z_profile(W, *G);
        r.z_profile = std::move(prof);
        r.z_max = zmax;
    } else {
        double zmax = 0.0;
        for (int x = 0; x < W.q(); ++x)
            for (int x2 = x + 1; x2 < W.q(); ++x2)
                zmax = std::max(zmax, pairwise_z(W, x, x2));
        r.z_max = zmax;
    }
    return r;
}

Channel parse_channel(std::istream& in) {
    std::string line;
    std::vector<double> values;
    int q = -1, m = -1;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (q < 0) {
            if (!(ls >> q >> m)) {
                if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
                    q = -1;
                    continue;
                }
                throw FileParseError("expected header line 'q m'");
            }
            if (q < 2 || m < 1) throw FileParseError("bad dimensions in header");
            continue;
        }
        double v;
        while (ls >> v) values.push_back(v);
    }
    if (q < 0) throw FileParseError("missing header line 'q m'");
    if (values.size() != static_cast<std::size_t>(q) * m)
        throw FileParseError("expected " + std::to_string(q * m) + " entries, got " +
                             std::to_string(values.size()));
    try {
        return Channel::make(q, m, std::move(values));
    } catch (const Error& e) {
        throw FileParseError(e.what());
    }
}

Channel load_channel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileParseError("cannot open " + path);
    return parse_channel(in);
}

void save_channel(const Channel& W, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FileParseError("cannot open " + path + " for writing");
    out.precision(17);
    out << W.q() << ' ' << W.output_count() << '\n';
    for (int x = 0; x < W.q(); ++x) {
        for (int y = 0; y < W.output_count(); ++y)
            out << (y ? " " : "") << W.at(x, y);
        out << '\n';
    }
}

ColumnAccumulator::ColumnAccumulator(int q, std::size_t expected_columns) : q_(q) {
    std::size_t sz = 64;
    while (sz < expected_columns * 2) sz <<= 1;
    slots_.assign(sz, 0);
    key_.resize(q);
}

void ColumnAccumulator::rehash(std::size_t new_size) {
    slots_.assign(new_size, 0);
    const std::size_t mask = new_size - 1;
    for (std::uint32_t id = 1; id <= groups_.size(); ++id) {
        std::size_t pos = groups_[id - 1].digest & mask;
        while (slots_[pos]) pos = (pos + 1) & mask;
        slots_[pos] = id;
    }
}

void ColumnAccumulator::add(const double* col, std::uint64_t ordinal) {
    double mass = simd::sum(col, q_);
    if (mass <= 1e-300) return;
    const double inv = 1.0 / mass;
    std::uint64_t digest = 0x243f6a8885a308d3ULL;
    for (int x = 0; x < q_; ++x) {
        key_[x] = llround(col[x] * inv * 1e13);
        digest = mix64(digest ^ static_cast<std::uint64_t>(key_[x]));
    }
    const std::size_t mask = slots_.size() - 1;
    std::size_t pos = digest & mask;
    while (true) {
        std::uint32_t id = slots_[pos];
        if (id == 0) {
            Group g;
            g.col.assign(col, col + q_);
            g.key = key_;
            g.first_ordinal = ordinal;
            g.digest = digest;
            groups_.push_back(std::move(g));
            slots_[pos] = static_cast<std::uint32_t>(groups_.size());
            if (groups_.size() * 10 > slots_.size() * 7) rehash(slots_.size() * 2);
            return;
        }
        Group& g = groups_[id - 1];
        if (g.digest == digest && g.key == key_) {
            for (int x = 0; x < q_; ++x) g.col[x] += col[x];
            return;
        }
        pos = (pos + 1) & mask;
    }
}

std::vector<std::size_t> ColumnAccumulator::finish_order() const {
    // groups were created in candidate order, which is already canonical
    std::vector<std::size_t> order(groups_.size());
    std::iota(order.begin(), order.end(), 0);
    return order;
}

Channel ColumnAccumulator::channel_from_columns(int m, std::vector<double> probs,
                                                std::vector<OutputLabel> labels) const {
    return Channel::make(q_, m, std::move(probs), std::move(labels));
}

} // namespace polarq
