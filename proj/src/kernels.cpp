#include "polarq/kernels.hpp"

#include "polarq/errors.hpp"
#include "polarq/simd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polarq {

std::string kernel_variant_name(KernelVariant v) {
    switch (v) {
        case KernelVariant::GroupDeterministic: return "group";
        case KernelVariant::RandomPermFull: return "perm";
        case KernelVariant::RandomPermFixZero: return "permfix0";
        case KernelVariant::MultiplierFull: return "mult";
        case KernelVariant::MultiplierHalf: return "multhalf";
    }
    return "?";
}

KernelVariant kernel_variant_from_name(const std::string& name) {
    if (name == "group") return KernelVariant::GroupDeterministic;
    if (name == "perm") return KernelVariant::RandomPermFull;
    if (name == "permfix0") return KernelVariant::RandomPermFixZero;
    if (name == "mult") return KernelVariant::MultiplierFull;
    if (name == "multhalf") return KernelVariant::MultiplierHalf;
    throw BadParam("unknown kernel variant '" + name + "'");
}

std::vector<int> NodeMap::image(int q, const FieldTable* F) const {
    std::vector<int> img(q);
    switch (kind) {
        case Kind::Identity:
            std::iota(img.begin(), img.end(), 0);
            break;
        case Kind::Perm:
            if (perm.size() != q) throw AlgebraMismatch("permutation size");
            img = perm.image;
            break;
        case Kind::Mult:
            if (!F) throw AlgebraMismatch("multiplier map needs a field");
            for (int u = 0; u < q; ++u) img[u] = F->mul(mult, u);
            break;
    }
    return img;
}

const GroupTable& KernelConfig::addition() const {
    if (!group) throw AlgebraMismatch("kernel config without addition table");
    return *group;
}

KernelConfig KernelConfig::make(KernelVariant v, int q) {
    KernelConfig cfg;
    cfg.variant = v;
    if (v == KernelVariant::MultiplierFull || v == KernelVariant::MultiplierHalf) {
        auto F = std::make_shared<FieldTable>(finite_field(q));
        cfg.group = std::make_shared<GroupTable>(F->additive_group());
        cfg.field = std::move(F);
    } else {
        cfg.group = std::make_shared<GroupTable>(cyclic_group(q));
    }
    return cfg;
}

namespace {

struct TaggedSigma {
    int tag; // -1 when the output carries no randomness component
    std::vector<int> image;
};

// Combined/split transform: x1 = u1 + u2, x2 = sigma_t(u2), averaged
// uniformly over the given sigmas. Outputs are losslessly merged.
SplitPair build_split(const Channel& W, const GroupTable& add,
                      const std::vector<TaggedSigma>& sigmas, NodeMap chosen_map) {
    const int q = W.q();
    const int m = W.output_count();
    if (add.q != q) throw AlgebraMismatch("addition table order vs channel q");
    for (const auto& s : sigmas)
        if (static_cast<int>(s.image.size()) != q)
            throw AlgebraMismatch("sigma image size vs channel q");

    const std::size_t T = sigmas.size();
    const double w = 1.0 / (static_cast<double>(q) * T);
    const std::uint64_t mm = static_cast<std::uint64_t>(m) * m;

    ColumnAccumulator minus_acc(q, std::min<std::size_t>(T * mm, 1u << 20));
    ColumnAccumulator plus_acc(q, std::min<std::size_t>(T * mm * q, 1u << 20));

    std::vector<double> block(static_cast<std::size_t>(q) * m);
    std::vector<double> col(q);
    std::vector<double> arow(q);

    for (std::size_t t = 0; t < T; ++t) {
        const auto& sig = sigmas[t].image;
        std::vector<const double*> prow(q);
        for (int u2 = 0; u2 < q; ++u2) prow[u2] = W.row(sig[u2]);

        for (int y1 = 0; y1 < m; ++y1) {
            // minus: block[u1][y2] = w * sum_u2 W(y1|u1+u2) * W(y2|sigma(u2))
            std::fill(block.begin(), block.end(), 0.0);
            for (int u1 = 0; u1 < q; ++u1) {
                double* dst = block.data() + static_cast<std::size_t>(u1) * m;
                for (int u2 = 0; u2 < q; ++u2) {
                    double c = w * W.at(add.add(u1, u2), y1);
                    if (c > 0.0) simd::axpy(dst, c, prow[u2], m);
                }
            }
            for (int y2 = 0; y2 < m; ++y2) {
                for (int u1 = 0; u1 < q; ++u1)
                    col[u1] = block[static_cast<std::size_t>(u1) * m + y2];
                minus_acc.add(col.data(),
                              (static_cast<std::uint64_t>(t) * m + y1) * m + y2);
            }

            // plus: for each u1, column over u2 indexed by y2
            for (int u1 = 0; u1 < q; ++u1) {
                for (int u2 = 0; u2 < q; ++u2) arow[u2] = w * W.at(add.add(u1, u2), y1);
                std::uint64_t base =
                    ((static_cast<std::uint64_t>(t) * m + y1) * q + u1) * m;
                for (int y2 = 0; y2 < m; ++y2) {
                    for (int u2 = 0; u2 < q; ++u2) col[u2] = arow[u2] * prow[u2][y2];
                    plus_acc.add(col.data(), base + y2);
                }
            }
        }
    }

    Channel minus = minus_acc.finish([&](std::uint64_t ord) {
        int y2 = static_cast<int>(ord % m);
        ord /= m;
        int y1 = static_cast<int>(ord % m);
        int t = static_cast<int>(ord / m);
        return OutputLabel::tuple({W.label(y1), W.label(y2)}, sigmas[t].tag);
    });
    Channel plus = plus_acc.finish([&](std::uint64_t ord) {
        int y2 = static_cast<int>(ord % m);
        ord /= m;
        int u1 = static_cast<int>(ord % q);
        ord /= q;
        int y1 = static_cast<int>(ord % m);
        int t = static_cast<int>(ord / m);
        return OutputLabel::tuple({W.label(y1), W.label(y2), OutputLabel(u1)},
                                  sigmas[t].tag);
    });

    return {merge_outputs_lossless(minus), merge_outputs_lossless(plus),
            std::move(chosen_map)};
}

// Z_d profile as a lookup: zd[d] = (1/q) sum_x Z(W_{x, x+d}), zd[0] = 1
std::vector<double> zd_table(const Channel& W, const GroupTable& G,
                             const std::vector<std::vector<double>>& zp) {
    const int q = W.q();
    std::vector<double> zd(q, 1.0);
    for (int d = 1; d < q; ++d) {
        double acc = 0.0;
        for (int x = 0; x < q; ++x) acc += zp[x][G.add(x, d)];
        zd[d] = acc / q;
    }
    return zd;
}

std::vector<std::vector<double>> pairwise_table(const Channel& W) {
    const int q = W.q();
    std::vector<std::vector<double>> zp(q, std::vector<double>(q, 1.0));
    for (int x = 0; x < q; ++x)
        for (int x2 = x + 1; x2 < q; ++x2)
            zp[x][x2] = zp[x2][x] = pairwise_z(W, x, x2);
    return zp;
}

// closed-form Z(W+) for the fixed map u2 -> sigma(u2):
// 1/(q(q-1)) sum_{x != x'} Z(W_{sigma(x),sigma(x')}) * Z_{x'-x}(W)
double z_plus_of_sigma(const std::vector<int>& sig,
                       const std::vector<std::vector<double>>& zp,
                       const std::vector<double>& zd, const GroupTable& G) {
    const int q = G.q;
    double acc = 0.0;
    for (int x = 0; x < q; ++x)
        for (int x2 = 0; x2 < q; ++x2) {
            if (x == x2) continue;
            int d = G.add(x2, G.neg(x));
            acc += zp[sig[x]][sig[x2]] * zd[d];
        }
    return acc / (static_cast<double>(q) * (q - 1));
}

} // namespace

SplitPair split_deterministic(const Channel& W, const GroupTable& G,
                              const std::optional<Permutation>& pi) {
    NodeMap nm;
    std::vector<int> img;
    if (pi) {
        if (pi->size() != W.q()) throw AlgebraMismatch("permutation size vs q");
        img = pi->image;
        if (!pi->is_identity()) {
            nm.kind = NodeMap::Kind::Perm;
            nm.perm = *pi;
        }
    } else {
        img = Permutation::identity(W.q()).image;
    }
    return build_split(W, G, {{-1, std::move(img)}}, std::move(nm));
}

SplitPair split_random_perm(const Channel& W, const GroupTable& G,
                            const std::vector<Permutation>& perms) {
    if (perms.empty()) throw EmptyPermutationSet("no permutations supplied");
    std::vector<TaggedSigma> sigmas;
    sigmas.reserve(perms.size());
    for (std::size_t t = 0; t < perms.size(); ++t) {
        if (perms[t].size() != W.q()) throw AlgebraMismatch("permutation size vs q");
        sigmas.push_back({static_cast<int>(t), perms[t].image});
    }
    return build_split(W, G, sigmas, NodeMap{});
}

SplitPair split_multiplier(const Channel& W, const FieldTable& F,
                           const std::vector<int>& mults) {
    if (F.q != W.q()) throw AlgebraMismatch("field order vs channel q");
    if (mults.empty()) throw InvalidMultiplier("empty multiplier set");
    std::vector<TaggedSigma> sigmas;
    sigmas.reserve(mults.size());
    for (std::size_t t = 0; t < mults.size(); ++t) {
        int r = mults[t];
        if (r <= 0 || r >= F.q) throw InvalidMultiplier(std::to_string(r));
        std::vector<int> img(F.q);
        for (int u = 0; u < F.q; ++u) img[u] = F.mul(r, u);
        sigmas.push_back({static_cast<int>(t), std::move(img)});
    }
    GroupTable add = F.additive_group();
    return build_split(W, add, sigmas, NodeMap{});
}

Permutation find_good_permutation(const Channel& W, const GroupTable& G, bool minimize) {
    const int q = W.q();
    if (G.q != q) throw GroupSizeMismatch("group order vs q");
    auto perms = permutation_set(q, false); // throws EnumerationTooLarge past q = 6
    auto zp = pairwise_table(W);
    auto zd = zd_table(W, G, zp);
    const double target = average_z(W);
    const double bound = target * target + 1e-12;

    const Permutation* best = nullptr;
    double best_z = 2.0;
    for (const auto& pi : perms) {
        double z = z_plus_of_sigma(pi.image, zp, zd, G);
        if (!minimize && z <= bound) return pi;
        if (z < best_z) {
            best_z = z;
            best = &pi;
        }
    }
    // the average over all permutations equals Z(W)^2, so the minimizer
    // always qualifies
    return *best;
}

int find_good_multiplier(const Channel& W, const FieldTable& F,
                         const std::vector<int>& mults, bool minimize) {
    if (F.q != W.q()) throw AlgebraMismatch("field order vs q");
    if (mults.empty()) throw InvalidMultiplier("empty multiplier set");
    GroupTable add = F.additive_group();
    auto zp = pairwise_table(W);
    auto zd = zd_table(W, add, zp);
    const double target = average_z(W);
    const double bound = target * target + 1e-12;

    int best = mults.front();
    double best_z = 2.0;
    for (int r : mults) {
        if (r <= 0 || r >= F.q) throw InvalidMultiplier(std::to_string(r));
        std::vector<int> img(F.q);
        for (int u = 0; u < F.q; ++u) img[u] = F.mul(r, u);
        double z = z_plus_of_sigma(img, zp, zd, add);
        if (!minimize && z <= bound) return r;
        if (z < best_z) {
            best_z = z;
            best = r;
        }
    }
    return best;
}

SplitPair apply_kernel(const Channel& W, const KernelConfig& cfg) {
    const GroupTable& add = cfg.addition();
    if (add.q != W.q()) throw AlgebraMismatch("kernel order vs channel q");

    switch (cfg.variant) {
        case KernelVariant::GroupDeterministic:
            return split_deterministic(W, add, cfg.fixed_perm);

        case KernelVariant::RandomPermFull:
        case KernelVariant::RandomPermFixZero: {
            bool fix0 = cfg.variant == KernelVariant::RandomPermFixZero;
            auto perms = permutation_set(W.q(), fix0);
            if (!cfg.pick_fixed) return split_random_perm(W, add, perms);
            auto zp = pairwise_table(W);
            auto zd = zd_table(W, add, zp);
            double bound = average_z(W);
            bound = bound * bound + 1e-12;
            const Permutation* chosen = nullptr;
            double best_z = 2.0;
            for (const auto& pi : perms) {
                double z = z_plus_of_sigma(pi.image, zp, zd, add);
                if (!cfg.minimize && z <= bound) {
                    chosen = &pi;
                    break;
                }
                if (z < best_z) {
                    best_z = z;
                    chosen = &pi;
                }
            }
            return split_deterministic(W, add, *chosen);
        }

        case KernelVariant::MultiplierFull:
        case KernelVariant::MultiplierHalf: {
            if (!cfg.field) throw AlgebraMismatch("multiplier kernel without field");
            const FieldTable& F = *cfg.field;
            std::vector<int> mults;
            if (cfg.variant == KernelVariant::MultiplierHalf) {
                mults = half_multiplier_set(F);
            } else {
                for (int r = 1; r < F.q; ++r) mults.push_back(r);
            }
            if (!cfg.pick_fixed) return split_multiplier(W, F, mults);
            int r = find_good_multiplier(W, F, mults, cfg.minimize);
            std::vector<int> img(F.q);
            for (int u = 0; u < F.q; ++u) img[u] = F.mul(r, u);
            NodeMap nm;
            nm.kind = NodeMap::Kind::Mult;
            nm.mult = r;
            return build_split(W, add, {{-1, std::move(img)}}, std::move(nm));
        }
    }
    throw Error("unreachable kernel variant");
}

std::vector<Channel> decompose_composite(const Channel& W, const std::vector<int>& radices) {
    const int q = W.q();
    const int m = W.output_count();
    long long prod = 1;
    for (int r : radices) {
        if (!is_prime(r)) throw BadFactorization(std::to_string(r) + " is not prime");
        prod *= r;
    }
    if (prod != q)
        throw BadFactorization("radices multiply to " + std::to_string(prod) +
                               ", q = " + std::to_string(q));

    const int L = static_cast<int>(radices.size());
    std::vector<Channel> out;
    out.reserve(L);

    // digits of every input letter, least significant first
    std::vector<std::vector<int>> digits(q, std::vector<int>(L));
    for (int x = 0; x < q; ++x) {
        int v = x;
        for (int i = 0; i < L; ++i) {
            digits[x][i] = v % radices[i];
            v /= radices[i];
        }
    }

    int prefix_count = 1;
    for (int i = 0; i < L; ++i) {
        const int qi = radices[i];
        const int mi = m * prefix_count;
        const double weight = static_cast<double>(qi) / q; // = prod_{j != i} 1/q_j
        std::vector<double> probs(static_cast<std::size_t>(qi) * mi, 0.0);
        for (int x = 0; x < q; ++x) {
            int prefix = 0;
            for (int j = i - 1; j >= 0; --j) prefix = prefix * radices[j] + digits[x][j];
            int ui = digits[x][i];
            for (int y = 0; y < m; ++y)
                probs[static_cast<std::size_t>(ui) * mi + y * prefix_count + prefix] +=
                    weight * W.at(x, y);
        }
        std::vector<OutputLabel> labels;
        labels.reserve(mi);
        for (int y = 0; y < m; ++y)
            for (int prefix = 0; prefix < prefix_count; ++prefix) {
                std::vector<OutputLabel> parts{W.label(y)};
                int pv = prefix;
                for (int j = 0; j < i; ++j) {
                    parts.emplace_back(pv % radices[j]);
                    pv /= radices[j];
                }
                labels.push_back(OutputLabel::tuple(std::move(parts)));
            }
        out.push_back(Channel::make(qi, mi, std::move(probs), std::move(labels)));
        prefix_count *= qi;
    }
    return out;
}

Channel shape_channel(const Channel& W, const std::vector<int>& f) {
    const int m2 = static_cast<int>(f.size());
    if (m2 < 2) throw BadMap("shaping alphabet must have size >= 2");
    for (int v : f)
        if (v < 0 || v >= W.q()) throw BadMap("image value " + std::to_string(v));
    std::vector<double> probs(static_cast<std::size_t>(m2) * W.output_count());
    for (int x2 = 0; x2 < m2; ++x2)
        for (int y = 0; y < W.output_count(); ++y)
            probs[static_cast<std::size_t>(x2) * W.output_count() + y] = W.at(f[x2], y);
    return Channel::make(m2, W.output_count(), std::move(probs), W.labels());
}

} // namespace polarq
