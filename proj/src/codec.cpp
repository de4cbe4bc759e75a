#include "polarq/codec.hpp"

#include "polarq/errors.hpp"
#include "polarq/simd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace polarq {

namespace {

struct KernelContext {
    const GroupTable* add = nullptr;
    const FieldTable* field = nullptr; // for multiplier sigma images
};

KernelContext context_of(const PolarCodeSpec& spec) {
    if (!spec.group) throw IncompleteSchedule("code spec carries no addition table");
    KernelContext ctx;
    ctx.add = spec.group.get();
    ctx.field = spec.field.get();
    return ctx;
}

std::vector<int> sigma_image(const NodeMap& nm, int q, const KernelContext& ctx) {
    return nm.image(q, ctx.field);
}

void check_schedule(const PolarCodeSpec& spec) {
    const std::size_t nodes = (1u << spec.n) - 1;
    if (spec.schedule.size() != nodes)
        throw IncompleteSchedule("expected " + std::to_string(nodes) +
                                 " schedule entries, have " +
                                 std::to_string(spec.schedule.size()));
}

void encode_rec(std::vector<int>& u, std::size_t lo, std::size_t len,
                std::size_t node_idx, const PolarCodeSpec& spec,
                const KernelContext& ctx, std::vector<int>& scratch) {
    if (len == 1) return;
    const std::size_t half = len / 2;
    encode_rec(u, lo, half, 2 * node_idx + 1, spec, ctx, scratch);
    encode_rec(u, lo + half, half, 2 * node_idx + 2, spec, ctx, scratch);
    auto sig = sigma_image(spec.schedule[node_idx], spec.q, ctx);
    // interleave: uses 2t and 2t+1 carry (c1_t + c2_t, sigma(c2_t))
    for (std::size_t t = 0; t < half; ++t) {
        int c1 = u[lo + t];
        int c2 = u[lo + half + t];
        scratch[2 * t] = ctx.add->add(c1, c2);
        scratch[2 * t + 1] = sig[c2];
    }
    std::copy(scratch.begin(), scratch.begin() + len, u.begin() + lo);
}

struct Decoder {
    const PolarCodeSpec& spec;
    KernelContext ctx;
    const std::vector<int>* genie = nullptr;
    DecodeTrace* trace = nullptr;
    std::vector<int> u_hat;

    explicit Decoder(const PolarCodeSpec& s) : spec(s), ctx(context_of(s)) {
        u_hat.assign(spec.block_length(), 0);
    }

    // L: len likelihood vectors (length q) for this node's channel uses.
    // Returns the re-encoded codeword symbols of this subtree.
    std::vector<int> run(std::vector<std::vector<double>>& L, std::size_t len,
                         std::size_t node_idx, std::size_t u_offset) {
        const int q = spec.q;
        if (len == 1) {
            const int i = static_cast<int>(u_offset);
            auto& v = L[0];
            normalize(v);
            int arg = 0;
            for (int x = 1; x < q; ++x)
                if (v[x] > v[arg]) arg = x;
            if (trace) {
                trace->likelihoods[i] = v;
                trace->decisions[i] = arg;
            }
            int decided;
            if (spec.is_frozen(i))
                decided = spec.frozen_values[i];
            else if (genie)
                decided = (*genie)[i];
            else
                decided = arg;
            u_hat[i] = decided;
            return {decided};
        }

        const std::size_t half = len / 2;
        auto sig = sigma_image(spec.schedule[node_idx], q, ctx);

        std::vector<std::vector<double>> sub(half, std::vector<double>(q));
        // minus combine: Lm[t](u1) = sum_u2 L[2t](u1+u2) * L[2t+1](sigma(u2))
        for (std::size_t t = 0; t < half; ++t) {
            const auto& a = L[2 * t];
            const auto& b = L[2 * t + 1];
            auto& dst = sub[t];
            std::fill(dst.begin(), dst.end(), 0.0);
            for (int u2 = 0; u2 < q; ++u2) {
                double bb = b[sig[u2]];
                if (bb == 0.0) continue;
                for (int u1 = 0; u1 < q; ++u1) dst[u1] += a[ctx.add->add(u1, u2)] * bb;
            }
            normalize(dst);
        }
        std::vector<int> c1 = run(sub, half, 2 * node_idx + 1, u_offset);

        // plus combine: Lp[t](u2) = L[2t](c1_t + u2) * L[2t+1](sigma(u2))
        for (std::size_t t = 0; t < half; ++t) {
            const auto& a = L[2 * t];
            const auto& b = L[2 * t + 1];
            auto& dst = sub[t];
            for (int u2 = 0; u2 < q; ++u2)
                dst[u2] = a[ctx.add->add(c1[t], u2)] * b[sig[u2]];
            normalize(dst);
        }
        std::vector<int> c2 = run(sub, half, 2 * node_idx + 2, u_offset + half);

        std::vector<int> x(len);
        for (std::size_t t = 0; t < half; ++t) {
            x[2 * t] = ctx.add->add(c1[t], c2[t]);
            x[2 * t + 1] = sig[c2[t]];
        }
        return x;
    }

    // A combined vector can go all-zero after a wrong earlier decision
    // (e.g. a guessed erasure contradicted later); the decoder then has no
    // information and falls back to the uniform vector.
    void normalize(std::vector<double>& v) const {
        double s = simd::sum(v.data(), v.size());
        if (!(s > 0.0)) {
            std::fill(v.begin(), v.end(), 1.0 / v.size());
            return;
        }
        double inv = 1.0 / s;
        for (double& x : v) x *= inv;
    }
};

} // namespace

std::vector<int> assemble_u(const PolarCodeSpec& spec, const std::vector<int>& msg) {
    if (msg.size() != spec.info_set.size())
        throw LengthMismatch("message length " + std::to_string(msg.size()) +
                             ", expected " + std::to_string(spec.info_set.size()));
    if (spec.frozen_values.size() != static_cast<std::size_t>(spec.block_length()))
        throw IncompleteSchedule("frozen value vector has wrong length");
    std::vector<int> u = spec.frozen_values;
    for (std::size_t k = 0; k < msg.size(); ++k) {
        int s = msg[k];
        if (s < 0 || s >= spec.q) throw OutOfRange("symbol " + std::to_string(s));
        u[spec.info_set[k]] = s;
    }
    return u;
}

std::vector<int> extract_message(const PolarCodeSpec& spec, const std::vector<int>& u) {
    std::vector<int> msg;
    msg.reserve(spec.info_set.size());
    for (int i : spec.info_set) msg.push_back(u[i]);
    return msg;
}

std::vector<int> encode(const PolarCodeSpec& spec, const std::vector<int>& msg) {
    check_schedule(spec);
    KernelContext ctx = context_of(spec);
    std::vector<int> u = assemble_u(spec, msg);
    std::vector<int> scratch(u.size());
    encode_rec(u, 0, u.size(), 0, spec, ctx, scratch);
    return u;
}

DecodeTrace sc_decode_trace(const PolarCodeSpec& spec,
                            const std::vector<std::vector<double>>& likelihoods,
                            const std::vector<int>* genie_u) {
    check_schedule(spec);
    const std::size_t N = spec.block_length();
    if (likelihoods.size() != N)
        throw LengthMismatch("got " + std::to_string(likelihoods.size()) +
                             " likelihood vectors, expected " + std::to_string(N));
    for (const auto& v : likelihoods) {
        if (v.size() != static_cast<std::size_t>(spec.q))
            throw LengthMismatch("likelihood vector size vs q");
        bool nonzero = false;
        for (double x : v) {
            if (x < 0.0) throw DegenerateLikelihood("negative likelihood entry");
            if (x > 0.0) nonzero = true;
        }
        if (!nonzero) throw DegenerateLikelihood("all-zero likelihood vector");
    }
    if (genie_u && genie_u->size() != N)
        throw LengthMismatch("genie vector length");

    Decoder dec(spec);
    DecodeTrace trace;
    trace.likelihoods.assign(N, {});
    trace.decisions.assign(N, 0);
    dec.trace = &trace;
    dec.genie = genie_u;
    auto L = likelihoods;
    dec.run(L, N, 0, 0);
    return trace;
}

DecodeResult sc_decode_likelihoods(const PolarCodeSpec& spec,
                                   const std::vector<std::vector<double>>& likelihoods) {
    check_schedule(spec);
    const std::size_t N = spec.block_length();
    if (likelihoods.size() != N)
        throw LengthMismatch("got " + std::to_string(likelihoods.size()) +
                             " likelihood vectors, expected " + std::to_string(N));
    Decoder dec(spec);
    auto L = likelihoods;
    dec.run(L, N, 0, 0);
    DecodeResult res;
    res.u = dec.u_hat;
    res.message = extract_message(spec, res.u);
    return res;
}

DecodeResult sc_decode(const PolarCodeSpec& spec, const Channel& W,
                       const std::vector<int>& rx) {
    if (W.q() != spec.q) throw SpecMismatch("channel q vs code q");
    const std::size_t N = spec.block_length();
    if (rx.size() != N) throw LengthMismatch("received word length");
    std::vector<std::vector<double>> L(N);
    for (std::size_t t = 0; t < N; ++t) {
        if (rx[t] < 0 || rx[t] >= W.output_count())
            throw IndexOutOfRange("output index " + std::to_string(rx[t]));
        L[t] = W.column(rx[t]);
    }
    return sc_decode_likelihoods(spec, L);
}

// ---- multi-level ----

namespace {

void check_multilevel(const MultilevelCode& code) {
    if (code.radices.empty() || code.levels.size() != code.radices.size())
        throw BadFactorization("level count vs radix count");
    int n = code.levels.front().n;
    for (std::size_t i = 0; i < code.levels.size(); ++i) {
        if (code.levels[i].q != code.radices[i])
            throw SpecMismatch("level " + std::to_string(i) + " alphabet");
        if (code.levels[i].n != n) throw SpecMismatch("level block lengths differ");
    }
}

} // namespace

std::vector<int> multilevel_encode(const MultilevelCode& code,
                                   const std::vector<std::vector<int>>& msgs) {
    check_multilevel(code);
    if (msgs.size() != code.levels.size()) throw LengthMismatch("message plane count");
    const int N = code.levels.front().block_length();
    std::vector<int> x(N, 0);
    int place = 1;
    for (std::size_t i = 0; i < code.levels.size(); ++i) {
        std::vector<int> c = encode(code.levels[i], msgs[i]);
        for (int t = 0; t < N; ++t) x[t] += place * c[t];
        place *= code.radices[i];
    }
    return x;
}

MultilevelDecodeResult multilevel_decode(const MultilevelCode& code, const Channel& W,
                                         const std::vector<int>& rx) {
    check_multilevel(code);
    long long prod = 1;
    for (int r : code.radices) prod *= r;
    if (prod != W.q()) throw BadFactorization("radices vs channel q");
    const int N = code.levels.front().block_length();
    if (rx.size() != static_cast<std::size_t>(N)) throw LengthMismatch("received length");

    // subchannel matrices W^(i); outputs indexed y * prefix_count + prefix
    std::vector<Channel> sub = decompose_composite(W, code.radices);

    MultilevelDecodeResult res;
    res.codeword.assign(N, 0);
    std::vector<std::vector<int>> plane(code.levels.size());
    std::vector<int> prefix(N, 0); // decided digit prefix per position
    int prefix_count = 1;

    for (std::size_t i = 0; i < code.levels.size(); ++i) {
        const Channel& Wi = sub[i];
        std::vector<std::vector<double>> L(N);
        for (int t = 0; t < N; ++t)
            L[t] = Wi.column(rx[t] * prefix_count + prefix[t]);
        DecodeResult d = sc_decode_likelihoods(code.levels[i], L);
        res.messages.push_back(d.message);
        // re-encode the plane to recover its codeword digits
        std::vector<int> c = encode(code.levels[i], d.message);
        for (int t = 0; t < N; ++t) {
            prefix[t] += prefix_count * c[t];
            res.codeword[t] += prefix_count * c[t];
        }
        prefix_count *= code.radices[i];
    }
    return res;
}

// ---- serialization ----

void save_code_spec(std::ostream& os, const PolarCodeSpec& spec) {
    os << "polarq-spec 1\n";
    os << "q " << spec.q << '\n';
    os << "n " << spec.n << '\n';
    os << "kernel " << kernel_variant_name(spec.variant) << '\n';
    for (std::size_t i = 0; i < spec.schedule.size(); ++i) {
        const NodeMap& nm = spec.schedule[i];
        os << "node " << i << ' ';
        switch (nm.kind) {
            case NodeMap::Kind::Identity:
                os << "id";
                break;
            case NodeMap::Kind::Perm:
                os << "perm";
                for (int v : nm.perm.image) os << ' ' << v;
                break;
            case NodeMap::Kind::Mult:
                os << "mult " << nm.mult;
                break;
        }
        os << '\n';
    }
    os << "info";
    for (int i : spec.info_set) os << ' ' << i;
    os << '\n';
    os << "frozen";
    for (int v : spec.frozen_values) os << ' ' << v;
    os << '\n';
    os << "end\n";
}

PolarCodeSpec load_code_spec(std::istream& is) {
    PolarCodeSpec spec;
    std::string word;
    int version = 0;
    if (!(is >> word >> version) || word != "polarq-spec" || version != 1)
        throw FileParseError("not a polarq-spec v1 document");
    bool have_q = false, have_n = false;
    std::string kernel_name = "group";
    std::vector<std::pair<std::size_t, NodeMap>> nodes;
    while (is >> word) {
        if (word == "end") break;
        if (word == "q") {
            is >> spec.q;
            have_q = true;
        } else if (word == "n") {
            is >> spec.n;
            have_n = true;
        } else if (word == "kernel") {
            is >> kernel_name;
        } else if (word == "node") {
            if (!have_q || !have_n) throw FileParseError("node before q/n");
            std::size_t idx;
            std::string kind;
            is >> idx >> kind;
            NodeMap nm;
            if (kind == "id") {
                nm.kind = NodeMap::Kind::Identity;
            } else if (kind == "perm") {
                nm.kind = NodeMap::Kind::Perm;
                nm.perm.image.resize(spec.q);
                for (int& v : nm.perm.image) is >> v;
            } else if (kind == "mult") {
                nm.kind = NodeMap::Kind::Mult;
                is >> nm.mult;
            } else {
                throw FileParseError("unknown node kind '" + kind + "'");
            }
            nodes.emplace_back(idx, std::move(nm));
        } else if (word == "info") {
            if (!have_q || !have_n) throw FileParseError("info before q/n");
            std::string line;
            std::getline(is, line);
            std::istringstream ls(line);
            int v;
            while (ls >> v) spec.info_set.push_back(v);
        } else if (word == "frozen") {
            std::string line;
            std::getline(is, line);
            std::istringstream ls(line);
            int v;
            while (ls >> v) spec.frozen_values.push_back(v);
        } else {
            throw FileParseError("unexpected token '" + word + "'");
        }
    }
    if (!have_q || !have_n || spec.q < 2 || spec.n < 0)
        throw FileParseError("missing or bad q/n");
    spec.variant = kernel_variant_from_name(kernel_name);
    const std::size_t node_count = (1u << spec.n) - 1;
    spec.schedule.assign(node_count, NodeMap{});
    for (auto& [idx, nm] : nodes) {
        if (idx >= node_count) throw FileParseError("node index out of range");
        spec.schedule[idx] = std::move(nm);
    }
    if (spec.frozen_values.size() != static_cast<std::size_t>(spec.block_length()))
        throw FileParseError("frozen vector length");
    for (int i : spec.info_set)
        if (i < 0 || i >= spec.block_length()) throw FileParseError("info index range");
    if (!std::is_sorted(spec.info_set.begin(), spec.info_set.end()))
        throw FileParseError("info set not ascending");

    if (spec.variant == KernelVariant::MultiplierFull ||
        spec.variant == KernelVariant::MultiplierHalf) {
        auto F = std::make_shared<FieldTable>(finite_field(spec.q));
        spec.group = std::make_shared<GroupTable>(F->additive_group());
        spec.field = std::move(F);
    } else {
        spec.group = std::make_shared<GroupTable>(cyclic_group(spec.q));
    }
    return spec;
}

void save_code_spec_file(const std::string& path, const PolarCodeSpec& spec) {
    std::ofstream out(path);
    if (!out) throw FileParseError("cannot open " + path + " for writing");
    save_code_spec(out, spec);
}

PolarCodeSpec load_code_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileParseError("cannot open " + path);
    return load_code_spec(in);
}

} // namespace polarq
