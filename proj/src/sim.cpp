#include "polarq/sim.hpp"

#include "polarq/codec.hpp"
#include "polarq/errors.hpp"
#include "polarq/rng.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace polarq {

Channel make_qsc(int q, double p) {
    if (q < 2) throw BadParam("qsc alphabet size " + std::to_string(q));
    if (!(p >= 0.0 && p <= 1.0)) throw BadParam("qsc flip probability " + std::to_string(p));
    std::vector<double> probs(static_cast<std::size_t>(q) * q, p / (q - 1));
    for (int x = 0; x < q; ++x) probs[static_cast<std::size_t>(x) * q + x] = 1.0 - p;
    return Channel::make(q, q, std::move(probs));
}

Channel make_qec(int q, double eps) {
    if (q < 2) throw BadParam("qec alphabet size " + std::to_string(q));
    if (!(eps >= 0.0 && eps <= 1.0)) throw BadParam("qec erasure probability " + std::to_string(eps));
    const int m = q + 1;
    std::vector<double> probs(static_cast<std::size_t>(q) * m, 0.0);
    for (int x = 0; x < q; ++x) {
        probs[static_cast<std::size_t>(x) * m + x] = 1.0 - eps;
        probs[static_cast<std::size_t>(x) * m + q] = eps;
    }
    return Channel::make(q, m, std::move(probs));
}

Channel make_counterexample4() {
    return make_channel({{1, 0}, {0, 1}, {1, 0}, {0, 1}});
}

Channel make_random_channel(int q, int m, std::uint64_t seed, std::uint64_t stream) {
    if (q < 2 || m < 1) throw BadParam("random channel shape");
    Rng rng = Rng::stream(seed, stream);
    std::vector<double> probs(static_cast<std::size_t>(q) * m);
    for (int x = 0; x < q; ++x) {
        double s = 0.0;
        for (int y = 0; y < m; ++y) {
            double v = 0.02 + rng.uniform();
            probs[static_cast<std::size_t>(x) * m + y] = v;
            s += v;
        }
        for (int y = 0; y < m; ++y) probs[static_cast<std::size_t>(x) * m + y] /= s;
    }
    return Channel::make(q, m, std::move(probs));
}

Channel channel_from_descriptor(const std::string& desc) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= desc.size()) {
        std::size_t next = desc.find(':', pos);
        if (next == std::string::npos) {
            parts.push_back(desc.substr(pos));
            break;
        }
        parts.push_back(desc.substr(pos, next - pos));
        pos = next + 1;
    }
    if (parts.empty() || parts[0].empty()) throw BadParam("empty channel descriptor");

    auto want = [&](std::size_t n) {
        if (parts.size() != n)
            throw BadParam("descriptor '" + desc + "' takes " + std::to_string(n - 1) +
                           " parameter(s)");
    };
    try {
        if (parts[0] == "qsc") {
            want(3);
            return make_qsc(std::stoi(parts[1]), std::stod(parts[2]));
        }
        if (parts[0] == "qec") {
            want(3);
            return make_qec(std::stoi(parts[1]), std::stod(parts[2]));
        }
        if (parts[0] == "counterexample4") {
            want(1);
            return make_counterexample4();
        }
        if (parts[0] == "file") {
            want(2);
            return load_channel(parts[1]);
        }
    } catch (const std::invalid_argument&) {
        throw BadParam("malformed number in descriptor '" + desc + "'");
    } catch (const std::out_of_range&) {
        throw BadParam("malformed number in descriptor '" + desc + "'");
    }
    if (parts.size() == 1) return load_channel(parts[0]); // bare path fallback
    throw BadParam("unknown channel kind '" + parts[0] + "'");
}

std::string config_digest(const std::string& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SimReport simulate_bler(const PolarCodeSpec& spec, const Channel& W,
                        std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) throw OutOfRange("trials = 0");
    if (W.q() != spec.q) throw SpecMismatch("channel q vs code q");

    const int N = spec.block_length();
    const int K = spec.dimension();
    const int m = W.output_count();

    SimReport rep;
    rep.trials = trials;
    rep.seed = seed;
    {
        std::ostringstream cfg;
        cfg << "simulate q=" << spec.q << " n=" << spec.n << " K=" << K << " kernel="
            << kernel_variant_name(spec.variant) << " trials=" << trials
            << " seed=" << seed;
        rep.config_digest = config_digest(cfg.str());
    }

    std::vector<int> msg(K), rx(N);
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(seed, t);
        for (int k = 0; k < K; ++k) msg[k] = rng.below(spec.q);
        std::vector<int> x = encode(spec, msg);
        for (int i = 0; i < N; ++i) rx[i] = rng.sample(W.row(x[i]), m);
        DecodeResult d = sc_decode(spec, W, rx);
        int wrong = 0;
        for (int k = 0; k < K; ++k)
            if (d.message[k] != msg[k]) ++wrong;
        if (wrong > 0) ++rep.block_errors;
        rep.symbol_errors += wrong;
    }
    rep.bler = static_cast<double>(rep.block_errors) / trials;
    rep.ser = K > 0 ? static_cast<double>(rep.symbol_errors) / (trials * static_cast<double>(K))
                    : 0.0;
    // Wilson score interval halfwidth at z = 1.96
    const double z = 1.96, nt = static_cast<double>(trials), p = rep.bler;
    rep.wilson_95_halfwidth =
        (z / (1.0 + z * z / nt)) * std::sqrt(p * (1.0 - p) / nt + z * z / (4.0 * nt * nt));
    return rep;
}

} // namespace polarq
