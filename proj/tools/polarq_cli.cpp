#include "polarq/codec.hpp"
#include "polarq/errors.hpp"
#include "polarq/kernels.hpp"
#include "polarq/polar.hpp"
#include "polarq/sim.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace polarq;

struct Options {
    std::string channel;
    std::string kernel = "group";
    std::string spec_path;
    std::string input; // message / received word, inline or @file
    std::string out;
    int levels = 4;
    int k = -1;
    double rate = -1.0;
    double delta = 0.05;
    double beta = 0.5;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    int merge_budget = 4096;
};

KernelConfig kernel_config(const Options& opt, int q) {
    return KernelConfig::make(kernel_variant_from_name(opt.kernel), q);
}

int resolve_k(const Options& opt, int N) {
    if (opt.k >= 0 && opt.rate >= 0.0)
        throw BadParam("--k and --rate are mutually exclusive");
    if (opt.k >= 0) return opt.k;
    if (opt.rate >= 0.0) {
        if (opt.rate > 1.0) throw BadParam("--rate above 1");
        return static_cast<int>(std::lround(opt.rate * N));
    }
    throw BadParam("one of --k / --rate is required");
}

// "1 0 2" inline, or @path to read whitespace-separated integers from a file
std::vector<int> read_symbols(const std::string& input) {
    std::vector<int> out;
    std::istringstream inline_stream(input);
    std::ifstream file_stream;
    std::istream* in = &inline_stream;
    if (!input.empty() && input[0] == '@') {
        file_stream.open(input.substr(1));
        if (!file_stream) throw FileParseError("cannot open " + input.substr(1));
        in = &file_stream;
    }
    int v;
    while (*in >> v) out.push_back(v);
    if (in->fail() && !in->eof()) throw FileParseError("non-integer symbol in input");
    return out;
}

// every artifact goes through here so each carries the digest comment
void write_artifact(const std::string& path, const std::string& digest,
                    const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FileParseError("cannot open " + path + " for writing");
    f << "# config " << digest << '\n' << body;
}

std::string describe_config(const Options& opt, const std::string& verb) {
    std::ostringstream s;
    s << verb << " channel=" << opt.channel << " kernel=" << opt.kernel
      << " levels=" << opt.levels << " k=" << opt.k << " rate=" << opt.rate
      << " delta=" << opt.delta << " beta=" << opt.beta << " trials=" << opt.trials
      << " seed=" << opt.seed << " merge-budget=" << opt.merge_budget
      << " spec=" << opt.spec_path;
    return s.str();
}

void print_metrics_header(std::ostream& os) {
    os << "I_normalized,I_nats,z_avg,z_max,ml_error,I_lower_bound,I_upper_bound\n";
}

void print_metrics_row(std::ostream& os, const Channel& W, const GroupTable* G) {
    MetricsReport m = metrics(W, G);
    auto [lo, hi] = capacity_bounds_from_z(m.z_avg, W.q());
    os << m.capacity_normalized << ',' << m.capacity_nats << ',' << m.z_avg << ','
       << m.z_max << ',' << m.ml_error << ',' << lo << ',' << hi << '\n';
}

int cmd_analyze(const Options& opt) {
    Channel W = channel_from_descriptor(opt.channel);
    GroupTable G = cyclic_group(W.q());
    std::ostringstream body;
    body.precision(12);
    print_metrics_header(body);
    print_metrics_row(body, W, &G);
    std::cout << body.str();
    if (!opt.out.empty())
        write_artifact(opt.out, config_digest(describe_config(opt, "analyze")), body.str());
    return 0;
}

int cmd_transform(const Options& opt) {
    Channel W = channel_from_descriptor(opt.channel);
    KernelConfig cfg = kernel_config(opt, W.q());
    SplitPair sp = apply_kernel(W, cfg);
    const GroupTable* G = cfg.group.get();

    std::ostringstream body;
    body.precision(12);
    body << "branch,";
    print_metrics_header(body);
    body << "input,";
    print_metrics_row(body, W, G);
    body << "minus,";
    print_metrics_row(body, quantize_outputs(sp.minus, opt.merge_budget).channel, G);
    body << "plus,";
    print_metrics_row(body, quantize_outputs(sp.plus, opt.merge_budget).channel, G);
    std::cout << body.str();
    if (!opt.out.empty())
        write_artifact(opt.out, config_digest(describe_config(opt, "transform")),
                       body.str());
    return 0;
}

int cmd_polarize(const Options& opt) {
    Channel W = channel_from_descriptor(opt.channel);
    KernelConfig cfg = kernel_config(opt, W.q());
    EvolveResult ev = evolve_tree(W, opt.levels, cfg, opt.merge_budget);
    double frac = polarization_fraction(ev.leaves, opt.delta);

    std::ostringstream summary;
    summary.precision(12);
    double mean_i = 0.0;
    for (const auto& l : ev.leaves) mean_i += l.metrics.capacity_normalized;
    mean_i /= ev.leaves.size();
    summary << "leaves " << ev.leaves.size() << '\n'
            << "mean_I_normalized " << mean_i << '\n'
            << "unpolarized_fraction " << frac << " (delta " << opt.delta << ")\n";
    std::cout << summary.str();

    if (!opt.out.empty()) {
        std::ostringstream csv;
        write_leaf_csv(csv, ev.leaves, config_digest(describe_config(opt, "polarize")));
        std::ofstream f(opt.out, std::ios::binary);
        if (!f) throw FileParseError("cannot open " + opt.out + " for writing");
        f << csv.str();
    }
    return 0;
}

int cmd_construct(const Options& opt) {
    Channel W = channel_from_descriptor(opt.channel);
    KernelConfig cfg = kernel_config(opt, W.q());
    const int N = 1 << opt.levels;
    const int K = resolve_k(opt, N);
    ConstructionResult cr = construct_code(W, opt.levels, cfg, K, opt.merge_budget);

    std::cout << "q " << cr.spec.q << "\nN " << N << "\nK " << K << "\nrate "
              << static_cast<double>(K) / N << "\ninfo";
    for (int i : cr.spec.info_set) std::cout << ' ' << i;
    std::cout << '\n';
    if (!opt.out.empty()) save_code_spec_file(opt.out, cr.spec);
    return 0;
}

int cmd_encode(const Options& opt) {
    PolarCodeSpec spec = load_code_spec_file(opt.spec_path);
    std::vector<int> msg = read_symbols(opt.input);
    std::vector<int> x = encode(spec, msg);
    std::ostringstream body;
    for (std::size_t i = 0; i < x.size(); ++i) body << (i ? " " : "") << x[i];
    body << '\n';
    std::cout << body.str();
    if (!opt.out.empty())
        write_artifact(opt.out, config_digest(describe_config(opt, "encode")), body.str());
    return 0;
}

int cmd_decode(const Options& opt) {
    PolarCodeSpec spec = load_code_spec_file(opt.spec_path);
    Channel W = channel_from_descriptor(opt.channel);
    std::vector<int> rx = read_symbols(opt.input);
    DecodeResult d = sc_decode(spec, W, rx);
    std::ostringstream body;
    for (std::size_t i = 0; i < d.message.size(); ++i)
        body << (i ? " " : "") << d.message[i];
    body << '\n';
    std::cout << body.str();
    if (!opt.out.empty())
        write_artifact(opt.out, config_digest(describe_config(opt, "decode")), body.str());
    return 0;
}

int cmd_simulate(const Options& opt) {
    Channel W = channel_from_descriptor(opt.channel);
    PolarCodeSpec spec;
    if (!opt.spec_path.empty()) {
        spec = load_code_spec_file(opt.spec_path);
    } else {
        KernelConfig cfg = kernel_config(opt, W.q());
        const int N = 1 << opt.levels;
        spec = construct_code(W, opt.levels, cfg, resolve_k(opt, N), opt.merge_budget).spec;
    }
    SimReport rep = simulate_bler(spec, W, opt.trials, opt.seed);

    std::ostringstream body;
    body.precision(12);
    body << "trials,block_errors,symbol_errors,bler,ser,wilson_95_halfwidth,seed\n"
         << rep.trials << ',' << rep.block_errors << ',' << rep.symbol_errors << ','
         << rep.bler << ',' << rep.ser << ',' << rep.wilson_95_halfwidth << ','
         << rep.seed << '\n';
    std::cout << body.str();
    if (!opt.out.empty())
        write_artifact(opt.out, config_digest(describe_config(opt, "simulate")),
                       body.str());
    return 0;
}

std::vector<int> prime_factors_lsb(int q) {
    std::vector<int> radices;
    int r = q;
    for (int p = 2; p * p <= r; ++p)
        while (r % p == 0) {
            radices.push_back(p);
            r /= p;
        }
    if (r > 1) radices.push_back(r);
    return radices;
}

int cmd_rate_experiment(const Options& opt) {
    Channel W = channel_from_descriptor(opt.channel);
    KernelConfig cfg = kernel_config(opt, W.q());
    RateEstimate est =
        rate_experiment(W, opt.levels, opt.beta, opt.trials, opt.seed, cfg,
                        opt.merge_budget);
    std::ostringstream body;
    body.precision(12);
    body << "beta,levels,trials,probability,halfwidth,seed\n"
         << opt.beta << ',' << opt.levels << ',' << est.trials << ','
         << est.probability << ',' << est.halfwidth << ',' << opt.seed << '\n';
    std::cout << body.str();
    if (!opt.out.empty())
        write_artifact(opt.out, config_digest(describe_config(opt, "rate-experiment")),
                       body.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-ary channel polarization toolkit"};
    app.require_subcommand(1);

    Options opt;
    std::string verb;

    auto add_common = [&](CLI::App* sub, bool needs_channel) {
        auto* c = sub->add_option("--channel", opt.channel,
                                  "channel descriptor (qsc:q:p, qec:q:eps, "
                                  "counterexample4, file:path)");
        if (needs_channel) c->required();
        sub->add_option("--merge-budget", opt.merge_budget,
                        "max synthesized output alphabet size");
        sub->add_option("--out", opt.out, "artifact path");
        sub->callback([&verb, sub] { verb = sub->get_name(); });
    };
    auto add_kernel = [&](CLI::App* sub) {
        sub->add_option("--kernel", opt.kernel, "group|perm|permfix0|mult|multhalf");
    };

    auto* analyze = app.add_subcommand(
        "analyze", "channel metrics: capacity, Bhattacharyya, ML error, bounds");
    add_common(analyze, true);

    auto* transform = app.add_subcommand(
        "transform", "one combine/split step; metrics of W- and W+");
    add_common(transform, true);
    add_kernel(transform);

    auto* polarize =
        app.add_subcommand("polarize", "full n-level evolution; leaf CSV");
    add_common(polarize, true);
    add_kernel(polarize);
    polarize->add_option("--levels", opt.levels, "tree depth n");
    polarize->add_option("--delta", opt.delta, "unpolarized band half-width");

    auto* construct = app.add_subcommand(
        "construct", "pick an information set and save the code spec");
    add_common(construct, true);
    add_kernel(construct);
    construct->add_option("--levels", opt.levels, "tree depth n");
    construct->add_option("--k", opt.k, "information symbols");
    construct->add_option("--rate", opt.rate, "K/N (alternative to --k)");

    auto* encode = app.add_subcommand("encode", "message symbols -> codeword");
    add_common(encode, false);
    encode->add_option("--spec", opt.spec_path, "code spec file")->required();
    encode->add_option("--in", opt.input, "symbols inline or @file")->required();

    auto* decode =
        app.add_subcommand("decode", "received output indices -> message");
    add_common(decode, true);
    decode->add_option("--spec", opt.spec_path, "code spec file")->required();
    decode->add_option("--in", opt.input, "output indices inline or @file")->required();

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo BLER run");
    add_common(simulate, true);
    add_kernel(simulate);
    simulate->add_option("--spec", opt.spec_path, "pre-built code spec file");
    simulate->add_option("--levels", opt.levels, "tree depth n");
    simulate->add_option("--k", opt.k, "information symbols");
    simulate->add_option("--rate", opt.rate, "K/N (alternative to --k)");
    simulate->add_option("--trials", opt.trials, "Monte Carlo trials");
    simulate->add_option("--seed", opt.seed, "RNG seed");

    auto* decompose = app.add_subcommand(
        "decompose", "multi-level split of a composite-q channel");
    add_common(decompose, true);

    auto* ratexp = app.add_subcommand(
        "rate-experiment", "empirical P(T_n below the 2^(-2^(beta n)) threshold)");
    add_common(ratexp, true);
    add_kernel(ratexp);
    ratexp->add_option("--levels", opt.levels, "tree depth n");
    ratexp->add_option("--beta", opt.beta, "rate exponent in (0,1)");
    ratexp->add_option("--trials", opt.trials, "sampled paths");
    ratexp->add_option("--seed", opt.seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::cout.precision(12);
        if (verb == "analyze") return cmd_analyze(opt);
        if (verb == "transform") return cmd_transform(opt);
        if (verb == "polarize") return cmd_polarize(opt);
        if (verb == "construct") return cmd_construct(opt);
        if (verb == "encode") return cmd_encode(opt);
        if (verb == "decode") return cmd_decode(opt);
        if (verb == "simulate") return cmd_simulate(opt);
        if (verb == "decompose") {
            Channel W = channel_from_descriptor(opt.channel);
            auto radices = prime_factors_lsb(W.q());
            std::vector<Channel> sub = polarq::decompose_composite(W, radices);
            std::ostringstream body;
            body.precision(12);
            body << "level,radix,I_nats,I_normalized\n";
            double total = 0.0;
            for (std::size_t i = 0; i < sub.size(); ++i) {
                auto [norm, nats] = symmetric_capacity(sub[i]);
                total += nats;
                body << i << ',' << radices[i] << ',' << nats << ',' << norm << '\n';
            }
            std::cout << body.str();
            std::cout << "sum_I_nats " << total << " (channel "
                      << symmetric_capacity(W).second << ")\n";
            if (!opt.out.empty())
                write_artifact(opt.out,
                               config_digest(describe_config(opt, "decompose")),
                               body.str());
            return 0;
        }
        if (verb == "rate-experiment") return cmd_rate_experiment(opt);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
