#include <chrono>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmim/harness.hpp"
#include "qmim/oracle.hpp"
#include "qmim/qsim.hpp"
#include "qmim/truth.hpp"
#include "qmim/zoo.hpp"

namespace {

using nlohmann::ordered_json;
using qmim::harness::Algorithm;
using qmim::harness::ExperimentConfig;

struct ExperimentArgs {
    ExperimentConfig config;
    std::string backend = "preimage";
    std::string out;
};

void add_experiment_flags(CLI::App* cmd, ExperimentArgs& args, bool with_table,
                          bool with_cap) {
    cmd->add_option("--cipher", args.config.cipher,
                    "cipher description, inline (contains '=') or a file path");
    if (with_table)
        cmd->add_option("--table", args.config.table, "truth-table file path");
    cmd->add_option("--c", args.config.c, "repetitions per sampled coordinate");
    cmd->add_option("--seed", args.config.seed, "experiment seed");
    cmd->add_option("--trials", args.config.trials, "number of seeded trials");
    cmd->add_option("--backend", args.backend, "statevector or preimage");
    if (with_cap)
        cmd->add_option("--cap", args.config.cap, "enumeration cap on listed pairs");
    cmd->add_flag("--verify", args.config.verify,
                  "compare every trial against the exhaustive truth scans");
    cmd->add_flag("--timing", args.config.timing,
                  "record wall-clock durations (reports stop being byte-identical)");
    cmd->add_option("--out", args.out, "write the JSON report here instead of stdout");
}

void write_document(const std::string& document, const std::string& summary,
                    const std::string& out) {
    if (out.empty()) {
        std::cout << document;
        std::cerr << summary;
        return;
    }
    std::ofstream file(out);
    if (!file) throw std::invalid_argument("cannot write report file: " + out);
    file << document;
    std::cout << summary;
}

int run_experiment(const ExperimentArgs& args) {
    ExperimentConfig config = args.config;
    config.backend = qmim::qsim::parse_backend(args.backend);
    const qmim::harness::Report report = qmim::harness::run(config);
    write_document(report.document, report.summary, args.out);
    return report.sound ? 0 : 1;
}

std::string fraction_text(const qmim::truth::Rational& x) {
    return std::to_string(x.num) + "/" + std::to_string(x.den);
}

ordered_json basis_json(const qmim::gf2::Subspace& s) {
    ordered_json out = ordered_json::array();
    for (const qmim::gf2::BitVector& b : s.basis()) out.push_back(b.str());
    return out;
}

int run_verify(const std::string& cipher, const std::string& table,
               const std::string& out) {
    if (cipher.empty() == table.empty())
        throw std::invalid_argument("exactly one of --cipher and --table must be given");
    ordered_json doc;
    if (!table.empty()) {
        std::ifstream in(table);
        if (!in) throw std::invalid_argument("cannot open table file: " + table);
        const qmim::oracle::OracleFunction f = qmim::oracle::read_truth_table(in);
        const qmim::truth::GroundTruth stats = qmim::truth::analyze(f);
        doc["table"] = table;
        doc["input_width"] = f.input_width();
        doc["output_width"] = f.output_width();
        doc["epsilon"] = fraction_text(stats.epsilon);
        doc["epsilon_value"] = stats.epsilon.to_double();
        doc["epsilon_vacuous"] = stats.epsilon_vacuous;
        doc["delta"] = fraction_text(stats.delta);
        doc["delta_value"] = stats.delta.to_double();
        doc["delta_vacuous"] = stats.delta_vacuous;
        doc["period_dimension"] = stats.period_space.dimension();
        doc["period_basis"] = basis_json(stats.period_space);
        doc["structure_dimension"] = stats.structure_space.dimension();
        doc["structure_basis"] = basis_json(stats.structure_space);
    } else {
        qmim::zoo::CipherDescription description;
        if (cipher.find('=') != std::string::npos) {
            description = qmim::zoo::parse_cipher_description(cipher);
        } else {
            std::ifstream in(cipher);
            if (!in) throw std::invalid_argument("cannot open cipher file: " + cipher);
            description = qmim::zoo::parse_cipher_description(in);
        }
        const auto built = description.build();
        const qmim::oracle::KeyedOracle full = built->full();
        doc["cipher"] = cipher;
        doc["family"] = description.family;
        doc["block_width"] = built->block_width();
        doc["key_width"] = full.key_width();
        doc["rounds"] = built->rounds();
        const qmim::truth::Rational delta = qmim::truth::compute_delta(full.flattened());
        doc["delta"] = fraction_text(delta);
        doc["delta_value"] = delta.to_double();
        const qmim::gf2::Subspace pr1 = qmim::truth::brute_pr1_diffs(full);
        doc["pr1_dimension"] = pr1.dimension();
        doc["pr1_basis"] = basis_json(pr1);
        if (const auto* planted = dynamic_cast<const qmim::zoo::PlantedCipher*>(built.get())) {
            doc["planted"] = ordered_json{
                {"delta_in", planted->planted().delta_in.str()},
                {"delta_out", planted->planted().delta_out.str()},
                {"middle_head", planted->planted().middle_head.str()},
                {"middle_tail", planted->planted().middle_tail.str()}};
        }
    }
    write_document(doc.dump(2) + "\n", "", out);
    return 0;
}

int run_bench(const std::vector<uint32_t>& bits, uint32_t samples,
              const std::string& backend_arg) {
    std::vector<qmim::qsim::Backend> backends;
    if (backend_arg == "both") {
        backends = {qmim::qsim::Backend::statevector, qmim::qsim::Backend::preimage};
    } else {
        backends = {qmim::qsim::parse_backend(backend_arg)};
    }
    for (const uint32_t total : bits) {
        const uint32_t n = (total + 1) / 2;
        const uint32_t m = total - n;
        if (n == 0 || m == 0) throw std::invalid_argument("need at least 2 bits");
        std::mt19937_64 rng(total);
        std::vector<qmim::gf2::BitVector> table;
        table.reserve(size_t{1} << n);
        for (size_t x = 0; x < (size_t{1} << n); ++x)
            table.push_back(qmim::gf2::BitVector(m, rng() & ((uint64_t{1} << m) - 1)));
        const qmim::oracle::OracleFunction f = qmim::oracle::from_truth_table(n, m, table);

        for (const qmim::qsim::Backend backend : backends) {
            qmim::qsim::SamplerConfig cfg;
            cfg.backend = backend;
            cfg.seed = 1;
            try {
                qmim::qsim::SimonSampler sampler(f, cfg);
                const auto started = std::chrono::steady_clock::now();
                for (uint32_t i = 0; i < samples; ++i) sampler.next();
                const double ms = std::chrono::duration<double, std::milli>(
                                      std::chrono::steady_clock::now() - started)
                                      .count();
                std::printf("bits=%2u backend=%-11s samples=%u elapsed_ms=%.3f rate=%.0f/s\n",
                            n + m, qmim::qsim::backend_name(backend), samples, ms,
                            samples / (ms / 1000.0));
            } catch (const qmim::oracle::CapacityError&) {
                std::printf("bits=%2u backend=%-11s skipped (capacity)\n", n + m,
                            qmim::qsim::backend_name(backend));
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simon-sampler search for hidden structures and impossible differentials"};
    app.require_subcommand(1);

    ExperimentArgs structures_args;
    structures_args.config.algorithm = Algorithm::find_structures;
    CLI::App* structures =
        app.add_subcommand("find-structures", "recover the linear structure space");
    add_experiment_flags(structures, structures_args, true, false);

    ExperimentArgs pr1_args;
    pr1_args.config.algorithm = Algorithm::find_pr1;
    CLI::App* pr1 = app.add_subcommand(
        "find-pr1", "recover key-independent probability-1 differentials");
    add_experiment_flags(pr1, pr1_args, false, false);

    ExperimentArgs impossible_args;
    impossible_args.config.algorithm = Algorithm::find_impossible;
    CLI::App* impossible = app.add_subcommand(
        "find-impossible", "miss-in-the-middle search for impossible differentials");
    add_experiment_flags(impossible, impossible_args, false, true);

    std::string verify_cipher;
    std::string verify_table;
    std::string verify_out;
    CLI::App* verify = app.add_subcommand("verify", "exhaustive ground truth, no sampling");
    verify->add_option("--cipher", verify_cipher, "cipher description or file path");
    verify->add_option("--table", verify_table, "truth-table file path");
    verify->add_option("--out", verify_out, "write the JSON document here");

    int bound_theorem = 1;
    uint32_t bound_n = 0;
    uint32_t bound_m = 0;
    uint32_t bound_c = 1;
    double bound_p0 = 0.0;
    CLI::App* bound_cmd = app.add_subcommand("bound", "evaluate a failure bound");
    bound_cmd->add_option("--theorem", bound_theorem, "1, 2, 3 or 4")->required();
    bound_cmd->add_option("--n", bound_n, "input width")->required();
    bound_cmd->add_option("--m", bound_m, "output or key width");
    bound_cmd->add_option("--c", bound_c, "repetitions per coordinate")->required();
    bound_cmd->add_option("--p0", bound_p0, "collision ceiling, below 1")->required();

    std::vector<uint32_t> bench_bits{8, 10, 12};
    uint32_t bench_samples = 256;
    std::string bench_backend = "both";
    CLI::App* bench = app.add_subcommand("bench", "sampler throughput against oracle size");
    bench->add_option("--bits", bench_bits, "total widths n+m to measure");
    bench->add_option("--samples", bench_samples, "samples per measurement");
    bench->add_option("--backend", bench_backend, "statevector, preimage or both");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (structures->parsed()) return run_experiment(structures_args);
        if (pr1->parsed()) return run_experiment(pr1_args);
        if (impossible->parsed()) return run_experiment(impossible_args);
        if (verify->parsed()) return run_verify(verify_cipher, verify_table, verify_out);
        if (bound_cmd->parsed()) {
            std::printf("%.10g\n", qmim::harness::bound(bound_theorem, bound_n, bound_m,
                                                        bound_c, bound_p0));
            return 0;
        }
        if (bench->parsed()) return run_bench(bench_bits, bench_samples, bench_backend);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
