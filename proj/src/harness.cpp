#include "qmim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qmim/finder.hpp"
#include "qmim/truth.hpp"
#include "qmim/zoo.hpp"

namespace qmim::harness {

namespace {

using nlohmann::ordered_json;

void validate(const ExperimentConfig& config) {
    if (config.trials == 0) throw std::invalid_argument("trials must be at least 1");
    if (config.c == 0) throw std::invalid_argument("repetition constant must be at least 1");
    if (config.cap == 0) throw std::invalid_argument("enumeration cap must be at least 1");
    const bool has_cipher = !config.cipher.empty();
    const bool has_table = !config.table.empty();
    if (has_cipher == has_table)
        throw std::invalid_argument("exactly one of cipher and table must be given");
    if (has_table && config.algorithm != Algorithm::find_structures)
        throw std::invalid_argument("truth tables only fit find-structures");
}

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(std::string("cannot open ") + what + " file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

zoo::CipherDescription load_cipher(const std::string& value) {
    if (value.find('=') != std::string::npos) return zoo::parse_cipher_description(value);
    return zoo::parse_cipher_description(read_file(value, "cipher"));
}

oracle::OracleFunction load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open table file: " + path);
    return oracle::read_truth_table(in);
}

[[noreturn]] void rethrow_beyond_scale(const std::invalid_argument& e) {
    throw std::invalid_argument(
        std::string(e.what()) +
        " (verification runs exhaustive scans; shrink the instance or drop verify)");
}

qsim::SamplerConfig trial_config(const ExperimentConfig& config, uint32_t trial) {
    qsim::SamplerConfig cfg;
    cfg.backend = config.backend;
    cfg.seed = qsim::derive_seed(config.seed, trial);
    return cfg;
}

double elapsed_ms(std::chrono::steady_clock::time_point from) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - from)
        .count();
}

std::string fraction_text(const truth::Rational& x) {
    return std::to_string(x.num) + "/" + std::to_string(x.den);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<std::string> basis_strings(const gf2::Subspace& s) {
    std::vector<std::string> out;
    out.reserve(s.basis().size());
    for (const gf2::BitVector& b : s.basis()) out.push_back(b.str());
    return out;
}

ordered_json config_echo(const ExperimentConfig& config) {
    ordered_json j;
    j["algorithm"] = std::string(algorithm_name(config.algorithm));
    if (!config.cipher.empty()) j["cipher"] = config.cipher;
    if (!config.table.empty()) j["table"] = config.table;
    j["c"] = config.c;
    j["seed"] = config.seed;
    j["trials"] = config.trials;
    j["backend"] = std::string(qsim::backend_name(config.backend));
    j["cap"] = config.cap;
    j["verify"] = config.verify;
    j["timing"] = config.timing;
    return j;
}

ordered_json space_aggregate(const ExperimentConfig& config, int theorem, uint32_t n,
                             uint32_t m, const truth::Rational* p0, uint32_t failures,
                             bool sound) {
    ordered_json agg;
    agg["trials"] = config.trials;
    agg["theorem"] = theorem;
    if (p0) {
        agg["failures"] = failures;
        agg["failure_rate"] = static_cast<double>(failures) / config.trials;
        agg["p0"] = fraction_text(*p0);
        agg["p0_value"] = p0->to_double();
        agg["bound"] = bound(theorem, n, m, config.c, p0->to_double());
    }
    agg["sound"] = sound;
    return agg;
}

void run_space_trials(const ExperimentConfig& config, ordered_json& doc, bool& sound,
                      int theorem, uint32_t n, uint32_t m,
                      const std::function<gf2::Subspace(const qsim::SamplerConfig&)>& search,
                      const std::function<uint64_t()>& query_total,
                      const gf2::Subspace* truth_space, const truth::Rational* p0) {
    ordered_json trials = ordered_json::array();
    uint32_t failures = 0;
    for (uint32_t t = 0; t < config.trials; ++t) {
        const qsim::SamplerConfig cfg = trial_config(config, t);
        const uint64_t before = query_total();
        const auto started = std::chrono::steady_clock::now();
        const gf2::Subspace space = search(cfg);

        ordered_json trial;
        trial["trial"] = t;
        trial["seed"] = cfg.seed;
        trial["dimension"] = space.dimension();
        trial["basis"] = basis_strings(space);
        trial["queries"] = query_total() - before;
        if (config.timing) trial["duration_ms"] = elapsed_ms(started);
        if (truth_space) {
            const bool contains = space.contains_subspace(*truth_space);
            const bool exact = space == *truth_space;
            trial["verify"] =
                ordered_json{{"contains_truth", contains}, {"matches_truth", exact}};
            if (!contains) sound = false;
            if (!exact) ++failures;
        }
        trials.push_back(std::move(trial));
    }
    doc["trials"] = std::move(trials);
    doc["aggregate"] = space_aggregate(config, theorem, n, m, p0, failures, sound);
}

void run_structures(const ExperimentConfig& config, ordered_json& doc, bool& sound) {
    std::optional<oracle::OracleFunction> table_fn;
    std::unique_ptr<oracle::RoundCipher> cipher;
    std::optional<oracle::KeyedOracle> full;
    const oracle::OracleFunction* f = nullptr;
    if (!config.table.empty()) {
        table_fn = load_table(config.table);
        f = &*table_fn;
    } else {
        cipher = load_cipher(config.cipher).build();
        full = cipher->full();
        f = &full->flattened();
    }
    const uint32_t n = f->input_width();
    const uint32_t m = f->output_width();

    std::optional<truth::GroundTruth> stats;
    if (config.verify) {
        try {
            stats = truth::analyze(*f);
        } catch (const std::invalid_argument& e) {
            rethrow_beyond_scale(e);
        }
    }
    run_space_trials(
        config, doc, sound, 2, n, m,
        [&](const qsim::SamplerConfig& cfg) {
            return finder::find_structures(*f, config.c, cfg).space;
        },
        [&] { return f->query_count(); }, stats ? &stats->structure_space : nullptr,
        stats ? &stats->delta : nullptr);
}

void run_pr1(const ExperimentConfig& config, ordered_json& doc, bool& sound) {
    const std::unique_ptr<oracle::RoundCipher> cipher = load_cipher(config.cipher).build();
    const oracle::KeyedOracle keyed = cipher->full();
    const uint32_t n = keyed.block_width();
    const uint32_t m = keyed.key_width();

    std::optional<gf2::Subspace> truth_space;
    std::optional<truth::Rational> p0;
    if (config.verify) {
        try {
            truth_space = truth::brute_pr1_diffs(keyed);
            p0 = truth::compute_delta(keyed.flattened());
        } catch (const std::invalid_argument& e) {
            rethrow_beyond_scale(e);
        }
    }
    run_space_trials(
        config, doc, sound, 3, n, m,
        [&](const qsim::SamplerConfig& cfg) {
            return diff::find_pr1_diff(keyed, config.c, cfg).space;
        },
        [&] { return cipher->query_count(); }, truth_space ? &*truth_space : nullptr,
        p0 ? &*p0 : nullptr);
}

void run_impossible(const ExperimentConfig& config, ordered_json& doc, bool& sound) {
    const std::unique_ptr<oracle::RoundCipher> cipher = load_cipher(config.cipher).build();
    if (cipher->rounds() < 3)
        throw std::invalid_argument("find-impossible needs a cipher with at least 3 rounds");
    const uint32_t n = cipher->block_width();
    const uint32_t r = cipher->rounds();
    const uint32_t reduced_key = (r - 1) * cipher->subkey_width();
    const auto* planted = dynamic_cast<const zoo::PlantedCipher*>(cipher.get());
    const oracle::KeyedOracle reduced = cipher->reduced();

    std::vector<std::pair<gf2::Subspace, gf2::Subspace>> split_truth;
    std::optional<truth::Rational> p0;
    if (config.verify) {
        try {
            truth::Rational worst(0, 1);
            for (uint32_t v = 1; v <= r - 2; ++v) {
                const diff::SplitPoint point = diff::split_cipher(*cipher, v);
                const oracle::KeyedOracle inverse_tail = oracle::invert(point.tail);
                split_truth.emplace_back(truth::brute_pr1_diffs(point.head),
                                         truth::brute_pr1_diffs(inverse_tail));
                for (const truth::Rational& delta :
                     {truth::compute_delta(point.head.flattened()),
                      truth::compute_delta(inverse_tail.flattened())})
                    if (delta.to_double() > worst.to_double()) worst = delta;
            }
            // exercises the scan guard once so scale problems surface up front
            (void)truth::brute_impossible(reduced, gf2::BitVector::unit(n, 0),
                                          gf2::BitVector::unit(n, 0));
            p0 = worst;
        } catch (const std::invalid_argument& e) {
            rethrow_beyond_scale(e);
        }
    }

    std::map<std::pair<uint64_t, uint64_t>, bool> memo;
    const auto impossible = [&](const diff::Differential& d) {
        const std::pair<uint64_t, uint64_t> key{d.delta_in.value(), d.delta_out.value()};
        auto it = memo.find(key);
        if (it == memo.end())
            it = memo.emplace(key, truth::brute_impossible(reduced, d.delta_in, d.delta_out))
                     .first;
        return it->second;
    };

    ordered_json trials = ordered_json::array();
    uint32_t failures = 0;
    uint32_t planted_found = 0;
    for (uint32_t t = 0; t < config.trials; ++t) {
        const qsim::SamplerConfig cfg = trial_config(config, t);
        const uint64_t before = cipher->query_count();
        const auto started = std::chrono::steady_clock::now();
        const diff::ImpossibleDifferentialSet set =
            diff::find_impossible(*cipher, config.c, cfg, config.cap);

        ordered_json trial;
        trial["trial"] = t;
        trial["seed"] = cfg.seed;
        ordered_json splits = ordered_json::array();
        for (const diff::SplitAnalysis& split : set.splits())
            splits.push_back(
                ordered_json{{"v", split.v},
                             {"head_dimension", split.head.space.dimension()},
                             {"head_basis", basis_strings(split.head.space)},
                             {"tail_dimension", split.inverse_tail.space.dimension()},
                             {"tail_basis", basis_strings(split.inverse_tail.space)}});
        trial["splits"] = std::move(splits);
        trial["pairs"] = set.enumerated().size();
        trial["truncated"] = set.truncated();
        trial["queries"] = cipher->query_count() - before;
        if (config.timing) trial["duration_ms"] = elapsed_ms(started);
        if (planted) {
            const bool found =
                set.contains({planted->planted().delta_in, planted->planted().delta_out});
            trial["planted_found"] = found;
            if (found) ++planted_found;
        }
        if (config.verify) {
            bool contains_truth = true;
            bool matches = true;
            for (size_t i = 0; i < set.splits().size(); ++i) {
                const diff::SplitAnalysis& split = set.splits()[i];
                contains_truth = contains_truth &&
                                 split.head.space.contains_subspace(split_truth[i].first) &&
                                 split.inverse_tail.space.contains_subspace(
                                     split_truth[i].second);
                matches = matches && split.head.space == split_truth[i].first &&
                          split.inverse_tail.space == split_truth[i].second;
            }
            bool pairs_ok = true;
            for (const diff::ImpossibleEntry& entry : set.enumerated())
                if (!impossible(entry.differential)) {
                    pairs_ok = false;
                    break;
                }
            trial["verify"] = ordered_json{{"spaces_contain_truth", contains_truth},
                                           {"spaces_match_truth", matches},
                                           {"pairs_impossible", pairs_ok}};
            if (!contains_truth) sound = false;
            if (!pairs_ok) ++failures;
        }
        trials.push_back(std::move(trial));
    }
    doc["trials"] = std::move(trials);

    ordered_json agg;
    agg["trials"] = config.trials;
    agg["theorem"] = 4;
    if (p0) {
        agg["failures"] = failures;
        agg["failure_rate"] = static_cast<double>(failures) / config.trials;
        agg["p0"] = fraction_text(*p0);
        agg["p0_value"] = p0->to_double();
        agg["bound"] = bound(4, n, reduced_key, config.c, p0->to_double());
    }
    if (planted) agg["planted_found"] = planted_found;
    agg["sound"] = sound;
    doc["aggregate"] = std::move(agg);
}

std::string verify_cell(const ordered_json& trial) {
    if (!trial.contains("verify")) return "-";
    const ordered_json& v = trial["verify"];
    if (v.contains("pairs_impossible")) {
        if (!v["spaces_contain_truth"].get<bool>()) return "VIOLATION";
        if (!v["pairs_impossible"].get<bool>()) return "false-pairs";
        return v["spaces_match_truth"].get<bool>() ? "exact" : "superset";
    }
    if (!v["contains_truth"].get<bool>()) return "VIOLATION";
    return v["matches_truth"].get<bool>() ? "exact" : "superset";
}

std::string render_summary(const ordered_json& doc) {
    const ordered_json& cfg = doc["config"];
    std::ostringstream out;
    out << cfg["algorithm"].get<std::string>() << "  trials=" << cfg["trials"].get<uint32_t>()
        << "  c=" << cfg["c"].get<uint32_t>() << "  seed=" << cfg["seed"].get<uint64_t>()
        << "  backend=" << cfg["backend"].get<std::string>() << '\n';

    const bool impossible = cfg["algorithm"] == "find-impossible";
    out << (impossible ? "trial   pairs  queries  truncated  verify\n"
                       : "trial     dim  queries  verify\n");
    for (const ordered_json& trial : doc["trials"]) {
        out << std::setw(5) << trial["trial"].get<uint32_t>();
        if (impossible) {
            out << "  " << std::setw(6) << trial["pairs"].get<uint64_t>() << "  "
                << std::setw(7) << trial["queries"].get<uint64_t>() << "  " << std::setw(9)
                << (trial["truncated"].get<bool>() ? "yes" : "no");
        } else {
            out << "  " << std::setw(6) << trial["dimension"].get<uint32_t>() << "  "
                << std::setw(7) << trial["queries"].get<uint64_t>();
        }
        out << "  " << verify_cell(trial);
        if (trial.contains("planted_found"))
            out << "  planted=" << (trial["planted_found"].get<bool>() ? "yes" : "no");
        out << '\n';
    }

    const ordered_json& agg = doc["aggregate"];
    if (agg.contains("failure_rate")) {
        out << "failures " << agg["failures"].get<uint32_t>() << "/"
            << agg["trials"].get<uint32_t>() << " (rate "
            << format_double(agg["failure_rate"].get<double>()) << ")  bound[th"
            << agg["theorem"].get<int>() << "] " << format_double(agg["bound"].get<double>())
            << " (p0 = " << agg["p0"].get<std::string>() << ")\n";
    } else {
        out << "verification off; theorem " << agg["theorem"].get<int>()
            << " bound not evaluated\n";
    }
    if (agg.contains("planted_found"))
        out << "planted pair found in " << agg["planted_found"].get<uint32_t>() << "/"
            << agg["trials"].get<uint32_t>() << " trials\n";
    out << "sound: " << (agg["sound"].get<bool>() ? "yes" : "no") << '\n';
    return out.str();
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::find_structures: return "find-structures";
        case Algorithm::find_pr1: return "find-pr1";
        case Algorithm::find_impossible: return "find-impossible";
    }
    throw std::logic_error("unknown algorithm value");
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "find-structures") return Algorithm::find_structures;
    if (name == "find-pr1") return Algorithm::find_pr1;
    if (name == "find-impossible") return Algorithm::find_impossible;
    throw std::invalid_argument("unknown algorithm: " + std::string(name));
}

Report run(const ExperimentConfig& config) {
    validate(config);
    ordered_json doc;
    doc["config"] = config_echo(config);
    bool sound = true;
    try {
        switch (config.algorithm) {
            case Algorithm::find_structures: run_structures(config, doc, sound); break;
            case Algorithm::find_pr1: run_pr1(config, doc, sound); break;
            case Algorithm::find_impossible: run_impossible(config, doc, sound); break;
        }
    } catch (const oracle::CapacityError& e) {
        throw oracle::CapacityError(std::string(e.what()) +
                                    "; pick the preimage backend or shrink the instance");
    }

    Report report;
    report.document = doc.dump(2) + "\n";
    report.summary = render_summary(doc);
    report.sound = sound;
    return report;
}

double bound(int theorem, uint32_t n, uint32_t m, uint32_t c, double p0) {
    if (theorem < 1 || theorem > 4) throw std::invalid_argument("theorem must be one of 1..4");
    if (c == 0) throw std::invalid_argument("repetition constant must be at least 1");
    if (!(p0 >= 0.0 && p0 < 1.0))
        throw std::invalid_argument("collision ceiling must lie in [0, 1)");
    const uint32_t exponent = theorem == 1 ? n : theorem == 2 ? n + m : 2 * n + m;
    const double prefactor = theorem == 4 ? 2.0 : 1.0;
    const double per_coordinate = 2.0 * std::pow((1.0 + p0) / 2.0, static_cast<double>(c));
    return std::min(1.0, prefactor * std::pow(per_coordinate, static_cast<double>(exponent)));
}

}  // namespace qmim::harness
