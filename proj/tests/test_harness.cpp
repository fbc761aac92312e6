#include "qmim/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "qmim/oracle.hpp"

using namespace qmim;
using namespace qmim::harness;
using nlohmann::json;

namespace {

std::string write_identity_table() {
    const auto path = std::filesystem::temp_directory_path() / "qmim_identity4.tt";
    const oracle::OracleFunction f(4, 4, [](uint64_t x) { return x; });
    std::ofstream out(path);
    oracle::write_truth_table(out, f);
    return path.string();
}

}  // namespace

TEST_CASE("failure bound") {
    CHECK(bound(1, 2, 0, 10, 0.5) == doctest::Approx(0.0127).epsilon(0.01));
    CHECK(bound(1, 8, 0, 1, 0.0) == 1.0);
    CHECK(bound(2, 3, 3, 10, 0.25) == doctest::Approx(std::pow(2 * std::pow(0.625, 10), 6)));
    CHECK(bound(3, 3, 6, 10, 0.25) == doctest::Approx(std::pow(2 * std::pow(0.625, 10), 12)));
    CHECK(bound(4, 3, 6, 10, 0.25) ==
          doctest::Approx(2 * std::pow(2 * std::pow(0.625, 10), 12)));

    double prev = 1.0;
    for (uint32_t c = 2; c <= 30; c += 4) {
        const double b = bound(3, 4, 4, c, 0.5);
        CHECK(b <= prev);
        prev = b;
    }
    CHECK(bound(1, 4, 0, 40, 0.5) < 1e-12);

    CHECK_THROWS_AS(bound(0, 4, 4, 10, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(bound(5, 4, 4, 10, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(bound(1, 4, 4, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(bound(1, 4, 4, 10, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound(1, 4, 4, 10, -0.01), std::invalid_argument);
}

TEST_CASE("algorithm names round-trip") {
    for (const Algorithm a :
         {Algorithm::find_structures, Algorithm::find_pr1, Algorithm::find_impossible})
        CHECK(parse_algorithm(algorithm_name(a)) == a);
    CHECK_THROWS_AS(parse_algorithm("find-keys"), std::invalid_argument);
}

TEST_CASE("find-structures on the identity table") {
    ExperimentConfig config;
    config.algorithm = Algorithm::find_structures;
    config.table = write_identity_table();
    config.c = 10;
    config.seed = 5;
    config.trials = 10;
    config.verify = true;

    const Report report = run(config);
    CHECK(report.sound);

    const json doc = json::parse(report.document);
    REQUIRE(doc["trials"].size() == 10);
    for (const auto& trial : doc["trials"]) {
        CHECK(trial["dimension"] == 4);
        CHECK(trial["basis"].size() == 4);
        CHECK(trial["queries"] == 10 * 8);
        CHECK(trial["verify"]["contains_truth"] == true);
        CHECK(trial["verify"]["matches_truth"] == true);
    }
    CHECK(doc["aggregate"]["theorem"] == 2);
    CHECK(doc["aggregate"]["failures"] == 0);
    CHECK(doc["aggregate"]["failure_rate"] == 0.0);
    CHECK(doc["aggregate"]["p0"] == "0/1");
    CHECK(doc["aggregate"]["sound"] == true);
    CHECK(report.summary.find("sound: yes") != std::string::npos);
}

TEST_CASE("find-structures accepts a cipher and flattens it") {
    ExperimentConfig config;
    config.algorithm = Algorithm::find_structures;
    config.cipher = "family = feistel; half_width = 3; rounds = 1; seed = 5";
    config.c = 4;
    config.seed = 3;
    config.trials = 2;
    config.verify = true;

    const Report report = run(config);
    CHECK(report.sound);
    const json doc = json::parse(report.document);
    // flattened map takes key and block, so W spans 9 + 6 coordinates
    for (const auto& trial : doc["trials"]) CHECK(trial["queries"] == 4 * 15);
}

TEST_CASE("reports are byte-identical for identical configs") {
    ExperimentConfig config;
    config.algorithm = Algorithm::find_pr1;
    config.cipher = "family = feistel; half_width = 2; rounds = 1; seed = 3";
    config.c = 6;
    config.seed = 17;
    config.trials = 3;

    const Report a = run(config);
    const Report b = run(config);
    CHECK(a.document == b.document);
    CHECK(a.summary == b.summary);

    config.seed = 999;
    const Report c = run(config);
    CHECK(c.document != a.document);
}

TEST_CASE("find-pr1 verifies against the exhaustive scan") {
    ExperimentConfig config;
    config.algorithm = Algorithm::find_pr1;
    config.cipher = "family = feistel; half_width = 3; rounds = 1; seed = 5";
    config.c = 10;
    config.seed = 21;
    config.trials = 5;
    config.verify = true;

    const Report report = run(config);
    CHECK(report.sound);
    const json doc = json::parse(report.document);
    CHECK(doc["aggregate"]["theorem"] == 3);
    CHECK(doc["aggregate"].contains("bound"));
    CHECK(doc["aggregate"]["p0_value"].get<double>() < 1.0);
    for (const auto& trial : doc["trials"]) {
        CHECK(trial["verify"]["contains_truth"] == true);
        CHECK(trial["queries"] == 10 * (12 + 3));
    }
}

TEST_CASE("statevector backend plugs into experiments") {
    ExperimentConfig config;
    config.algorithm = Algorithm::find_structures;
    config.table = write_identity_table();
    config.c = 6;
    config.seed = 2;
    config.trials = 1;
    config.backend = qsim::Backend::statevector;
    config.verify = true;

    const Report report = run(config);
    CHECK(report.sound);
    const json doc = json::parse(report.document);
    CHECK(doc["config"]["backend"] == "statevector");
    CHECK(doc["trials"][0]["verify"]["matches_truth"] == true);
}

TEST_CASE("find-impossible on a planted cipher") {
    ExperimentConfig config;
    config.algorithm = Algorithm::find_impossible;
    config.cipher = "family = planted; width = 4; rounds = 3; seed = 7";
    config.c = 10;
    config.seed = 11;
    config.trials = 3;
    config.verify = true;

    const Report report = run(config);
    CHECK(report.sound);
    const json doc = json::parse(report.document);
    CHECK(doc["aggregate"]["theorem"] == 4);
    CHECK(doc["aggregate"]["planted_found"] == 3);
    CHECK(doc["aggregate"]["failures"] == 0);
    for (const auto& trial : doc["trials"]) {
        CHECK(trial["splits"].size() == 1);
        CHECK(trial["planted_found"] == true);
        CHECK(trial["verify"]["pairs_impossible"] == true);
        CHECK(trial["verify"]["spaces_contain_truth"] == true);
        CHECK(trial["queries"] == 10 * 12 + 10 * 12);
    }
    CHECK(report.summary.find("planted pair found in 3/3") != std::string::npos);
}

TEST_CASE("timing is opt-in") {
    ExperimentConfig config;
    config.algorithm = Algorithm::find_structures;
    config.table = write_identity_table();
    config.c = 4;
    config.trials = 1;

    CHECK(run(config).document.find("duration_ms") == std::string::npos);
    config.timing = true;
    CHECK(run(config).document.find("duration_ms") != std::string::npos);
}

TEST_CASE("config validation") {
    ExperimentConfig config;
    config.algorithm = Algorithm::find_pr1;
    config.cipher = "family = feistel; half_width = 2; rounds = 1; seed = 1";

    SUBCASE("zero trials") {
        config.trials = 0;
        CHECK_THROWS_AS(run(config), std::invalid_argument);
    }
    SUBCASE("zero repetitions") {
        config.c = 0;
        CHECK_THROWS_AS(run(config), std::invalid_argument);
    }
    SUBCASE("zero cap") {
        config.cap = 0;
        CHECK_THROWS_AS(run(config), std::invalid_argument);
    }
    SUBCASE("both sources") {
        config.table = "x.tt";
        CHECK_THROWS_AS(run(config), std::invalid_argument);
    }
    SUBCASE("table with the wrong algorithm") {
        config.cipher.clear();
        config.table = write_identity_table();
        CHECK_THROWS_AS(run(config), std::invalid_argument);
    }
    SUBCASE("no source") {
        config.cipher.clear();
        CHECK_THROWS_AS(run(config), std::invalid_argument);
    }
    SUBCASE("unknown cipher family") {
        config.cipher = "family = nosuch; rounds = 3; width = 4";
        CHECK_THROWS_AS(run(config), std::invalid_argument);
    }
    SUBCASE("missing table file") {
        config.algorithm = Algorithm::find_structures;
        config.cipher.clear();
        config.table = "/nonexistent/qmim.tt";
        CHECK_THROWS_AS(run(config), std::invalid_argument);
    }
}

TEST_CASE("malformed cipher files report the offending line") {
    const auto path = std::filesystem::temp_directory_path() / "qmim_bad_cipher.txt";
    {
        std::ofstream out(path);
        out << "family = feistel\n";
        out << "half_width = two\n";
        out << "rounds = 1\n";
    }
    ExperimentConfig config;
    config.algorithm = Algorithm::find_pr1;
    config.cipher = path.string();
    CHECK_THROWS_WITH_AS(run(config), doctest::Contains("line 2"), std::invalid_argument);
}
