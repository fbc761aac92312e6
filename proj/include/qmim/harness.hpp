#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "qmim/diff.hpp"
#include "qmim/qsim.hpp"

namespace qmim::harness {

enum class Algorithm { find_structures, find_pr1, find_impossible };

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

/// One experiment. cipher holds an inline description when the text contains
/// '=', otherwise a file path; table is always a truth-table file path and
/// only fits find-structures. Exactly one source must be set. Verification
/// compares every trial against the exhaustive truth scans, so it is only
/// accepted at scales those scans allow.
struct ExperimentConfig {
    Algorithm algorithm = Algorithm::find_structures;
    std::string cipher;
    std::string table;
    uint32_t c = 10;
    uint64_t seed = 0;
    uint32_t trials = 1;
    qsim::Backend backend = qsim::Backend::preimage;
    size_t cap = diff::kDefaultEnumerationCap;
    bool verify = false;
    bool timing = false;
};

/// document is a JSON object with stable key order; summary is the same
/// content condensed into a text table. Reports are byte-identical across
/// runs of the same config unless timing is on. sound tracks the per-trial
/// containment invariants, which hold regardless of how unlucky the sampling
/// gets; ordinary estimation misses only raise the failure rate.
struct Report {
    std::string document;
    std::string summary;
    bool sound = true;
};

Report run(const ExperimentConfig& config);

/// Failure bound (2((1+p0)/2)^c)^E with E = n, n+m, 2n+m, 2n+m for theorems
/// 1-4 and a leading factor 2 for theorem 4, clamped to 1.
double bound(int theorem, uint32_t n, uint32_t m, uint32_t c, double p0);

}  // namespace qmim::harness
