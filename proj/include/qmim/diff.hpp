#pragma once

#include <cstdint>
#include <vector>

#include "qmim/gf2.hpp"
#include "qmim/oracle.hpp"
#include "qmim/qsim.hpp"

namespace qmim::diff {

struct Differential {
    gf2::BitVector delta_in;
    gf2::BitVector delta_out;
    bool operator==(const Differential&) const = default;
};

/// Candidate space over (delta_in || delta_out), width 2n. Every
/// key-independent probability-1 differential of the sampled oracle lies in
/// the space; with the advertised probability nothing else does.
struct Pr1DiffSpace {
    gf2::Subspace space;
    uint32_t c = 0;
    size_t samples_used = 0;
};

/// Samples W(k || x || y) = F(k, x) xor y with c*(2n+m) queries and solves
/// the system restricted to the (x, y) coordinates of the outcomes.
Pr1DiffSpace find_pr1_diff(const oracle::KeyedOracle& f, uint32_t c,
                           const qsim::SamplerConfig& cfg);

/// One miss-in-the-middle decomposition of the reduced cipher: head covers
/// rounds 1..v, tail rounds v+1..r-1, so the pair composes to the full
/// cipher minus its last round.
struct SplitPoint {
    uint32_t v = 0;
    oracle::KeyedOracle head;
    oracle::KeyedOracle tail;
};

/// Requires rounds >= 3 and 1 <= v <= rounds-2.
SplitPoint split_cipher(const oracle::RoundCipher& cipher, uint32_t v);

struct SplitAnalysis {
    uint32_t v = 0;
    Pr1DiffSpace head;          // input difference paired with middle difference
    Pr1DiffSpace inverse_tail;  // output-side difference paired with middle difference
};

struct ImpossibleEntry {
    Differential differential;
    std::vector<uint32_t> splits;  // every v that witnesses the mismatch
};

/// The set H of candidate impossible differentials, held implicitly as the
/// per-split space pairs. Membership is exact and needs no enumeration; the
/// explicit listing is capped and flags truncation.
class ImpossibleDifferentialSet {
  public:
    ImpossibleDifferentialSet(uint32_t block_width, std::vector<SplitAnalysis> splits,
                              size_t cap);

    uint32_t block_width() const { return block_width_; }
    const std::vector<SplitAnalysis>& splits() const { return splits_; }
    const std::vector<ImpossibleEntry>& enumerated() const { return entries_; }
    bool truncated() const { return truncated_; }
    size_t cap() const { return cap_; }

    /// True iff some split pairs delta_in with one middle difference and
    /// delta_out with a different one.
    bool contains(const Differential& d) const;

    /// Sampler queries consumed while building the per-split spaces.
    uint64_t total_queries() const;

  private:
    uint32_t block_width_;
    std::vector<SplitAnalysis> splits_;
    size_t cap_;
    std::vector<ImpossibleEntry> entries_;
    bool truncated_ = false;
};

inline constexpr size_t kDefaultEnumerationCap = 4096;

/// Runs find_pr1_diff on every head and inverted tail of the reduced cipher
/// and merges the mismatched pairs. Requires rounds >= 3. Each (v, side)
/// pair draws its seed from cfg.seed, so runs are reproducible.
ImpossibleDifferentialSet find_impossible(const oracle::RoundCipher& cipher, uint32_t c,
                                          const qsim::SamplerConfig& cfg,
                                          size_t cap = kDefaultEnumerationCap);

}  // namespace qmim::diff
