#include "qmim/diff.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

namespace qmim::diff {

namespace {

// Projection dimensions above this would make the pair scan bigger than the
// largest cap anyone reasonably sets; such splits stay implicit.
constexpr uint32_t kMaxPairScanBits = 20;

// A mismatched pair (dy1 != dy2) exists unless both cosets are the same
// single point.
bool mismatch_exists(const gf2::AffineSolutions& a, const gf2::AffineSolutions& b) {
    if (a.directions.dimension() > 0 || b.directions.dimension() > 0) return true;
    return !(a.offset == b.offset);
}

struct MiddleCosets {
    std::vector<gf2::BitVector> inputs;
    std::vector<gf2::AffineSolutions> cosets;
};

// Nonzero input-side projections of a (delta || middle) space together with
// their middle-difference cosets, in ascending input order.
MiddleCosets collect_cosets(const gf2::Subspace& space, uint32_t n) {
    MiddleCosets out;
    const gf2::Subspace proj = gf2::project(space, 0, n);
    for (const gf2::BitVector& dx : proj.elements()) {
        if (dx.is_zero()) continue;
        std::optional<gf2::AffineSolutions> coset = gf2::match_prefix(space, dx);
        out.inputs.push_back(dx);
        out.cosets.push_back(std::move(*coset));
    }
    return out;
}

}  // namespace

Pr1DiffSpace find_pr1_diff(const oracle::KeyedOracle& f, uint32_t c,
                           const qsim::SamplerConfig& cfg) {
    if (c == 0) throw std::invalid_argument("repetition constant must be at least 1");
    const uint32_t m = f.key_width();
    const uint32_t n = f.block_width();
    const oracle::OracleFunction w = oracle::build_w(f.flattened());

    const size_t samples = size_t{c} * (2u * n + m);
    const gf2::GF2Matrix outcomes = qsim::simon_collect(w, samples, cfg);

    std::vector<gf2::BitVector> rows;
    rows.reserve(outcomes.row_count());
    for (size_t i = 0; i < outcomes.row_count(); ++i)
        rows.push_back(outcomes.row(i).slice(m, 2 * n));

    return Pr1DiffSpace{gf2::nullspace(gf2::GF2Matrix(2 * n, std::move(rows))), c, samples};
}

SplitPoint split_cipher(const oracle::RoundCipher& cipher, uint32_t v) {
    const uint32_t r = cipher.rounds();
    if (r < 3) throw std::invalid_argument("splitting needs at least 3 rounds");
    if (v < 1 || v > r - 2)
        throw std::invalid_argument("split point must lie in [1, rounds-2]");
    return SplitPoint{v, cipher.slice(1, v), cipher.slice(v + 1, r - 1)};
}

ImpossibleDifferentialSet::ImpossibleDifferentialSet(uint32_t block_width,
                                                     std::vector<SplitAnalysis> splits,
                                                     size_t cap)
    : block_width_(block_width), splits_(std::move(splits)), cap_(cap) {
    std::map<std::pair<uint64_t, uint64_t>, std::vector<uint32_t>> index;
    for (const SplitAnalysis& split : splits_) {
        const gf2::Subspace in_proj = gf2::project(split.head.space, 0, block_width_);
        const gf2::Subspace out_proj =
            gf2::project(split.inverse_tail.space, 0, block_width_);
        if (in_proj.dimension() + out_proj.dimension() > kMaxPairScanBits) {
            truncated_ = true;
            continue;
        }
        const MiddleCosets heads = collect_cosets(split.head.space, block_width_);
        const MiddleCosets tails = collect_cosets(split.inverse_tail.space, block_width_);
        for (size_t i = 0; i < heads.inputs.size(); ++i) {
            for (size_t j = 0; j < tails.inputs.size(); ++j) {
                if (!mismatch_exists(heads.cosets[i], tails.cosets[j])) continue;
                const std::pair<uint64_t, uint64_t> key{heads.inputs[i].value(),
                                                        tails.inputs[j].value()};
                auto it = index.find(key);
                if (it == index.end()) {
                    if (index.size() >= cap_) {
                        truncated_ = true;
                        continue;
                    }
                    it = index.emplace(key, std::vector<uint32_t>{}).first;
                }
                it->second.push_back(split.v);
            }
        }
    }
    entries_.reserve(index.size());
    for (auto& [key, witnesses] : index) {
        entries_.push_back(ImpossibleEntry{
            Differential{gf2::BitVector(block_width_, key.first),
                         gf2::BitVector(block_width_, key.second)},
            std::move(witnesses)});
    }
}

bool ImpossibleDifferentialSet::contains(const Differential& d) const {
    if (d.delta_in.width() != block_width_ || d.delta_out.width() != block_width_)
        throw std::invalid_argument("differential width does not match the block width");
    if (d.delta_in.is_zero() || d.delta_out.is_zero()) return false;
    for (const SplitAnalysis& split : splits_) {
        const auto y1 = gf2::match_prefix(split.head.space, d.delta_in);
        if (!y1) continue;
        const auto y2 = gf2::match_prefix(split.inverse_tail.space, d.delta_out);
        if (!y2) continue;
        if (mismatch_exists(*y1, *y2)) return true;
    }
    return false;
}

uint64_t ImpossibleDifferentialSet::total_queries() const {
    uint64_t total = 0;
    for (const SplitAnalysis& split : splits_)
        total += split.head.samples_used + split.inverse_tail.samples_used;
    return total;
}

ImpossibleDifferentialSet find_impossible(const oracle::RoundCipher& cipher, uint32_t c,
                                          const qsim::SamplerConfig& cfg, size_t cap) {
    const uint32_t r = cipher.rounds();
    if (r < 3)
        throw std::invalid_argument("impossible-differential search needs at least 3 rounds");
    std::vector<SplitAnalysis> splits;
    splits.reserve(r - 2);
    for (uint32_t v = 1; v <= r - 2; ++v) {
        const SplitPoint point = split_cipher(cipher, v);
        qsim::SamplerConfig head_cfg = cfg;
        head_cfg.seed = qsim::derive_seed(cfg.seed, 2 * v);
        qsim::SamplerConfig tail_cfg = cfg;
        tail_cfg.seed = qsim::derive_seed(cfg.seed, 2 * v + 1);

        splits.push_back(
            SplitAnalysis{v, find_pr1_diff(point.head, c, head_cfg),
                          find_pr1_diff(oracle::invert(point.tail), c, tail_cfg)});
    }
    return ImpossibleDifferentialSet(cipher.block_width(), std::move(splits), cap);
}

}  // namespace qmim::diff
