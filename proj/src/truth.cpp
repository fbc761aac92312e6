#include "qmim/truth.hpp"

#include <bit>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmim::truth {

namespace {

constexpr uint32_t kMaxScanBits = 20;
constexpr uint32_t kMaxPairScanBits = 24;
constexpr uint32_t kMaxGCheckBits = 12;

void require_scan(uint32_t bits, uint32_t limit, const char* what) {
    if (bits > limit)
        throw oracle::CapacityError(std::string(what) + " enumerates 2^" +
                                    std::to_string(bits) + " points, limit is 2^" +
                                    std::to_string(limit));
}

std::vector<uint64_t> value_table(const oracle::OracleFunction& f) {
    const size_t domain = size_t{1} << f.input_width();
    std::vector<uint64_t> values(domain);
    for (size_t x = 0; x < domain; ++x) values[x] = f.raw(x);
    return values;
}

}  // namespace

gf2::Subspace brute_period_space(const oracle::OracleFunction& f) {
    const uint32_t n = f.input_width();
    require_scan(n, kMaxScanBits, "brute_period_space");
    const std::vector<uint64_t> values = value_table(f);
    const size_t domain = values.size();

    // Any period a maps 0 into the fiber of F(0), so that fiber is the
    // candidate set.
    std::vector<gf2::BitVector> periods;
    for (uint64_t a = 1; a < domain; ++a) {
        if (values[a] != values[0]) continue;
        bool period = true;
        for (uint64_t x = 0; period && x < domain; ++x)
            period = values[x ^ a] == values[x];
        if (period) periods.emplace_back(n, a);
    }
    return gf2::Subspace::span(n, periods);
}

gf2::Subspace brute_structure_space(const oracle::OracleFunction& f) {
    const uint32_t n = f.input_width();
    const uint32_t m = f.output_width();
    require_scan(n, kMaxScanBits, "brute_structure_space");
    const std::vector<uint64_t> values = value_table(f);
    const size_t domain = values.size();

    // For a given a the only possible b is F(a) xor F(0).
    std::vector<gf2::BitVector> pairs;
    for (uint64_t a = 0; a < domain; ++a) {
        const uint64_t b = values[a] ^ values[0];
        bool structure = true;
        for (uint64_t x = 0; structure && x < domain; ++x)
            structure = (values[x ^ a] ^ values[x]) == b;
        if (structure) pairs.push_back(gf2::BitVector(n, a).concat(gf2::BitVector(m, b)));
    }
    return gf2::Subspace::span(n + m, pairs);
}

namespace {

struct MaxProbability {
    Rational value{0, 1};
    bool vacuous = true;
};

MaxProbability epsilon_impl(const oracle::OracleFunction& f) {
    const uint32_t n = f.input_width();
    require_scan(n, kMaxScanBits, "compute_epsilon");
    const gf2::Subspace periods = brute_period_space(f);
    const std::vector<uint64_t> values = value_table(f);
    const size_t domain = values.size();

    MaxProbability best;
    int64_t top = 0;
    for (uint64_t a = 1; a < domain; ++a) {
        if (periods.contains(gf2::BitVector(n, a))) continue;
        best.vacuous = false;
        int64_t collisions = 0;
        for (uint64_t x = 0; x < domain; ++x)
            if (values[x ^ a] == values[x]) ++collisions;
        if (collisions > top) top = collisions;
    }
    if (!best.vacuous) best.value = Rational(top, static_cast<int64_t>(domain));
    return best;
}

MaxProbability delta_impl(const oracle::OracleFunction& f) {
    const uint32_t n = f.input_width();
    require_scan(n, kMaxScanBits, "compute_delta");
    const gf2::Subspace structures = brute_structure_space(f);
    const std::vector<uint64_t> values = value_table(f);
    const size_t domain = values.size();
    const uint32_t m = f.output_width();

    // Pairs (a, b) with b never attained contribute probability 0; they are
    // outside the structure space whenever it is not full, so the domain of
    // the max is non-empty exactly when the structure space is proper.
    MaxProbability best;
    best.vacuous = structures.is_full();
    if (best.vacuous) return best;

    int64_t top = 0;
    std::vector<int64_t> histogram(size_t{1} << m, 0);
    for (uint64_t a = 0; a < domain; ++a) {
        std::fill(histogram.begin(), histogram.end(), 0);
        for (uint64_t x = 0; x < domain; ++x) ++histogram[values[x ^ a] ^ values[x]];
        for (uint64_t b = 0; b < histogram.size(); ++b) {
            const int64_t count = histogram[b];
            // count = 2^n exactly when (a, b) is a structure pair.
            if (count <= top || count == static_cast<int64_t>(domain)) continue;
            top = count;
        }
    }
    best.value = Rational(top, static_cast<int64_t>(domain));
    return best;
}

}  // namespace

Rational compute_epsilon(const oracle::OracleFunction& f) { return epsilon_impl(f).value; }

Rational compute_delta(const oracle::OracleFunction& f) { return delta_impl(f).value; }

GroundTruth analyze(const oracle::OracleFunction& f) {
    const MaxProbability eps = epsilon_impl(f);
    const MaxProbability del = delta_impl(f);
    return GroundTruth{brute_period_space(f), brute_structure_space(f),
                       eps.value,             del.value,
                       eps.vacuous,           del.vacuous};
}

gf2::Subspace brute_pr1_diffs(const oracle::KeyedOracle& f) {
    const uint32_t m = f.key_width();
    const uint32_t n = f.block_width();
    require_scan(m + n, kMaxPairScanBits, "brute_pr1_diffs");
    const size_t keys = size_t{1} << m;
    const size_t blocks = size_t{1} << n;

    std::vector<std::vector<uint64_t>> values(keys, std::vector<uint64_t>(blocks));
    for (size_t k = 0; k < keys; ++k)
        for (size_t x = 0; x < blocks; ++x) values[k][x] = f.raw(k, x);

    std::vector<gf2::BitVector> pairs;
    for (uint64_t dx = 0; dx < blocks; ++dx) {
        const uint64_t dy = values[0][dx] ^ values[0][0];
        bool everywhere = true;
        for (size_t k = 0; everywhere && k < keys; ++k)
            for (uint64_t x = 0; everywhere && x < blocks; ++x)
                everywhere = (values[k][x ^ dx] ^ values[k][x]) == dy;
        if (everywhere)
            pairs.push_back(gf2::BitVector(n, dx).concat(gf2::BitVector(n, dy)));
    }
    return gf2::Subspace::span(2 * n, pairs);
}

bool brute_impossible(const oracle::KeyedOracle& f, const gf2::BitVector& delta_in,
                      const gf2::BitVector& delta_out) {
    const uint32_t m = f.key_width();
    const uint32_t n = f.block_width();
    if (delta_in.width() != n || delta_out.width() != n)
        throw std::invalid_argument("differential width does not match the block width");
    require_scan(m + n, kMaxPairScanBits, "brute_impossible");
    const uint64_t dx = delta_in.value();
    const uint64_t dy = delta_out.value();
    for (uint64_t k = 0; k < (uint64_t{1} << m); ++k)
        for (uint64_t x = 0; x < (uint64_t{1} << n); ++x)
            if ((f.raw(k, x ^ dx) ^ f.raw(k, x)) == dy) return false;
    return true;
}

bool g_function_check(uint32_t n, const gf2::BitVector& a) {
    if (n == 0 || a.width() != n) throw std::invalid_argument("shift width must equal n");
    if (a.is_zero()) throw std::invalid_argument("g_function_check needs a nonzero shift");
    require_scan(n, kMaxGCheckBits, "g_function_check");
    const uint64_t domain = uint64_t{1} << n;
    const int64_t half = int64_t{1} << (n - 1);
    const uint64_t shift = a.value();
    for (uint64_t x = 0; x < domain; ++x) {
        int64_t sum = 0;
        for (uint64_t y = 0; y < domain; ++y) {
            if (std::popcount(y & shift) & 1) continue;
            sum += (std::popcount(x & y) & 1) ? -1 : 1;
        }
        const int64_t expected = (x == 0 || x == shift) ? half : 0;
        if (sum != expected) return false;
    }
    return true;
}

}  // namespace qmim::truth
