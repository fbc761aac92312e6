#include "qmim/truth.hpp"

#include <random>
#include <stdexcept>

#include "doctest.h"
#include "qmim/gf2.hpp"
#include "qmim/oracle.hpp"

using namespace qmim;
using namespace qmim::truth;
using gf2::BitVector;
using gf2::Subspace;
using oracle::KeyedOracle;
using oracle::OracleFunction;

namespace {

BitVector bv(std::string_view text) { return BitVector::parse(text); }

OracleFunction table_oracle(uint32_t n, uint32_t m, std::initializer_list<uint64_t> values) {
    std::vector<BitVector> table;
    for (uint64_t v : values) table.emplace_back(m, v);
    return oracle::from_truth_table(n, m, table);
}

OracleFunction random_oracle(std::mt19937_64& rng, uint32_t n, uint32_t m) {
    std::vector<BitVector> table;
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x)
        table.emplace_back(m, rng() & ((uint64_t{1} << m) - 1));
    return oracle::from_truth_table(n, m, table);
}

OracleFunction identity_oracle(uint32_t n) {
    std::vector<BitVector> table;
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x) table.emplace_back(n, x);
    return oracle::from_truth_table(n, n, table);
}

// One Feistel round on 2t bits: (L, R) -> (R, L xor S[R xor k]).
KeyedOracle one_round_feistel(uint32_t t, std::vector<uint64_t> sbox) {
    const uint64_t half_mask = (uint64_t{1} << t) - 1;
    return KeyedOracle(
        t, 2 * t,
        [t, half_mask, sbox](uint64_t k, uint64_t x) {
            const uint64_t left = x & half_mask;
            const uint64_t right = x >> t;
            return right | ((left ^ sbox[(right ^ k) & half_mask]) << t);
        });
}

}  // namespace

TEST_CASE("period spaces") {
    CHECK(brute_period_space(table_oracle(2, 2, {0b00, 0b11, 0b11, 0b00})) ==
          Subspace::span(2, {bv("11")}));
    CHECK(brute_period_space(identity_oracle(4)).dimension() == 0);
    CHECK(brute_period_space(table_oracle(2, 2, {1, 1, 1, 1})) == Subspace::full(2));
}

TEST_CASE("structure spaces") {
    SUBCASE("identity gives the diagonal") {
        const Subspace s = brute_structure_space(identity_oracle(3));
        CHECK(s.dimension() == 3);
        for (uint64_t a = 0; a < 8; ++a)
            CHECK(s.contains(BitVector(3, a).concat(BitVector(3, a))));
    }
    SUBCASE("constant map pairs every shift with zero") {
        const Subspace s = brute_structure_space(table_oracle(2, 2, {2, 2, 2, 2}));
        CHECK(s.dimension() == 2);
        for (uint64_t a = 0; a < 4; ++a)
            CHECK(s.contains(BitVector(2, a).concat(BitVector(2, 0))));
        CHECK_FALSE(s.contains(bv("0001")));
    }
    SUBCASE("random wide functions are typically structureless") {
        std::mt19937_64 rng(19);
        int trivial = 0;
        for (int i = 0; i < 10; ++i)
            if (brute_structure_space(random_oracle(rng, 6, 6)).dimension() == 0) ++trivial;
        CHECK(trivial >= 8);
    }
    SUBCASE("matches the direct double scan") {
        std::mt19937_64 rng(23);
        for (int trial = 0; trial < 10; ++trial) {
            const uint32_t n = 3 + static_cast<uint32_t>(rng() % 3);
            const uint32_t m = 2 + static_cast<uint32_t>(rng() % 3);
            const OracleFunction f = random_oracle(rng, n, m);
            const Subspace s = brute_structure_space(f);
            for (uint64_t a = 0; a < (uint64_t{1} << n); ++a)
                for (uint64_t b = 0; b < (uint64_t{1} << m); ++b) {
                    bool structure = true;
                    for (uint64_t x = 0; structure && x < (uint64_t{1} << n); ++x)
                        structure = (f.raw(x ^ a) ^ f.raw(x)) == b;
                    CHECK(s.contains(BitVector(n, a).concat(BitVector(m, b))) == structure);
                }
        }
    }
    SUBCASE("zero slice of the structure space is the period space") {
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 10; ++trial) {
            const OracleFunction f = random_oracle(rng, 5, 3);
            const Subspace structures = brute_structure_space(f);
            const Subspace periods = brute_period_space(f);
            for (uint64_t a = 0; a < 32; ++a) {
                const BitVector pair = BitVector(5, a).concat(BitVector(3, 0));
                CHECK(structures.contains(pair) == periods.contains(BitVector(5, a)));
            }
        }
    }
}

TEST_CASE("epsilon and delta") {
    SUBCASE("exact promise gives epsilon zero") {
        const OracleFunction f = table_oracle(2, 2, {0b00, 0b11, 0b11, 0b00});
        CHECK(compute_epsilon(f) == Rational(0, 1));
    }
    SUBCASE("linear bijections give delta zero") {
        // x -> (x0^x1, x1, x2) is linear and invertible on 3 bits.
        std::vector<BitVector> table;
        for (uint64_t x = 0; x < 8; ++x)
            table.emplace_back(3, (x & 6) | ((x ^ (x >> 1)) & 1));
        const OracleFunction lin = oracle::from_truth_table(3, 3, table);
        CHECK(compute_delta(lin) == Rational(0, 1));
        CHECK(compute_epsilon(lin) == Rational(0, 1));
    }
    SUBCASE("masking map counted by hand") {
        std::vector<BitVector> table;
        for (uint64_t x = 0; x < 16; ++x) table.emplace_back(4, x & 0b1110);
        const OracleFunction mask = oracle::from_truth_table(4, 4, table);
        // Periods are exactly {0000, 1000}; any other shift flips a kept bit
        // and never collides, so the max outside the period space is 0.
        CHECK(brute_period_space(mask) == Subspace::span(4, {bv("1000")}));
        CHECK(compute_epsilon(mask) == Rational(0, 1));
    }
    SUBCASE("epsilon stays below one whenever its domain is non-empty") {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 20; ++trial) {
            const OracleFunction f = random_oracle(rng, 4, 2);
            const GroundTruth gt = analyze(f);
            if (!gt.epsilon_vacuous) CHECK(gt.epsilon.num < gt.epsilon.den);
            if (!gt.delta_vacuous) CHECK(gt.delta.num < gt.delta.den);
        }
    }
    SUBCASE("constant functions have a vacuous epsilon") {
        const GroundTruth gt = analyze(table_oracle(3, 2, {1, 1, 1, 1, 1, 1, 1, 1}));
        CHECK(gt.epsilon_vacuous);
        CHECK(gt.epsilon == Rational(0, 1));
        CHECK_FALSE(gt.delta_vacuous);
    }
    SUBCASE("agrees with a direct maximum") {
        std::mt19937_64 rng(37);
        for (int trial = 0; trial < 10; ++trial) {
            const OracleFunction f = random_oracle(rng, 4, 3);
            const Subspace periods = brute_period_space(f);
            int64_t best = 0;
            for (uint64_t a = 1; a < 16; ++a) {
                if (periods.contains(BitVector(4, a))) continue;
                int64_t hits = 0;
                for (uint64_t x = 0; x < 16; ++x)
                    if (f.raw(x ^ a) == f.raw(x)) ++hits;
                best = std::max(best, hits);
            }
            CHECK(compute_epsilon(f) == Rational(best, 16));
        }
    }
}

TEST_CASE("key independent probability-1 differentials") {
    SUBCASE("xor with the key keeps the diagonal") {
        const KeyedOracle f(4, 4, [](uint64_t k, uint64_t x) { return x ^ k; });
        const Subspace s = brute_pr1_diffs(f);
        CHECK(s.dimension() == 4);
        for (uint64_t a = 0; a < 16; ++a)
            CHECK(s.contains(BitVector(4, a).concat(BitVector(4, a))));
    }
    SUBCASE("one-round feistel swaps the halves") {
        const KeyedOracle f = one_round_feistel(3, {5, 2, 7, 0, 3, 6, 1, 4});
        const Subspace s = brute_pr1_diffs(f);
        for (uint64_t a = 0; a < 8; ++a)
            CHECK(s.contains(BitVector(3, a).concat(bv("000")).concat(
                BitVector(3, 0).concat(BitVector(3, a)))));
    }
    SUBCASE("keyed random sbox has only the trivial differential") {
        std::mt19937_64 rng(41);
        std::vector<std::vector<BitVector>> tables;
        for (int k = 0; k < 4; ++k) {
            std::vector<uint64_t> perm{0, 1, 2, 3, 4, 5, 6, 7,
                                       8, 9, 10, 11, 12, 13, 14, 15};
            for (size_t i = perm.size(); i > 1; --i)
                std::swap(perm[i - 1], perm[rng() % i]);
            std::vector<BitVector> t;
            for (uint64_t v : perm) t.emplace_back(4, v);
            tables.push_back(std::move(t));
        }
        const KeyedOracle f = oracle::keyed_from_truth_tables(2, 4, tables);
        CHECK(brute_pr1_diffs(f).dimension() == 0);
    }
    SUBCASE("equals the intersection of per-key structure spaces") {
        std::mt19937_64 rng(43);
        for (int trial = 0; trial < 5; ++trial) {
            const uint32_t n = 4;
            std::vector<std::vector<BitVector>> tables;
            for (int k = 0; k < 8; ++k) {
                std::vector<BitVector> t;
                for (uint64_t x = 0; x < 16; ++x) t.emplace_back(n, rng() & 15);
                tables.push_back(std::move(t));
            }
            const KeyedOracle f = oracle::keyed_from_truth_tables(3, n, tables);

            Subspace meet = Subspace::full(2 * n);
            for (uint64_t k = 0; k < 8; ++k) {
                const OracleFunction fixed = oracle::from_truth_table(n, n, tables[k]);
                meet = gf2::intersect(meet, brute_structure_space(fixed));
            }
            CHECK(brute_pr1_diffs(f) == meet);
        }
    }
}

TEST_CASE("impossibility scan") {
    const KeyedOracle f = one_round_feistel(3, {5, 2, 7, 0, 3, 6, 1, 4});
    CHECK_FALSE(brute_impossible(f, bv("000000"), bv("000000")));
    CHECK_FALSE(brute_impossible(f, bv("110000"), bv("000110")));

    SUBCASE("agrees with an independent scan") {
        std::mt19937_64 rng(47);
        for (int trial = 0; trial < 40; ++trial) {
            const BitVector dx(6, rng() & 63);
            const BitVector dy(6, rng() & 63);
            bool realized = false;
            for (uint64_t k = 0; !realized && k < 8; ++k)
                for (uint64_t x = 0; !realized && x < 64; ++x)
                    realized = (f.raw(k, x ^ dx.value()) ^ f.raw(k, x)) == dy.value();
            CHECK(brute_impossible(f, dx, dy) == !realized);
        }
    }
    SUBCASE("width mismatch rejected") {
        CHECK_THROWS_AS(brute_impossible(f, bv("000"), bv("000000")), std::invalid_argument);
    }
}

TEST_CASE("g function identity") {
    CHECK(g_function_check(3, bv("101")));
    CHECK(g_function_check(2, bv("11")));
    CHECK(g_function_check(1, bv("1")));
    for (uint32_t n = 1; n <= 6; ++n)
        for (uint64_t a = 1; a < (uint64_t{1} << n); ++a)
            CHECK(g_function_check(n, BitVector(n, a)));
    CHECK_THROWS_AS(g_function_check(3, bv("000")), std::invalid_argument);
    CHECK_THROWS_AS(g_function_check(3, bv("01")), std::invalid_argument);
}
