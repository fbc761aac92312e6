#include "qmim/oracle.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "qmim/gf2.hpp"

using namespace qmim;
using namespace qmim::oracle;
using gf2::BitVector;

namespace {

BitVector bv(std::string_view text) { return BitVector::parse(text); }

std::vector<BitVector> table_of(uint32_t m, std::initializer_list<uint64_t> values) {
    std::vector<BitVector> out;
    for (uint64_t v : values) out.emplace_back(m, v);
    return out;
}

OracleFunction random_oracle(std::mt19937_64& rng, uint32_t n, uint32_t m) {
    std::vector<BitVector> table;
    for (uint64_t x = 0; x < (uint64_t{1} << n); ++x)
        table.emplace_back(m, rng() & ((uint64_t{1} << m) - 1));
    return from_truth_table(n, m, table);
}

// Two-bit block, three rounds: y = rotl1(x) xor subkey. Enough structure to
// exercise slicing without involving the zoo.
class RotCipher : public RoundCipher {
  public:
    uint32_t block_width() const override { return 2; }
    uint32_t rounds() const override { return 3; }
    uint32_t subkey_width() const override { return 2; }
    uint64_t round_apply(uint32_t, uint64_t subkey, uint64_t x) const override {
        const uint64_t rot = ((x << 1) | (x >> 1)) & 3;
        return rot ^ subkey;
    }
    uint64_t round_invert(uint32_t, uint64_t subkey, uint64_t y) const override {
        const uint64_t rot = y ^ subkey;
        return ((rot >> 1) | (rot << 1)) & 3;
    }
};

}  // namespace

TEST_CASE("truth table oracles") {
    const OracleFunction id1 = from_truth_table(1, 1, table_of(1, {0, 1}));
    CHECK(id1.query(bv("0")) == bv("0"));
    CHECK(id1.query(bv("1")) == bv("1"));

    const OracleFunction period = from_truth_table(2, 2, table_of(2, {0b00, 0b11, 0b11, 0b00}));
    for (uint64_t x = 0; x < 4; ++x) CHECK(period.raw(x) == period.raw(x ^ 3));

    CHECK_THROWS_AS(from_truth_table(2, 1, table_of(1, {0, 1, 0})), std::invalid_argument);
    CHECK_THROWS_AS(from_truth_table(2, 1, std::vector<BitVector>{bv("0"), bv("1"), bv("0"), bv("10")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(id1.query(bv("01")), std::invalid_argument);
}

TEST_CASE("truth table file round trip") {
    std::mt19937_64 rng(41);
    const OracleFunction f = random_oracle(rng, 3, 2);
    std::stringstream buffer;
    write_truth_table(buffer, f);
    const OracleFunction g = read_truth_table(buffer);
    CHECK(g.input_width() == 3);
    CHECK(g.output_width() == 2);
    for (uint64_t x = 0; x < 8; ++x) CHECK(g.raw(x) == f.raw(x));

    SUBCASE("header errors carry position") {
        std::stringstream bad("3\n");
        CHECK_THROWS_WITH_AS(read_truth_table(bad), doctest::Contains("line 1"),
                             std::invalid_argument);
    }
    SUBCASE("short tables rejected") {
        std::stringstream bad("2 1\n0\n1\n");
        CHECK_THROWS_AS(read_truth_table(bad), std::invalid_argument);
    }
    SUBCASE("wrong entry width carries line number") {
        std::stringstream bad("2 1\n0\n1\n10\n1\n");
        CHECK_THROWS_WITH_AS(read_truth_table(bad), doctest::Contains("line 4"),
                             std::invalid_argument);
    }
}

TEST_CASE("w construction") {
    SUBCASE("identity on one bit") {
        const OracleFunction w = build_w(from_truth_table(1, 1, table_of(1, {0, 1})));
        CHECK(w.input_width() == 2);
        CHECK(w.output_width() == 1);
        CHECK(w.query(bv("00")) == bv("0"));
        CHECK(w.query(bv("01")) == bv("1"));
        CHECK(w.query(bv("10")) == bv("1"));
        CHECK(w.query(bv("11")) == bv("0"));
    }
    SUBCASE("constant function leaves only the y part") {
        const OracleFunction w = build_w(from_truth_table(2, 2, table_of(2, {0, 0, 0, 0})));
        for (uint64_t x = 0; x < 4; ++x)
            for (uint64_t y = 0; y < 4; ++y) CHECK(w.raw(x | (y << 2)) == y);
    }
    SUBCASE("table lookup plus xor") {
        const OracleFunction f = from_truth_table(2, 2, table_of(2, {0b00, 0b11, 0b11, 0b00}));
        const OracleFunction w = build_w(f);
        CHECK(w.query(bv("01").concat(bv("10"))) == (bv("11") ^ bv("10")));
    }
    SUBCASE("evaluating at y = 0 recovers f") {
        std::mt19937_64 rng(4);
        const OracleFunction f = random_oracle(rng, 4, 3);
        const OracleFunction w = build_w(f);
        for (uint64_t x = 0; x < 16; ++x) CHECK(w.raw(x) == f.raw(x));
    }
}

TEST_CASE("w periods are exactly the linear structure pairs") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const uint32_t n = 3 + static_cast<uint32_t>(rng() % 3);
        const uint32_t m = 2 + static_cast<uint32_t>(rng() % 3);
        const OracleFunction f = random_oracle(rng, n, m);
        const OracleFunction w = build_w(f);
        for (uint64_t a = 0; a < (uint64_t{1} << n); ++a) {
            for (uint64_t b = 0; b < (uint64_t{1} << m); ++b) {
                bool structure = true;
                for (uint64_t x = 0; structure && x < (uint64_t{1} << n); ++x)
                    structure = (f.raw(x ^ a) ^ f.raw(x)) == b;
                const uint64_t shift = a | (b << n);
                bool period = true;
                for (uint64_t z = 0; period && z < (uint64_t{1} << (n + m)); ++z)
                    period = w.raw(z ^ shift) == w.raw(z);
                CHECK(structure == period);
            }
        }
    }
}

TEST_CASE("query counting") {
    std::mt19937_64 rng(2);
    const OracleFunction f = random_oracle(rng, 3, 3);
    CHECK(f.query_count() == 0);
    f.query(bv("000"));
    f.query(bv("101"));
    CHECK(f.query_count() == 2);
    (void)f.eval_uncounted(bv("000"));
    (void)f.raw(5);
    CHECK(f.query_count() == 2);
    f.record_queries(3);
    CHECK(f.query_count() == 5);

    SUBCASE("w queries bill the base oracle") {
        const OracleFunction w = build_w(f);
        const uint64_t before = f.query_count();
        w.query(bv("000000"));
        w.record_queries(2);
        CHECK(w.query_count() == 3);
        CHECK(f.query_count() == before + 3);
    }
}

TEST_CASE("keyed oracles") {
    const KeyedOracle xor_key(
        3, 3, [](uint64_t k, uint64_t x) { return x ^ k; },
        [](uint64_t k, uint64_t y) { return y ^ k; });
    CHECK(xor_key.invertible());
    CHECK(xor_key.query(bv("110"), bv("011")) == bv("101"));
    CHECK(xor_key.query_count() == 1);

    SUBCASE("flattening puts the key first") {
        const OracleFunction& flat = xor_key.flattened();
        CHECK(flat.input_width() == 6);
        CHECK(flat.output_width() == 3);
        for (uint64_t k = 0; k < 8; ++k)
            for (uint64_t x = 0; x < 8; ++x) CHECK(flat.raw(k | (x << 3)) == (x ^ k));
        CHECK(&flat == &xor_key.flattened());
    }
    SUBCASE("flattened queries bill the keyed oracle") {
        const uint64_t before = xor_key.query_count();
        xor_key.flattened().query(bv("000000"));
        CHECK(xor_key.query_count() == before + 1);
    }
    SUBCASE("zero key width degenerates to a plain function") {
        const KeyedOracle plain(0, 2, [](uint64_t, uint64_t x) { return x ^ 1; });
        CHECK(plain.raw(0, 2) == 3);
        CHECK(plain.flattened().input_width() == 2);
    }
}

TEST_CASE("keyed inversion") {
    const KeyedOracle f(
        2, 2, [](uint64_t k, uint64_t x) { return (x + k) & 3; },
        [](uint64_t k, uint64_t y) { return (y - k) & 3; });
    const KeyedOracle g = invert(f);
    for (uint64_t k = 0; k < 4; ++k)
        for (uint64_t x = 0; x < 4; ++x) {
            CHECK(g.raw(k, f.raw(k, x)) == x);
            CHECK(invert(g).raw(k, x) == f.raw(k, x));
        }

    SUBCASE("inverse queries bill the original") {
        const uint64_t before = f.query_count();
        g.query(bv("01"), bv("11"));
        CHECK(f.query_count() == before + 1);
    }
    SUBCASE("non-bijective maps refuse inversion") {
        const std::vector<std::vector<BitVector>> tables{
            table_of(2, {0, 0, 1, 2}), table_of(2, {0, 1, 2, 3})};
        const KeyedOracle squash = keyed_from_truth_tables(1, 2, tables);
        CHECK_FALSE(squash.invertible());
        CHECK_THROWS_AS(invert(squash), std::logic_error);
    }
    SUBCASE("bijective tables invert by lookup") {
        const std::vector<std::vector<BitVector>> tables{
            table_of(2, {2, 0, 3, 1}), table_of(2, {1, 2, 3, 0})};
        const KeyedOracle perm = keyed_from_truth_tables(1, 2, tables);
        REQUIRE(perm.invertible());
        const KeyedOracle back = invert(perm);
        for (uint64_t k = 0; k < 2; ++k)
            for (uint64_t x = 0; x < 4; ++x) CHECK(back.raw(k, perm.raw(k, x)) == x);
    }
}

TEST_CASE("round cipher slicing") {
    const RotCipher cipher;
    const KeyedOracle whole = cipher.full();
    CHECK(whole.key_width() == 6);
    CHECK(whole.block_width() == 2);

    SUBCASE("slices compose to the whole cipher") {
        for (uint32_t v = 1; v <= 2; ++v) {
            const KeyedOracle head = cipher.slice(1, v);
            const KeyedOracle tail = cipher.slice(v + 1, 3);
            CHECK(head.key_width() + tail.key_width() == 6);
            for (uint64_t key = 0; key < 64; ++key) {
                const uint64_t k1 = key & ((uint64_t{1} << head.key_width()) - 1);
                const uint64_t k2 = key >> head.key_width();
                for (uint64_t x = 0; x < 4; ++x)
                    CHECK(tail.raw(k2, head.raw(k1, x)) == whole.raw(key, x));
            }
        }
    }
    SUBCASE("inverse slices undo forward slices") {
        const KeyedOracle mid = cipher.slice(2, 3);
        const KeyedOracle back = invert(mid);
        for (uint64_t k = 0; k < 16; ++k)
            for (uint64_t x = 0; x < 4; ++x) CHECK(back.raw(k, mid.raw(k, x)) == x);
    }
    SUBCASE("empty range is the identity with no key") {
        const KeyedOracle none = cipher.slice(2, 1);
        CHECK(none.key_width() == 0);
        for (uint64_t x = 0; x < 4; ++x) CHECK(none.raw(0, x) == x);
    }
    SUBCASE("bad ranges rejected") {
        CHECK_THROWS_AS(cipher.slice(0, 2), std::invalid_argument);
        CHECK_THROWS_AS(cipher.slice(1, 4), std::invalid_argument);
        CHECK_THROWS_AS(cipher.slice(3, 1), std::invalid_argument);
    }
    SUBCASE("slice queries roll up to the cipher counter") {
        const uint64_t before = cipher.query_count();
        cipher.slice(1, 2).query(bv("0000"), bv("01"));
        whole.query(bv("000000"), bv("10"));
        CHECK(cipher.query_count() == before + 2);
    }
    SUBCASE("repeated slices share one instance") {
        const KeyedOracle a = cipher.slice(1, 2);
        const KeyedOracle b = cipher.slice(1, 2);
        CHECK(&a.flattened() == &b.flattened());
    }
}
