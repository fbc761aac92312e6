#include "qmim/zoo.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "qmim/qsim.hpp"
#include "qmim/truth.hpp"

namespace qmim::zoo {

namespace {

void require_range(const char* what, uint64_t value, uint64_t lo, uint64_t hi) {
    if (value < lo || value > hi)
        throw std::invalid_argument(std::string(what) + " must lie in [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) +
                                    "], got " + std::to_string(value));
}

void require_table(const std::vector<uint64_t>& sbox, uint32_t width, const char* what) {
    if (sbox.size() != size_t{1} << width)
        throw std::invalid_argument(std::string(what) + " needs " +
                                    std::to_string(size_t{1} << width) + " entries, got " +
                                    std::to_string(sbox.size()));
    for (uint64_t v : sbox)
        if (v >> width)
            throw std::invalid_argument(std::string(what) + " entry " + std::to_string(v) +
                                        " exceeds " + std::to_string(width) + " bits");
}

std::vector<uint64_t> invert_table(const std::vector<uint64_t>& sbox, const char* what) {
    std::vector<uint64_t> inverse(sbox.size(), sbox.size());
    for (uint64_t x = 0; x < sbox.size(); ++x) {
        if (inverse[sbox[x]] != sbox.size())
            throw std::invalid_argument(std::string(what) + " is not a permutation");
        inverse[sbox[x]] = x;
    }
    return inverse;
}

}  // namespace

ToyFeistel::ToyFeistel(uint32_t half_width, uint32_t rounds, std::vector<uint64_t> sbox)
    : half_width_(half_width), rounds_(rounds), sbox_(std::move(sbox)) {
    require_range("feistel half_width", half_width, 2, 4);
    require_range("feistel rounds", rounds, 1, 5);
    require_table(sbox_, half_width_, "feistel sbox");
}

uint64_t ToyFeistel::round_apply(uint32_t, uint64_t subkey, uint64_t x) const {
    const uint64_t mask = (uint64_t{1} << half_width_) - 1;
    const uint64_t left = x & mask;
    const uint64_t right = x >> half_width_;
    return right | ((left ^ sbox_[right ^ subkey]) << half_width_);
}

uint64_t ToyFeistel::round_invert(uint32_t, uint64_t subkey, uint64_t y) const {
    const uint64_t mask = (uint64_t{1} << half_width_) - 1;
    const uint64_t old_right = y & mask;
    const uint64_t mixed = y >> half_width_;
    return (mixed ^ sbox_[old_right ^ subkey]) | (old_right << half_width_);
}

ToySPN::ToySPN(uint32_t width, uint32_t rounds, std::vector<uint64_t> sbox,
               std::vector<uint32_t> perm)
    : width_(width), rounds_(rounds), sbox_(std::move(sbox)), perm_(std::move(perm)) {
    require_range("spn width", width, 4, 8);
    require_range("spn rounds", rounds, 1, 5);
    require_table(sbox_, width_, "spn sbox");
    inverse_sbox_ = invert_table(sbox_, "spn sbox");

    if (perm_.size() != width_)
        throw std::invalid_argument("spn perm needs one position per bit");
    inverse_perm_.assign(width_, width_);
    for (uint32_t i = 0; i < width_; ++i) {
        if (perm_[i] >= width_ || inverse_perm_[perm_[i]] != width_)
            throw std::invalid_argument("spn perm is not a permutation of the bit positions");
        inverse_perm_[perm_[i]] = i;
    }
}

uint64_t ToySPN::round_apply(uint32_t, uint64_t subkey, uint64_t x) const {
    const uint64_t substituted = sbox_[x ^ subkey];
    uint64_t out = 0;
    for (uint32_t i = 0; i < width_; ++i)
        out |= ((substituted >> i) & 1) << perm_[i];
    return out;
}

uint64_t ToySPN::round_invert(uint32_t, uint64_t subkey, uint64_t y) const {
    uint64_t substituted = 0;
    for (uint32_t i = 0; i < width_; ++i)
        substituted |= ((y >> perm_[i]) & 1) << i;
    return inverse_sbox_[substituted] ^ subkey;
}

PlantedCipher::PlantedCipher(uint32_t width, uint64_t seed)
    : width_(width),
      planted_{gf2::BitVector(1, 0), gf2::BitVector(1, 0), gf2::BitVector(1, 0),
               gf2::BitVector(1, 0), 1} {
    require_range("planted width", width, 3, 6);
    std::mt19937_64 rng(seed);
    const uint64_t mask = (uint64_t{1} << width) - 1;

    const uint64_t dx1 = 1 + qsim::uniform_below(rng, mask);
    const uint64_t dy1 = 1 + qsim::uniform_below(rng, mask);
    uint64_t dy2 = dy1;
    while (dy2 == dy1) dy2 = 1 + qsim::uniform_below(rng, mask);
    const uint64_t dx2 = 1 + qsim::uniform_below(rng, mask);

    sbox_head_ = make_structured_sbox(rng, width, dx1, dy1);
    sbox_mid_ = make_structured_sbox(rng, width, dy2, dx2);
    sbox_last_ = random_sbox(rng, width);
    sbox_head_inv_ = invert_table(sbox_head_, "planted head sbox");
    sbox_mid_inv_ = invert_table(sbox_mid_, "planted middle sbox");
    sbox_last_inv_ = invert_table(sbox_last_, "planted last sbox");

    planted_ = PlantedDifferential{gf2::BitVector(width, dx1), gf2::BitVector(width, dx2),
                                   gf2::BitVector(width, dy1), gf2::BitVector(width, dy2), 1};

    if (!truth::brute_impossible(reduced(), planted_.delta_in, planted_.delta_out))
        throw std::logic_error("planted differential failed its impossibility check");
}

uint64_t PlantedCipher::round_apply(uint32_t round, uint64_t subkey, uint64_t x) const {
    switch (round) {
        case 1: return sbox_head_[x] ^ subkey;
        case 2: return sbox_mid_[x ^ subkey];
        case 3: return sbox_last_[x ^ subkey];
    }
    throw std::invalid_argument("planted cipher has three rounds");
}

uint64_t PlantedCipher::round_invert(uint32_t round, uint64_t subkey, uint64_t y) const {
    switch (round) {
        case 1: return sbox_head_inv_[y ^ subkey];
        case 2: return sbox_mid_inv_[y] ^ subkey;
        case 3: return sbox_last_inv_[y] ^ subkey;
    }
    throw std::invalid_argument("planted cipher has three rounds");
}

gf2::BitVector encrypt(const oracle::RoundCipher& cipher, const gf2::BitVector& key,
                       const gf2::BitVector& x) {
    return cipher.full().query(key, x);
}

std::vector<uint64_t> random_sbox(std::mt19937_64& rng, uint32_t width) {
    require_range("sbox width", width, 1, 16);
    std::vector<uint64_t> table(size_t{1} << width);
    for (size_t i = 0; i < table.size(); ++i) table[i] = i;
    for (size_t i = table.size(); i > 1; --i)
        std::swap(table[i - 1], table[qsim::uniform_below(rng, i)]);
    return table;
}

std::vector<uint64_t> make_structured_sbox(std::mt19937_64& rng, uint32_t width,
                                           uint64_t din, uint64_t dout) {
    require_range("sbox width", width, 1, 16);
    const uint64_t mask = (uint64_t{1} << width) - 1;
    if (din == 0 || dout == 0 || din > mask || dout > mask)
        throw std::invalid_argument("structured sbox needs nonzero in-range differences");

    const size_t size = size_t{1} << width;
    const uint64_t unset = ~uint64_t{0};
    std::vector<uint64_t> table(size, unset);

    // Unused outputs stay closed under xor with dout: every assignment
    // removes the full pair {v, v xor dout}.
    std::vector<uint64_t> unused(size);
    std::vector<size_t> position(size);
    for (size_t i = 0; i < size; ++i) {
        unused[i] = i;
        position[i] = i;
    }
    const auto remove_value = [&](uint64_t v) {
        const size_t at = position[v];
        const uint64_t last = unused.back();
        unused[at] = last;
        position[last] = at;
        unused.pop_back();
    };

    for (uint64_t x = 0; x < size; ++x) {
        if (table[x] != unset) continue;
        const uint64_t v = unused[qsim::uniform_below(rng, unused.size())];
        table[x] = v;
        table[x ^ din] = v ^ dout;
        remove_value(v);
        remove_value(v ^ dout);
    }
    return table;
}

namespace {

struct ParseFlags {
    bool family = false, half_width = false, width = false, rounds = false;
    bool sbox = false, perm = false, seed = false;
};

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail_line(int line, const std::string& message) {
    throw std::invalid_argument("cipher description line " + std::to_string(line) + ": " +
                                message);
}

uint64_t parse_number(std::string_view value, int line, int base, const char* what) {
    size_t consumed = 0;
    uint64_t parsed = 0;
    try {
        parsed = std::stoull(std::string(value), &consumed, base);
    } catch (const std::exception&) {
        fail_line(line, std::string("bad ") + what + " value '" + std::string(value) + "'");
    }
    if (consumed != value.size())
        fail_line(line, std::string("bad ") + what + " value '" + std::string(value) + "'");
    return parsed;
}

template <typename T>
std::vector<T> parse_list(std::string_view value, int line, int base, const char* what) {
    std::vector<T> out;
    std::string token;
    std::istringstream stream{std::string(value)};
    while (stream >> token) {
        if (token.back() == ',') token.pop_back();
        if (token.empty()) continue;
        out.push_back(static_cast<T>(parse_number(token, line, base, what)));
    }
    return out;
}

void apply_statement(CipherDescription& d, ParseFlags& seen, std::string_view stmt, int line) {
    const size_t eq = stmt.find('=');
    if (eq == std::string_view::npos) fail_line(line, "expected 'name = value'");
    const std::string_view key = trimmed(stmt.substr(0, eq));
    const std::string_view value = trimmed(stmt.substr(eq + 1));
    if (key.empty()) fail_line(line, "missing field name");
    if (value.empty()) fail_line(line, "missing value for '" + std::string(key) + "'");

    const auto once = [&](bool& flag) {
        if (flag) fail_line(line, "duplicate field '" + std::string(key) + "'");
        flag = true;
    };
    if (key == "family") {
        once(seen.family);
        d.family = std::string(value);
    } else if (key == "half_width") {
        once(seen.half_width);
        d.half_width = static_cast<uint32_t>(parse_number(value, line, 10, "half_width"));
    } else if (key == "width") {
        once(seen.width);
        d.width = static_cast<uint32_t>(parse_number(value, line, 10, "width"));
    } else if (key == "rounds") {
        once(seen.rounds);
        d.rounds = static_cast<uint32_t>(parse_number(value, line, 10, "rounds"));
    } else if (key == "sbox") {
        once(seen.sbox);
        d.sbox = parse_list<uint64_t>(value, line, 16, "sbox");
    } else if (key == "perm") {
        once(seen.perm);
        d.perm = parse_list<uint32_t>(value, line, 10, "perm");
    } else if (key == "seed") {
        once(seen.seed);
        d.seed = parse_number(value, line, 10, "seed");
    } else {
        fail_line(line, "unknown field '" + std::string(key) + "'");
    }
}

}  // namespace

CipherDescription parse_cipher_description(std::string_view text) {
    CipherDescription d;
    ParseFlags seen;
    int line = 1;
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        const char ch = i == text.size() ? '\n' : text[i];
        if (ch != '\n' && ch != ';') continue;
        std::string_view stmt = text.substr(start, i - start);
        start = i + 1;
        if (const size_t hash = stmt.find('#'); hash != std::string_view::npos)
            stmt = stmt.substr(0, hash);
        stmt = trimmed(stmt);
        if (!stmt.empty()) apply_statement(d, seen, stmt, line);
        if (ch == '\n') ++line;
    }

    if (!seen.family) throw std::invalid_argument("cipher description is missing 'family'");
    if (d.family == "feistel") {
        if (!seen.half_width)
            throw std::invalid_argument("feistel description needs 'half_width'");
        if (seen.width || seen.perm)
            throw std::invalid_argument("feistel description takes 'half_width', not "
                                        "'width' or 'perm'");
    } else if (d.family == "spn" || d.family == "planted") {
        if (!seen.width)
            throw std::invalid_argument(d.family + " description needs 'width'");
        if (seen.half_width)
            throw std::invalid_argument(d.family + " description takes 'width', not "
                                        "'half_width'");
        if (d.family == "planted" && (seen.sbox || seen.perm))
            throw std::invalid_argument("planted ciphers derive their tables from the seed");
    } else {
        throw std::invalid_argument("unknown cipher family '" + d.family + "'");
    }
    if (!seen.rounds) throw std::invalid_argument("cipher description is missing 'rounds'");
    return d;
}

CipherDescription parse_cipher_description(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    return parse_cipher_description(std::string_view{text});
}

std::unique_ptr<oracle::RoundCipher> CipherDescription::build() const {
    std::mt19937_64 rng(seed);
    if (family == "feistel") {
        const std::vector<uint64_t> table =
            sbox.empty() ? random_sbox(rng, half_width) : sbox;
        return std::make_unique<ToyFeistel>(half_width, rounds, table);
    }
    if (family == "spn") {
        const std::vector<uint64_t> table = sbox.empty() ? random_sbox(rng, width) : sbox;
        std::vector<uint32_t> positions = perm;
        if (positions.empty()) {
            positions.resize(width);
            for (uint32_t i = 0; i < width; ++i) positions[i] = i;
            for (size_t i = positions.size(); i > 1; --i)
                std::swap(positions[i - 1], positions[qsim::uniform_below(rng, i)]);
        }
        return std::make_unique<ToySPN>(width, rounds, table, positions);
    }
    if (family == "planted") {
        if (rounds != 3)
            throw std::invalid_argument("planted ciphers have exactly 3 rounds");
        return std::make_unique<PlantedCipher>(width, seed);
    }
    throw std::invalid_argument("unknown cipher family '" + family + "'");
}

}  // namespace qmim::zoo
