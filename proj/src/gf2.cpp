#include "qmim/gf2.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace qmim::gf2 {

namespace {

uint64_t width_mask(uint32_t width) {
    return width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
}

}  // namespace

BitVector::BitVector(uint32_t width, uint64_t value) : width_(width), value_(value) {
    if (width == 0 || width > 64) {
        throw std::invalid_argument("BitVector width must be in [1, 64]");
    }
    if (value & ~width_mask(width)) {
        throw std::invalid_argument("BitVector value has bits beyond its width");
    }
}

BitVector BitVector::unit(uint32_t width, uint32_t coord) {
    if (coord >= width) {
        throw std::invalid_argument("unit coordinate out of range");
    }
    return BitVector(width, uint64_t{1} << coord);
}

bool BitVector::bit(uint32_t i) const {
    if (i >= width_) {
        throw std::invalid_argument("bit index out of range");
    }
    return (value_ >> i) & 1;
}

BitVector BitVector::operator^(const BitVector& other) const {
    if (width_ != other.width_) {
        throw std::invalid_argument("width mismatch in xor");
    }
    return BitVector(width_, value_ ^ other.value_);
}

bool BitVector::dot(const BitVector& other) const {
    if (width_ != other.width_) {
        throw std::invalid_argument("width mismatch in dot product");
    }
    return std::popcount(value_ & other.value_) & 1;
}

BitVector BitVector::concat(const BitVector& tail) const {
    if (width_ + tail.width_ > 64) {
        throw std::invalid_argument("concatenation exceeds 64 bits");
    }
    return BitVector(width_ + tail.width_, value_ | (tail.value_ << width_));
}

BitVector BitVector::slice(uint32_t from, uint32_t len) const {
    if (len == 0 || from + len > width_) {
        throw std::invalid_argument("slice out of range");
    }
    return BitVector(len, (value_ >> from) & width_mask(len));
}

BitVector BitVector::parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon != std::string_view::npos) {
        // "width:xHEX"
        uint32_t width = 0;
        for (char ch : text.substr(0, colon)) {
            if (ch < '0' || ch > '9') throw std::invalid_argument("bad width in bit vector literal");
            width = width * 10 + static_cast<uint32_t>(ch - '0');
            if (width > 64) throw std::invalid_argument("bit vector width too large");
        }
        std::string_view rest = text.substr(colon + 1);
        if (rest.size() < 2 || rest[0] != 'x') {
            throw std::invalid_argument("expected 'x' after width prefix");
        }
        uint64_t value = 0;
        for (char ch : rest.substr(1)) {
            int digit;
            if (ch >= '0' && ch <= '9') digit = ch - '0';
            else if (ch >= 'a' && ch <= 'f') digit = ch - 'a' + 10;
            else if (ch >= 'A' && ch <= 'F') digit = ch - 'A' + 10;
            else throw std::invalid_argument("bad hex digit in bit vector literal");
            if (value >> 60) throw std::invalid_argument("bit vector literal overflows 64 bits");
            value = (value << 4) | static_cast<uint64_t>(digit);
        }
        return BitVector(width, value);
    }
    if (text.empty() || text.size() > 64) {
        throw std::invalid_argument("bad bit vector literal length");
    }
    uint64_t value = 0;
    for (size_t i = 0; i < text.size(); i++) {
        if (text[i] == '1') value |= uint64_t{1} << i;
        else if (text[i] != '0') throw std::invalid_argument("bad character in bit vector literal");
    }
    return BitVector(static_cast<uint32_t>(text.size()), value);
}

std::string BitVector::str() const {
    std::string s(width_, '0');
    for (uint32_t i = 0; i < width_; i++) {
        if ((value_ >> i) & 1) s[i] = '1';
    }
    return s;
}

std::string BitVector::str_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string hex;
    uint64_t v = value_;
    do {
        hex.insert(hex.begin(), digits[v & 0xf]);
        v >>= 4;
    } while (v);
    return std::to_string(width_) + ":x" + hex;
}

GF2Matrix::GF2Matrix(uint32_t width) : width_(width) {
    if (width == 0 || width > 64) {
        throw std::invalid_argument("GF2Matrix width must be in [1, 64]");
    }
}

GF2Matrix::GF2Matrix(uint32_t width, std::vector<BitVector> rows) : GF2Matrix(width) {
    for (const BitVector& r : rows) {
        if (r.width() != width) {
            throw std::invalid_argument("row width mismatch in GF2Matrix");
        }
    }
    rows_ = std::move(rows);
}

GF2Matrix rref(const GF2Matrix& m) {
    std::vector<uint64_t> rows;
    rows.reserve(m.row_count());
    for (const BitVector& r : m.rows()) rows.push_back(r.value());

    size_t next = 0;
    for (uint32_t col = 0; col < m.width() && next < rows.size(); col++) {
        uint64_t bit = uint64_t{1} << col;
        size_t pivot = next;
        while (pivot < rows.size() && !(rows[pivot] & bit)) pivot++;
        if (pivot == rows.size()) continue;
        std::swap(rows[next], rows[pivot]);
        for (size_t r = 0; r < rows.size(); r++) {
            if (r != next && (rows[r] & bit)) rows[r] ^= rows[next];
        }
        next++;
    }
    std::vector<BitVector> out;
    out.reserve(next);
    for (size_t i = 0; i < next; i++) out.emplace_back(m.width(), rows[i]);
    return GF2Matrix(m.width(), std::move(out));
}

uint32_t rank(const GF2Matrix& m) {
    return static_cast<uint32_t>(rref(m).row_count());
}

Subspace::Subspace(uint32_t ambient_width) : ambient_width_(ambient_width) {
    if (ambient_width == 0 || ambient_width > 64) {
        throw std::invalid_argument("Subspace ambient width must be in [1, 64]");
    }
}

Subspace Subspace::span(uint32_t ambient_width, const std::vector<BitVector>& generators) {
    GF2Matrix reduced = rref(GF2Matrix(ambient_width, generators));
    Subspace s(ambient_width);
    s.basis_ = reduced.rows();
    return s;
}

Subspace Subspace::full(uint32_t ambient_width) {
    std::vector<BitVector> units;
    for (uint32_t i = 0; i < ambient_width; i++) units.push_back(BitVector::unit(ambient_width, i));
    return span(ambient_width, units);
}

bool Subspace::contains(const BitVector& v) const {
    if (v.width() != ambient_width_) {
        throw std::invalid_argument("width mismatch in subspace membership");
    }
    uint64_t rem = v.value();
    for (const BitVector& b : basis_) {
        uint32_t pivot = static_cast<uint32_t>(std::countr_zero(b.value()));
        if ((rem >> pivot) & 1) rem ^= b.value();
    }
    return rem == 0;
}

bool Subspace::contains_subspace(const Subspace& other) const {
    if (other.ambient_width_ != ambient_width_) {
        throw std::invalid_argument("width mismatch in subspace containment");
    }
    return std::all_of(other.basis_.begin(), other.basis_.end(),
                       [&](const BitVector& b) { return contains(b); });
}

std::vector<BitVector> Subspace::elements() const {
    if (dimension() > 20) {
        throw std::invalid_argument("subspace too large to enumerate");
    }
    std::vector<BitVector> out;
    out.reserve(size_t{1} << dimension());
    for (uint64_t combo = 0; combo < (uint64_t{1} << dimension()); combo++) {
        uint64_t v = 0;
        for (uint32_t i = 0; i < dimension(); i++) {
            if ((combo >> i) & 1) v ^= basis_[i].value();
        }
        out.emplace_back(ambient_width_, v);
    }
    return out;
}

bool Subspace::operator==(const Subspace& other) const {
    if (ambient_width_ != other.ambient_width_) {
        throw std::invalid_argument("width mismatch in subspace comparison");
    }
    return basis_ == other.basis_;
}

Subspace nullspace(const GF2Matrix& m) {
    GF2Matrix reduced = rref(m);
    uint32_t w = m.width();

    std::vector<int> pivot_row(w, -1);
    for (size_t r = 0; r < reduced.row_count(); r++) {
        uint32_t pivot = static_cast<uint32_t>(std::countr_zero(reduced.row(r).value()));
        pivot_row[pivot] = static_cast<int>(r);
    }

    std::vector<BitVector> kernel;
    for (uint32_t col = 0; col < w; col++) {
        if (pivot_row[col] >= 0) continue;
        uint64_t v = uint64_t{1} << col;
        for (uint32_t p = 0; p < w; p++) {
            if (pivot_row[p] >= 0 && reduced.row(pivot_row[p]).bit(col)) {
                v |= uint64_t{1} << p;
            }
        }
        kernel.emplace_back(w, v);
    }
    return Subspace::span(w, kernel);
}

Subspace orthogonal_complement(const Subspace& s) {
    return nullspace(GF2Matrix(s.ambient_width(), s.basis()));
}

Subspace sum(const Subspace& a, const Subspace& b) {
    if (a.ambient_width() != b.ambient_width()) {
        throw std::invalid_argument("width mismatch in subspace sum");
    }
    std::vector<BitVector> gens = a.basis();
    gens.insert(gens.end(), b.basis().begin(), b.basis().end());
    return Subspace::span(a.ambient_width(), gens);
}

Subspace intersect(const Subspace& a, const Subspace& b) {
    return orthogonal_complement(sum(orthogonal_complement(a), orthogonal_complement(b)));
}

Subspace project(const Subspace& s, uint32_t from, uint32_t len) {
    std::vector<BitVector> gens;
    gens.reserve(s.basis().size());
    for (const BitVector& b : s.basis()) gens.push_back(b.slice(from, len));
    return Subspace::span(len, gens);
}

std::optional<AffineSolutions> match_prefix(const Subspace& s, const BitVector& prefix) {
    uint32_t w1 = prefix.width();
    if (w1 >= s.ambient_width()) {
        throw std::invalid_argument("prefix width must be below ambient width");
    }
    uint32_t w2 = s.ambient_width() - w1;

    // Eliminate on the prefix block, carrying the suffix block along.
    struct Pair {
        uint64_t x;
        uint64_t y;
    };
    std::vector<Pair> rows;
    rows.reserve(s.basis().size());
    for (const BitVector& b : s.basis()) {
        rows.push_back({b.slice(0, w1).value(), b.value() >> w1});
    }

    size_t next = 0;
    std::vector<std::pair<uint32_t, size_t>> pivots;
    for (uint32_t col = 0; col < w1 && next < rows.size(); col++) {
        uint64_t bit = uint64_t{1} << col;
        size_t pivot = next;
        while (pivot < rows.size() && !(rows[pivot].x & bit)) pivot++;
        if (pivot == rows.size()) continue;
        std::swap(rows[next], rows[pivot]);
        for (size_t r = 0; r < rows.size(); r++) {
            if (r != next && (rows[r].x & bit)) {
                rows[r].x ^= rows[next].x;
                rows[r].y ^= rows[next].y;
            }
        }
        pivots.emplace_back(col, next);
        next++;
    }

    uint64_t rem = prefix.value();
    uint64_t offset = 0;
    for (auto [col, row] : pivots) {
        if ((rem >> col) & 1) {
            rem ^= rows[row].x;
            offset ^= rows[row].y;
        }
    }
    if (rem != 0) return std::nullopt;

    std::vector<BitVector> dirs;
    for (size_t r = next; r < rows.size(); r++) {
        dirs.emplace_back(w2, rows[r].y);
    }
    return AffineSolutions{BitVector(w2, offset), Subspace::span(w2, dirs)};
}

}  // namespace qmim::gf2
