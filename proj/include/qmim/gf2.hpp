#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmim::gf2 {

/// Fixed-width vector over GF(2), at most 64 coordinates.
///
/// Coordinate 0 is the first coordinate and maps to bit 0 of the packed
/// value (little-endian). The text form lists coordinates in order, so
/// "0110" has coordinate 0 equal to 0 and coordinates 1,2 equal to 1.
/// The equivalent hex form carries an explicit width prefix: "4:x6".
class BitVector {
  public:
    BitVector(uint32_t width, uint64_t value);

    static BitVector zeros(uint32_t width) { return BitVector(width, 0); }
    static BitVector unit(uint32_t width, uint32_t coord);
    static BitVector parse(std::string_view text);

    uint32_t width() const { return width_; }
    uint64_t value() const { return value_; }
    bool bit(uint32_t i) const;
    bool is_zero() const { return value_ == 0; }

    BitVector operator^(const BitVector& other) const;
    /// GF(2) inner product; widths must match.
    bool dot(const BitVector& other) const;

    /// (this || tail): this occupies the first width() coordinates.
    BitVector concat(const BitVector& tail) const;
    /// Coordinates [from, from+len).
    BitVector slice(uint32_t from, uint32_t len) const;

    bool operator==(const BitVector& other) const = default;

    std::string str() const;
    std::string str_hex() const;

  private:
    uint32_t width_;
    uint64_t value_;
};

/// Rows of equal width. A matrix may have zero rows but always has a
/// declared width.
class GF2Matrix {
  public:
    explicit GF2Matrix(uint32_t width);
    GF2Matrix(uint32_t width, std::vector<BitVector> rows);

    uint32_t width() const { return width_; }
    size_t row_count() const { return rows_.size(); }
    const BitVector& row(size_t i) const { return rows_[i]; }
    const std::vector<BitVector>& rows() const { return rows_; }

  private:
    uint32_t width_;
    std::vector<BitVector> rows_;
};

/// Reduced row-echelon form with zero rows dropped; rows end up sorted by
/// ascending pivot coordinate. Row space is preserved.
GF2Matrix rref(const GF2Matrix& m);

uint32_t rank(const GF2Matrix& m);

/// A linear subspace of {0,1}^ambient_width in canonical form: the basis is
/// the RREF of any generating set, so equal subspaces compare equal
/// componentwise. The zero subspace has an empty basis.
class Subspace {
  public:
    explicit Subspace(uint32_t ambient_width);

    static Subspace span(uint32_t ambient_width, const std::vector<BitVector>& generators);
    static Subspace full(uint32_t ambient_width);

    uint32_t ambient_width() const { return ambient_width_; }
    uint32_t dimension() const { return static_cast<uint32_t>(basis_.size()); }
    const std::vector<BitVector>& basis() const { return basis_; }

    bool contains(const BitVector& v) const;
    /// Subset test: every element of other lies in this subspace.
    bool contains_subspace(const Subspace& other) const;
    bool is_full() const { return dimension() == ambient_width_; }

    /// All 2^dimension elements; refuses above 2^20.
    std::vector<BitVector> elements() const;

    /// Canonical-basis comparison. Ambient widths must match.
    bool operator==(const Subspace& other) const;

  private:
    uint32_t ambient_width_;
    std::vector<BitVector> basis_;
};

/// {x : m·x = 0}, dimension = width − rank.
Subspace nullspace(const GF2Matrix& m);

/// {y : y·v = 0 for all v in s}.
Subspace orthogonal_complement(const Subspace& s);

Subspace sum(const Subspace& a, const Subspace& b);
Subspace intersect(const Subspace& a, const Subspace& b);

/// Image of s under the coordinate slice [from, from+len).
Subspace project(const Subspace& s, uint32_t from, uint32_t len);

/// Solutions y of (prefix || y) in s, as offset + directions.
struct AffineSolutions {
    BitVector offset;
    Subspace directions;
};

/// Empty optional when no element of s starts with the given prefix.
std::optional<AffineSolutions> match_prefix(const Subspace& s, const BitVector& prefix);

}  // namespace qmim::gf2
