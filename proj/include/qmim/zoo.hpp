#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "qmim/gf2.hpp"
#include "qmim/oracle.hpp"

namespace qmim::zoo {

/// Balanced Feistel on 2t bits, round i: (L, R) -> (R, L xor f(R xor k_i)).
/// The round function f is a t-bit table and need not be bijective; the
/// cipher is a permutation regardless.
class ToyFeistel : public oracle::RoundCipher {
  public:
    ToyFeistel(uint32_t half_width, uint32_t rounds, std::vector<uint64_t> sbox);

    uint32_t half_width() const { return half_width_; }
    const std::vector<uint64_t>& sbox() const { return sbox_; }

    uint32_t block_width() const override { return 2 * half_width_; }
    uint32_t rounds() const override { return rounds_; }
    uint32_t subkey_width() const override { return half_width_; }
    uint64_t round_apply(uint32_t round, uint64_t subkey, uint64_t x) const override;
    uint64_t round_invert(uint32_t round, uint64_t subkey, uint64_t y) const override;

  private:
    uint32_t half_width_;
    uint32_t rounds_;
    std::vector<uint64_t> sbox_;
};

/// Substitution-permutation round on n bits: x -> permute(S(x xor k_i)).
/// The S-box must be a permutation of {0,1}^n; bit i of the S-box output
/// moves to position perm[i].
class ToySPN : public oracle::RoundCipher {
  public:
    ToySPN(uint32_t width, uint32_t rounds, std::vector<uint64_t> sbox,
           std::vector<uint32_t> perm);

    const std::vector<uint64_t>& sbox() const { return sbox_; }
    const std::vector<uint32_t>& perm() const { return perm_; }

    uint32_t block_width() const override { return width_; }
    uint32_t rounds() const override { return rounds_; }
    uint32_t subkey_width() const override { return width_; }
    uint64_t round_apply(uint32_t round, uint64_t subkey, uint64_t x) const override;
    uint64_t round_invert(uint32_t round, uint64_t subkey, uint64_t y) const override;

  private:
    uint32_t width_;
    uint32_t rounds_;
    std::vector<uint64_t> sbox_;
    std::vector<uint64_t> inverse_sbox_;
    std::vector<uint32_t> perm_;
    std::vector<uint32_t> inverse_perm_;
};

struct PlantedDifferential {
    gf2::BitVector delta_in;      // input difference of the head path
    gf2::BitVector delta_out;     // output-side difference of the inverse-tail path
    gf2::BitVector middle_head;   // where the head path lands after round 1
    gf2::BitVector middle_tail;   // where the inverse-tail path lands before round 2
    uint32_t split;
};

/// Three rounds on n bits with structured S-boxes: round 1 carries the
/// probability-1 path delta_in -> middle_head, the inverse of round 2
/// carries delta_out -> middle_tail, and middle_head != middle_tail, which
/// makes (delta_in, delta_out) impossible for the first two rounds. The
/// constructor verifies that exhaustively.
class PlantedCipher : public oracle::RoundCipher {
  public:
    PlantedCipher(uint32_t width, uint64_t seed);

    const PlantedDifferential& planted() const { return planted_; }

    uint32_t block_width() const override { return width_; }
    uint32_t rounds() const override { return 3; }
    uint32_t subkey_width() const override { return width_; }
    uint64_t round_apply(uint32_t round, uint64_t subkey, uint64_t x) const override;
    uint64_t round_invert(uint32_t round, uint64_t subkey, uint64_t y) const override;

  private:
    uint32_t width_;
    PlantedDifferential planted_;
    std::vector<uint64_t> sbox_head_;
    std::vector<uint64_t> sbox_head_inv_;
    std::vector<uint64_t> sbox_mid_;
    std::vector<uint64_t> sbox_mid_inv_;
    std::vector<uint64_t> sbox_last_;
    std::vector<uint64_t> sbox_last_inv_;
};

gf2::BitVector encrypt(const oracle::RoundCipher& cipher, const gf2::BitVector& key,
                       const gf2::BitVector& x);

/// Uniformly random permutation table of {0,1}^width.
std::vector<uint64_t> random_sbox(std::mt19937_64& rng, uint32_t width);

/// Random permutation S with S(x xor din) = S(x) xor dout for every x.
/// Both differences must be nonzero.
std::vector<uint64_t> make_structured_sbox(std::mt19937_64& rng, uint32_t width,
                                           uint64_t din, uint64_t dout);

/// Parsed cipher description. Fields are `name = value` pairs separated by
/// newlines or semicolons; '#' starts a comment. Required: family and
/// rounds, plus half_width (feistel) or width (spn, planted). Optional:
/// sbox (hex values), perm (positions), seed.
struct CipherDescription {
    std::string family;
    uint32_t half_width = 0;
    uint32_t width = 0;
    uint32_t rounds = 0;
    std::vector<uint64_t> sbox;
    std::vector<uint32_t> perm;
    uint64_t seed = 0;

    std::unique_ptr<oracle::RoundCipher> build() const;
};

CipherDescription parse_cipher_description(std::istream& in);
CipherDescription parse_cipher_description(std::string_view text);

}  // namespace qmim::zoo
