#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qmim/gf2.hpp"

namespace qmim::oracle {

/// Thrown when an operation would require enumerating or storing more state
/// than the configured ceiling allows. Callers may catch it and retry with a
/// different backend or a smaller instance.
class CapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using QueryCounter = std::shared_ptr<std::atomic<uint64_t>>;

/// Lazily built sampling table for oracles of the shape (x, y) -> G(x) xor y.
/// Owned by the inner oracle so it survives rebuilding the wrapper.
struct WalshTable {
    uint32_t left_width;
    uint32_t right_width;
    std::vector<uint64_t> cumulative;  // running sums of squared coefficients
    uint64_t total;
};

struct WalshSlot {
    std::mutex mu;
    std::shared_ptr<const WalshTable> table;
};

/// Metadata attached by build_w: the oracle is (x, y) -> inner(x) xor y with
/// x the first left_width input coordinates.
struct XorSplit {
    uint32_t left_width;
    uint32_t right_width;
    std::function<uint64_t(uint64_t)> inner_raw;
    std::shared_ptr<WalshSlot> slot;
};

/// A multi-output Boolean function {0,1}^n -> {0,1}^m with a query counter.
///
/// Evaluation is pure. The counter is the only mutable state and is shared
/// by copies of the handle; derived oracles (see build_w, flattened) forward
/// their queries to the oracles they were built from, so counts roll up.
/// A superposition query inside the simulator counts as one query.
class OracleFunction {
  public:
    using RawFn = std::function<uint64_t(uint64_t)>;

    OracleFunction(uint32_t input_width, uint32_t output_width, RawFn eval,
                   std::vector<QueryCounter> linked = {});

    uint32_t input_width() const;
    uint32_t output_width() const;

    /// Evaluate and count one query.
    gf2::BitVector query(const gf2::BitVector& x) const;
    /// Evaluate without counting; simulator internals only.
    gf2::BitVector eval_uncounted(const gf2::BitVector& x) const;
    uint64_t raw(uint64_t x) const;

    void record_queries(uint64_t count = 1) const;
    uint64_t query_count() const;

    const XorSplit* xor_split() const;
    std::shared_ptr<WalshSlot> walsh_slot() const;
    QueryCounter counter() const;
    std::vector<QueryCounter> counter_chain() const;

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
    friend OracleFunction build_w(const OracleFunction& f);
};

/// Oracle backed by an explicit value table; table must have exactly 2^n
/// entries of width m.
OracleFunction from_truth_table(uint32_t input_width, uint32_t output_width,
                                const std::vector<gf2::BitVector>& table);

/// Text format: header line "n m", then 2^n lines with the m-bit output of
/// each input in ascending order.
OracleFunction read_truth_table(std::istream& in);
void write_truth_table(std::ostream& out, const OracleFunction& f);

/// W(x || y) = F(x) xor y over n+m input bits. One W query costs one F query.
OracleFunction build_w(const OracleFunction& f);

/// A keyed function family F(k, x); a permutation of the block per key when
/// invertible. Key width zero is allowed and degenerates to an unkeyed map.
class KeyedOracle {
  public:
    using RawKeyedFn = std::function<uint64_t(uint64_t key, uint64_t x)>;

    KeyedOracle(uint32_t key_width, uint32_t block_width, RawKeyedFn eval,
                RawKeyedFn inverse = nullptr, std::vector<QueryCounter> linked = {});

    uint32_t key_width() const;
    uint32_t block_width() const;
    bool invertible() const;

    gf2::BitVector query(const gf2::BitVector& key, const gf2::BitVector& x) const;
    uint64_t raw(uint64_t key, uint64_t x) const;
    uint64_t raw_inverse(uint64_t key, uint64_t y) const;
    void record_queries(uint64_t count = 1) const;

    /// (k || x) -> F(k, x) with the key in the first key_width() coordinates.
    /// The same underlying instance is returned every time, so caches attached
    /// to it persist across repeated runs.
    const OracleFunction& flattened() const;

    uint64_t query_count() const;
    QueryCounter counter() const;
    std::vector<QueryCounter> counter_chain() const;

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// Per-key inverse family. Queries to the result also count against the
/// original oracle. Throws std::logic_error when not invertible.
KeyedOracle invert(const KeyedOracle& f);

/// 2^m output tables, one per key, each of 2^n entries; invertibility is
/// detected by checking every per-key table for bijectivity.
KeyedOracle keyed_from_truth_tables(uint32_t key_width, uint32_t block_width,
                                    const std::vector<std::vector<gf2::BitVector>>& tables);

/// A keyed permutation with explicit round structure. Subkeys are contiguous
/// slices of the master key, one per round, all of subkey_width() bits, so
/// any round range carries exactly its own key material.
class RoundCipher {
  public:
    virtual ~RoundCipher() = default;

    virtual uint32_t block_width() const = 0;
    virtual uint32_t rounds() const = 0;
    virtual uint32_t subkey_width() const = 0;
    virtual uint64_t round_apply(uint32_t round, uint64_t subkey, uint64_t x) const = 0;
    virtual uint64_t round_invert(uint32_t round, uint64_t subkey, uint64_t y) const = 0;

    /// Rounds [from, to], 1-based inclusive; from == to+1 gives the identity
    /// map with an empty key. Queries roll up to this cipher's counter.
    KeyedOracle slice(uint32_t from, uint32_t to) const;
    KeyedOracle full() const { return slice(1, rounds()); }
    /// All rounds but the last.
    KeyedOracle reduced() const { return slice(1, rounds() - 1); }

    uint64_t query_count() const { return master_->load(); }
    QueryCounter master_counter() const { return master_; }

  protected:
    RoundCipher() : master_(std::make_shared<std::atomic<uint64_t>>(0)) {}

  private:
    QueryCounter master_;
    mutable std::mutex slice_mu_;
    mutable std::vector<std::pair<std::pair<uint32_t, uint32_t>, KeyedOracle>> slice_cache_;
};

}  // namespace qmim::oracle
