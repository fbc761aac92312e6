#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "qmim/gf2.hpp"
#include "qmim/oracle.hpp"

namespace qmim::qsim {

enum class Backend { statevector, preimage };

const char* backend_name(Backend b);
Backend parse_backend(std::string_view name);

struct SamplerConfig {
    Backend backend = Backend::preimage;
    uint64_t seed = 0;
    uint32_t max_statevector_qubits = 22;
};

/// One run of Simon's circuit: the measured first-register outcome u and the
/// value the second register collapsed to.
struct SimonSample {
    gf2::BitVector outcome;
    gf2::BitVector collapsed_value;
    Backend backend;
};

/// Draws samples with the exact quantum outcome distribution.
///
/// statevector: simulates the full register of input+output qubits through
/// Hadamard, the oracle unitary, and both measurements.
///
/// preimage: draws z uniformly, enumerates the coset P = F^-1(F(z)) and
/// samples u from the squared Walsh mass of the coset indicator. Oracles
/// built by build_w take a cached table route with the identical
/// distribution, since for them the conditional law of u does not depend on
/// the collapsed value.
///
/// Either backend consumes exactly one (superposition) oracle query per
/// sample. All randomness comes from the seeded generator, so a fixed seed
/// reproduces the sample stream exactly.
class SimonSampler {
  public:
    SimonSampler(oracle::OracleFunction f, SamplerConfig cfg);

    SimonSample next();

  private:
    SimonSample next_statevector();
    SimonSample next_preimage_generic();
    SimonSample next_preimage_xor(const oracle::XorSplit& split);

    oracle::OracleFunction f_;
    SamplerConfig cfg_;
    std::mt19937_64 rng_;
    std::shared_ptr<const oracle::WalshTable> walsh_;
    std::vector<int64_t> scratch_;
    std::vector<double> psi_;
};

SimonSample simon_sample(const oracle::OracleFunction& f, const SamplerConfig& cfg);

/// `count` >= 1 samples as matrix rows; consumes exactly `count` queries.
gf2::GF2Matrix simon_collect(const oracle::OracleFunction& f, size_t count,
                             const SamplerConfig& cfg);

/// Exact single-sample probability that the outcome u satisfies u.a = 0,
/// which equals (1 + Pr_x[F(x) = F(x xor a)]) / 2. Enumerates the domain.
double measurement_bias(const oracle::OracleFunction& f, const gf2::BitVector& a);

/// Exact rational, reduced; wide enough for the toy-scale distributions.
struct Fraction {
    int64_t num = 0;
    int64_t den = 1;

    Fraction() = default;
    Fraction(int64_t n, int64_t d);
    Fraction operator+(const Fraction& o) const;
    Fraction operator-(const Fraction& o) const;
    Fraction operator*(const Fraction& o) const;
    bool operator==(const Fraction& o) const = default;
    bool is_zero() const { return num == 0; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Exact outcome distribution of one Simon run over all 2^n values of u,
/// computed through the named backend's own pipeline in rational arithmetic.
std::vector<Fraction> exact_outcome_distribution(const oracle::OracleFunction& f,
                                                 Backend backend);

/// Distribution taken by the cached table route; f must come from build_w.
std::vector<Fraction> exact_xor_split_distribution(const oracle::OracleFunction& f);

Fraction total_variation(const std::vector<Fraction>& p, const std::vector<Fraction>& q);

/// In-place Walsh-Hadamard transform; data length must be a power of two.
void walsh_hadamard(std::span<int64_t> data);

/// Unbiased draw from [0, bound).
uint64_t uniform_below(std::mt19937_64& rng, uint64_t bound);

/// Stream-splitting helper for per-trial and per-worker generators.
uint64_t derive_seed(uint64_t seed, uint64_t index);

}  // namespace qmim::qsim
