#pragma once

#include <cstdint>

#include "qmim/gf2.hpp"
#include "qmim/oracle.hpp"
#include "qmim/qsim.hpp"

namespace qmim::truth {

/// Exact probabilities are counts over power-of-two domains.
using Rational = qsim::Fraction;

/// Everything the exhaustive scans can say about one function. epsilon is
/// the worst collision probability over shifts outside the period space;
/// delta is the worst pair probability outside the structure space. A
/// vacuous flag marks an empty maximization domain, where the value is 0 by
/// convention.
struct GroundTruth {
    gf2::Subspace period_space;
    gf2::Subspace structure_space;
    Rational epsilon;
    Rational delta;
    bool epsilon_vacuous = false;
    bool delta_vacuous = false;
};

/// {a : F(x xor a) = F(x) for all x}.
gf2::Subspace brute_period_space(const oracle::OracleFunction& f);

/// {(a, b) : F(x xor a) xor F(x) = b for all x}, width n+m.
gf2::Subspace brute_structure_space(const oracle::OracleFunction& f);

Rational compute_epsilon(const oracle::OracleFunction& f);
Rational compute_delta(const oracle::OracleFunction& f);

GroundTruth analyze(const oracle::OracleFunction& f);

/// {(dx, dy) : F(k, x xor dx) xor F(k, x) = dy for all k, x}, width 2n.
gf2::Subspace brute_pr1_diffs(const oracle::KeyedOracle& f);

/// True iff no (key, plaintext) pair realizes the differential.
bool brute_impossible(const oracle::KeyedOracle& f, const gf2::BitVector& delta_in,
                      const gf2::BitVector& delta_out);

/// Verifies g(x) = 2^-n sum_{y.a=0} (-1)^{x.y} equals 1/2 at x in {0, a}
/// and 0 elsewhere. a must be nonzero.
bool g_function_check(uint32_t n, const gf2::BitVector& a);

}  // namespace qmim::truth
