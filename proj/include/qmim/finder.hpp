#pragma once

#include <cstdint>

#include "qmim/gf2.hpp"
#include "qmim/oracle.hpp"
#include "qmim/qsim.hpp"

namespace qmim::finder {

/// Output of the sampling solvers. The recovered space always contains the
/// true hidden space; with the advertised probability it equals it. The
/// degenerate flag marks a full-space result, which a constant function
/// produces legitimately.
struct StructureResult {
    gf2::Subspace space;
    size_t samples_used = 0;
    uint32_t c = 0;
    bool degenerate = false;
};

/// Smallest repetition constant the failure bound supports for collision
/// probability ceiling p0, plus a safety margin for small widths.
/// p0 must lie in [0, 1).
uint32_t default_repetitions(double p0, uint32_t margin = 2);

/// Collects c*n samples on f and returns the solution space S of the
/// resulting linear system. The period space of f is always contained in S.
StructureResult find_periods(const oracle::OracleFunction& f, uint32_t c,
                             const qsim::SamplerConfig& cfg);

/// Runs the period search on W(x || y) = f(x) xor y with c*(n+m) samples;
/// the solution space spans the linear structure pairs (a, b) of f.
StructureResult find_structures(const oracle::OracleFunction& f, uint32_t c,
                                const qsim::SamplerConfig& cfg);

}  // namespace qmim::finder
