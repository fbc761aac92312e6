#include "qmim/finder.hpp"

#include <cmath>
#include <stdexcept>

namespace qmim::finder {

uint32_t default_repetitions(double p0, uint32_t margin) {
    if (!(p0 >= 0.0 && p0 < 1.0))
        throw std::invalid_argument("collision ceiling must lie in [0, 1)");
    const double base = std::ceil(std::log(2.0) / std::log(2.0 / (1.0 + p0)));
    return static_cast<uint32_t>(base) + margin;
}

StructureResult find_periods(const oracle::OracleFunction& f, uint32_t c,
                             const qsim::SamplerConfig& cfg) {
    if (c == 0) throw std::invalid_argument("repetition constant must be at least 1");
    const size_t samples = size_t{c} * f.input_width();
    const gf2::GF2Matrix system = qsim::simon_collect(f, samples, cfg);
    StructureResult result{gf2::nullspace(system), samples, c, false};
    result.degenerate = result.space.is_full();
    return result;
}

StructureResult find_structures(const oracle::OracleFunction& f, uint32_t c,
                                const qsim::SamplerConfig& cfg) {
    return find_periods(oracle::build_w(f), c, cfg);
}

}  // namespace qmim::finder
