#include "qmim/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace qmim::qsim {

namespace {

// Memory ceilings for the enumerating code paths, in input bits.
constexpr uint32_t kMaxPreimageBits = 24;
constexpr uint32_t kMaxWalshTableBits = 25;
constexpr uint32_t kMaxExactBits = 12;
constexpr uint32_t kMaxBiasBits = 24;

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double uniform_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void hadamard_first_register(std::vector<double>& psi, uint32_t n) {
    const double inv = 1.0 / std::sqrt(2.0);
    const size_t size = psi.size();
    for (uint32_t q = 0; q < n; ++q) {
        const size_t bit = size_t{1} << q;
        for (size_t i = 0; i < size; ++i) {
            if (i & bit) continue;
            const double a = psi[i];
            const double b = psi[i | bit];
            psi[i] = (a + b) * inv;
            psi[i | bit] = (a - b) * inv;
        }
    }
}

std::shared_ptr<const oracle::WalshTable> build_walsh_table(const oracle::XorSplit& split) {
    const uint32_t n1 = split.left_width;
    const uint32_t n2 = split.right_width;
    if (n1 + n2 > kMaxWalshTableBits)
        throw oracle::CapacityError("walsh table over " + std::to_string(n1 + n2) +
                                    " bits exceeds the " +
                                    std::to_string(kMaxWalshTableBits) + "-bit ceiling");
    const size_t size1 = size_t{1} << n1;
    const size_t size2 = size_t{1} << n2;

    std::vector<uint64_t> inner(size1);
    for (size_t x = 0; x < size1; ++x) inner[x] = split.inner_raw(x);

    auto table = std::make_shared<oracle::WalshTable>();
    table->left_width = n1;
    table->right_width = n2;
    table->cumulative.resize(size1 * size2);

    std::vector<int64_t> signs(size1);
    for (size_t u2 = 0; u2 < size2; ++u2) {
        for (size_t x = 0; x < size1; ++x)
            signs[x] = (std::popcount(inner[x] & u2) & 1) ? -1 : 1;
        walsh_hadamard(signs);
        for (size_t u1 = 0; u1 < size1; ++u1) {
            const uint64_t coeff = static_cast<uint64_t>(signs[u1] * signs[u1]);
            table->cumulative[u1 | (u2 << n1)] = coeff;
        }
    }
    uint64_t acc = 0;
    for (uint64_t& v : table->cumulative) {
        acc += v;
        v = acc;
    }
    table->total = acc;
    return table;
}

Fraction make_reduced(__int128 num, __int128 den) {
    if (den == 0) throw std::invalid_argument("fraction with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a != 0) {
        num /= a;
        den /= a;
    }
    constexpr __int128 lo = std::numeric_limits<int64_t>::min();
    constexpr __int128 hi = std::numeric_limits<int64_t>::max();
    if (num < lo || num > hi || den > hi)
        throw std::overflow_error("fraction arithmetic exceeded 64 bits");
    return Fraction(static_cast<int64_t>(num), static_cast<int64_t>(den));
}

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::statevector: return "statevector";
        case Backend::preimage: return "preimage";
    }
    throw std::invalid_argument("unknown backend");
}

Backend parse_backend(std::string_view name) {
    if (name == "statevector") return Backend::statevector;
    if (name == "preimage") return Backend::preimage;
    throw std::invalid_argument("unknown backend '" + std::string(name) +
                                "', expected statevector or preimage");
}

Fraction::Fraction(int64_t n, int64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("fraction with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Fraction Fraction::operator+(const Fraction& o) const {
    return make_reduced(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den,
                        static_cast<__int128>(den) * o.den);
}

Fraction Fraction::operator-(const Fraction& o) const {
    return make_reduced(static_cast<__int128>(num) * o.den - static_cast<__int128>(o.num) * den,
                        static_cast<__int128>(den) * o.den);
}

Fraction Fraction::operator*(const Fraction& o) const {
    return make_reduced(static_cast<__int128>(num) * o.num,
                        static_cast<__int128>(den) * o.den);
}

void walsh_hadamard(std::span<int64_t> data) {
    const size_t size = data.size();
    if (size == 0 || (size & (size - 1)) != 0)
        throw std::invalid_argument("walsh_hadamard needs a power-of-two length");
    for (size_t half = 1; half < size; half <<= 1) {
        for (size_t block = 0; block < size; block += half << 1) {
            for (size_t i = block; i < block + half; ++i) {
                const int64_t a = data[i];
                const int64_t b = data[i + half];
                data[i] = a + b;
                data[i + half] = a - b;
            }
        }
    }
}

uint64_t uniform_below(std::mt19937_64& rng, uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below with zero bound");
    if ((bound & (bound - 1)) == 0) return rng() & (bound - 1);
    const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                           std::numeric_limits<uint64_t>::max() % bound;
    uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

uint64_t derive_seed(uint64_t seed, uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

SimonSampler::SimonSampler(oracle::OracleFunction f, SamplerConfig cfg)
    : f_(std::move(f)), cfg_(cfg), rng_(cfg.seed) {}

SimonSample SimonSampler::next() {
    if (cfg_.backend == Backend::statevector) return next_statevector();
    if (const oracle::XorSplit* split = f_.xor_split()) return next_preimage_xor(*split);
    return next_preimage_generic();
}

SimonSample SimonSampler::next_statevector() {
    const uint32_t n = f_.input_width();
    const uint32_t m = f_.output_width();
    if (n + m > cfg_.max_statevector_qubits)
        throw oracle::CapacityError(
            "statevector backend needs " + std::to_string(n + m) + " qubits, limit is " +
            std::to_string(cfg_.max_statevector_qubits) + "; use the preimage backend");
    const size_t domain = size_t{1} << n;
    const size_t range = size_t{1} << m;
    const auto index = [n](size_t x, size_t y) { return x | (y << n); };

    psi_.assign(domain * range, 0.0);
    psi_[0] = 1.0;
    hadamard_first_register(psi_, n);

    // Oracle unitary |x, y> -> |x, y xor F(x)>; an involution on the y part.
    for (size_t x = 0; x < domain; ++x) {
        const uint64_t fx = f_.raw(x);
        if (fx == 0) continue;
        for (size_t y = 0; y < range; ++y) {
            const size_t other = y ^ fx;
            if (y < other) std::swap(psi_[index(x, y)], psi_[index(x, other)]);
        }
    }
    f_.record_queries(1);

    // Measure the output register.
    double r = uniform_real(rng_);
    size_t w = 0;
    double prob_w = 0.0;
    for (size_t y = 0; y < range; ++y) {
        double p = 0.0;
        for (size_t x = 0; x < domain; ++x) p += psi_[index(x, y)] * psi_[index(x, y)];
        if (p <= 0.0) continue;
        w = y;
        prob_w = p;
        if (r < p) break;
        r -= p;
    }

    // Collapse, renormalize, and transform the input register back.
    const double scale = 1.0 / std::sqrt(prob_w);
    for (size_t y = 0; y < range; ++y) {
        for (size_t x = 0; x < domain; ++x)
            psi_[index(x, y)] = (y == w) ? psi_[index(x, y)] * scale : 0.0;
    }
    hadamard_first_register(psi_, n);

    // Measure the input register.
    r = uniform_real(rng_);
    size_t u = 0;
    for (size_t x = 0; x < domain; ++x) {
        const double p = psi_[index(x, w)] * psi_[index(x, w)];
        if (p <= 0.0) continue;
        u = x;
        if (r < p) break;
        r -= p;
    }
    return SimonSample{gf2::BitVector(n, u), gf2::BitVector(m, w), Backend::statevector};
}

SimonSample SimonSampler::next_preimage_generic() {
    const uint32_t n = f_.input_width();
    if (n > kMaxPreimageBits)
        throw oracle::CapacityError("preimage backend enumerates 2^" + std::to_string(n) +
                                    " inputs, limit is 2^" + std::to_string(kMaxPreimageBits));
    const size_t domain = size_t{1} << n;

    const uint64_t z = uniform_below(rng_, domain);
    const uint64_t w = f_.raw(z);
    f_.record_queries(1);

    scratch_.assign(domain, 0);
    for (size_t x = 0; x < domain; ++x) scratch_[x] = f_.raw(x) == w ? 1 : 0;
    walsh_hadamard(scratch_);

    const uint64_t preimage_size = static_cast<uint64_t>(scratch_[0]);
    const uint64_t total = (uint64_t{1} << n) * preimage_size;
    uint64_t target = uniform_below(rng_, total);
    size_t u = 0;
    for (size_t i = 0; i < domain; ++i) {
        const uint64_t mass = static_cast<uint64_t>(scratch_[i] * scratch_[i]);
        if (mass == 0) continue;
        u = i;
        if (target < mass) break;
        target -= mass;
    }
    return SimonSample{gf2::BitVector(n, u), gf2::BitVector(f_.output_width(), w),
                       Backend::preimage};
}

SimonSample SimonSampler::next_preimage_xor(const oracle::XorSplit& split) {
    if (!walsh_) {
        const std::shared_ptr<oracle::WalshSlot> slot = split.slot;
        std::lock_guard<std::mutex> lock(slot->mu);
        if (!slot->table) slot->table = build_walsh_table(split);
        walsh_ = slot->table;
    }
    const uint32_t n1 = split.left_width;
    const uint32_t n2 = split.right_width;

    const uint64_t z1 = uniform_below(rng_, uint64_t{1} << n1);
    const uint64_t z2 = uniform_below(rng_, uint64_t{1} << n2);
    const uint64_t w = split.inner_raw(z1) ^ z2;
    f_.record_queries(1);

    const uint64_t target = uniform_below(rng_, walsh_->total);
    const auto it = std::upper_bound(walsh_->cumulative.begin(), walsh_->cumulative.end(), target);
    const uint64_t u = static_cast<uint64_t>(it - walsh_->cumulative.begin());
    return SimonSample{gf2::BitVector(n1 + n2, u), gf2::BitVector(f_.output_width(), w),
                       Backend::preimage};
}

SimonSample simon_sample(const oracle::OracleFunction& f, const SamplerConfig& cfg) {
    SimonSampler sampler(f, cfg);
    return sampler.next();
}

gf2::GF2Matrix simon_collect(const oracle::OracleFunction& f, size_t count,
                             const SamplerConfig& cfg) {
    if (count == 0) throw std::invalid_argument("simon_collect needs at least one sample");
    SimonSampler sampler(f, cfg);
    std::vector<gf2::BitVector> rows;
    rows.reserve(count);
    for (size_t i = 0; i < count; ++i) rows.push_back(sampler.next().outcome);
    return gf2::GF2Matrix(f.input_width(), std::move(rows));
}

double measurement_bias(const oracle::OracleFunction& f, const gf2::BitVector& a) {
    const uint32_t n = f.input_width();
    if (a.width() != n) throw std::invalid_argument("shift width does not match the oracle");
    if (n > kMaxBiasBits)
        throw oracle::CapacityError("measurement_bias enumerates 2^" + std::to_string(n) +
                                    " inputs, limit is 2^" + std::to_string(kMaxBiasBits));
    const size_t domain = size_t{1} << n;
    size_t collisions = 0;
    for (size_t x = 0; x < domain; ++x)
        if (f.raw(x) == f.raw(x ^ a.value())) ++collisions;
    return 0.5 * (1.0 + static_cast<double>(collisions) / static_cast<double>(domain));
}

std::vector<Fraction> exact_outcome_distribution(const oracle::OracleFunction& f,
                                                 Backend backend) {
    const uint32_t n = f.input_width();
    if (n > kMaxExactBits)
        throw oracle::CapacityError("exact distribution enumerates 2^" + std::to_string(2 * n) +
                                    " terms, input limit is 2^" + std::to_string(kMaxExactBits));
    const size_t domain = size_t{1} << n;
    const int64_t dom = static_cast<int64_t>(domain);

    std::vector<uint64_t> values(domain);
    for (size_t x = 0; x < domain; ++x) values[x] = f.raw(x);

    // Squared Walsh spectrum of each fiber indicator, keyed by output value.
    std::unordered_map<uint64_t, std::vector<int64_t>> spectra;
    std::unordered_map<uint64_t, int64_t> fiber_size;
    for (size_t z = 0; z < domain; ++z) {
        const uint64_t w = values[z];
        if (spectra.contains(w)) continue;
        std::vector<int64_t> indicator(domain, 0);
        int64_t size = 0;
        for (size_t x = 0; x < domain; ++x) {
            if (values[x] == w) {
                indicator[x] = 1;
                ++size;
            }
        }
        walsh_hadamard(indicator);
        spectra.emplace(w, std::move(indicator));
        fiber_size.emplace(w, size);
    }

    std::vector<Fraction> dist(domain, Fraction(0, 1));
    if (backend == Backend::statevector) {
        // Branch on the measured output value: weight |fiber|/2^n, then the
        // conditional mass coeff^2 / (2^n |fiber|).
        for (const auto& [w, spectrum] : spectra) {
            const int64_t size = fiber_size.at(w);
            const Fraction branch(size, dom);
            for (size_t u = 0; u < domain; ++u) {
                const int64_t coeff = spectrum[u];
                if (coeff == 0) continue;
                dist[u] = dist[u] + branch * Fraction(coeff * coeff, dom * size);
            }
        }
    } else {
        // Branch on the uniformly drawn z: weight 1/2^n each.
        for (size_t z = 0; z < domain; ++z) {
            const uint64_t w = values[z];
            const std::vector<int64_t>& spectrum = spectra.at(w);
            const int64_t size = fiber_size.at(w);
            for (size_t u = 0; u < domain; ++u) {
                const int64_t coeff = spectrum[u];
                if (coeff == 0) continue;
                dist[u] = dist[u] + Fraction(1, dom) * Fraction(coeff * coeff, dom * size);
            }
        }
    }
    return dist;
}

std::vector<Fraction> exact_xor_split_distribution(const oracle::OracleFunction& f) {
    const oracle::XorSplit* split = f.xor_split();
    if (split == nullptr)
        throw std::invalid_argument("oracle does not carry an xor split");
    if (split->left_width + split->right_width > kMaxExactBits)
        throw oracle::CapacityError("exact distribution limit is 2^" +
                                    std::to_string(kMaxExactBits) + " inputs");
    const std::shared_ptr<const oracle::WalshTable> table = build_walsh_table(*split);
    const int64_t total = static_cast<int64_t>(table->total);
    std::vector<Fraction> dist(table->cumulative.size(), Fraction(0, 1));
    uint64_t prev = 0;
    for (size_t u = 0; u < table->cumulative.size(); ++u) {
        const uint64_t mass = table->cumulative[u] - prev;
        prev = table->cumulative[u];
        dist[u] = Fraction(static_cast<int64_t>(mass), total);
    }
    return dist;
}

Fraction total_variation(const std::vector<Fraction>& p, const std::vector<Fraction>& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("distributions have different supports");
    Fraction sum(0, 1);
    for (size_t i = 0; i < p.size(); ++i) {
        Fraction d = p[i] - q[i];
        if (d.num < 0) d.num = -d.num;
        sum = sum + d;
    }
    return sum * Fraction(1, 2);
}

}  // namespace qmim::qsim
