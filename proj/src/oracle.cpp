#include "qmim/oracle.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace qmim::oracle {

namespace {

uint64_t width_mask(uint32_t width) {
    return width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
}

void check_widths(uint32_t in, uint32_t out) {
    if (in == 0 || in > 64 || out == 0 || out > 64) {
        throw std::invalid_argument("oracle widths must be in [1, 64]");
    }
}

}  // namespace

struct OracleFunction::Impl {
    uint32_t n;
    uint32_t m;
    RawFn eval;
    QueryCounter own = std::make_shared<std::atomic<uint64_t>>(0);
    std::vector<QueryCounter> linked;
    std::shared_ptr<WalshSlot> w_slot = std::make_shared<WalshSlot>();
    std::optional<XorSplit> split;
};

OracleFunction::OracleFunction(uint32_t input_width, uint32_t output_width, RawFn eval,
                               std::vector<QueryCounter> linked)
    : impl_(std::make_shared<Impl>()) {
    check_widths(input_width, output_width);
    if (!eval) throw std::invalid_argument("oracle eval must be callable");
    impl_->n = input_width;
    impl_->m = output_width;
    impl_->eval = std::move(eval);
    impl_->linked = std::move(linked);
}

uint32_t OracleFunction::input_width() const { return impl_->n; }
uint32_t OracleFunction::output_width() const { return impl_->m; }

uint64_t OracleFunction::raw(uint64_t x) const {
    uint64_t y = impl_->eval(x & width_mask(impl_->n));
    return y & width_mask(impl_->m);
}

gf2::BitVector OracleFunction::query(const gf2::BitVector& x) const {
    record_queries(1);
    return eval_uncounted(x);
}

gf2::BitVector OracleFunction::eval_uncounted(const gf2::BitVector& x) const {
    if (x.width() != impl_->n) {
        throw std::invalid_argument("oracle input width mismatch");
    }
    return gf2::BitVector(impl_->m, raw(x.value()));
}

void OracleFunction::record_queries(uint64_t count) const {
    impl_->own->fetch_add(count, std::memory_order_relaxed);
    for (const QueryCounter& c : impl_->linked) {
        c->fetch_add(count, std::memory_order_relaxed);
    }
}

uint64_t OracleFunction::query_count() const { return impl_->own->load(); }

const XorSplit* OracleFunction::xor_split() const {
    return impl_->split ? &*impl_->split : nullptr;
}

std::shared_ptr<WalshSlot> OracleFunction::walsh_slot() const { return impl_->w_slot; }

QueryCounter OracleFunction::counter() const { return impl_->own; }

std::vector<QueryCounter> OracleFunction::counter_chain() const {
    std::vector<QueryCounter> chain{impl_->own};
    chain.insert(chain.end(), impl_->linked.begin(), impl_->linked.end());
    return chain;
}

OracleFunction from_truth_table(uint32_t input_width, uint32_t output_width,
                                const std::vector<gf2::BitVector>& table) {
    check_widths(input_width, output_width);
    if (input_width > 24) {
        throw CapacityError("truth table input width above 24 bits");
    }
    if (table.size() != (size_t{1} << input_width)) {
        throw std::invalid_argument("truth table must have exactly 2^n entries");
    }
    auto values = std::make_shared<std::vector<uint64_t>>();
    values->reserve(table.size());
    for (const gf2::BitVector& v : table) {
        if (v.width() != output_width) {
            throw std::invalid_argument("truth table entry width mismatch");
        }
        values->push_back(v.value());
    }
    return OracleFunction(input_width, output_width,
                          [values](uint64_t x) { return (*values)[x]; });
}

OracleFunction read_truth_table(std::istream& in) {
    std::string line;
    size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("truth table line " + std::to_string(line_no) + ": " + what);
    };

    line_no++;
    if (!std::getline(in, line)) fail("missing header");
    std::istringstream header(line);
    uint32_t n = 0, m = 0;
    if (!(header >> n >> m)) fail("expected \"n m\" header");
    if (n == 0 || n > 24 || m == 0 || m > 64) fail("widths out of range");

    std::vector<gf2::BitVector> table;
    table.reserve(size_t{1} << n);
    for (uint64_t i = 0; i < (uint64_t{1} << n); i++) {
        line_no++;
        if (!std::getline(in, line)) fail("truncated table");
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        gf2::BitVector v = [&] {
            try {
                return gf2::BitVector::parse(line);
            } catch (const std::invalid_argument& e) {
                fail(e.what());
                throw;  // unreachable
            }
        }();
        if (v.width() != m) fail("entry width does not match header");
        table.push_back(v);
    }
    return from_truth_table(n, m, table);
}

void write_truth_table(std::ostream& out, const OracleFunction& f) {
    if (f.input_width() > 24) {
        throw CapacityError("oracle too large to tabulate");
    }
    out << f.input_width() << " " << f.output_width() << "\n";
    for (uint64_t x = 0; x < (uint64_t{1} << f.input_width()); x++) {
        out << gf2::BitVector(f.output_width(), f.raw(x)).str() << "\n";
    }
}

OracleFunction build_w(const OracleFunction& f) {
    uint32_t n = f.input_width();
    uint32_t m = f.output_width();
    if (n + m > 64) {
        throw std::invalid_argument("W input width exceeds 64 bits");
    }
    auto inner = f.impl_;
    OracleFunction w(
        n + m, m,
        [inner, n](uint64_t in) { return inner->eval(in & width_mask(n)) ^ (in >> n); },
        f.counter_chain());
    w.impl_->split = XorSplit{
        n, m, [inner](uint64_t x) { return inner->eval(x); }, f.walsh_slot()};
    return w;
}

struct KeyedOracle::Impl {
    uint32_t m;
    uint32_t n;
    RawKeyedFn eval;
    RawKeyedFn inverse;
    QueryCounter own = std::make_shared<std::atomic<uint64_t>>(0);
    std::vector<QueryCounter> linked;
    std::optional<OracleFunction> flat;
};

KeyedOracle::KeyedOracle(uint32_t key_width, uint32_t block_width, RawKeyedFn eval,
                         RawKeyedFn inverse, std::vector<QueryCounter> linked)
    : impl_(std::make_shared<Impl>()) {
    if (block_width == 0 || block_width > 64 || key_width > 64 ||
        key_width + block_width > 64) {
        throw std::invalid_argument("keyed oracle widths out of range");
    }
    if (!eval) throw std::invalid_argument("keyed oracle eval must be callable");
    impl_->m = key_width;
    impl_->n = block_width;
    impl_->eval = std::move(eval);
    impl_->inverse = std::move(inverse);
    impl_->linked = std::move(linked);

    auto shared = impl_;
    std::vector<QueryCounter> chain{impl_->own};
    chain.insert(chain.end(), impl_->linked.begin(), impl_->linked.end());
    uint32_t m = key_width;
    impl_->flat = OracleFunction(
        key_width + block_width, block_width,
        [shared, m](uint64_t in) { return shared->eval(in & width_mask(m), in >> m); },
        std::move(chain));
}

uint32_t KeyedOracle::key_width() const { return impl_->m; }
uint32_t KeyedOracle::block_width() const { return impl_->n; }
bool KeyedOracle::invertible() const { return static_cast<bool>(impl_->inverse); }

uint64_t KeyedOracle::raw(uint64_t key, uint64_t x) const {
    return impl_->eval(key & width_mask(impl_->m), x & width_mask(impl_->n)) &
           width_mask(impl_->n);
}

uint64_t KeyedOracle::raw_inverse(uint64_t key, uint64_t y) const {
    if (!impl_->inverse) throw std::logic_error("oracle is not invertible");
    return impl_->inverse(key & width_mask(impl_->m), y & width_mask(impl_->n)) &
           width_mask(impl_->n);
}

gf2::BitVector KeyedOracle::query(const gf2::BitVector& key, const gf2::BitVector& x) const {
    if (impl_->m == 0) throw std::invalid_argument("oracle takes no key bits");
    if (key.width() != impl_->m || x.width() != impl_->n) {
        throw std::invalid_argument("keyed oracle width mismatch");
    }
    record_queries(1);
    return gf2::BitVector(impl_->n, raw(key.value(), x.value()));
}

void KeyedOracle::record_queries(uint64_t count) const {
    impl_->own->fetch_add(count, std::memory_order_relaxed);
    for (const QueryCounter& c : impl_->linked) {
        c->fetch_add(count, std::memory_order_relaxed);
    }
}

const OracleFunction& KeyedOracle::flattened() const { return *impl_->flat; }

uint64_t KeyedOracle::query_count() const { return impl_->own->load(); }

QueryCounter KeyedOracle::counter() const { return impl_->own; }

std::vector<QueryCounter> KeyedOracle::counter_chain() const {
    std::vector<QueryCounter> chain{impl_->own};
    chain.insert(chain.end(), impl_->linked.begin(), impl_->linked.end());
    return chain;
}

KeyedOracle invert(const KeyedOracle& f) {
    if (!f.invertible()) {
        throw std::logic_error("cannot invert a non-invertible keyed oracle");
    }
    auto fwd = f;  // keep the original alive inside the closures
    return KeyedOracle(
        f.key_width(), f.block_width(),
        [fwd](uint64_t k, uint64_t y) { return fwd.raw_inverse(k, y); },
        [fwd](uint64_t k, uint64_t x) { return fwd.raw(k, x); }, f.counter_chain());
}

KeyedOracle keyed_from_truth_tables(uint32_t key_width, uint32_t block_width,
                                    const std::vector<std::vector<gf2::BitVector>>& tables) {
    if (block_width == 0 || key_width + block_width > 24) {
        throw CapacityError("keyed truth table beyond 24 total bits");
    }
    if (tables.size() != (size_t{1} << key_width)) {
        throw std::invalid_argument("need exactly 2^m per-key tables");
    }
    size_t block = size_t{1} << block_width;
    auto values = std::make_shared<std::vector<uint64_t>>();
    auto inverse = std::make_shared<std::vector<uint64_t>>(tables.size() * block);
    values->reserve(tables.size() * block);
    bool bijective = true;
    for (size_t k = 0; k < tables.size(); k++) {
        if (tables[k].size() != block) {
            throw std::invalid_argument("per-key table must have exactly 2^n entries");
        }
        std::vector<bool> seen(block, false);
        for (size_t x = 0; x < block; x++) {
            if (tables[k][x].width() != block_width) {
                throw std::invalid_argument("keyed table entry width mismatch");
            }
            uint64_t y = tables[k][x].value();
            values->push_back(y);
            if (seen[y]) bijective = false;
            seen[y] = true;
            (*inverse)[k * block + y] = x;
        }
    }
    KeyedOracle::RawKeyedFn inv;
    if (bijective) {
        inv = [inverse, block_width](uint64_t k, uint64_t y) {
            return (*inverse)[(k << block_width) | y];
        };
    }
    return KeyedOracle(
        key_width, block_width,
        [values, block_width](uint64_t k, uint64_t x) {
            return (*values)[(k << block_width) | x];
        },
        std::move(inv));
}

KeyedOracle RoundCipher::slice(uint32_t from, uint32_t to) const {
    if (from < 1 || to > rounds() || from > to + 1) {
        throw std::invalid_argument("round range out of bounds");
    }
    {
        std::lock_guard<std::mutex> lock(slice_mu_);
        for (const auto& entry : slice_cache_) {
            if (entry.first == std::make_pair(from, to)) return entry.second;
        }
    }

    uint32_t t = subkey_width();
    uint32_t count = to + 1 - from;
    uint64_t sk_mask = width_mask(t);
    // The closures capture the cipher; it must outlive every handed-out slice.
    auto fwd = [this, from, to, t, sk_mask](uint64_t key, uint64_t x) {
        for (uint32_t r = from; r <= to; r++) {
            uint64_t sk = (key >> ((r - from) * t)) & sk_mask;
            x = round_apply(r, sk, x);
        }
        return x;
    };
    auto bwd = [this, from, to, t, sk_mask](uint64_t key, uint64_t y) {
        for (uint32_t r = to; r + 1 > from; r--) {
            uint64_t sk = (key >> ((r - from) * t)) & sk_mask;
            y = round_invert(r, sk, y);
        }
        return y;
    };
    KeyedOracle oracle(count * t, block_width(), std::move(fwd), std::move(bwd), {master_});

    std::lock_guard<std::mutex> lock(slice_mu_);
    slice_cache_.emplace_back(std::make_pair(from, to), oracle);
    return oracle;
}

}  // namespace qmim::oracle
