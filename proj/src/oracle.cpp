#include "bulkq/oracle.hpp"

#include <string>

#include "bulkq/errors.hpp"
#include "bulkq/rng.hpp"

namespace bulkq::oracle {

void validate(const TruthTable& table) {
    const std::size_t dim = qcore::checked_dim(table.local_dim, table.arity, qcore::kStateGuard);
    if (table.values.size() != dim)
        throw DomainError("truth table has " + std::to_string(table.values.size()) +
                          " entries, expected " + std::to_string(dim));
    for (int v : table.values)
        if (v < 0 || v >= table.local_dim)
            throw DomainError("truth table value " + std::to_string(v) + " out of range 0.." +
                              std::to_string(table.local_dim - 1));
}

const char* to_string(PromiseClass promise) {
    switch (promise) {
        case PromiseClass::Constant: return "constant";
        case PromiseClass::Balanced: return "balanced";
        case PromiseClass::Neither: return "neither";
    }
    return "?";
}

PromiseClass classify(const TruthTable& table) {
    validate(table);
    if (table.local_dim != 2)
        throw DomainError("the constant/balanced promise is defined for q = 2");
    std::size_t zeros = 0;
    for (int v : table.values) zeros += (v == 0);
    if (zeros == table.values.size() || zeros == 0) return PromiseClass::Constant;
    if (2 * zeros == table.values.size()) return PromiseClass::Balanced;
    return PromiseClass::Neither;
}

TruthTable constant_table(int q, int n, int value) {
    if (value < 0 || value >= q)
        throw DomainError("constant value " + std::to_string(value) + " out of range 0.." +
                          std::to_string(q - 1));
    TruthTable t;
    t.local_dim = q;
    t.arity = n;
    t.values.assign(qcore::checked_dim(q, n, qcore::kStateGuard), value);
    return t;
}

TruthTable inner_product_table(const std::vector<int>& y, int q, int n) {
    return affine_table(y, 0, q, n);
}

TruthTable affine_table(const std::vector<int>& y, int b, int q, int n) {
    if (static_cast<int>(y.size()) != n)
        throw DomainError("coefficient vector has " + std::to_string(y.size()) +
                          " entries for " + std::to_string(n) + " sites");
    for (int v : y)
        if (v < 0 || v >= q)
            throw DomainError("coefficient " + std::to_string(v) + " out of range 0.." +
                              std::to_string(q - 1));
    if (b < 0 || b >= q)
        throw DomainError("offset " + std::to_string(b) + " out of range 0.." +
                          std::to_string(q - 1));
    TruthTable t;
    t.local_dim = q;
    t.arity = n;
    const std::size_t dim = qcore::checked_dim(q, n, qcore::kStateGuard);
    t.values.resize(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        long long acc = b;
        std::size_t rest = x;
        for (int site = n; site >= 1; --site) {
            acc += static_cast<long long>(rest % static_cast<std::size_t>(q)) *
                   y[static_cast<std::size_t>(site - 1)];
            rest /= static_cast<std::size_t>(q);
        }
        t.values[x] = static_cast<int>(acc % q);
    }
    return t;
}

BalancedEnumerator::BalancedEnumerator(int n) : n_(n) {
    if (n < 1) throw DomainError("site count must be >= 1, got " + std::to_string(n));
    if (n > 4)
        throw GuardError("exhaustive balanced enumeration is limited to n <= 4, got n = " +
                         std::to_string(n));
    const std::uint32_t entries = 1u << n_;
    const std::uint32_t half = entries / 2;
    // Masks carry value v_j in bit (entries-1-j), so increasing mask order is
    // lexicographic order of the value vector; the first mask is 0...01...1.
    mask_ = (1u << half) - 1u;
    limit_ = mask_ << half;
    total_ = balanced_count(n_);
}

bool BalancedEnumerator::next(TruthTable& out) {
    if (done_) return false;
    const int entries = 1 << n_;
    out.local_dim = 2;
    out.arity = n_;
    out.values.resize(static_cast<std::size_t>(entries));
    for (int j = 0; j < entries; ++j)
        out.values[static_cast<std::size_t>(j)] =
            static_cast<int>((mask_ >> (entries - 1 - j)) & 1u);
    if (mask_ == limit_) {
        done_ = true;
        return true;
    }
    // Gosper's hack: next mask with the same popcount.
    const std::uint32_t c = mask_ & (0u - mask_);
    const std::uint32_t r = mask_ + c;
    mask_ = (((r ^ mask_) >> 2) / c) | r;
    return true;
}

std::vector<TruthTable> enumerate_balanced(int n) {
    BalancedEnumerator stream(n);
    std::vector<TruthTable> tables;
    tables.reserve(stream.total());
    TruthTable t;
    while (stream.next(t)) tables.push_back(t);
    return tables;
}

std::uint64_t balanced_count(int n) {
    if (n < 1) throw DomainError("site count must be >= 1, got " + std::to_string(n));
    if (n > 6) throw GuardError("balanced count overflows 64 bits beyond n = 6");
    const unsigned entries = 1u << n;
    const unsigned half = entries / 2;
    // C(entries, half) by the multiplicative formula; every prefix is exact.
    unsigned __int128 c = 1;
    for (unsigned i = 1; i <= half; ++i) {
        c = c * (entries - half + i) / i;
    }
    return static_cast<std::uint64_t>(c);
}

TruthTable sample_balanced(int n, std::uint64_t seed) {
    const std::size_t dim = qcore::checked_dim(2, n, qcore::kStateGuard);
    TruthTable t;
    t.local_dim = 2;
    t.arity = n;
    t.values.assign(dim, 0);
    for (std::size_t j = dim / 2; j < dim; ++j) t.values[j] = 1;
    Rng rng(seed);
    rng.shuffle(t.values);
    return t;
}

TruthTable random_table(int q, int n, std::uint64_t seed) {
    const std::size_t dim = qcore::checked_dim(q, n, qcore::kStateGuard);
    TruthTable t;
    t.local_dim = q;
    t.arity = n;
    t.values.resize(dim);
    Rng rng(seed);
    for (auto& v : t.values) v = static_cast<int>(rng.next_index(static_cast<std::uint64_t>(q)));
    return t;
}

std::pair<std::uint64_t, std::uint64_t> count_affine_balanced(int n) {
    const std::size_t points = qcore::checked_dim(2, n, qcore::kStateGuard);
    std::uint64_t balanced = 0;
    std::vector<int> y(static_cast<std::size_t>(n), 0);
    for (std::size_t bits = 0; bits < points; ++bits) {
        for (int site = 1; site <= n; ++site)
            y[static_cast<std::size_t>(site - 1)] = qcore::digit_at(bits, 2, n, site);
        for (int b = 0; b < 2; ++b)
            if (classify(affine_table(y, b, 2, n)) == PromiseClass::Balanced) ++balanced;
    }
    return {balanced, balanced_count(n)};
}

qcore::Operator full_oracle_matrix(const TruthTable& table) {
    validate(table);
    if (table.local_dim != 2) throw DomainError("the xor-ancilla oracle is defined for q = 2");
    const int n = table.arity;
    const std::size_t dim = qcore::checked_dim(2, n + 1, qcore::dense_guard());
    qcore::Operator op;
    op.local_dim = 2;
    op.sites = n + 1;
    op.matrix = CMatrix(dim, dim);
    // |x>|a> -> |x>|a xor f(x)>; the ancilla is the last (least significant) site.
    for (std::size_t x = 0; x < dim / 2; ++x) {
        const std::size_t f = static_cast<std::size_t>(table.values[x]);
        for (std::size_t a = 0; a < 2; ++a) op.matrix(2 * x + (a ^ f), 2 * x + a) = cplx{1.0, 0.0};
    }
    return op;
}

} // namespace bulkq::oracle
