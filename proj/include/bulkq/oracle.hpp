#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bulkq/qcore.hpp"
#include "bulkq/truth_table.hpp"

// Construction, classification, enumeration and sampling of oracle
// functions, plus their unitary encodings.
namespace bulkq::oracle {

enum class PromiseClass { Constant, Balanced, Neither };

const char* to_string(PromiseClass promise);

// Constant iff all values are equal; Balanced iff exactly 2^(n-1) entries are
// zero. Defined for q = 2 only; other q throws DomainError.
PromiseClass classify(const TruthTable& table);

TruthTable constant_table(int q, int n, int value);

// values[x] = sum_i x_i y_i mod q
TruthTable inner_product_table(const std::vector<int>& y, int q, int n);

// values[x] = (x . y + b) mod q
TruthTable affine_table(const std::vector<int>& y, int b, int q, int n);

// Streams every balanced table exactly once, in lexicographic order of the
// value vector. q = 2, n <= 4 (12870 tables at n = 4).
class BalancedEnumerator {
  public:
    explicit BalancedEnumerator(int n);

    // Fills `out` and returns true until the stream is exhausted.
    bool next(TruthTable& out);

    std::uint64_t total() const { return total_; }

  private:
    int n_;
    std::uint32_t mask_;
    std::uint32_t limit_;
    bool done_ = false;
    std::uint64_t total_;
};

std::vector<TruthTable> enumerate_balanced(int n);

// C(2^n, 2^(n-1))
std::uint64_t balanced_count(int n);

// Uniformly random balanced table via a seeded shuffle of a half-zeros
// vector; deterministic per seed.
TruthTable sample_balanced(int n, std::uint64_t seed);

// Uniformly random table (no promise); used for negative controls.
TruthTable random_table(int q, int n, std::uint64_t seed);

// (number of balanced tables among the 2*2^n affine tables, C(2^n, 2^(n-1))).
// The first component equals 2(2^n - 1).
std::pair<std::uint64_t, std::uint64_t> count_affine_balanced(int n);

// Permutation |x>|a> -> |x>|a xor f(x)> on n+1 sites; q = 2, self-inverse.
qcore::Operator full_oracle_matrix(const TruthTable& table);

} // namespace bulkq::oracle
