#pragma once

#include <cstddef>
#include <vector>

namespace bulkq::oracle {

// Explicit value table of f: {0..q-1}^n -> {0..q-1}. values[x] is indexed by
// the basis index of x with site 1 as the most significant digit.
struct TruthTable {
    int local_dim = 2;
    int arity = 0;
    std::vector<int> values;
};

// Throws DomainError unless length(values) == q^n and every entry is in
// {0..q-1}.
void validate(const TruthTable& table);

} // namespace bulkq::oracle
