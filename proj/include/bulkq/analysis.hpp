#pragma once

#include <cstdint>
#include <vector>

#include "bulkq/models.hpp"
#include "bulkq/oracle.hpp"
#include "bulkq/qcore.hpp"

// Brute-force verification machinery: the worst-case signal scan, the
// thermal attenuation law, the commutation lemma and the sum-rule chain.
namespace bulkq::analysis {

// Two independent ways to compute the pure-input ensemble signal:
//   Spectrum - E_i = sum_y (2 y_i - 1) |g(y)|^2 from the direct spectrum sum;
//   State    - expectation_site on the simulated pipeline output.
enum class SignalRoute { Spectrum, State };

std::vector<double> bqcp_signal(const oracle::TruthTable& table, SignalRoute route);

struct EpsilonReport {
    int n = 0;
    double epsilon = 0.0;
    oracle::TruthTable argmin_table;
    bool exhaustive = true;
    std::uint64_t samples = 0; // sampled mode only
    std::uint64_t seed = 0;    // sampled mode only
    double bound_2_over_n = 0.0;
};

// Exact min over every balanced table of max_i (E_i + 1); n <= 4. The
// constant-oracle signal is the proven -1; recompute_const re-derives it per
// scan as a self-check.
EpsilonReport epsilon_exact(int n, SignalRoute route = SignalRoute::Spectrum,
                            bool recompute_const = false);

// Min over `samples` seeded balanced tables: an upper bound on epsilon(n),
// n <= 12. A result below 2/n - 1e-10 is impossible and raises InternalError.
EpsilonReport epsilon_sampled(int n, std::uint64_t samples, std::uint64_t seed,
                              SignalRoute route = SignalRoute::State);

// max_i | E_i(BQC, direct enumeration) - (2 q_i - 1) E_i(BQC_P, spectrum) |.
// The two sides share no signal code path.
double verify_fact2(const oracle::TruthTable& table, const qcore::ThermalSpec& thermal);

// || [X^k, H^n Uf H^n] ||_F, zero for every diagonal phase oracle.
double commutation_residual(const oracle::TruthTable& table, const std::vector<int>& k);

// Same commutator with an arbitrary operator in the oracle slot (negative
// controls distinguish diagonal from non-diagonal middles).
double commutation_residual_operator(const qcore::Operator& middle, const std::vector<int>& k);

struct SumRuleRecord {
    double sum_e = 0.0;          // sum_i E_i via the state route
    double rhs = 0.0;            // 2 sum_{y!=0} |g(y)|^2 (sum_i y_i) - n
    double g0_sq = 0.0;          // |g(0)|^2
    double mean_e = 0.0;         // (1/n) sum_i E_i
    double average_bound = 0.0;  // 2/n - 1
    double spectrum_total = 0.0; // sum_y |g(y)|^2
    bool equality_ok = false;       // |sum_e - rhs| <= 1e-10
    bool g0_ok = false;             // g0_sq <= 1e-12
    bool average_bound_ok = false;  // mean_e >= 2/n - 1 - 1e-10
    bool normalized_ok = false;     // |spectrum_total - 1| <= 1e-12
};

// Both sides of the balanced-table sum rule plus the averaged lower bound.
// Throws DomainError if the table is not balanced.
SumRuleRecord sum_rule_check(const oracle::TruthTable& table);

} // namespace bulkq::analysis
