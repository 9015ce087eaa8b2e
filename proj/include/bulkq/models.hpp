#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bulkq/oracle.hpp"
#include "bulkq/qcore.hpp"

// The three execution models and the algorithm pipelines.
//
//   SQC   - pure-state run, one projective outcome sampled per query.
//   BQC_P - ensemble averages with pure |0...0> inputs.
//   BQC   - ensemble averages with thermal product-state inputs; signals are
//           computed by direct enumeration of the input mixture branches.
namespace bulkq::models {

enum class ModelKind { SQC, BQC_P, BQC };

const char* to_string(ModelKind model);

struct NoiseConfig {
    double sigma_read = 0.0; // std-dev of additive readout noise per signal
    long long repetitions = 1;
    std::uint64_t seed = 0;
};

struct SignalReport {
    ModelKind model = ModelKind::BQC_P;
    int local_dim = 2;
    int sites = 0;
    // q = 2: per-site <Z_i> with the (2x-1) eigenvalue convention.
    std::vector<double> e_site;
    // q > 2: zq_grid[i-1][m-1] = <Z_q^m at site i>.
    std::vector<std::vector<cplx>> zq_grid;
    // SQC only: the sampled basis outcome as digits.
    std::optional<std::vector<int>> outcome;
    std::optional<qcore::ThermalSpec> thermal;
    std::optional<double> ancilla_p1;
    oracle::PromiseClass promise = oracle::PromiseClass::Neither;
    std::uint64_t seed = 0;
};

struct Decision {
    oracle::PromiseClass verdict = oracle::PromiseClass::Constant;
    std::optional<int> witness_site; // set when Balanced
    double margin = 0.0;
};

// Input-register state after the pipeline H^n, phase oracle, H^n applied to
// |0...0>; the pure ancilla is absorbed analytically.
qcore::PureState run_dj_state(const oracle::TruthTable& table);

// |g(y)|^2 for all y, computed from the direct sum
// g(y) = 2^-n sum_x (-1)^(f(x) xor x.y). Independent of the state pipeline.
std::vector<double> dj_spectrum(const oracle::TruthTable& table);

// SQC: outcome sampled from |g(y)|^2 (requires seed).
// BQC_P: exact E_i from run_dj_state.
// BQC: exact E_i by direct enumeration of the thermal mixture branches.
SignalReport run_dj(ModelKind model, const oracle::TruthTable& table,
                    const std::optional<qcore::ThermalSpec>& thermal = std::nullopt,
                    std::uint64_t seed = 0, int threads = 1);

// Balanced iff some site satisfies E_i >= -(2 q_i - 1) + (2 q' - 1)/n: the
// midpoint of the guaranteed worst-case gap. Witness = argmax margin, ties
// to the lowest site index.
Decision decide_dj(const SignalReport& report, const qcore::ThermalSpec& thermal);
Decision decide_dj(const SignalReport& report);

struct ParityResult {
    SignalReport report;
    std::vector<int> y_hat;       // recovered bits, y_i = 1 iff E_i > 0
    std::vector<double> margins;  // |E_i|; equals 2 q_i - 1 noise-free
    std::vector<int> degenerate_sites; // sites with q_i = 1/2 (1-based)
};

// One query of the inner-product oracle f(x) = x.y. Degenerate sites
// (q_i = 1/2) throw DomainError unless allow_degenerate is set.
ParityResult run_parity(ModelKind model, const std::vector<int>& y,
                        const std::optional<qcore::ThermalSpec>& thermal = std::nullopt,
                        std::uint64_t seed = 0, bool allow_degenerate = false,
                        int threads = 1);

// Recover bits from a (possibly noisy) q = 2 signal report.
std::vector<int> recover_parity(const SignalReport& report);

// Full (n+1)-site pipeline with a thermal ancilla: Pr(ancilla starts |1>) =
// ancilla_p1. Exact E_i by enumeration over input x ancilla branches.
SignalReport run_dj_thermal_ancilla(const oracle::TruthTable& table,
                                    const qcore::ThermalSpec& thermal_inputs,
                                    double ancilla_p1);

struct QuditParityResult {
    int local_dim = 2;
    int sites = 0;
    std::vector<int> y_hat; // argmax of per-site basis populations
    std::vector<std::vector<cplx>> zq_grid;
    std::vector<std::vector<double>> site_populations;
    std::optional<qcore::ThermalSpec> thermal;
};

// Parity over Z_q (q prime): pipeline DFT^n, phase oracle for f(x) = x.y,
// inverse DFT^n. Pure inputs end exactly in |y>.
QuditParityResult run_qudit_parity(const std::vector<int>& y, int q, int n,
                                   const std::optional<qcore::ThermalSpec>& thermal = std::nullopt,
                                   int threads = 1);

// Each E_i replaced by E_i + N(0, sigma_read/sqrt(m)); per-site streams are
// derived by counter, so draws are independent of evaluation order.
SignalReport simulate_readout(const SignalReport& report, const NoiseConfig& noise);

// m = ceil((2 z sigma_read / gap)^2) with gap = (2 q_min - 1) * 2/n; at least
// 1. Guarantees per-site noise std <= gap/(2z). Grows as Theta(n^2).
long long estimate_repetitions(int n, double q_min, double sigma_read, double z);

} // namespace bulkq::models
