#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bulkq/matrix.hpp"
#include "bulkq/truth_table.hpp"

// Dense state, gate, operator and channel arithmetic for n sites of local
// dimension q >= 2. Conventions used throughout:
//   * basis index x = sum_i x_i q^(n-i): site 1 is the most significant digit;
//   * omega = exp(2*pi*i/q);
//   * the per-site Z expectation for q = 2 uses the eigenvalue convention
//     Z|x> = (2x-1)|x>, i.e. -1 on |0> (the negative of diag(1,-1)).
namespace bulkq::qcore {

// ---------------------------------------------------------------------------
// guards

// Largest q^n for which dense q^n x q^n matrices may be built. Default 256;
// overridable through the BULKQ_DENSE_GUARD environment variable.
std::size_t dense_guard();
// Where the current dense guard came from: "default" or "env".
const char* dense_guard_source();

// Largest q^n for state-vector pipelines.
inline constexpr std::size_t kStateGuard = 4096;
// Largest branch count for mixture enumeration (n <= 12 at q = 2).
inline constexpr std::size_t kBranchGuard = 4096;

// q^n, throwing GuardError when it exceeds `limit`.
std::size_t checked_dim(int q, int n, std::size_t limit);

// Digit of `index` at `site` (1-based, site 1 most significant).
int digit_at(std::size_t index, int q, int n, int site);

cplx omega_power(int q, long long exponent);

// ---------------------------------------------------------------------------
// domain types

struct PureState {
    int local_dim = 2;
    int sites = 1;
    std::vector<cplx> amplitudes;

    std::size_t dim() const { return amplitudes.size(); }

    static PureState zero_state(int q, int n);
    static PureState basis_state(int q, int n, std::size_t index);
    static PureState basis_state(int q, int n, const std::vector<int>& digits);
};

// Throws DomainError unless length == q^n and the norm is 1 within 1e-10.
void validate(const PureState& state);
double norm_error(const PureState& state);

struct MixtureState {
    int local_dim = 2;
    int sites = 1;
    std::vector<std::pair<double, PureState>> branches;
};

void validate(const MixtureState& mix);

// Per-site initial distributions r_i over {0..q-1}. For q = 2,
// r_i = (q_i, 1-q_i) with q_i = Pr(site i starts in |0>).
struct ThermalSpec {
    int local_dim = 2;
    std::vector<std::vector<double>> site_distributions;

    int sites() const { return static_cast<int>(site_distributions.size()); }

    // r_{i,0}; equals q_i for qubits.
    double ground_probability(int site) const;
    // q' = min_i r_{i,0}
    double min_ground_probability() const;
    // p_k = prod_i r_{i,k_i}
    double branch_probability(const std::vector<int>& k) const;

    static ThermalSpec qubit(const std::vector<double>& ground_probs);
    static ThermalSpec uniform_qubit(double ground_prob, int n);
    static ThermalSpec pure(int q, int n);
};

void validate(const ThermalSpec& spec);

struct Operator {
    int local_dim = 2;
    int sites = 1;
    CMatrix matrix;

    std::size_t dim() const { return matrix.rows(); }
};

// ||U'U - I||_F
double unitarity_residual(const Operator& op);
void require_unitary(const Operator& op, double tol = 1e-10);

struct KrausChannel {
    int local_dim = 2;
    int sites = 1;
    std::vector<CMatrix> operators;

    std::size_t dim() const { return operators.empty() ? 0 : operators.front().rows(); }
};

// ||sum_k B_k' B_k - I||_F
double completeness_residual(const KrausChannel& channel);
void require_complete(const KrausChannel& channel, double tol = 1e-9);

// ---------------------------------------------------------------------------
// gate records

// One gate in a circuit description. Gates are listed in execution order:
// the first record acts on the state first.
struct GateOp {
    enum class Kind { DftAll, DftAllInverse, PhaseOracle, ShiftMask, SingleSite };

    Kind kind = Kind::DftAll;
    oracle::TruthTable table;  // PhaseOracle
    std::vector<int> mask;     // ShiftMask
    int site = 1;              // SingleSite (1-based)
    CMatrix gate;              // SingleSite, q x q

    static GateOp dft_all();
    static GateOp dft_all_inverse();
    static GateOp phase_oracle(oracle::TruthTable table);
    static GateOp shift_mask(std::vector<int> mask);
    static GateOp single_site(int site, CMatrix gate);
};

// The three-step pipeline H^n, phase oracle, H^n (DFT for general q).
std::vector<GateOp> dj_gates(const oracle::TruthTable& table);

// ---------------------------------------------------------------------------
// operations on states

// Single-site DFT_q (or its inverse) applied to every site.
// DFT_q |x> = q^(-1/2) sum_y omega^(x y) |y>; for q = 2 this is the Hadamard.
PureState apply_dft_all(const PureState& state, bool inverse = false);

// Site i shifted by k_i modulo q in the computational basis.
PureState apply_shift_mask(const PureState& state, const std::vector<int>& k);

// Amplitude at basis index x multiplied by omega^(f(x)).
PureState apply_diagonal_phase(const PureState& state, const oracle::TruthTable& table);

// q x q gate applied at one site.
PureState apply_single_site(const PureState& state, int site, const CMatrix& gate);

PureState apply_gate(const PureState& state, const GateOp& gate);
PureState apply_gates(PureState state, const std::vector<GateOp>& gates);

// In-place forms used by the hot enumeration loops.
void dft_all_inplace(std::vector<cplx>& amps, int q, int n, bool inverse);
void diagonal_phase_inplace(std::vector<cplx>& amps, const oracle::TruthTable& table);

// <Z_i> with the (2x-1) eigenvalue convention; q = 2 only.
double expectation_site(const PureState& state, int site);

// <Z_q^m at site> = sum_x omega^(m x_site) |amp(x)|^2, 1 <= m <= q-1.
cplx expectation_zq_power(const PureState& state, int site, int m);

// Weight-averaged branch expectations.
cplx mixture_expectation(const MixtureState& mix, int site, int m);
double mixture_expectation_site(const MixtureState& mix, int site);

// Per-site probability of each basis digit.
std::vector<double> site_populations(const PureState& state, int site);

// The q^n-branch product mixture {(p_k, |k>)}; branches below the pruning
// threshold 1e-15 are dropped.
MixtureState thermal_mixture(const ThermalSpec& spec, int n);

// ---------------------------------------------------------------------------
// operators

Operator identity_operator(int q, int n);
Operator dft_all_operator(int q, int n, bool inverse = false);
Operator shift_mask_operator(int q, const std::vector<int>& k);
Operator diagonal_phase_operator(const oracle::TruthTable& table);
Operator single_site_operator(int q, int n, int site, const CMatrix& gate);
Operator gate_operator(int q, int n, const GateOp& gate);

// Z at `site` with the (2x-1) convention; q = 2 only.
Operator sigma_z_site(int n, int site);
// diag(omega^(m x_site)) for general q.
Operator zq_power_site(int q, int n, int site, int m);

// Dense product of the listed gates (first listed acts first); the result is
// verified unitary within 1e-10.
Operator circuit_matrix(const std::vector<GateOp>& gates, int q, int n);

} // namespace bulkq::qcore

namespace bulkq::testing {

// Fault-injection hook for the selftest mutation check: when enabled,
// expectation_site returns the negated value. Never set outside tests.
void inject_expectation_sign_flip(bool enabled);
bool expectation_sign_flip();

} // namespace bulkq::testing
