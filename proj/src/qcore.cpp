#include "bulkq/qcore.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "bulkq/errors.hpp"

namespace bulkq::testing {

namespace {
bool g_sign_flip = false;
}

void inject_expectation_sign_flip(bool enabled) { g_sign_flip = enabled; }
bool expectation_sign_flip() { return g_sign_flip; }

} // namespace bulkq::testing

namespace bulkq::qcore {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct GuardConfig {
    std::size_t value = 256;
    const char* source = "default";
};

const GuardConfig& guard_config() {
    static const GuardConfig cfg = [] {
        GuardConfig c;
        if (const char* env = std::getenv("BULKQ_DENSE_GUARD")) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (end == env || *end != '\0' || v == 0)
                throw DomainError("BULKQ_DENSE_GUARD must be a positive integer, got \"" +
                                  std::string(env) + "\"");
            c.value = static_cast<std::size_t>(v);
            c.source = "env";
        }
        return c;
    }();
    return cfg;
}

void check_sites(int q, int n) {
    if (q < 2) throw DomainError("local dimension must be >= 2, got " + std::to_string(q));
    if (n < 1) throw DomainError("site count must be >= 1, got " + std::to_string(n));
}

// q^(n - site): the index stride of `site` (1-based, site 1 most significant).
std::size_t site_stride(int q, int n, int site) {
    std::size_t s = 1;
    for (int i = 0; i < n - site; ++i) s *= static_cast<std::size_t>(q);
    return s;
}

void check_site_index(int n, int site) {
    if (site < 1 || site > n)
        throw DomainError("site " + std::to_string(site) + " out of range 1.." + std::to_string(n));
}

void check_table_matches(const oracle::TruthTable& table, int q, int n, const char* where) {
    if (table.local_dim != q || table.arity != n)
        throw DomainError(std::string(where) + ": truth table is q=" +
                          std::to_string(table.local_dim) + ", n=" + std::to_string(table.arity) +
                          " but the state is q=" + std::to_string(q) + ", n=" + std::to_string(n));
}

void check_mask(const std::vector<int>& k, int q, int n, const char* where) {
    if (static_cast<int>(k.size()) != n)
        throw DomainError(std::string(where) + ": mask has " + std::to_string(k.size()) +
                          " entries for " + std::to_string(n) + " sites");
    for (int v : k)
        if (v < 0 || v >= q)
            throw DomainError(std::string(where) + ": mask digit " + std::to_string(v) +
                              " out of range 0.." + std::to_string(q - 1));
}

// Basis index after shifting every site digit by the mask, modulo q.
std::size_t shifted_index(std::size_t x, int q, int n, const std::vector<int>& k) {
    std::size_t y = 0;
    std::size_t rest = x;
    // Peel digits least-significant first (site n down to site 1).
    std::size_t stride = 1;
    for (int site = n; site >= 1; --site) {
        const int d = static_cast<int>(rest % static_cast<std::size_t>(q));
        rest /= static_cast<std::size_t>(q);
        const int shifted = (d + k[static_cast<std::size_t>(site - 1)]) % q;
        y += static_cast<std::size_t>(shifted) * stride;
        stride *= static_cast<std::size_t>(q);
    }
    return y;
}

} // namespace

std::size_t dense_guard() { return guard_config().value; }
const char* dense_guard_source() { return guard_config().source; }

std::size_t checked_dim(int q, int n, std::size_t limit) {
    check_sites(q, n);
    std::size_t dim = 1;
    for (int i = 0; i < n; ++i) {
        if (dim > limit / static_cast<std::size_t>(q))
            throw GuardError("dimension " + std::to_string(q) + "^" + std::to_string(n) +
                             " exceeds the guard " + std::to_string(limit));
        dim *= static_cast<std::size_t>(q);
    }
    if (dim > limit)
        throw GuardError("dimension " + std::to_string(dim) + " exceeds the guard " +
                         std::to_string(limit));
    return dim;
}

int digit_at(std::size_t index, int q, int n, int site) {
    check_site_index(n, site);
    return static_cast<int>(index / site_stride(q, n, site) % static_cast<std::size_t>(q));
}

cplx omega_power(int q, long long exponent) {
    const long long r = ((exponent % q) + q) % q;
    if (r == 0) return cplx{1.0, 0.0};
    if (2 * r == q) return cplx{-1.0, 0.0};
    if (4 * r == q) return cplx{0.0, 1.0};
    if (4 * r == 3 * q) return cplx{0.0, -1.0};
    const double angle = kTwoPi * static_cast<double>(r) / static_cast<double>(q);
    return cplx{std::cos(angle), std::sin(angle)};
}

// ---------------------------------------------------------------------------
// states

PureState PureState::zero_state(int q, int n) { return basis_state(q, n, std::size_t{0}); }

PureState PureState::basis_state(int q, int n, std::size_t index) {
    const std::size_t dim = checked_dim(q, n, kStateGuard);
    if (index >= dim)
        throw DomainError("basis index " + std::to_string(index) + " out of range for dimension " +
                          std::to_string(dim));
    PureState s;
    s.local_dim = q;
    s.sites = n;
    s.amplitudes.assign(dim, cplx{0.0, 0.0});
    s.amplitudes[index] = cplx{1.0, 0.0};
    return s;
}

PureState PureState::basis_state(int q, int n, const std::vector<int>& digits) {
    if (static_cast<int>(digits.size()) != n)
        throw DomainError("expected " + std::to_string(n) + " digits, got " +
                          std::to_string(digits.size()));
    std::size_t index = 0;
    for (int d : digits) {
        if (d < 0 || d >= q)
            throw DomainError("digit " + std::to_string(d) + " out of range 0.." +
                              std::to_string(q - 1));
        index = index * static_cast<std::size_t>(q) + static_cast<std::size_t>(d);
    }
    return basis_state(q, n, index);
}

double norm_error(const PureState& state) {
    double s = 0.0;
    for (const auto& a : state.amplitudes) s += std::norm(a);
    return std::abs(s - 1.0);
}

void validate(const PureState& state) {
    const std::size_t dim = checked_dim(state.local_dim, state.sites, kStateGuard);
    if (state.amplitudes.size() != dim)
        throw DomainError("state has " + std::to_string(state.amplitudes.size()) +
                          " amplitudes, expected " + std::to_string(dim));
    if (norm_error(state) > 1e-10)
        throw DomainError("state norm deviates from 1 by " + std::to_string(norm_error(state)));
}

void validate(const MixtureState& mix) {
    if (mix.branches.empty()) throw DomainError("mixture has no branches");
    double total = 0.0;
    for (const auto& [w, branch] : mix.branches) {
        if (w < 0.0) throw DomainError("mixture weight " + std::to_string(w) + " is negative");
        if (branch.local_dim != mix.local_dim || branch.sites != mix.sites)
            throw DomainError("mixture branch shape does not match the mixture");
        validate(branch);
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw DomainError("mixture weights sum to " + std::to_string(total));
}

// ---------------------------------------------------------------------------
// thermal specs

double ThermalSpec::ground_probability(int site) const {
    check_site_index(sites(), site);
    return site_distributions[static_cast<std::size_t>(site - 1)][0];
}

double ThermalSpec::min_ground_probability() const {
    if (site_distributions.empty()) throw DomainError("thermal spec has no sites");
    double m = 1.0;
    for (const auto& r : site_distributions) m = std::min(m, r[0]);
    return m;
}

double ThermalSpec::branch_probability(const std::vector<int>& k) const {
    if (static_cast<int>(k.size()) != sites())
        throw DomainError("branch mask has " + std::to_string(k.size()) + " entries for " +
                          std::to_string(sites()) + " sites");
    double p = 1.0;
    for (int i = 0; i < sites(); ++i) {
        const auto& r = site_distributions[static_cast<std::size_t>(i)];
        const int d = k[static_cast<std::size_t>(i)];
        if (d < 0 || d >= static_cast<int>(r.size()))
            throw DomainError("branch digit " + std::to_string(d) + " out of range");
        p *= r[static_cast<std::size_t>(d)];
    }
    return p;
}

ThermalSpec ThermalSpec::qubit(const std::vector<double>& ground_probs) {
    ThermalSpec spec;
    spec.local_dim = 2;
    spec.site_distributions.reserve(ground_probs.size());
    for (double p : ground_probs) spec.site_distributions.push_back({p, 1.0 - p});
    validate(spec);
    return spec;
}

ThermalSpec ThermalSpec::uniform_qubit(double ground_prob, int n) {
    check_sites(2, n);
    return qubit(std::vector<double>(static_cast<std::size_t>(n), ground_prob));
}

ThermalSpec ThermalSpec::pure(int q, int n) {
    check_sites(q, n);
    ThermalSpec spec;
    spec.local_dim = q;
    std::vector<double> r(static_cast<std::size_t>(q), 0.0);
    r[0] = 1.0;
    spec.site_distributions.assign(static_cast<std::size_t>(n), r);
    return spec;
}

void validate(const ThermalSpec& spec) {
    if (spec.local_dim < 2) throw DomainError("thermal spec local dimension must be >= 2");
    if (spec.site_distributions.empty()) throw DomainError("thermal spec has no sites");
    for (const auto& r : spec.site_distributions) {
        if (static_cast<int>(r.size()) != spec.local_dim)
            throw DomainError("thermal site distribution has " + std::to_string(r.size()) +
                              " entries for local dimension " + std::to_string(spec.local_dim));
        double total = 0.0;
        for (double p : r) {
            if (p < -1e-12 || p > 1.0 + 1e-12)
                throw DomainError("thermal probability " + std::to_string(p) + " out of [0, 1]");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-10)
            throw DomainError("thermal site distribution sums to " + std::to_string(total));
    }
}

// ---------------------------------------------------------------------------
// operators / channels validation

double unitarity_residual(const Operator& op) {
    if (op.matrix.rows() != op.matrix.cols()) throw DomainError("operator matrix is not square");
    return frobenius_distance(op.matrix.adjoint() * op.matrix,
                              CMatrix::identity(op.matrix.rows()));
}

void require_unitary(const Operator& op, double tol) {
    const double r = unitarity_residual(op);
    if (r > tol)
        throw DomainError("operator is not unitary: residual " + std::to_string(r) +
                          " exceeds " + std::to_string(tol));
}

double completeness_residual(const KrausChannel& channel) {
    if (channel.operators.empty()) throw DomainError("channel has no Kraus operators");
    const std::size_t d = channel.dim();
    CMatrix acc(d, d);
    for (const auto& b : channel.operators) {
        if (b.rows() != d || b.cols() != d)
            throw DomainError("Kraus operators have mismatched shapes");
        acc += b.adjoint() * b;
    }
    return frobenius_distance(acc, CMatrix::identity(d));
}

void require_complete(const KrausChannel& channel, double tol) {
    const double r = completeness_residual(channel);
    if (r > tol)
        throw DomainError("channel is not trace preserving: residual " + std::to_string(r) +
                          " exceeds " + std::to_string(tol));
}

// ---------------------------------------------------------------------------
// gate records

GateOp GateOp::dft_all() {
    GateOp g;
    g.kind = Kind::DftAll;
    return g;
}

GateOp GateOp::dft_all_inverse() {
    GateOp g;
    g.kind = Kind::DftAllInverse;
    return g;
}

GateOp GateOp::phase_oracle(oracle::TruthTable table) {
    GateOp g;
    g.kind = Kind::PhaseOracle;
    g.table = std::move(table);
    return g;
}

GateOp GateOp::shift_mask(std::vector<int> mask) {
    GateOp g;
    g.kind = Kind::ShiftMask;
    g.mask = std::move(mask);
    return g;
}

GateOp GateOp::single_site(int site, CMatrix gate) {
    GateOp g;
    g.kind = Kind::SingleSite;
    g.site = site;
    g.gate = std::move(gate);
    return g;
}

std::vector<GateOp> dj_gates(const oracle::TruthTable& table) {
    oracle::validate(table);
    std::vector<GateOp> gates;
    gates.push_back(GateOp::dft_all());
    gates.push_back(GateOp::phase_oracle(table));
    gates.push_back(GateOp::dft_all_inverse());
    return gates;
}

// ---------------------------------------------------------------------------
// state operations

void dft_all_inplace(std::vector<cplx>& amps, int q, int n, bool inverse) {
    const std::size_t dim = checked_dim(q, n, kStateGuard);
    if (amps.size() != dim) throw DomainError("amplitude buffer does not match q^n");

    if (q == 2) {
        // Hadamard butterfly; H is its own inverse.
        const double inv_sqrt2 = 0.70710678118654752440084436210485;
        for (std::size_t h = 1; h < dim; h <<= 1) {
            for (std::size_t base = 0; base < dim; base += h << 1) {
                for (std::size_t j = base; j < base + h; ++j) {
                    const cplx a = amps[j];
                    const cplx b = amps[j + h];
                    amps[j] = (a + b) * inv_sqrt2;
                    amps[j + h] = (a - b) * inv_sqrt2;
                }
            }
        }
        return;
    }

    // Per-site q-point transform: out[y] = q^(-1/2) sum_x w^(+-xy) in[x].
    const double scale = 1.0 / std::sqrt(static_cast<double>(q));
    std::vector<cplx> twiddle(static_cast<std::size_t>(q) * static_cast<std::size_t>(q));
    for (int x = 0; x < q; ++x)
        for (int y = 0; y < q; ++y)
            twiddle[static_cast<std::size_t>(x * q + y)] =
                omega_power(q, inverse ? -static_cast<long long>(x) * y
                                       : static_cast<long long>(x) * y);

    std::vector<cplx> slot(static_cast<std::size_t>(q));
    for (int site = 1; site <= n; ++site) {
        const std::size_t stride = site_stride(q, n, site);
        const std::size_t block = stride * static_cast<std::size_t>(q);
        for (std::size_t base = 0; base < dim; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                const std::size_t at = base + off;
                for (int x = 0; x < q; ++x)
                    slot[static_cast<std::size_t>(x)] = amps[at + static_cast<std::size_t>(x) * stride];
                for (int y = 0; y < q; ++y) {
                    cplx acc{0.0, 0.0};
                    for (int x = 0; x < q; ++x)
                        acc += twiddle[static_cast<std::size_t>(x * q + y)] *
                               slot[static_cast<std::size_t>(x)];
                    amps[at + static_cast<std::size_t>(y) * stride] = acc * scale;
                }
            }
        }
    }
}

void diagonal_phase_inplace(std::vector<cplx>& amps, const oracle::TruthTable& table) {
    oracle::validate(table);
    if (amps.size() != table.values.size())
        throw DomainError("amplitude buffer does not match the truth table length");
    const int q = table.local_dim;
    for (std::size_t x = 0; x < amps.size(); ++x) {
        const int f = table.values[x];
        if (f != 0) amps[x] *= omega_power(q, f);
    }
}

PureState apply_dft_all(const PureState& state, bool inverse) {
    validate(state);
    PureState out = state;
    dft_all_inplace(out.amplitudes, out.local_dim, out.sites, inverse);
    return out;
}

PureState apply_shift_mask(const PureState& state, const std::vector<int>& k) {
    validate(state);
    check_mask(k, state.local_dim, state.sites, "apply_shift_mask");
    PureState out = state;
    for (std::size_t x = 0; x < state.amplitudes.size(); ++x)
        out.amplitudes[shifted_index(x, state.local_dim, state.sites, k)] = state.amplitudes[x];
    return out;
}

PureState apply_diagonal_phase(const PureState& state, const oracle::TruthTable& table) {
    validate(state);
    check_table_matches(table, state.local_dim, state.sites, "apply_diagonal_phase");
    PureState out = state;
    diagonal_phase_inplace(out.amplitudes, table);
    return out;
}

PureState apply_single_site(const PureState& state, int site, const CMatrix& gate) {
    validate(state);
    check_site_index(state.sites, site);
    const int q = state.local_dim;
    if (gate.rows() != static_cast<std::size_t>(q) || gate.cols() != static_cast<std::size_t>(q))
        throw DomainError("single-site gate must be " + std::to_string(q) + "x" +
                          std::to_string(q));
    PureState out = state;
    const std::size_t stride = site_stride(q, state.sites, site);
    const std::size_t block = stride * static_cast<std::size_t>(q);
    std::vector<cplx> slot(static_cast<std::size_t>(q));
    for (std::size_t base = 0; base < out.amplitudes.size(); base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t at = base + off;
            for (int x = 0; x < q; ++x)
                slot[static_cast<std::size_t>(x)] =
                    out.amplitudes[at + static_cast<std::size_t>(x) * stride];
            for (int y = 0; y < q; ++y) {
                cplx acc{0.0, 0.0};
                for (int x = 0; x < q; ++x)
                    acc += gate(static_cast<std::size_t>(y), static_cast<std::size_t>(x)) *
                           slot[static_cast<std::size_t>(x)];
                out.amplitudes[at + static_cast<std::size_t>(y) * stride] = acc;
            }
        }
    }
    return out;
}

PureState apply_gate(const PureState& state, const GateOp& gate) {
    switch (gate.kind) {
        case GateOp::Kind::DftAll: return apply_dft_all(state, false);
        case GateOp::Kind::DftAllInverse: return apply_dft_all(state, true);
        case GateOp::Kind::PhaseOracle: return apply_diagonal_phase(state, gate.table);
        case GateOp::Kind::ShiftMask: return apply_shift_mask(state, gate.mask);
        case GateOp::Kind::SingleSite: return apply_single_site(state, gate.site, gate.gate);
    }
    throw InternalError("unhandled gate kind");
}

PureState apply_gates(PureState state, const std::vector<GateOp>& gates) {
    for (const auto& g : gates) state = apply_gate(state, g);
    return state;
}

// ---------------------------------------------------------------------------
// expectations

double expectation_site(const PureState& state, int site) {
    if (state.local_dim != 2)
        throw DomainError("expectation_site is defined for q = 2; use expectation_zq_power");
    check_site_index(state.sites, site);
    const std::size_t stride = site_stride(2, state.sites, site);
    double e = 0.0;
    for (std::size_t x = 0; x < state.amplitudes.size(); ++x) {
        const int bit = static_cast<int>(x / stride % 2);
        e += static_cast<double>(2 * bit - 1) * std::norm(state.amplitudes[x]);
    }
    if (testing::expectation_sign_flip()) e = -e;
    return e;
}

cplx expectation_zq_power(const PureState& state, int site, int m) {
    check_site_index(state.sites, site);
    const int q = state.local_dim;
    if (m < 1 || m > q - 1)
        throw DomainError("power " + std::to_string(m) + " out of range 1.." + std::to_string(q - 1));
    const std::size_t stride = site_stride(q, state.sites, site);
    // One accumulator per digit, multiplied by the phase at the end.
    std::vector<double> weight(static_cast<std::size_t>(q), 0.0);
    for (std::size_t x = 0; x < state.amplitudes.size(); ++x)
        weight[x / stride % static_cast<std::size_t>(q)] += std::norm(state.amplitudes[x]);
    cplx e{0.0, 0.0};
    for (int d = 0; d < q; ++d)
        e += omega_power(q, static_cast<long long>(m) * d) * weight[static_cast<std::size_t>(d)];
    return e;
}

cplx mixture_expectation(const MixtureState& mix, int site, int m) {
    cplx e{0.0, 0.0};
    for (const auto& [w, branch] : mix.branches) e += w * expectation_zq_power(branch, site, m);
    return e;
}

double mixture_expectation_site(const MixtureState& mix, int site) {
    double e = 0.0;
    for (const auto& [w, branch] : mix.branches) e += w * expectation_site(branch, site);
    return e;
}

std::vector<double> site_populations(const PureState& state, int site) {
    check_site_index(state.sites, site);
    const int q = state.local_dim;
    const std::size_t stride = site_stride(q, state.sites, site);
    std::vector<double> pop(static_cast<std::size_t>(q), 0.0);
    for (std::size_t x = 0; x < state.amplitudes.size(); ++x)
        pop[x / stride % static_cast<std::size_t>(q)] += std::norm(state.amplitudes[x]);
    return pop;
}

MixtureState thermal_mixture(const ThermalSpec& spec, int n) {
    validate(spec);
    if (spec.sites() != n)
        throw DomainError("thermal spec has " + std::to_string(spec.sites()) + " sites, expected " +
                          std::to_string(n));
    const int q = spec.local_dim;
    const std::size_t dim = checked_dim(q, n, kBranchGuard);

    MixtureState mix;
    mix.local_dim = q;
    mix.sites = n;
    std::vector<int> digits(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < dim; ++k) {
        std::size_t rest = k;
        for (int site = n; site >= 1; --site) {
            digits[static_cast<std::size_t>(site - 1)] =
                static_cast<int>(rest % static_cast<std::size_t>(q));
            rest /= static_cast<std::size_t>(q);
        }
        const double p = spec.branch_probability(digits);
        if (p < 1e-15) continue; // prune negligible branches
        mix.branches.emplace_back(p, PureState::basis_state(q, n, k));
    }
    return mix;
}

// ---------------------------------------------------------------------------
// dense operators

Operator identity_operator(int q, int n) {
    const std::size_t dim = checked_dim(q, n, dense_guard());
    Operator op;
    op.local_dim = q;
    op.sites = n;
    op.matrix = CMatrix::identity(dim);
    return op;
}

Operator dft_all_operator(int q, int n, bool inverse) {
    const std::size_t dim = checked_dim(q, n, dense_guard());
    Operator op;
    op.local_dim = q;
    op.sites = n;
    op.matrix = CMatrix(dim, dim);
    const double scale = std::pow(static_cast<double>(q), -0.5 * n);
    for (std::size_t y = 0; y < dim; ++y) {
        for (std::size_t x = 0; x < dim; ++x) {
            long long phase = 0;
            for (int site = 1; site <= n; ++site)
                phase += static_cast<long long>(digit_at(x, q, n, site)) *
                         digit_at(y, q, n, site);
            op.matrix(y, x) = scale * omega_power(q, inverse ? -phase : phase);
        }
    }
    return op;
}

Operator shift_mask_operator(int q, const std::vector<int>& k) {
    const int n = static_cast<int>(k.size());
    check_mask(k, q, n, "shift_mask_operator");
    const std::size_t dim = checked_dim(q, n, dense_guard());
    Operator op;
    op.local_dim = q;
    op.sites = n;
    op.matrix = CMatrix(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) op.matrix(shifted_index(x, q, n, k), x) = cplx{1.0, 0.0};
    return op;
}

Operator diagonal_phase_operator(const oracle::TruthTable& table) {
    oracle::validate(table);
    const int q = table.local_dim;
    const int n = table.arity;
    const std::size_t dim = checked_dim(q, n, dense_guard());
    Operator op;
    op.local_dim = q;
    op.sites = n;
    op.matrix = CMatrix(dim, dim);
    for (std::size_t x = 0; x < dim; ++x) op.matrix(x, x) = omega_power(q, table.values[x]);
    return op;
}

Operator single_site_operator(int q, int n, int site, const CMatrix& gate) {
    check_site_index(n, site);
    if (gate.rows() != static_cast<std::size_t>(q) || gate.cols() != static_cast<std::size_t>(q))
        throw DomainError("single-site gate must be " + std::to_string(q) + "x" +
                          std::to_string(q));
    const std::size_t dim = checked_dim(q, n, dense_guard());
    Operator op;
    op.local_dim = q;
    op.sites = n;
    op.matrix = CMatrix(dim, dim);
    const std::size_t stride = site_stride(q, n, site);
    for (std::size_t x = 0; x < dim; ++x) {
        const std::size_t dx = x / stride % static_cast<std::size_t>(q);
        const std::size_t base = x - dx * stride;
        for (std::size_t dy = 0; dy < static_cast<std::size_t>(q); ++dy)
            op.matrix(base + dy * stride, x) = gate(dy, dx);
    }
    return op;
}

Operator gate_operator(int q, int n, const GateOp& gate) {
    switch (gate.kind) {
        case GateOp::Kind::DftAll: return dft_all_operator(q, n, false);
        case GateOp::Kind::DftAllInverse: return dft_all_operator(q, n, true);
        case GateOp::Kind::PhaseOracle: {
            check_table_matches(gate.table, q, n, "gate_operator");
            return diagonal_phase_operator(gate.table);
        }
        case GateOp::Kind::ShiftMask: {
            if (static_cast<int>(gate.mask.size()) != n)
                throw DomainError("gate_operator: mask length does not match the site count");
            return shift_mask_operator(q, gate.mask);
        }
        case GateOp::Kind::SingleSite: return single_site_operator(q, n, gate.site, gate.gate);
    }
    throw InternalError("unhandled gate kind");
}

Operator sigma_z_site(int n, int site) {
    check_site_index(n, site);
    const std::size_t dim = checked_dim(2, n, dense_guard());
    Operator op;
    op.local_dim = 2;
    op.sites = n;
    op.matrix = CMatrix(dim, dim);
    const std::size_t stride = site_stride(2, n, site);
    for (std::size_t x = 0; x < dim; ++x)
        op.matrix(x, x) = cplx{static_cast<double>(2 * (x / stride % 2)) - 1.0, 0.0};
    return op;
}

Operator zq_power_site(int q, int n, int site, int m) {
    check_site_index(n, site);
    if (m < 1 || m > q - 1)
        throw DomainError("power " + std::to_string(m) + " out of range 1.." + std::to_string(q - 1));
    const std::size_t dim = checked_dim(q, n, dense_guard());
    Operator op;
    op.local_dim = q;
    op.sites = n;
    op.matrix = CMatrix(dim, dim);
    const std::size_t stride = site_stride(q, n, site);
    for (std::size_t x = 0; x < dim; ++x)
        op.matrix(x, x) =
            omega_power(q, static_cast<long long>(m) *
                               static_cast<long long>(x / stride % static_cast<std::size_t>(q)));
    return op;
}

Operator circuit_matrix(const std::vector<GateOp>& gates, int q, int n) {
    Operator acc = identity_operator(q, n);
    for (const auto& g : gates) acc.matrix = gate_operator(q, n, g).matrix * acc.matrix;
    require_unitary(acc, 1e-10);
    return acc;
}

} // namespace bulkq::qcore
