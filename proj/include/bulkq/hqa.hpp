#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bulkq/qcore.hpp"

// The hot-input certifier: builds the initial-error channel E, its circuit
// conjugation F, and tests the observable-proportionality condition
// F'(O) = c O through adjoint-channel algebra.
namespace bulkq::hqa {

enum class CertifyMode { Adjoint, Pointwise };

struct ObservableResult {
    std::string label;
    cplx c{0.0, 0.0};
    double residual = 0.0;
    bool pass = false;
};

struct ProportionalityReport {
    CertifyMode mode = CertifyMode::Adjoint;
    double tolerance = 1e-9;
    std::vector<ObservableResult> observables;
    bool all_pass = false;
};

struct LabeledObservable {
    std::string label;
    qcore::Operator op;
};

// Kraus set {sqrt(p_k) X^k} over all masks k with p_k > 0.
qcore::KrausChannel bitflip_channel(const qcore::ThermalSpec& spec, int n);

// Kraus set {U A_k U'}: realizes F with U o E = F o U.
qcore::KrausChannel conjugated_channel(const qcore::Operator& u, const qcore::KrausChannel& e);

// Kraus set {V_j A_k U'}: realizes F = V o E o U^-1.
qcore::KrausChannel generalized_channel(const qcore::KrausChannel& v, const qcore::KrausChannel& e,
                                        const qcore::Operator& u);

qcore::KrausChannel identity_channel(int q, int n);
qcore::KrausChannel channel_from_unitary(const qcore::Operator& u);

// Heisenberg action sum_k B_k' O B_k.
qcore::Operator adjoint_apply(const qcore::KrausChannel& f, const qcore::Operator& o);

// Schrodinger action sum_k B_k rho B_k'.
CMatrix apply_channel(const qcore::KrausChannel& f, const CMatrix& rho);

// For each observable O: c = tr(F'(O) O') / tr(O O'), residual
// ||F'(O) - c O||_F / ||O||_F, pass iff residual <= tolerance. Equivalent to
// requiring E(F(rho)) = c E(rho) for every rho.
ProportionalityReport certify(const qcore::KrausChannel& f,
                              const std::vector<LabeledObservable>& observables,
                              double tolerance = 1e-9);

// Least-squares fit of one c per observable over the supplied density
// operators; reports the max pointwise residual |tr(F(rho)O) - c tr(rho O)|.
// A fit with all tr(rho O) = 0 is degenerate and throws DomainError.
ProportionalityReport certify_pointwise(const qcore::KrausChannel& f,
                                        const std::vector<LabeledObservable>& observables,
                                        const std::vector<CMatrix>& states,
                                        double tolerance = 1e-9);

// Per-site Z observables: sigma_z (q = 2, (2x-1) convention) or the Z_q^m
// grid for qudits.
std::vector<LabeledObservable> default_observables(int q, int n);

// q^2n valid density operators spanning the Hermitian operator space.
std::vector<CMatrix> density_basis(int q, int n);

// rho = A A' / tr(A A') with Gaussian A; valid and full rank.
CMatrix random_density(int q, int n, std::uint64_t seed);

// Haar-style random unitary from Gram-Schmidt on a Gaussian matrix.
qcore::Operator random_unitary(int q, int n, std::uint64_t seed);

} // namespace bulkq::hqa
