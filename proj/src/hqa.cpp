#include "bulkq/hqa.hpp"

#include <cmath>
#include <string>

#include "bulkq/errors.hpp"
#include "bulkq/rng.hpp"

namespace bulkq::hqa {

namespace {

void require_square_dim(const CMatrix& m, std::size_t dim, const char* what) {
    if (m.rows() != dim || m.cols() != dim)
        throw DomainError(std::string(what) + " must be " + std::to_string(dim) + "x" +
                          std::to_string(dim));
}

std::vector<int> mask_digits(std::size_t k, int q, int n) {
    std::vector<int> digits(static_cast<std::size_t>(n));
    for (int site = n; site >= 1; --site) {
        digits[static_cast<std::size_t>(site - 1)] = static_cast<int>(k % static_cast<std::size_t>(q));
        k /= static_cast<std::size_t>(q);
    }
    return digits;
}

} // namespace

qcore::KrausChannel bitflip_channel(const qcore::ThermalSpec& spec, int n) {
    qcore::validate(spec);
    if (spec.sites() != n)
        throw DomainError("thermal spec has " + std::to_string(spec.sites()) +
                          " sites, expected " + std::to_string(n));
    const int q = spec.local_dim;
    const std::size_t dim = qcore::checked_dim(q, n, qcore::dense_guard());

    qcore::KrausChannel channel;
    channel.local_dim = q;
    channel.sites = n;
    for (std::size_t k = 0; k < dim; ++k) {
        const std::vector<int> digits = mask_digits(k, q, n);
        const double p = spec.branch_probability(digits);
        if (p <= 0.0) continue;
        CMatrix b = qcore::shift_mask_operator(q, digits).matrix;
        b *= cplx{std::sqrt(p), 0.0};
        channel.operators.push_back(std::move(b));
    }
    qcore::require_complete(channel, 1e-9);
    return channel;
}

qcore::KrausChannel conjugated_channel(const qcore::Operator& u, const qcore::KrausChannel& e) {
    qcore::require_unitary(u, 1e-10);
    if (u.dim() != e.dim()) throw DomainError("circuit and channel dimensions differ");
    qcore::KrausChannel out;
    out.local_dim = e.local_dim;
    out.sites = e.sites;
    const CMatrix u_dag = u.matrix.adjoint();
    out.operators.reserve(e.operators.size());
    for (const auto& a : e.operators) out.operators.push_back(u.matrix * a * u_dag);
    return out;
}

qcore::KrausChannel generalized_channel(const qcore::KrausChannel& v, const qcore::KrausChannel& e,
                                        const qcore::Operator& u) {
    qcore::require_unitary(u, 1e-10);
    if (v.dim() != e.dim() || u.dim() != e.dim())
        throw DomainError("channel and circuit dimensions differ");
    qcore::KrausChannel out;
    out.local_dim = e.local_dim;
    out.sites = e.sites;
    const CMatrix u_dag = u.matrix.adjoint();
    out.operators.reserve(v.operators.size() * e.operators.size());
    for (const auto& vj : v.operators)
        for (const auto& ak : e.operators) out.operators.push_back(vj * ak * u_dag);
    return out;
}

qcore::KrausChannel identity_channel(int q, int n) {
    const std::size_t dim = qcore::checked_dim(q, n, qcore::dense_guard());
    qcore::KrausChannel channel;
    channel.local_dim = q;
    channel.sites = n;
    channel.operators.push_back(CMatrix::identity(dim));
    return channel;
}

qcore::KrausChannel channel_from_unitary(const qcore::Operator& u) {
    qcore::require_unitary(u, 1e-10);
    qcore::KrausChannel channel;
    channel.local_dim = u.local_dim;
    channel.sites = u.sites;
    channel.operators.push_back(u.matrix);
    return channel;
}

qcore::Operator adjoint_apply(const qcore::KrausChannel& f, const qcore::Operator& o) {
    if (f.dim() != o.dim()) throw DomainError("channel and observable dimensions differ");
    qcore::Operator out;
    out.local_dim = o.local_dim;
    out.sites = o.sites;
    out.matrix = CMatrix(o.dim(), o.dim());
    for (const auto& b : f.operators) out.matrix += b.adjoint() * o.matrix * b;
    return out;
}

CMatrix apply_channel(const qcore::KrausChannel& f, const CMatrix& rho) {
    require_square_dim(rho, f.dim(), "the state");
    CMatrix out(f.dim(), f.dim());
    for (const auto& b : f.operators) out += b * rho * b.adjoint();
    return out;
}

ProportionalityReport certify(const qcore::KrausChannel& f,
                              const std::vector<LabeledObservable>& observables,
                              double tolerance) {
    if (observables.empty()) throw DomainError("no observables to certify");
    ProportionalityReport report;
    report.mode = CertifyMode::Adjoint;
    report.tolerance = tolerance;
    report.all_pass = true;
    for (const auto& [label, o] : observables) {
        const double o_norm = o.matrix.frobenius_norm();
        if (o_norm <= 0.0) throw DomainError("observable \"" + label + "\" is zero");
        const qcore::Operator fo = adjoint_apply(f, o);
        // tr(F'(O) O') / tr(O O'); the denominator is ||O||_F^2.
        const cplx c = trace_product(fo.matrix, o.matrix.adjoint()) / (o_norm * o_norm);
        CMatrix delta = fo.matrix;
        delta -= c * o.matrix;
        ObservableResult r;
        r.label = label;
        r.c = c;
        r.residual = delta.frobenius_norm() / o_norm;
        r.pass = r.residual <= tolerance;
        report.all_pass = report.all_pass && r.pass;
        report.observables.push_back(std::move(r));
    }
    return report;
}

ProportionalityReport certify_pointwise(const qcore::KrausChannel& f,
                                        const std::vector<LabeledObservable>& observables,
                                        const std::vector<CMatrix>& states, double tolerance) {
    if (observables.empty()) throw DomainError("no observables to certify");
    if (states.empty()) throw DomainError("no states to certify against");
    for (const auto& rho : states) require_square_dim(rho, f.dim(), "every state");

    // F(rho) once per state, reused across observables.
    std::vector<CMatrix> mapped;
    mapped.reserve(states.size());
    for (const auto& rho : states) mapped.push_back(apply_channel(f, rho));

    ProportionalityReport report;
    report.mode = CertifyMode::Pointwise;
    report.tolerance = tolerance;
    report.all_pass = true;
    for (const auto& [label, o] : observables) {
        if (o.dim() != f.dim()) throw DomainError("channel and observable dimensions differ");
        // Least squares for a in: tr(F(rho) O) = a * tr(rho O) over all rho.
        cplx num{0.0, 0.0};
        double den = 0.0;
        std::vector<cplx> lhs(states.size()), rhs(states.size());
        for (std::size_t r = 0; r < states.size(); ++r) {
            lhs[r] = trace_product(mapped[r], o.matrix);
            rhs[r] = trace_product(states[r], o.matrix);
            num += std::conj(rhs[r]) * lhs[r];
            den += std::norm(rhs[r]);
        }
        if (den <= 1e-24)
            throw DomainError("observable \"" + label +
                              "\" is invisible on every supplied state; the fit is degenerate");
        ObservableResult result;
        result.label = label;
        result.c = num / den;
        for (std::size_t r = 0; r < states.size(); ++r)
            result.residual = std::max(result.residual, std::abs(lhs[r] - result.c * rhs[r]));
        result.pass = result.residual <= tolerance;
        report.all_pass = report.all_pass && result.pass;
        report.observables.push_back(std::move(result));
    }
    return report;
}

std::vector<LabeledObservable> default_observables(int q, int n) {
    std::vector<LabeledObservable> obs;
    if (q == 2) {
        for (int i = 1; i <= n; ++i)
            obs.push_back({"Z" + std::to_string(i), qcore::sigma_z_site(n, i)});
        return obs;
    }
    for (int i = 1; i <= n; ++i)
        for (int m = 1; m < q; ++m)
            obs.push_back({"Z" + std::to_string(i) + "^" + std::to_string(m),
                           qcore::zq_power_site(q, n, i, m)});
    return obs;
}

std::vector<CMatrix> density_basis(int q, int n) {
    const std::size_t dim = qcore::checked_dim(q, n, qcore::dense_guard());
    std::vector<CMatrix> basis;
    basis.reserve(dim * dim);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t k = 0; k < dim; ++k) {
            CMatrix rho(dim, dim);
            if (j == k) {
                rho(j, j) = cplx{1.0, 0.0};
            } else if (j < k) {
                // (|j> + |k>)/sqrt(2) as a pure density.
                rho(j, j) = rho(k, k) = cplx{0.5, 0.0};
                rho(j, k) = rho(k, j) = cplx{0.5, 0.0};
            } else {
                // (|k> + i|j>)/sqrt(2) as a pure density.
                rho(j, j) = rho(k, k) = cplx{0.5, 0.0};
                rho(j, k) = cplx{0.0, 0.5};
                rho(k, j) = cplx{0.0, -0.5};
            }
            basis.push_back(std::move(rho));
        }
    }
    return basis;
}

CMatrix random_density(int q, int n, std::uint64_t seed) {
    const std::size_t dim = qcore::checked_dim(q, n, qcore::dense_guard());
    Rng rng = Rng::derived(seed, 0x0d);
    CMatrix a(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            a(i, j) = cplx{rng.next_gaussian(), rng.next_gaussian()};
    CMatrix rho = a * a.adjoint();
    const cplx t = rho.trace();
    rho *= cplx{1.0, 0.0} / t;
    return rho;
}

qcore::Operator random_unitary(int q, int n, std::uint64_t seed) {
    const std::size_t dim = qcore::checked_dim(q, n, qcore::dense_guard());
    Rng rng = Rng::derived(seed, 0x5e);
    CMatrix a(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            a(i, j) = cplx{rng.next_gaussian(), rng.next_gaussian()};

    // Gram-Schmidt over columns.
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t prev = 0; prev < j; ++prev) {
            cplx overlap{0.0, 0.0};
            for (std::size_t i = 0; i < dim; ++i) overlap += std::conj(a(i, prev)) * a(i, j);
            for (std::size_t i = 0; i < dim; ++i) a(i, j) -= overlap * a(i, prev);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) norm += std::norm(a(i, j));
        norm = std::sqrt(norm);
        if (norm < 1e-12)
            throw InternalError("Gram-Schmidt hit a degenerate column"); // probability ~0
        for (std::size_t i = 0; i < dim; ++i) a(i, j) /= norm;
    }

    qcore::Operator u;
    u.local_dim = q;
    u.sites = n;
    u.matrix = std::move(a);
    qcore::require_unitary(u, 1e-9);
    return u;
}

} // namespace bulkq::hqa
