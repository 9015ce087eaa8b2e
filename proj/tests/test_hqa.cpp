#include <cmath>
#include <complex>
#include <vector>

#include "bulkq/errors.hpp"
#include "bulkq/hqa.hpp"
#include "bulkq/oracle.hpp"
#include "bulkq/qcore.hpp"
#include "doctest.h"

using namespace bulkq;
using qcore::ThermalSpec;

namespace {

qcore::KrausChannel dj_error_channel(const oracle::TruthTable& table,
                                     const ThermalSpec& spec) {
    const qcore::Operator u =
        qcore::circuit_matrix(qcore::dj_gates(table), table.local_dim, table.arity);
    return hqa::conjugated_channel(u, hqa::bitflip_channel(spec, table.arity));
}

} // namespace

TEST_CASE("bitflip channels are trace preserving with product weights") {
    const ThermalSpec spec = ThermalSpec::qubit({0.8, 0.6});
    const qcore::KrausChannel e = hqa::bitflip_channel(spec, 2);
    CHECK(e.operators.size() == 4); // every mask has positive weight
    CHECK(qcore::completeness_residual(e) <= 1e-12);

    // pure sites drop their flip components
    const qcore::KrausChannel pure = hqa::bitflip_channel(ThermalSpec::qubit({1.0, 0.6}), 2);
    CHECK(pure.operators.size() == 2);
    CHECK(qcore::completeness_residual(pure) <= 1e-12);
}

TEST_CASE("channel conjugation preserves completeness") {
    const oracle::TruthTable t = oracle::sample_balanced(2, 5);
    const ThermalSpec spec = ThermalSpec::qubit({0.8, 0.6});
    const qcore::KrausChannel f = dj_error_channel(t, spec);
    CHECK(qcore::completeness_residual(f) <= 1e-9);

    // and the Schrodinger action keeps traces
    const CMatrix rho = hqa::random_density(2, 2, 99);
    const CMatrix out = hqa::apply_channel(f, rho);
    CHECK(std::abs(out.trace() - cplx(1.0, 0.0)) <= 1e-10);
}

TEST_CASE("certifier: DJ circuits scale Z_i by exactly 2q_i - 1") {
    const ThermalSpec spec = ThermalSpec::qubit({0.8, 0.6});
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        const oracle::TruthTable t = oracle::sample_balanced(2, seed);
        const hqa::ProportionalityReport rep =
            hqa::certify(dj_error_channel(t, spec), hqa::default_observables(2, 2), 1e-9);
        CHECK(rep.all_pass);
        REQUIRE(rep.observables.size() == 2);
        CHECK(std::abs(rep.observables[0].c - cplx(0.6, 0.0)) <= 1e-9);
        CHECK(std::abs(rep.observables[1].c - cplx(0.2, 0.0)) <= 1e-9);
        for (const auto& o : rep.observables) CHECK(o.residual <= 1e-12);
    }

    // maximally mixed inputs kill the signal: c = 0 within 1e-12
    const ThermalSpec mixed = ThermalSpec::uniform_qubit(0.5, 2);
    const oracle::TruthTable t = oracle::sample_balanced(2, 3);
    const hqa::ProportionalityReport rep =
        hqa::certify(dj_error_channel(t, mixed), hqa::default_observables(2, 2), 1e-9);
    for (const auto& o : rep.observables) {
        CHECK(std::abs(o.c) <= 1e-12);
        CHECK(o.residual <= 1e-12);
    }
}

TEST_CASE("certifier negative control: random circuits break proportionality") {
    const ThermalSpec spec = ThermalSpec::qubit({0.8, 0.6});
    const qcore::Operator u = hqa::random_unitary(2, 2, 0xbad);
    const qcore::KrausChannel f = hqa::conjugated_channel(u, hqa::bitflip_channel(spec, 2));
    const hqa::ProportionalityReport rep =
        hqa::certify(f, hqa::default_observables(2, 2), 1e-9);
    CHECK(!rep.all_pass);
    double worst = 0.0;
    for (const auto& o : rep.observables) worst = std::max(worst, o.residual);
    CHECK(worst > 0.1); // far beyond tolerance, not a numerical near-miss
}

TEST_CASE("adjoint and pointwise certification agree") {
    const ThermalSpec spec = ThermalSpec::qubit({0.9, 0.7});
    const oracle::TruthTable t = oracle::sample_balanced(2, 11);
    const qcore::KrausChannel f = dj_error_channel(t, spec);
    const std::vector<hqa::LabeledObservable> obs = hqa::default_observables(2, 2);

    const hqa::ProportionalityReport adj = hqa::certify(f, obs, 1e-9);
    const hqa::ProportionalityReport pw =
        hqa::certify_pointwise(f, obs, hqa::density_basis(2, 2), 1e-9);
    CHECK(pw.all_pass);
    REQUIRE(adj.observables.size() == pw.observables.size());
    for (std::size_t i = 0; i < adj.observables.size(); ++i)
        CHECK(std::abs(adj.observables[i].c - pw.observables[i].c) <= 1e-9);

    // seeded random densities work as probe states too
    std::vector<CMatrix> probes;
    for (std::uint64_t s = 0; s < 6; ++s) probes.push_back(hqa::random_density(2, 2, s));
    const hqa::ProportionalityReport pw2 = hqa::certify_pointwise(f, obs, probes, 1e-9);
    for (std::size_t i = 0; i < pw2.observables.size(); ++i)
        CHECK(std::abs(pw2.observables[i].c - adj.observables[i].c) <= 1e-9);
}

TEST_CASE("pointwise certification rejects invisible observables") {
    // Every probe state has tr(rho X) = 0, so the least-squares fit for X is
    // degenerate and must be refused rather than reported as c = 0.
    const qcore::KrausChannel id = hqa::identity_channel(2, 1);
    std::vector<hqa::LabeledObservable> obs;
    obs.push_back({"X1", qcore::shift_mask_operator(2, {1})});
    CMatrix zero_density(2, 2);
    zero_density(0, 0) = 1.0;
    CHECK_THROWS_AS(hqa::certify_pointwise(id, obs, {zero_density}, 1e-9), DomainError);
}

TEST_CASE("qudit shift channels: c is the root-of-unity average") {
    // Defect distribution r over shifts; conjugating the identity circuit
    // leaves E itself, whose action on Z_q^m has c(m) = sum_j r_j omega^(mj).
    qcore::ThermalSpec spec;
    spec.local_dim = 3;
    spec.site_distributions = {{0.6, 0.3, 0.1}};
    const qcore::KrausChannel e = hqa::bitflip_channel(spec, 1);
    const hqa::ProportionalityReport rep =
        hqa::certify(e, hqa::default_observables(3, 1), 1e-9);
    CHECK(rep.all_pass);
    REQUIRE(rep.observables.size() == 2);
    for (int m = 1; m <= 2; ++m) {
        cplx expect{0.0, 0.0};
        for (int j = 0; j < 3; ++j)
            expect += spec.site_distributions[0][static_cast<std::size_t>(j)] *
                      qcore::omega_power(3, m * j);
        CHECK(std::abs(rep.observables[static_cast<std::size_t>(m - 1)].c - expect) <= 1e-9);
    }

    // uniform distribution: the average of all cube roots of unity vanishes
    qcore::ThermalSpec uniform;
    uniform.local_dim = 3;
    uniform.site_distributions = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    const hqa::ProportionalityReport flat =
        hqa::certify(hqa::bitflip_channel(uniform, 1), hqa::default_observables(3, 1), 1e-9);
    for (const auto& o : flat.observables) CHECK(std::abs(o.c) <= 1e-12);
}

TEST_CASE("density and unitary generators produce valid objects") {
    const CMatrix rho = hqa::random_density(2, 2, 4);
    CHECK(std::abs(rho.trace() - cplx(1.0, 0.0)) <= 1e-12);
    CHECK(frobenius_distance(rho, rho.adjoint()) <= 1e-12);
    // purity of a full-rank random density sits strictly inside (1/d, 1)
    const double purity = trace_product(rho, rho).real();
    CHECK(purity > 0.25);
    CHECK(purity < 1.0);

    const qcore::Operator u = hqa::random_unitary(3, 1, 12);
    CHECK(qcore::unitarity_residual(u) <= 1e-9);
    CHECK(u.matrix.rows() == 3);

    // the whole density basis is trace-one and spans q^2n elements
    const std::vector<CMatrix> basis = hqa::density_basis(2, 1);
    CHECK(basis.size() == 4);
    for (const auto& b : basis) {
        CHECK(std::abs(b.trace() - cplx(1.0, 0.0)) <= 1e-12);
        CHECK(frobenius_distance(b, b.adjoint()) <= 1e-12);
    }
}
