#include <cmath>
#include <complex>
#include <cstdlib>
#include <vector>

#include "bulkq/errors.hpp"
#include "bulkq/oracle.hpp"
#include "bulkq/qcore.hpp"
#include "bulkq/rng.hpp"
#include "doctest.h"

using namespace bulkq;
using qcore::PureState;
using qcore::ThermalSpec;

namespace {

PureState random_state(int q, int n, std::uint64_t seed) {
    PureState s = PureState::zero_state(q, n);
    Rng rng(seed);
    double norm_sq = 0.0;
    for (auto& a : s.amplitudes) {
        a = cplx(rng.next_gaussian(), rng.next_gaussian());
        norm_sq += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& a : s.amplitudes) a *= inv;
    return s;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("omega powers hit the exact axis points") {
    CHECK(qcore::omega_power(2, 0) == cplx(1.0, 0.0));
    CHECK(qcore::omega_power(2, 1) == cplx(-1.0, 0.0));
    CHECK(qcore::omega_power(4, 1) == cplx(0.0, 1.0));
    CHECK(qcore::omega_power(4, 2) == cplx(-1.0, 0.0));
    CHECK(qcore::omega_power(4, 3) == cplx(0.0, -1.0));
    CHECK(qcore::omega_power(3, 3) == cplx(1.0, 0.0));
    CHECK(qcore::omega_power(3, -1) == qcore::omega_power(3, 2));
    // General point: q = 3, exponent 1 is the principal cube root of unity.
    const cplx w = qcore::omega_power(3, 1);
    CHECK(std::abs(w - cplx(-0.5, std::sqrt(3.0) / 2.0)) <= 1e-15);
}

TEST_CASE("digit_at uses site 1 as the most significant digit") {
    // index 5 = 1*4 + 0*2 + 1 at q = 2, n = 3
    CHECK(qcore::digit_at(5, 2, 3, 1) == 1);
    CHECK(qcore::digit_at(5, 2, 3, 2) == 0);
    CHECK(qcore::digit_at(5, 2, 3, 3) == 1);
    // index 7 = 2*3 + 1 at q = 3, n = 2
    CHECK(qcore::digit_at(7, 3, 2, 1) == 2);
    CHECK(qcore::digit_at(7, 3, 2, 2) == 1);
}

TEST_CASE("checked_dim guards sizes and reports overflow") {
    CHECK(qcore::checked_dim(2, 8, 256) == 256);
    CHECK_THROWS_AS(qcore::checked_dim(2, 9, 256), GuardError);
    CHECK_THROWS_AS(qcore::checked_dim(3, 8, qcore::kStateGuard), GuardError);
}

TEST_CASE("dense guard defaults to 256 when the environment leaves it alone") {
    // The ctest harness never sets BULKQ_DENSE_GUARD for the unit binary;
    // the override path is exercised by the subprocess CLI tests.
    CHECK(qcore::dense_guard() == 256);
    CHECK(std::string(qcore::dense_guard_source()) == "default");
}

TEST_CASE("basis and zero states are unit vectors at the right index") {
    const PureState z = PureState::zero_state(3, 2);
    CHECK(z.dim() == 9);
    CHECK(z.amplitudes[0] == cplx(1.0, 0.0));
    CHECK(qcore::norm_error(z) == 0.0);

    const PureState b = PureState::basis_state(2, 3, {1, 0, 1});
    CHECK(b.amplitudes[5] == cplx(1.0, 0.0));
    CHECK_NOTHROW(qcore::validate(b));

    PureState bad = b;
    bad.amplitudes[0] = cplx(0.5, 0.0);
    CHECK_THROWS_AS(qcore::validate(bad), DomainError);
}

TEST_CASE("the all-site transform is unitary and self-consistent") {
    for (const auto& [q, n] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{5, 1}}) {
        const qcore::Operator f = qcore::dft_all_operator(q, n);
        CHECK(qcore::unitarity_residual(f) <= 1e-12);

        // inverse operator really is the adjoint
        const qcore::Operator fi = qcore::dft_all_operator(q, n, true);
        CHECK(frobenius_distance(fi.matrix, f.matrix.adjoint()) <= 1e-12);

        // fast in-place path matches the dense matrix on a random state
        const PureState s = random_state(q, n, 0x9a00 + static_cast<std::uint64_t>(q));
        const PureState via_gate = qcore::apply_dft_all(s);
        const PureState via_dense = [&] {
            PureState out = s;
            out.amplitudes = apply_matrix(f.matrix, s.amplitudes);
            return out;
        }();
        CHECK(max_diff(via_gate.amplitudes, via_dense.amplitudes) <= 1e-12);

        // round trip is the identity
        const PureState back = qcore::apply_dft_all(via_gate, true);
        CHECK(max_diff(back.amplitudes, s.amplitudes) <= 1e-12);
    }
}

TEST_CASE("transform conjugation turns shifts into phases") {
    // F X F^-1 = Z (omega^y phase) and F^-1 X F = Z^-1, for q = 2 and 3.
    for (const int q : {2, 3}) {
        const qcore::Operator f = qcore::dft_all_operator(q, 1);
        const qcore::Operator fi = qcore::dft_all_operator(q, 1, true);
        const qcore::Operator x = qcore::shift_mask_operator(q, {1});

        CMatrix z(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
        CMatrix z_inv(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
        for (int y = 0; y < q; ++y) {
            z(static_cast<std::size_t>(y), static_cast<std::size_t>(y)) = qcore::omega_power(q, y);
            z_inv(static_cast<std::size_t>(y), static_cast<std::size_t>(y)) =
                qcore::omega_power(q, -y);
        }

        CHECK(frobenius_distance(f.matrix * x.matrix * fi.matrix, z) <= 1e-12);
        CHECK(frobenius_distance(fi.matrix * x.matrix * f.matrix, z_inv) <= 1e-12);
    }
}

TEST_CASE("shift and phase operators satisfy the Weyl relation") {
    // X' Z^m X = omega^m Z^m; this is what makes the shift channel's
    // certification constant a root-of-unity average.
    for (const int q : {2, 3, 5}) {
        for (int m = 1; m < q; ++m) {
            const qcore::Operator x = qcore::shift_mask_operator(q, {1});
            const qcore::Operator zm = qcore::zq_power_site(q, 1, 1, m);
            const CMatrix lhs = x.matrix.adjoint() * zm.matrix * x.matrix;
            CMatrix rhs = zm.matrix;
            rhs *= qcore::omega_power(q, m);
            CHECK(frobenius_distance(lhs, rhs) <= 1e-12);
        }
    }
}

TEST_CASE("shift mask moves basis states digit-wise") {
    const PureState s = PureState::basis_state(3, 2, {2, 1});
    const PureState t = qcore::apply_shift_mask(s, {2, 2});
    // (2+2, 1+2) mod 3 = (1, 0) -> index 3
    CHECK(std::abs(t.amplitudes[3] - cplx(1.0, 0.0)) == 0.0);

    const qcore::Operator op = qcore::shift_mask_operator(3, {2, 2});
    CHECK(max_diff(t.amplitudes, apply_matrix(op.matrix, s.amplitudes)) == 0.0);
    CHECK_THROWS_AS(qcore::apply_shift_mask(s, {1}), DomainError);
}

TEST_CASE("diagonal phase multiplies each amplitude by omega^f(x)") {
    const oracle::TruthTable table = oracle::inner_product_table({1, 1}, 2, 2);
    PureState s = random_state(2, 2, 0xfeed);
    const PureState t = qcore::apply_diagonal_phase(s, table);
    for (std::size_t x = 0; x < 4; ++x) {
        const cplx expect = s.amplitudes[x] * (table.values[x] ? -1.0 : 1.0);
        CHECK(std::abs(t.amplitudes[x] - expect) == 0.0);
    }
    const qcore::Operator op = qcore::diagonal_phase_operator(table);
    CHECK(max_diff(t.amplitudes, apply_matrix(op.matrix, s.amplitudes)) == 0.0);
}

TEST_CASE("single-site gates agree with their dense embedding") {
    CMatrix g(2, 2); // a lopsided unitary: exp(i*0.3) rotation
    const double c = std::cos(0.3), s = std::sin(0.3);
    g(0, 0) = c;
    g(0, 1) = -s;
    g(1, 0) = s;
    g(1, 1) = c;

    const PureState in = random_state(2, 3, 0xbead);
    for (int site = 1; site <= 3; ++site) {
        const PureState fast = qcore::apply_single_site(in, site, g);
        const qcore::Operator dense = qcore::single_site_operator(2, 3, site, g);
        CHECK(max_diff(fast.amplitudes, apply_matrix(dense.matrix, in.amplitudes)) <= 1e-14);
    }
    CHECK_THROWS_AS(qcore::apply_single_site(in, 4, g), DomainError);
}

TEST_CASE("norm is preserved by every gate kind") {
    PureState s = random_state(3, 2, 0x777);
    const oracle::TruthTable table = oracle::random_table(3, 2, 21);
    s = qcore::apply_gates(std::move(s), {qcore::GateOp::dft_all(),
                                          qcore::GateOp::phase_oracle(table),
                                          qcore::GateOp::shift_mask({1, 2}),
                                          qcore::GateOp::dft_all_inverse()});
    CHECK(qcore::norm_error(s) <= 1e-12);
}

TEST_CASE("site expectations follow the (2x-1) eigenvalue convention") {
    // |0> carries eigenvalue -1: the ensemble signal of a constant oracle.
    const PureState zero = PureState::zero_state(2, 2);
    CHECK(qcore::expectation_site(zero, 1) == -1.0);
    CHECK(qcore::expectation_site(zero, 2) == -1.0);

    const PureState one = PureState::basis_state(2, 2, {1, 0});
    CHECK(qcore::expectation_site(one, 1) == 1.0);
    CHECK(qcore::expectation_site(one, 2) == -1.0);

    // qudit grid on a basis state: <Z_q^m> = omega^(m x_i)
    const PureState qs = PureState::basis_state(3, 2, {2, 1});
    for (int m = 1; m <= 2; ++m) {
        CHECK(std::abs(qcore::expectation_zq_power(qs, 1, m) - qcore::omega_power(3, 2 * m)) <=
              1e-15);
        CHECK(std::abs(qcore::expectation_zq_power(qs, 2, m) - qcore::omega_power(3, m)) <= 1e-15);
    }

    CHECK_THROWS_AS(qcore::expectation_site(qs, 1), DomainError);   // q = 2 only
    CHECK_THROWS_AS(qcore::expectation_zq_power(qs, 1, 3), DomainError); // m out of range
}

TEST_CASE("site populations sum to one and match basis weights") {
    const PureState s = random_state(3, 2, 0x5150);
    for (int site = 1; site <= 2; ++site) {
        const std::vector<double> pops = qcore::site_populations(s, site);
        REQUIRE(pops.size() == 3);
        double total = 0.0;
        for (const double p : pops) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("thermal specs validate their distributions") {
    const ThermalSpec spec = ThermalSpec::qubit({0.9, 0.6});
    CHECK(spec.sites() == 2);
    CHECK(spec.ground_probability(1) == 0.9);
    CHECK(spec.min_ground_probability() == 0.6);
    CHECK(std::abs(spec.branch_probability({0, 1}) - 0.9 * 0.4) <= 1e-15);

    ThermalSpec bad = spec;
    bad.site_distributions[0] = {0.7, 0.7};
    CHECK_THROWS_AS(qcore::validate(bad), DomainError);
    bad.site_distributions[0] = {1.2, -0.2};
    CHECK_THROWS_AS(qcore::validate(bad), DomainError);

    const ThermalSpec pure = ThermalSpec::pure(3, 2);
    CHECK(pure.min_ground_probability() == 1.0);
    CHECK(pure.branch_probability({0, 0}) == 1.0);
    CHECK(pure.branch_probability({1, 0}) == 0.0);
}

TEST_CASE("thermal mixtures enumerate product branches") {
    const ThermalSpec spec = ThermalSpec::qubit({0.75, 0.5});
    const qcore::MixtureState mix = qcore::thermal_mixture(spec, 2);
    REQUIRE(mix.branches.size() == 4);
    double total = 0.0;
    for (const auto& [p, state] : mix.branches) total += p;
    CHECK(std::abs(total - 1.0) <= 1e-12);

    // pure sites prune to a single branch
    const qcore::MixtureState pure = qcore::thermal_mixture(ThermalSpec::pure(2, 3), 3);
    REQUIRE(pure.branches.size() == 1);
    CHECK(pure.branches[0].first == 1.0);

    // branch expectations average correctly: q = 0.75 gives <Z> = -(2q-1)
    CHECK(std::abs(qcore::mixture_expectation_site(mix, 1) - (-0.5)) <= 1e-12);
    CHECK(std::abs(qcore::mixture_expectation_site(mix, 2) - 0.0) <= 1e-12);
}

TEST_CASE("circuit_matrix composes gates in execution order") {
    // A constant oracle's pipeline is a global sign: H U_c H = (-1)^c I.
    for (const int c : {0, 1}) {
        const oracle::TruthTable table = oracle::constant_table(2, 2, c);
        const qcore::Operator u = qcore::circuit_matrix(qcore::dj_gates(table), 2, 2);
        CMatrix expect = CMatrix::identity(4);
        expect *= (c ? -1.0 : 1.0);
        CHECK(frobenius_distance(u.matrix, expect) <= 1e-12);
    }

    // Order matters: shift-then-phase vs phase-then-shift differ.
    const oracle::TruthTable t = oracle::inner_product_table({1}, 2, 1);
    const qcore::Operator a = qcore::circuit_matrix(
        {qcore::GateOp::shift_mask({1}), qcore::GateOp::phase_oracle(t)}, 2, 1);
    const qcore::Operator b = qcore::circuit_matrix(
        {qcore::GateOp::phase_oracle(t), qcore::GateOp::shift_mask({1})}, 2, 1);
    CHECK(frobenius_distance(a.matrix, b.matrix) > 1.0);
}

TEST_CASE("kraus completeness residual flags sub-normalized channels") {
    qcore::KrausChannel ch;
    ch.local_dim = 2;
    ch.sites = 1;
    CMatrix half = CMatrix::identity(2);
    half *= std::sqrt(0.5);
    ch.operators = {half};
    CHECK(qcore::completeness_residual(ch) > 0.1);
    CHECK_THROWS_AS(qcore::require_complete(ch, 1e-9), DomainError);

    ch.operators = {half, half};
    CHECK(qcore::completeness_residual(ch) <= 1e-12);
}

TEST_CASE("deterministic rng reproduces and separates streams") {
    Rng a(7), b(7);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());

    CHECK(Rng::mix(1, 0) != Rng::mix(1, 1));
    CHECK(Rng::mix(1, 0) != Rng::mix(2, 0));

    Rng c(7);
    for (int i = 0; i < 1000; ++i) {
        const double d = c.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        CHECK(c.next_index(10) < 10);
    }
}
