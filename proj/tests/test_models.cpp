#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "bulkq/errors.hpp"
#include "bulkq/models.hpp"
#include "bulkq/oracle.hpp"
#include "bulkq/qcore.hpp"
#include "bulkq/rng.hpp"
#include "doctest.h"

using namespace bulkq;
using models::ModelKind;
using oracle::TruthTable;
using qcore::ThermalSpec;

namespace {

// Test-local spectrum: g(y) = 2^-n sum_x (-1)^(f(x) xor x.y), written
// independently of the library's accumulation strategy.
double g_component(const TruthTable& t, std::size_t y) {
    double acc = 0.0;
    const std::size_t dim = t.values.size();
    for (std::size_t x = 0; x < dim; ++x) {
        int bits = t.values[x];
        std::size_t overlap = x & y;
        while (overlap) {
            bits ^= static_cast<int>(overlap & 1);
            overlap >>= 1;
        }
        acc += bits ? -1.0 : 1.0;
    }
    return acc / static_cast<double>(dim);
}

} // namespace

TEST_CASE("the output spectrum matches the direct sign sum") {
    for (const std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
        const TruthTable t = oracle::sample_balanced(3, seed);
        const std::vector<double> spec = models::dj_spectrum(t);
        REQUIRE(spec.size() == 8);
        double total = 0.0;
        for (std::size_t y = 0; y < 8; ++y) {
            const double g = g_component(t, y);
            CHECK(std::abs(spec[y] - g * g) <= 1e-14);
            total += spec[y];
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
        CHECK(spec[0] <= 1e-14); // balanced: zero weight on y = 0
    }

    const std::vector<double> point = models::dj_spectrum(oracle::constant_table(2, 3, 1));
    CHECK(point[0] == 1.0);
    for (std::size_t y = 1; y < 8; ++y) CHECK(point[y] == 0.0);
}

TEST_CASE("pure ensemble signals: constant pins every site at -1") {
    const models::SignalReport r =
        models::run_dj(ModelKind::BQC_P, oracle::constant_table(2, 4, 0));
    REQUIRE(r.e_site.size() == 4);
    for (const double e : r.e_site) CHECK(std::abs(e - (-1.0)) <= 1e-12);
    CHECK(r.promise == oracle::PromiseClass::Constant);

    // inner-product table: the register ends in |y>, so E_i = 2 y_i - 1
    const models::SignalReport ip =
        models::run_dj(ModelKind::BQC_P, oracle::inner_product_table({1, 0, 1, 1}, 2, 4));
    const std::vector<double> expect = {1.0, -1.0, 1.0, 1.0};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(ip.e_site[i] - expect[i]) <= 1e-12);
}

TEST_CASE("single-shot sampling respects the promise dichotomy") {
    const TruthTable bal = oracle::sample_balanced(3, 77);
    const TruthTable con = oracle::constant_table(2, 3, 1);
    for (std::uint64_t shot = 0; shot < 200; ++shot) {
        const models::SignalReport rb = models::run_dj(ModelKind::SQC, bal, std::nullopt, shot);
        REQUIRE(rb.outcome.has_value());
        const auto& digits = *rb.outcome;
        CHECK(std::accumulate(digits.begin(), digits.end(), 0) > 0); // never all zero
        // single-shot site readings are the sampled eigenvalues
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(rb.e_site[i] == (digits[i] ? 1.0 : -1.0));

        const models::SignalReport rc = models::run_dj(ModelKind::SQC, con, std::nullopt, shot);
        CHECK(*rc.outcome == std::vector<int>{0, 0, 0});
    }
    // same seed, same outcome
    const models::SignalReport a = models::run_dj(ModelKind::SQC, bal, std::nullopt, 5);
    const models::SignalReport b = models::run_dj(ModelKind::SQC, bal, std::nullopt, 5);
    CHECK(*a.outcome == *b.outcome);
}

TEST_CASE("model preconditions: thermal specs only where they belong") {
    const TruthTable t = oracle::sample_balanced(2, 1);
    const ThermalSpec spec = ThermalSpec::uniform_qubit(0.8, 2);
    CHECK_THROWS_AS(models::run_dj(ModelKind::SQC, t, spec), DomainError);
    CHECK_THROWS_AS(models::run_dj(ModelKind::BQC_P, t, spec), DomainError);
    CHECK_THROWS_AS(models::run_dj(ModelKind::BQC, t), DomainError);
    CHECK_THROWS_AS(models::run_dj(ModelKind::BQC, t, ThermalSpec::uniform_qubit(0.8, 3)),
                    DomainError);
}

TEST_CASE("thermal attenuation: E_i scales by 2q_i - 1 site by site") {
    const TruthTable t = oracle::sample_balanced(3, 42);
    const models::SignalReport pure = models::run_dj(ModelKind::BQC_P, t);
    const ThermalSpec spec = ThermalSpec::qubit({0.95, 0.7, 0.55});
    const models::SignalReport hot = models::run_dj(ModelKind::BQC, t, spec);
    for (int i = 0; i < 3; ++i) {
        const double scale = 2.0 * spec.ground_probability(i + 1) - 1.0;
        CHECK(std::abs(hot.e_site[i] - scale * pure.e_site[i]) <= 1e-12);
    }
}

TEST_CASE("mixture enumeration is independent of the thread count") {
    const TruthTable t = oracle::sample_balanced(4, 9);
    const ThermalSpec spec = ThermalSpec::uniform_qubit(0.77, 4);
    const models::SignalReport one = models::run_dj(ModelKind::BQC, t, spec, 0, 1);
    const models::SignalReport four = models::run_dj(ModelKind::BQC, t, spec, 0, 4);
    REQUIRE(one.e_site.size() == four.e_site.size());
    for (std::size_t i = 0; i < one.e_site.size(); ++i)
        CHECK(one.e_site[i] == four.e_site[i]); // bit-for-bit equal
}

TEST_CASE("the promise decision uses the worst-case midpoint threshold") {
    const ThermalSpec spec = ThermalSpec::uniform_qubit(0.8, 2);

    const models::SignalReport con =
        models::run_dj(ModelKind::BQC, oracle::constant_table(2, 2, 0), spec);
    const models::Decision dc = models::decide_dj(con);
    CHECK(dc.verdict == oracle::PromiseClass::Constant);
    CHECK(!dc.witness_site.has_value());
    CHECK(dc.margin < 0.0);

    const models::SignalReport bal =
        models::run_dj(ModelKind::BQC, oracle::inner_product_table({0, 1}, 2, 2), spec);
    const models::Decision db = models::decide_dj(bal);
    CHECK(db.verdict == oracle::PromiseClass::Balanced);
    REQUIRE(db.witness_site.has_value());
    CHECK(*db.witness_site == 2); // site 2 carries the +(2q-1) signal
    CHECK(db.margin > 0.0);

    // Degenerate polarization has no decision threshold.
    models::SignalReport flat = con;
    flat.thermal = ThermalSpec::uniform_qubit(0.5, 2);
    CHECK_THROWS_AS(models::decide_dj(flat), DomainError);
}

TEST_CASE("parity recovery is exact in one query") {
    const std::vector<int> y = {1, 0, 1, 1, 0};
    const models::ParityResult pure = models::run_parity(ModelKind::BQC_P, y);
    CHECK(pure.y_hat == y);
    for (const double m : pure.margins) CHECK(std::abs(m - 1.0) <= 1e-12);

    const ThermalSpec spec = ThermalSpec::qubit({0.9, 0.8, 0.7, 0.65, 0.6});
    const models::ParityResult hot = models::run_parity(ModelKind::BQC, y, spec);
    CHECK(hot.y_hat == y);
    for (int i = 0; i < 5; ++i) {
        const double expect = 2.0 * spec.ground_probability(i + 1) - 1.0;
        CHECK(std::abs(hot.margins[i] - expect) <= 1e-12);
    }

    // A maximally mixed site erases its bit; opting in reports the site.
    const ThermalSpec degenerate = ThermalSpec::qubit({0.9, 0.5, 0.7, 0.65, 0.6});
    CHECK_THROWS_AS(models::run_parity(ModelKind::BQC, y, degenerate), DomainError);
    const models::ParityResult forced =
        models::run_parity(ModelKind::BQC, y, degenerate, 0, true);
    CHECK(forced.degenerate_sites == std::vector<int>{2});
    CHECK(std::abs(forced.margins[1]) <= 1e-12);
}

TEST_CASE("thermal ancilla: full pickup at p1 = 1, half gap at p1 = 1/2") {
    const TruthTable t = oracle::sample_balanced(3, 123);
    const TruthTable c = oracle::constant_table(2, 3, 0);
    const ThermalSpec spec = ThermalSpec::qubit({0.9, 0.8, 0.7});

    // p1 = 1 reproduces the ideal phase-oracle pipeline exactly
    const models::SignalReport ideal = models::run_dj(ModelKind::BQC, t, spec);
    const models::SignalReport kicked = models::run_dj_thermal_ancilla(t, spec, 1.0);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(kicked.e_site[i] - ideal.e_site[i]) <= 1e-12);

    // the constant signal never depends on the ancilla temperature
    for (const double p1 : {0.0, 0.25, 0.5, 1.0}) {
        const models::SignalReport rc = models::run_dj_thermal_ancilla(c, spec, p1);
        for (int i = 0; i < 3; ++i) {
            const double expect = -(2.0 * spec.ground_probability(i + 1) - 1.0);
            CHECK(std::abs(rc.e_site[i] - expect) <= 1e-12);
        }
    }

    // the balanced-vs-constant gap scales linearly in p1
    const models::SignalReport bal_half = models::run_dj_thermal_ancilla(t, spec, 0.5);
    const models::SignalReport bal_full = models::run_dj_thermal_ancilla(t, spec, 1.0);
    const models::SignalReport con_any = models::run_dj_thermal_ancilla(c, spec, 0.5);
    for (int i = 0; i < 3; ++i) {
        const double gap_half = bal_half.e_site[i] - con_any.e_site[i];
        const double gap_full = bal_full.e_site[i] - con_any.e_site[i];
        CHECK(std::abs(gap_half - 0.5 * gap_full) <= 1e-12);
    }

    CHECK_THROWS_AS(models::run_dj_thermal_ancilla(t, spec, 1.5), DomainError);
}

TEST_CASE("qudit parity lands exactly on |y> for prime q") {
    for (const int q : {3, 5}) {
        const std::vector<int> y = {q - 1, 1};
        const models::QuditParityResult r = models::run_qudit_parity(y, q, 2);
        CHECK(r.y_hat == y);
        // the winning population is exactly 1
        CHECK(std::abs(r.site_populations[0][static_cast<std::size_t>(y[0])] - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(models::run_qudit_parity({1, 1}, 4, 2), DomainError); // q must be prime

    // thermal inputs attenuate but do not move the argmax
    qcore::ThermalSpec spec;
    spec.local_dim = 3;
    spec.site_distributions = {{0.8, 0.1, 0.1}, {0.7, 0.2, 0.1}};
    const models::QuditParityResult hot = models::run_qudit_parity({2, 1}, 3, 2, spec);
    CHECK(hot.y_hat == std::vector<int>{2, 1});
}

TEST_CASE("readout noise: deterministic per seed, std halves when m quadruples") {
    models::SignalReport base;
    base.model = ModelKind::BQC_P;
    base.local_dim = 2;
    base.sites = 1;
    base.e_site = {0.0};

    models::NoiseConfig noise;
    noise.sigma_read = 1.0;
    noise.repetitions = 1;
    noise.seed = 31;
    const models::SignalReport n1 = models::simulate_readout(base, noise);
    const models::SignalReport n2 = models::simulate_readout(base, noise);
    CHECK(n1.e_site[0] == n2.e_site[0]);
    CHECK(n1.e_site[0] != 0.0);

    auto sample_std = [&](long long reps) {
        const int trials = 100000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < trials; ++i) {
            models::NoiseConfig cfg;
            cfg.sigma_read = 1.0;
            cfg.repetitions = reps;
            cfg.seed = Rng::mix(0xabc, static_cast<std::uint64_t>(i));
            const double v = models::simulate_readout(base, cfg).e_site[0];
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / trials;
        return std::sqrt(sum_sq / trials - mean * mean);
    };
    const double ratio = sample_std(1) / sample_std(4);
    CHECK(ratio > 2.0 * 0.95);
    CHECK(ratio < 2.0 * 1.05);

    noise.sigma_read = 0.0;
    const models::SignalReport clean = models::simulate_readout(base, noise);
    CHECK(clean.e_site[0] == 0.0);
}

TEST_CASE("repetition estimates follow the quadratic amplification law") {
    CHECK(models::estimate_repetitions(10, 1.0, 1.0, 2.0) == 400);
    CHECK(models::estimate_repetitions(3, 0.9, 0.0, 2.0) == 1);

    // dyadic parameters keep the ratio integral: exact quadrupling
    const long long m4 = models::estimate_repetitions(4, 0.75, 0.5, 2.0);
    const long long m8 = models::estimate_repetitions(8, 0.75, 0.5, 2.0);
    CHECK(m4 == 64);
    CHECK(m8 == 4 * m4);

    CHECK_THROWS_AS(models::estimate_repetitions(4, 0.5, 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(models::estimate_repetitions(0, 0.9, 1.0, 2.0), DomainError);
    CHECK_THROWS_AS(models::estimate_repetitions(4, 0.9, -1.0, 2.0), DomainError);
}

TEST_CASE("noisy parity recovery round-trips through recover_parity") {
    const std::vector<int> y = {1, 1, 0, 1};
    const models::ParityResult clean =
        models::run_parity(ModelKind::BQC, y, ThermalSpec::uniform_qubit(0.9, 4));
    models::NoiseConfig noise;
    noise.sigma_read = 0.3;
    noise.repetitions = models::estimate_repetitions(4, 0.9, 0.3, 3.0);
    noise.seed = 7;
    const models::SignalReport noisy = models::simulate_readout(clean.report, noise);
    CHECK(models::recover_parity(noisy) == y);
}
