#include "bulkq/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "bulkq/analysis.hpp"
#include "bulkq/errors.hpp"
#include "bulkq/hqa.hpp"
#include "bulkq/models.hpp"
#include "bulkq/oracle.hpp"
#include "bulkq/qcore.hpp"
#include "bulkq/rng.hpp"

namespace bulkq::selftest {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 3) {
    std::ostringstream out;
    out << std::setprecision(precision) << v;
    return out.str();
}

// Runs one criterion body, capturing detail text, elapsed time and thrown
// errors (an exception is an honest failure, never a crash of the suite).
CriterionResult run_criterion(int id, const std::string& name,
                              const std::function<bool(std::ostringstream&)>& body) {
    CriterionResult result;
    result.id = id;
    result.name = name;
    const auto start = Clock::now();
    std::ostringstream detail;
    try {
        result.pass = body(detail);
    } catch (const std::exception& e) {
        result.pass = false;
        detail << "exception: " << e.what();
    }
    result.seconds = seconds_since(start);
    result.detail = detail.str();
    return result;
}

// Restores the fault-injection hook no matter how run_all exits.
struct HookGuard {
    explicit HookGuard(bool enabled) { testing::inject_expectation_sign_flip(enabled); }
    ~HookGuard() { testing::inject_expectation_sign_flip(false); }
};

// --------------------------------------------------------------------------
// 1. Exhaustive worst-case signal floor over balanced tables.

bool criterion_gap_floor(std::ostringstream& detail) {
    const auto start = Clock::now();
    const std::uint64_t expected_counts[4] = {2, 6, 70, 12870};
    const double expected_eps[4] = {2.0, 2.0, 1.0, 1.0}; // derived ground truth

    bool ok = true;
    detail << "eps:";
    for (int n = 1; n <= 4; ++n) {
        if (oracle::balanced_count(n) != expected_counts[n - 1]) ok = false;
        const analysis::EpsilonReport rep = analysis::epsilon_exact(n);
        detail << " " << fmt(rep.epsilon, 12);
        if (rep.epsilon < rep.bound_2_over_n - 1e-10) ok = false;
        if (rep.epsilon != expected_eps[n - 1]) ok = false;
        if (!rep.exhaustive) ok = false;
    }
    const double elapsed = seconds_since(start);
    detail << " counts ok, " << fmt(elapsed) << "s (budget 10s)";
    return ok && elapsed < 10.0;
}

// --------------------------------------------------------------------------
// 2. Attenuation law: direct mixture simulation vs (2q_i - 1) E^pure_i.

bool criterion_attenuation_law(std::ostringstream& detail) {
    const auto start = Clock::now();
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n) {
        for (int t = 0; t < 100; ++t) {
            const std::uint64_t pair_seed = Rng::mix(0xFAC2 + static_cast<std::uint64_t>(n),
                                                     static_cast<std::uint64_t>(t));
            const oracle::TruthTable table = oracle::sample_balanced(n, Rng::mix(pair_seed, 1));
            Rng rng = Rng::derived(pair_seed, 2);
            std::vector<double> ground(static_cast<std::size_t>(n));
            for (auto& g : ground) g = rng.next_double();
            const qcore::ThermalSpec thermal = qcore::ThermalSpec::qubit(ground);
            worst = std::max(worst, analysis::verify_fact2(table, thermal));
        }
    }
    const double elapsed = seconds_since(start);
    detail << "600 pairs, max residual " << fmt(worst) << ", " << fmt(elapsed)
           << "s (budget 30s)";
    return worst <= 1e-10 && elapsed < 30.0;
}

// --------------------------------------------------------------------------
// 3. Shift masks commute with the transform-sandwiched phase oracle.

bool criterion_commutation(std::ostringstream& detail) {
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const std::size_t masks = std::size_t{1} << n;
        for (int t = 0; t < 20; ++t) {
            const oracle::TruthTable table = oracle::random_table(
                2, n, Rng::mix(0xC3, static_cast<std::uint64_t>(n * 100 + t)));
            for (std::size_t mask = 0; mask < masks; ++mask) {
                std::vector<int> k(static_cast<std::size_t>(n));
                for (int i = 1; i <= n; ++i)
                    k[static_cast<std::size_t>(i - 1)] = qcore::digit_at(mask, 2, n, i);
                worst = std::max(worst, analysis::commutation_residual(table, k));
            }
        }
    }
    // Negative control: a bare Z observable anticommutes with the site flip.
    const double control =
        analysis::commutation_residual_operator(qcore::sigma_z_site(1, 1), {1});
    detail << "max residual " << fmt(worst) << ", negative control " << fmt(control);
    return worst <= 1e-10 && control > 0.1;
}

// --------------------------------------------------------------------------
// 4. Certifier constants on the conjugated bit-flip channel.

bool criterion_certifier_constants(std::ostringstream& detail) {
    bool ok = true;
    double worst_c = 0.0;
    for (int n = 2; n <= 3; ++n) {
        const std::vector<double> ground =
            n == 2 ? std::vector<double>{0.8, 0.6} : std::vector<double>{0.8, 0.6, 0.7};
        const qcore::ThermalSpec spec = qcore::ThermalSpec::qubit(ground);
        const oracle::TruthTable table =
            oracle::inner_product_table(std::vector<int>(static_cast<std::size_t>(n), 1), 2, n);
        const qcore::Operator u = qcore::circuit_matrix(qcore::dj_gates(table), 2, n);
        const qcore::KrausChannel f =
            hqa::conjugated_channel(u, hqa::bitflip_channel(spec, n));
        const hqa::ProportionalityReport rep =
            hqa::certify(f, hqa::default_observables(2, n), 1e-9);
        if (!rep.all_pass) ok = false;
        for (int i = 0; i < n; ++i) {
            const cplx c = rep.observables[static_cast<std::size_t>(i)].c;
            const double expected = 2.0 * ground[static_cast<std::size_t>(i)] - 1.0;
            worst_c = std::max(worst_c, std::abs(c - cplx{expected, 0.0}));
        }
    }
    if (worst_c > 1e-9) ok = false;

    // Maximally mixed inputs: every constant collapses to zero.
    double worst_mixed = 0.0;
    {
        const int n = 2;
        const qcore::ThermalSpec spec = qcore::ThermalSpec::uniform_qubit(0.5, n);
        const oracle::TruthTable table = oracle::inner_product_table({1, 1}, 2, n);
        const qcore::Operator u = qcore::circuit_matrix(qcore::dj_gates(table), 2, n);
        const hqa::ProportionalityReport rep = hqa::certify(
            hqa::conjugated_channel(u, hqa::bitflip_channel(spec, n)),
            hqa::default_observables(2, n), 1e-9);
        for (const auto& o : rep.observables) worst_mixed = std::max(worst_mixed, std::abs(o.c));
        if (!rep.all_pass) ok = false;
    }
    if (worst_mixed > 1e-12) ok = false;

    // Negative control: conjugation by an unrelated random circuit must fail.
    double control = 0.0;
    {
        const int n = 2;
        const qcore::ThermalSpec spec = qcore::ThermalSpec::qubit({0.8, 0.6});
        const qcore::Operator u = hqa::random_unitary(2, n, 0xBAD);
        const hqa::ProportionalityReport rep = hqa::certify(
            hqa::conjugated_channel(u, hqa::bitflip_channel(spec, n)),
            hqa::default_observables(2, n), 1e-9);
        for (const auto& o : rep.observables) control = std::max(control, o.residual);
        if (rep.all_pass) ok = false;
    }
    detail << "max |c - (2q-1)| " << fmt(worst_c) << ", mixed |c| " << fmt(worst_mixed)
           << ", control residual " << fmt(control);
    return ok;
}

// --------------------------------------------------------------------------
// 5. One-query parity recovery, noise-free and under readout noise.

bool criterion_parity_recovery(std::ostringstream& detail, int threads) {
    bool ok = true;
    int noisy_min = 1000;
    for (const int n : {4, 8, 12}) {
        const qcore::ThermalSpec thermal = qcore::ThermalSpec::uniform_qubit(0.6, n);
        models::ParityResult first_run;
        std::vector<int> first_y;
        for (int t = 0; t < 50; ++t) {
            Rng rng = Rng::derived(Rng::mix(0xC5, static_cast<std::uint64_t>(n)),
                                   static_cast<std::uint64_t>(t));
            std::vector<int> y(static_cast<std::size_t>(n));
            for (auto& bit : y) bit = static_cast<int>(rng.next_index(2));
            const models::ParityResult run =
                models::run_parity(models::ModelKind::BQC, y, thermal, 0, false, threads);
            if (run.y_hat != y) ok = false;
            if (t == 0) {
                first_run = run;
                first_y = y;
            }
        }

        // Readout noise at the prescribed repetition count; the noise-free
        // signal is reused across trials, only the noise draws change.
        const long long m = models::estimate_repetitions(n, 0.6, 0.3, 2.0);
        int successes = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            models::NoiseConfig noise;
            noise.sigma_read = 0.3;
            noise.repetitions = m;
            noise.seed = Rng::mix(0xC5F + static_cast<std::uint64_t>(n),
                                  static_cast<std::uint64_t>(trial));
            const models::SignalReport noisy = models::simulate_readout(first_run.report, noise);
            if (models::recover_parity(noisy) == first_y) ++successes;
        }
        noisy_min = std::min(noisy_min, successes);
        if (successes < 950) ok = false;
    }
    detail << "150/150 exact at n=4,8,12; noisy worst " << noisy_min << "/1000";
    return ok;
}

// --------------------------------------------------------------------------
// 6. Output spectrum point masses plus single-shot sampling.

bool criterion_spectrum(std::ostringstream& detail) {
    bool ok = true;
    double worst_const = 0.0;
    double worst_g0 = 0.0;
    for (int n = 1; n <= 4; ++n) {
        for (int value = 0; value < 2; ++value) {
            const std::vector<double> spec =
                models::dj_spectrum(oracle::constant_table(2, n, value));
            worst_const = std::max(worst_const, std::abs(spec[0] - 1.0));
            for (std::size_t y = 1; y < spec.size(); ++y)
                worst_const = std::max(worst_const, spec[y]);
        }
        oracle::BalancedEnumerator stream(n);
        oracle::TruthTable table;
        while (stream.next(table))
            worst_g0 = std::max(worst_g0, models::dj_spectrum(table)[0]);
    }
    if (worst_const > 1e-12 || worst_g0 > 1e-12) ok = false;

    // Single-shot sampling over the n = 3 balanced family and the constants.
    const std::vector<oracle::TruthTable> balanced = oracle::enumerate_balanced(3);
    const std::vector<int> zero(3, 0);
    int bad_shots = 0;
    for (int shot = 0; shot < 10000; ++shot) {
        const auto& table = balanced[static_cast<std::size_t>(shot) % balanced.size()];
        const models::SignalReport rep = models::run_dj(
            models::ModelKind::SQC, table, std::nullopt, Rng::mix(0x6A, shot));
        if (*rep.outcome == zero) ++bad_shots;
    }
    for (int value = 0; value < 2; ++value) {
        const oracle::TruthTable table = oracle::constant_table(2, 3, value);
        for (int shot = 0; shot < 10000; ++shot) {
            const models::SignalReport rep = models::run_dj(
                models::ModelKind::SQC, table, std::nullopt, Rng::mix(0x6B, shot));
            if (*rep.outcome != zero) ++bad_shots;
        }
    }
    if (bad_shots != 0) ok = false;
    detail << "max const dev " << fmt(worst_const) << ", max |g(0)|^2 " << fmt(worst_g0)
           << ", contradicting shots " << bad_shots << "/30000";
    return ok;
}

// --------------------------------------------------------------------------
// 7. Balanced sum rule and the averaged lower bound.

bool criterion_sum_rule(std::ostringstream& detail) {
    bool ok = true;
    double worst_eq = 0.0;
    std::uint64_t tables = 0;
    for (int n = 1; n <= 4; ++n) {
        oracle::BalancedEnumerator stream(n);
        oracle::TruthTable table;
        while (stream.next(table)) {
            const analysis::SumRuleRecord rec = analysis::sum_rule_check(table);
            worst_eq = std::max(worst_eq, std::abs(rec.sum_e - rec.rhs));
            if (!rec.equality_ok || !rec.g0_ok || !rec.average_bound_ok || !rec.normalized_ok)
                ok = false;
            ++tables;
        }
    }
    detail << tables << " balanced tables, max |sum - rhs| " << fmt(worst_eq);
    return ok;
}

// --------------------------------------------------------------------------
// 8. Census of balanced affine tables.

bool criterion_affine_census(std::ostringstream& detail) {
    bool ok = true;
    detail << "affine-balanced:";
    const std::uint64_t expected[3] = {6, 14, 30};
    for (int n = 2; n <= 4; ++n) {
        const auto [affine, total] = oracle::count_affine_balanced(n);
        detail << " n=" << n << ":" << affine << "/" << total;
        if (affine != expected[n - 2]) ok = false;
        if (affine != 2 * ((1ULL << n) - 1)) ok = false;
        if (total != oracle::balanced_count(n)) ok = false;
        if (n == 2 && affine != total) ok = false; // every balanced pair function is affine
    }
    return ok;
}

// --------------------------------------------------------------------------
// 9. A half-polarized ancilla halves the balanced/constant signal gap.

bool criterion_ancilla_halving(std::ostringstream& detail) {
    double worst = 0.0;
    for (int n = 2; n <= 3; ++n) {
        const std::vector<qcore::ThermalSpec> specs = {
            qcore::ThermalSpec::pure(2, n),
            qcore::ThermalSpec::qubit(n == 2 ? std::vector<double>{0.8, 0.6}
                                             : std::vector<double>{0.8, 0.6, 0.7})};
        const oracle::TruthTable constant = oracle::constant_table(2, n, 0);
        for (const auto& spec : specs) {
            const models::SignalReport const_full =
                models::run_dj_thermal_ancilla(constant, spec, 1.0);
            const models::SignalReport const_half =
                models::run_dj_thermal_ancilla(constant, spec, 0.5);
            oracle::BalancedEnumerator stream(n);
            oracle::TruthTable table;
            while (stream.next(table)) {
                const models::SignalReport full =
                    models::run_dj_thermal_ancilla(table, spec, 1.0);
                const models::SignalReport half =
                    models::run_dj_thermal_ancilla(table, spec, 0.5);
                for (int i = 0; i < n; ++i) {
                    const auto j = static_cast<std::size_t>(i);
                    const double gap_full = full.e_site[j] - const_full.e_site[j];
                    const double gap_half = half.e_site[j] - const_half.e_site[j];
                    worst = std::max(worst, std::abs(gap_half - 0.5 * gap_full));
                }
            }
        }
    }
    detail << "max |gap(1/2) - gap(1)/2| = " << fmt(worst);
    return worst <= 1e-9;
}

// --------------------------------------------------------------------------
// 10. Qudit shift channel and one-query recovery over Z_3.

bool criterion_qudit(std::ostringstream& detail) {
    bool ok = true;
    const int q = 3;
    const int n = 2;

    // Pure-input parity lands exactly on |y> for every y.
    for (int a = 0; a < q; ++a) {
        for (int b = 0; b < q; ++b) {
            const std::vector<int> y = {a, b};
            const models::QuditParityResult run = models::run_qudit_parity(y, q, n);
            if (run.y_hat != y) ok = false;
        }
    }

    // Shift-channel certification: c(m) = sum_j r_j w^(m j) per site.
    double worst_c = 0.0;
    const std::vector<std::vector<double>> dists = {{0.5, 0.3, 0.2},
                                                    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    for (const auto& r : dists) {
        qcore::ThermalSpec spec;
        spec.local_dim = q;
        spec.site_distributions = {r, r};
        const oracle::TruthTable table = oracle::inner_product_table({1, 1}, q, n);
        const qcore::Operator u = qcore::circuit_matrix(qcore::dj_gates(table), q, n);
        const hqa::ProportionalityReport rep = hqa::certify(
            hqa::conjugated_channel(u, hqa::bitflip_channel(spec, n)),
            hqa::default_observables(q, n), 1e-9);
        if (!rep.all_pass) ok = false;
        std::size_t at = 0;
        for (int site = 1; site <= n; ++site) {
            for (int m = 1; m < q; ++m) {
                cplx expected{0.0, 0.0};
                for (int j = 0; j < q; ++j)
                    expected += r[static_cast<std::size_t>(j)] *
                                qcore::omega_power(q, static_cast<long long>(m) * j);
                worst_c = std::max(worst_c, std::abs(rep.observables[at].c - expected));
                ++at;
            }
        }
    }
    if (worst_c > 1e-9) ok = false;
    detail << "9/9 parity vectors exact, max |c - sum r w^mj| " << fmt(worst_c);
    return ok;
}

// --------------------------------------------------------------------------
// 11. Repetitions scale as n^2; the noisy decision succeeds at the estimate.

bool criterion_scaling(std::ostringstream& detail, int threads) {
    bool ok = true;
    // Formula level: doubling n quadruples m. Dyadic parameters (q_min = 3/4,
    // sigma = 1/2) keep every intermediate exact in binary floating point, so
    // the noise ratio is an exact integer and ceil() adds no rounding slack;
    // a non-dyadic q_min would shift the ratio by one ulp and break the
    // identity spuriously.
    for (const double z : {2.0, 3.0}) {
        const long long m4 = models::estimate_repetitions(4, 0.75, 0.5, z);
        const long long m8 = models::estimate_repetitions(8, 0.75, 0.5, z);
        const long long m16 = models::estimate_repetitions(16, 0.75, 0.5, z);
        if (m8 != 4 * m4 || m16 != 4 * m8) ok = false;
        if (z == 2.0 && m4 != 64) ok = false; // ratio 2*2*0.5/(1/4) = 8, m = 64
    }

    // End to end at z = 3: with per-site noise sigma = gap/(2z), a
    // constant-table verdict needs all n sites on the right side, so the
    // joint success is Phi(3)^n >= 98.9% at n = 8; z = 2 would sit below the
    // 95% bar at that n.
    int worst_success = 1000;
    for (const int n : {4, 8}) {
        const qcore::ThermalSpec thermal = qcore::ThermalSpec::uniform_qubit(0.6, n);
        const long long m = models::estimate_repetitions(n, 0.6, 0.3, 3.0);
        const oracle::TruthTable balanced =
            oracle::sample_balanced(n, Rng::mix(0xC11, static_cast<std::uint64_t>(n)));
        const oracle::TruthTable constant = oracle::constant_table(2, n, 0);
        const models::SignalReport bal_report =
            models::run_dj(models::ModelKind::BQC, balanced, thermal, 0, threads);
        const models::SignalReport const_report =
            models::run_dj(models::ModelKind::BQC, constant, thermal, 0, threads);

        int successes = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            models::NoiseConfig noise;
            noise.sigma_read = 0.3;
            noise.repetitions = m;
            noise.seed = Rng::mix(0x11E + static_cast<std::uint64_t>(n),
                                  static_cast<std::uint64_t>(trial));
            const models::Decision bal_decision =
                models::decide_dj(models::simulate_readout(bal_report, noise));
            noise.seed = Rng::mix(0x11F + static_cast<std::uint64_t>(n),
                                  static_cast<std::uint64_t>(trial));
            const models::Decision const_decision =
                models::decide_dj(models::simulate_readout(const_report, noise));
            if (bal_decision.verdict == oracle::PromiseClass::Balanced &&
                const_decision.verdict == oracle::PromiseClass::Constant)
                ++successes;
        }
        worst_success = std::min(worst_success, successes);
        if (successes < 950) ok = false;
    }
    detail << "m quadruples exactly; noisy DJ worst " << worst_success << "/1000";
    return ok;
}

} // namespace

std::vector<CriterionResult> run_all(const Options& options) {
    const HookGuard guard(options.inject_sign_flip);
    const int threads = options.threads < 1 ? 1 : options.threads;

    for (const int id : options.criteria)
        if (id < 1 || id > 11)
            throw DomainError("criterion id out of range 1..11: " + std::to_string(id));
    const auto wanted = [&](int id) {
        return options.criteria.empty() ||
               std::find(options.criteria.begin(), options.criteria.end(), id) !=
                   options.criteria.end();
    };

    std::vector<CriterionResult> results;
    const auto add = [&](int id, const char* name, auto&& body) {
        if (wanted(id)) results.push_back(run_criterion(id, name, body));
    };
    add(1, "balanced-gap-floor", criterion_gap_floor);
    add(2, "thermal-attenuation-law", criterion_attenuation_law);
    add(3, "shift-commutation", criterion_commutation);
    add(4, "certifier-constants", criterion_certifier_constants);
    add(5, "parity-one-query", [&](std::ostringstream& detail) {
        return criterion_parity_recovery(detail, threads);
    });
    add(6, "spectrum-point-mass", criterion_spectrum);
    add(7, "sum-rule-chain", criterion_sum_rule);
    add(8, "affine-balanced-census", criterion_affine_census);
    add(9, "thermal-ancilla-halving", criterion_ancilla_halving);
    add(10, "qudit-generalization", criterion_qudit);
    add(11, "repetition-scaling", [&](std::ostringstream& detail) {
        return criterion_scaling(detail, threads);
    });
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

} // namespace bulkq::selftest
