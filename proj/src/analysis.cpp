#include "bulkq/analysis.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "bulkq/errors.hpp"
#include "bulkq/rng.hpp"

namespace bulkq::analysis {

namespace {

// max_i (E_i - reference_i): the detection score of one balanced table.
double worst_site_score(const std::vector<double>& e, const std::vector<double>& reference) {
    double best = e[0] - reference[0];
    for (std::size_t i = 1; i < e.size(); ++i) best = std::max(best, e[i] - reference[i]);
    return best;
}

} // namespace

std::vector<double> bqcp_signal(const oracle::TruthTable& table, SignalRoute route) {
    oracle::validate(table);
    if (table.local_dim != 2) throw DomainError("bqcp_signal is defined for q = 2");
    const int n = table.arity;
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    if (route == SignalRoute::State) {
        const qcore::PureState state = models::run_dj_state(table);
        for (int i = 1; i <= n; ++i)
            e[static_cast<std::size_t>(i - 1)] = qcore::expectation_site(state, i);
        return e;
    }
    // E_i = sum_y (2 y_i - 1) |g(y)|^2 straight off the spectrum.
    const std::vector<double> spectrum = models::dj_spectrum(table);
    for (std::size_t y = 0; y < spectrum.size(); ++y)
        for (int i = 1; i <= n; ++i)
            e[static_cast<std::size_t>(i - 1)] +=
                (2.0 * qcore::digit_at(y, 2, n, i) - 1.0) * spectrum[y];
    return e;
}

EpsilonReport epsilon_exact(int n, SignalRoute route, bool recompute_const) {
    std::vector<double> reference(static_cast<std::size_t>(n), -1.0);
    if (recompute_const) {
        // Self-check: the constant-oracle signal must be exactly -1 per site.
        reference = bqcp_signal(oracle::constant_table(2, n, 0), route);
        for (double r : reference)
            if (std::abs(r + 1.0) > 1e-12)
                throw InternalError("constant-oracle signal deviates from -1 by " +
                                    std::to_string(std::abs(r + 1.0)));
    }

    EpsilonReport report;
    report.n = n;
    report.bound_2_over_n = 2.0 / static_cast<double>(n);

    oracle::BalancedEnumerator stream(n);
    oracle::TruthTable table;
    bool first = true;
    while (stream.next(table)) {
        const double score = worst_site_score(bqcp_signal(table, route), reference);
        if (first || score < report.epsilon - 1e-15) {
            report.epsilon = score;
            report.argmin_table = table;
            first = false;
        }
    }
    report.exhaustive = true;
    if (report.epsilon < report.bound_2_over_n - 1e-10)
        throw InternalError("balanced scan found a signal below the proven 2/n floor");
    return report;
}

EpsilonReport epsilon_sampled(int n, std::uint64_t samples, std::uint64_t seed,
                              SignalRoute route) {
    if (samples < 1) throw DomainError("sample count must be >= 1");
    const std::vector<double> reference(static_cast<std::size_t>(n), -1.0);

    EpsilonReport report;
    report.n = n;
    report.exhaustive = false;
    report.samples = samples;
    report.seed = seed;
    report.bound_2_over_n = 2.0 / static_cast<double>(n);

    for (std::uint64_t j = 0; j < samples; ++j) {
        const oracle::TruthTable table = oracle::sample_balanced(n, Rng::mix(seed, j));
        const double score = worst_site_score(bqcp_signal(table, route), reference);
        if (j == 0 || score < report.epsilon - 1e-15) {
            report.epsilon = score;
            report.argmin_table = table;
        }
    }
    if (report.epsilon < report.bound_2_over_n - 1e-10)
        throw InternalError("sampled balanced scan found a signal below the proven 2/n floor");
    return report;
}

double verify_fact2(const oracle::TruthTable& table, const qcore::ThermalSpec& thermal) {
    oracle::validate(table);
    if (table.local_dim != 2) throw DomainError("verify_fact2 is defined for q = 2");
    const int n = table.arity;
    if (thermal.local_dim != 2 || thermal.sites() != n)
        throw DomainError("thermal spec shape does not match the table");

    // Direct side: materialize the product mixture, push every branch through
    // the pipeline, and average expectation_site.
    qcore::MixtureState mix = qcore::thermal_mixture(thermal, n);
    const std::vector<qcore::GateOp> gates = qcore::dj_gates(table);
    for (auto& [w, branch] : mix.branches) branch = qcore::apply_gates(branch, gates);

    // Reference side: the attenuation law applied to the spectrum-route pure
    // signal. No code shared with the direct side.
    const std::vector<double> pure = bqcp_signal(table, SignalRoute::Spectrum);

    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double direct = qcore::mixture_expectation_site(mix, i);
        const double reference =
            (2.0 * thermal.ground_probability(i) - 1.0) * pure[static_cast<std::size_t>(i - 1)];
        worst = std::max(worst, std::abs(direct - reference));
    }
    return worst;
}

double commutation_residual(const oracle::TruthTable& table, const std::vector<int>& k) {
    oracle::validate(table);
    const qcore::Operator middle =
        qcore::circuit_matrix(qcore::dj_gates(table), table.local_dim, table.arity);
    return commutation_residual_operator(middle, k);
}

double commutation_residual_operator(const qcore::Operator& middle, const std::vector<int>& k) {
    if (static_cast<int>(k.size()) != middle.sites)
        throw DomainError("shift mask has " + std::to_string(k.size()) + " entries for " +
                          std::to_string(middle.sites) + " sites");
    const qcore::Operator shift = qcore::shift_mask_operator(middle.local_dim, k);
    return commutator_norm(shift.matrix, middle.matrix);
}

SumRuleRecord sum_rule_check(const oracle::TruthTable& table) {
    if (oracle::classify(table) != oracle::PromiseClass::Balanced)
        throw DomainError("the sum rule applies to balanced tables only");
    const int n = table.arity;

    SumRuleRecord rec;
    const std::vector<double> e = bqcp_signal(table, SignalRoute::State);
    for (double v : e) rec.sum_e += v;
    rec.mean_e = rec.sum_e / static_cast<double>(n);
    rec.average_bound = 2.0 / static_cast<double>(n) - 1.0;

    const std::vector<double> spectrum = models::dj_spectrum(table);
    rec.g0_sq = spectrum[0];
    for (std::size_t y = 0; y < spectrum.size(); ++y) {
        rec.spectrum_total += spectrum[y];
        if (y != 0)
            rec.rhs += 2.0 * spectrum[y] * static_cast<double>(std::popcount(y));
    }
    rec.rhs -= static_cast<double>(n);

    rec.equality_ok = std::abs(rec.sum_e - rec.rhs) <= 1e-10;
    rec.g0_ok = rec.g0_sq <= 1e-12;
    rec.average_bound_ok = rec.mean_e >= rec.average_bound - 1e-10;
    rec.normalized_ok = std::abs(rec.spectrum_total - 1.0) <= 1e-12;
    return rec;
}

} // namespace bulkq::analysis
