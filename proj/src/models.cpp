#include "bulkq/models.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <string>
#include <thread>

#include "bulkq/errors.hpp"
#include "bulkq/rng.hpp"

namespace bulkq::models {

namespace {

constexpr double kBranchPrune = 1e-15;

void require_qubit_table(const oracle::TruthTable& table, const char* where) {
    oracle::validate(table);
    if (table.local_dim != 2)
        throw DomainError(std::string(where) + " is defined for q = 2, got q = " +
                          std::to_string(table.local_dim));
}

void require_matching_thermal(const qcore::ThermalSpec& thermal, int q, int n) {
    qcore::validate(thermal);
    if (thermal.local_dim != q || thermal.sites() != n)
        throw DomainError("thermal spec shape (q=" + std::to_string(thermal.local_dim) + ", n=" +
                          std::to_string(thermal.sites()) + ") does not match the run (q=" +
                          std::to_string(q) + ", n=" + std::to_string(n) + ")");
}

int clamp_threads(int threads) { return threads < 1 ? 1 : threads; }

// Splits [0, count) into `threads` chunks, runs fn(first, last) on each, and
// joins. Each chunk writes disjoint slots, so the result is identical for
// every thread count.
void parallel_ranges(std::size_t count, int threads,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    threads = clamp_threads(threads);
    if (threads == 1 || count < 2) {
        fn(0, count);
        return;
    }
    const std::size_t chunk = (count + static_cast<std::size_t>(threads) - 1) /
                              static_cast<std::size_t>(threads);
    std::vector<std::thread> pool;
    for (std::size_t first = 0; first < count; first += chunk) {
        const std::size_t last = std::min(count, first + chunk);
        pool.emplace_back(fn, first, last);
    }
    for (auto& t : pool) t.join();
}

// E_i for the first n sites of one pure q = 2 state (any trailing sites act
// as spectators), accumulated into e (length n) with weight w. Uses
// E_i = 2 P(x_i = 1) - ||amps||^2 with the (2x-1) sign convention; the
// sign-flip hook is applied by the caller.
void accumulate_qubit_sites(const std::vector<cplx>& amps, int n, double w,
                            std::vector<double>& e) {
    const std::size_t dim = amps.size();
    double total = 0.0;
    for (const auto& a : amps) total += std::norm(a);
    for (int site = 1; site <= n; ++site) {
        const std::size_t bit = dim >> site; // site 1 is the most significant
        double ones = 0.0;
        for (std::size_t x = 0; x < dim; ++x)
            if (x & bit) ones += std::norm(amps[x]);
        e[static_cast<std::size_t>(site - 1)] += w * (2.0 * ones - total);
    }
}

// Direct enumeration of the thermal product mixture for a q = 2 phase-oracle
// pipeline: per branch |k>, run H^n, oracle phase, H^n in place and
// accumulate the weighted per-site signals. Per-branch results land in
// disjoint slots, so the reduction order (and hence the value) is independent
// of the thread count.
std::vector<double> bqc_qubit_signal(const oracle::TruthTable& table,
                                     const qcore::ThermalSpec& thermal, int threads) {
    const int n = table.arity;
    const std::size_t dim = qcore::checked_dim(2, n, qcore::kStateGuard);
    qcore::checked_dim(2, n, qcore::kBranchGuard);

    std::vector<double> ground(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        ground[static_cast<std::size_t>(i - 1)] = thermal.ground_probability(i);

    std::vector<double> contrib(dim * static_cast<std::size_t>(n), 0.0);

    parallel_ranges(dim, threads, [&](std::size_t first, std::size_t last) {
        std::vector<cplx> amps(dim);
        std::vector<double> e(static_cast<std::size_t>(n));
        for (std::size_t k = first; k < last; ++k) {
            double p = 1.0;
            for (int i = 1; i <= n; ++i) {
                const bool excited = (k >> (n - i)) & 1u;
                const double g = ground[static_cast<std::size_t>(i - 1)];
                p *= excited ? 1.0 - g : g;
            }
            if (p < kBranchPrune) continue;

            std::fill(amps.begin(), amps.end(), cplx{0.0, 0.0});
            amps[k] = cplx{1.0, 0.0};
            qcore::dft_all_inplace(amps, 2, n, false);
            qcore::diagonal_phase_inplace(amps, table);
            qcore::dft_all_inplace(amps, 2, n, true);

            std::fill(e.begin(), e.end(), 0.0);
            accumulate_qubit_sites(amps, n, p, e);
            for (int i = 0; i < n; ++i)
                contrib[k * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] =
                    e[static_cast<std::size_t>(i)];
        }
    });

    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (std::size_t k = 0; k < dim; ++k)
        for (int i = 0; i < n; ++i)
            e[static_cast<std::size_t>(i)] +=
                contrib[k * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
    if (testing::expectation_sign_flip())
        for (auto& v : e) v = -v;
    return e;
}

bool is_prime(int q) {
    if (q < 2) return false;
    for (int d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

} // namespace

const char* to_string(ModelKind model) {
    switch (model) {
        case ModelKind::SQC: return "SQC";
        case ModelKind::BQC_P: return "BQC_P";
        case ModelKind::BQC: return "BQC";
    }
    return "?";
}

qcore::PureState run_dj_state(const oracle::TruthTable& table) {
    oracle::validate(table);
    qcore::PureState state = qcore::PureState::zero_state(table.local_dim, table.arity);
    qcore::dft_all_inplace(state.amplitudes, state.local_dim, state.sites, false);
    qcore::diagonal_phase_inplace(state.amplitudes, table);
    qcore::dft_all_inplace(state.amplitudes, state.local_dim, state.sites, true);
    return state;
}

std::vector<double> dj_spectrum(const oracle::TruthTable& table) {
    require_qubit_table(table, "dj_spectrum");
    const int n = table.arity;
    const std::size_t dim = table.values.size();
    // g(y) = 2^-n sum_x (-1)^(f(x) xor x.y), no state pipeline involved.
    std::vector<double> spectrum(dim);
    const double scale = 1.0 / static_cast<double>(dim);
    for (std::size_t y = 0; y < dim; ++y) {
        long long acc = 0;
        for (std::size_t x = 0; x < dim; ++x) {
            const int s = (table.values[x] + std::popcount(x & y)) & 1;
            acc += 1 - 2 * s;
        }
        const double g = scale * static_cast<double>(acc);
        spectrum[y] = g * g;
    }
    return spectrum;
}

SignalReport run_dj(ModelKind model, const oracle::TruthTable& table,
                    const std::optional<qcore::ThermalSpec>& thermal, std::uint64_t seed,
                    int threads) {
    require_qubit_table(table, "run_dj");
    const int n = table.arity;

    SignalReport report;
    report.model = model;
    report.local_dim = 2;
    report.sites = n;
    report.promise = oracle::classify(table);
    report.seed = seed;

    switch (model) {
        case ModelKind::SQC: {
            if (thermal)
                throw DomainError("SQC runs on pure inputs; no thermal spec applies");
            const qcore::PureState state = run_dj_state(table);
            Rng rng = Rng::derived(seed, 0);
            const double u = rng.next_double();
            double cum = 0.0;
            std::size_t picked = state.dim() - 1;
            for (std::size_t x = 0; x < state.dim(); ++x) {
                cum += std::norm(state.amplitudes[x]);
                if (u < cum) {
                    picked = x;
                    break;
                }
            }
            std::vector<int> digits(static_cast<std::size_t>(n));
            report.e_site.resize(static_cast<std::size_t>(n));
            for (int i = 1; i <= n; ++i) {
                const int bit = qcore::digit_at(picked, 2, n, i);
                digits[static_cast<std::size_t>(i - 1)] = bit;
                // Single-shot reading: the sampled eigenvalue at each site.
                report.e_site[static_cast<std::size_t>(i - 1)] = static_cast<double>(2 * bit - 1);
            }
            report.outcome = digits;
            break;
        }
        case ModelKind::BQC_P: {
            if (thermal)
                throw DomainError("BQC_P fixes pure |0...0> inputs; no thermal spec applies");
            const qcore::PureState state = run_dj_state(table);
            report.e_site.resize(static_cast<std::size_t>(n));
            for (int i = 1; i <= n; ++i)
                report.e_site[static_cast<std::size_t>(i - 1)] = qcore::expectation_site(state, i);
            break;
        }
        case ModelKind::BQC: {
            if (!thermal) throw DomainError("BQC requires a thermal spec");
            require_matching_thermal(*thermal, 2, n);
            report.e_site = bqc_qubit_signal(table, *thermal, threads);
            report.thermal = *thermal;
            break;
        }
    }
    return report;
}

Decision decide_dj(const SignalReport& report, const qcore::ThermalSpec& thermal) {
    if (report.local_dim != 2) throw DomainError("decide_dj is defined for q = 2");
    const int n = report.sites;
    if (static_cast<int>(report.e_site.size()) != n)
        throw DomainError("signal report carries no per-site expectations");
    require_matching_thermal(thermal, 2, n);
    const double polar_min = 2.0 * thermal.min_ground_probability() - 1.0;
    if (polar_min <= 0.0)
        throw DomainError("the decision rule needs every ground probability > 1/2");

    Decision d;
    double best = 0.0;
    int best_site = 0;
    for (int i = 1; i <= n; ++i) {
        const double polar = 2.0 * thermal.ground_probability(i) - 1.0;
        const double threshold = -polar + polar_min / static_cast<double>(n);
        const double margin = report.e_site[static_cast<std::size_t>(i - 1)] - threshold;
        if (best_site == 0 || margin > best) {
            best = margin;
            best_site = i;
        }
    }
    d.margin = best;
    if (best >= 0.0) {
        d.verdict = oracle::PromiseClass::Balanced;
        d.witness_site = best_site;
    } else {
        d.verdict = oracle::PromiseClass::Constant;
    }
    return d;
}

Decision decide_dj(const SignalReport& report) {
    if (report.thermal) return decide_dj(report, *report.thermal);
    return decide_dj(report, qcore::ThermalSpec::pure(2, report.sites));
}

ParityResult run_parity(ModelKind model, const std::vector<int>& y,
                        const std::optional<qcore::ThermalSpec>& thermal, std::uint64_t seed,
                        bool allow_degenerate, int threads) {
    const int n = static_cast<int>(y.size());
    const oracle::TruthTable table = oracle::inner_product_table(y, 2, n);

    ParityResult result;
    if (thermal) {
        require_matching_thermal(*thermal, 2, n);
        for (int i = 1; i <= n; ++i)
            if (std::abs(2.0 * thermal->ground_probability(i) - 1.0) < 1e-12)
                result.degenerate_sites.push_back(i);
        if (!result.degenerate_sites.empty() && !allow_degenerate)
            throw DomainError("site " + std::to_string(result.degenerate_sites.front()) +
                              " has ground probability 1/2; its parity bit carries no signal");
    }

    result.report = run_dj(model, table, thermal, seed, threads);
    result.y_hat = recover_parity(result.report);
    result.margins.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        result.margins[static_cast<std::size_t>(i)] =
            std::abs(result.report.e_site[static_cast<std::size_t>(i)]);
    return result;
}

std::vector<int> recover_parity(const SignalReport& report) {
    if (report.local_dim != 2) throw DomainError("recover_parity is defined for q = 2");
    std::vector<int> y(report.e_site.size());
    for (std::size_t i = 0; i < report.e_site.size(); ++i) y[i] = report.e_site[i] > 0.0 ? 1 : 0;
    return y;
}

SignalReport run_dj_thermal_ancilla(const oracle::TruthTable& table,
                                    const qcore::ThermalSpec& thermal_inputs, double ancilla_p1) {
    require_qubit_table(table, "run_dj_thermal_ancilla");
    const int n = table.arity;
    require_matching_thermal(thermal_inputs, 2, n);
    if (ancilla_p1 < 0.0 || ancilla_p1 > 1.0)
        throw DomainError("ancilla probability " + std::to_string(ancilla_p1) +
                          " out of [0, 1]");

    const std::size_t full_dim = qcore::checked_dim(2, n + 1, qcore::kStateGuard);
    const std::size_t input_dim = full_dim / 2;
    qcore::checked_dim(2, n + 1, qcore::kBranchGuard);

    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    std::vector<cplx> amps(full_dim);
    for (std::size_t k = 0; k < input_dim; ++k) {
        double pk = 1.0;
        for (int i = 1; i <= n; ++i) {
            const bool excited = (k >> (n - i)) & 1u;
            const double g = thermal_inputs.ground_probability(i);
            pk *= excited ? 1.0 - g : g;
        }
        for (int a = 0; a < 2; ++a) {
            const double p = pk * (a == 1 ? ancilla_p1 : 1.0 - ancilla_p1);
            if (p < kBranchPrune) continue;

            std::fill(amps.begin(), amps.end(), cplx{0.0, 0.0});
            amps[2 * k + static_cast<std::size_t>(a)] = cplx{1.0, 0.0};
            qcore::dft_all_inplace(amps, 2, n + 1, false);
            // |x>|b> -> |x>|b xor f(x)>: swap the ancilla pair where f = 1.
            for (std::size_t x = 0; x < input_dim; ++x)
                if (table.values[x]) std::swap(amps[2 * x], amps[2 * x + 1]);
            qcore::dft_all_inplace(amps, 2, n + 1, true);

            // Input-site signals only; the final ancilla transform cannot
            // change them.
            accumulate_qubit_sites(amps, n, p, e);
        }
    }
    if (testing::expectation_sign_flip())
        for (auto& v : e) v = -v;

    SignalReport report;
    report.model = ModelKind::BQC;
    report.local_dim = 2;
    report.sites = n;
    report.e_site = std::move(e);
    report.thermal = thermal_inputs;
    report.ancilla_p1 = ancilla_p1;
    report.promise = oracle::classify(table);
    report.seed = 0;
    return report;
}

QuditParityResult run_qudit_parity(const std::vector<int>& y, int q, int n,
                                   const std::optional<qcore::ThermalSpec>& thermal, int threads) {
    if (!is_prime(q))
        throw DomainError("qudit parity needs a prime local dimension, got " + std::to_string(q));
    if (static_cast<int>(y.size()) != n)
        throw DomainError("coefficient vector has " + std::to_string(y.size()) + " entries for " +
                          std::to_string(n) + " sites");
    const oracle::TruthTable table = oracle::inner_product_table(y, q, n);
    const std::size_t dim = qcore::checked_dim(q, n, qcore::kStateGuard);

    QuditParityResult result;
    result.local_dim = q;
    result.sites = n;
    result.thermal = thermal;

    std::vector<double> weights; // branch probabilities over basis inputs
    if (thermal) {
        require_matching_thermal(*thermal, q, n);
        qcore::checked_dim(q, n, qcore::kBranchGuard);
        weights.resize(dim);
        std::vector<int> digits(static_cast<std::size_t>(n));
        for (std::size_t k = 0; k < dim; ++k) {
            for (int i = 1; i <= n; ++i)
                digits[static_cast<std::size_t>(i - 1)] = qcore::digit_at(k, q, n, i);
            weights[k] = thermal->branch_probability(digits);
        }
    } else {
        weights.assign(dim, 0.0);
        weights[0] = 1.0;
    }

    // pop[(i-1)*q + d] and zq[(i-1)*(q-1) + m-1], accumulated over branches.
    std::vector<double> pop(static_cast<std::size_t>(n) * static_cast<std::size_t>(q), 0.0);
    std::vector<cplx> zq(static_cast<std::size_t>(n) * static_cast<std::size_t>(q - 1),
                         cplx{0.0, 0.0});

    // Branch counts stay small here (q^n <= 4096); single-threaded is fine.
    (void)clamp_threads(threads);
    std::vector<cplx> amps(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const double p = weights[k];
        if (p < kBranchPrune) continue;

        std::fill(amps.begin(), amps.end(), cplx{0.0, 0.0});
        amps[k] = cplx{1.0, 0.0};
        qcore::dft_all_inplace(amps, q, n, false);
        qcore::diagonal_phase_inplace(amps, table);
        qcore::dft_all_inplace(amps, q, n, true);

        for (int i = 1; i <= n; ++i) {
            std::size_t stride = 1;
            for (int s = 0; s < n - i; ++s) stride *= static_cast<std::size_t>(q);
            std::vector<double> w(static_cast<std::size_t>(q), 0.0);
            for (std::size_t x = 0; x < dim; ++x)
                w[x / stride % static_cast<std::size_t>(q)] += std::norm(amps[x]);
            for (int d = 0; d < q; ++d)
                pop[static_cast<std::size_t>((i - 1) * q + d)] +=
                    p * w[static_cast<std::size_t>(d)];
            for (int m = 1; m < q; ++m) {
                cplx acc{0.0, 0.0};
                for (int d = 0; d < q; ++d)
                    acc += qcore::omega_power(q, static_cast<long long>(m) * d) *
                           w[static_cast<std::size_t>(d)];
                zq[static_cast<std::size_t>((i - 1) * (q - 1) + m - 1)] += p * acc;
            }
        }
    }

    result.y_hat.resize(static_cast<std::size_t>(n));
    result.site_populations.resize(static_cast<std::size_t>(n));
    result.zq_grid.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& row = result.site_populations[static_cast<std::size_t>(i)];
        row.assign(static_cast<std::size_t>(q), 0.0);
        int best = 0;
        for (int d = 0; d < q; ++d) {
            row[static_cast<std::size_t>(d)] = pop[static_cast<std::size_t>(i * q + d)];
            if (row[static_cast<std::size_t>(d)] > row[static_cast<std::size_t>(best)] + 1e-15)
                best = d;
        }
        result.y_hat[static_cast<std::size_t>(i)] = best;
        auto& grid = result.zq_grid[static_cast<std::size_t>(i)];
        grid.assign(static_cast<std::size_t>(q - 1), cplx{0.0, 0.0});
        for (int m = 1; m < q; ++m)
            grid[static_cast<std::size_t>(m - 1)] =
                zq[static_cast<std::size_t>(i * (q - 1) + m - 1)];
    }
    return result;
}

SignalReport simulate_readout(const SignalReport& report, const NoiseConfig& noise) {
    if (report.local_dim != 2)
        throw DomainError("readout simulation is defined for q = 2 signal reports");
    if (noise.sigma_read < 0.0) throw DomainError("sigma_read must be >= 0");
    if (noise.repetitions < 1) throw DomainError("repetitions must be >= 1");

    SignalReport out = report;
    const double sigma_eff =
        noise.sigma_read / std::sqrt(static_cast<double>(noise.repetitions));
    if (sigma_eff == 0.0) return out;
    for (std::size_t i = 0; i < out.e_site.size(); ++i) {
        // One derived stream per site: draws do not depend on evaluation order.
        Rng rng = Rng::derived(noise.seed, i + 1);
        out.e_site[i] += sigma_eff * rng.next_gaussian();
    }
    return out;
}

long long estimate_repetitions(int n, double q_min, double sigma_read, double z) {
    if (n < 1) throw DomainError("site count must be >= 1");
    if (q_min <= 0.5 || q_min > 1.0)
        throw DomainError("q_min must lie in (1/2, 1], got " + std::to_string(q_min));
    if (sigma_read < 0.0) throw DomainError("sigma_read must be >= 0");
    if (z <= 0.0) throw DomainError("z must be > 0");
    if (sigma_read == 0.0) return 1;
    const double gap = (2.0 * q_min - 1.0) * 2.0 / static_cast<double>(n);
    const double m = std::ceil(std::pow(2.0 * z * sigma_read / gap, 2.0));
    return std::max(1LL, static_cast<long long>(m));
}

} // namespace bulkq::models
