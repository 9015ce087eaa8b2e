#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bulkq/analysis.hpp"
#include "bulkq/errors.hpp"
#include "bulkq/hqa.hpp"
#include "bulkq/models.hpp"
#include "bulkq/oracle.hpp"
#include "bulkq/qcore.hpp"
#include "bulkq/selftest.hpp"
#include "bulkq/version.hpp"

namespace py = pybind11;

using namespace bulkq;

namespace {

// Arity inferred from the value-vector length; mirrors the file format rule.
oracle::TruthTable make_table(const std::vector<int>& values, int q) {
    std::size_t dim = 1;
    int n = 0;
    while (dim < values.size()) {
        dim *= static_cast<std::size_t>(q);
        ++n;
    }
    if (n == 0 || dim != values.size())
        throw DomainError("table length " + std::to_string(values.size()) +
                          " is not a positive power of " + std::to_string(q));
    oracle::TruthTable t;
    t.local_dim = q;
    t.arity = n;
    t.values = values;
    oracle::validate(t);
    return t;
}

qcore::ThermalSpec make_thermal(const std::vector<double>& ground_probs) {
    return qcore::ThermalSpec::qubit(ground_probs);
}

qcore::ThermalSpec make_qudit_thermal(int q, const std::vector<std::vector<double>>& dists) {
    qcore::ThermalSpec spec;
    spec.local_dim = q;
    spec.site_distributions = dists;
    qcore::validate(spec);
    return spec;
}

models::ModelKind model_from(const std::string& text) {
    if (text == "sqc" || text == "SQC") return models::ModelKind::SQC;
    if (text == "bqcp" || text == "BQC_P") return models::ModelKind::BQC_P;
    if (text == "bqc" || text == "BQC") return models::ModelKind::BQC;
    throw DomainError("unknown model \"" + text + "\" (choose sqc, bqcp or bqc)");
}

py::dict signal_dict(const models::SignalReport& r) {
    py::dict d;
    d["model"] = std::string(models::to_string(r.model));
    d["local_dim"] = r.local_dim;
    d["sites"] = r.sites;
    d["e_site"] = r.e_site;
    d["promise"] = std::string(oracle::to_string(r.promise));
    d["seed"] = r.seed;
    if (r.outcome) d["outcome"] = *r.outcome;
    if (r.ancilla_p1) d["ancilla_p1"] = *r.ancilla_p1;
    if (!r.zq_grid.empty()) d["zq_grid"] = r.zq_grid;
    return d;
}

py::dict decision_dict(const models::Decision& d) {
    py::dict out;
    out["verdict"] = std::string(oracle::to_string(d.verdict));
    out["witness_site"] = d.witness_site ? py::cast(*d.witness_site) : py::none();
    out["margin"] = d.margin;
    return out;
}

py::dict epsilon_dict(const analysis::EpsilonReport& r) {
    py::dict d;
    d["n"] = r.n;
    d["epsilon"] = r.epsilon;
    d["argmin_table"] = r.argmin_table.values;
    d["exhaustive"] = r.exhaustive;
    d["samples"] = r.samples;
    d["seed"] = r.seed;
    d["bound_2_over_n"] = r.bound_2_over_n;
    return d;
}

py::dict certify_dict(const hqa::ProportionalityReport& r) {
    py::dict d;
    d["mode"] = r.mode == hqa::CertifyMode::Adjoint ? "adjoint" : "pointwise";
    d["tolerance"] = r.tolerance;
    py::list rows;
    for (const auto& o : r.observables) {
        py::dict row;
        row["label"] = o.label;
        row["c"] = o.c;
        row["residual"] = o.residual;
        row["pass"] = o.pass;
        rows.append(std::move(row));
    }
    d["observables"] = std::move(rows);
    d["all_pass"] = r.all_pass;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "bulk-ensemble oracle simulation and input-error certification";
    m.attr("__version__") = kVersion;

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InternalError& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        } catch (const Error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    // oracles
    m.def("classify", [](const std::vector<int>& values, int q) {
        return std::string(oracle::to_string(oracle::classify(make_table(values, q))));
    }, py::arg("values"), py::arg("q") = 2,
       "constant / balanced / neither for a q = 2 truth table");
    m.def("constant_table", [](int n, int value, int q) {
        return oracle::constant_table(q, n, value).values;
    }, py::arg("n"), py::arg("value") = 0, py::arg("q") = 2);
    m.def("inner_product_table", [](const std::vector<int>& y, int q) {
        return oracle::inner_product_table(y, q, static_cast<int>(y.size())).values;
    }, py::arg("y"), py::arg("q") = 2);
    m.def("affine_table", [](const std::vector<int>& y, int b, int q) {
        return oracle::affine_table(y, b, q, static_cast<int>(y.size())).values;
    }, py::arg("y"), py::arg("b"), py::arg("q") = 2);
    m.def("sample_balanced", [](int n, std::uint64_t seed) {
        return oracle::sample_balanced(n, seed).values;
    }, py::arg("n"), py::arg("seed"));
    m.def("enumerate_balanced", [](int n) {
        std::vector<std::vector<int>> out;
        for (auto& t : oracle::enumerate_balanced(n)) out.push_back(std::move(t.values));
        return out;
    }, py::arg("n"));
    m.def("balanced_count", &oracle::balanced_count, py::arg("n"));

    // execution models
    m.def("dj_spectrum", [](const std::vector<int>& values) {
        return models::dj_spectrum(make_table(values, 2));
    }, py::arg("values"), "|g(y)|^2 for every output index y");
    m.def("run_dj", [](const std::string& model, const std::vector<int>& values,
                       const std::optional<std::vector<double>>& thermal, std::uint64_t seed) {
        std::optional<qcore::ThermalSpec> spec;
        if (thermal) spec = make_thermal(*thermal);
        const models::SignalReport r = models::run_dj(model_from(model), make_table(values, 2),
                                                      spec, seed);
        py::dict d = signal_dict(r);
        d["decision"] = decision_dict(models::decide_dj(r));
        return d;
    }, py::arg("model"), py::arg("values"), py::arg("thermal") = py::none(),
       py::arg("seed") = 0);
    m.def("run_parity", [](const std::string& model, const std::vector<int>& y,
                           const std::optional<std::vector<double>>& thermal,
                           std::uint64_t seed) {
        std::optional<qcore::ThermalSpec> spec;
        if (thermal) spec = make_thermal(*thermal);
        const models::ParityResult r = models::run_parity(model_from(model), y, spec, seed);
        py::dict d;
        d["report"] = signal_dict(r.report);
        d["y_hat"] = r.y_hat;
        d["margins"] = r.margins;
        d["degenerate_sites"] = r.degenerate_sites;
        return d;
    }, py::arg("model"), py::arg("y"), py::arg("thermal") = py::none(), py::arg("seed") = 0);
    m.def("run_qudit_parity", [](const std::vector<int>& y, int q,
                                 const std::optional<std::vector<std::vector<double>>>& thermal) {
        std::optional<qcore::ThermalSpec> spec;
        if (thermal) spec = make_qudit_thermal(q, *thermal);
        const models::QuditParityResult r =
            models::run_qudit_parity(y, q, static_cast<int>(y.size()), spec);
        py::dict d;
        d["local_dim"] = r.local_dim;
        d["y_hat"] = r.y_hat;
        d["site_populations"] = r.site_populations;
        d["zq_grid"] = r.zq_grid;
        return d;
    }, py::arg("y"), py::arg("q"), py::arg("thermal") = py::none());
    m.def("estimate_repetitions", &models::estimate_repetitions, py::arg("n"), py::arg("q_min"),
          py::arg("sigma_read"), py::arg("z"));

    // analysis
    m.def("epsilon_exact", [](int n) { return epsilon_dict(analysis::epsilon_exact(n)); },
          py::arg("n"));
    m.def("epsilon_sampled", [](int n, std::uint64_t samples, std::uint64_t seed) {
        return epsilon_dict(analysis::epsilon_sampled(n, samples, seed));
    }, py::arg("n"), py::arg("samples"), py::arg("seed") = 0);
    m.def("verify_fact2", [](const std::vector<int>& values,
                             const std::vector<double>& ground_probs) {
        return analysis::verify_fact2(make_table(values, 2), make_thermal(ground_probs));
    }, py::arg("values"), py::arg("ground_probs"),
       "max per-site residual between direct simulation and the attenuation law");
    m.def("commutation_residual", [](const std::vector<int>& values, const std::vector<int>& mask,
                                     int q) {
        return analysis::commutation_residual(make_table(values, q), mask);
    }, py::arg("values"), py::arg("mask"), py::arg("q") = 2);
    m.def("sum_rule_check", [](const std::vector<int>& values) {
        const analysis::SumRuleRecord rec = analysis::sum_rule_check(make_table(values, 2));
        py::dict d;
        d["sum_e"] = rec.sum_e;
        d["rhs"] = rec.rhs;
        d["g0_sq"] = rec.g0_sq;
        d["mean_e"] = rec.mean_e;
        d["average_bound"] = rec.average_bound;
        d["spectrum_total"] = rec.spectrum_total;
        d["ok"] = rec.equality_ok && rec.g0_ok && rec.average_bound_ok && rec.normalized_ok;
        return d;
    }, py::arg("values"));

    // certification
    m.def("certify_oracle_circuit", [](const std::vector<int>& values, int q,
                                       const std::vector<std::vector<double>>& distributions,
                                       double tol) {
        const oracle::TruthTable table = make_table(values, q);
        const qcore::Operator u =
            qcore::circuit_matrix(qcore::dj_gates(table), q, table.arity);
        const qcore::ThermalSpec spec = make_qudit_thermal(q, distributions);
        const qcore::KrausChannel f =
            hqa::conjugated_channel(u, hqa::bitflip_channel(spec, table.arity));
        return certify_dict(hqa::certify(f, hqa::default_observables(q, table.arity), tol));
    }, py::arg("values"), py::arg("q"), py::arg("distributions"), py::arg("tol") = 1e-9,
       "certify the standard transform-oracle-transform circuit against per-site shift errors");

    // acceptance suite
    m.def("selftest", [](int threads) {
        py::list rows;
        selftest::Options options;
        options.threads = threads;
        for (const auto& r : selftest::run_all(options)) {
            py::dict row;
            row["id"] = r.id;
            row["name"] = r.name;
            row["pass"] = r.pass;
            row["detail"] = r.detail;
            row["seconds"] = r.seconds;
            rows.append(std::move(row));
        }
        return rows;
    }, py::arg("threads") = 1);
}
