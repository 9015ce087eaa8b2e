#include "bulkq/io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bulkq/errors.hpp"
#include "bulkq/version.hpp"

namespace bulkq::io {

namespace {

// Lines of `text` with comments ('#' to end of line) removed, paired with
// their 1-based line numbers; blank lines dropped.
std::vector<std::pair<int, std::string>> payload_lines(const std::string& text) {
    std::vector<std::pair<int, std::string>> lines;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::size_t last = line.find_last_not_of(" \t\r");
        lines.emplace_back(number, line.substr(first, last - first + 1));
    }
    return lines;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = text.find(sep, start);
        if (at == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, at - start));
        start = at + 1;
    }
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a number for " + what + ", got \"" + text + "\"");
    }
}

long long parse_int(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected an integer for " + what + ", got \"" + text + "\"");
    }
}

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a seed for " + what + ", got \"" + text + "\"");
    }
}

json cplx_json(const cplx& v) {
    json j;
    j["re"] = v.real();
    j["im"] = v.imag();
    return j;
}

json zq_grid_json(const std::vector<std::vector<cplx>>& grid) {
    json rows = json::array();
    for (const auto& site : grid) {
        json row = json::array();
        for (const auto& v : site) row.push_back(cplx_json(v));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

// ---------------------------------------------------------------------------
// truth tables

oracle::TruthTable parse_truth_table_text(const std::string& text, int q) {
    if (q < 2 || q > 10) throw DomainError("truth-table files are limited to 2 <= q <= 10");
    const auto lines = payload_lines(text);
    if (lines.empty()) throw ParseError("no truth-table payload found");
    if (lines.size() > 1)
        throw ParseError("unexpected second payload line", lines[1].first);

    const auto& [line_no, payload] = lines.front();
    oracle::TruthTable table;
    table.local_dim = q;
    table.values.reserve(payload.size());
    for (std::size_t i = 0; i < payload.size(); ++i) {
        const char c = payload[i];
        if (c < '0' || c >= '0' + q)
            throw ParseError(std::string("character '") + c + "' is not a digit in 0.." +
                                 std::to_string(q - 1),
                             line_no, static_cast<int>(i + 1));
        table.values.push_back(c - '0');
    }

    // The length fixes the arity: it must be a power of q.
    std::size_t dim = 1;
    int n = 0;
    while (dim < table.values.size()) {
        dim *= static_cast<std::size_t>(q);
        ++n;
    }
    if (n == 0 || dim != table.values.size())
        throw ParseError("payload length " + std::to_string(table.values.size()) +
                             " is not a positive power of " + std::to_string(q),
                         line_no);
    table.arity = n;
    oracle::validate(table);
    return table;
}

oracle::TruthTable load_truth_table(const std::string& path, int q) {
    try {
        return parse_truth_table_text(read_file(path), q);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string truth_table_to_text(const oracle::TruthTable& table) {
    oracle::validate(table);
    if (table.local_dim > 10)
        throw DomainError("truth-table files are limited to 2 <= q <= 10");
    std::string out = digits_to_string(table.values);
    out.push_back('\n');
    return out;
}

oracle::TruthTable resolve_oracle(const std::string& source, int q, int n) {
    const auto check_arity = [&](const oracle::TruthTable& table) {
        if (n >= 0 && table.arity != n)
            throw DomainError("oracle \"" + source + "\" has arity " +
                              std::to_string(table.arity) + ", expected " + std::to_string(n));
        return table;
    };

    if (source.rfind("constant:", 0) == 0) {
        if (n < 0) throw DomainError("constant oracles need an explicit site count");
        const int value = static_cast<int>(parse_int(source.substr(9), "the constant value"));
        return oracle::constant_table(q, n, value);
    }
    if (source.rfind("ip:", 0) == 0) {
        const std::vector<int> y = parse_digits(source.substr(3), q);
        return check_arity(oracle::inner_product_table(y, q, static_cast<int>(y.size())));
    }
    if (source.rfind("affine:", 0) == 0) {
        const auto parts = split(source.substr(7), ':');
        if (parts.size() != 2)
            throw ParseError("affine oracles look like affine:<digits>:<offset>");
        const std::vector<int> y = parse_digits(parts[0], q);
        const int b = static_cast<int>(parse_int(parts[1], "the affine offset"));
        return check_arity(oracle::affine_table(y, b, q, static_cast<int>(y.size())));
    }
    if (source.rfind("random-balanced:", 0) == 0) {
        if (q != 2) throw DomainError("random balanced oracles are defined for q = 2");
        if (n < 0) throw DomainError("random balanced oracles need an explicit site count");
        return oracle::sample_balanced(n, parse_seed(source.substr(16), "the oracle seed"));
    }
    if (source.rfind("file:", 0) == 0) return check_arity(load_truth_table(source.substr(5), q));
    return check_arity(load_truth_table(source, q));
}

// ---------------------------------------------------------------------------
// thermal specs

qcore::ThermalSpec parse_thermal_spec(const std::string& text, int q, int n) {
    if (text.empty()) throw ParseError("empty thermal spec");
    qcore::ThermalSpec spec;
    spec.local_dim = q;

    if (q == 2 && text.find(';') == std::string::npos) {
        // Ground probabilities: a scalar broadcasts, a list is per-site.
        const auto parts = split(text, ',');
        std::vector<double> probs;
        probs.reserve(parts.size());
        for (const auto& p : parts) probs.push_back(parse_double(p, "a ground probability"));
        if (n >= 0 && probs.size() == 1) probs.assign(static_cast<std::size_t>(n), probs[0]);
        if (n >= 0 && static_cast<int>(probs.size()) != n)
            throw DomainError("thermal spec lists " + std::to_string(probs.size()) +
                              " sites, expected " + std::to_string(n));
        for (double p : probs) spec.site_distributions.push_back({p, 1.0 - p});
    } else {
        // Per-site distributions separated by ';'; one distribution broadcasts.
        auto sites = split(text, ';');
        for (const auto& site : sites) {
            const auto parts = split(site, ',');
            if (static_cast<int>(parts.size()) != q)
                throw ParseError("each site distribution needs " + std::to_string(q) +
                                 " probabilities, got " + std::to_string(parts.size()));
            std::vector<double> r;
            r.reserve(parts.size());
            for (const auto& p : parts) r.push_back(parse_double(p, "a probability"));
            spec.site_distributions.push_back(std::move(r));
        }
        if (n >= 0 && spec.site_distributions.size() == 1 && n > 1)
            spec.site_distributions.assign(static_cast<std::size_t>(n),
                                           spec.site_distributions.front());
        if (n >= 0 && spec.sites() != n)
            throw DomainError("thermal spec lists " + std::to_string(spec.sites()) +
                              " sites, expected " + std::to_string(n));
    }
    qcore::validate(spec);
    return spec;
}

// ---------------------------------------------------------------------------
// circuits

Circuit parse_circuit_text(const std::string& text, int q, int n) {
    if (n < 1) throw DomainError("circuit parsing needs an explicit site count");
    Circuit circuit;
    circuit.local_dim = q;
    circuit.sites = n;

    for (const auto& [line_no, payload] : payload_lines(text)) {
        std::istringstream in(payload);
        std::string keyword;
        in >> keyword;
        if (keyword == "dft_all") {
            circuit.gates.push_back(qcore::GateOp::dft_all());
        } else if (keyword == "idft_all") {
            circuit.gates.push_back(qcore::GateOp::dft_all_inverse());
        } else if (keyword == "oracle") {
            std::string source;
            in >> source;
            if (source.empty()) throw ParseError("oracle record without a source", line_no);
            circuit.gates.push_back(qcore::GateOp::phase_oracle(resolve_oracle(source, q, n)));
        } else if (keyword == "xmask") {
            std::string digits;
            in >> digits;
            if (digits.empty()) throw ParseError("xmask record without digits", line_no);
            circuit.gates.push_back(qcore::GateOp::shift_mask(parse_digits(digits, q, n)));
        } else if (keyword == "gate") {
            std::string site_text;
            in >> site_text;
            if (site_text.empty())
                throw ParseError("gate record without a site index", line_no);
            const int site = static_cast<int>(parse_int(site_text, "the gate site"));
            CMatrix gate(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
            for (int row = 0; row < q; ++row) {
                for (int col = 0; col < q; ++col) {
                    std::string entry;
                    in >> entry;
                    if (entry.empty())
                        throw ParseError("gate record needs " + std::to_string(q * q) +
                                             " re,im entries",
                                         line_no);
                    const auto parts = split(entry, ',');
                    if (parts.size() > 2)
                        throw ParseError("gate entries look like re or re,im", line_no);
                    const double re = parse_double(parts[0], "a gate entry");
                    const double im =
                        parts.size() == 2 ? parse_double(parts[1], "a gate entry") : 0.0;
                    gate(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) =
                        cplx{re, im};
                }
            }
            std::string extra;
            if (in >> extra) throw ParseError("trailing tokens after the gate entries", line_no);
            circuit.gates.push_back(qcore::GateOp::single_site(site, std::move(gate)));
        } else {
            throw ParseError("unknown circuit record \"" + keyword + "\"", line_no);
        }

        if (keyword != "gate") {
            std::string extra;
            if (in >> extra)
                throw ParseError("trailing tokens after \"" + keyword + "\"", line_no);
        }
    }
    if (circuit.gates.empty()) throw ParseError("the circuit has no gates");
    return circuit;
}

Circuit load_circuit(const std::string& path, int q, int n) {
    try {
        return parse_circuit_text(read_file(path), q, n);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// reports

json thermal_spec_json(const qcore::ThermalSpec& spec) {
    json j;
    j["local_dim"] = spec.local_dim;
    j["sites"] = spec.sites();
    j["site_distributions"] = spec.site_distributions;
    j["min_ground_probability"] = spec.min_ground_probability();
    return j;
}

json signal_report_json(const models::SignalReport& report) {
    json j;
    j["model"] = models::to_string(report.model);
    j["local_dim"] = report.local_dim;
    j["sites"] = report.sites;
    j["promise"] = oracle::to_string(report.promise);
    j["seed"] = report.seed;
    if (!report.e_site.empty()) j["e_site"] = report.e_site;
    if (!report.zq_grid.empty()) j["zq_grid"] = zq_grid_json(report.zq_grid);
    if (report.outcome) j["outcome"] = *report.outcome;
    if (report.thermal) j["thermal"] = thermal_spec_json(*report.thermal);
    if (report.ancilla_p1) j["ancilla_p1"] = *report.ancilla_p1;
    return j;
}

json decision_json(const models::Decision& decision) {
    json j;
    j["verdict"] = oracle::to_string(decision.verdict);
    j["witness_site"] = decision.witness_site ? json(*decision.witness_site) : json(nullptr);
    j["margin"] = decision.margin;
    return j;
}

json parity_result_json(const models::ParityResult& result) {
    json j;
    j["report"] = signal_report_json(result.report);
    j["y_hat"] = result.y_hat;
    j["margins"] = result.margins;
    j["degenerate_sites"] = result.degenerate_sites;
    return j;
}

json qudit_parity_json(const models::QuditParityResult& result) {
    json j;
    j["local_dim"] = result.local_dim;
    j["sites"] = result.sites;
    j["y_hat"] = result.y_hat;
    j["zq_grid"] = zq_grid_json(result.zq_grid);
    j["site_populations"] = result.site_populations;
    if (result.thermal) j["thermal"] = thermal_spec_json(*result.thermal);
    return j;
}

json epsilon_report_json(const analysis::EpsilonReport& report) {
    json j;
    j["n"] = report.n;
    j["epsilon"] = report.epsilon;
    j["argmin_table"] = digits_to_string(report.argmin_table.values);
    j["exhaustive"] = report.exhaustive;
    j["samples"] = report.samples;
    j["seed"] = report.seed;
    j["bound_2_over_n"] = report.bound_2_over_n;
    return j;
}

json proportionality_json(const hqa::ProportionalityReport& report) {
    json j;
    j["mode"] = report.mode == hqa::CertifyMode::Adjoint ? "adjoint" : "pointwise";
    j["tolerance"] = report.tolerance;
    json obs = json::array();
    for (const auto& o : report.observables) {
        json row;
        row["label"] = o.label;
        row["c"] = cplx_json(o.c);
        row["residual"] = o.residual;
        row["pass"] = o.pass;
        obs.push_back(std::move(row));
    }
    j["observables"] = std::move(obs);
    j["all_pass"] = report.all_pass;
    return j;
}

json make_envelope(const std::string& command, const json& request, const json& results,
                   const json& tolerances, double wall_time_ms) {
    json j;
    j["schema"] = kReportSchema;
    j["version"] = kVersion;
    j["command"] = command;
    j["request"] = request;
    j["results"] = results;
    j["tolerances"] = tolerances;
    // The only nondeterministic field; byte-identity checks erase it.
    j["wall_time_ms"] = wall_time_ms;
    return j;
}

std::string digits_to_string(const std::vector<int>& digits) {
    std::string out;
    out.reserve(digits.size());
    for (int d : digits) {
        if (d < 0 || d > 9) throw DomainError("digit strings are limited to 0..9 per digit");
        out.push_back(static_cast<char>('0' + d));
    }
    return out;
}

std::vector<int> parse_digits(const std::string& text, int q, int expected_length) {
    if (text.empty()) throw ParseError("empty digit string");
    if (q > 10) throw DomainError("digit strings are limited to q <= 10");
    std::vector<int> digits;
    digits.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c < '0' || c >= '0' + q)
            throw ParseError(std::string("character '") + c + "' is not a digit in 0.." +
                                 std::to_string(q - 1),
                             1, static_cast<int>(i + 1));
        digits.push_back(c - '0');
    }
    if (expected_length >= 0 && static_cast<int>(digits.size()) != expected_length)
        throw ParseError("expected " + std::to_string(expected_length) + " digits, got " +
                         std::to_string(digits.size()));
    return digits;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace bulkq::io
