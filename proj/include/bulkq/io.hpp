#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bulkq/analysis.hpp"
#include "bulkq/hqa.hpp"
#include "bulkq/models.hpp"
#include "bulkq/oracle.hpp"
#include "bulkq/qcore.hpp"

// File formats and machine-readable reports.
//
// Truth-table files: one payload line of characters '0'..'q-1', length q^n,
// position = basis index (site 1 most significant); '#' starts a comment.
//
// Circuit files: one record per line, '#' comments:
//   dft_all
//   idft_all
//   oracle <truth-table-path-or-builtin>
//   xmask <digits>
//   gate <site> <q*q complex entries as re,im pairs, row-major>
//
// JSON reports: a versioned envelope; every field except wall_time_ms is a
// deterministic function of (request, seed).
namespace bulkq::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// truth tables

oracle::TruthTable parse_truth_table_text(const std::string& text, int q);
oracle::TruthTable load_truth_table(const std::string& path, int q);
std::string truth_table_to_text(const oracle::TruthTable& table);

// Builtin oracle sources: constant:0, constant:1, ip:<digits>,
// affine:<digits>:<b>, random-balanced:<seed>, file:<path>. A bare path is
// treated as file:<path>. `n` < 0 means "infer from the source".
oracle::TruthTable resolve_oracle(const std::string& source, int q, int n);

// ---------------------------------------------------------------------------
// thermal specs

// "0.75" broadcasts a scalar, "0.8,0.6" lists per-site ground probabilities;
// qudit specs list per-site distributions separated by ';', e.g.
// "0.5,0.3,0.2;0.6,0.2,0.2".
qcore::ThermalSpec parse_thermal_spec(const std::string& text, int q, int n);

// ---------------------------------------------------------------------------
// circuits

struct Circuit {
    int local_dim = 2;
    int sites = 0;
    std::vector<qcore::GateOp> gates;
};

Circuit parse_circuit_text(const std::string& text, int q, int n);
Circuit load_circuit(const std::string& path, int q, int n);

// ---------------------------------------------------------------------------
// reports

json thermal_spec_json(const qcore::ThermalSpec& spec);
json signal_report_json(const models::SignalReport& report);
json decision_json(const models::Decision& decision);
json parity_result_json(const models::ParityResult& result);
json qudit_parity_json(const models::QuditParityResult& result);
json epsilon_report_json(const analysis::EpsilonReport& report);
json proportionality_json(const hqa::ProportionalityReport& report);

// The versioned envelope wrapping every CLI result.
json make_envelope(const std::string& command, const json& request, const json& results,
                   const json& tolerances, double wall_time_ms);

std::string digits_to_string(const std::vector<int>& digits);
std::vector<int> parse_digits(const std::string& text, int q, int expected_length = -1);

std::string read_file(const std::string& path);

} // namespace bulkq::io
