// Copyright 2026 The pskqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pskqkd/analytic.hpp"
#include "pskqkd/keyrate.hpp"

namespace pskqkd {

/// Raised for malformed configuration files. what() names the line/column
/// or the offending field path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter sweep: a scenario template plus the axes varied over it.
/// Empty axes mean "use the template value".
struct SweepConfig {
    ScenarioConfig base;
    std::vector<double> distances;
    std::vector<double> excess_noises;
    std::vector<double> alphas;
    std::vector<double> delta_rs;
    std::vector<double> delta_as;
    std::vector<double> delta_cs;
    int workers = 1;
    std::string csv_path;
    std::string records_path;  // JSON lines, one object per point
};

constexpr std::size_t kMaxGridPoints = 1000000;

/// Read a JSON document; parse errors carry line and column.
nlohmann::json load_json_file(const std::string& path);
nlohmann::json parse_json_text(const std::string& text);

/// Apply "a.b.c=value" to a document. The value is parsed as JSON and falls
/// back to a plain string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

ScenarioConfig parse_scenario(const nlohmann::json& j);
SweepConfig parse_sweep(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const ScenarioConfig& s);

/// Grid points in row-major order: distance, excess noise, alpha, delta_r,
/// delta_a, delta_c (last varies fastest). Throws ConfigError above
/// kMaxGridPoints.
std::vector<ScenarioConfig> expand_grid(const SweepConfig& cfg);

/// One CSV row. Field names follow the CSV columns.
struct ResultRow {
    std::string protocol;
    int n_states = 4;
    double L_km = 0, eta = 1, xi = 0, beta = 0;
    std::string detector_kind = "untrusted";
    double eta_d = 1, nu_el = 0;
    std::string strategy = "ra";
    double alpha = 0, delta_r = 0, delta_a = 0, delta_c = 0;
    int Nc = 0;
    double step1_upper = 0, step2_lower = 0, p_pass = 0, delta_ec = 0, eps_prime = 0;
    double final_rate = 0, reported_rate = 0;
    int iterations = 0;
    std::string status;
    double wallclock_s = 0;
};

const std::vector<std::string>& csv_columns();
/// Columns that identify a grid point (everything before step1_upper).
const std::vector<std::string>& knob_columns();

ResultRow make_row(const ScenarioConfig& s, const KeyRateResult& r);
/// A row for a point whose computation threw.
ResultRow failed_row(const ScenarioConfig& s, const std::string& why);

std::string csv_header();
std::string format_row(const ResultRow& r);
/// Key built from the formatted knob columns, used to resume.
std::string knob_key(const ResultRow& r);

std::vector<ResultRow> read_csv(std::istream& in);
std::vector<ResultRow> read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// Runs every grid point not already in `done` (matched by knob_key) and
/// hands rows to `sink` in grid order, whatever the worker count. A point
/// that throws becomes a "failed: ..." row. Returns all rows of the grid in
/// order, completed ones included.
std::vector<ResultRow> run_sweep(const SweepConfig& cfg, const std::vector<ResultRow>& done,
                                 const std::function<void(const ResultRow&, const KeyRateResult*)>& sink);

/// Full diagnostics for the JSON-lines record file.
nlohmann::json record_json(const ResultRow& row, const KeyRateResult* r);

/// Per-group summary: the best row and the break-even pass probability.
struct Summary {
    std::map<std::string, std::string> group;
    int n_rows = 0;
    std::optional<ResultRow> best;
    double baseline_rate = 0;  // rate of the row with all deltas zero
    bool has_baseline = false;
    /// p_pass where the postselected rate falls back to the baseline, by
    /// linear interpolation between neighbouring grid points (NaN if the
    /// crossing is not bracketed by the data).
    double breakeven_p_pass = 0;
    bool breakeven_interpolated = false;
    std::string status;  // "ok", "no baseline", "all failed"
};

/// Groups rows by the given columns.
/// Failed rows are counted but never chosen. Throws std::invalid_argument
/// on empty input or an unknown column.
std::vector<Summary> report_best(const std::vector<ResultRow>& rows, const std::vector<std::string>& group_by);

/// Default grouping: every knob column except the postselection deltas.
std::vector<std::string> default_group_by();
void write_summary_csv(std::ostream& out, const std::vector<Summary>& sums, const std::vector<std::string>& group_by);

/// Rectangular CSV: first line "im\re" then the real axis; each further
/// line starts with its imaginary coordinate.
void write_ber_csv(std::ostream& out, const BerGrid& g);
void emit_ber_grid(double amplitude, int resolution, const std::string& path);

}  // namespace pskqkd
