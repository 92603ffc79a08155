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


#include "pskqkd/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace pskqkd {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double round12(double v) { return std::stod(num(v)); }

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (in_quotes) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                in_quotes = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

// Checked access to an object: records which keys were read so unknown
// ones can be reported with their full path.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    const json* get(const std::string& key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double dflt) {
        const json* v = get(key);
        if (!v) return dflt;
        if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
        return v->get<double>();
    }

    int integer(const std::string& key, int dflt) {
        const json* v = get(key);
        if (!v) return dflt;
        if (!v->is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        return v->get<int>();
    }

    std::string string(const std::string& key, const std::string& dflt) {
        const json* v = get(key);
        if (!v) return dflt;
        if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
        return v->get<std::string>();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(where(it.key()) + ": unknown field");
    }

    std::string where(const std::string& key = "") const {
        std::string p = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
        return p.empty() ? "<root>" : p;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::vector<double> parse_axis(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
            out.push_back(v[i].get<double>());
        }
        if (out.empty()) throw ConfigError(path + ": empty axis");
        return out;
    }
    if (v.is_object()) {
        Fields f(v, path);
        const double start = f.number("start", std::nan(""));
        const double stop = f.number("stop", std::nan(""));
        const double step = f.number("step", std::nan(""));
        f.finish();
        if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
            throw ConfigError(path + ": range needs start, stop and step");
        if (!(step > 0) || stop < start) throw ConfigError(path + ": need step > 0 and stop >= start");
        const double count = std::floor((stop - start) / step + 1e-9) + 1;
        if (count > static_cast<double>(kMaxGridPoints)) throw ConfigError(path + ": range too long");
        std::vector<double> out;
        for (long k = 0; k < static_cast<long>(count); ++k) out.push_back(round12(start + k * step));
        return out;
    }
    throw ConfigError(path + ": expected a number, a list or {start, stop, step}");
}

std::string protocol_name(int n_states) { return n_states == 8 ? "8psk" : "qpsk"; }

std::vector<std::string> row_fields(const ResultRow& r) {
    return {r.protocol,        std::to_string(r.n_states), num(r.L_km),        num(r.eta),
            num(r.xi),         num(r.beta),                r.detector_kind,    num(r.eta_d),
            num(r.nu_el),      r.strategy,                 num(r.alpha),       num(r.delta_r),
            num(r.delta_a),    num(r.delta_c),             std::to_string(r.Nc), num(r.step1_upper),
            num(r.step2_lower), num(r.p_pass),             num(r.delta_ec),    num(r.eps_prime),
            num(r.final_rate), num(r.reported_rate),       std::to_string(r.iterations), r.status,
            num(r.wallclock_s)};
}

double to_double(const std::string& s, const std::string& col, std::size_t line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        // stod rejects nothing we emit except the textual infinities on some libcs.
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan" || s == "-nan") return std::nan("");
        throw ConfigError("csv line " + std::to_string(line) + ", column " + col + ": not a number: '" + s + "'");
    }
}

int to_int(const std::string& s, const std::string& col, std::size_t line) {
    double v = to_double(s, col, line);
    if (v != std::floor(v)) throw ConfigError("csv line " + std::to_string(line) + ", column " + col + ": not an integer");
    return static_cast<int>(v);
}

ResultRow row_from_fields(const std::vector<std::string>& f, std::size_t line) {
    const auto& c = csv_columns();
    ResultRow r;
    std::size_t i = 0;
    auto s = [&]() { return f[i++]; };
    auto d = [&]() { ++i; return to_double(f[i - 1], c[i - 1], line); };
    auto n = [&]() { ++i; return to_int(f[i - 1], c[i - 1], line); };
    r.protocol = s();
    r.n_states = n();
    r.L_km = d();
    r.eta = d();
    r.xi = d();
    r.beta = d();
    r.detector_kind = s();
    r.eta_d = d();
    r.nu_el = d();
    r.strategy = s();
    r.alpha = d();
    r.delta_r = d();
    r.delta_a = d();
    r.delta_c = d();
    r.Nc = n();
    r.step1_upper = d();
    r.step2_lower = d();
    r.p_pass = d();
    r.delta_ec = d();
    r.eps_prime = d();
    r.final_rate = d();
    r.reported_rate = d();
    r.iterations = n();
    r.status = s();
    r.wallclock_s = d();
    return r;
}

std::string column_value(const ResultRow& r, const std::string& col) {
    const auto& c = csv_columns();
    auto it = std::find(c.begin(), c.end(), col);
    if (it == c.end()) throw std::invalid_argument("unknown column '" + col + "'");
    return row_fields(r)[static_cast<std::size_t>(it - c.begin())];
}

bool usable(const ResultRow& r) { return r.status.rfind("failed", 0) != 0 && std::isfinite(r.final_rate); }

}  // namespace

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_json_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void apply_override(json& doc, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &doc;
    std::stringstream ks(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ks, part, '.')) {
        if (part.empty()) throw ConfigError("override '" + assignment + "': empty path component");
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object() && !node->is_null())
            throw ConfigError("override '" + assignment + "': '" + parts[i] + "' is not an object");
        node = &(*node)[parts[i]];
    }
    if (!node->is_object() && !node->is_null()) throw ConfigError("override '" + assignment + "': parent is not an object");
    (*node)[parts.back()] = value;
}

ScenarioConfig parse_scenario(const json& j) {
    Fields f(j, "scenario");
    ScenarioConfig s;
    const std::string protocol = f.string("protocol", "qpsk");
    if (protocol == "qpsk") {
        s.n_states = 4;
    } else if (protocol == "8psk") {
        s.n_states = 8;
    } else {
        throw ConfigError("scenario.protocol: expected \"qpsk\" or \"8psk\"");
    }
    s.alpha = f.number("alpha", s.n_states == 8 ? 0.9 : 0.7);
    s.channel.distance_km = f.number("distance_km", 50.0);
    s.channel.excess_noise = f.number("excess_noise", 0.01);
    s.channel.loss_exponent = f.number("loss_exponent", 0.02);
    s.beta = f.number("beta", 0.95);
    s.cutoff = f.integer("cutoff", s.n_states == 8 ? 14 : 12);
    const std::string strategy = f.string("strategy", s.n_states == 8 ? "8ra" : "ra");
    try {
        s.strategy = parse_strategy(strategy);
    } catch (const std::invalid_argument&) {
        throw ConfigError("scenario.strategy: unknown strategy '" + strategy + "'");
    }
    s.delta_r = f.number("delta_r", 0.0);
    s.delta_a = f.number("delta_a", 0.0);
    s.delta_c = f.number("delta_c", 0.0);
    if (const json* d = f.get("detector")) {
        Fields df(*d, "scenario.detector");
        const std::string kind = df.string("kind", "untrusted");
        if (kind == "trusted") {
            s.detector = TrustedDetector{df.number("eta_d", 0.72), df.number("nu_el", 0.04)};
        } else if (kind != "untrusted") {
            throw ConfigError("scenario.detector.kind: expected \"trusted\" or \"untrusted\"");
        }
        df.finish();
    }
    s.solver.max_fw_iters = default_fw_iters(s.n_states);
    if (const json* sv = f.get("solver")) {
        Fields sf(*sv, "scenario.solver");
        s.solver.max_fw_iters = sf.integer("max_fw_iters", s.solver.max_fw_iters);
        s.solver.eps_fw = sf.number("eps_fw", s.solver.eps_fw);
        s.solver.eps_tilde = sf.number("eps_tilde", s.solver.eps_tilde);
        s.solver.line_search_tol = sf.number("line_search_tol", s.solver.line_search_tol);
        if (const json* sd = sf.get("sdp")) {
            Fields qf(*sd, "scenario.solver.sdp");
            s.solver.sdp.max_iters = qf.integer("max_iters", s.solver.sdp.max_iters);
            s.solver.sdp.feas_tol = qf.number("feas_tol", s.solver.sdp.feas_tol);
            s.solver.sdp.gap_tol = qf.number("gap_tol", s.solver.sdp.gap_tol);
            qf.finish();
        }
        sf.finish();
    }
    f.finish();
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return s;
}

json scenario_to_json(const ScenarioConfig& s) {
    json j;
    j["protocol"] = protocol_name(s.n_states);
    j["alpha"] = s.alpha;
    j["distance_km"] = s.channel.distance_km;
    j["excess_noise"] = s.channel.excess_noise;
    j["loss_exponent"] = s.channel.loss_exponent;
    j["beta"] = s.beta;
    j["cutoff"] = s.cutoff;
    j["strategy"] = to_string(s.strategy);
    j["delta_r"] = s.delta_r;
    j["delta_a"] = s.delta_a;
    j["delta_c"] = s.delta_c;
    if (s.detector) {
        j["detector"] = {{"kind", "trusted"}, {"eta_d", s.detector->eta_d}, {"nu_el", s.detector->nu_el}};
    } else {
        j["detector"] = {{"kind", "untrusted"}};
    }
    j["solver"] = {{"max_fw_iters", s.solver.max_fw_iters},
                   {"eps_fw", s.solver.eps_fw},
                   {"eps_tilde", s.solver.eps_tilde},
                   {"line_search_tol", s.solver.line_search_tol},
                   {"sdp",
                    {{"max_iters", s.solver.sdp.max_iters},
                     {"feas_tol", s.solver.sdp.feas_tol},
                     {"gap_tol", s.solver.sdp.gap_tol}}}};
    return j;
}

SweepConfig parse_sweep(const json& doc) {
    Fields f(doc, "");
    SweepConfig cfg;
    const json* sc = f.get("scenario");
    cfg.base = parse_scenario(sc ? *sc : json::object());
    if (const json* ax = f.get("axes")) {
        Fields af(*ax, "axes");
        auto axis = [&](const char* key, std::vector<double>& dst) {
            if (const json* v = af.get(key)) dst = parse_axis(*v, std::string("axes.") + key);
        };
        axis("distance_km", cfg.distances);
        axis("excess_noise", cfg.excess_noises);
        axis("alpha", cfg.alphas);
        axis("delta_r", cfg.delta_rs);
        axis("delta_a", cfg.delta_as);
        axis("delta_c", cfg.delta_cs);
        af.finish();
    }
    cfg.workers = f.integer("workers", 1);
    if (cfg.workers < 1) throw ConfigError("workers: must be >= 1");
    if (const json* out = f.get("output")) {
        Fields of(*out, "output");
        cfg.csv_path = of.string("csv", "");
        cfg.records_path = of.string("records", "");
        of.finish();
    }
    f.finish();
    // Validate every axis value against the template up front.
    expand_grid(cfg);
    return cfg;
}

std::vector<ScenarioConfig> expand_grid(const SweepConfig& cfg) {
    auto or_base = [](const std::vector<double>& v, double b) { return v.empty() ? std::vector<double>{b} : v; };
    const auto Ls = or_base(cfg.distances, cfg.base.channel.distance_km);
    const auto xis = or_base(cfg.excess_noises, cfg.base.channel.excess_noise);
    const auto as = or_base(cfg.alphas, cfg.base.alpha);
    const auto drs = or_base(cfg.delta_rs, cfg.base.delta_r);
    const auto das = or_base(cfg.delta_as, cfg.base.delta_a);
    const auto dcs = or_base(cfg.delta_cs, cfg.base.delta_c);
    const double total = static_cast<double>(Ls.size()) * xis.size() * as.size() * drs.size() * das.size() * dcs.size();
    if (total > static_cast<double>(kMaxGridPoints))
        throw ConfigError("axes: " + num(total) + " grid points exceed the limit of " + std::to_string(kMaxGridPoints));
    std::vector<ScenarioConfig> out;
    out.reserve(static_cast<std::size_t>(total));
    for (double L : Ls)
        for (double xi : xis)
            for (double a : as)
                for (double dr : drs)
                    for (double da : das)
                        for (double dc : dcs) {
                            ScenarioConfig s = cfg.base;
                            s.channel.distance_km = L;
                            s.channel.excess_noise = xi;
                            s.alpha = a;
                            s.delta_r = dr;
                            s.delta_a = da;
                            s.delta_c = dc;
                            try {
                                s.validate();
                            } catch (const std::invalid_argument& e) {
                                throw ConfigError(std::string("axes: ") + e.what());
                            }
                            out.push_back(s);
                        }
    return out;
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "protocol",  "n_states",    "L_km",        "eta",       "xi",         "beta",          "detector_kind",
        "eta_d",     "nu_el",       "strategy",    "alpha",     "delta_r",    "delta_a",       "delta_c",
        "Nc",        "step1_upper", "step2_lower", "p_pass",    "delta_ec",   "eps_prime",     "final_rate",
        "reported_rate", "iterations", "status",   "wallclock_s"};
    return cols;
}

const std::vector<std::string>& knob_columns() {
    static const std::vector<std::string> cols(csv_columns().begin(), csv_columns().begin() + 15);
    return cols;
}

ResultRow failed_row(const ScenarioConfig& s, const std::string& why) {
    ResultRow r;
    r.protocol = protocol_name(s.n_states);
    r.n_states = s.n_states;
    r.L_km = s.channel.distance_km;
    r.eta = s.channel.transmittance();
    r.xi = s.channel.excess_noise;
    r.beta = s.beta;
    r.detector_kind = s.detector ? "trusted" : "untrusted";
    r.eta_d = s.detector ? s.detector->eta_d : 1.0;
    r.nu_el = s.detector ? s.detector->nu_el : 0.0;
    r.strategy = to_string(s.strategy);
    r.alpha = s.alpha;
    r.delta_r = s.delta_r;
    r.delta_a = s.delta_a;
    r.delta_c = s.delta_c;
    r.Nc = s.cutoff;
    const double nan = std::nan("");
    r.step1_upper = r.step2_lower = r.p_pass = r.delta_ec = r.eps_prime = r.final_rate = nan;
    r.reported_rate = 0;
    r.status = "failed: " + why;
    return r;
}

ResultRow make_row(const ScenarioConfig& s, const KeyRateResult& k) {
    ResultRow r = failed_row(s, "");
    r.step1_upper = k.step1_upper;
    r.step2_lower = k.step2_lower;
    r.p_pass = k.p_pass;
    r.delta_ec = k.delta_ec;
    r.eps_prime = k.eps_prime;
    r.final_rate = k.final_rate;
    r.reported_rate = k.reported_rate;
    r.iterations = k.iterations;
    r.status = k.status;
    r.wallclock_s = k.wallclock_s;
    return r;
}

std::string csv_header() {
    std::string out;
    for (const auto& c : csv_columns()) out += (out.empty() ? "" : ",") + c;
    return out;
}

std::string format_row(const ResultRow& r) {
    std::string out;
    bool first = true;
    for (const auto& f : row_fields(r)) {
        if (!first) out += ',';
        out += quote(f);
        first = false;
    }
    return out;
}

std::string knob_key(const ResultRow& r) {
    auto f = row_fields(r);
    std::string key;
    for (std::size_t i = 0; i < knob_columns().size(); ++i) key += f[i] + '\x1f';
    return key;
}

std::vector<ResultRow> read_csv(std::istream& in) {
    std::vector<ResultRow> rows;
    std::string line;
    if (!std::getline(in, line)) return rows;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header()) throw ConfigError("csv line 1: header does not match the result schema");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != csv_columns().size())
            throw ConfigError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(csv_columns().size()) +
                              " fields, found " + std::to_string(f.size()));
        rows.push_back(row_from_fields(f, lineno));
    }
    return rows;
}

std::vector<ResultRow> read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return read_csv(in);
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << csv_header() << '\n';
    for (const auto& r : rows) out << format_row(r) << '\n';
}

json record_json(const ResultRow& row, const KeyRateResult* r) {
    json j;
    const auto& cols = csv_columns();
    auto f = row_fields(row);
    for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = f[i];
    // Numeric columns as numbers where they are finite.
    for (const char* c : {"L_km", "eta", "xi", "beta", "eta_d", "nu_el", "alpha", "delta_r", "delta_a", "delta_c",
                          "step1_upper", "step2_lower", "p_pass", "delta_ec", "eps_prime", "final_rate",
                          "reported_rate", "wallclock_s"}) {
        double v = std::stod(j[c].get<std::string>());
        j[c] = std::isfinite(v) ? json(v) : json(nullptr);
    }
    for (const char* c : {"n_states", "Nc", "iterations"}) j[c] = std::stoi(j[c].get<std::string>());
    if (r) {
        j["zeta_eps"] = r->zeta_eps;
        j["fw_converged"] = r->fw_converged;
        j["fw_gap"] = r->fw_gap;
        j["min_slack_eig"] = r->min_slack_eig;
        j["objective_history"] = r->objective_history;
    }
    return j;
}

std::vector<ResultRow> run_sweep(const SweepConfig& cfg, const std::vector<ResultRow>& done,
                                 const std::function<void(const ResultRow&, const KeyRateResult*)>& sink) {
    const auto grid = expand_grid(cfg);
    std::map<std::string, ResultRow> finished;
    for (const auto& r : done) finished.emplace(knob_key(r), r);

    std::vector<ResultRow> rows(grid.size());
    std::vector<std::size_t> todo;
    std::vector<bool> reused(grid.size(), false);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto it = finished.find(knob_key(failed_row(grid[i], "")));
        if (it != finished.end()) {
            rows[i] = it->second;
            reused[i] = true;
        } else {
            todo.push_back(i);
        }
    }

    struct Slot {
        bool ready = false;
        ResultRow row;
        std::unique_ptr<KeyRateResult> result;
    };
    std::vector<Slot> slots(grid.size());
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= todo.size()) return;
            const std::size_t i = todo[t];
            Slot s;
            try {
                s.result = std::make_unique<KeyRateResult>(compute_key_rate(grid[i]));
                s.row = make_row(grid[i], *s.result);
            } catch (const std::exception& e) {
                s.row = failed_row(grid[i], e.what());
                s.result.reset();
            }
            s.ready = true;
            {
                std::lock_guard<std::mutex> lock(mu);
                slots[i] = std::move(s);
            }
            cv.notify_all();
        }
    };

    const int n_workers = static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(cfg.workers, todo.size())));
    std::vector<std::thread> pool;
    if (!todo.empty())
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);

    // Hand rows to the sink strictly in grid order.
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (reused[i]) continue;
        Slot s;
        {
            std::unique_lock<std::mutex> lock(mu);
            cv.wait(lock, [&] { return slots[i].ready; });
            s = std::move(slots[i]);
        }
        rows[i] = s.row;
        sink(s.row, s.result.get());
    }
    for (auto& t : pool) t.join();
    return rows;
}

std::vector<std::string> default_group_by() {
    std::vector<std::string> g;
    for (const auto& c : knob_columns())
        if (c != "delta_r" && c != "delta_a" && c != "delta_c") g.push_back(c);
    return g;
}

std::vector<Summary> report_best(const std::vector<ResultRow>& rows, const std::vector<std::string>& group_by) {
    if (rows.empty()) throw std::invalid_argument("report_best: no rows");
    for (const auto& c : group_by) column_value(rows.front(), c);  // validates names

    std::vector<std::string> order;
    std::map<std::string, std::vector<const ResultRow*>> groups;
    for (const auto& r : rows) {
        std::string key;
        for (const auto& c : group_by) key += column_value(r, c) + '\x1f';
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(&r);
    }

    std::vector<Summary> out;
    for (const auto& key : order) {
        const auto& members = groups[key];
        Summary s;
        for (const auto& c : group_by) s.group[c] = column_value(*members.front(), c);
        s.n_rows = static_cast<int>(members.size());
        s.breakeven_p_pass = std::nan("");

        std::vector<const ResultRow*> ok;
        for (const auto* r : members)
            if (usable(*r)) ok.push_back(r);
        if (ok.empty()) {
            s.status = "all failed";
            out.push_back(s);
            continue;
        }
        const ResultRow* best = ok.front();
        for (const auto* r : ok)
            if (r->final_rate > best->final_rate) best = r;
        s.best = *best;

        const ResultRow* base = nullptr;
        for (const auto* r : ok)
            if (r->delta_r == 0 && r->delta_a == 0 && r->delta_c == 0) base = r;
        if (!base) {
            s.status = "no baseline";
            out.push_back(s);
            continue;
        }
        s.has_baseline = true;
        s.baseline_rate = base->final_rate;
        s.status = "ok";

        // Walk from the optimum toward smaller p_pass until the rate drops
        // below the baseline.
        std::vector<const ResultRow*> by_pass = ok;
        std::stable_sort(by_pass.begin(), by_pass.end(),
                         [](const ResultRow* a, const ResultRow* b) { return a->p_pass > b->p_pass; });
        if (best->final_rate <= s.baseline_rate) {
            s.breakeven_p_pass = base->p_pass;
        } else {
            auto it = std::find(by_pass.begin(), by_pass.end(), best);
            for (; it + 1 != by_pass.end(); ++it) {
                const ResultRow* a = *it;
                const ResultRow* b = *(it + 1);
                if (a->final_rate >= s.baseline_rate && b->final_rate < s.baseline_rate) {
                    const double t = (s.baseline_rate - a->final_rate) / (b->final_rate - a->final_rate);
                    s.breakeven_p_pass = a->p_pass + t * (b->p_pass - a->p_pass);
                    s.breakeven_interpolated = true;
                    break;
                }
            }
        }
        out.push_back(s);
    }
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<Summary>& sums, const std::vector<std::string>& group_by) {
    std::string header;
    for (const auto& c : group_by) header += c + ",";
    header += "n_rows,best_delta_r,best_delta_a,best_delta_c,best_rate,best_reported_rate,best_p_pass,best_status,"
              "baseline_rate,breakeven_p_pass,breakeven_interpolated,status";
    out << header << '\n';
    const double nan = std::nan("");
    for (const auto& s : sums) {
        std::string line;
        for (const auto& c : group_by) line += quote(s.group.at(c)) + ",";
        line += std::to_string(s.n_rows) + ",";
        const ResultRow* b = s.best ? &*s.best : nullptr;
        line += num(b ? b->delta_r : nan) + "," + num(b ? b->delta_a : nan) + "," + num(b ? b->delta_c : nan) + ",";
        line += num(b ? b->final_rate : nan) + "," + num(b ? b->reported_rate : nan) + "," + num(b ? b->p_pass : nan) + ",";
        line += quote(b ? b->status : "") + ",";
        line += num(s.has_baseline ? s.baseline_rate : nan) + "," + num(s.breakeven_p_pass) + ",";
        line += std::string(s.breakeven_interpolated ? "true" : "false") + "," + quote(s.status);
        out << line << '\n';
    }
}

void write_ber_csv(std::ostream& out, const BerGrid& g) {
    out << "im\\re";
    for (double x : g.axis) out << ',' << num(x);
    out << '\n';
    for (std::size_t i = 0; i < g.axis.size(); ++i) {
        out << num(g.axis[i]);
        for (std::size_t j = 0; j < g.axis.size(); ++j)
            out << ',' << num(g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        out << '\n';
    }
}

void emit_ber_grid(double amplitude, int resolution, const std::string& path) {
    BerConfig cfg;
    cfg.amplitude = amplitude;
    cfg.resolution = resolution;
    const BerGrid g = ber_map(cfg);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_ber_csv(out, g);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace pskqkd
