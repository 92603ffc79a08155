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


// Command-line front end: single points, sweeps, BER maps, the loss-only
// oracle and sweep summaries.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "pskqkd/analytic.hpp"
#include "pskqkd/channel.hpp"
#include "pskqkd/sweep.hpp"

using namespace pskqkd;
using nlohmann::json;

namespace {

constexpr int kExitNotOptimal = 1;
constexpr int kExitError = 2;

json load_doc(const std::string& path, const std::vector<std::string>& overrides) {
    json doc = path.empty() ? json::object() : load_json_file(path);
    for (const auto& o : overrides) apply_override(doc, o);
    return doc;
}

// Keep only the sections a subcommand understands.
json pick(const json& doc, std::initializer_list<const char*> keep) {
    json out = json::object();
    for (const char* k : keep)
        if (doc.contains(k)) out[k] = doc.at(k);
    return out;
}

double section_number(const json& sec, const char* key, double dflt) {
    if (!sec.contains(key)) return dflt;
    if (!sec.at(key).is_number()) throw ConfigError(std::string(key) + ": expected a number");
    return sec.at(key).get<double>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(path + ": expected numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    if (v.is_object()) {
        // Same range form as the sweep axes.
        SweepConfig tmp;
        json d = {{"axes", {{"distance_km", v}}}};
        return parse_sweep(d).distances;
    }
    throw ConfigError(path + ": expected a number, a list or {start, stop, step}");
}

void print_point(const ResultRow& r) {
    std::fprintf(stderr,
                 "%s L=%g km xi=%g alpha=%g %s dr=%g da=%g dc=%g: step1=%.8g step2=%.8g p_pass=%.6g "
                 "delta_ec=%.6g rate=%.6g [%s, %.1f s]\n",
                 r.protocol.c_str(), r.L_km, r.xi, r.alpha, r.strategy.c_str(), r.delta_r, r.delta_a, r.delta_c,
                 r.step1_upper, r.step2_lower, r.p_pass, r.delta_ec, r.final_rate, r.status.c_str(), r.wallclock_s);
}

int cmd_rate(const std::string& config, const std::vector<std::string>& overrides, const std::string& out_path) {
    json doc = load_doc(config, overrides);
    ScenarioConfig s = parse_scenario(doc.contains("scenario") ? doc.at("scenario") : json::object());
    KeyRateResult k = compute_key_rate(s);
    ResultRow row = make_row(s, k);
    print_point(row);
    if (out_path.empty()) {
        write_csv(std::cout, {row});
    } else {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot write '" + out_path + "'");
        write_csv(out, {row});
    }
    return row.status == "optimal" ? 0 : kExitNotOptimal;
}

int cmd_sweep(const std::string& config, const std::vector<std::string>& overrides, const std::string& out_flag,
              const std::string& records_flag, int workers_flag) {
    json doc = load_doc(config, overrides);
    json sweep_doc = pick(doc, {"scenario", "axes", "workers", "output"});
    SweepConfig cfg = parse_sweep(sweep_doc);
    if (!out_flag.empty()) cfg.csv_path = out_flag;
    if (!records_flag.empty()) cfg.records_path = records_flag;
    if (workers_flag > 0) cfg.workers = workers_flag;

    std::vector<ResultRow> done;
    std::ofstream csv_file;
    std::ostream* csv = &std::cout;
    if (!cfg.csv_path.empty()) {
        const bool exists = std::filesystem::exists(cfg.csv_path) && std::filesystem::file_size(cfg.csv_path) > 0;
        if (exists) done = read_csv_file(cfg.csv_path);
        csv_file.open(cfg.csv_path, std::ios::app);
        if (!csv_file) throw ConfigError("cannot write '" + cfg.csv_path + "'");
        if (!exists) csv_file << csv_header() << '\n';
        csv = &csv_file;
    } else {
        std::cout << csv_header() << '\n';
    }
    std::ofstream rec;
    if (!cfg.records_path.empty()) {
        rec.open(cfg.records_path, std::ios::app);
        if (!rec) throw ConfigError("cannot write '" + cfg.records_path + "'");
        json effective = sweep_doc;
        effective["scenario"] = scenario_to_json(cfg.base);
        effective["workers"] = cfg.workers;
        rec << json{{"type", "config"}, {"config", effective}}.dump() << '\n';
    }
    if (!done.empty()) std::fprintf(stderr, "resuming: %zu rows already in %s\n", done.size(), cfg.csv_path.c_str());

    auto rows = run_sweep(cfg, done, [&](const ResultRow& row, const KeyRateResult* r) {
        *csv << format_row(row) << '\n';
        csv->flush();
        if (rec.is_open()) {
            json j = record_json(row, r);
            j["type"] = "point";
            rec << j.dump() << '\n';
            rec.flush();
        }
        print_point(row);
    });
    bool all_optimal = true;
    for (const auto& r : rows) all_optimal = all_optimal && r.status == "optimal";
    return all_optimal ? 0 : kExitNotOptimal;
}

int cmd_ber(const std::string& config, const std::vector<std::string>& overrides, const std::string& out_path,
            double amplitude, int resolution) {
    json doc = load_doc(config, overrides);
    json sec = doc.contains("ber") ? doc.at("ber") : json::object();
    BerConfig cfg;
    cfg.amplitude = section_number(sec, "amplitude", cfg.amplitude);
    cfg.resolution = static_cast<int>(section_number(sec, "resolution", cfg.resolution));
    cfg.half_width = section_number(sec, "half_width", cfg.half_width);
    if (sec.contains("weights")) cfg.weights = sec.at("weights").get<std::vector<int>>();
    if (amplitude > 0) cfg.amplitude = amplitude;
    if (resolution > 0) cfg.resolution = resolution;
    const BerGrid g = ber_map(cfg);
    if (out_path.empty()) {
        write_ber_csv(std::cout, g);
    } else {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot write '" + out_path + "'");
        write_ber_csv(out, g);
    }
    return 0;
}

int cmd_analytic(const std::string& config, const std::vector<std::string>& overrides, const std::string& out_path) {
    json doc = load_doc(config, overrides);
    json sec = doc.contains("analytic") ? doc.at("analytic") : json::object();
    const int n = static_cast<int>(section_number(sec, "n_states", 4));
    const double beta = section_number(sec, "beta", 0.95);
    const double step = section_number(sec, "step", 0.005);
    const double loss = section_number(sec, "loss_exponent", 0.02);
    std::vector<double> Ls = sec.contains("distance_km") ? number_list(sec.at("distance_km"), "analytic.distance_km")
                                                         : std::vector<double>{20, 50, 80, 100};
    const bool optimize = !sec.contains("alpha") || sec.at("alpha") == "optimal";
    std::vector<double> alphas;
    if (!optimize) alphas = number_list(sec.at("alpha"), "analytic.alpha");

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ConfigError("cannot write '" + out_path + "'");
        out = &file;
    }
    *out << "n_states,L_km,eta,beta,alpha,mutual_info,holevo,rate\n";
    char buf[256];
    for (double L : Ls) {
        const double eta = transmittance(L, loss);
        std::vector<double> as = optimize ? std::vector<double>{find_optimal_alpha(n, eta, beta, step)} : alphas;
        for (double a : as) {
            auto t = lossonly_terms(n, a, eta, beta);
            std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", n, L, eta, beta, a,
                          t.mutual_info, t.holevo, t.rate);
            *out << buf;
        }
    }
    return 0;
}

int cmd_summarize(const std::string& in_path, const std::string& group_by, const std::string& out_path) {
    auto rows = read_csv_file(in_path);
    std::vector<std::string> cols;
    if (group_by.empty()) {
        cols = default_group_by();
    } else {
        std::stringstream ss(group_by);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    auto sums = report_best(rows, cols);
    if (out_path.empty()) {
        write_summary_csv(std::cout, sums, cols);
    } else {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot write '" + out_path + "'");
        write_summary_csv(out, sums, cols);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified key rates for PSK continuous-variable QKD with postselection"};
    app.require_subcommand(1);

    std::string config, out, records, in, group_by;
    std::vector<std::string> overrides;
    int workers = 0;
    int resolution = 0;
    double amplitude = 0;

    auto common = [&](CLI::App* sub, bool need_config) {
        auto* opt = sub->add_option("--config", config, "JSON configuration file");
        if (need_config) opt->required()->check(CLI::ExistingFile);
        else opt->check(CLI::ExistingFile);
        sub->add_option("--override", overrides, "Set a config value, e.g. scenario.alpha=0.75 (repeatable)");
        sub->add_option("--out", out, "Output CSV (default: stdout)");
    };

    auto* rate = app.add_subcommand("rate", "Key rate at a single point");
    common(rate, false);
    auto* sweep = app.add_subcommand("sweep", "Key rates over a parameter grid");
    common(sweep, true);
    sweep->add_option("--workers", workers, "Parallel workers")->check(CLI::PositiveNumber);
    sweep->add_option("--records", records, "JSON-lines diagnostics file");
    auto* ber = app.add_subcommand("ber", "Expected bit error rate over the outcome plane");
    common(ber, false);
    ber->add_option("--amplitude", amplitude, "Coherent-state amplitude")->check(CLI::PositiveNumber);
    ber->add_option("--resolution", resolution, "Grid points per axis")->check(CLI::Range(2, 100000));
    auto* analytic = app.add_subcommand("analytic", "Loss-only key rate and optimal amplitude");
    common(analytic, false);
    auto* summarize = app.add_subcommand("summarize", "Best rate and break-even p_pass per group");
    summarize->add_option("--in", in, "Sweep CSV")->required()->check(CLI::ExistingFile);
    summarize->add_option("--group-by", group_by, "Comma-separated grouping columns");
    summarize->add_option("--out", out, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitError;  // --help exits 0
    }

    try {
        if (*rate) return cmd_rate(config, overrides, out);
        if (*sweep) return cmd_sweep(config, overrides, out, records, workers);
        if (*ber) return cmd_ber(config, overrides, out, amplitude, resolution);
        if (*analytic) return cmd_analytic(config, overrides, out);
        if (*summarize) return cmd_summarize(in, group_by, out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
