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


#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "pskqkd/sweep.hpp"

using namespace pskqkd;
using nlohmann::json;

namespace {

json tiny_doc() {
    return parse_json_text(R"({
      "scenario": {"protocol": "qpsk", "alpha": 0.6, "distance_km": 20, "excess_noise": 0.01,
                   "cutoff": 5, "solver": {"max_fw_iters": 15}},
      "axes": {"delta_r": [0, 0.3], "alpha": [0.5, 0.6]}
    })");
}

std::vector<ResultRow> collect(const SweepConfig& cfg, const std::vector<ResultRow>& done, int* calls = nullptr) {
    return run_sweep(cfg, done, [&](const ResultRow&, const KeyRateResult*) {
        if (calls) ++*calls;
    });
}

std::string without_time(ResultRow r) {
    r.wallclock_s = 0;
    return format_row(r);
}

ResultRow synthetic(double dr, double p_pass, double rate) {
    ResultRow r;
    r.protocol = "qpsk";
    r.L_km = 50;
    r.alpha = 0.7;
    r.delta_r = dr;
    r.p_pass = p_pass;
    r.final_rate = rate;
    r.status = "optimal";
    return r;
}

}  // namespace

TEST(SweepConfig, ParsesAxesAndRanges) {
    auto doc = parse_json_text(R"({"scenario": {}, "axes": {"delta_r": {"start": 0, "stop": 1.2, "step": 0.05},
                                   "distance_km": 50}})");
    auto cfg = parse_sweep(doc);
    ASSERT_EQ(cfg.delta_rs.size(), 25u);
    EXPECT_DOUBLE_EQ(cfg.delta_rs.front(), 0.0);
    EXPECT_DOUBLE_EQ(cfg.delta_rs[3], 0.15);
    EXPECT_DOUBLE_EQ(cfg.delta_rs.back(), 1.2);
    EXPECT_EQ(expand_grid(cfg).size(), 25u);
}

TEST(SweepConfig, GridOrderLastAxisFastest) {
    auto cfg = parse_sweep(tiny_doc());
    auto g = expand_grid(cfg);
    ASSERT_EQ(g.size(), 4u);
    EXPECT_DOUBLE_EQ(g[0].alpha, 0.5);
    EXPECT_DOUBLE_EQ(g[0].delta_r, 0.0);
    EXPECT_DOUBLE_EQ(g[1].alpha, 0.5);
    EXPECT_DOUBLE_EQ(g[1].delta_r, 0.3);
    EXPECT_DOUBLE_EQ(g[2].alpha, 0.6);
}

TEST(SweepConfig, RejectsHugeGrid) {
    auto doc = parse_json_text(R"({"axes": {"alpha": {"start": 0.1, "stop": 1.1, "step": 0.001},
                                            "delta_r": {"start": 0, "stop": 1, "step": 0.0001}}})");
    try {
        expand_grid(parse_sweep(doc));
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("exceed"), std::string::npos);
    }
}

TEST(SweepConfig, ErrorsNameTheField) {
    auto doc = parse_json_text(R"({"scenario": {"solver": {"sdp": {"gap_tol": "x"}}}})");
    try {
        parse_sweep(doc);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("scenario.solver.sdp.gap_tol"), std::string::npos) << e.what();
    }
    doc = parse_json_text(R"({"scenario": {"alpah": 0.7}})");
    EXPECT_THROW(parse_sweep(doc), ConfigError);
    doc = parse_json_text(R"({"scenario": {"alpha": -1}})");
    EXPECT_THROW(parse_sweep(doc), ConfigError);
}

TEST(SweepConfig, SyntaxErrorsCarryLine) {
    try {
        parse_json_text("{\n  \"scenario\": {\n    \"alpha\": 0.7,,\n  }\n}");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(SweepConfig, OverridesSetNestedValues) {
    auto doc = tiny_doc();
    apply_override(doc, "scenario.alpha=0.75");
    apply_override(doc, "scenario.detector.kind=trusted");
    apply_override(doc, "axes.delta_r=[0.1,0.2,0.3]");
    auto cfg = parse_sweep(doc);
    EXPECT_DOUBLE_EQ(cfg.base.alpha, 0.75);
    EXPECT_TRUE(cfg.base.detector.has_value());
    EXPECT_EQ(cfg.delta_rs.size(), 3u);
    EXPECT_THROW(apply_override(doc, "noequals"), ConfigError);
    EXPECT_THROW(apply_override(doc, "scenario.alpha.x=1"), ConfigError);
}

TEST(SweepConfig, ScenarioJsonRoundTrip) {
    auto cfg = parse_sweep(tiny_doc());
    auto again = parse_scenario(scenario_to_json(cfg.base));
    EXPECT_EQ(scenario_to_json(again), scenario_to_json(cfg.base));
}

TEST(Csv, RoundTripIsExact) {
    ResultRow a = synthetic(0.35, 0.812345678901234, 0.0123456789012345);
    a.status = "failed: \"quoted\", with comma";
    a.step2_lower = -std::numeric_limits<double>::infinity();
    ResultRow b = synthetic(0.0, 1.0, std::nan(""));
    std::stringstream ss;
    write_csv(ss, {a, b});
    const std::string first = ss.str();
    auto rows = read_csv(ss);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].status, a.status);
    EXPECT_NEAR(rows[0].p_pass, a.p_pass, 1e-11);
    EXPECT_TRUE(std::isinf(rows[0].step2_lower));
    EXPECT_TRUE(std::isnan(rows[1].final_rate));
    std::stringstream again;
    write_csv(again, rows);
    EXPECT_EQ(again.str(), first);
}

TEST(Csv, RejectsWrongHeader) {
    std::stringstream ss("a,b,c\n1,2,3\n");
    EXPECT_THROW(read_csv(ss), ConfigError);
}

TEST(Csv, HeaderHasAllColumns) {
    EXPECT_EQ(csv_header(),
              "protocol,n_states,L_km,eta,xi,beta,detector_kind,eta_d,nu_el,strategy,alpha,delta_r,delta_a,delta_c,"
              "Nc,step1_upper,step2_lower,p_pass,delta_ec,eps_prime,final_rate,reported_rate,iterations,status,"
              "wallclock_s");
}

TEST(Sweep, SinglePointGivesOneRow) {
    auto doc = tiny_doc();
    doc["axes"] = json::object();
    auto cfg = parse_sweep(doc);
    int calls = 0;
    auto rows = collect(cfg, {}, &calls);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(calls, 1);
    EXPECT_EQ(rows[0].Nc, 5);
    EXPECT_NEAR(rows[0].final_rate, rows[0].step2_lower - rows[0].p_pass * rows[0].delta_ec, 1e-12);
    EXPECT_EQ(rows[0].reported_rate, std::max(0.0, rows[0].final_rate));
}

TEST(Sweep, WorkerCountDoesNotChangeResults) {
    auto cfg = parse_sweep(tiny_doc());
    cfg.workers = 1;
    auto one = collect(cfg, {});
    cfg.workers = 2;
    std::vector<std::string> order;
    auto two = run_sweep(cfg, {}, [&](const ResultRow& r, const KeyRateResult*) { order.push_back(knob_key(r)); });
    ASSERT_EQ(one.size(), two.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(without_time(one[i]), without_time(two[i]));
        EXPECT_EQ(order[i], knob_key(one[i]));
    }
}

TEST(Sweep, ResumeSkipsCompletedPoints) {
    auto cfg = parse_sweep(tiny_doc());
    auto full = collect(cfg, {});
    // Pretend the first two points were written by an interrupted run.
    std::stringstream ss;
    write_csv(ss, {full[0], full[1]});
    auto done = read_csv(ss);
    int calls = 0;
    auto resumed = collect(cfg, done, &calls);
    EXPECT_EQ(calls, 2);
    ASSERT_EQ(resumed.size(), full.size());
    for (std::size_t i = 0; i < full.size(); ++i) EXPECT_EQ(without_time(resumed[i]), without_time(full[i]));
}

TEST(Sweep, InvalidPointRejectedBeforeRunning) {
    auto cfg = parse_sweep(tiny_doc());
    cfg.base.solver.eps_tilde = 2.0;
    int calls = 0;
    EXPECT_THROW(collect(cfg, {}, &calls), ConfigError);
    EXPECT_EQ(calls, 0);
}

TEST(Sweep, FailedRowKeepsKnobs) {
    auto cfg = parse_sweep(tiny_doc());
    auto g = expand_grid(cfg);
    auto r = failed_row(g[1], "solver blew up");
    EXPECT_EQ(r.status, "failed: solver blew up");
    EXPECT_TRUE(std::isnan(r.final_rate));
    EXPECT_DOUBLE_EQ(r.delta_r, 0.3);
    EXPECT_EQ(r.Nc, 5);
}

TEST(Sweep, RecordHasDiagnostics) {
    auto doc = tiny_doc();
    doc["axes"] = json::object();
    KeyRateResult kept;
    auto rows = run_sweep(parse_sweep(doc), {}, [&](const ResultRow&, const KeyRateResult* r) { kept = *r; });
    auto j = record_json(rows[0], &kept);
    EXPECT_TRUE(j.contains("objective_history"));
    EXPECT_TRUE(j.contains("min_slack_eig"));
    EXPECT_EQ(j["status"], rows[0].status);
}

TEST(ReportBest, SingleRow) {
    auto s = report_best({synthetic(0, 1, 0.01)}, default_group_by());
    ASSERT_EQ(s.size(), 1u);
    ASSERT_TRUE(s[0].best);
    EXPECT_DOUBLE_EQ(s[0].best->final_rate, 0.01);
    EXPECT_TRUE(s[0].has_baseline);
    EXPECT_DOUBLE_EQ(s[0].breakeven_p_pass, 1.0);
}

TEST(ReportBest, ConcaveDataRecoversMaxAndCrossing) {
    // rate(p) = 0.01 + 0.02 (1 - p) - 0.05 (1 - p)^2: peak at p = 0.8,
    // back at the baseline 0.01 when 1 - p = 0.4.
    std::vector<ResultRow> rows;
    for (int i = 0; i <= 10; ++i) {
        const double q = 0.1 * i;
        rows.push_back(synthetic(0.1 * i, 1 - q, 0.01 + 0.02 * q - 0.05 * q * q));
    }
    auto s = report_best(rows, default_group_by());
    ASSERT_EQ(s.size(), 1u);
    ASSERT_TRUE(s[0].best);
    EXPECT_NEAR(s[0].best->p_pass, 0.8, 1e-12);
    EXPECT_NEAR(s[0].best->final_rate, 0.012, 1e-12);
    EXPECT_NEAR(s[0].breakeven_p_pass, 0.6, 1e-9);
    EXPECT_EQ(s[0].status, "ok");
}

TEST(ReportBest, InterpolatesBetweenGridPoints) {
    std::vector<ResultRow> rows = {synthetic(0, 1, 0.01), synthetic(0.1, 0.9, 0.02), synthetic(0.2, 0.7, 0.015),
                                   synthetic(0.3, 0.5, 0.005)};
    auto s = report_best(rows, default_group_by());
    // Crossing between (0.7, 0.015) and (0.5, 0.005) at rate 0.01.
    EXPECT_NEAR(s[0].breakeven_p_pass, 0.6, 1e-12);
    EXPECT_TRUE(s[0].breakeven_interpolated);
}

TEST(ReportBest, AllFailedGroup) {
    ResultRow a = synthetic(0, 1, std::nan(""));
    a.status = "failed: boom";
    ResultRow b = synthetic(0.2, 0.8, std::nan(""));
    b.status = "failed: boom";
    auto s = report_best({a, b}, default_group_by());
    ASSERT_EQ(s.size(), 1u);
    EXPECT_FALSE(s[0].best);
    EXPECT_EQ(s[0].status, "all failed");
    EXPECT_EQ(s[0].n_rows, 2);
}

TEST(ReportBest, GroupsSeparately) {
    std::vector<ResultRow> rows = {synthetic(0, 1, 0.01), synthetic(0.2, 0.8, 0.02)};
    ResultRow far = synthetic(0, 1, 0.001);
    far.L_km = 100;
    rows.push_back(far);
    auto s = report_best(rows, default_group_by());
    EXPECT_EQ(s.size(), 2u);
    EXPECT_THROW(report_best(rows, {"no_such_column"}), std::invalid_argument);
    EXPECT_THROW(report_best({}, default_group_by()), std::invalid_argument);
}

TEST(BerCsv, CenterAndSymmetry) {
    BerConfig cfg;
    cfg.resolution = 21;
    auto g = ber_map(cfg);
    std::stringstream ss;
    write_ber_csv(ss, g);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line.rfind("im\\re,", 0), 0u);
    std::vector<std::vector<double>> vals;
    while (std::getline(ss, line)) {
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        vals.emplace_back();
        while (std::getline(ls, cell, ',')) vals.back().push_back(std::stod(cell));
    }
    ASSERT_EQ(vals.size(), 21u);
    EXPECT_NEAR(vals[10][10], 0.5, 1e-12);
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 21; ++j) EXPECT_NEAR(vals[i][j], vals[20 - i][20 - j], 1e-10);
}
