// Copyright 2026 The cimbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "cimbench/bench.hpp"
#include "cimbench/error.hpp"
#include "cimbench/instance_io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cimbench;
using bench::json;
namespace fs = std::filesystem;

namespace {

json small_config(const fs::path& out) {
    json doc = json::parse(R"({
      "schema_version": 1,
      "problems": [{"class": "sk", "n": [8]}],
      "instances_per_cell": 1,
      "trials": 10,
      "base_seed": 3,
      "solvers": [{"name": "cim", "type": "cim", "round_trips": 200, "fmax": "auto"}]
    })");
    doc["output_dir"] = out.string();
    return doc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args) {
    const int status = std::system((std::string(CIMBENCH_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("campaign config validation") {
    const auto dir = testing::scratch_dir("cfg");
    CHECK_NOTHROW(bench::parse_campaign(small_config(dir)));
    auto broken = [&](auto edit) {
        json doc = small_config(dir);
        edit(doc);
        return doc;
    };
    CHECK_THROWS_AS(bench::parse_campaign(broken([](json& d) { d["schema_version"] = 2; })), ConfigError);
    CHECK_THROWS_AS(bench::parse_campaign(broken([](json& d) { d.erase("solvers"); })), ConfigError);
    CHECK_THROWS_AS(bench::parse_campaign(broken([](json& d) { d["solvers"][0].erase("round_trips"); })),
                    ConfigError);
    CHECK_THROWS_AS(bench::parse_campaign(broken([](json& d) { d["solvers"][0]["type"] = "qa"; })), ConfigError);
    CHECK_THROWS_AS(bench::parse_campaign(broken([](json& d) { d["problems"][0]["n"] = json::array(); })),
                    ConfigError);
    CHECK_THROWS_AS(bench::parse_campaign(broken([](json& d) {
                        d["problems"][0] = {{"class", "regular-maxcut"}, {"n", 9}, {"d", 3}};
                    })),
                    ConfigError);
    CHECK_THROWS_AS(bench::parse_campaign(broken([](json& d) {
                        d["solvers"].push_back({{"name", "sa"}, {"type", "sa"}, {"sweeps", 10}, {"beta_start", 0.1}});
                    })),
                    ConfigError);
    CHECK_THROWS_AS(bench::parse_campaign(broken([](json& d) { d["solvers"].push_back(d["solvers"][0]); })),
                    ConfigError);
    CHECK_THROWS_AS(bench::parse_campaign(broken([](json& d) { d["trials"] = "many"; })), ConfigError);
    const auto cfg = bench::parse_campaign(small_config(dir));
    CHECK(bench::config_digest(cfg) == bench::config_digest(bench::parse_campaign(broken([](json& d) {
              d["output_dir"] = "/elsewhere";
              d["jobs"] = 3;
          }))));
    CHECK(bench::config_digest(cfg) != bench::config_digest(bench::parse_campaign(broken([](json& d) {
              d["trials"] = 11;
          }))));
    fs::remove_all(dir);
}

TEST_CASE("campaign writes one record and resumes") {
    const auto dir = testing::scratch_dir("one");
    const auto cfg = bench::parse_campaign(small_config(dir / "out"));
    const auto first = bench::run_campaign(cfg);
    CHECK(first.cells == 1);
    CHECK(first.written == 1);
    const auto again = bench::run_campaign(cfg);
    CHECK(again.written == 0);
    CHECK(again.skipped == 1);
    const auto records = bench::read_records(dir / "out" / "records.jsonl");
    REQUIRE(records.size() == 1);
    const auto& r = records[0];
    CHECK(r.n == 8);
    CHECK(r.trials == 10);
    CHECK(r.successes <= 10);
    CHECK(r.ground_proven);
    CHECK(r.t_ann_unit == "round_trips");
    CHECK(r.t_ann_physical == doctest::Approx(2.5e-9 * 8 * 200));
    CHECK(fs::exists(dir / "out" / "instances" / (r.instance_id + ".json")));
    CHECK(io::content_hash(io::read_instance(dir / "out" / "instances" / (r.instance_id + ".json"))) ==
          r.instance_hash);
    const auto manifest = io::read_json(dir / "out" / "manifest.json");
    CHECK(manifest["config_digest"] == bench::config_digest(cfg));
    CHECK(manifest.contains("code_version"));
    CHECK(manifest.contains("created_at"));

    // Config drift is refused.
    json changed = small_config(dir / "out");
    changed["trials"] = 12;
    CHECK_THROWS_AS(bench::run_campaign(bench::parse_campaign(changed)), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("interrupted appends are repaired") {
    const auto dir = testing::scratch_dir("torn");
    json doc = small_config(dir);
    doc["instances_per_cell"] = 3;
    const auto cfg = bench::parse_campaign(doc);
    bench::run_campaign(cfg);
    const auto path = dir / "records.jsonl";
    const std::string full = slurp(path);
    // Drop the last record and leave half of it behind, as a crash would.
    const auto cut = full.rfind('\n', full.size() - 2);
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << full.substr(0, cut + 1) << full.substr(cut + 1, 30);
    }
    const auto resumed = bench::run_campaign(cfg);
    CHECK(resumed.written == 1);
    CHECK(resumed.skipped == 2);
    CHECK(bench::read_records(path).size() == 3);
    fs::remove_all(dir);
}

TEST_CASE("campaigns are deterministic") {
    const auto dir = testing::scratch_dir("det");
    json doc = json::parse(R"({
      "schema_version": 1,
      "problems": [{"class": "sk", "n": [8, 12]}, {"class": "regular-maxcut", "n": [10], "d": [3]},
                   {"class": "mobius", "n": [8]}],
      "instances_per_cell": 2, "trials": 8, "base_seed": 5,
      "solvers": [
        {"name": "cim", "type": "cim", "round_trips": [50, 200], "fmax": "auto"},
        {"name": "sa", "type": "sa", "sweeps": 50, "beta_start": 0.1, "beta_end": 3.0},
        {"name": "pt", "type": "pt", "replicas": 4, "beta_min": 0.2, "beta_max": 2.0, "sweeps": 40, "swap_interval": 2},
        {"name": "emb", "type": "embedded-sa", "chimera": "8x8x4", "jc": "auto", "sweeps": 100,
         "beta_start": 0.1, "beta_end": 10.0}]
    })");
    doc["output_dir"] = (dir / "a").string();
    doc["jobs"] = 1;
    const auto s = bench::run_campaign(bench::parse_campaign(doc));
    CHECK(s.failed == 0);
    CHECK(s.cells == 7 * 5);
    doc["output_dir"] = (dir / "b").string();
    doc["jobs"] = 3;
    bench::run_campaign(bench::parse_campaign(doc));
    auto sorted_lines = [](const fs::path& p) {
        std::vector<std::string> lines;
        std::ifstream in(p);
        for (std::string line; std::getline(in, line);) lines.push_back(line);
        std::sort(lines.begin(), lines.end());
        return lines;
    };
    CHECK(sorted_lines(dir / "a" / "records.jsonl") == sorted_lines(dir / "b" / "records.jsonl"));
    for (const auto& r : bench::read_records(dir / "a" / "records.jsonl")) {
        CHECK(bench::validate_record(bench::to_json(r)).empty());
        CHECK(r.t_ann_physical > 0);
    }
    fs::remove_all(dir);
}

TEST_CASE("solver failures are recorded and the campaign continues") {
    const auto dir = testing::scratch_dir("fail");
    json doc = json::parse(R"({
      "schema_version": 1,
      "problems": [{"class": "regular-maxcut", "n": [10], "d": [4]}, {"class": "sk", "n": [6]}],
      "instances_per_cell": 1, "trials": 4,
      "solvers": [{"name": "cim", "type": "cim", "round_trips": 50, "fmax": "auto"}]
    })");
    doc["output_dir"] = dir.string();
    const auto s = bench::run_campaign(bench::parse_campaign(doc));
    CHECK(s.failed == 1);
    CHECK(s.written == 1);
    CHECK(slurp(dir / "failures.jsonl").find("regular") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("record validation") {
    bench::RunRecord r;
    r.cell_id = "c";
    r.instance_id = "i";
    r.instance_hash = "h";
    r.problem_class = "sk";
    r.n = 10;
    r.solver = "cim";
    r.solver_type = "cim";
    r.params_digest = "d";
    r.trials = 10;
    r.successes = 3;
    r.t_ann_native = 1000;
    r.t_ann_unit = "round_trips";
    r.t_ann_physical = 1e-5;
    auto doc = bench::to_json(r);
    CHECK(bench::validate_record(doc).empty());
    CHECK(bench::record_from_json(doc).successes == 3);
    auto bad = doc;
    bad["successes"] = 11;
    CHECK_FALSE(bench::validate_record(bad).empty());
    bad = doc;
    bad["t_ann_physical"] = 0;
    CHECK_FALSE(bench::validate_record(bad).empty());
    bad = doc;
    bad.erase("solver");
    CHECK_FALSE(bench::validate_record(bad).empty());
    CHECK_THROWS_AS(bench::record_from_json(bad), ConfigError);
    CHECK_THROWS_AS(bench::read_records("/nonexistent/records.jsonl"), IoError);
}

TEST_CASE("record analysis") {
    std::vector<bench::RunRecord> records;
    auto add = [&](int n, double t, int successes, const std::string& id) {
        bench::RunRecord r;
        r.instance_id = id;
        r.problem_class = "sk";
        r.n = n;
        r.solver = "cim";
        r.solver_type = "cim";
        r.trials = 100;
        r.successes = successes;
        r.t_ann_native = t;
        r.t_ann_physical = analysis::cim_wallclock(n, long(t), analysis::Machine::ntt_parallel);
        records.push_back(r);
    };
    for (int n : {10, 20, 30, 40})
        for (int k = 0; k < 3; ++k) {
            add(n, 1000, int(100 * std::exp(-std::pow(n / 35.0, 2))) - k, "i" + std::to_string(k));
            add(n, 100, int(60 * std::exp(-std::pow(n / 25.0, 2))) - k, "i" + std::to_string(k));
        }
    const auto result = bench::analyze_records(records, bench::FitModel::square_exp, true, std::nullopt);
    CHECK(result.cells.size() == 8);
    for (const auto& c : result.cells) {
        CHECK(c.instances == 3);
        CHECK(c.t_soln == analysis::time_to_solution(c.p.median, c.t_ann_physical));
    }
    bool fitted = false;
    for (const auto& f : result.fits)
        if (f.value("model", "") == "square-exp" && f.contains("n0") && f["t_ann_native"] == 1000) {
            CHECK(f["n0"].get<double>() == doctest::Approx(35).epsilon(0.05));
            fitted = true;
        }
    CHECK(fitted);
    REQUIRE(result.envelopes.size() == 1);
    const auto retimed = bench::analyze_records(records, bench::FitModel::square_exp, false,
                                                analysis::Machine::stanford);
    CHECK(retimed.cells[0].t_ann_physical == doctest::Approx(analysis::cim_wallclock(
                                                  10, long(retimed.cells[0].t_ann_native), analysis::Machine::stanford)));

    const auto dir = testing::scratch_dir("analysis");
    bench::write_analysis(dir, result);
    const std::string cells = slurp(dir / "cells.csv");
    CHECK(cells.rfind("n,t_ann,p_median,p_q25,p_q75,t_soln", 0) == 0);
    CHECK(fs::exists(dir / "fit_summary.json"));
    CHECK(fs::exists(dir / "envelope.csv"));
    fs::remove_all(dir);
}

TEST_CASE("figure bundles at smoke scale") {
    const auto dir = testing::scratch_dir("repro");
    bench::ReproOptions o;
    o.scale = bench::Scale::smoke;
    for (const std::string tag : {"fig2c", "fig3b", "figS8", "figS10", "jc-sweep"}) {
        o.tag = tag;
        const auto files = bench::repro_figure(o, dir / tag);
        CHECK(!files.empty());
        for (const auto& f : files) CHECK_MESSAGE(fs::exists(f), f.string());
        CHECK(fs::exists(dir / tag / "README.md"));
    }
    CHECK(slurp(dir / "figS8" / "figS8.csv").rfind("n,c,f_max,p_median", 0) == 0);
    CHECK(slurp(dir / "fig2c" / "fig2c.csv").rfind("n,p_median,p_q25,p_q75", 0) == 0);
    o.tag = "fig2c";
    o.side = "dw";
    try {
        bench::repro_figure(o, dir / "dw");
        FAIL("expected refusal");
    } catch (const ConfigError& ex) {
        CHECK(std::string(ex.what()).find("out of scope") != std::string::npos);
    }
    o.side = "cim";
    o.tag = "fig9";
    CHECK_THROWS_AS(bench::repro_figure(o, dir / "x"), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("default output root follows the environment") {
    ::setenv("CIMBENCH_OUTPUT_ROOT", "/tmp/somewhere", 1);
    CHECK(bench::default_output_root() == fs::path("/tmp/somewhere"));
    ::unsetenv("CIMBENCH_OUTPUT_ROOT");
    CHECK(bench::default_output_root() == fs::path("cimbench-out"));
}

TEST_CASE("command-line exit codes") {
    const auto dir = testing::scratch_dir("cli");
    const std::string d = dir.string();
    CHECK(run_cli("gen --class mobius --n 16 --out " + d + "/m.json") == 0);
    CHECK(run_cli("gen --class sk --n 8 --seed 2 --count 3 --out " + d + "/many") == 0);
    CHECK(std::distance(fs::directory_iterator(dir / "many"), fs::directory_iterator{}) == 3);
    CHECK(run_cli("solve --solver brute --instance " + d + "/m.json --out " + d + "/s.json") == 0);
    CHECK(io::read_json(dir / "s.json")["best_energy"] == -20);
    CHECK(run_cli("solve --solver pt --sweeps 200 --instance " + d + "/m.json") == 0);
    CHECK(run_cli("cim --instance " + d + "/m.json --trials 5 --round-trips 100 --out " + d + "/c.json") == 0);
    CHECK(io::read_json(dir / "c.json")["rows"].size() == 1);
    CHECK(run_cli("cim --instance " + d + "/m.json --trials 5 --round-trips 50 --sweep-fmax 0.1:0.5:3 --out " + d +
                  "/cs.json") == 0);
    CHECK(io::read_json(dir / "cs.json")["rows"].size() == 3);
    CHECK(run_cli("cim --instance " + d + "/m.json --trials 1 --round-trips 10 --record-trajectory " + d +
                  "/t.csv") == 0);
    CHECK(fs::exists(dir / "t.csv"));
    CHECK(run_cli("embed --instance " + d + "/m.json --chimera 4x4x4 --jc 2 --out " + d + "/e.json") == 0);
    CHECK(io::read_json(dir / "e.json").contains("embedding"));
    CHECK(run_cli("embedded-sweep --instance " + d + "/m.json --jc-grid 0.5:2:3 --trials 3 --sweeps 50 --out " + d +
                  "/w.csv") == 0);
    CHECK(run_cli("gen --class nope --n 5") == 2);
    CHECK(run_cli("gen --class regular --n 5 --d 3") == 2);
    CHECK(run_cli("cim --instance " + d + "/m.json --fmax lots") == 2);
    CHECK(run_cli("solve --instance " + d + "/missing.json") == 4);
    CHECK(run_cli("repro fig2c --side dw") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("--help") == 0);

    std::ofstream(dir / "camp.json") << small_config(dir / "camp").dump();
    CHECK(run_cli("campaign --config " + d + "/camp.json") == 0);
    CHECK(run_cli("analyze --records " + d + "/camp/records.jsonl --out " + d + "/an") == 0);
    CHECK(fs::exists(dir / "an" / "cells.csv"));
    CHECK(run_cli("analyze --records " + d + "/camp/records.jsonl --model cubic") == 2);
    CHECK(run_cli("gen --class sk --n 40 --out " + d + "/big.json") == 0);
    CHECK(run_cli("solve --solver brute --instance " + d + "/big.json") == 2);
    // A campaign with a failed cell exits with the solver code.
    json failing = small_config(dir / "camp2");
    failing["problems"][0] = {{"class", "regular-maxcut"}, {"n", 10}, {"d", 4}};
    std::ofstream(dir / "camp2.json") << failing.dump();
    CHECK(run_cli("campaign --config " + d + "/camp2.json") == 3);
    fs::remove_all(dir);
}
