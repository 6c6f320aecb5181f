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

#pragma once

// Campaign orchestration: instance suites, solver dispatch, an append-only
// result store with resume, record analysis and figure bundles.

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cimbench/analysis.hpp"
#include "cimbench/cim.hpp"
#include "cimbench/ising.hpp"
#include "cimbench/solvers.hpp"
#include "json.hpp"

namespace cimbench::bench {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
/// Nominal cost of one single-spin Metropolis update, used to express SA/PT
/// sweeps in seconds without measuring wall time.
inline constexpr double kNominalSpinUpdateSeconds = 1e-9;

struct ProblemSpec {
    ising::ProblemClass problem_class;
    std::vector<int> sizes;
    std::vector<int> degrees;  // regular-maxcut only
};

enum class SolverKind { cim, sa, pt, embedded_sa };

struct SolverSpec {
    std::string name;
    SolverKind kind = SolverKind::cim;
    json block;  // as written in the config

    // cim
    cim::CimParams cim;
    std::vector<long> round_trips;
    std::optional<double> f_max;  // nullopt: optimal_fmax rule
    analysis::Machine machine = analysis::Machine::ntt_parallel;
    // sa, embedded-sa
    solvers::SaOptions sa;
    // pt
    solvers::PtConfig pt;
    // embedded-sa
    std::string chimera = "16x16x4";
    std::optional<double> j_c;  // nullopt: jc_heuristic rule
};

struct CampaignConfig {
    int schema_version = kSchemaVersion;
    std::vector<ProblemSpec> problems;
    int instances_per_cell = 20;
    int trials = 100;
    std::uint64_t base_seed = 1;
    std::vector<SolverSpec> solvers;
    solvers::OracleOptions oracle;
    std::filesystem::path output_dir;
    unsigned jobs = 0;
    json raw;
};

/// Throws ConfigError on a missing or malformed field.
CampaignConfig parse_campaign(const json& doc);
CampaignConfig load_campaign(const std::filesystem::path& path);

/// Digest of everything that determines the records (not output_dir or jobs).
std::string config_digest(const CampaignConfig& cfg);

struct RunRecord {
    std::string cell_id;
    std::string instance_id;
    std::string instance_hash;
    std::string problem_class;
    int n = 0;
    std::optional<int> degree;
    std::string solver;
    std::string solver_type;
    std::string params_digest;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double ground_energy = 0.0;
    bool ground_proven = false;
    double t_ann_native = 0.0;
    std::string t_ann_unit;  // "round_trips" or "sweeps"
    double t_ann_physical = 0.0;
    json extra = json::object();
};

json to_json(const RunRecord& record);
RunRecord record_from_json(const json& doc);
/// Empty when the document is a valid record, otherwise the first problem found.
std::string validate_record(const json& doc);

std::vector<RunRecord> read_records(const std::filesystem::path& path);

/// Append-only JSON-lines store plus manifest.json. Appends are serialised
/// through one mutex and flushed line by line.
class ResultStore {
  public:
    /// Creates the directory if needed. An existing manifest with a different
    /// config digest raises ConfigError.
    ResultStore(std::filesystem::path dir, const std::string& config_digest);

    bool has(const std::string& cell_id) const;
    void append(const RunRecord& record);
    void record_failure(const std::string& cell_id, const std::string& message);
    std::vector<RunRecord> records() const;
    std::filesystem::path records_path() const { return dir_ / "records.jsonl"; }
    const std::filesystem::path& dir() const noexcept { return dir_; }

  private:
    void write_manifest(bool touch);

    std::filesystem::path dir_;
    std::string digest_;
    std::string created_at_;
    std::set<std::string> done_;
    mutable std::mutex mutex_;
};

struct CampaignSummary {
    std::size_t cells = 0;
    std::size_t written = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
};

CampaignSummary run_campaign(const CampaignConfig& cfg);

// Analysis over stored records.

struct CellRow {
    std::string problem_class;
    std::string solver;
    int n;
    double t_ann_native;
    double t_ann_physical;  // median over instances
    std::size_t instances;
    analysis::Quartiles p;
    double t_soln;
};

struct RecordAnalysis {
    std::vector<CellRow> cells;
    json fits = json::array();
    std::vector<std::pair<std::string, std::vector<analysis::EnvelopePoint>>> envelopes;  // per class/solver
};

enum class FitModel { square_exp, logistic };

/// Per-record probabilities use analysis::point_probability; cells are the
/// median over instances. When `machine` is set, CIM records are re-timed with
/// cim_wallclock from their round-trip counts.
RecordAnalysis analyze_records(const std::vector<RunRecord>& records, FitModel model, bool envelope,
                               std::optional<analysis::Machine> machine);

/// Writes cells.csv, fit_summary.json and (if present) envelope.csv into dir.
void write_analysis(const std::filesystem::path& dir, const RecordAnalysis& result);

// Figure bundles.

enum class Scale { desk, smoke };

struct ReproOptions {
    std::string tag;          // fig2c | fig3b | figS8 | figS10 | jc-sweep
    std::string side = "cim"; // fig2c / fig3b: cim or dw
    Scale scale = Scale::desk;
    std::uint64_t seed = 2018;
    unsigned jobs = 0;
};

/// Writes plot-ready CSVs and a README.md into dir; returns the files written.
std::vector<std::filesystem::path> repro_figure(const ReproOptions& options, const std::filesystem::path& dir);

/// Default output root: $CIMBENCH_OUTPUT_ROOT, or ./cimbench-out.
std::filesystem::path default_output_root();

}  // namespace cimbench::bench
