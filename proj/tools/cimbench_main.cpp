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

// Command-line front end. Every verb writes JSON or CSV; exit status is 0 on
// success, 2 on a configuration error, 3 on a solver error, 4 on I/O failure.

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cimbench/analysis.hpp"
#include "cimbench/bench.hpp"
#include "cimbench/chimera.hpp"
#include "cimbench/cim.hpp"
#include "cimbench/error.hpp"
#include "cimbench/instance_io.hpp"
#include "cimbench/ising.hpp"
#include "cimbench/rng.hpp"
#include "cimbench/solvers.hpp"

namespace {

using namespace cimbench;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

/// "lo:hi:steps", inclusive of both ends.
std::vector<double> parse_grid(const std::string& text, bool log_spaced = false) {
    std::vector<double> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad grid '" + text + "', expected lo:hi:steps");
        }
    }
    if (parts.size() != 3 || parts[2] < 1 || parts[2] != std::floor(parts[2]) || !(parts[1] >= parts[0]))
        throw ConfigError("bad grid '" + text + "', expected lo:hi:steps with lo <= hi and integer steps >= 1");
    const int steps = static_cast<int>(parts[2]);
    if (steps == 1) return {parts[0]};
    std::vector<double> grid;
    if (log_spaced && !(parts[0] > 0)) throw ConfigError("bad grid '" + text + "', log-spaced grids need lo > 0");
    for (int k = 0; k < steps; ++k) {
        const double u = static_cast<double>(k) / (steps - 1);
        grid.push_back(log_spaced ? parts[0] * std::pow(parts[1] / parts[0], u) : parts[0] + (parts[1] - parts[0]) * u);
    }
    return grid;
}

std::optional<double> parse_auto(const std::string& text, const char* what) {
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string(what) + " must be 'auto' or a number, got '" + text + "'");
}

void emit(const json& doc, const std::string& out) {
    if (out.empty() || out == "-")
        std::cout << doc.dump(2) << '\n';
    else
        io::write_json(out, doc);
}

json spins_json(const ising::SpinConfig& s) {
    json out = json::array();
    for (auto v : s) out.push_back(int(v));
    return out;
}

double ground_energy_for(const ising::IsingProblem& problem, std::optional<double> given, std::uint64_t seed) {
    if (given) return *given;
    solvers::OracleOptions options;
    options.pt.seed = rng::derive(seed, io::fnv1a("oracle/" + io::content_hash(problem)));
    return solvers::ground_state_oracle(problem, options).best_energy;
}

struct GenArgs {
    std::string cls;
    int n = 0;
    int d = 3;
    std::uint64_t seed = 1;
    int count = 1;
    std::string out;
};

int run_gen(const GenArgs& a) {
    const auto cls = ising::parse_problem_class(a.cls);
    if (a.count < 1) throw ConfigError("--count must be >= 1");
    auto make = [&](std::uint64_t seed) {
        switch (cls) {
            case ising::ProblemClass::sk: return ising::gen_sk(a.n, seed);
            case ising::ProblemClass::dense_maxcut: return ising::gen_dense_maxcut(a.n, seed);
            case ising::ProblemClass::regular_maxcut: return ising::gen_regular(a.n, a.d, seed);
            case ising::ProblemClass::mobius: return ising::gen_mobius_ladder(a.n);
            default: throw ConfigError("cannot generate custom problems");
        }
    };
    if (a.count == 1) {
        emit(io::to_json(make(a.seed)), a.out);
        return 0;
    }
    if (a.out.empty()) throw ConfigError("--count > 1 needs --out DIR");
    for (int k = 0; k < a.count; ++k) {
        const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(k);
        std::string name = std::string(ising::to_string(cls)) + "-n" + std::to_string(a.n);
        if (cls == ising::ProblemClass::regular_maxcut) name += "-d" + std::to_string(a.d);
        name += "-s" + std::to_string(seed) + ".json";
        io::write_instance(fs::path(a.out) / name, make(seed));
    }
    return 0;
}

struct SolveArgs {
    std::string solver = "brute";
    std::string instance;
    std::uint64_t seed = 1;
    int sweeps = 0;
    int replicas = 32;
    double beta_min = 0.1;
    double beta_max = 3.0;
    std::string out;
};

int run_solve(const SolveArgs& a) {
    const auto problem = io::read_instance(a.instance);
    solvers::SolveResult r;
    if (a.solver == "brute") {
        r = solvers::brute_force(problem);
    } else if (a.solver == "sa") {
        solvers::SaOptions o;
        o.seed = a.seed;
        if (a.sweeps > 0) o.sweeps = a.sweeps;
        o.beta_start = a.beta_min;
        o.beta_end = a.beta_max;
        r = solvers::simulated_annealing(problem, o);
    } else if (a.solver == "pt") {
        solvers::PtConfig o;
        o.seed = a.seed;
        o.replicas = a.replicas;
        o.beta_min = a.beta_min;
        o.beta_max = a.beta_max;
        if (a.sweeps > 0) o.sweeps = a.sweeps;
        r = solvers::parallel_tempering(problem, o);
    } else if (a.solver == "oracle") {
        solvers::OracleOptions o;
        o.pt.seed = a.seed;
        r = solvers::ground_state_oracle(problem, o);
    } else {
        throw ConfigError("unknown solver '" + a.solver + "' (brute, sa, pt, oracle)");
    }
    json doc = {{"solver", a.solver},
                {"n", problem.n()},
                {"best_energy", io::number(r.best_energy)},
                {"best_config", spins_json(r.best_config)},
                {"proven_optimal", r.proven_optimal},
                {"energy_evaluations", r.energy_evaluations},
                {"wall_time_s", r.wall_time}};
    if (problem.is_maxcut()) doc["cut_value"] = io::number(ising::cut_value(problem, r.best_config));
    if (r.degeneracy) doc["degeneracy"] = *r.degeneracy;
    if (r.all_runs_agree) doc["all_runs_agree"] = *r.all_runs_agree;
    if (!r.swap_acceptance.empty()) doc["swap_acceptance"] = r.swap_acceptance;
    emit(doc, a.out);
    return 0;
}

struct CimArgs {
    std::string instance;
    int trials = 100;
    long round_trips = 1000;
    std::string fmax = "auto";
    std::uint64_t seed = 1;
    std::string sweep_fmax;
    std::string trajectory;
    std::optional<double> ground;
    bool no_noise = false;
    unsigned jobs = 0;
    std::string out;
};

int run_cim(const CimArgs& a) {
    const auto problem = io::read_instance(a.instance);
    cim::CimParams p;
    p.round_trips = a.round_trips;
    p.noise_on = !a.no_noise;
    const auto fixed = parse_auto(a.fmax, "--fmax");
    p.f_max = fixed ? *fixed : cim::optimal_fmax(problem);
    cim::validate(p);
    if (!a.trajectory.empty()) {
        const auto trial = cim::run_trial(problem, p, cim::trial_seed(a.seed, 0), true);
        cim::write_trajectory_csv(a.trajectory, *trial.trajectory);
    }
    if (a.trials < 1) throw ConfigError("--trials must be >= 1");
    const double ground = ground_energy_for(problem, a.ground, a.seed);
    auto row = [&](double f_max, const analysis::Estimate& e) {
        return json{{"instance", a.instance}, {"F_max", f_max},     {"trials", e.trials},
                    {"successes", e.successes}, {"p_hat", e.p_hat}, {"ci", {e.lo, e.hi}},
                    {"T_ann_roundtrips", a.round_trips}};
    };
    json rows = json::array();
    if (!a.sweep_fmax.empty()) {
        const auto grid = parse_grid(a.sweep_fmax);
        for (const auto& r : cim::fmax_sweep(problem, p, grid, a.trials, ground, a.seed, a.jobs))
            rows.push_back(row(r.f_max, r.estimate));
    } else {
        rows.push_back(row(p.f_max, cim::success_probability(problem, p, a.trials, ground, a.seed, a.jobs)));
    }
    json doc = {{"n", problem.n()}, {"ground_energy", io::number(ground)}, {"rows", rows}};
    emit(doc, a.out);
    return 0;
}

struct EmbedArgs {
    std::string instance;
    std::string chimera = "16x16x4";
    std::string jc = "auto";
    bool split = false;
    std::string out;
};

int run_embed(const EmbedArgs& a) {
    const auto problem = io::read_instance(a.instance);
    const auto g = chimera::parse_chimera(a.chimera);
    const auto emb = chimera::clique_embedding(problem.n(), g);
    const auto jc = parse_auto(a.jc, "--jc");
    const double j_c = jc ? *jc : chimera::jc_heuristic(problem);
    if (!(j_c > 0.0)) throw ConfigError("--jc must be positive");
    chimera::EmbedOptions options;
    options.split_logical_weight = a.split;
    emit(chimera::to_json(chimera::embed_problem(problem, emb, g, j_c, options), g), a.out);
    return 0;
}

struct SweepArgs {
    std::string instance;
    std::string chimera = "16x16x4";
    std::string grid = "0.2:5:8";
    bool absolute = false;
    int trials = 100;
    int sweeps = 1000;
    std::uint64_t seed = 1;
    std::optional<double> ground;
    unsigned jobs = 0;
    std::string out;
};

int run_embedded_sweep(const SweepArgs& a) {
    const auto problem = io::read_instance(a.instance);
    const auto g = chimera::parse_chimera(a.chimera);
    const auto emb = chimera::clique_embedding(problem.n(), g);
    auto grid = parse_grid(a.grid, true);
    const double base = chimera::jc_heuristic(problem);
    if (!a.absolute)
        for (double& x : grid) x *= base;
    chimera::AnnealSettings settings;
    settings.sweeps = a.sweeps;
    const double ground = ground_energy_for(problem, a.ground, a.seed);
    std::ostringstream csv;
    csv << "j_c,jc_ratio,trials,successes,p_hat,p_lo,p_hi,median_broken,mean_broken\n";
    for (const auto& row : chimera::embedded_anneal_sweep(problem, emb, g, grid, settings, a.trials, a.seed, ground,
                                                          a.jobs))
        csv << row.j_c << ',' << row.j_c / base << ',' << row.estimate.trials << ',' << row.estimate.successes << ','
            << row.estimate.p_hat << ',' << row.estimate.lo << ',' << row.estimate.hi << ',' << row.median_broken
            << ',' << row.mean_broken << '\n';
    if (a.out.empty() || a.out == "-")
        std::cout << csv.str();
    else
        io::write_text(a.out, csv.str());
    return 0;
}

struct AnalyzeArgs {
    std::string records;
    std::string model = "square-exp";
    bool envelope = false;
    std::string machine;
    std::string out;
};

int run_analyze(const AnalyzeArgs& a) {
    bench::FitModel model;
    if (a.model == "square-exp")
        model = bench::FitModel::square_exp;
    else if (a.model == "logistic")
        model = bench::FitModel::logistic;
    else
        throw ConfigError("unknown model '" + a.model + "' (square-exp, logistic)");
    std::optional<analysis::Machine> machine;
    if (!a.machine.empty()) machine = analysis::parse_machine(a.machine);
    const auto result = bench::analyze_records(bench::read_records(a.records), model, a.envelope, machine);
    const fs::path dir = a.out.empty() ? bench::default_output_root() / "analysis" : fs::path(a.out);
    bench::write_analysis(dir, result);
    std::cout << dir.string() << '\n';
    return 0;
}

struct CampaignArgs {
    std::string config;
    std::optional<unsigned> jobs;
    std::string out;
};

int run_campaign_verb(const CampaignArgs& a) {
    auto cfg = bench::load_campaign(a.config);
    if (a.jobs) cfg.jobs = *a.jobs;
    if (!a.out.empty()) cfg.output_dir = a.out;
    const auto s = bench::run_campaign(cfg);
    std::cout << json{{"output_dir", cfg.output_dir.string()},
                      {"cells", s.cells},
                      {"written", s.written},
                      {"skipped", s.skipped},
                      {"failed", s.failed}}
                     .dump()
              << '\n';
    return s.failed == 0 ? 0 : kExitSolver;
}

struct ReproArgs {
    bench::ReproOptions options;
    std::string scale = "desk";
    std::string out;
};

int run_repro(ReproArgs a) {
    if (a.scale == "desk")
        a.options.scale = bench::Scale::desk;
    else if (a.scale == "smoke")
        a.options.scale = bench::Scale::smoke;
    else
        throw ConfigError("unknown scale '" + a.scale + "' (desk, smoke)");
    const fs::path dir = a.out.empty() ? bench::default_output_root() / "repro" / a.options.tag : fs::path(a.out);
    for (const auto& path : bench::repro_figure(a.options, dir)) std::cout << path.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent Ising machine and annealing benchmark harness"};
    app.set_version_flag("--version", CIMBENCH_VERSION);
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate problem instances");
    g->add_option("--class", gen.cls, "sk, dense-maxcut, regular-maxcut or mobius")->required();
    g->add_option("--n", gen.n, "Number of spins")->required();
    g->add_option("--d", gen.d, "Degree for regular-maxcut");
    g->add_option("--seed", gen.seed, "Instance seed");
    g->add_option("--count", gen.count, "Number of instances (seeds seed, seed+1, ...)");
    g->add_option("--out", gen.out, "Output file (count 1) or directory");

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Solve an instance with a classical solver");
    s->add_option("--solver", solve.solver, "brute, sa, pt or oracle");
    s->add_option("--instance", solve.instance, "Instance JSON")->required();
    s->add_option("--seed", solve.seed);
    s->add_option("--sweeps", solve.sweeps, "Sweeps (sa, pt)");
    s->add_option("--replicas", solve.replicas, "Replicas (pt)");
    s->add_option("--beta-min", solve.beta_min, "Start / hottest inverse temperature");
    s->add_option("--beta-max", solve.beta_max, "End / coldest inverse temperature");
    s->add_option("--out", solve.out);

    CimArgs cim;
    auto* c = app.add_subcommand("cim", "Run simulated CIM trials");
    c->add_option("--instance", cim.instance)->required();
    c->add_option("--trials", cim.trials);
    c->add_option("--round-trips", cim.round_trips, "Anneal time in round trips");
    c->add_option("--fmax", cim.fmax, "Final pump amplitude or 'auto'");
    c->add_option("--seed", cim.seed);
    c->add_option("--sweep-fmax", cim.sweep_fmax, "Grid lo:hi:steps of F_max values");
    c->add_option("--record-trajectory", cim.trajectory, "CSV path for one recorded trial");
    c->add_option("--ground-energy", cim.ground, "Known ground energy (skips the oracle)");
    c->add_flag("--no-noise", cim.no_noise, "Disable quantum noise");
    c->add_option("--jobs", cim.jobs);
    c->add_option("--out", cim.out);

    EmbedArgs embed;
    auto* e = app.add_subcommand("embed", "Clique-embed an instance into a Chimera graph");
    e->add_option("--instance", embed.instance)->required();
    e->add_option("--chimera", embed.chimera, "Chimera shape, e.g. 16x16x4");
    e->add_option("--jc", embed.jc, "Chain strength or 'auto'");
    e->add_flag("--split", embed.split, "Spread logical couplings over all available couplers");
    e->add_option("--out", embed.out);

    SweepArgs sweep;
    auto* w = app.add_subcommand("embedded-sweep", "Sweep chain strength for annealing on the embedded problem");
    w->add_option("--instance", sweep.instance)->required();
    w->add_option("--chimera", sweep.chimera);
    w->add_option("--jc-grid", sweep.grid, "lo:hi:steps, log-spaced, as multiples of the heuristic J_c");
    w->add_flag("--absolute", sweep.absolute, "Treat the grid as absolute J_c values");
    w->add_option("--trials", sweep.trials);
    w->add_option("--sweeps", sweep.sweeps);
    w->add_option("--seed", sweep.seed);
    w->add_option("--ground-energy", sweep.ground);
    w->add_option("--jobs", sweep.jobs);
    w->add_option("--out", sweep.out);

    AnalyzeArgs analyze;
    auto* z = app.add_subcommand("analyze", "Fit and tabulate stored run records");
    z->add_option("--records", analyze.records, "records.jsonl")->required();
    z->add_option("--model", analyze.model, "square-exp or logistic");
    z->add_flag("--envelope", analyze.envelope, "Compute the optimal anneal-time envelope");
    z->add_option("--machine", analyze.machine, "Re-time CIM records: ntt-parallel, ntt-serial, stanford");
    z->add_option("--out", analyze.out, "Output directory");

    CampaignArgs campaign;
    auto* k = app.add_subcommand("campaign", "Run or resume a benchmark campaign");
    k->add_option("--config", campaign.config, "Campaign JSON")->required();
    k->add_option("--jobs", campaign.jobs, "Worker threads (0: all cores)");
    k->add_option("--out", campaign.out, "Override output_dir");

    ReproArgs repro;
    auto* r = app.add_subcommand("repro", "Regenerate a figure bundle");
    r->add_option("tag", repro.options.tag, "fig2c, fig3b, figS8, figS10 or jc-sweep")->required();
    r->add_option("--side", repro.options.side, "cim or dw (fig2c, fig3b)");
    r->add_option("--scale", repro.scale, "desk or smoke");
    r->add_option("--seed", repro.options.seed);
    r->add_option("--jobs", repro.options.jobs);
    r->add_option("--out", repro.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*g) return run_gen(gen);
        if (*s) return run_solve(solve);
        if (*c) return run_cim(cim);
        if (*e) return run_embed(embed);
        if (*w) return run_embedded_sweep(sweep);
        if (*z) return run_analyze(analyze);
        if (*k) return run_campaign_verb(campaign);
        if (*r) return run_repro(repro);
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return kExitConfig;
    } catch (const IoError& ex) {
        std::cerr << "i/o error: " << ex.what() << '\n';
        return kExitIo;
    } catch (const SolverError& ex) {
        std::cerr << "solver error: " << ex.what() << '\n';
        return kExitSolver;
    } catch (const std::filesystem::filesystem_error& ex) {
        std::cerr << "i/o error: " << ex.what() << '\n';
        return kExitIo;
    }
    return 0;
}
