// Copyright 2026 The AutoLR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "autolr/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "autolr/error.hpp"
#include "autolr/fitness.hpp"
#include "autolr/harness.hpp"
#include "autolr/io.hpp"
#include "autolr/run_config.hpp"
#include "autolr/scheduler.hpp"
#include "autolr/sge.hpp"

namespace autolr {

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string out_dir;
};

struct ResolvedPolicy {
    std::string name;
    SchedulerAst ast;
    std::optional<std::uint64_t> train_seed; // set when loaded from an archive
    std::optional<double> recorded_fitness;
};

ResolvedPolicy resolve_policy(const std::string& spec, const Grammar& grammar, const MappingLimits& limits) {
    if (fs::is_regular_file(spec)) {
        const auto records = read_archive(spec, grammar, limits);
        const auto& best = best_record(records);
        return {fs::path(spec).stem().string(), best.individual.ast, best.individual.eval_meta.train_seed,
                best.individual.fitness};
    }
    if (spec == "baseline") {
        return {"baseline", baseline_policy(ConstantGrids::from_grammar(grammar)), std::nullopt, std::nullopt};
    }
    return {"policy", parse_phenotype(spec, grammar), std::nullopt, std::nullopt};
}

// "name=<phenotype or path>" or a bare phenotype/path.
std::pair<std::string, std::string> split_named(const std::string& spec) {
    auto eq = spec.find('=');
    if (eq != std::string::npos && eq > 0) {
        auto name = spec.substr(0, eq);
        bool ident = std::all_of(name.begin(), name.end(), [](unsigned char c) {
            return std::isalnum(c) || c == '_' || c == '-' || c == '.';
        });
        if (ident) {
            return {name, spec.substr(eq + 1)};
        }
    }
    return {{}, spec};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot write " + path.string());
    }
    return f;
}

void write_config_copy(const RunConfig& cfg, const std::string& config_path) {
    auto f = open_out(cfg.output / "config.json");
    if (!config_path.empty()) {
        std::ifstream in(config_path, std::ios::binary);
        f << in.rdbuf();
    } else {
        f << dump_run_config(cfg);
    }
}

void print_report(std::ostream& out, const FitnessReport& r) {
    out << std::setprecision(10);
    out << "fitness: " << r.fitness << '\n'
        << "best_validation_accuracy: " << r.best_validation_accuracy << '\n'
        << "final_validation_loss: " << r.final_validation_loss << '\n'
        << "epochs_trained: " << r.epochs_trained << '\n'
        << "early_stopped: " << (r.early_stopped ? "true" : "false") << '\n'
        << "diverged: " << (r.diverged ? "true" : "false") << '\n';
    if (!r.note.empty()) {
        out << "note: " << r.note << '\n';
    }
}

int cmd_evolve(RunConfig& cfg, const CommonFlags& flags, std::ostream& out) {
    const auto grammar = load_grammar(cfg);
    auto split = std::make_shared<const DataSplit>(make_split(cfg));
    cfg.evolution.jobs = flags.jobs;
    cfg.evolution.validate();

    auto result = run_experiment(cfg.scenario, cfg.evolution, grammar, cfg.trainer, split, cfg.training);

    ensure_dir(cfg.output);
    write_config_copy(cfg, flags.config_path);
    {
        auto f = open_out(cfg.output / "evolution.csv");
        write_evolution_csv(f, result.history, cfg.log_wall_clock);
    }
    {
        auto f = open_out(cfg.output / "champions.jsonl");
        write_archive(f, result.history.improvements);
    }
    const auto& champ = result.champion;
    const auto shape =
        classify_shape(simulate_schedule(champ.ast, static_cast<int>(cfg.scenario.epochs), cfg.training.initial_lr));
    std::ostringstream summary;
    summary << std::setprecision(17) << "scenario: " << cfg.scenario.id << '\n'
            << "runs: " << cfg.evolution.runs << '\n'
            << "generations: " << cfg.evolution.generations << '\n'
            << "champion: " << champ.phenotype << '\n'
            << "fitness: " << champ.fitness.value_or(0.0) << '\n'
            << "train_seed: " << champ.eval_meta.train_seed << '\n'
            << "epochs_trained: " << champ.eval_meta.epochs_trained << '\n'
            << "shape: " << to_string(shape) << '\n';
    for (std::size_t r = 0; r < result.history.run_champions.size(); ++r) {
        const auto& c = result.history.run_champions[r];
        summary << "run " << r << ": " << c.fitness.value_or(0.0) << ' ' << c.phenotype << '\n';
    }
    {
        auto f = open_out(cfg.output / "summary.txt");
        f << summary.str();
    }
    out << summary.str();
    return 0;
}

int cmd_eval(RunConfig& cfg, const std::string& policy_spec, std::optional<std::uint64_t> train_seed,
             bool write_trace, std::ostream& out) {
    const auto grammar = load_grammar(cfg);
    const auto policy = resolve_policy(policy_spec, grammar, cfg.evolution.limits);
    const auto split = make_split(cfg);
    auto config = cfg.scenario.apply(cfg.training);
    config.train_seed = train_seed.value_or(policy.train_seed.value_or(0));

    const auto report = evaluate_policy(policy.ast, cfg.trainer, split, config);
    out << "policy: " << render(policy.ast) << '\n'
        << "scenario: " << cfg.scenario.id << '\n'
        << "train_seed: " << config.train_seed << '\n';
    print_report(out, report);
    if (write_trace) {
        ensure_dir(cfg.output);
        auto f = open_out(cfg.output / "trace.csv");
        write_trace_csv(f, report.trace);
    }
    return 0;
}

int cmd_curve(RunConfig& cfg, const std::string& policy_spec, int epochs, std::optional<double> initial_lr,
              std::ostream& out) {
    const auto grammar = load_grammar(cfg);
    const auto policy = resolve_policy(policy_spec, grammar, cfg.evolution.limits);
    const auto curve = simulate_schedule(policy.ast, epochs, initial_lr.value_or(cfg.training.initial_lr));
    ensure_dir(cfg.output);
    {
        auto f = open_out(cfg.output / "curve.csv");
        write_curve_csv(f, curve);
    }
    out << "policy: " << render(policy.ast) << '\n' << "shape: " << to_string(classify_shape(curve)) << '\n';
    return 0;
}

int cmd_oracle(RunConfig& cfg, const CommonFlags& flags, std::ostream& out) {
    const auto grammar = load_grammar(cfg);
    const auto grids = ConstantGrids::from_grammar(grammar);
    const auto split = make_split(cfg);
    auto config = cfg.scenario.apply(cfg.training);
    config.train_seed = run_train_seed(cfg.seed, 0);
    const auto table = brute_force_constants(cfg.trainer, split, config, grids.lr, flags.jobs);
    ensure_dir(cfg.output);
    {
        auto f = open_out(cfg.output / "oracle.csv");
        write_oracle_csv(f, table);
    }
    out << std::setprecision(17) << "rows: " << table.rows.size() << '\n'
        << "argmax_lr: " << format_shortest(table.best().lr) << '\n'
        << "fitness: " << table.best().fitness << '\n';
    return 0;
}

int cmd_compare(RunConfig& cfg, const CommonFlags& flags, const std::vector<std::string>& policy_specs,
                const std::vector<std::string>& scenario_names, std::optional<std::size_t> runs, bool no_baseline,
                std::ostream& out) {
    const auto grammar = load_grammar(cfg);
    std::vector<NamedPolicy> policies;
    for (std::size_t i = 0; i < policy_specs.size(); ++i) {
        auto [name, spec] = split_named(policy_specs[i]);
        auto p = resolve_policy(spec, grammar, cfg.evolution.limits);
        policies.push_back({name.empty() ? p.name + std::to_string(i + 1) : name, p.ast});
    }
    if (!no_baseline) {
        policies.push_back({"baseline", baseline_policy(ConstantGrids::from_grammar(grammar))});
    }
    if (policies.empty()) {
        throw ConfigError("compare needs at least one policy");
    }
    std::vector<Scenario> scenarios = cfg.compare_scenarios;
    if (!scenario_names.empty()) {
        scenarios.clear();
        for (const auto& s : scenario_names) {
            scenarios.push_back(Scenario::named(s));
        }
    }
    const auto split = make_split(cfg);
    const auto report =
        compare_policies(policies, scenarios, runs.value_or(cfg.compare_runs), cfg.trainer, split, cfg.training, flags.jobs);
    ensure_dir(cfg.output);
    {
        auto f = open_out(cfg.output / "comparison.csv");
        write_comparison_csv(f, report);
    }
    std::ostringstream table;
    write_comparison_table(table, report);
    {
        auto f = open_out(cfg.output / "comparison.txt");
        f << table.str();
    }
    out << table.str();
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Evolve learning-rate schedules with structured grammatical evolution.", "autolr"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonFlags flags;
    auto* config_opt = app.add_option("--config", flags.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", flags.seed, "Master random seed (overrides the config)");
    app.add_option("--jobs", flags.jobs, "Parallel fitness evaluations")->check(CLI::PositiveNumber)->capture_default_str();
    auto* out_opt = app.add_option("--out", flags.out_dir, "Output directory (overrides the config)");
    (void)config_opt;

    // evolve
    auto* evolve = app.add_subcommand("evolve", "Run the evolutionary search and write logs and champions");
    std::size_t generations = 0, runs = 0, population = 0;
    double mutation_rate = 0.0;
    std::string scenario_name;
    bool wall_clock = false;
    auto* gen_opt = evolve->add_option("--generations", generations, "Generations per run");
    auto* runs_opt = evolve->add_option("--runs", runs, "Independent runs");
    auto* pop_opt = evolve->add_option("--population", population, "Individuals per generation");
    auto* mut_opt = evolve->add_option("--mutation-rate", mutation_rate, "Per-gene mutation probability");
    auto* evolve_scenario = evolve->add_option("--scenario", scenario_name, "Training regime: S1, S2 or S3");
    evolve->add_flag("--wall-clock", wall_clock, "Record wall-clock seconds in evolution.csv");

    // eval
    auto* eval = app.add_subcommand("eval", "Train under one policy and report its fitness");
    std::string eval_policy;
    std::uint64_t eval_seed = 0;
    bool eval_trace = false;
    eval->add_option("--policy", eval_policy, "Phenotype text, champions.jsonl path, or \"baseline\"")->required();
    auto* eval_scenario = eval->add_option("--scenario", scenario_name, "Training regime: S1, S2 or S3");
    auto* eval_seed_opt = eval->add_option("--train-seed", eval_seed, "Training seed (default: archive seed or 0)");
    eval->add_flag("--trace", eval_trace, "Write trace.csv to the output directory");

    // curve
    auto* curve = app.add_subcommand("curve", "Export the learning-rate curve of a policy");
    std::string curve_policy;
    int curve_epochs = 100;
    double curve_initial = default_initial_lr;
    curve->add_option("--policy", curve_policy, "Phenotype text, champions.jsonl path, or \"baseline\"")->required();
    curve->add_option("--epochs", curve_epochs, "Epochs to simulate")->check(CLI::PositiveNumber)->capture_default_str();
    auto* initial_opt = curve->add_option("--initial-lr", curve_initial, "Previous learning rate seen at epoch 1");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Evaluate every constant learning rate on the grid");
    auto* oracle_scenario = oracle->add_option("--scenario", scenario_name, "Training regime: S1, S2 or S3");

    // compare
    auto* compare = app.add_subcommand("compare", "Compare policies across scenarios over several seeds");
    std::vector<std::string> compare_policies_in;
    std::vector<std::string> compare_scenarios_in;
    std::size_t compare_runs = 0;
    bool no_baseline = false;
    compare->add_option("--policy", compare_policies_in, "[name=]phenotype or champions.jsonl path (repeatable)");
    compare->add_option("--scenarios", compare_scenarios_in, "Scenarios to test (default: from config)")->delimiter(',');
    auto* compare_runs_opt = compare->add_option("--runs", compare_runs, "Training seeds per cell");
    compare->add_flag("--no-baseline", no_baseline, "Do not add the static 0.01 baseline");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        RunConfig cfg = flags.config_path.empty() ? RunConfig{} : load_run_config(flags.config_path);
        for (const auto& w : cfg.warnings) {
            err << "autolr: warning: " << w << '\n';
        }
        if (*seed_opt) {
            cfg.seed = flags.seed;
            cfg.evolution.rng_seed = flags.seed;
        }
        if (*out_opt) {
            cfg.output = flags.out_dir;
        }
        if (*evolve_scenario || *eval_scenario || *oracle_scenario) {
            cfg.scenario = Scenario::named(scenario_name);
        }

        if (*evolve) {
            if (*gen_opt) {
                cfg.evolution.generations = generations;
            }
            if (*runs_opt) {
                cfg.evolution.runs = runs;
            }
            if (*pop_opt) {
                cfg.evolution.population_size = population;
                cfg.evolution.elitism = std::min(cfg.evolution.elitism, std::max<std::size_t>(population, 1));
            }
            if (*mut_opt) {
                cfg.evolution.mutation_rate = mutation_rate;
            }
            cfg.log_wall_clock = cfg.log_wall_clock || wall_clock;
            return cmd_evolve(cfg, flags, out);
        }
        if (*eval) {
            return cmd_eval(cfg, eval_policy, *eval_seed_opt ? std::optional(eval_seed) : std::nullopt, eval_trace,
                            out);
        }
        if (*curve) {
            return cmd_curve(cfg, curve_policy, curve_epochs, *initial_opt ? std::optional(curve_initial) : std::nullopt,
                             out);
        }
        if (*oracle) {
            return cmd_oracle(cfg, flags, out);
        }
        if (*compare) {
            return cmd_compare(cfg, flags, compare_policies_in, compare_scenarios_in,
                               *compare_runs_opt ? std::optional(compare_runs) : std::nullopt, no_baseline, out);
        }
    } catch (const std::exception& e) {
        err << "autolr: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

} // namespace autolr
