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

#include "autolr/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "autolr/error.hpp"

namespace autolr {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!obj.is_object()) {
        throw ConfigError(std::string(where) + " must be a JSON object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& into) {
    if (auto it = obj.find(key); it != obj.end()) {
        try {
            into = it->get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

Scenario parse_scenario(const json& j) {
    if (j.is_string()) {
        return Scenario::named(j.get<std::string>());
    }
    check_keys(j, {"id", "epochs", "early_stop", "patience"}, "scenario");
    Scenario s{"custom", 100, false, 3};
    read(j, "id", s.id);
    read(j, "epochs", s.epochs);
    read(j, "early_stop", s.early_stop);
    read(j, "patience", s.patience);
    if (s.epochs < 1 || s.patience < 1) {
        throw ConfigError("scenario epochs and patience must be at least 1");
    }
    return s;
}

json scenario_json(const Scenario& s) {
    return {{"id", s.id}, {"epochs", s.epochs}, {"early_stop", s.early_stop}, {"patience", s.patience}};
}

TrainerSpec parse_trainer(const json& j, RunConfig& cfg) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("trainer needs a 'kind' (analytic or mlp)");
    }
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "analytic") {
        check_keys(j, {"kind", "objective", "spectrum", "start_point", "steps_per_epoch"}, "trainer");
        AnalyticTrainer a;
        std::string objective = "quadratic";
        read(j, "objective", objective);
        if (objective == "quadratic") {
            a.objective = Objective::quadratic;
        } else if (objective == "rosenbrock") {
            a.objective = Objective::rosenbrock;
            a.start_point = {-1.2, 1.0};
        } else {
            throw ConfigError("unknown objective '" + objective + "'");
        }
        read(j, "spectrum", a.spectrum);
        read(j, "start_point", a.start_point);
        read(j, "steps_per_epoch", a.steps_per_epoch);
        if (a.objective == Objective::quadratic && !j.contains("start_point")) {
            a.start_point.assign(a.spectrum.size(), 1.0);
        }
        return a;
    }
    if (kind == "mlp") {
        check_keys(j, {"kind", "layer_sizes", "hidden", "dataset"}, "trainer");
        MlpTrainer m;
        read(j, "layer_sizes", m.layer_sizes);
        std::string hidden = "relu";
        read(j, "hidden", hidden);
        if (hidden == "relu") {
            m.hidden = Activation::relu;
        } else if (hidden == "identity") {
            m.hidden = Activation::identity;
        } else {
            throw ConfigError("unknown activation '" + hidden + "'");
        }
        if (auto it = j.find("dataset"); it != j.end()) {
            check_keys(*it,
                       {"classes", "dimensions", "train_per_class", "validation_per_class", "test_per_class", "noise",
                        "separation", "seed"},
                       "trainer.dataset");
            auto& d = m.dataset;
            read(*it, "classes", d.classes);
            read(*it, "dimensions", d.dimensions);
            read(*it, "train_per_class", d.train_per_class);
            read(*it, "validation_per_class", d.validation_per_class);
            read(*it, "test_per_class", d.test_per_class);
            read(*it, "noise", d.noise);
            read(*it, "separation", d.separation);
            read(*it, "seed", cfg.data_seed);
        }
        return m;
    }
    throw ConfigError("unknown trainer kind '" + kind + "'");
}

json trainer_json(const TrainerSpec& trainer, std::uint64_t data_seed) {
    if (const auto* a = std::get_if<AnalyticTrainer>(&trainer)) {
        return {{"kind", "analytic"},
                {"objective", a->objective == Objective::quadratic ? "quadratic" : "rosenbrock"},
                {"spectrum", a->spectrum},
                {"start_point", a->start_point},
                {"steps_per_epoch", a->steps_per_epoch}};
    }
    const auto& m = std::get<MlpTrainer>(trainer);
    const auto& d = m.dataset;
    return {{"kind", "mlp"},
            {"layer_sizes", m.layer_sizes},
            {"hidden", m.hidden == Activation::relu ? "relu" : "identity"},
            {"dataset",
             {{"classes", d.classes},
              {"dimensions", d.dimensions},
              {"train_per_class", d.train_per_class},
              {"validation_per_class", d.validation_per_class},
              {"test_per_class", d.test_per_class},
              {"noise", d.noise},
              {"separation", d.separation},
              {"seed", data_seed}}}};
}

} // namespace

RunConfig parse_run_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root,
               {"grammar", "seed", "output", "scenario", "evolution", "trainer", "training", "compare",
                "log_wall_clock"},
               "config");

    RunConfig cfg;
    read(root, "grammar", cfg.grammar);
    read(root, "seed", cfg.seed);
    read(root, "log_wall_clock", cfg.log_wall_clock);
    if (auto it = root.find("output"); it != root.end()) {
        cfg.output = it->get<std::string>();
    }
    if (auto it = root.find("scenario"); it != root.end()) {
        cfg.scenario = parse_scenario(*it);
    }
    if (auto it = root.find("evolution"); it != root.end()) {
        check_keys(*it,
                   {"population_size", "generations", "mutation_rate", "runs", "elitism", "tournament_size",
                    "max_recursion_depth"},
                   "evolution");
        auto& e = cfg.evolution;
        read(*it, "population_size", e.population_size);
        read(*it, "generations", e.generations);
        read(*it, "mutation_rate", e.mutation_rate);
        read(*it, "runs", e.runs);
        read(*it, "elitism", e.elitism);
        read(*it, "tournament_size", e.tournament_size);
        read(*it, "max_recursion_depth", e.limits.max_recursion_depth);
    }
    if (auto it = root.find("trainer"); it != root.end()) {
        cfg.trainer = parse_trainer(*it, cfg);
    }
    if (auto it = root.find("training"); it != root.end()) {
        check_keys(*it, {"batch_size", "initial_lr", "augmentation"}, "training");
        read(*it, "batch_size", cfg.training.batch_size);
        read(*it, "initial_lr", cfg.training.initial_lr);
        if (it->contains("augmentation")) {
            cfg.warnings.emplace_back("training.augmentation is accepted but not applied");
        }
    }
    if (auto it = root.find("compare"); it != root.end()) {
        check_keys(*it, {"runs", "scenarios"}, "compare");
        read(*it, "runs", cfg.compare_runs);
        if (auto s = it->find("scenarios"); s != it->end()) {
            cfg.compare_scenarios.clear();
            for (const auto& item : *s) {
                cfg.compare_scenarios.push_back(parse_scenario(item));
            }
        }
    }

    cfg.evolution.rng_seed = cfg.seed;
    cfg.evolution.validate();
    validate(cfg.trainer);
    if (cfg.grammar.rfind("builtin:", 0) == 0) {
        if (cfg.grammar != "builtin:autolr") {
            throw ConfigError("unknown builtin grammar '" + cfg.grammar + "'");
        }
    } else if (!std::filesystem::exists(cfg.grammar)) {
        throw ConfigError("grammar file '" + cfg.grammar + "' does not exist");
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str());
}

std::string dump_run_config(const RunConfig& config) {
    const auto& e = config.evolution;
    json compare_scenarios = json::array();
    for (const auto& s : config.compare_scenarios) {
        compare_scenarios.push_back(scenario_json(s));
    }
    json j = {
        {"grammar", config.grammar},
        {"seed", config.seed},
        {"output", config.output.string()},
        {"scenario", scenario_json(config.scenario)},
        {"evolution",
         {{"population_size", e.population_size},
          {"generations", e.generations},
          {"mutation_rate", e.mutation_rate},
          {"runs", e.runs},
          {"elitism", e.elitism},
          {"tournament_size", e.tournament_size},
          {"max_recursion_depth", e.limits.max_recursion_depth}}},
        {"trainer", trainer_json(config.trainer, config.data_seed)},
        {"training", {{"batch_size", config.training.batch_size}, {"initial_lr", config.training.initial_lr}}},
        {"compare", {{"runs", config.compare_runs}, {"scenarios", compare_scenarios}}},
        {"log_wall_clock", config.log_wall_clock},
    };
    return j.dump(2) + "\n";
}

Grammar load_grammar(const RunConfig& config) {
    if (config.grammar == "builtin:autolr") {
        return default_autolr_grammar();
    }
    std::ifstream in(config.grammar);
    if (!in) {
        throw ConfigError("cannot open grammar file '" + config.grammar + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_grammar(text.str(), config.grammar);
}

DataSplit make_split(const RunConfig& config) {
    if (const auto* m = std::get_if<MlpTrainer>(&config.trainer)) {
        return make_synthetic_dataset(m->dataset, config.data_seed);
    }
    return {};
}

} // namespace autolr
