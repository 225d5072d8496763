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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "autolr/fitness.hpp"
#include "autolr/grammar.hpp"
#include "autolr/harness.hpp"
#include "autolr/sge.hpp"

namespace autolr {

/// Everything one experiment needs. Defaults: built-in grammar, SGE settings
/// (10 runs x 50 generations, 5 individuals, mutation 0.15), a quadratic
/// testbed with curvature 30, scenario S2.
struct RunConfig {
    std::string grammar = "builtin:autolr";
    std::uint64_t seed = 0;
    EvolutionConfig evolution;
    TrainerSpec trainer = AnalyticTrainer{Objective::quadratic, {30.0}, {1.0}, 1};
    std::uint64_t data_seed = 0;
    TrainingConfig training;
    Scenario scenario = Scenario::s2();
    std::vector<Scenario> compare_scenarios{Scenario::s1(), Scenario::s2(), Scenario::s3()};
    std::size_t compare_runs = 5;
    std::filesystem::path output = "autolr-out";
    bool log_wall_clock = false;

    /// Warnings collected while loading (e.g. ignored augmentation settings).
    std::vector<std::string> warnings;
};

/// Parses a JSON run configuration on top of the defaults. Unknown keys are errors.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// The effective configuration as JSON.
std::string dump_run_config(const RunConfig& config);

Grammar load_grammar(const RunConfig& config);

/// Builds the data split for the configured trainer (empty for analytic trainers).
DataSplit make_split(const RunConfig& config);

} // namespace autolr
