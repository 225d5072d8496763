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

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autolr/fitness.hpp"
#include "autolr/grammar.hpp"
#include "autolr/scheduler.hpp"
#include "autolr/sge.hpp"

namespace autolr {

/// A training regime. S1: 100 epochs with early stop; S2: 20 epochs; S3: 100 epochs.
struct Scenario {
    std::string id;
    std::size_t epochs = 100;
    bool early_stop = false;
    std::size_t patience = 3;

    static Scenario s1();
    static Scenario s2();
    static Scenario s3();
    /// "S1", "S2" or "S3" (case-insensitive).
    static Scenario named(std::string_view id);

    /// `base` with this scenario's epoch budget and early-stop setting.
    TrainingConfig apply(TrainingConfig base) const;
};

/// Adapts evaluate_policy to the evolution engine. The split is shared, not copied.
FitnessFn make_fitness_fn(TrainerSpec trainer, std::shared_ptr<const DataSplit> split, TrainingConfig base);

struct ExperimentResult {
    EvolutionHistory history;
    Individual champion;
};

ExperimentResult run_experiment(const Scenario& scenario, const EvolutionConfig& evolution, const Grammar& grammar,
                                const TrainerSpec& trainer, std::shared_ptr<const DataSplit> split,
                                const TrainingConfig& base = {});

/// Const(c) with c the learning-rate grid member nearest 0.01.
SchedulerAst baseline_policy(const ConstantGrids& grids);

struct NamedPolicy {
    std::string name;
    SchedulerAst ast;
};

struct Summary {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation; 0 for a single value
};

/// Permutation-invariant: values are summed in sorted order.
Summary summarize(std::span<const double> values);

struct ComparisonCell {
    std::string policy;
    std::string scenario;
    std::size_t runs = 0;
    Summary validation;
    Summary test;
    Shape shape = Shape::constant;
    std::vector<FitnessReport> reports;
};

struct ComparisonReport {
    std::vector<ComparisonCell> cells;

    const ComparisonCell& cell(std::string_view policy, std::string_view scenario) const;
};

/// Evaluates every (policy, scenario) pair with train seeds 0..runs-1.
ComparisonReport compare_policies(std::span<const NamedPolicy> policies, std::span<const Scenario> scenarios,
                                  std::size_t runs, const TrainerSpec& trainer, const DataSplit& split,
                                  const TrainingConfig& base = {}, std::size_t jobs = 1);

/// `policy,scenario,split,mean,stddev,runs`
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

/// Scenario/split rows by policy columns, "mean ± stddev" cells.
void write_comparison_table(std::ostream& out, const ComparisonReport& report);

} // namespace autolr
