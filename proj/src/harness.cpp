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

#include "autolr/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "autolr/error.hpp"
#include "parallel.hpp"

namespace autolr {

Scenario Scenario::s1() { return {"S1", 100, true, 3}; }
Scenario Scenario::s2() { return {"S2", 20, false, 3}; }
Scenario Scenario::s3() { return {"S3", 100, false, 3}; }

Scenario Scenario::named(std::string_view id) {
    std::string upper(id);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "S1") {
        return s1();
    }
    if (upper == "S2") {
        return s2();
    }
    if (upper == "S3") {
        return s3();
    }
    throw ConfigError("unknown scenario '" + std::string(id) + "' (expected S1, S2 or S3)");
}

TrainingConfig Scenario::apply(TrainingConfig base) const {
    base.epochs = epochs;
    if (early_stop) {
        base.early_stop = EarlyStop{patience};
    } else {
        base.early_stop.reset();
    }
    return base;
}

FitnessFn make_fitness_fn(TrainerSpec trainer, std::shared_ptr<const DataSplit> split, TrainingConfig base) {
    validate(trainer);
    base.validate();
    return [trainer = std::move(trainer), split = std::move(split), base](const Individual& ind,
                                                                           std::uint64_t train_seed) {
        auto config = base;
        config.train_seed = train_seed;
        auto report = evaluate_policy(ind.ast, trainer, *split, config);
        return FitnessOutcome{report.fitness, EvalMeta{report.epochs_trained, report.early_stopped, train_seed},
                              report.note};
    };
}

ExperimentResult run_experiment(const Scenario& scenario, const EvolutionConfig& evolution, const Grammar& grammar,
                                const TrainerSpec& trainer, std::shared_ptr<const DataSplit> split,
                                const TrainingConfig& base) {
    auto fitness = make_fitness_fn(trainer, std::move(split), scenario.apply(base));
    ExperimentResult result;
    result.history = evolve(evolution, grammar, fitness);
    result.champion = result.history.champion;
    return result;
}

SchedulerAst baseline_policy(const ConstantGrids& grids) { return SchedulerAst::constant(grids.nearest_lr(0.01)); }

Summary summarize(std::span<const double> values) {
    if (values.empty()) {
        return {};
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(sorted.size());
    if (sorted.size() == 1) {
        return {mean, 0.0};
    }
    std::vector<double> sq(sorted.size());
    std::transform(sorted.begin(), sorted.end(), sq.begin(), [mean](double v) { return (v - mean) * (v - mean); });
    std::sort(sq.begin(), sq.end());
    double ss = 0.0;
    for (double v : sq) {
        ss += v;
    }
    return {mean, std::sqrt(ss / static_cast<double>(sorted.size() - 1))};
}

const ComparisonCell& ComparisonReport::cell(std::string_view policy, std::string_view scenario) const {
    for (const auto& c : cells) {
        if (c.policy == policy && c.scenario == scenario) {
            return c;
        }
    }
    throw Error("no comparison cell for " + std::string(policy) + "/" + std::string(scenario));
}

ComparisonReport compare_policies(std::span<const NamedPolicy> policies, std::span<const Scenario> scenarios,
                                  std::size_t runs, const TrainerSpec& trainer, const DataSplit& split,
                                  const TrainingConfig& base, std::size_t jobs) {
    if (runs < 1) {
        throw ConfigError("runs must be at least 1");
    }
    ComparisonReport report;
    const auto cells = policies.size() * scenarios.size();
    std::vector<FitnessReport> results(cells * runs);
    detail::parallel_for(results.size(), jobs, [&](std::size_t i) {
        const auto cell = i / runs;
        const auto& policy = policies[cell / scenarios.size()];
        const auto& scenario = scenarios[cell % scenarios.size()];
        auto config = scenario.apply(base);
        config.train_seed = i % runs;
        results[i] = evaluate_policy(policy.ast, trainer, split, config);
    });

    for (std::size_t cell = 0; cell < cells; ++cell) {
        const auto& policy = policies[cell / scenarios.size()];
        const auto& scenario = scenarios[cell % scenarios.size()];
        ComparisonCell c;
        c.policy = policy.name;
        c.scenario = scenario.id;
        c.runs = runs;
        c.shape = classify_shape(simulate_schedule(policy.ast, static_cast<int>(scenario.epochs), base.initial_lr));
        std::vector<double> val, test;
        for (std::size_t r = 0; r < runs; ++r) {
            auto& rep = results[cell * runs + r];
            val.push_back(rep.best_validation_accuracy);
            test.push_back(rep.fitness);
            c.reports.push_back(std::move(rep));
        }
        c.validation = summarize(val);
        c.test = summarize(test);
        report.cells.push_back(std::move(c));
    }
    return report;
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
    out << "policy,scenario,split,mean,stddev,runs\n";
    out << std::setprecision(17);
    for (const auto& c : report.cells) {
        out << c.policy << ',' << c.scenario << ",validation," << c.validation.mean << ',' << c.validation.stddev << ','
            << c.runs << '\n';
        out << c.policy << ',' << c.scenario << ",test," << c.test.mean << ',' << c.test.stddev << ',' << c.runs
            << '\n';
    }
}

void write_comparison_table(std::ostream& out, const ComparisonReport& report) {
    std::vector<std::string> policies;
    std::vector<std::string> scenarios;
    for (const auto& c : report.cells) {
        if (std::find(policies.begin(), policies.end(), c.policy) == policies.end()) {
            policies.push_back(c.policy);
        }
        if (std::find(scenarios.begin(), scenarios.end(), c.scenario) == scenarios.end()) {
            scenarios.push_back(c.scenario);
        }
    }
    auto fmt = [](const Summary& s) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(3) << s.mean << " ± " << s.stddev;
        return os.str();
    };
    auto find = [&](const std::string& p, const std::string& s) -> const ComparisonCell* {
        for (const auto& c : report.cells) {
            if (c.policy == p && c.scenario == s) {
                return &c;
            }
        }
        return nullptr;
    };

    constexpr int label_w = 20;
    constexpr int cell_w = 22;
    out << std::left << std::setw(label_w) << "Scenario / split";
    for (const auto& p : policies) {
        out << std::setw(cell_w) << p;
    }
    out << '\n';
    for (const auto& s : scenarios) {
        for (const char* split : {"validation", "test"}) {
            out << std::setw(label_w) << (s + " " + split);
            for (const auto& p : policies) {
                const auto* c = find(p, s);
                std::string text = "n/a";
                if (c != nullptr) {
                    text = fmt(std::string_view(split) == "test" ? c->test : c->validation);
                }
                // "±" is two bytes but one column.
                const auto pad = text.find("±") != std::string::npos ? 1 : 0;
                out << std::setw(cell_w + pad) << text;
            }
            out << '\n';
        }
    }
    out << std::setw(label_w) << "shape";
    for (const auto& p : policies) {
        const auto* c = find(p, scenarios.empty() ? std::string{} : scenarios.front());
        out << std::setw(cell_w) << (c != nullptr ? std::string(to_string(c->shape)) : std::string("n/a"));
    }
    out << '\n';
}

} // namespace autolr
