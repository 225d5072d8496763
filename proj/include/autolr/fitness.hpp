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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "autolr/mlp.hpp"
#include "autolr/scheduler.hpp"

namespace autolr {

// ---------------------------------------------------------------------------
// Data

/// Samples are columns of `features`.
struct LabeledData {
    Eigen::MatrixXd features;
    std::vector<int> labels;

    std::size_t size() const noexcept { return labels.size(); }
};

struct DataSplit {
    LabeledData train;
    LabeledData validation;
    LabeledData test;
};

/// Gaussian blobs: class centres evenly spaced on a circle of radius
/// `separation` in the first two dimensions, isotropic noise of std `noise`.
struct DatasetSpec {
    std::size_t classes = 4;
    std::size_t dimensions = 2;
    std::size_t train_per_class = 600;
    std::size_t validation_per_class = 150;
    std::size_t test_per_class = 150;
    double noise = 1.0;
    double separation = 2.5;
};

DataSplit make_synthetic_dataset(const DatasetSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Trainers

enum class Objective { quadratic, rosenbrock };

/// Plain gradient descent on a closed-form objective.
/// quadratic: f(w) = 1/2 sum_i spectrum_i w_i^2
/// rosenbrock: f(x, y) = (1 - x)^2 + 100 (y - x^2)^2
struct AnalyticTrainer {
    Objective objective = Objective::quadratic;
    std::vector<double> spectrum{1.0};
    std::vector<double> start_point{1.0};
    std::size_t steps_per_epoch = 1;
};

struct MlpTrainer {
    std::vector<std::size_t> layer_sizes{2, 16, 4};
    Activation hidden = Activation::relu;
    DatasetSpec dataset;
};

using TrainerSpec = std::variant<AnalyticTrainer, MlpTrainer>;

void validate(const TrainerSpec& trainer);

// ---------------------------------------------------------------------------
// Training

struct EarlyStop {
    std::size_t patience = 3;
};

struct TrainingConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 0; // 0: 1000 per 7000 training samples, scaled to the training set
    std::optional<EarlyStop> early_stop;
    std::uint64_t train_seed = 0;
    double initial_lr = default_initial_lr;

    void validate() const;
};

struct TraceRow {
    int epoch;
    double lr;
    double train_loss;
    double validation_loss;
    double validation_accuracy;
};

using TrainingTrace = std::vector<TraceRow>;

struct FitnessReport {
    double fitness = 0.0;
    double best_validation_accuracy = 0.0;
    double final_validation_loss = 0.0;
    std::size_t epochs_trained = 0;
    bool early_stopped = false;
    bool diverged = false;
    std::string note;
    TrainingTrace trace;
    std::vector<double> final_parameters;
};

/// Training batch size actually used for `train_size` samples.
std::size_t effective_batch_size(const TrainingConfig& config, std::size_t train_size);

/// True when each of the last `patience` losses failed to strictly improve on
/// the best loss recorded before them.
bool early_stop_check(std::span<const double> validation_losses, std::size_t patience);

/// Trains a fresh model under the schedule and returns its held-out accuracy.
/// Non-finite losses end training with fitness 0.
FitnessReport evaluate_policy(const SchedulerAst& ast, const TrainerSpec& trainer, const DataSplit& split,
                              const TrainingConfig& config);

/// The model evaluate_policy starts from for this seed.
Mlp<double> initial_model(const MlpTrainer& trainer, std::uint64_t train_seed);

struct OracleRow {
    double lr;
    double fitness;
    double final_validation_loss;
};

struct OracleTable {
    std::vector<OracleRow> rows;
    std::size_t argmax = 0; // highest fitness, ties to lower final loss, then lower lr

    const OracleRow& best() const { return rows.at(argmax); }
};

/// Evaluates Const(v) for every grid value with the same training seed.
OracleTable brute_force_constants(const TrainerSpec& trainer, const DataSplit& split, const TrainingConfig& config,
                                  std::span<const double> lr_grid, std::size_t jobs = 1);

void write_trace_csv(std::ostream& out, const TrainingTrace& trace);
void write_oracle_csv(std::ostream& out, const OracleTable& table);

} // namespace autolr
