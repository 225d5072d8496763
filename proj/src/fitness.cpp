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

#include "autolr/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "autolr/error.hpp"
#include "autolr/grammar.hpp"
#include "autolr/seeding.hpp"
#include "parallel.hpp"

namespace autolr {

DataSplit make_synthetic_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    if (spec.classes < 2) {
        throw ConfigError("dataset needs at least 2 classes");
    }
    if (spec.dimensions < 2) {
        throw ConfigError("dataset needs at least 2 dimensions");
    }
    if (spec.train_per_class == 0 || spec.validation_per_class == 0 || spec.test_per_class == 0) {
        throw ConfigError("every split needs at least one sample per class");
    }
    if (!(spec.noise >= 0.0)) {
        throw ConfigError("noise must be non-negative");
    }

    const auto k = spec.classes;
    Eigen::MatrixXd centres = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.dimensions),
                                                    static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(k);
        centres(0, static_cast<Eigen::Index>(c)) = spec.separation * std::cos(angle);
        centres(1, static_cast<Eigen::Index>(c)) = spec.separation * std::sin(angle);
    }

    Rng rng(derive_seed({seed, stream::dataset}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto draw = [&](std::size_t per_class) {
        LabeledData d;
        d.features.resize(static_cast<Eigen::Index>(spec.dimensions), static_cast<Eigen::Index>(per_class * k));
        d.labels.resize(per_class * k);
        Eigen::Index col = 0;
        // Classes interleaved so any prefix stays balanced.
        for (std::size_t i = 0; i < per_class; ++i) {
            for (std::size_t c = 0; c < k; ++c, ++col) {
                for (Eigen::Index r = 0; r < d.features.rows(); ++r) {
                    d.features(r, col) = centres(r, static_cast<Eigen::Index>(c)) + spec.noise * gauss(rng);
                }
                d.labels[static_cast<std::size_t>(col)] = static_cast<int>(c);
            }
        }
        return d;
    };
    DataSplit split;
    split.train = draw(spec.train_per_class);
    split.validation = draw(spec.validation_per_class);
    split.test = draw(spec.test_per_class);
    return split;
}

void validate(const TrainerSpec& trainer) {
    if (const auto* a = std::get_if<AnalyticTrainer>(&trainer)) {
        if (a->steps_per_epoch < 1) {
            throw ConfigError("steps_per_epoch must be at least 1");
        }
        if (a->objective == Objective::quadratic) {
            if (a->spectrum.empty() || a->spectrum.size() != a->start_point.size()) {
                throw ConfigError("quadratic spectrum and start_point must be non-empty and equally sized");
            }
            if (std::any_of(a->spectrum.begin(), a->spectrum.end(), [](double l) { return !(l > 0.0); })) {
                throw ConfigError("quadratic spectrum entries must be positive");
            }
        } else if (a->start_point.size() != 2) {
            throw ConfigError("rosenbrock start_point must have 2 coordinates");
        }
    } else {
        const auto& m = std::get<MlpTrainer>(trainer);
        if (m.layer_sizes.size() < 2) {
            throw ConfigError("layer_sizes needs at least 2 layers");
        }
        if (std::any_of(m.layer_sizes.begin(), m.layer_sizes.end(), [](std::size_t n) { return n == 0; })) {
            throw ConfigError("layer sizes must be positive");
        }
        if (m.layer_sizes.front() != m.dataset.dimensions || m.layer_sizes.back() != m.dataset.classes) {
            throw ConfigError("layer_sizes must start at the dataset dimension and end at its class count");
        }
    }
}

void TrainingConfig::validate() const {
    if (epochs < 1) {
        throw ConfigError("epochs must be at least 1");
    }
    if (early_stop && early_stop->patience < 1) {
        throw ConfigError("patience must be at least 1");
    }
}

std::size_t effective_batch_size(const TrainingConfig& config, std::size_t train_size) {
    if (train_size == 0) {
        return 1;
    }
    if (config.batch_size > 0) {
        return std::min(config.batch_size, train_size);
    }
    const auto scaled = static_cast<std::size_t>(std::llround(static_cast<double>(train_size) * 1000.0 / 7000.0));
    return std::clamp<std::size_t>(scaled, 1, train_size);
}

bool early_stop_check(std::span<const double> validation_losses, std::size_t patience) {
    if (patience < 1) {
        throw ConfigError("patience must be at least 1");
    }
    const auto n = validation_losses.size();
    if (n < patience + 1) {
        return false;
    }
    double best = validation_losses[0];
    for (std::size_t i = 1; i < n - patience; ++i) {
        best = std::min(best, validation_losses[i]);
    }
    for (std::size_t i = n - patience; i < n; ++i) {
        if (validation_losses[i] < best) {
            return false;
        }
    }
    return true;
}

Mlp<double> initial_model(const MlpTrainer& trainer, std::uint64_t train_seed) {
    return make_mlp<double>(trainer.layer_sizes, trainer.hidden, derive_seed({train_seed, stream::init}));
}

namespace {

double accuracy_surrogate(double loss) { return 1.0 / (1.0 + loss); }

class AnalyticObjective {
public:
    explicit AnalyticObjective(const AnalyticTrainer& spec) : spec_(spec) {
        spectrum_ = Eigen::Map<const Eigen::VectorXd>(spec.spectrum.data(), static_cast<Eigen::Index>(spec.spectrum.size()));
    }

    double value(const Eigen::VectorXd& w) const {
        if (spec_.objective == Objective::quadratic) {
            return 0.5 * spectrum_.dot(w.cwiseAbs2());
        }
        const double a = 1.0 - w(0);
        const double b = w(1) - w(0) * w(0);
        return a * a + 100.0 * b * b;
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& w) const {
        if (spec_.objective == Objective::quadratic) {
            return spectrum_.cwiseProduct(w);
        }
        const double b = w(1) - w(0) * w(0);
        Eigen::VectorXd g(2);
        g(0) = -2.0 * (1.0 - w(0)) - 400.0 * w(0) * b;
        g(1) = 200.0 * b;
        return g;
    }

private:
    const AnalyticTrainer& spec_;
    Eigen::VectorXd spectrum_;
};

struct EpochLoop {
    const SchedulerAst& ast;
    const TrainingConfig& config;
    FitnessReport report;
    std::vector<double> validation_losses;
    double lr;

    explicit EpochLoop(const SchedulerAst& a, const TrainingConfig& c) : ast(a), config(c), lr(c.initial_lr) {}

    // Returns false when training must stop after this epoch.
    bool finish_epoch(int epoch, double train_loss, double val_loss, double val_acc) {
        report.trace.push_back({epoch, lr, train_loss, val_loss, val_acc});
        report.epochs_trained = static_cast<std::size_t>(epoch);
        report.final_validation_loss = val_loss;
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
            report.diverged = true;
            report.early_stopped = true;
            report.note = "diverged: non-finite loss at epoch " + std::to_string(epoch);
            return false;
        }
        report.best_validation_accuracy = std::max(report.best_validation_accuracy, val_acc);
        validation_losses.push_back(val_loss);
        if (config.early_stop && early_stop_check(validation_losses, config.early_stop->patience)) {
            report.early_stopped = true;
            return false;
        }
        return true;
    }
};

FitnessReport train_analytic(const SchedulerAst& ast, const AnalyticTrainer& spec, const TrainingConfig& config) {
    AnalyticObjective objective(spec);
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(spec.start_point.data(),
                                                          static_cast<Eigen::Index>(spec.start_point.size()));
    EpochLoop loop(ast, config);
    for (int epoch = 1; epoch <= static_cast<int>(config.epochs); ++epoch) {
        loop.lr = eval_scheduler(ast, loop.lr, epoch);
        for (std::size_t s = 0; s < spec.steps_per_epoch; ++s) {
            w -= loop.lr * objective.gradient(w);
        }
        // Validation and test coincide: the objective itself.
        const double loss = objective.value(w);
        if (!loop.finish_epoch(epoch, loss, loss, accuracy_surrogate(loss))) {
            break;
        }
    }
    auto report = std::move(loop.report);
    report.final_parameters.assign(w.data(), w.data() + w.size());
    if (!report.diverged) {
        report.fitness = accuracy_surrogate(objective.value(w));
    }
    return report;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& source, std::span<const std::size_t> idx) {
    Eigen::MatrixXd out(source.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = source.col(static_cast<Eigen::Index>(idx[j]));
    }
    return out;
}

FitnessReport train_mlp(const SchedulerAst& ast, const MlpTrainer& spec, const DataSplit& split,
                        const TrainingConfig& config) {
    if (split.train.size() == 0 || split.validation.size() == 0 || split.test.size() == 0) {
        throw ShapeMismatchError("every split must be non-empty");
    }
    auto model = initial_model(spec, config.train_seed);
    const auto n = split.train.size();
    const auto batch = effective_batch_size(config, n);

    std::vector<std::size_t> order(n);
    std::vector<int> batch_labels;
    EpochLoop loop(ast, config);
    for (int epoch = 1; epoch <= static_cast<int>(config.epochs); ++epoch) {
        loop.lr = eval_scheduler(ast, loop.lr, epoch);

        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle_rng(derive_seed({config.train_seed, stream::shuffle, static_cast<std::uint64_t>(epoch)}));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const auto count = std::min(batch, n - start);
            std::span<const std::size_t> idx(order.data() + start, count);
            const Eigen::MatrixXd x = gather_columns(split.train.features, idx);
            batch_labels.resize(count);
            for (std::size_t j = 0; j < count; ++j) {
                batch_labels[j] = split.train.labels[idx[j]];
            }
            auto [loss, grads] = mlp_forward_backward(model, x, batch_labels);
            loss_sum += loss * static_cast<double>(count);
            if (!std::isfinite(loss)) {
                break;
            }
            sgd_step(model, grads, loop.lr);
        }
        const auto val = evaluate_classifier(model, split.validation.features, split.validation.labels);
        if (!loop.finish_epoch(epoch, loss_sum / static_cast<double>(n), val.loss, val.accuracy)) {
            break;
        }
    }
    auto report = std::move(loop.report);
    report.final_parameters = flatten(model.layers);
    if (!report.diverged) {
        report.fitness = evaluate_classifier(model, split.test.features, split.test.labels).accuracy;
    }
    return report;
}

} // namespace

FitnessReport evaluate_policy(const SchedulerAst& ast, const TrainerSpec& trainer, const DataSplit& split,
                              const TrainingConfig& config) {
    validate(trainer);
    config.validate();
    if (const auto* a = std::get_if<AnalyticTrainer>(&trainer)) {
        return train_analytic(ast, *a, config);
    }
    return train_mlp(ast, std::get<MlpTrainer>(trainer), split, config);
}

OracleTable brute_force_constants(const TrainerSpec& trainer, const DataSplit& split, const TrainingConfig& config,
                                  std::span<const double> lr_grid, std::size_t jobs) {
    OracleTable table;
    table.rows.resize(lr_grid.size());
    detail::parallel_for(lr_grid.size(), jobs, [&](std::size_t i) {
        auto report = evaluate_policy(SchedulerAst::constant(lr_grid[i]), trainer, split, config);
        table.rows[i] = {lr_grid[i], report.fitness, report.final_validation_loss};
    });
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const auto& b = table.rows[table.argmax];
        if (r.fitness > b.fitness || (r.fitness == b.fitness && r.final_validation_loss < b.final_validation_loss)) {
            table.argmax = i;
        }
    }
    return table;
}

void write_trace_csv(std::ostream& out, const TrainingTrace& trace) {
    out << "epoch,lr,train_loss,val_loss,val_acc\n";
    for (const auto& r : trace) {
        out << r.epoch << ',' << format_shortest(r.lr) << ',' << r.train_loss << ',' << r.validation_loss << ','
            << r.validation_accuracy << '\n';
    }
}

void write_oracle_csv(std::ostream& out, const OracleTable& table) {
    out << "lr,fitness,final_loss\n";
    out.precision(17);
    for (const auto& r : table.rows) {
        out << format_shortest(r.lr) << ',' << r.fitness << ',' << r.final_validation_loss << '\n';
    }
}

} // namespace autolr
