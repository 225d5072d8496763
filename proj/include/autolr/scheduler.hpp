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

namespace autolr {

class Grammar;

/// Value the scheduler sees as "previous learning rate" on its first call.
inline constexpr double default_initial_lr = 0.01;

enum class Variable { learning_rate, epoch };
enum class Comparison { lt, le, gt, ge };

struct Condition {
    Variable variable = Variable::epoch;
    Comparison op = Comparison::lt;
    double constant = 0.0; // epoch constants are integral

    bool holds(double previous_lr, int epoch) const noexcept;

    friend bool operator==(const Condition&, const Condition&) = default;
};

/// Immutable scheduler program: a constant or an if_func(cond, then, else).
/// Copies share structure.
class SchedulerAst {
public:
    static SchedulerAst constant(double lr);
    static SchedulerAst branch(Condition condition, SchedulerAst then_branch, SchedulerAst else_branch);

    bool is_constant() const noexcept;
    double value() const;                  // constant nodes only
    const Condition& condition() const;    // branch nodes only
    const SchedulerAst& then_branch() const;
    const SchedulerAst& else_branch() const;

    /// A constant has depth 1.
    std::size_t depth() const;
    std::size_t condition_count() const;
    /// True if some condition reads the previous learning rate.
    bool reads_learning_rate() const;

    friend bool operator==(const SchedulerAst& a, const SchedulerAst& b);

private:
    struct Node;
    explicit SchedulerAst(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

/// The constant sets a phenotype may use, read from a grammar's `lr_const`
/// and `ep_const` rules.
struct ConstantGrids {
    std::vector<double> lr;
    std::vector<int> epoch;

    static ConstantGrids from_grammar(const Grammar& grammar);

    bool on_lr_grid(double value) const;
    bool on_epoch_grid(int value) const;
    double nearest_lr(double target) const;
};

double eval_scheduler(const SchedulerAst& ast, double previous_lr, int epoch);

/// Phenotype tokens in grammar order, e.g. {"if_func(", "epoch", "<", "10", ",", ...}.
std::vector<std::string> render_tokens(const SchedulerAst& ast);

/// Joins phenotype tokens: single spaces, none after "(" and none before "," or ")".
std::string join_tokens(std::span<const std::string> tokens);

std::string render(const SchedulerAst& ast);

SchedulerAst parse_phenotype(std::string_view text, const ConstantGrids& grids);
SchedulerAst parse_phenotype(std::string_view text, const Grammar& grammar);

struct CurvePoint {
    int epoch;
    double lr;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

using ScheduleCurve = std::vector<CurvePoint>;

/// lr_e = eval(ast, lr_{e-1}, e) for e = 1..epochs, with lr_0 = initial_prev_lr.
ScheduleCurve simulate_schedule(const SchedulerAst& ast, int epochs, double initial_prev_lr = default_initial_lr);

enum class Shape { constant, decaying, oscillator, other };

Shape classify_shape(const ScheduleCurve& curve);
std::string_view to_string(Shape shape);

void write_curve_csv(std::ostream& out, const ScheduleCurve& curve);

} // namespace autolr
