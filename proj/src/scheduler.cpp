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

#include "autolr/scheduler.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <ostream>
#include <variant>

#include "autolr/error.hpp"
#include "autolr/grammar.hpp"

namespace autolr {

bool Condition::holds(double previous_lr, int epoch) const noexcept {
    const double lhs = variable == Variable::learning_rate ? previous_lr : static_cast<double>(epoch);
    switch (op) {
    case Comparison::lt:
        return lhs < constant;
    case Comparison::le:
        return lhs <= constant;
    case Comparison::gt:
        return lhs > constant;
    case Comparison::ge:
        return lhs >= constant;
    }
    return false;
}

struct SchedulerAst::Node {
    struct Branch {
        Condition condition;
        SchedulerAst then_branch;
        SchedulerAst else_branch;
    };
    std::variant<double, Branch> data;
};

SchedulerAst SchedulerAst::constant(double lr) { return SchedulerAst(std::make_shared<const Node>(Node{lr})); }

SchedulerAst SchedulerAst::branch(Condition condition, SchedulerAst then_branch, SchedulerAst else_branch) {
    return SchedulerAst(std::make_shared<const Node>(
        Node{Node::Branch{condition, std::move(then_branch), std::move(else_branch)}}));
}

bool SchedulerAst::is_constant() const noexcept { return std::holds_alternative<double>(node_->data); }

double SchedulerAst::value() const { return std::get<double>(node_->data); }

const Condition& SchedulerAst::condition() const { return std::get<Node::Branch>(node_->data).condition; }

const SchedulerAst& SchedulerAst::then_branch() const { return std::get<Node::Branch>(node_->data).then_branch; }

const SchedulerAst& SchedulerAst::else_branch() const { return std::get<Node::Branch>(node_->data).else_branch; }

std::size_t SchedulerAst::depth() const {
    if (is_constant()) {
        return 1;
    }
    return 1 + std::max(then_branch().depth(), else_branch().depth());
}

std::size_t SchedulerAst::condition_count() const {
    if (is_constant()) {
        return 0;
    }
    return 1 + then_branch().condition_count() + else_branch().condition_count();
}

bool SchedulerAst::reads_learning_rate() const {
    if (is_constant()) {
        return false;
    }
    return condition().variable == Variable::learning_rate || then_branch().reads_learning_rate() ||
           else_branch().reads_learning_rate();
}

bool operator==(const SchedulerAst& a, const SchedulerAst& b) {
    if (a.node_ == b.node_) {
        return true;
    }
    if (a.is_constant() != b.is_constant()) {
        return false;
    }
    if (a.is_constant()) {
        return a.value() == b.value();
    }
    return a.condition() == b.condition() && a.then_branch() == b.then_branch() && a.else_branch() == b.else_branch();
}

ConstantGrids ConstantGrids::from_grammar(const Grammar& grammar) {
    if (!grammar.has("lr_const") || !grammar.has("ep_const")) {
        throw Error("grammar has no <lr_const>/<ep_const> rules");
    }
    ConstantGrids grids;
    for (const auto& option : grammar.production("lr_const").options) {
        double v = 0.0;
        const auto& text = option.front().text;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (option.size() != 1 || ec != std::errc{} || ptr != text.data() + text.size()) {
            throw Error("<lr_const> options must be single numeric terminals");
        }
        grids.lr.push_back(v);
    }
    for (const auto& option : grammar.production("ep_const").options) {
        int v = 0;
        const auto& text = option.front().text;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (option.size() != 1 || ec != std::errc{} || ptr != text.data() + text.size()) {
            throw Error("<ep_const> options must be single integer terminals");
        }
        grids.epoch.push_back(v);
    }
    return grids;
}

bool ConstantGrids::on_lr_grid(double value) const { return std::find(lr.begin(), lr.end(), value) != lr.end(); }

bool ConstantGrids::on_epoch_grid(int value) const {
    return std::find(epoch.begin(), epoch.end(), value) != epoch.end();
}

double ConstantGrids::nearest_lr(double target) const {
    if (lr.empty()) {
        throw Error("empty learning-rate grid");
    }
    return *std::min_element(lr.begin(), lr.end(), [target](double a, double b) {
        return std::abs(a - target) < std::abs(b - target);
    });
}

double eval_scheduler(const SchedulerAst& ast, double previous_lr, int epoch) {
    const SchedulerAst* node = &ast;
    while (!node->is_constant()) {
        node = node->condition().holds(previous_lr, epoch) ? &node->then_branch() : &node->else_branch();
    }
    return node->value();
}

namespace {

std::string_view op_text(Comparison op) {
    switch (op) {
    case Comparison::lt:
        return "<";
    case Comparison::le:
        return "<=";
    case Comparison::gt:
        return ">";
    case Comparison::ge:
        return ">=";
    }
    return "?";
}

void append_tokens(const SchedulerAst& ast, std::vector<std::string>& out) {
    if (ast.is_constant()) {
        out.push_back(format_shortest(ast.value()));
        return;
    }
    const auto& c = ast.condition();
    out.emplace_back("if_func(");
    if (c.variable == Variable::learning_rate) {
        out.emplace_back("learning_rate");
        out.emplace_back(op_text(c.op));
        out.push_back(format_shortest(c.constant));
    } else {
        out.emplace_back("epoch");
        out.emplace_back(op_text(c.op));
        out.push_back(std::to_string(static_cast<long long>(c.constant)));
    }
    out.emplace_back(",");
    append_tokens(ast.then_branch(), out);
    out.emplace_back(",");
    append_tokens(ast.else_branch(), out);
    out.emplace_back(")");
}

class PhenotypeParser {
public:
    PhenotypeParser(std::string_view text, const ConstantGrids& grids) : text_(text), grids_(grids) {}

    SchedulerAst parse() {
        auto ast = expr();
        skip_space();
        if (pos_ != text_.size()) {
            throw PhenotypeError(pos_, "unexpected trailing input");
        }
        return ast;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(std::string_view lit) {
        skip_space();
        if (text_.substr(pos_, lit.size()) == lit) {
            pos_ += lit.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view lit) {
        if (!accept(lit)) {
            throw PhenotypeError(pos_, "expected '" + std::string(lit) + "'");
        }
    }

    std::string_view identifier() {
        skip_space();
        auto start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    std::string_view number_text() {
        skip_space();
        auto start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' || text_[pos_] == 'e' ||
                text_[pos_] == 'E' || text_[pos_] == '+' || text_[pos_] == '-')) {
            ++pos_;
        }
        if (start == pos_) {
            throw PhenotypeError(start, "expected a number");
        }
        return text_.substr(start, pos_ - start);
    }

    double lr_constant() {
        auto start = pos_;
        auto s = number_text();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw PhenotypeError(start, "malformed number '" + std::string(s) + "'");
        }
        if (!grids_.on_lr_grid(v)) {
            throw PhenotypeError(start, "learning rate " + std::string(s) + " is not on the grid");
        }
        return v;
    }

    int epoch_constant() {
        auto start = pos_;
        auto s = number_text();
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw PhenotypeError(start, "malformed epoch '" + std::string(s) + "'");
        }
        if (!grids_.on_epoch_grid(v)) {
            throw PhenotypeError(start, "epoch " + std::string(s) + " is not on the grid");
        }
        return v;
    }

    Comparison comparison() {
        // Longest match first.
        if (accept("<=")) {
            return Comparison::le;
        }
        if (accept(">=")) {
            return Comparison::ge;
        }
        if (accept("<")) {
            return Comparison::lt;
        }
        if (accept(">")) {
            return Comparison::gt;
        }
        throw PhenotypeError(pos_, "expected one of < <= > >=");
    }

    Condition condition() {
        auto start = pos_;
        auto name = identifier();
        Condition c;
        if (name == "learning_rate") {
            c.variable = Variable::learning_rate;
            c.op = comparison();
            c.constant = lr_constant();
        } else if (name == "epoch") {
            c.variable = Variable::epoch;
            c.op = comparison();
            c.constant = epoch_constant();
        } else {
            throw PhenotypeError(start, "expected 'learning_rate' or 'epoch'");
        }
        return c;
    }

    SchedulerAst expr() {
        skip_space();
        auto start = pos_;
        if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            if (identifier() != "if_func") {
                throw PhenotypeError(start, "expected 'if_func' or a learning rate");
            }
            expect("(");
            auto c = condition();
            expect(",");
            auto then_branch = expr();
            expect(",");
            auto else_branch = expr();
            expect(")");
            return SchedulerAst::branch(c, std::move(then_branch), std::move(else_branch));
        }
        return SchedulerAst::constant(lr_constant());
    }

    std::string_view text_;
    const ConstantGrids& grids_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::string> render_tokens(const SchedulerAst& ast) {
    std::vector<std::string> out;
    append_tokens(ast, out);
    return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& tok = tokens[i];
        if (i > 0 && tok != "," && tok != ")" && !tokens[i - 1].ends_with('(')) {
            out.push_back(' ');
        }
        out += tok;
    }
    return out;
}

std::string render(const SchedulerAst& ast) {
    auto tokens = render_tokens(ast);
    return join_tokens(tokens);
}

SchedulerAst parse_phenotype(std::string_view text, const ConstantGrids& grids) {
    return PhenotypeParser(text, grids).parse();
}

SchedulerAst parse_phenotype(std::string_view text, const Grammar& grammar) {
    return parse_phenotype(text, ConstantGrids::from_grammar(grammar));
}

ScheduleCurve simulate_schedule(const SchedulerAst& ast, int epochs, double initial_prev_lr) {
    if (epochs < 1) {
        throw Error("simulate_schedule needs at least one epoch");
    }
    ScheduleCurve curve;
    curve.reserve(static_cast<std::size_t>(epochs));
    double lr = initial_prev_lr;
    for (int e = 1; e <= epochs; ++e) {
        lr = eval_scheduler(ast, lr, e);
        curve.push_back({e, lr});
    }
    return curve;
}

Shape classify_shape(const ScheduleCurve& curve) {
    if (curve.empty()) {
        throw Error("cannot classify an empty curve");
    }
    bool increased = false;
    bool decreased = false;
    int sign_changes = 0;
    int last_sign = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const double d = curve[i].lr - curve[i - 1].lr;
        const int sign = (d > 0) - (d < 0);
        if (sign == 0) {
            continue;
        }
        increased = increased || sign > 0;
        decreased = decreased || sign < 0;
        if (last_sign != 0 && sign != last_sign) {
            ++sign_changes;
        }
        last_sign = sign;
    }
    if (!increased && !decreased) {
        return Shape::constant;
    }
    if (!increased) {
        return Shape::decaying;
    }
    if (sign_changes >= 2) {
        return Shape::oscillator;
    }
    return Shape::other;
}

std::string_view to_string(Shape shape) {
    switch (shape) {
    case Shape::constant:
        return "constant";
    case Shape::decaying:
        return "decaying";
    case Shape::oscillator:
        return "oscillator";
    case Shape::other:
        return "other";
    }
    return "other";
}

void write_curve_csv(std::ostream& out, const ScheduleCurve& curve) {
    out << "epoch,lr\n";
    for (const auto& p : curve) {
        out << p.epoch << ',' << format_shortest(p.lr) << '\n';
    }
}

} // namespace autolr
