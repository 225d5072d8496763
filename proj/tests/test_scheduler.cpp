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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "autolr/error.hpp"
#include "autolr/grammar.hpp"
#include "autolr/scheduler.hpp"

using namespace autolr;

namespace {

const Grammar& grammar() {
    static const Grammar g = default_autolr_grammar();
    return g;
}

const ConstantGrids& grids() {
    static const ConstantGrids c = ConstantGrids::from_grammar(grammar());
    return c;
}

// 0.05 and 0.01 are not grid members; the nearest ones stand in.
double near05() { return grids().nearest_lr(0.05); }
double near01() { return grids().nearest_lr(0.01); }

SchedulerAst fig4_policy() {
    using C = Condition;
    return SchedulerAst::branch(
        C{Variable::epoch, Comparison::lt, 10}, SchedulerAst::constant(0.1),
        SchedulerAst::branch(C{Variable::epoch, Comparison::le, 50}, SchedulerAst::constant(near05()),
                             SchedulerAst::constant(near01())));
}

SchedulerAst alternator() {
    return SchedulerAst::branch(Condition{Variable::learning_rate, Comparison::gt, near05()},
                                SchedulerAst::constant(near01()), SchedulerAst::constant(0.1));
}

} // namespace

TEST_CASE("nearest grid members") {
    const auto& lr = grids().lr;
    CHECK(near01() == lr[10]);
    CHECK(near05() == lr[49]);
    // 0.0001 + round((0.01 - 0.0001) / step) * step with step = 0.0999 / 99
    CHECK(near01() == doctest::Approx(0.0101909090909).epsilon(1e-12));
}

TEST_CASE("Condition::holds") {
    CHECK(Condition{Variable::epoch, Comparison::lt, 10}.holds(0.5, 9));
    CHECK_FALSE(Condition{Variable::epoch, Comparison::lt, 10}.holds(0.5, 10));
    CHECK(Condition{Variable::epoch, Comparison::le, 10}.holds(0.5, 10));
    CHECK(Condition{Variable::epoch, Comparison::gt, 10}.holds(0.5, 11));
    CHECK(Condition{Variable::epoch, Comparison::ge, 10}.holds(0.5, 10));
    CHECK(Condition{Variable::learning_rate, Comparison::gt, 0.05}.holds(0.1, 1));
    CHECK_FALSE(Condition{Variable::learning_rate, Comparison::gt, 0.05}.holds(0.05, 1));
}

TEST_CASE("eval_scheduler on the step-down example") {
    const auto p = fig4_policy();
    CHECK(eval_scheduler(p, 0.01, 5) == 0.1);
    CHECK(eval_scheduler(p, 0.01, 9) == 0.1);
    CHECK(eval_scheduler(p, 0.01, 10) == near05());
    CHECK(eval_scheduler(p, 0.01, 50) == near05());
    CHECK(eval_scheduler(p, 0.01, 60) == near01());
    for (double lr : grids().lr) {
        CHECK(eval_scheduler(SchedulerAst::constant(lr), 0.3, 77) == lr);
    }
}

TEST_CASE("AST accessors") {
    const auto p = fig4_policy();
    CHECK(p.depth() == 3);
    CHECK(p.condition_count() == 2);
    CHECK_FALSE(p.reads_learning_rate());
    CHECK(alternator().reads_learning_rate());
    CHECK(SchedulerAst::constant(0.1).depth() == 1);
    CHECK(p == fig4_policy());
    CHECK_FALSE(p == alternator());
    CHECK_THROWS(SchedulerAst::constant(0.1).condition());
    CHECK_THROWS(p.value());
}

TEST_CASE("render and parse") {
    CHECK(render(SchedulerAst::constant(0.0001)) == "0.0001");
    const auto c = parse_phenotype("0.0001", grammar());
    CHECK(c.is_constant());
    CHECK(c.value() == 0.0001);

    const auto text = "if_func(epoch < 10, 0.1, " + format_shortest(near05()) + ")";
    const auto ast = parse_phenotype(text, grammar());
    REQUIRE_FALSE(ast.is_constant());
    CHECK(ast.condition() == Condition{Variable::epoch, Comparison::lt, 10});
    CHECK(ast.then_branch().value() == 0.1);
    CHECK(render(ast) == text);

    const auto f4 = render(fig4_policy());
    CHECK(f4 == "if_func(epoch < 10, 0.1, if_func(epoch <= 50, 0.04954545454545455, 0.01019090909090909))");
    CHECK(parse_phenotype(f4, grammar()) == fig4_policy());
    CHECK(render_tokens(SchedulerAst::constant(0.1)) == std::vector<std::string>{"0.1"});
}

TEST_CASE("parse errors") {
    const auto& g = grammar();
    CHECK_THROWS_AS(parse_phenotype("", g), PhenotypeError);
    CHECK_THROWS_AS(parse_phenotype("0.05", g), PhenotypeError);  // off grid
    CHECK_THROWS_AS(parse_phenotype("if_func(epoch < 0, 0.1, 0.1)", g), PhenotypeError);
    CHECK_THROWS_AS(parse_phenotype("if_func(epoch < 101, 0.1, 0.1)", g), PhenotypeError);
    CHECK_THROWS_AS(parse_phenotype("if_func(epoch == 10, 0.1, 0.1)", g), PhenotypeError);
    CHECK_THROWS_AS(parse_phenotype("if_func(10 > epoch, 0.1, 0.1)", g), PhenotypeError);
    CHECK_THROWS_AS(parse_phenotype("if_func(learning_rate < 10, 0.1, 0.1)", g), PhenotypeError);
    CHECK_THROWS_AS(parse_phenotype("if_func(epoch < 10, 0.1)", g), PhenotypeError);
    CHECK_THROWS_AS(parse_phenotype("0.1 0.1", g), PhenotypeError);
    try {
        parse_phenotype("if_func(epoch < 10, 0.1, 0.1", g);
        FAIL("expected an error");
    } catch (const PhenotypeError& e) {
        CHECK(e.position() > 0);
    }
}

TEST_CASE("simulate_schedule") {
    const auto flat = simulate_schedule(SchedulerAst::constant(near01()), 100);
    REQUIRE(flat.size() == 100);
    for (std::size_t i = 0; i < flat.size(); ++i) {
        CHECK(flat[i].epoch == static_cast<int>(i) + 1);
        CHECK(flat[i].lr == near01());
    }

    const auto f4 = simulate_schedule(fig4_policy(), 100);
    for (const auto& p : f4) {
        const double want = p.epoch < 10 ? 0.1 : p.epoch <= 50 ? near05() : near01();
        CHECK(p.lr == want);
    }

    // lr_0 = 0.1 > 0.05 gives 0.01, which is not > 0.05, giving 0.1, ...
    const auto alt = simulate_schedule(alternator(), 12, 0.1);
    for (const auto& p : alt) {
        CHECK(p.lr == (p.epoch % 2 == 1 ? near01() : 0.1));
    }

    // epoch-only policies ignore the initial rate
    CHECK(simulate_schedule(fig4_policy(), 30, 0.0001) == simulate_schedule(fig4_policy(), 30, 0.1));
    CHECK_THROWS(simulate_schedule(fig4_policy(), 0));
}

TEST_CASE("classify_shape") {
    CHECK(classify_shape(simulate_schedule(fig4_policy(), 100)) == Shape::decaying);
    CHECK(classify_shape(simulate_schedule(alternator(), 100, 0.1)) == Shape::oscillator);
    for (double lr : grids().lr) {
        CHECK(classify_shape(simulate_schedule(SchedulerAst::constant(lr), 100)) == Shape::constant);
    }
    auto curve = [](std::vector<double> v) {
        ScheduleCurve c;
        for (std::size_t i = 0; i < v.size(); ++i) {
            c.push_back({static_cast<int>(i) + 1, v[i]});
        }
        return c;
    };
    CHECK(classify_shape(curve({0.1})) == Shape::constant);
    CHECK(classify_shape(curve({0.1, 0.1, 0.05, 0.05})) == Shape::decaying);
    CHECK(classify_shape(curve({0.01, 0.05, 0.05})) == Shape::other);
    CHECK(classify_shape(curve({0.1, 0.05, 0.1})) == Shape::other);     // one sign change
    CHECK(classify_shape(curve({0.1, 0.05, 0.05, 0.1, 0.05})) == Shape::oscillator);
    CHECK(to_string(Shape::oscillator) == "oscillator");
}

TEST_CASE("curve csv") {
    std::ostringstream out;
    write_curve_csv(out, simulate_schedule(SchedulerAst::constant(0.1), 2));
    CHECK(out.str() == "epoch,lr\n1,0.1\n2,0.1\n");
}
