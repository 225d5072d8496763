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
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace autolr {

struct Symbol {
    enum class Kind { nonterminal, terminal };

    Kind kind = Kind::terminal;
    std::string text;

    static Symbol nt(std::string name) { return {Kind::nonterminal, std::move(name)}; }
    static Symbol t(std::string text) { return {Kind::terminal, std::move(text)}; }

    bool is_nonterminal() const noexcept { return kind == Kind::nonterminal; }

    friend bool operator==(const Symbol&, const Symbol&) = default;
};

using Option = std::vector<Symbol>;

struct Production {
    std::string lhs;
    std::vector<Option> options; // order is significant: genes index into it

    friend bool operator==(const Production&, const Production&) = default;
};

/// A validated context-free grammar. Immutable once constructed.
///
/// Besides the rules themselves the grammar precomputes what the SGE mapper
/// needs: which options are recursive (some child can derive the left-hand
/// side again) and the minimal derivation height of every option, used to
/// restrict choices once the recursion bound is hit.
class Grammar {
public:
    /// Validates and builds. The axiom is the first production's left-hand side.
    explicit Grammar(std::vector<Production> productions, std::string source = {});

    const std::string& axiom() const noexcept { return productions_.front().lhs; }
    const std::string& source() const noexcept { return source_; }
    const std::vector<Production>& productions() const noexcept { return productions_; }

    bool has(std::string_view nonterminal) const;
    const Production& production(std::string_view nonterminal) const;
    std::size_t option_count(std::string_view nonterminal) const { return production(nonterminal).options.size(); }

    /// True if the option contains a nonterminal that can derive `nonterminal` again.
    bool is_recursive_option(std::string_view nonterminal, std::size_t option) const;
    /// True if any option of the nonterminal is recursive.
    bool is_recursive(std::string_view nonterminal) const;

    /// Option indices allowed once the recursion bound is reached: those of
    /// minimal derivation height. Never empty for a validated grammar.
    const std::vector<std::size_t>& restricted_options(std::string_view nonterminal) const;

    /// Structural equality: same rules in the same order. Source text is ignored.
    friend bool operator==(const Grammar& a, const Grammar& b) { return a.productions_ == b.productions_; }

private:
    struct Analysis {
        std::vector<bool> recursive_option;
        bool recursive = false;
        std::vector<std::size_t> restricted;
    };

    std::size_t index_of(std::string_view nonterminal) const;

    std::vector<Production> productions_;
    std::string source_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<Analysis> analysis_;
};

/// Parses the text grammar format:
///
///     <name> ::= option ( | option )*
///
/// Symbols are whitespace separated; `<ident>` is a nonterminal, any other
/// token a terminal. `RANGE(lo, hi, n)` and `IRANGE(lo, hi)` expand to one
/// single-terminal option per grid value. `#` starts a comment and a
/// trailing `\` joins the next line.
Grammar parse_grammar(std::string_view text, std::string source = "<string>");

/// Inverse of parse_grammar for every grammar it can produce.
std::string render_grammar(const Grammar& grammar);

/// lo + i * (hi - lo) / (n - 1) for i in [0, n); the last value is exactly hi.
std::vector<double> evenly_spaced_grid(double lo, double hi, std::size_t n);

/// Shortest decimal text that reads back to exactly `value`.
std::string format_shortest(double value);

/// The learning-rate scheduler grammar: nested if_func conditionals over
/// (learning_rate, epoch) with 100-point constant grids.
Grammar default_autolr_grammar();

/// Text form of default_autolr_grammar() using the range directives.
std::string_view default_autolr_grammar_text();

namespace autolr_grammar {
inline constexpr double lr_min = 0.0001;
inline constexpr double lr_max = 0.1;
inline constexpr std::size_t lr_points = 100;
inline constexpr int epoch_min = 1;
inline constexpr int epoch_max = 100;
} // namespace autolr_grammar

} // namespace autolr
