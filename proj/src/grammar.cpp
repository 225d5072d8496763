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

#include "autolr/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "autolr/error.hpp"

namespace autolr {

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
        return false;
    }
    return std::all_of(s.begin() + 1, s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

bool is_nonterminal_token(std::string_view tok) {
    return tok.size() >= 3 && tok.front() == '<' && tok.back() == '>' &&
           is_identifier(tok.substr(1, tok.size() - 2));
}

constexpr std::size_t unbounded = std::numeric_limits<std::size_t>::max();

} // namespace

Grammar::Grammar(std::vector<Production> productions, std::string source)
    : productions_(std::move(productions)), source_(std::move(source)) {
    if (productions_.empty()) {
        throw GrammarValidationError("grammar has no productions");
    }
    for (std::size_t i = 0; i < productions_.size(); ++i) {
        const auto& p = productions_[i];
        if (!is_identifier(p.lhs)) {
            throw GrammarValidationError("invalid nonterminal name '" + p.lhs + "'");
        }
        if (!index_.emplace(p.lhs, i).second) {
            throw GrammarValidationError("duplicate rule for <" + p.lhs + ">");
        }
        if (p.options.empty()) {
            throw GrammarValidationError("<" + p.lhs + "> has no options");
        }
        for (const auto& option : p.options) {
            if (option.empty()) {
                throw GrammarValidationError("<" + p.lhs + "> has an empty option");
            }
            for (const auto& sym : option) {
                if (sym.text.empty()) {
                    throw GrammarValidationError("empty symbol in <" + p.lhs + ">");
                }
                if (!sym.is_nonterminal() &&
                    std::any_of(sym.text.begin(), sym.text.end(),
                                [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
                    throw GrammarValidationError("terminal '" + sym.text + "' contains whitespace");
                }
            }
        }
    }

    const std::size_t n = productions_.size();

    // Dangling references; build the direct "appears in an option of" relation.
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& option : productions_[i].options) {
            for (const auto& sym : option) {
                if (!sym.is_nonterminal()) {
                    continue;
                }
                auto it = index_.find(sym.text);
                if (it == index_.end()) {
                    throw GrammarValidationError("<" + productions_[i].lhs + "> references undefined <" + sym.text +
                                                 ">");
                }
                reach[i][it->second] = true;
            }
        }
    }
    // Transitive closure.
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!reach[i][k]) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (reach[k][j]) {
                    reach[i][j] = true;
                }
            }
        }
    }
    for (std::size_t j = 1; j < n; ++j) {
        if (!reach[0][j]) {
            throw GrammarValidationError("<" + productions_[j].lhs + "> is unreachable from the axiom <" + axiom() +
                                         ">");
        }
    }

    // Minimal derivation heights by fixpoint iteration.
    std::vector<std::size_t> height(n, unbounded);
    auto option_height = [&](const Option& option) {
        std::size_t h = 0;
        for (const auto& sym : option) {
            if (sym.is_nonterminal()) {
                auto child = height[index_.find(sym.text)->second];
                if (child == unbounded) {
                    return unbounded;
                }
                h = std::max(h, child);
            }
        }
        return h + 1;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& option : productions_[i].options) {
                auto h = option_height(option);
                if (h < height[i]) {
                    height[i] = h;
                    changed = true;
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (height[i] == unbounded) {
            throw GrammarValidationError("<" + productions_[i].lhs + "> cannot derive a finite string");
        }
    }

    analysis_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = analysis_[i];
        const auto& options = productions_[i].options;
        a.recursive_option.resize(options.size(), false);
        for (std::size_t o = 0; o < options.size(); ++o) {
            for (const auto& sym : options[o]) {
                if (!sym.is_nonterminal()) {
                    continue;
                }
                auto c = index_.find(sym.text)->second;
                if (c == i || reach[c][i]) {
                    a.recursive_option[o] = true;
                }
            }
            a.recursive = a.recursive || a.recursive_option[o];
            if (option_height(options[o]) == height[i]) {
                a.restricted.push_back(o);
            }
        }
    }
}

std::size_t Grammar::index_of(std::string_view nonterminal) const {
    auto it = index_.find(nonterminal);
    if (it == index_.end()) {
        throw Error("unknown nonterminal <" + std::string(nonterminal) + ">");
    }
    return it->second;
}

bool Grammar::has(std::string_view nonterminal) const { return index_.find(nonterminal) != index_.end(); }

const Production& Grammar::production(std::string_view nonterminal) const {
    return productions_[index_of(nonterminal)];
}

bool Grammar::is_recursive_option(std::string_view nonterminal, std::size_t option) const {
    return analysis_[index_of(nonterminal)].recursive_option.at(option);
}

bool Grammar::is_recursive(std::string_view nonterminal) const { return analysis_[index_of(nonterminal)].recursive; }

const std::vector<std::size_t>& Grammar::restricted_options(std::string_view nonterminal) const {
    return analysis_[index_of(nonterminal)].restricted;
}

std::vector<double> evenly_spaced_grid(double lo, double hi, std::size_t n) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw InvalidRangeError("grid bounds must be finite with lo < hi");
    }
    if (n < 2) {
        throw InvalidRangeError("grid needs at least 2 points");
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = lo + static_cast<double>(i) * step;
    }
    grid.back() = hi;
    return grid;
}

std::string format_shortest(double value) {
    char buf[128];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
    if (res.ec != std::errc{}) {
        res = std::to_chars(buf, buf + sizeof(buf), value);
    }
    return std::string(buf, res.ptr);
}

namespace {

// One character of a logical (continuation-joined) line with its source position.
struct SourceChar {
    char c;
    std::size_t line;
    std::size_t column;
};

using LogicalLine = std::vector<SourceChar>;

std::vector<LogicalLine> split_logical_lines(std::string_view text) {
    std::vector<LogicalLine> lines;
    LogicalLine current;
    std::size_t line = 1;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        std::string_view raw = text.substr(pos, eol - pos);
        if (!raw.empty() && raw.back() == '\r') {
            raw.remove_suffix(1);
        }
        // Strip comments: '#' at the start of a token.
        std::size_t cut = raw.size();
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(raw[i - 1])))) {
                cut = i;
                break;
            }
        }
        raw = raw.substr(0, cut);
        while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) {
            raw.remove_suffix(1);
        }
        bool continued = !raw.empty() && raw.back() == '\\';
        if (continued) {
            raw.remove_suffix(1);
        }
        for (std::size_t i = 0; i < raw.size(); ++i) {
            current.push_back({raw[i], line, i + 1});
        }
        if (continued) {
            current.push_back({' ', line, raw.size() + 1});
        } else {
            lines.push_back(std::move(current));
            current.clear();
        }
        if (eol == text.size()) {
            break;
        }
        pos = eol + 1;
        ++line;
    }
    if (!current.empty()) {
        lines.push_back(std::move(current));
    }
    return lines;
}

struct Token {
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> tokenize(const LogicalLine& chars) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    auto is_space = [&](std::size_t k) { return std::isspace(static_cast<unsigned char>(chars[k].c)) != 0; };
    auto starts_with = [&](std::size_t k, std::string_view prefix) {
        if (k + prefix.size() > chars.size()) {
            return false;
        }
        for (std::size_t j = 0; j < prefix.size(); ++j) {
            if (chars[k + j].c != prefix[j]) {
                return false;
            }
        }
        return true;
    };
    while (i < chars.size()) {
        if (is_space(i)) {
            ++i;
            continue;
        }
        Token tok{{}, chars[i].line, chars[i].column};
        if (starts_with(i, "RANGE(") || starts_with(i, "IRANGE(")) {
            while (i < chars.size() && chars[i].c != ')') {
                if (!is_space(i)) {
                    tok.text.push_back(chars[i].c);
                }
                ++i;
            }
            if (i == chars.size()) {
                throw GrammarSyntaxError(tok.line, tok.column, "unterminated range directive");
            }
            tok.text.push_back(')');
            ++i;
        } else {
            while (i < chars.size() && !is_space(i)) {
                tok.text.push_back(chars[i].c);
                ++i;
            }
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

template <typename T>
T parse_number(std::string_view s, const Token& tok) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw GrammarSyntaxError(tok.line, tok.column, "invalid number '" + std::string(s) + "' in " + tok.text);
    }
    return value;
}

std::vector<std::string_view> directive_args(const Token& tok) {
    auto open = tok.text.find('(');
    std::string_view body(tok.text);
    body = body.substr(open + 1, body.size() - open - 2);
    std::vector<std::string_view> args;
    std::size_t start = 0;
    while (true) {
        auto comma = body.find(',', start);
        args.push_back(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return args;
}

std::vector<Option> expand_directive(const Token& tok) {
    auto args = directive_args(tok);
    std::vector<Option> options;
    if (tok.text.starts_with("RANGE(")) {
        if (args.size() != 3) {
            throw GrammarSyntaxError(tok.line, tok.column, "RANGE expects (lo, hi, n)");
        }
        auto lo = parse_number<double>(args[0], tok);
        auto hi = parse_number<double>(args[1], tok);
        auto n = parse_number<std::size_t>(args[2], tok);
        std::vector<double> grid;
        try {
            grid = evenly_spaced_grid(lo, hi, n);
        } catch (const InvalidRangeError& e) {
            throw GrammarSyntaxError(tok.line, tok.column, e.what());
        }
        for (double v : grid) {
            options.push_back({Symbol::t(format_shortest(v))});
        }
    } else {
        if (args.size() != 2) {
            throw GrammarSyntaxError(tok.line, tok.column, "IRANGE expects (lo, hi)");
        }
        auto lo = parse_number<long long>(args[0], tok);
        auto hi = parse_number<long long>(args[1], tok);
        if (lo > hi) {
            throw GrammarSyntaxError(tok.line, tok.column, "IRANGE needs lo <= hi");
        }
        for (auto v = lo; v <= hi; ++v) {
            options.push_back({Symbol::t(std::to_string(v))});
        }
    }
    return options;
}

bool is_directive(const Token& tok) { return tok.text.starts_with("RANGE(") || tok.text.starts_with("IRANGE("); }

} // namespace

Grammar parse_grammar(std::string_view text, std::string source) {
    std::vector<Production> productions;
    std::map<std::string, std::size_t, std::less<>> seen;

    for (const auto& line : split_logical_lines(text)) {
        auto tokens = tokenize(line);
        if (tokens.empty()) {
            continue;
        }
        const auto& head = tokens[0];
        if (!is_nonterminal_token(head.text)) {
            throw GrammarSyntaxError(head.line, head.column, "expected <name> at start of rule, got '" + head.text + "'");
        }
        if (tokens.size() < 2 || tokens[1].text != "::=") {
            const auto& at = tokens.size() < 2 ? head : tokens[1];
            throw GrammarSyntaxError(at.line, at.column, "expected '::=' after " + head.text);
        }
        Production p{head.text.substr(1, head.text.size() - 2), {}};
        if (seen.count(p.lhs) != 0) {
            throw GrammarSyntaxError(head.line, head.column, "duplicate rule for " + head.text);
        }

        Option option;
        const Token* option_start = tokens.size() > 2 ? &tokens[2] : &tokens[1];
        auto close_option = [&](const Token& at) {
            if (option.empty()) {
                throw GrammarSyntaxError(at.line, at.column, "empty option in " + head.text);
            }
            p.options.push_back(std::move(option));
            option.clear();
        };
        bool pending_directive = false;
        for (std::size_t k = 2; k < tokens.size(); ++k) {
            const auto& tok = tokens[k];
            if (tok.text == "|") {
                if (pending_directive) {
                    pending_directive = false;
                    option_start = k + 1 < tokens.size() ? &tokens[k + 1] : &tok;
                    continue;
                }
                close_option(tok);
                option_start = k + 1 < tokens.size() ? &tokens[k + 1] : &tok;
                continue;
            }
            if (pending_directive) {
                throw GrammarSyntaxError(tok.line, tok.column, "a range directive must be a whole option");
            }
            if (is_directive(tok)) {
                if (!option.empty()) {
                    throw GrammarSyntaxError(tok.line, tok.column, "a range directive must be a whole option");
                }
                for (auto& expanded : expand_directive(tok)) {
                    p.options.push_back(std::move(expanded));
                }
                pending_directive = true;
                continue;
            }
            option.push_back(is_nonterminal_token(tok.text) ? Symbol::nt(tok.text.substr(1, tok.text.size() - 2))
                                                            : Symbol::t(tok.text));
        }
        if (!pending_directive) {
            close_option(*option_start);
        }
        seen.emplace(p.lhs, productions.size());
        productions.push_back(std::move(p));
    }
    if (productions.empty()) {
        throw GrammarSyntaxError(1, 1, "grammar contains no rules");
    }
    return Grammar(std::move(productions), std::move(source));
}

std::string render_grammar(const Grammar& grammar) {
    std::ostringstream out;
    for (const auto& p : grammar.productions()) {
        out << '<' << p.lhs << "> ::=";
        for (std::size_t o = 0; o < p.options.size(); ++o) {
            if (o > 0) {
                out << " |";
            }
            for (const auto& sym : p.options[o]) {
                out << ' ';
                if (sym.is_nonterminal()) {
                    out << '<' << sym.text << '>';
                } else {
                    out << sym.text;
                }
            }
        }
        out << '\n';
    }
    return out.str();
}

Grammar default_autolr_grammar() {
    namespace g = autolr_grammar;
    std::vector<Production> rules;
    rules.push_back({"expr",
                     {{Symbol::t("if_func("), Symbol::nt("logic_expr"), Symbol::t(","), Symbol::nt("expr"),
                       Symbol::t(","), Symbol::nt("expr"), Symbol::t(")")},
                      {Symbol::nt("lr_const")}}});
    rules.push_back({"logic_expr",
                     {{Symbol::t("learning_rate"), Symbol::nt("logic_op"), Symbol::nt("lr_const")},
                      {Symbol::t("epoch"), Symbol::nt("logic_op"), Symbol::nt("ep_const")}}});
    rules.push_back({"logic_op", {{Symbol::t("<")}, {Symbol::t("<=")}, {Symbol::t(">")}, {Symbol::t(">=")}}});

    Production lr{"lr_const", {}};
    for (double v : evenly_spaced_grid(g::lr_min, g::lr_max, g::lr_points)) {
        lr.options.push_back({Symbol::t(format_shortest(v))});
    }
    rules.push_back(std::move(lr));

    Production ep{"ep_const", {}};
    for (int e = g::epoch_min; e <= g::epoch_max; ++e) {
        ep.options.push_back({Symbol::t(std::to_string(e))});
    }
    rules.push_back(std::move(ep));

    return Grammar(std::move(rules), "builtin:autolr");
}

std::string_view default_autolr_grammar_text() {
    return "# Learning-rate scheduler grammar.\n"
           "<expr> ::= if_func( <logic_expr> , <expr> , <expr> ) | <lr_const>\n"
           "<logic_expr> ::= learning_rate <logic_op> <lr_const> \\\n"
           "               | epoch <logic_op> <ep_const>\n"
           "<logic_op> ::= < | <= | > | >=\n"
           "<lr_const> ::= RANGE(0.0001, 0.1, 100)\n"
           "<ep_const> ::= IRANGE(1, 100)\n";
}

} // namespace autolr
