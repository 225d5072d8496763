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

#include "autolr/sge.hpp"

#include <numeric>

#include "autolr/error.hpp"

namespace autolr {

std::size_t Genotype::size() const {
    return std::accumulate(genes.begin(), genes.end(), std::size_t{0},
                           [](std::size_t n, const auto& kv) { return n + kv.second.size(); });
}

namespace {

// Option set a nonterminal chooses from at a given recursion depth.
struct Context {
    bool restricted = false;
    std::size_t choices = 0;

    std::size_t option_for(const Grammar& grammar, const std::string& nt, std::size_t index) const {
        return restricted ? grammar.restricted_options(nt)[index % choices] : index;
    }
};

Context context_of(const Grammar& grammar, const MappingLimits& limits, const std::string& nt, std::size_t depth) {
    if (depth >= limits.max_recursion_depth && grammar.is_recursive(nt)) {
        return {true, grammar.restricted_options(nt).size()};
    }
    return {false, grammar.option_count(nt)};
}

std::size_t child_depth(const Grammar& grammar, const std::string& nt, std::size_t option, std::size_t depth) {
    return depth + (grammar.is_recursive_option(nt, option) ? 1 : 0);
}

class Mapper {
public:
    Mapper(const Grammar& grammar, const MappingLimits& limits, const Genotype& genotype)
        : grammar_(grammar), limits_(limits), genotype_(genotype) {}

    Derivation run() {
        Derivation d;
        d.root = expand(grammar_.axiom(), 0, d.tokens);
        return d;
    }

private:
    DerivationNode expand(const std::string& nt, std::size_t depth, std::vector<std::string>& tokens) {
        auto it = genotype_.genes.find(nt);
        auto& cursor = cursors_[nt];
        if (it == genotype_.genes.end() || cursor >= it->second.size()) {
            throw MalformedGenotypeError("genotype ran out of genes for <" + nt + ">");
        }
        const int gene = it->second[cursor++];
        const auto count = grammar_.option_count(nt);
        if (gene < 0 || static_cast<std::size_t>(gene) >= count) {
            throw MalformedGenotypeError("gene " + std::to_string(gene) + " out of range for <" + nt + "> (" +
                                         std::to_string(count) + " options)");
        }
        const auto ctx = context_of(grammar_, limits_, nt, depth);
        DerivationNode node;
        node.nonterminal = nt;
        node.gene = gene;
        node.choices = ctx.choices;
        node.depth = depth;
        node.option = ctx.option_for(grammar_, nt, static_cast<std::size_t>(gene));
        const auto next_depth = child_depth(grammar_, nt, node.option, depth);
        for (const auto& sym : grammar_.production(nt).options[node.option]) {
            if (sym.is_nonterminal()) {
                node.children.push_back(expand(sym.text, next_depth, tokens));
            } else {
                tokens.push_back(sym.text);
            }
        }
        return node;
    }

    const Grammar& grammar_;
    const MappingLimits& limits_;
    const Genotype& genotype_;
    std::map<std::string, std::size_t> cursors_;
};

// Random subtree; `forced` fixes the first gene.
DerivationNode grow(const Grammar& grammar, const MappingLimits& limits, const std::string& nt, std::size_t depth,
                    Rng& rng, std::optional<int> forced = std::nullopt) {
    const auto ctx = context_of(grammar, limits, nt, depth);
    DerivationNode node;
    node.nonterminal = nt;
    node.choices = ctx.choices;
    node.depth = depth;
    if (forced) {
        node.gene = *forced;
    } else {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(ctx.choices) - 1);
        node.gene = pick(rng);
    }
    node.option = ctx.option_for(grammar, nt, static_cast<std::size_t>(node.gene));
    const auto next_depth = child_depth(grammar, nt, node.option, depth);
    for (const auto& sym : grammar.production(nt).options[node.option]) {
        if (sym.is_nonterminal()) {
            node.children.push_back(grow(grammar, limits, sym.text, next_depth, rng));
        }
    }
    return node;
}

DerivationNode mutate_node(const DerivationNode& node, const Grammar& grammar, const MappingLimits& limits,
                           double rate, Rng& rng) {
    if (node.choices >= 2) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < rate) {
            const int current = node.gene % static_cast<int>(node.choices);
            std::uniform_int_distribution<int> pick(0, static_cast<int>(node.choices) - 2);
            int replacement = pick(rng);
            if (replacement >= current) {
                ++replacement;
            }
            return grow(grammar, limits, node.nonterminal, node.depth, rng, replacement);
        }
    }
    DerivationNode out = node;
    for (auto& child : out.children) {
        child = mutate_node(child, grammar, limits, rate, rng);
    }
    return out;
}

void encode_into(const DerivationNode& node, Genotype& out) {
    out.genes[node.nonterminal].push_back(node.gene);
    for (const auto& child : node.children) {
        encode_into(child, out);
    }
}

class TokenEncoder {
public:
    TokenEncoder(const Grammar& grammar, const MappingLimits& limits, std::span<const std::string> tokens)
        : grammar_(grammar), limits_(limits), tokens_(tokens) {}

    std::vector<std::pair<std::size_t, DerivationNode>> parse(const std::string& nt, std::size_t depth,
                                                              std::size_t pos) {
        const auto ctx = context_of(grammar_, limits_, nt, depth);
        std::vector<std::pair<std::size_t, DerivationNode>> results;
        for (std::size_t k = 0; k < ctx.choices; ++k) {
            const auto option = ctx.option_for(grammar_, nt, k);
            const auto next_depth = child_depth(grammar_, nt, option, depth);

            struct Partial {
                std::size_t pos;
                std::vector<DerivationNode> children;
            };
            std::vector<Partial> states{{pos, {}}};
            for (const auto& sym : grammar_.production(nt).options[option]) {
                std::vector<Partial> next;
                for (auto& st : states) {
                    if (!sym.is_nonterminal()) {
                        if (st.pos < tokens_.size() && tokens_[st.pos] == sym.text) {
                            next.push_back({st.pos + 1, std::move(st.children)});
                        }
                        continue;
                    }
                    for (auto& [end, child] : parse(sym.text, next_depth, st.pos)) {
                        auto children = st.children;
                        children.push_back(std::move(child));
                        next.push_back({end, std::move(children)});
                    }
                }
                states = std::move(next);
                if (states.empty()) {
                    break;
                }
            }
            for (auto& st : states) {
                DerivationNode node;
                node.nonterminal = nt;
                node.option = option;
                node.gene = static_cast<int>(k);
                node.choices = ctx.choices;
                node.depth = depth;
                node.children = std::move(st.children);
                results.emplace_back(st.pos, std::move(node));
            }
        }
        return results;
    }

private:
    const Grammar& grammar_;
    const MappingLimits& limits_;
    std::span<const std::string> tokens_;
};

} // namespace

Derivation derive(const Grammar& grammar, const MappingLimits& limits, const Genotype& genotype) {
    return Mapper(grammar, limits, genotype).run();
}

Genotype encode(const DerivationNode& root) {
    Genotype g;
    encode_into(root, g);
    return g;
}

Genotype encode_tokens(const Grammar& grammar, const MappingLimits& limits, std::span<const std::string> tokens) {
    TokenEncoder encoder(grammar, limits, tokens);
    for (auto& [end, node] : encoder.parse(grammar.axiom(), 0, 0)) {
        if (end == tokens.size()) {
            return encode(node);
        }
    }
    throw MalformedGenotypeError("token sequence is not derivable within the recursion bound");
}

Phenotype map_genotype(const Grammar& grammar, const MappingLimits& limits, const Genotype& genotype) {
    auto d = derive(grammar, limits, genotype);
    auto text = join_tokens(d.tokens);
    auto ast = parse_phenotype(text, grammar);
    return {std::move(text), std::move(ast)};
}

Genotype random_genotype(const Grammar& grammar, const MappingLimits& limits, Rng& rng) {
    return encode(grow(grammar, limits, grammar.axiom(), 0, rng));
}

Genotype mutate(const Genotype& genotype, const Grammar& grammar, const MappingLimits& limits, double rate, Rng& rng) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw Error("mutation rate must lie in [0, 1]");
    }
    auto d = derive(grammar, limits, genotype);
    return encode(mutate_node(d.root, grammar, limits, rate, rng));
}

Individual Individual::from_genotype(const Grammar& grammar, const MappingLimits& limits, Genotype genotype) {
    auto p = map_genotype(grammar, limits, genotype);
    Individual ind;
    ind.genotype = std::move(genotype);
    ind.phenotype = std::move(p.text);
    ind.ast = std::move(p.ast);
    return ind;
}

} // namespace autolr
