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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autolr/grammar.hpp"
#include "autolr/scheduler.hpp"
#include "autolr/seeding.hpp"

namespace autolr {

struct MappingLimits {
    /// Recursive expansions allowed along any root-to-leaf path. At the bound a
    /// recursive nonterminal may only pick its minimal-height options.
    std::size_t max_recursion_depth = 4;
};

/// Structured GE genotype: one integer list per nonterminal, consumed in
/// pre-order during mapping.
struct Genotype {
    std::map<std::string, std::vector<int>> genes;

    std::size_t size() const;

    friend bool operator==(const Genotype&, const Genotype&) = default;
};

/// One expanded nonterminal of a derivation.
struct DerivationNode {
    std::string nonterminal;
    std::size_t option = 0;  // index into the production's options
    int gene = 0;            // gene as stored in the genotype
    std::size_t choices = 0; // size of the option set the gene was read against
    std::size_t depth = 0;   // recursion depth at which it was expanded
    std::vector<DerivationNode> children; // one per nonterminal in the option, in order
};

struct Derivation {
    DerivationNode root;
    std::vector<std::string> tokens;
};

/// Generic genotype-to-derivation mapping. Throws MalformedGenotypeError when a
/// gene is out of range or a list runs out.
Derivation derive(const Grammar& grammar, const MappingLimits& limits, const Genotype& genotype);

/// Exactly the genes a derivation consumes, in consumption order.
Genotype encode(const DerivationNode& root);

/// Finds a genotype whose mapping yields `tokens`; throws if none exists within limits.
Genotype encode_tokens(const Grammar& grammar, const MappingLimits& limits, std::span<const std::string> tokens);

struct Phenotype {
    std::string text;
    SchedulerAst ast;
};

Phenotype map_genotype(const Grammar& grammar, const MappingLimits& limits, const Genotype& genotype);

Genotype random_genotype(const Grammar& grammar, const MappingLimits& limits, Rng& rng);

/// Per-gene mutation over the active genes. A mutated gene takes a different
/// value from its context; the subtree below it is regenerated at random.
Genotype mutate(const Genotype& genotype, const Grammar& grammar, const MappingLimits& limits, double rate, Rng& rng);

struct EvalMeta {
    std::size_t epochs_trained = 0;
    bool early_stopped = false;
    std::uint64_t train_seed = 0;

    friend bool operator==(const EvalMeta&, const EvalMeta&) = default;
};

struct Individual {
    Genotype genotype;
    std::string phenotype;
    SchedulerAst ast = SchedulerAst::constant(0.0);
    std::optional<double> fitness;
    EvalMeta eval_meta;
    std::string note;

    static Individual from_genotype(const Grammar& grammar, const MappingLimits& limits, Genotype genotype);
};

struct FitnessOutcome {
    double fitness = 0.0;
    EvalMeta meta;
    std::string note;
};

/// Must be a pure function of (individual, train_seed).
using FitnessFn = std::function<FitnessOutcome(const Individual&, std::uint64_t train_seed)>;

/// Optional recombination. Not used unless set.
using CrossoverFn = std::function<Genotype(const Genotype&, const Genotype&, Rng&)>;

struct EvolutionConfig {
    std::size_t population_size = 5;
    std::size_t generations = 50;
    double mutation_rate = 0.15;
    std::size_t runs = 10;
    std::size_t elitism = 1;
    std::size_t tournament_size = 3;
    std::uint64_t rng_seed = 0;
    MappingLimits limits;
    std::size_t jobs = 1;
    CrossoverFn crossover;

    void validate() const;
};

struct GenerationRecord {
    std::size_t run = 0;
    std::size_t generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::string best_phenotype;
    std::size_t evals = 0;
    double seconds = 0.0;
};

/// A new per-run best.
struct ArchiveRecord {
    std::size_t run = 0;
    std::size_t generation = 0;
    Individual individual;
};

struct EvolutionHistory {
    std::vector<GenerationRecord> records;
    std::vector<ArchiveRecord> improvements;
    std::vector<Individual> run_champions;
    Individual champion;
};

/// Seed every fitness evaluation of run `run` receives.
std::uint64_t run_train_seed(std::uint64_t rng_seed, std::size_t run);

EvolutionHistory evolve(const EvolutionConfig& config, const Grammar& grammar, const FitnessFn& fitness);

} // namespace autolr
