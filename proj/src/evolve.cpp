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

#include <algorithm>
#include <chrono>
#include <numeric>
#include <unordered_map>

#include "autolr/error.hpp"
#include "autolr/sge.hpp"
#include "parallel.hpp"

namespace autolr {

void EvolutionConfig::validate() const {
    if (population_size < 1) {
        throw ConfigError("population_size must be at least 1");
    }
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
        throw ConfigError("mutation_rate must lie in [0, 1]");
    }
    if (elitism < 1 || elitism > population_size) {
        throw ConfigError("elitism must lie in [1, population_size]");
    }
    if (tournament_size < 1) {
        throw ConfigError("tournament_size must be at least 1");
    }
    if (runs < 1) {
        throw ConfigError("runs must be at least 1");
    }
}

std::uint64_t run_train_seed(std::uint64_t rng_seed, std::size_t run) {
    return derive_seed({rng_seed, stream::training, run});
}

namespace {

using Clock = std::chrono::steady_clock;

class RunEngine {
public:
    RunEngine(const EvolutionConfig& config, const Grammar& grammar, const FitnessFn& fitness, std::size_t run)
        : config_(config), grammar_(grammar), fitness_(fitness), run_(run),
          train_seed_(run_train_seed(config.rng_seed, run)), rng_(derive_seed({config.rng_seed, stream::evolution, run})) {}

    void execute(EvolutionHistory& history) {
        auto start = Clock::now();
        std::vector<Individual> population;
        population.reserve(config_.population_size);
        for (std::size_t i = 0; i < config_.population_size; ++i) {
            population.push_back(
                Individual::from_genotype(grammar_, config_.limits, random_genotype(grammar_, config_.limits, rng_)));
        }
        auto evals = evaluate(population);
        record(history, population, 0, evals, start);

        for (std::size_t gen = 1; gen <= config_.generations; ++gen) {
            start = Clock::now();
            population = breed(population);
            evals = evaluate(population);
            record(history, population, gen, evals, start);
        }
        history.run_champions.push_back(best_);
    }

private:
    static double fit(const Individual& ind) { return ind.fitness.value_or(0.0); }

    std::vector<std::size_t> ranking(const std::vector<Individual>& pop) const {
        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fit(pop[a]) > fit(pop[b]); });
        return order;
    }

    const Individual& tournament(const std::vector<Individual>& pop) {
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        std::size_t winner = pick(rng_);
        for (std::size_t k = 1; k < config_.tournament_size; ++k) {
            auto challenger = pick(rng_);
            if (fit(pop[challenger]) > fit(pop[winner]) ||
                (fit(pop[challenger]) == fit(pop[winner]) && challenger < winner)) {
                winner = challenger;
            }
        }
        return pop[winner];
    }

    std::vector<Individual> breed(const std::vector<Individual>& pop) {
        std::vector<Individual> next;
        next.reserve(config_.population_size);
        auto order = ranking(pop);
        for (std::size_t e = 0; e < config_.elitism; ++e) {
            next.push_back(pop[order[e]]);
        }
        while (next.size() < config_.population_size) {
            Genotype child = tournament(pop).genotype;
            if (config_.crossover) {
                child = config_.crossover(child, tournament(pop).genotype, rng_);
            }
            child = mutate(child, grammar_, config_.limits, config_.mutation_rate, rng_);
            next.push_back(Individual::from_genotype(grammar_, config_.limits, std::move(child)));
        }
        return next;
    }

    // Evaluates every unevaluated individual, reusing cached results for
    // phenotypes already seen in this run. Returns the number of fresh evaluations.
    std::size_t evaluate(std::vector<Individual>& pop) {
        std::vector<std::size_t> pending;
        std::vector<std::string> keys;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (pop[i].fitness || cache_.count(pop[i].phenotype) != 0) {
                continue;
            }
            if (std::find(keys.begin(), keys.end(), pop[i].phenotype) != keys.end()) {
                continue;
            }
            pending.push_back(i);
            keys.push_back(pop[i].phenotype);
        }

        std::vector<FitnessOutcome> outcomes(pending.size());
        detail::parallel_for(pending.size(), config_.jobs, [&](std::size_t k) {
            const auto& ind = pop[pending[k]];
            try {
                outcomes[k] = fitness_(ind, train_seed_);
            } catch (const std::exception& e) {
                outcomes[k] = FitnessOutcome{0.0, EvalMeta{0, false, train_seed_}, std::string("evaluation failed: ") + e.what()};
            }
            outcomes[k].meta.train_seed = train_seed_;
        });
        for (std::size_t k = 0; k < pending.size(); ++k) {
            cache_.emplace(keys[k], std::move(outcomes[k]));
        }

        for (auto& ind : pop) {
            if (ind.fitness) {
                continue;
            }
            const auto& out = cache_.at(ind.phenotype);
            ind.fitness = out.fitness;
            ind.eval_meta = out.meta;
            ind.note = out.note;
        }
        return pending.size();
    }

    void record(EvolutionHistory& history, const std::vector<Individual>& pop, std::size_t gen, std::size_t evals,
                Clock::time_point start) {
        const auto& best = pop[ranking(pop).front()];
        double sum = 0.0;
        for (const auto& ind : pop) {
            sum += fit(ind);
        }
        GenerationRecord rec;
        rec.run = run_;
        rec.generation = gen;
        rec.best_fitness = fit(best);
        rec.mean_fitness = sum / static_cast<double>(pop.size());
        rec.best_phenotype = best.phenotype;
        rec.evals = evals;
        rec.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        history.records.push_back(std::move(rec));

        if (gen == 0 || fit(best) > fit(best_)) {
            best_ = best;
            history.improvements.push_back({run_, gen, best});
        }
    }

    const EvolutionConfig& config_;
    const Grammar& grammar_;
    const FitnessFn& fitness_;
    std::size_t run_;
    std::uint64_t train_seed_;
    Rng rng_;
    std::unordered_map<std::string, FitnessOutcome> cache_;
    Individual best_;
};

} // namespace

EvolutionHistory evolve(const EvolutionConfig& config, const Grammar& grammar, const FitnessFn& fitness) {
    config.validate();
    EvolutionHistory history;
    for (std::size_t run = 0; run < config.runs; ++run) {
        RunEngine(config, grammar, fitness, run).execute(history);
    }
    history.champion = history.run_champions.front();
    for (const auto& c : history.run_champions) {
        if (c.fitness.value_or(0.0) > history.champion.fitness.value_or(0.0)) {
            history.champion = c;
        }
    }
    return history;
}

} // namespace autolr
