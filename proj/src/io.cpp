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

#include "autolr/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "autolr/error.hpp"

namespace autolr {

using nlohmann::json;

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_evolution_csv(std::ostream& out, const EvolutionHistory& history, bool wall_clock) {
    out << "run,generation,best_fitness,mean_fitness,best_phenotype,evals,seconds\n";
    for (const auto& r : history.records) {
        out << r.run << ',' << r.generation << ',' << format_number(r.best_fitness) << ','
            << format_number(r.mean_fitness) << ',' << csv_field(r.best_phenotype) << ',' << r.evals << ','
            << (wall_clock ? format_number(r.seconds) : std::string("0")) << '\n';
    }
}

std::string archive_line(const ArchiveRecord& record) {
    const auto& ind = record.individual;
    json genes = json::object();
    for (const auto& [nt, list] : ind.genotype.genes) {
        genes[nt] = list;
    }
    json j = {
        {"run", record.run},
        {"generation", record.generation},
        {"phenotype", ind.phenotype},
        {"fitness", ind.fitness.value_or(0.0)},
        {"genotype", genes},
        {"eval_meta",
         {{"epochs_trained", ind.eval_meta.epochs_trained},
          {"early_stopped", ind.eval_meta.early_stopped},
          {"train_seed", ind.eval_meta.train_seed}}},
        {"note", ind.note},
    };
    return j.dump();
}

ArchiveRecord parse_archive_line(std::string_view line, const Grammar& grammar, const MappingLimits& limits) {
    json j;
    try {
        j = json::parse(line);
        ArchiveRecord rec;
        rec.run = j.at("run").get<std::size_t>();
        rec.generation = j.at("generation").get<std::size_t>();
        Genotype g;
        for (const auto& [nt, list] : j.at("genotype").items()) {
            g.genes[nt] = list.get<std::vector<int>>();
        }
        rec.individual = Individual::from_genotype(grammar, limits, std::move(g));
        if (rec.individual.phenotype != j.at("phenotype").get<std::string>()) {
            throw ConfigError("archive genotype does not map to its recorded phenotype");
        }
        rec.individual.fitness = j.at("fitness").get<double>();
        const auto& meta = j.at("eval_meta");
        rec.individual.eval_meta.epochs_trained = meta.at("epochs_trained").get<std::size_t>();
        rec.individual.eval_meta.early_stopped = meta.at("early_stopped").get<bool>();
        rec.individual.eval_meta.train_seed = meta.at("train_seed").get<std::uint64_t>();
        rec.individual.note = j.value("note", std::string{});
        return rec;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed archive record: ") + e.what());
    }
}

void write_archive(std::ostream& out, const std::vector<ArchiveRecord>& records) {
    for (const auto& r : records) {
        out << archive_line(r) << '\n';
    }
}

std::vector<ArchiveRecord> read_archive(const std::filesystem::path& path, const Grammar& grammar,
                                        const MappingLimits& limits) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open archive " + path.string());
    }
    std::vector<ArchiveRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        records.push_back(parse_archive_line(line, grammar, limits));
    }
    if (records.empty()) {
        throw ConfigError("archive " + path.string() + " has no records");
    }
    return records;
}

const ArchiveRecord& best_record(const std::vector<ArchiveRecord>& records) {
    if (records.empty()) {
        throw Error("no archive records");
    }
    const ArchiveRecord* best = &records.front();
    for (const auto& r : records) {
        if (r.individual.fitness.value_or(0.0) > best->individual.fitness.value_or(0.0)) {
            best = &r;
        }
    }
    return *best;
}

} // namespace autolr
