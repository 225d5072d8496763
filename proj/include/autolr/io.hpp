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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "autolr/sge.hpp"

namespace autolr {

/// Shortest round-trip text in whichever of fixed/scientific is shorter.
std::string format_number(double value);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

/// `run,generation,best_fitness,mean_fitness,best_phenotype,evals,seconds`.
/// Without `wall_clock` the seconds column is written as 0 so logs from
/// identical configurations are byte-identical.
void write_evolution_csv(std::ostream& out, const EvolutionHistory& history, bool wall_clock = false);

/// One JSON object per line: run, generation, genotype, phenotype, fitness, eval_meta, note.
std::string archive_line(const ArchiveRecord& record);
ArchiveRecord parse_archive_line(std::string_view line, const Grammar& grammar, const MappingLimits& limits);

void write_archive(std::ostream& out, const std::vector<ArchiveRecord>& records);

/// Records of a champions.jsonl file.
std::vector<ArchiveRecord> read_archive(const std::filesystem::path& path, const Grammar& grammar,
                                        const MappingLimits& limits);

/// The highest-fitness record (earliest on ties).
const ArchiveRecord& best_record(const std::vector<ArchiveRecord>& records);

} // namespace autolr
