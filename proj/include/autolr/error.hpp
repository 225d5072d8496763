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
#include <stdexcept>
#include <string>

namespace autolr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error in a grammar file; line and column are 1-based.
class GrammarSyntaxError : public Error {
public:
    GrammarSyntaxError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Structural problem in an otherwise well-formed grammar (dangling, unreachable, non-terminating).
class GrammarValidationError : public Error {
public:
    using Error::Error;
};

class InvalidRangeError : public Error {
public:
    using Error::Error;
};

/// Phenotype text that does not parse, or whose constants are off the grammar's grids.
class PhenotypeError : public Error {
public:
    PhenotypeError(std::size_t position, const std::string& what)
        : Error("position " + std::to_string(position) + ": " + what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class MalformedGenotypeError : public Error {
public:
    using Error::Error;
};

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace autolr
