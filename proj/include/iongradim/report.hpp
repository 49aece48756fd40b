// Copyright 2026 The iongradim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Tabular result containers shared by the scenarios and the CLI.

#include "foundation.hpp"

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

namespace iongradim {

using Cell = std::variant<long long, double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t column(const std::string &col) const {
        const auto it = std::find(columns.begin(), columns.end(), col);
        if (it == columns.end())
            throw IndexError("report: table '" + name + "' has no column '" + col + "'");
        return static_cast<std::size_t>(it - columns.begin());
    }

    /** Numeric cell (integers widen to double). */
    double number(std::size_t row, const std::string &col) const {
        const Cell &c = rows.at(row).at(column(col));
        if (const auto *d = std::get_if<double>(&c))
            return *d;
        if (const auto *i = std::get_if<long long>(&c))
            return static_cast<double>(*i);
        throw IndexError("report: cell '" + col + "' of table '" + name + "' is not numeric");
    }
};

/** Where a reported number came from. */
enum class Provenance { Computed, Paper, Input };

inline const char *to_string(Provenance p) {
    switch (p) {
    case Provenance::Computed:
        return "computed";
    case Provenance::Paper:
        return "paper";
    case Provenance::Input:
        return "input";
    }
    return "?";
}

struct Quantity {
    std::string name;
    double value;
    std::string unit;
    Provenance source;
};

struct ScenarioReport {
    std::string scenario;
    std::string mode; ///< "paper-values" or "computed"
    std::vector<Quantity> summary;
    std::vector<Table> tables;
    std::vector<std::string> annotations;

    const Quantity &quantity(const std::string &name) const {
        for (const auto &q : summary)
            if (q.name == name)
                return q;
        throw IndexError("report: no quantity '" + name + "' in scenario " + scenario);
    }
    bool has_quantity(const std::string &name) const {
        return std::any_of(summary.begin(), summary.end(), [&](const Quantity &q) { return q.name == name; });
    }
    const Table &table(const std::string &name) const {
        for (const auto &t : tables)
            if (t.name == name)
                return t;
        throw IndexError("report: no table '" + name + "' in scenario " + scenario);
    }
};

} // namespace iongradim
