// Copyright 2026 The mprho Authors
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

#include <cstdio>
#include <string>
#include <type_traits>
#include <vector>

#include "mprho/errors.hpp"

namespace mprho::experiments {

/// Doubles with 17 significant digits (round-trip exact).
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Minimal CSV writer: one header row, fixed column count.
class CsvWriter {
   public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
        add_row(header);
    }

    template <typename... Ts>
    void row(const Ts &...values) {
        std::vector<std::string> cells;
        (cells.push_back(cell(values)), ...);
        add_row(cells);
    }

    const std::string &str() const {
        return text_;
    }

   private:
    template <typename T>
    static std::string cell(const T &v) {
        if constexpr (std::is_floating_point_v<T>) {
            return format_double(v);
        } else if constexpr (std::is_integral_v<T>) {
            return std::to_string(v);
        } else {
            return std::string(v);
        }
    }

    void add_row(const std::vector<std::string> &cells) {
        if (cells.size() != columns_) throw Error("csv: row width does not match header");
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k > 0) text_ += ',';
            text_ += cells[k];
        }
        text_ += '\n';
    }

    std::size_t columns_;
    std::string text_;
};

}  // namespace mprho::experiments
