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

// Validation-loss sequences with their stop epoch worked out by hand for
// patience 3 (stop once three epochs in a row fail to beat the best loss seen
// before them). 0 means training runs to the end.

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "autolr/fitness.hpp"

namespace autolr::testing {

struct StopCase {
    std::string name;
    std::vector<double> losses;
    std::size_t stop_epoch;
};

inline std::vector<StopCase> early_stop_cases() {
    std::vector<StopCase> cases{
        {"still improving", {1.0, 0.9, 0.8}, 0},
        {"three misses after 0.9", {1.0, 0.9, 0.95, 0.92, 0.91}, 5},
        {"flat from the start", {1, 1, 1, 1}, 4},
        {"rising", {1, 2, 3, 4, 5}, 4},
        {"late dip then rise", {1, 0.5, 0.6, 0.7, 0.4, 0.5, 0.6, 0.7}, 8},
        {"plateau at 3", {5, 4, 3, 3, 3, 3}, 6},
        {"small dip below 1", {2, 1, 1.5, 0.99, 1.2, 1.3, 1.4}, 7},
        {"single epoch", {3}, 0},
        {"too short to judge", {3, 4, 5}, 0},
        {"rise right away", {3, 4, 5, 6}, 4},
        {"recovery then plateau", {3, 4, 5, 2.9, 3, 3, 3}, 7},
        {"saw-tooth descent", {10, 9, 9.5, 8, 8.5, 7, 7.5, 6}, 0},
        {"plateau at 0.9", {1, 0.9, 0.9, 0.9, 0.9}, 5},
        {"bounce", {0.5, 0.6, 0.4, 0.7, 0.8, 0.9}, 6},
        {"two epochs", {1, 1.1}, 0},
        {"late improvement", {2, 1, 1, 1, 0.5}, 0},
        {"ties do not count", {2, 1, 1, 1, 1}, 5},
    };
    StopCase harmonic{"1/e then plateau", {}, 33};
    for (int e = 1; e <= 50; ++e) {
        harmonic.losses.push_back(1.0 / std::min(e, 30));
    }
    cases.push_back(harmonic);
    StopCase monotone{"monotone 100 epochs", {}, 0};
    StopCase tiny{"monotone by 1e-12", {}, 0};
    for (int e = 1; e <= 100; ++e) {
        monotone.losses.push_back(2.0 / e);
        tiny.losses.push_back(1.0 - e * 1e-12);
    }
    cases.push_back(monotone);
    cases.push_back(tiny);
    return cases;
}

// Epoch at which the rule first fires when the losses arrive one per epoch.
inline std::size_t replay_stop_epoch(std::span<const double> losses, std::size_t patience) {
    for (std::size_t e = 1; e <= losses.size(); ++e) {
        if (early_stop_check(losses.first(e), patience)) {
            return e;
        }
    }
    return 0;
}

} // namespace autolr::testing
