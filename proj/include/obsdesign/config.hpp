// SPDX-License-Identifier: Apache-2.0
//
// obsdesign: observation matrix design for dense-array MIMO channel estimation
// Copyright (C) 2026 The obsdesign authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef OBSDESIGN_CONFIG_HPP
#define OBSDESIGN_CONFIG_HPP

#include "obsdesign/simharness.hpp"

#include <string>
#include <utility>
#include <vector>

namespace obsdesign
{
    // SECTION.KEY=VALUE
    struct Override
    {
        std::string section;
        std::string key;
        std::string value;
    };

    Override parse_override(const std::string &text); // throws ValidationError

    // INI-style scenario file:
    //   [array]  n_t n_r n_rf spacing_over_lambda
    //   [pilot]  q p snr_db
    //   [kernel] family eta coupling_tx coupling_rx truth
    //   [run]    method trials seed scenario
    // Missing or empty values keep the defaults. Coupling paths are resolved against base_dir.
    ScenarioConfig parse_config_text(const std::string &text, const std::string &base_dir = ".",
                                     const std::vector<Override> &overrides = {});
    ScenarioConfig parse_config(const std::string &path, const std::vector<Override> &overrides = {});

    // Defaults with overrides only, for runs without a file
    ScenarioConfig default_config(const std::vector<Override> &overrides = {});

    // "a,b,c" or "start:stop:step" (inclusive stop)
    std::vector<double> parse_value_list(const std::string &text);
}

#endif
