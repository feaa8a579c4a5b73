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

#ifndef OBSDESIGN_CLI_HPP
#define OBSDESIGN_CLI_HPP

#include "obsdesign/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace obsdesign::cli
{
    struct RunManifest
    {
        std::string command;
        std::string config_path; // empty = defaults only
        std::string out_dir = "out";
        std::vector<Override> overrides;
        int threads = 0;
        std::string values; // sweep values
        int frames = 200;
        std::string plan_dir; // export-plan input
    };

    const std::vector<std::string> &commands();

    // Executes the manifest; returns the process exit status
    int dispatch(const RunManifest &manifest, std::ostream &out, std::ostream &err);

    // Parses argv and dispatches
    int run(int argc, char **argv, std::ostream &out, std::ostream &err);
}

#endif
