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

#ifndef OBSDESIGN_PLAN_IO_HPP
#define OBSDESIGN_PLAN_IO_HPP

#include "obsdesign/hybrid.hpp"
#include "obsdesign/plan.hpp"

#include <string>
#include <vector>

namespace obsdesign
{
    // Plan bundle layout inside a directory:
    //   plan.index            pilot count, kind and 1-based selections
    //   pilot_001_v.cmt ...   precoders (column vectors)
    //   pilot_001_W.cmt ...   combiners
    //   pilot_001_A.cmt, pilot_001_D.cmt and residuals.csv for hybrid plans
    // Every file is written atomically. Returns the paths written.
    std::vector<std::string> save_plan(const std::string &dir, const ObservationPlan &plan);
    std::vector<std::string> save_hybrid_plan(const std::string &dir, const HybridPlan &plan);

    ObservationPlan load_plan(const std::string &dir);

    std::string pilot_file(const std::string &dir, int q, const char *suffix);
}

#endif
