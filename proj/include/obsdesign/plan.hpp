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

#ifndef OBSDESIGN_PLAN_HPP
#define OBSDESIGN_PLAN_HPP

#include "obsdesign/numkit.hpp"

#include <vector>

namespace obsdesign
{
    // One pilot: precoder v (N_T) and combiner W (N_R x N_RF). Observation block X_q = v^* (x) W.
    struct Pilot
    {
        CVector precoder;
        CMatrix combiner;

        CMatrix observation() const;
    };

    // Eigen-index selection of one pilot, 0-based (exported 1-based)
    struct Selection
    {
        int n_t = 0;
        std::vector<int> n_r;
    };

    struct ObservationPlan
    {
        std::vector<Pilot> pilots;
        std::vector<Selection> selections; // empty for plans not built from eigen-indices

        int size() const { return static_cast<int>(pilots.size()); }
        int n_t() const { return pilots.empty() ? 0 : static_cast<int>(pilots.front().precoder.size()); }
        int n_r() const { return pilots.empty() ? 0 : static_cast<int>(pilots.front().combiner.rows()); }
        int n_observations() const;

        // Stacked X = [X_1, ..., X_Q], N_T N_R x sum of combiner widths
        CMatrix stacked() const;
        // Xi / sigma^2 = blkdiag(W_q^H W_q)
        CMatrix noise_shape() const;
    };
}

#endif
