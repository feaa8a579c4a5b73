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

#ifndef OBSDESIGN_ICEFILL_HPP
#define OBSDESIGN_ICEFILL_HPP

#include "obsdesign/kernels.hpp"
#include "obsdesign/plan.hpp"

#include <vector>

namespace obsdesign
{
    // Posterior eigenvalue grid; rows follow transmit eigen-indices, columns receive eigen-indices
    struct IceTable
    {
        RMatrix lambdas;
        double power = 1.0;
        double noise = 1.0;
        Eigen::MatrixXi fill_count;

        int n_t() const { return static_cast<int>(lambdas.rows()); }
        int n_r() const { return static_cast<int>(lambdas.cols()); }

        // Table with arbitrary starting eigenvalues (tests, worked examples)
        static IceTable from_lambdas(const RMatrix &lambdas, double power, double noise);
    };

    IceTable init_ice_table(const CovKernel &kernel, double power, double noise);

    // Best row and its n_rf largest cells by summed log2(1 + P lambda / sigma^2).
    // Ties: lowest column inside a row, lowest row across rows.
    Selection select_eigenpairs(const IceTable &table, int n_rf);

    // MI gain of a selection in bits
    double selection_gain(const IceTable &table, const Selection &sel);

    // lambda <- lambda sigma^2 / (P lambda + sigma^2) on the selected cells
    IceTable update_ice_table(const IceTable &table, const Selection &sel);

    struct IceFillResult
    {
        ObservationPlan plan;
        IceTable final_table;
        std::vector<double> increments; // MI gain per pilot, bits
    };

    IceFillResult run_ice_filling(const CovKernel &kernel, int pilots, int n_rf, double power, double noise);

    // Greedy design on a bare table; returns selections and increments only
    IceFillResult run_ice_filling(const IceTable &table, int pilots, int n_rf);

    ObservationPlan design_2dif(const CovKernel &kernel, int pilots, int n_rf, double power, double noise);

    // sigma^2 / lambda per cell, +inf where lambda == 0
    RMatrix final_ice_profile(const IceTable &table);
}

#endif
