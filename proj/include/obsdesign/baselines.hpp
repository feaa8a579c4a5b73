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

#ifndef OBSDESIGN_BASELINES_HPP
#define OBSDESIGN_BASELINES_HPP

#include "obsdesign/estimator.hpp"
#include "obsdesign/icefill.hpp"

#include <cstdint>

namespace obsdesign
{
    struct WaterFillingSolution
    {
        double beta = 0.0;
        RVector powers;      // one per used eigen-direction, descending eigenvalue order
        RVector eigenvalues; // the matching lambda_n
        CMatrix obs_matrix;  // U0(:, 1:N) diag(sqrt(p_n))
    };

    // Powers p_n = max(beta - noise / lambda_n, 0) summing to total_power; lambda_n = 0 gets nothing.
    // beta is found by bisection on [min noise/lambda, max noise/lambda + total_power].
    WaterFillingSolution water_fill(const RVector &eigenvalues, double noise, double total_power);

    // Ideal observation matrix from the top n_rf * pilots Kronecker eigenvectors
    WaterFillingSolution design_waterfilling(const CovKernel &kernel, int pilots, int n_rf, double power, double noise);

    // Unitary n-point DFT matrix
    CMatrix dft_matrix(int n);

    // Number of pilots in the DFT plan: n_t * ceil(n_r / n_rf)
    int dft_plan_length(int n_t, int n_r, int n_rf);

    // Precoder cycles sqrt(P)-scaled DFT columns, combiner cycles N_RF-wide blocks of the receive DFT
    ObservationPlan design_dft_plan(int n_t, int n_r, int n_rf, double power);

    // Minimum-norm least squares; throws Underdetermined unless X has full row rank
    CVector estimate_ls(const PilotBatch &batch);

    // Column-wise ice filling: each transmit antenna is its own SIMO system with a single RF chain.
    // The budget of single-column observations is split round-robin across antennas.
    ObservationPlan design_if_plan(const CovKernel &kernel, int budget, double power, double noise);

    // Precoders uniform on the sqrt(P)-sphere, combiners orthonormalized Gaussian matrices
    ObservationPlan design_random_plan(int n_t, int n_r, int n_rf, int pilots, double power, std::uint64_t seed);
}

#endif
