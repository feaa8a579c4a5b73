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

#ifndef OBSDESIGN_HYBRID_HPP
#define OBSDESIGN_HYBRID_HPP

#include "obsdesign/icefill.hpp"

#include <vector>

namespace obsdesign
{
    // Residuals ||X^IF - v^* (x) (A D)||_F^2 around each step of one alternating iteration
    struct HybridIteration
    {
        double before = 0.0;
        double after_digital = 0.0;
        double after_analog = 0.0;
        double after_precoder = 0.0;
        double surrogate_before = 0.0; // Tr Re{J^H A} with the previous A
        double surrogate_after = 0.0;  // same J, updated A
    };

    struct HybridPlan
    {
        std::vector<CMatrix> analog;   // N_R x N_RF, every entry of modulus 1/sqrt(N_R)
        std::vector<CMatrix> digital;  // N_RF x N_RF
        std::vector<CVector> precoders;
        std::vector<double> fit_residuals;
        std::vector<std::vector<HybridIteration>> traces;
        ObservationPlan ideal; // stage-1 plan the fit targets

        int size() const { return static_cast<int>(analog.size()); }
        // W_q = A_q D_q with the fitted precoders; combiners are not orthonormal
        ObservationPlan pilots() const;
    };

    struct HybridOptions
    {
        int max_iters = 200;
        double tol = 1e-6;
        bool analog_precoder = false; // v = sqrt(P / N_T) exp(j angle c) instead of the digital update
    };

    // ||X - v^* (x) (A D)||_F^2
    double hybrid_residual(const CMatrix &x_if, const CMatrix &a, const CMatrix &d, const CVector &v);

    // D = sum_n (v(n) / P) (A^H A)^-1 A^H X_n with P = ||v||^2
    CMatrix update_digital(const CMatrix &a, const CVector &v, const CMatrix &x_if);

    // J = sum_n v(n) X_n D^-1
    CMatrix analog_target(const CMatrix &d, const CVector &v, const CMatrix &x_if);

    // A = exp(j angle J) / sqrt(N_R)
    CMatrix update_analog(const CMatrix &d, const CVector &v, const CMatrix &x_if);

    // c(n) = Tr(X_n^H A D), v = sqrt(P) c / ||c||; a zero c yields sqrt(P) e_1 with a warning
    CVector update_precoder(const CMatrix &a, const CMatrix &d, const CMatrix &x_if, double power);

    HybridPlan design_ts2dif(const CovKernel &kernel, int pilots, int n_rf, double power, double noise,
                             const HybridOptions &opts = HybridOptions());

    // Stage 2 alone, for a given ideal plan
    HybridPlan fit_hybrid(const ObservationPlan &ideal, double power, const HybridOptions &opts = HybridOptions());
}

#endif
