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

#ifndef OBSDESIGN_ESTIMATOR_HPP
#define OBSDESIGN_ESTIMATOR_HPP

#include "obsdesign/kernels.hpp"
#include "obsdesign/plan.hpp"

#include <utility>

namespace obsdesign
{
    // Received pilots with their observation matrix and noise covariance
    struct PilotBatch
    {
        CVector y;  // length M = sum of combiner widths
        CMatrix x;  // N_T N_R x M
        CMatrix xi; // M x M
    };

    // X^H Sigma_h X + Xi, Hermitian-symmetrized
    CMatrix innovation_covariance(const CovKernel &kernel, const CMatrix &x, const CMatrix &xi);

    // Sigma_h X (X^H Sigma_h X + Xi)^-1 y
    CVector posterior_mean(const CovKernel &kernel, const PilotBatch &batch);

    // Sigma_h - Sigma_h X (X^H Sigma_h X + Xi)^-1 X^H Sigma_h (materializes Sigma_h)
    CMatrix posterior_covariance(const CovKernel &kernel, const CMatrix &x, const CMatrix &xi);
    CMatrix posterior_covariance(const CovKernel &kernel, const PilotBatch &batch);

    // Tr of the posterior covariance without materializing Sigma_h
    double posterior_trace(const CovKernel &kernel, const CMatrix &x, const CMatrix &xi);

    // log2 det(I + Xi^-1 X^H Sigma_h X)
    double mutual_information(const CovKernel &kernel, const CMatrix &x, const CMatrix &xi);
    // Plan form: Xi = sigma^2 blkdiag(W_q^H W_q)
    double mutual_information(const CovKernel &kernel, const ObservationPlan &plan, double noise);

    // (MI with raw combiners and block noise, MI with orthonormalized combiners and white noise)
    std::pair<double, double> mi_orthogonality_invariance(const CovKernel &kernel, const ObservationPlan &plan, double noise);

    // Fixed-design LMMSE estimator: the gain K = Sigma_h X G^-1 is factored once and reused per trial
    class LmmseEstimator
    {
    public:
        LmmseEstimator(const CovKernel &kernel, const CMatrix &x, const CMatrix &xi);

        CVector estimate(const CVector &y) const { return gain_ * y; }
        const CMatrix &gain() const { return gain_; }

    private:
        CMatrix gain_;
    };
}

#endif
