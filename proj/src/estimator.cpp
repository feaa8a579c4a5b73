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

#include "obsdesign/estimator.hpp"

#include <cmath>

namespace obsdesign
{
    CMatrix innovation_covariance(const CovKernel &kernel, const CMatrix &x, const CMatrix &xi)
    {
        if (xi.rows() != x.cols() || xi.cols() != x.cols())
            throw Error(ErrorCode::DimensionMismatch, "noise covariance size differs from observation count");
        const CMatrix g = x.adjoint() * kernel.apply(x) + xi;
        return 0.5 * (g + g.adjoint());
    }

    static Eigen::LDLT<CMatrix> factor_innovation(const CMatrix &g)
    {
        Eigen::LDLT<CMatrix> ldlt(g);
        const auto &d = ldlt.vectorD();
        double dmax = 0.0;
        for (Eigen::Index k = 0; k < d.size(); ++k)
            dmax = std::max(dmax, std::abs(d(k).real()));
        bool ok = ldlt.info() == Eigen::Success && dmax > 0.0;
        for (Eigen::Index k = 0; ok && k < d.size(); ++k)
            if (!(d(k).real() > 1e-14 * dmax))
                ok = false;
        if (!ok)
            throw Error(ErrorCode::SingularInnovation, "X^H Sigma_h X + Xi is singular");
        return ldlt;
    }

    CVector posterior_mean(const CovKernel &kernel, const PilotBatch &batch)
    {
        if (batch.y.size() != batch.x.cols())
            throw Error(ErrorCode::DimensionMismatch, "posterior_mean: y length differs from observation count");
        const CMatrix g = innovation_covariance(kernel, batch.x, batch.xi);
        const CVector s = factor_innovation(g).solve(batch.y);
        return kernel.apply(batch.x * s);
    }

    CMatrix posterior_covariance(const CovKernel &kernel, const CMatrix &x, const CMatrix &xi)
    {
        const CMatrix sigma = kernel.full();
        if (x.cols() == 0)
            return sigma;
        const CMatrix g = innovation_covariance(kernel, x, xi);
        const CMatrix sx = kernel.apply(x);
        const CMatrix post = sigma - sx * factor_innovation(g).solve(sx.adjoint());
        return 0.5 * (post + post.adjoint());
    }

    CMatrix posterior_covariance(const CovKernel &kernel, const PilotBatch &batch)
    {
        return posterior_covariance(kernel, batch.x, batch.xi);
    }

    double posterior_trace(const CovKernel &kernel, const CMatrix &x, const CMatrix &xi)
    {
        const double prior = kernel.trace_product();
        if (x.cols() == 0)
            return prior;
        const CMatrix g = innovation_covariance(kernel, x, xi);
        const CMatrix sx = kernel.apply(x);
        // Tr(SX G^-1 X^H S) = Tr(G^-1 (SX)^H SX)
        const CMatrix gram = sx.adjoint() * sx;
        return prior - factor_innovation(g).solve(gram).trace().real();
    }

    double mutual_information(const CovKernel &kernel, const CMatrix &x, const CMatrix &xi)
    {
        if (x.cols() == 0)
            return 0.0;
        double ld_xi = 0.0, ld_g = 0.0;
        const CMatrix xih = 0.5 * (xi + xi.adjoint());
        if (!hpd_log_det(xih, ld_xi))
            throw Error(ErrorCode::SingularNoise, "noise covariance is not positive definite");
        const CMatrix g = innovation_covariance(kernel, x, xi);
        if (!hpd_log_det(g, ld_g))
            throw Error(ErrorCode::SingularInnovation, "X^H Sigma_h X + Xi is singular");
        // det(I + Xi^-1 A) = det(Xi + A) / det(Xi)
        return (ld_g - ld_xi) / std::log(2.0);
    }

    double mutual_information(const CovKernel &kernel, const ObservationPlan &plan, double noise)
    {
        return mutual_information(kernel, plan.stacked(), noise * plan.noise_shape());
    }

    std::pair<double, double> mi_orthogonality_invariance(const CovKernel &kernel, const ObservationPlan &plan, double noise)
    {
        const double raw = mutual_information(kernel, plan, noise);
        ObservationPlan ortho = plan;
        for (Pilot &p : ortho.pilots)
            p.combiner = orthonormalize(p.combiner);
        const CMatrix x = ortho.stacked();
        const double white = mutual_information(kernel, x, noise * CMatrix::Identity(x.cols(), x.cols()));
        return {raw, white};
    }

    LmmseEstimator::LmmseEstimator(const CovKernel &kernel, const CMatrix &x, const CMatrix &xi)
    {
        const CMatrix g = innovation_covariance(kernel, x, xi);
        const CMatrix sx = kernel.apply(x);
        // K = SX G^-1  =>  K^H = G^-1 (SX)^H
        gain_ = factor_innovation(g).solve(sx.adjoint()).adjoint();
    }
}
