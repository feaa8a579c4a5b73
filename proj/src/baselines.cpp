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

#include "obsdesign/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace obsdesign
{
    WaterFillingSolution water_fill(const RVector &eigenvalues, double noise, double total_power)
    {
        if (!(noise > 0.0) || !(total_power >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "water_fill: noise must be positive and power nonnegative");
        const Eigen::Index n = eigenvalues.size();
        WaterFillingSolution s;
        s.eigenvalues = eigenvalues;
        s.powers = RVector::Zero(n);

        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (Eigen::Index k = 0; k < n; ++k)
            if (eigenvalues(k) > 0.0)
            {
                lo = std::min(lo, noise / eigenvalues(k));
                hi = std::max(hi, noise / eigenvalues(k));
            }
        if (!std::isfinite(lo))
            return s; // no positive eigenvalue, nothing to fill
        hi += total_power;

        auto filled = [&](double beta)
        {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < n; ++k)
                if (eigenvalues(k) > 0.0)
                    acc += std::max(beta - noise / eigenvalues(k), 0.0);
            return acc;
        };

        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it)
        {
            const double mid = 0.5 * (lo + hi);
            if (filled(mid) < total_power)
                lo = mid;
            else
                hi = mid;
        }
        s.beta = 0.5 * (lo + hi);
        for (Eigen::Index k = 0; k < n; ++k)
            if (eigenvalues(k) > 0.0)
                s.powers(k) = std::max(s.beta - noise / eigenvalues(k), 0.0);
        return s;
    }

    WaterFillingSolution design_waterfilling(const CovKernel &kernel, int pilots, int n_rf, double power, double noise)
    {
        const int nt = kernel.n_t(), nr = kernel.n_r();
        const int count = std::min(pilots * n_rf, nt * nr);
        const RVector &a = kernel.evd_T().values;
        const RVector &b = kernel.evd_R().values;

        // Cells sorted by alpha_i beta_j descending, stable in (i, j) row-major order
        std::vector<std::pair<int, int>> cells;
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nr; ++j)
                cells.emplace_back(i, j);
        std::stable_sort(cells.begin(), cells.end(), [&](const auto &p, const auto &q)
                         { return a(p.first) * b(p.second) > a(q.first) * b(q.second); });

        RVector lam(count);
        CMatrix u0(nt * nr, count);
        for (int k = 0; k < count; ++k)
        {
            const auto [i, j] = cells[k];
            lam(k) = std::max(a(i) * b(j), 0.0);
            u0.col(k) = kron(kernel.evd_T().basis.col(i), kernel.evd_R().basis.col(j));
        }
        WaterFillingSolution s = water_fill(lam, noise, power * pilots * n_rf);
        s.obs_matrix = u0 * s.powers.cwiseSqrt().cast<cplx>().asDiagonal();
        return s;
    }

    CMatrix dft_matrix(int n)
    {
        CMatrix f(n, n);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                f(r, c) = scale * std::polar(1.0, -2.0 * std::numbers::pi * ((static_cast<long>(r) * c) % n) / n);
        return f;
    }

    int dft_plan_length(int n_t, int n_r, int n_rf)
    {
        return n_t * ((n_r + n_rf - 1) / n_rf);
    }

    ObservationPlan design_dft_plan(int n_t, int n_r, int n_rf, double power)
    {
        if (n_rf < 1 || n_rf > n_r)
            throw Error(ErrorCode::TooManyChains, "design_dft_plan: need 1 <= n_rf <= n_r");
        const CMatrix ft = dft_matrix(n_t), fr = dft_matrix(n_r);
        const int blocks = (n_r + n_rf - 1) / n_rf;
        ObservationPlan plan;
        for (int q = 0; q < n_t * blocks; ++q)
        {
            const int t = q / blocks, b = q % blocks;
            Pilot p;
            p.precoder = std::sqrt(power) * ft.col(t);
            p.combiner.resize(n_r, n_rf);
            for (int k = 0; k < n_rf; ++k)
                p.combiner.col(k) = fr.col((b * n_rf + k) % n_r);
            plan.pilots.push_back(std::move(p));
        }
        return plan;
    }

    CVector estimate_ls(const PilotBatch &batch)
    {
        const Eigen::Index n = batch.x.rows();
        if (batch.x.cols() < n)
            throw Error(ErrorCode::Underdetermined, "estimate_ls: " + std::to_string(batch.x.cols()) +
                                                        " observations for " + std::to_string(n) + " unknowns");
        // y = X^H h
        Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(batch.x.adjoint());
        if (cod.rank() < n)
            throw Error(ErrorCode::Underdetermined, "estimate_ls: observation matrix is rank deficient");
        return cod.solve(batch.y);
    }

    ObservationPlan design_if_plan(const CovKernel &kernel, int budget, double power, double noise)
    {
        const int nt = kernel.n_t();
        if (budget < 1)
            throw Error(ErrorCode::InvalidArgument, "design_if_plan: budget must be positive");
        ObservationPlan plan;
        for (int n = 0; n < nt; ++n)
        {
            const int share = budget / nt + (n < budget % nt ? 1 : 0);
            if (share == 0)
                continue;
            CMatrix st(1, 1);
            st(0, 0) = kernel.sigma_T()(n, n).real();
            const CovKernel column(st, kernel.sigma_R());
            const IceFillResult r = run_ice_filling(column, share, 1, power, noise);
            for (std::size_t q = 0; q < r.plan.pilots.size(); ++q)
            {
                Pilot p;
                p.precoder = CVector::Zero(nt);
                p.precoder(n) = std::sqrt(power);
                p.combiner = r.plan.pilots[q].combiner;
                plan.pilots.push_back(std::move(p));
                plan.selections.push_back({n, r.plan.selections[q].n_r});
            }
        }
        return plan;
    }

    ObservationPlan design_random_plan(int n_t, int n_r, int n_rf, int pilots, double power, std::uint64_t seed)
    {
        if (n_rf < 1 || n_rf > n_r)
            throw Error(ErrorCode::TooManyChains, "design_random_plan: need 1 <= n_rf <= n_r");
        Rng rng(seed);
        ObservationPlan plan;
        for (int q = 0; q < pilots; ++q)
        {
            Pilot p;
            CVector v = sample_complex_gaussian(n_t, 1, rng).col(0);
            p.precoder = std::sqrt(power) * v / v.norm();
            p.combiner = orthonormalize(sample_complex_gaussian(n_r, n_rf, rng));
            plan.pilots.push_back(std::move(p));
        }
        return plan;
    }
}
