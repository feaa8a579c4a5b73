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

#include "obsdesign/icefill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace obsdesign
{
    IceTable IceTable::from_lambdas(const RMatrix &lambdas, double power, double noise)
    {
        if (!(power > 0.0) || !(noise > 0.0))
            throw Error(ErrorCode::InvalidArgument, "ice table: power and noise must be positive");
        if ((lambdas.array() < 0.0).any())
            throw Error(ErrorCode::InvalidArgument, "ice table: eigenvalues must be nonnegative");
        IceTable t;
        t.lambdas = lambdas;
        t.power = power;
        t.noise = noise;
        t.fill_count = Eigen::MatrixXi::Zero(lambdas.rows(), lambdas.cols());
        return t;
    }

    IceTable init_ice_table(const CovKernel &kernel, double power, double noise)
    {
        // Clipped EVDs are nonnegative; guard against -0.0 from rounding
        const RVector a = kernel.evd_T().values.cwiseMax(0.0);
        const RVector b = kernel.evd_R().values.cwiseMax(0.0);
        return IceTable::from_lambdas(a * b.transpose(), power, noise);
    }

    static double cell_gain(const IceTable &t, double lambda)
    {
        return std::log2(1.0 + t.power * lambda / t.noise);
    }

    Selection select_eigenpairs(const IceTable &table, int n_rf)
    {
        if (n_rf < 1)
            throw Error(ErrorCode::InvalidArgument, "select_eigenpairs: n_rf must be >= 1");
        if (n_rf > table.n_r())
            throw Error(ErrorCode::TooManyChains, "select_eigenpairs: " + std::to_string(n_rf) + " chains exceed " +
                                                      std::to_string(table.n_r()) + " receive antennas");
        Selection best;
        double best_gain = -1.0;
        std::vector<int> cols(table.n_r());
        for (int i = 0; i < table.n_t(); ++i)
        {
            std::iota(cols.begin(), cols.end(), 0);
            std::stable_sort(cols.begin(), cols.end(), [&](int a, int b)
                             { return table.lambdas(i, a) > table.lambdas(i, b); });
            double gain = 0.0;
            for (int k = 0; k < n_rf; ++k)
                gain += cell_gain(table, table.lambdas(i, cols[k]));
            if (gain > best_gain)
            {
                best_gain = gain;
                best.n_t = i;
                best.n_r.assign(cols.begin(), cols.begin() + n_rf);
            }
        }
        return best;
    }

    double selection_gain(const IceTable &table, const Selection &sel)
    {
        double g = 0.0;
        for (int j : sel.n_r)
            g += cell_gain(table, table.lambdas(sel.n_t, j));
        return g;
    }

    IceTable update_ice_table(const IceTable &table, const Selection &sel)
    {
        if (sel.n_t < 0 || sel.n_t >= table.n_t())
            throw Error(ErrorCode::InvalidArgument, "update_ice_table: transmit index out of range");
        IceTable out = table;
        for (int j : sel.n_r)
        {
            if (j < 0 || j >= table.n_r())
                throw Error(ErrorCode::InvalidArgument, "update_ice_table: receive index out of range");
            const double l = out.lambdas(sel.n_t, j);
            out.lambdas(sel.n_t, j) = l * out.noise / (out.power * l + out.noise);
            out.fill_count(sel.n_t, j) += 1;
        }
        return out;
    }

    IceFillResult run_ice_filling(const IceTable &table, int pilots, int n_rf)
    {
        if (pilots < 1)
            throw Error(ErrorCode::InvalidArgument, "ice filling: need at least one pilot");
        IceFillResult r;
        r.final_table = table;
        for (int q = 0; q < pilots; ++q)
        {
            Selection sel = select_eigenpairs(r.final_table, n_rf);
            r.increments.push_back(selection_gain(r.final_table, sel));
            r.final_table = update_ice_table(r.final_table, sel);
            r.plan.selections.push_back(std::move(sel));
        }
        return r;
    }

    IceFillResult run_ice_filling(const CovKernel &kernel, int pilots, int n_rf, double power, double noise)
    {
        IceFillResult r = run_ice_filling(init_ice_table(kernel, power, noise), pilots, n_rf);
        const CMatrix &ut = kernel.evd_T().basis;
        const CMatrix &ur = kernel.evd_R().basis;
        const double amp = std::sqrt(power);
        for (const Selection &sel : r.plan.selections)
        {
            Pilot p;
            p.precoder = amp * ut.col(sel.n_t).conjugate();
            p.combiner.resize(ur.rows(), static_cast<Eigen::Index>(sel.n_r.size()));
            for (std::size_t k = 0; k < sel.n_r.size(); ++k)
                p.combiner.col(k) = ur.col(sel.n_r[k]);
            r.plan.pilots.push_back(std::move(p));
        }
        return r;
    }

    ObservationPlan design_2dif(const CovKernel &kernel, int pilots, int n_rf, double power, double noise)
    {
        return run_ice_filling(kernel, pilots, n_rf, power, noise).plan;
    }

    RMatrix final_ice_profile(const IceTable &table)
    {
        RMatrix levels(table.n_t(), table.n_r());
        for (int i = 0; i < table.n_t(); ++i)
            for (int j = 0; j < table.n_r(); ++j)
            {
                const double l = table.lambdas(i, j);
                levels(i, j) = l > 0.0 ? table.noise / l : std::numeric_limits<double>::infinity();
            }
        return levels;
    }
}
