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

#include "obsdesign/plan.hpp"

namespace obsdesign
{
    CMatrix Pilot::observation() const
    {
        return kron(precoder.conjugate(), combiner);
    }

    int ObservationPlan::n_observations() const
    {
        int m = 0;
        for (const Pilot &p : pilots)
            m += static_cast<int>(p.combiner.cols());
        return m;
    }

    CMatrix ObservationPlan::stacked() const
    {
        if (pilots.empty())
            return CMatrix();
        const Eigen::Index rows = pilots.front().precoder.size() * pilots.front().combiner.rows();
        CMatrix x(rows, n_observations());
        Eigen::Index col = 0;
        for (const Pilot &p : pilots)
        {
            const Eigen::Index w = p.combiner.cols();
            if (p.precoder.size() * p.combiner.rows() != rows)
                throw Error(ErrorCode::DimensionMismatch, "ObservationPlan: pilots differ in antenna counts");
            x.middleCols(col, w) = p.observation();
            col += w;
        }
        return x;
    }

    CMatrix ObservationPlan::noise_shape() const
    {
        const int m = n_observations();
        CMatrix xi = CMatrix::Zero(m, m);
        Eigen::Index off = 0;
        for (const Pilot &p : pilots)
        {
            const Eigen::Index w = p.combiner.cols();
            xi.block(off, off, w, w) = p.combiner.adjoint() * p.combiner;
            off += w;
        }
        return xi;
    }
}
