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

#include "obsdesign/hybrid.hpp"

#include <cmath>
#include <iostream>

namespace obsdesign
{
    // Row block n of the stacked target (N_R rows)
    static auto block(const CMatrix &x_if, Eigen::Index n, Eigen::Index nr)
    {
        return x_if.middleRows(n * nr, nr);
    }

    static void check_target(const CMatrix &x_if, Eigen::Index nr, Eigen::Index nt, const char *who)
    {
        if (x_if.rows() != nr * nt)
            throw Error(ErrorCode::DimensionMismatch, std::string(who) + ": target has " + std::to_string(x_if.rows()) +
                                                          " rows, expected " + std::to_string(nr * nt));
    }

    double hybrid_residual(const CMatrix &x_if, const CMatrix &a, const CMatrix &d, const CVector &v)
    {
        return (x_if - kron(v.conjugate(), a * d)).squaredNorm();
    }

    CMatrix update_digital(const CMatrix &a, const CVector &v, const CMatrix &x_if)
    {
        const Eigen::Index nr = a.rows(), nt = v.size();
        check_target(x_if, nr, nt, "update_digital");
        const double p = v.squaredNorm();
        if (!(p > 0.0))
            throw Error(ErrorCode::InvalidArgument, "update_digital: precoder is zero");

        CMatrix rhs = CMatrix::Zero(a.cols(), x_if.cols());
        for (Eigen::Index n = 0; n < nt; ++n)
            rhs.noalias() += (v(n) / p) * (a.adjoint() * block(x_if, n, nr));

        const CMatrix gram = a.adjoint() * a;
        Eigen::JacobiSVD<CMatrix> svd(gram);
        const RVector &s = svd.singularValues();
        if (s(0) == 0.0 || s(s.size() - 1) < 1e-12 * s(0))
            throw Error(ErrorCode::SingularGram, "update_digital: A^H A is singular");
        return gram.ldlt().solve(rhs);
    }

    CMatrix analog_target(const CMatrix &d, const CVector &v, const CMatrix &x_if)
    {
        const Eigen::Index nt = v.size();
        if (x_if.rows() % std::max<Eigen::Index>(nt, 1) != 0)
            throw Error(ErrorCode::DimensionMismatch, "analog_target: target rows not a multiple of N_T");
        const Eigen::Index nr = x_if.rows() / nt;

        Eigen::JacobiSVD<CMatrix> svd(d);
        const RVector &s = svd.singularValues();
        if (s.size() == 0 || s(0) == 0.0 || s(0) > 1e12 * s(s.size() - 1))
            throw Error(ErrorCode::SingularDigital, "update_analog: D is singular or ill-conditioned");

        CMatrix xsum = CMatrix::Zero(nr, x_if.cols());
        for (Eigen::Index n = 0; n < nt; ++n)
            xsum.noalias() += v(n) * block(x_if, n, nr);
        // J = xsum D^-1  <=>  D^T J^T = xsum^T
        return d.transpose().partialPivLu().solve(xsum.transpose()).transpose();
    }

    static CMatrix phase_only(const CMatrix &j)
    {
        const double amp = 1.0 / std::sqrt(static_cast<double>(j.rows()));
        CMatrix a(j.rows(), j.cols());
        for (Eigen::Index c = 0; c < j.cols(); ++c)
            for (Eigen::Index r = 0; r < j.rows(); ++r)
                a(r, c) = std::polar(amp, std::arg(j(r, c)));
        return a;
    }

    CMatrix update_analog(const CMatrix &d, const CVector &v, const CMatrix &x_if)
    {
        return phase_only(analog_target(d, v, x_if));
    }

    static CVector correlation(const CMatrix &a, const CMatrix &d, const CMatrix &x_if)
    {
        const Eigen::Index nr = a.rows();
        if (x_if.rows() % nr != 0)
            throw Error(ErrorCode::DimensionMismatch, "update_precoder: target rows not a multiple of N_R");
        const Eigen::Index nt = x_if.rows() / nr;
        const CMatrix w = a * d;
        CVector c(nt);
        for (Eigen::Index n = 0; n < nt; ++n)
            c(n) = (block(x_if, n, nr).adjoint() * w).trace();
        return c;
    }

    static CVector fallback_precoder(Eigen::Index nt, double power)
    {
        std::clog << "warning: ZeroCorrelation in precoder update, using sqrt(P) e_1\n";
        CVector v = CVector::Zero(nt);
        v(0) = std::sqrt(power);
        return v;
    }

    CVector update_precoder(const CMatrix &a, const CMatrix &d, const CMatrix &x_if, double power)
    {
        const CVector c = correlation(a, d, x_if);
        const double nc = c.norm();
        if (!(nc > 0.0))
            return fallback_precoder(c.size(), power);
        return std::sqrt(power) * c / nc;
    }

    static CVector update_precoder_analog(const CMatrix &a, const CMatrix &d, const CMatrix &x_if, double power)
    {
        const CVector c = correlation(a, d, x_if);
        if (!(c.norm() > 0.0))
            return fallback_precoder(c.size(), power);
        const double amp = std::sqrt(power / static_cast<double>(c.size()));
        CVector v(c.size());
        for (Eigen::Index n = 0; n < c.size(); ++n)
            v(n) = std::polar(amp, std::arg(c(n)));
        return v;
    }

    static double surrogate(const CMatrix &j, const CMatrix &a)
    {
        return (j.adjoint() * a).trace().real();
    }

    ObservationPlan HybridPlan::pilots() const
    {
        ObservationPlan plan;
        for (int q = 0; q < size(); ++q)
            plan.pilots.push_back({precoders[q], analog[q] * digital[q]});
        return plan;
    }

    HybridPlan fit_hybrid(const ObservationPlan &ideal, double power, const HybridOptions &opts)
    {
        if (opts.max_iters < 1)
            throw Error(ErrorCode::InvalidArgument, "TS-2DIF: max_iters must be >= 1");
        if (!(opts.tol > 0.0))
            throw Error(ErrorCode::InvalidArgument, "TS-2DIF: tol must be positive");

        HybridPlan out;
        out.ideal = ideal;
        for (const Pilot &p : ideal.pilots)
        {
            const CMatrix x_if = p.observation();
            CMatrix a = phase_only(p.combiner);
            CVector v = p.precoder;
            CMatrix d;
            std::vector<HybridIteration> trace;
            double prev = x_if.squaredNorm();
            for (int it = 0; it < opts.max_iters; ++it)
            {
                HybridIteration rec;
                rec.before = it == 0 ? std::numeric_limits<double>::quiet_NaN() : prev;

                d = update_digital(a, v, x_if);
                rec.after_digital = hybrid_residual(x_if, a, d, v);

                const CMatrix j = analog_target(d, v, x_if);
                rec.surrogate_before = surrogate(j, a);
                a = phase_only(j);
                rec.surrogate_after = surrogate(j, a);
                rec.after_analog = hybrid_residual(x_if, a, d, v);

                v = opts.analog_precoder ? update_precoder_analog(a, d, x_if, power) : update_precoder(a, d, x_if, power);
                rec.after_precoder = hybrid_residual(x_if, a, d, v);
                trace.push_back(rec);

                const double cur = rec.after_precoder;
                const bool done = it > 0 && std::abs(prev - cur) < opts.tol * std::max(cur, 1e-300);
                prev = cur;
                if (done || cur == 0.0)
                    break;
            }
            out.analog.push_back(a);
            out.digital.push_back(d);
            out.precoders.push_back(v);
            out.fit_residuals.push_back(prev);
            out.traces.push_back(std::move(trace));
        }
        return out;
    }

    HybridPlan design_ts2dif(const CovKernel &kernel, int pilots, int n_rf, double power, double noise, const HybridOptions &opts)
    {
        return fit_hybrid(design_2dif(kernel, pilots, n_rf, power, noise), power, opts);
    }
}
