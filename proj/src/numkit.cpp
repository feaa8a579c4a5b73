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

#include "obsdesign/numkit.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <vector>

namespace obsdesign
{
    const char *error_code_name(ErrorCode code)
    {
        switch (code)
        {
        case ErrorCode::NonSquare: return "NonSquare";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::QuadratureUnstable: return "QuadratureUnstable";
        case ErrorCode::EmptySampleSet: return "EmptySampleSet";
        case ErrorCode::DegenerateGram: return "DegenerateGram";
        case ErrorCode::TooManyChains: return "TooManyChains";
        case ErrorCode::SingularGram: return "SingularGram";
        case ErrorCode::SingularDigital: return "SingularDigital";
        case ErrorCode::SingularInnovation: return "SingularInnovation";
        case ErrorCode::SingularNoise: return "SingularNoise";
        case ErrorCode::Underdetermined: return "Underdetermined";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
        }
        return "Unknown";
    }

    CMatrix HermitianEvd::reconstruct() const
    {
        return basis * values.cast<cplx>().asDiagonal() * basis.adjoint();
    }

    HermitianEvd herm_eig(const CMatrix &m)
    {
        if (m.rows() != m.cols())
            throw Error(ErrorCode::NonSquare, "herm_eig: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));

        const double norm = m.norm();
        if ((m - m.adjoint()).norm() > 1e-6 * norm)
            throw Error(ErrorCode::NotHermitian, "herm_eig: asymmetry exceeds tolerance");

        const Eigen::Index n = m.rows();
        HermitianEvd out;
        if (n == 0)
            return out;

        CMatrix sym = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);

        // Solver returns ascending values; re-sort descending with a stable sort
        std::vector<Eigen::Index> order(n);
        std::iota(order.begin(), order.end(), 0);
        const RVector &ev = es.eigenvalues();
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b)
                         { return ev(a) > ev(b); });

        out.basis.resize(n, n);
        out.values.resize(n);
        for (Eigen::Index k = 0; k < n; ++k)
        {
            out.basis.col(k) = es.eigenvectors().col(order[k]);
            out.values(k) = ev(order[k]);
        }
        return out;
    }

    static RVector clipped_values(const HermitianEvd &evd, const char *who)
    {
        RVector v = evd.values;
        if (v.size() == 0)
            return v;
        const double lmax = std::max(v.maxCoeff(), 0.0);
        for (Eigen::Index k = 0; k < v.size(); ++k)
        {
            if (v(k) < 0.0)
            {
                if (v(k) < -1e-6 * lmax || (lmax == 0.0 && v(k) < -1e-300))
                    throw Error(ErrorCode::NotPSD, std::string(who) + ": eigenvalue " + std::to_string(v(k)) + " is negative");
                v(k) = 0.0;
            }
            // Rounding-level values would turn into sqrt(eps)-sized noise in the root
            if (v(k) < v.size() * std::numeric_limits<double>::epsilon() * lmax)
                v(k) = 0.0;
        }
        return v;
    }

    CMatrix psd_sqrt(const CMatrix &m)
    {
        HermitianEvd evd = herm_eig(m);
        RVector v = clipped_values(evd, "psd_sqrt").cwiseSqrt();
        CMatrix s = evd.basis * v.cast<cplx>().asDiagonal() * evd.basis.adjoint();
        return 0.5 * (s + s.adjoint());
    }

    CMatrix clip_to_psd(const CMatrix &m)
    {
        HermitianEvd evd = herm_eig(m);
        RVector v = evd.values.cwiseMax(0.0);
        CMatrix s = evd.basis * v.cast<cplx>().asDiagonal() * evd.basis.adjoint();
        return 0.5 * (s + s.adjoint());
    }

    CMatrix kron(const CMatrix &a, const CMatrix &b)
    {
        CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    }

    CMatrix orthonormalize(const CMatrix &w)
    {
        if (w.rows() < w.cols())
            throw Error(ErrorCode::RankDeficient, "orthonormalize: more columns than rows");
        if (w.cols() == 0)
            return w;

        Eigen::JacobiSVD<CMatrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVector &s = svd.singularValues();
        const double tol = std::max(w.rows(), w.cols()) * std::numeric_limits<double>::epsilon() * s(0);
        if (s(0) == 0.0 || s(s.size() - 1) <= tol)
            throw Error(ErrorCode::RankDeficient, "orthonormalize: numerical rank below column count");
        return svd.matrixU() * svd.matrixV().adjoint();
    }

    CMatrix sample_complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng)
    {
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
        CMatrix out(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
            {
                const double re = nd(rng);
                const double im = nd(rng);
                out(i, j) = cplx(re, im);
            }
        return out;
    }

    CMatrix sample_complex_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
    {
        Rng rng(seed);
        return sample_complex_gaussian(rows, cols, rng);
    }

    static std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
    {
        return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
    }

    CVector vec(const CMatrix &m)
    {
        return Eigen::Map<const CVector>(m.data(), m.size());
    }

    CMatrix unvec(const CVector &v, Eigen::Index rows, Eigen::Index cols)
    {
        if (v.size() != rows * cols)
            throw Error(ErrorCode::DimensionMismatch, "unvec: length does not match shape");
        return Eigen::Map<const CMatrix>(v.data(), rows, cols);
    }

    bool hpd_log_det(const CMatrix &m, double &log_det)
    {
        Eigen::LLT<CMatrix> llt(m);
        if (llt.info() != Eigen::Success)
            return false;
        const auto &l = llt.matrixLLT();
        double acc = 0.0;
        for (Eigen::Index k = 0; k < m.rows(); ++k)
        {
            const double d = l(k, k).real();
            if (!(d > 0.0) || !std::isfinite(d))
                return false;
            acc += std::log(d);
        }
        log_det = 2.0 * acc;
        return true;
    }

    double frobenius_relative_error(const CMatrix &estimate, const CMatrix &reference)
    {
        const double ref = reference.norm();
        const double diff = (estimate - reference).norm();
        return ref > 0.0 ? diff / ref : diff;
    }
}
