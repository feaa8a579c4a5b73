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

#ifndef OBSDESIGN_NUMKIT_HPP
#define OBSDESIGN_NUMKIT_HPP

#include "obsdesign/error.hpp"

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace obsdesign
{
    using cplx = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RVector = Eigen::VectorXd;
    using RMatrix = Eigen::MatrixXd;

    // All randomness in the library flows through explicitly seeded engines of this type
    using Rng = std::mt19937_64;

    // Eigendecomposition of a Hermitian matrix, eigenvalues sorted in descending order
    struct HermitianEvd
    {
        CMatrix basis;   // unitary, column k belongs to values(k)
        RVector values;  // non-increasing

        CMatrix reconstruct() const;
    };

    // Hermitian eigendecomposition. The input is symmetrized as (m + m^H) / 2 before decomposing.
    // Equal eigenvalues keep the order produced by the solver (stable re-sort).
    // Throws NonSquare, or NotHermitian when ||m - m^H||_F > 1e-6 ||m||_F.
    HermitianEvd herm_eig(const CMatrix &m);

    // Hermitian square root S of a PSD matrix with S*S = m.
    // Negative eigenvalues down to -1e-6 * lambda_max are clipped to zero, anything below throws NotPSD.
    CMatrix psd_sqrt(const CMatrix &m);

    // Projects a Hermitian matrix onto the PSD cone by zeroing negative eigenvalues.
    CMatrix clip_to_psd(const CMatrix &m);

    // Kronecker product, block (i,j) of the result is a(i,j) * b
    CMatrix kron(const CMatrix &a, const CMatrix &b);

    // Orthonormal basis of the column span of w (polar factor U V^H of the thin SVD),
    // so an already orthonormal input is returned unchanged. Throws RankDeficient.
    CMatrix orthonormalize(const CMatrix &w);

    // i.i.d. circularly-symmetric CN(0,1) entries
    CMatrix sample_complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng);
    CMatrix sample_complex_gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

    // Counter-mode seed derivation: independent streams from one master seed
    std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

    // vec() in column-major order and its inverse
    CVector vec(const CMatrix &m);
    CMatrix unvec(const CVector &v, Eigen::Index rows, Eigen::Index cols);

    // log(det(m)) for Hermitian positive definite m; returns false when the Cholesky factorization fails
    bool hpd_log_det(const CMatrix &m, double &log_det);

    double frobenius_relative_error(const CMatrix &estimate, const CMatrix &reference);
}

#endif
