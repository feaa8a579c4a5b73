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

#ifndef OBSDESIGN_KERNELS_HPP
#define OBSDESIGN_KERNELS_HPP

#include "obsdesign/numkit.hpp"

#include <functional>
#include <string>
#include <vector>

namespace obsdesign
{
    // Uniform linear array; positions are centered and measured in wavelengths
    struct ArrayGeometry
    {
        int n_antennas = 1;
        double spacing_over_lambda = 0.5;

        RVector positions() const; // [-(N-1)/2, ..., (N-1)/2] * d/lambda
    };

    enum class KernelTag
    {
        Statistical,
        Laplace,
        Bessel,
        Identity
    };

    struct KernelFamily
    {
        KernelTag tag = KernelTag::Statistical;
        double eta = 0.0; // only meaningful for Laplace and Bessel

        bool has_eta() const { return tag == KernelTag::Laplace || tag == KernelTag::Bessel; }
    };

    std::string kernel_tag_name(KernelTag tag);
    KernelTag parse_kernel_tag(const std::string &name); // throws ValidationError

    // Kronecker channel covariance Sigma_h = sigma_T (x) sigma_R with cached eigendecompositions.
    // Factors are projected onto the PSD cone on construction (small negative eigenvalues clipped).
    class CovKernel
    {
    public:
        CovKernel() = default;
        CovKernel(const CMatrix &sigma_T, const CMatrix &sigma_R);

        const CMatrix &sigma_T() const { return sigma_T_; }
        const CMatrix &sigma_R() const { return sigma_R_; }
        const HermitianEvd &evd_T() const { return evd_T_; }
        const HermitianEvd &evd_R() const { return evd_R_; }

        int n_t() const { return static_cast<int>(sigma_T_.rows()); }
        int n_r() const { return static_cast<int>(sigma_R_.rows()); }
        int dim() const { return n_t() * n_r(); }

        // Tr(Sigma_T) * Tr(Sigma_R) = E ||h||^2
        double trace_product() const;

        // Sigma_h * x for every column of x, using (T (x) R) vec(M) = vec(R M T^T)
        CMatrix apply(const CMatrix &x) const;

        // Materialized Sigma_h (dim x dim)
        CMatrix full() const;

    private:
        CMatrix sigma_T_, sigma_R_;
        HermitianEvd evd_T_, evd_R_;
    };

    using ScatterDensity = std::function<double(double phi, double theta)>;

    // (1.67 / 2pi) cos^4(theta)
    double dipole_scatter(double phi, double theta);

    // Gauss-Legendre nodes and weights on [-1, 1]
    void gauss_legendre(int n, RVector &nodes, RVector &weights);

    // Spatial correlation of a ULA laid along the y axis, integrating the scattering density
    // over phi, theta in [-pi/2, pi/2] with tensor Gauss-Legendre quadrature.
    CMatrix spatial_correlation(const ArrayGeometry &geom, const ScatterDensity &f = dipole_scatter, int quad_points = 64);

    CMatrix laplace_kernel(const ArrayGeometry &geom, double eta);
    // Raw J0 matrix, possibly indefinite; build_kernel clips it before use
    CMatrix bessel_kernel(const ArrayGeometry &geom, double eta);

    // sigma_T = (C_tx^1/2)^T R_tx^* (C_tx^1/2)^*,  sigma_R = C_rx^1/2 R_rx (C_rx^1/2)^H
    CovKernel assemble_kernel(const CMatrix &r_tx, const CMatrix &c_tx, const CMatrix &r_rx, const CMatrix &c_rx);

    // Row/column averaged factor estimates from channel samples (N_R x N_T each).
    // With normalize_trace, sigma_R is rescaled so Tr(sigma_T) Tr(sigma_R) equals the mean sample energy.
    CovKernel statistical_kernels(const std::vector<CMatrix> &samples, bool normalize_trace = false);

    // Kernel of an artificial family (Laplace, Bessel) or Identity, with optional coupling
    // (empty coupling matrices mean identity).
    CovKernel build_kernel(const KernelFamily &family, const ArrayGeometry &tx, const ArrayGeometry &rx,
                           const CMatrix &c_tx = CMatrix(), const CMatrix &c_rx = CMatrix());

    // One training observation y = X^H h + z with noise covariance xi
    struct Observation
    {
        CVector y;
        CMatrix x;
        CMatrix xi;
    };

    struct EtaGrid
    {
        double eta_min = 0.05;
        double eta_max = 5.0;
        int steps = 100;
        bool log_spaced = true;

        std::vector<double> points() const;
    };

    struct EtaFit
    {
        double eta = 0.0;
        double log_likelihood = 0.0;
        std::vector<double> grid;
        std::vector<double> curve; // log-likelihood per grid point
    };

    // Gaussian log-likelihood of the observations under Sigma(eta)
    double eta_log_likelihood(const CovKernel &kernel, const std::vector<Observation> &obs);

    // Grid search maximizing the summed log-likelihood; ties keep the smallest eta
    EtaFit fit_eta(const KernelFamily &family, const ArrayGeometry &tx, const ArrayGeometry &rx,
                   const std::vector<Observation> &obs, const EtaGrid &grid = EtaGrid(),
                   const CMatrix &c_tx = CMatrix(), const CMatrix &c_rx = CMatrix());

    // Running-average kernel update for frame t_f >= 1; prior weight (t_f - 1) / t_f
    CovKernel adaptive_update(const CovKernel &prior, const CMatrix &h_hat, int t_f);
}

#endif
