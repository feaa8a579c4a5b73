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

#include "obsdesign/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace obsdesign
{
    RVector ArrayGeometry::positions() const
    {
        RVector p(n_antennas);
        for (int i = 0; i < n_antennas; ++i)
            p(i) = (i - 0.5 * (n_antennas - 1)) * spacing_over_lambda;
        return p;
    }

    std::string kernel_tag_name(KernelTag tag)
    {
        switch (tag)
        {
        case KernelTag::Statistical: return "statistical";
        case KernelTag::Laplace: return "laplace";
        case KernelTag::Bessel: return "bessel";
        case KernelTag::Identity: return "identity";
        }
        return "unknown";
    }

    KernelTag parse_kernel_tag(const std::string &name)
    {
        std::string s = name;
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c)
                       { return static_cast<char>(std::tolower(c)); });
        if (s == "statistical") return KernelTag::Statistical;
        if (s == "laplace") return KernelTag::Laplace;
        if (s == "bessel") return KernelTag::Bessel;
        if (s == "identity") return KernelTag::Identity;
        throw Error(ErrorCode::ValidationError, "kernel.family: unknown family '" + name + "'");
    }

    // Clips eigenvalues in [-1e-6 lmax, 0) and rebuilds the factor from the clipped EVD
    static void project_factor(const CMatrix &m, CMatrix &out, HermitianEvd &evd, const char *name)
    {
        evd = herm_eig(m);
        const double lmax = evd.values.size() ? std::max(evd.values(0), 0.0) : 0.0;
        bool clipped = false;
        for (Eigen::Index k = 0; k < evd.values.size(); ++k)
        {
            if (evd.values(k) < 0.0)
            {
                if (evd.values(k) < -1e-6 * lmax)
                    throw Error(ErrorCode::NotPSD, std::string(name) + " has eigenvalue " + std::to_string(evd.values(k)));
                evd.values(k) = 0.0;
                clipped = true;
            }
        }
        if (clipped)
        {
            out = evd.reconstruct();
            out = 0.5 * (out + out.adjoint()).eval();
        }
        else
            out = 0.5 * (m + m.adjoint());
    }

    CovKernel::CovKernel(const CMatrix &sigma_T, const CMatrix &sigma_R)
    {
        project_factor(sigma_T, sigma_T_, evd_T_, "sigma_T");
        project_factor(sigma_R, sigma_R_, evd_R_, "sigma_R");
    }

    double CovKernel::trace_product() const
    {
        return sigma_T_.trace().real() * sigma_R_.trace().real();
    }

    CMatrix CovKernel::apply(const CMatrix &x) const
    {
        const Eigen::Index nr = sigma_R_.rows(), nt = sigma_T_.rows();
        if (x.rows() != nr * nt)
            throw Error(ErrorCode::DimensionMismatch, "CovKernel::apply: operand has " + std::to_string(x.rows()) + " rows");
        CMatrix out(x.rows(), x.cols());
        const CMatrix tt = sigma_T_.transpose();
        for (Eigen::Index c = 0; c < x.cols(); ++c)
        {
            Eigen::Map<const CMatrix> m(x.col(c).data(), nr, nt);
            Eigen::Map<CMatrix> r(out.col(c).data(), nr, nt);
            r.noalias() = sigma_R_ * m * tt;
        }
        return out;
    }

    CMatrix CovKernel::full() const
    {
        return kron(sigma_T_, sigma_R_);
    }

    double dipole_scatter(double /*phi*/, double theta)
    {
        const double c = std::cos(theta);
        return 1.67 / (2.0 * std::numbers::pi) * c * c * c * c;
    }

    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix
    void gauss_legendre(int n, RVector &nodes, RVector &weights)
    {
        if (n < 1)
            throw Error(ErrorCode::InvalidArgument, "gauss_legendre: need at least one node");
        RMatrix jac = RMatrix::Zero(n, n);
        for (int k = 1; k < n; ++k)
        {
            const double b = k / std::sqrt(4.0 * k * k - 1.0);
            jac(k, k - 1) = b;
            jac(k - 1, k) = b;
        }
        Eigen::SelfAdjointEigenSolver<RMatrix> es(jac);
        nodes = es.eigenvalues();
        weights.resize(n);
        for (int k = 0; k < n; ++k)
        {
            const double v0 = es.eigenvectors()(0, k);
            weights(k) = 2.0 * v0 * v0;
        }
    }

    CMatrix spatial_correlation(const ArrayGeometry &geom, const ScatterDensity &f, int quad_points)
    {
        if (quad_points < 16)
            throw Error(ErrorCode::InvalidArgument, "spatial_correlation: at least 16 quadrature points per axis");
        if (!(geom.spacing_over_lambda > 0.0) || geom.n_antennas < 1)
            throw Error(ErrorCode::InvalidArgument, "spatial_correlation: invalid geometry");

        RVector x, w;
        gauss_legendre(quad_points, x, w);
        const double half = std::numbers::pi / 2.0;
        const int q = quad_points;

        // Integrand depends on theta, phi only through f and u = cos(theta) sin(phi)
        std::vector<double> u(q * q), fw(q * q);
        for (int a = 0; a < q; ++a)
        {
            const double phi = half * x(a);
            for (int b = 0; b < q; ++b)
            {
                const double theta = half * x(b);
                u[a * q + b] = std::cos(theta) * std::sin(phi);
                fw[a * q + b] = f(phi, theta) * w(a) * w(b) * half * half;
            }
        }

        const int n = geom.n_antennas;
        const double d = geom.spacing_over_lambda;
        std::vector<cplx> lag(2 * n - 1);
        for (int l = -(n - 1); l <= n - 1; ++l)
        {
            const double k = 2.0 * std::numbers::pi * d * l;
            cplx acc = 0.0;
            for (int i = 0; i < q * q; ++i)
                acc += fw[i] * std::polar(1.0, k * u[i]);
            lag[l + n - 1] = acc;
        }

        CMatrix r(n, n);
        for (int m = 0; m < n; ++m)
            for (int j = 0; j < n; ++j)
                r(m, j) = lag[m - j + n - 1];

        const double defect = (r - r.adjoint()).norm();
        if (defect > 1e-6 * std::max(1.0, r.norm()))
            throw Error(ErrorCode::QuadratureUnstable, "spatial_correlation: Hermiticity defect " + std::to_string(defect));
        for (int m = 0; m < n; ++m)
            r(m, m) = r(m, m).real();

        HermitianEvd evd = herm_eig(r);
        const double lmax = std::max(evd.values(0), 0.0);
        if (evd.values(n - 1) < 0.0)
        {
            // Quadrature noise can leave tiny negative eigenvalues
            for (int k = 0; k < n; ++k)
                if (evd.values(k) < 0.0 && evd.values(k) >= -1e-8 * std::max(lmax, 1.0))
                    evd.values(k) = 0.0;
            r = evd.reconstruct();
            r = 0.5 * (r + r.adjoint()).eval();
        }
        return r;
    }

    CMatrix laplace_kernel(const ArrayGeometry &geom, double eta)
    {
        if (!(eta > 0.0))
            throw Error(ErrorCode::InvalidArgument, "laplace_kernel: eta must be positive");
        const int n = geom.n_antennas;
        const double s = eta * geom.spacing_over_lambda;
        CMatrix r(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
            {
                const double t = s * (i - j);
                r(i, j) = std::exp(-t * t);
            }
        return r;
    }

    CMatrix bessel_kernel(const ArrayGeometry &geom, double eta)
    {
        if (!(eta > 0.0))
            throw Error(ErrorCode::InvalidArgument, "bessel_kernel: eta must be positive");
        const int n = geom.n_antennas;
        const double s = eta * geom.spacing_over_lambda;
        CMatrix r(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r(i, j) = std::cyl_bessel_j(0.0, s * std::abs(i - j));
        return r;
    }

    CovKernel assemble_kernel(const CMatrix &r_tx, const CMatrix &c_tx, const CMatrix &r_rx, const CMatrix &c_rx)
    {
        if (r_tx.rows() != r_tx.cols() || r_rx.rows() != r_rx.cols())
            throw Error(ErrorCode::NonSquare, "assemble_kernel: correlation matrices must be square");
        if (c_tx.rows() != r_tx.rows() || c_tx.cols() != r_tx.cols() || c_rx.rows() != r_rx.rows() || c_rx.cols() != r_rx.cols())
            throw Error(ErrorCode::DimensionMismatch, "assemble_kernel: coupling and correlation sizes differ");

        const CMatrix ct = psd_sqrt(c_tx);
        const CMatrix cr = psd_sqrt(c_rx);
        const CMatrix sigma_T = ct.transpose() * r_tx.conjugate() * ct.conjugate();
        const CMatrix sigma_R = cr * r_rx * cr.adjoint();
        return CovKernel(sigma_T, sigma_R);
    }

    CovKernel statistical_kernels(const std::vector<CMatrix> &samples, bool normalize_trace)
    {
        if (samples.empty())
            throw Error(ErrorCode::EmptySampleSet, "statistical_kernels: no samples");
        const Eigen::Index nr = samples.front().rows(), nt = samples.front().cols();
        CMatrix st = CMatrix::Zero(nt, nt), sr = CMatrix::Zero(nr, nr);
        double energy = 0.0;
        for (const CMatrix &h : samples)
        {
            if (h.rows() != nr || h.cols() != nt)
                throw Error(ErrorCode::DimensionMismatch, "statistical_kernels: samples differ in shape");
            st.noalias() += h.transpose() * h.conjugate();
            sr.noalias() += h * h.adjoint();
            energy += h.squaredNorm();
        }
        const double r = static_cast<double>(samples.size());
        st /= r * nr;
        sr /= r * nt;
        energy /= r;

        if (normalize_trace)
        {
            const double tp = st.trace().real() * sr.trace().real();
            if (tp > 0.0)
                sr *= energy / tp;
        }
        return CovKernel(st, sr);
    }

    static CMatrix identity_or(const CMatrix &c, int n)
    {
        if (c.size() == 0)
            return CMatrix::Identity(n, n);
        return c;
    }

    CovKernel build_kernel(const KernelFamily &family, const ArrayGeometry &tx, const ArrayGeometry &rx,
                           const CMatrix &c_tx, const CMatrix &c_rx)
    {
        const CMatrix ctx = identity_or(c_tx, tx.n_antennas);
        const CMatrix crx = identity_or(c_rx, rx.n_antennas);
        switch (family.tag)
        {
        case KernelTag::Identity:
            return assemble_kernel(CMatrix::Identity(tx.n_antennas, tx.n_antennas), ctx,
                                   CMatrix::Identity(rx.n_antennas, rx.n_antennas), crx);
        case KernelTag::Laplace:
            return assemble_kernel(laplace_kernel(tx, family.eta), ctx, laplace_kernel(rx, family.eta), crx);
        case KernelTag::Bessel:
            return assemble_kernel(clip_to_psd(bessel_kernel(tx, family.eta)), ctx,
                                   clip_to_psd(bessel_kernel(rx, family.eta)), crx);
        case KernelTag::Statistical:
            return assemble_kernel(spatial_correlation(tx), ctx, spatial_correlation(rx), crx);
        }
        throw Error(ErrorCode::InvalidArgument, "build_kernel: unknown family");
    }

    std::vector<double> EtaGrid::points() const
    {
        if (steps < 1 || !(eta_min > 0.0) || !(eta_max >= eta_min))
            throw Error(ErrorCode::InvalidArgument, "eta grid: need 0 < eta_min <= eta_max and steps >= 1");
        std::vector<double> p(steps);
        if (steps == 1)
        {
            p[0] = eta_min;
            return p;
        }
        for (int k = 0; k < steps; ++k)
        {
            const double t = static_cast<double>(k) / (steps - 1);
            p[k] = log_spaced ? eta_min * std::pow(eta_max / eta_min, t) : eta_min + t * (eta_max - eta_min);
        }
        return p;
    }

    double eta_log_likelihood(const CovKernel &kernel, const std::vector<Observation> &obs)
    {
        double total = 0.0;
        for (const Observation &o : obs)
        {
            const CMatrix g = o.x.adjoint() * kernel.apply(o.x) + o.xi;
            const CMatrix gh = 0.5 * (g + g.adjoint());
            Eigen::LLT<CMatrix> llt(gh);
            double ld = 0.0;
            if (llt.info() != Eigen::Success || !hpd_log_det(gh, ld))
                throw Error(ErrorCode::DegenerateGram, "fit_eta: X^H Sigma X + Xi is singular");
            const CVector s = llt.solve(o.y);
            const double quad = o.y.dot(s).real(); // y^H G^-1 y
            total += -quad - ld - static_cast<double>(o.y.size()) * std::log(std::numbers::pi);
        }
        return total;
    }

    EtaFit fit_eta(const KernelFamily &family, const ArrayGeometry &tx, const ArrayGeometry &rx,
                   const std::vector<Observation> &obs, const EtaGrid &grid,
                   const CMatrix &c_tx, const CMatrix &c_rx)
    {
        if (!family.has_eta())
            throw Error(ErrorCode::InvalidArgument, "fit_eta: family has no eta hyperparameter");
        EtaFit fit;
        fit.grid = grid.points();
        fit.curve.reserve(fit.grid.size());
        bool first = true;
        for (double eta : fit.grid)
        {
            KernelFamily fam = family;
            fam.eta = eta;
            const double ll = eta_log_likelihood(build_kernel(fam, tx, rx, c_tx, c_rx), obs);
            fit.curve.push_back(ll);
            if (first || ll > fit.log_likelihood)
            {
                fit.eta = eta;
                fit.log_likelihood = ll;
                first = false;
            }
        }
        return fit;
    }

    CovKernel adaptive_update(const CovKernel &prior, const CMatrix &h_hat, int t_f)
    {
        if (t_f < 1)
            throw Error(ErrorCode::InvalidArgument, "adaptive_update: frame index must be >= 1");
        const Eigen::Index nr = prior.n_r(), nt = prior.n_t();
        if (h_hat.rows() != nr || h_hat.cols() != nt)
            throw Error(ErrorCode::DimensionMismatch, "adaptive_update: estimate shape differs from kernel");
        const double keep = (t_f - 1.0) / t_f;
        const CMatrix st = keep * prior.sigma_T() + (h_hat.transpose() * h_hat.conjugate()) / (double(t_f) * nr);
        const CMatrix sr = keep * prior.sigma_R() + (h_hat * h_hat.adjoint()) / (double(t_f) * nt);
        return CovKernel(st, sr);
    }
}
