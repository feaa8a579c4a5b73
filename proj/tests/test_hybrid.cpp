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
#include "obsdesign/hybrid.hpp"
#include "obsdesign/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace obsdesign;

namespace
{
    CMatrix constant_modulus(int nr, int nrf, Rng &rng)
    {
        std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
        CMatrix a(nr, nrf);
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a.data()[i] = std::polar(1.0 / std::sqrt(double(nr)), u(rng));
        return a;
    }

    CVector power_vector(int n, double p, Rng &rng)
    {
        const CVector g = sample_complex_gaussian(n, 1, rng).col(0);
        return std::sqrt(p) * g / g.norm();
    }

    double surrogate(const CMatrix &j, const CMatrix &a) { return (j.adjoint() * a).trace().real(); }

    CovKernel spatial_kernel(int nt, int nr, double spacing)
    {
        const KernelFamily fam{KernelTag::Statistical, 0.0};
        return build_kernel(fam, ArrayGeometry{nt, spacing}, ArrayGeometry{nr, spacing});
    }
}

TEST_CASE("digital update")
{
    Rng rng(1);
    const int nt = 3, nr = 6, nrf = 2;
    const double p = 2.0;
    const CMatrix a = orthonormalize(sample_complex_gaussian(nr, nrf, rng));
    const CMatrix d0 = sample_complex_gaussian(nrf, nrf, rng);
    const CVector v = power_vector(nt, p, rng);
    const CMatrix x = kron(v.conjugate(), a * d0);
    CHECK((update_digital(a, v, x) - d0).norm() < 1e-10);
    CHECK(update_digital(a, v, CMatrix::Zero(nt * nr, nrf)).norm() == 0.0);

    const CMatrix target = sample_complex_gaussian(nt * nr, nrf, rng);
    const CMatrix ac = constant_modulus(nr, nrf, rng);
    const CMatrix d = update_digital(ac, v, target);
    const double best = hybrid_residual(target, ac, d, v);
    for (int t = 0; t < 100; ++t)
        CHECK(best <= hybrid_residual(target, ac, d + 0.01 * sample_complex_gaussian(nrf, nrf, rng), v) + 1e-12);

    CMatrix dup(nr, nrf);
    dup << ac.col(0), ac.col(0);
    try
    {
        update_digital(dup, v, target);
        FAIL("expected SingularGram");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::SingularGram);
    }
}

TEST_CASE("analog update")
{
    Rng rng(2);
    const int nt = 2, nr = 8, nrf = 3;
    CVector e1 = CVector::Zero(nt);
    e1(0) = 1.0;
    CMatrix x = CMatrix::Zero(nt * nr, nrf);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nrf; ++j)
            x(i, j) = 0.5 + i + 2.0 * j;
    const CMatrix ones = CMatrix::Constant(nr, nrf, cplx(1.0 / std::sqrt(double(nr)), 0.0));
    CHECK((update_analog(CMatrix::Identity(nrf, nrf), e1, x) - ones).norm() < 1e-12);

    for (int t = 0; t < 5; ++t)
    {
        const CMatrix target = sample_complex_gaussian(nt * nr, nrf, rng);
        const CMatrix d = sample_complex_gaussian(nrf, nrf, rng);
        const CVector v = power_vector(nt, 1.5, rng);
        const CMatrix j = analog_target(d, v, target);
        const CMatrix a = update_analog(d, v, target);
        CHECK((a.cwiseAbs().array() - 1.0 / std::sqrt(double(nr))).abs().maxCoeff() < 1e-10);
        const double s = surrogate(j, a);
        CHECK(s == doctest::Approx(j.cwiseAbs().sum() / std::sqrt(double(nr))).epsilon(1e-12));
        for (int r = 0; r < 100; ++r)
            CHECK(surrogate(j, constant_modulus(nr, nrf, rng)) <= s + 1e-12);
    }

    CMatrix singular = CMatrix::Identity(nrf, nrf);
    singular(2, 2) = 0.0;
    try
    {
        update_analog(singular, e1, x);
        FAIL("expected SingularDigital");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::SingularDigital);
    }
}

TEST_CASE("precoder update")
{
    Rng rng(3);
    const int nt = 4, nr = 5, nrf = 2;
    const double p = 3.0;
    const CMatrix a = constant_modulus(nr, nrf, rng);
    const CMatrix d = sample_complex_gaussian(nrf, nrf, rng);

    // c = Tr(X_n^H A D) is e_1 when only block 0 is nonzero and equals AD / ||AD||^2
    const CMatrix ad = a * d;
    CMatrix x = CMatrix::Zero(nt * nr, nrf);
    x.topRows(nr) = ad / ad.squaredNorm();
    const CVector v1 = update_precoder(a, d, x, p);
    CHECK(std::abs(v1(0) - std::sqrt(p)) < 1e-12);
    CHECK(v1.tail(nt - 1).norm() < 1e-12);

    const CMatrix target = sample_complex_gaussian(nt * nr, nrf, rng);
    const CVector v = update_precoder(a, d, target, p);
    CHECK(v.squaredNorm() == doctest::Approx(p).epsilon(1e-12));
    const double best = hybrid_residual(target, a, d, v);
    for (int r = 0; r < 100; ++r)
        CHECK(best <= hybrid_residual(target, a, d, power_vector(nt, p, rng)) + 1e-12);

    const CVector v0 = power_vector(nt, 0.7, rng);
    const CVector got = update_precoder(a, d, kron(v0.conjugate(), ad), p);
    const cplx inner = (got.adjoint() * v0)(0);
    CHECK(std::abs(std::abs(inner) - got.norm() * v0.norm()) < 1e-9);
    CHECK(std::abs(got(0) / v0(0) - cplx(std::sqrt(p / 0.7), 0.0)) < 1e-9);

    const CVector fallback = update_precoder(a, d, CMatrix::Zero(nt * nr, nrf), p);
    CHECK(std::abs(fallback(0) - std::sqrt(p)) < 1e-12);
    CHECK(fallback.tail(nt - 1).norm() == 0.0);
}

TEST_CASE("square analog combiner fits the ideal plan")
{
    const CovKernel k = spatial_kernel(3, 2, 0.25);
    const HybridPlan hp = design_ts2dif(k, 4, 2, 1.0, 0.1);
    REQUIRE(hp.size() == 4);
    for (int q = 0; q < hp.size(); ++q)
    {
        const CMatrix target = hp.ideal.pilots[q].observation();
        CHECK(hp.fit_residuals[q] < 1e-6 * target.squaredNorm());
    }
}

TEST_CASE("loop contract and invariants")
{
    const CovKernel k = spatial_kernel(2, 16, 0.125);
    HybridOptions one;
    one.max_iters = 1;
    const HybridPlan short_fit = design_ts2dif(k, 5, 2, 1.0, 0.1, one);
    for (const auto &trace : short_fit.traces)
    {
        REQUIRE(trace.size() == 1);
        CHECK(std::isnan(trace[0].before));
    }

    const double p = 1.5;
    const HybridPlan hp = design_ts2dif(k, 8, 2, p, 0.1);
    REQUIRE(hp.size() == 8);
    for (int q = 0; q < hp.size(); ++q)
    {
        const double amp = 1.0 / std::sqrt(16.0);
        CHECK((hp.analog[q].cwiseAbs().array() - amp).abs().maxCoeff() < 1e-10);
        CHECK(hp.precoders[q].squaredNorm() == doctest::Approx(p).epsilon(1e-10));
        CHECK(hp.digital[q].fullPivLu().rank() == 2);
        const CMatrix target = hp.ideal.pilots[q].observation();
        CHECK(hp.fit_residuals[q] ==
              doctest::Approx(hybrid_residual(target, hp.analog[q], hp.digital[q], hp.precoders[q])).epsilon(1e-9));
        const auto &trace = hp.traces[q];
        REQUIRE(!trace.empty());
        CHECK(trace.size() <= 200);
        const double scale = 1e-12 * (1.0 + target.squaredNorm());
        for (std::size_t i = 0; i < trace.size(); ++i)
        {
            if (i > 0)
            {
                CHECK(trace[i].after_digital <= trace[i].before + scale);
                CHECK(trace[i].before == doctest::Approx(trace[i - 1].after_precoder));
            }
            CHECK(trace[i].after_precoder <= trace[i].after_analog + scale);
            CHECK(trace[i].surrogate_after >= trace[i].surrogate_before - scale);
        }
    }

    // Combiners are not orthonormal, so the estimator gets the general noise shape
    const ObservationPlan pilots = hp.pilots();
    CHECK((pilots.noise_shape() - CMatrix::Identity(16, 16)).norm() > 1e-6);
}

TEST_CASE("hybrid plan estimates nearly as well as the ideal plan")
{
    const CovKernel k = spatial_kernel(2, 16, 0.125);
    const double p = 1.0, s2 = p * k.trace_product() / 10.0;
    const HybridPlan hp = design_ts2dif(k, 8, 2, p, s2);
    const ObservationPlan hyb = hp.pilots();
    const CMatrix xi = s2 * hp.ideal.noise_shape(), xh = s2 * hyb.noise_shape();
    const LmmseEstimator ideal_est(k, hp.ideal.stacked(), xi), hyb_est(k, hyb.stacked(), xh);
    const CMatrix rx = psd_sqrt(k.sigma_R()), tx = psd_sqrt(k.sigma_T()).transpose();
    const CMatrix li = psd_sqrt(xi), lh = psd_sqrt(xh);
    Rng rng(11);
    double num_i = 0.0, num_h = 0.0, den = 0.0;
    for (int t = 0; t < 500; ++t)
    {
        const CVector h = vec(rx * sample_complex_gaussian(16, 2, rng) * tx);
        const CVector n = sample_complex_gaussian(16, 1, rng).col(0);
        num_i += (ideal_est.estimate(hp.ideal.stacked().adjoint() * h + li * n) - h).squaredNorm();
        num_h += (hyb_est.estimate(hyb.stacked().adjoint() * h + lh * n) - h).squaredNorm();
        den += h.squaredNorm();
    }
    const double gap = 10.0 * std::log10(num_h / den) - 10.0 * std::log10(num_i / den);
    CHECK(std::abs(gap) < 1.0);
}
