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
#include "obsdesign/estimator.hpp"
#include "obsdesign/icefill.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace obsdesign;

namespace
{
    // Ice levels (sigma^2 / lambda) of a worked 3 x 5 example, sigma^2 = 1, P = 2
    IceTable worked_example()
    {
        RMatrix levels(3, 5);
        levels << 1.1, 1.2, 1.8, 1.9, 2.1,
            2.1, 2.5, 3.0, 3.0, 4.5,
            2.5, 3.2, 3.3, 4.6, 5.0;
        return IceTable::from_lambdas(levels.cwiseInverse(), 2.0, 1.0);
    }

    CovKernel diag_kernel(const RVector &a, const RVector &b)
    {
        return CovKernel(a.cast<cplx>().asDiagonal().toDenseMatrix(), b.cast<cplx>().asDiagonal().toDenseMatrix());
    }

    // Exhaustive best gain over every row and every column subset of size k
    double brute_best(const IceTable &t, int k, Selection &best)
    {
        double best_gain = -1.0;
        const int n = t.n_r();
        for (int i = 0; i < t.n_t(); ++i)
            for (int mask = 0; mask < (1 << n); ++mask)
            {
                if (__builtin_popcount(mask) != k)
                    continue;
                double g = 0.0;
                std::vector<int> cols;
                for (int j = 0; j < n; ++j)
                    if (mask & (1 << j))
                    {
                        g += std::log2(1.0 + t.power * t.lambdas(i, j) / t.noise);
                        cols.push_back(j);
                    }
                if (g > best_gain)
                {
                    best_gain = g;
                    best.n_t = i;
                    best.n_r = cols;
                }
            }
        return best_gain;
    }

    CovKernel correlated_kernel(int nt, int nr, std::uint64_t seed)
    {
        const CMatrix gt = sample_complex_gaussian(nt, nt, seed);
        const CMatrix gr = sample_complex_gaussian(nr, 2, seed + 1);
        return CovKernel(gt * gt.adjoint() + 0.05 * CMatrix::Identity(nt, nt),
                         gr * gr.adjoint() + 0.02 * CMatrix::Identity(nr, nr));
    }
}

TEST_CASE("init_ice_table")
{
    const IceTable flat = init_ice_table(CovKernel(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)), 1.0, 1.0);
    CHECK((flat.lambdas - RMatrix::Ones(2, 3)).norm() == 0.0);
    CHECK(flat.fill_count.sum() == 0);

    RVector a(2), b(2);
    a << 1.0, 2.0;
    b << 1.0, 3.0;
    const IceTable t = init_ice_table(diag_kernel(a, b), 1.0, 1.0);
    RMatrix expect(2, 2);
    expect << 6.0, 2.0, 3.0, 1.0;
    CHECK((t.lambdas - expect).norm() < 1e-12);

    const CovKernel k = correlated_kernel(3, 5, 2);
    const IceTable tk = init_ice_table(k, 1.0, 1.0);
    std::vector<double> cells(tk.lambdas.data(), tk.lambdas.data() + tk.lambdas.size());
    std::sort(cells.begin(), cells.end());
    const HermitianEvd full = herm_eig(k.full());
    std::vector<double> ev(full.values.data(), full.values.data() + full.values.size());
    std::sort(ev.begin(), ev.end());
    for (std::size_t i = 0; i < ev.size(); ++i)
        CHECK(std::abs(cells[i] - ev[i]) < 1e-9 * ev.back());
}

TEST_CASE("selection on the worked example")
{
    IceTable t = worked_example();
    const std::vector<std::vector<double>> expected{{1.1, 1.2, 1.8}, {3.1, 1.9, 2.1}, {2.1, 2.5, 3.0}, {2.5, 3.2, 3.3}};
    const std::vector<int> rows{0, 0, 1, 2};
    for (int q = 0; q < 4; ++q)
    {
        const Selection s = select_eigenpairs(t, 3);
        CHECK(s.n_t == rows[q]);
        const RMatrix lv = final_ice_profile(t);
        std::multiset<double> got, want(expected[q].begin(), expected[q].end());
        for (int j : s.n_r)
            got.insert(std::round(lv(s.n_t, j) * 1e9) / 1e9);
        CHECK(got == want);
        t = update_ice_table(t, s);
    }
}

TEST_CASE("select_eigenpairs matches exhaustive search")
{
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    for (int trial = 0; trial < 100; ++trial)
    {
        RMatrix l(4, 6);
        for (Eigen::Index k = 0; k < l.size(); ++k)
            l.data()[k] = u(rng);
        const IceTable t = IceTable::from_lambdas(l, 1.0 + trial % 3, 0.5);
        for (int k = 1; k <= 3; ++k)
        {
            Selection brute;
            const double g = brute_best(t, k, brute);
            const Selection s = select_eigenpairs(t, k);
            CHECK(selection_gain(t, s) == doctest::Approx(g).epsilon(1e-12));
            CHECK(s.n_t == brute.n_t);
            std::vector<int> sorted = s.n_r;
            std::sort(sorted.begin(), sorted.end());
            CHECK(sorted == brute.n_r);
        }
    }
}

TEST_CASE("selection corner cases")
{
    RMatrix l(3, 4);
    l << 1, 2, 3, 4,
        5, 9, 2, 1,
        0, 0, 0, 0;
    const IceTable t = IceTable::from_lambdas(l, 1.0, 1.0);
    const Selection s = select_eigenpairs(t, 1);
    CHECK(s.n_t == 1);
    CHECK(s.n_r == std::vector<int>{1});

    // Equal rows and columns resolve to the lowest indices
    const IceTable flat = IceTable::from_lambdas(RMatrix::Ones(3, 4), 1.0, 1.0);
    const Selection f = select_eigenpairs(flat, 2);
    CHECK(f.n_t == 0);
    CHECK(f.n_r == std::vector<int>{0, 1});

    try
    {
        select_eigenpairs(flat, 5);
        FAIL("expected TooManyChains");
    }
    catch (const Error &e)
    {
        CHECK(e.code() == ErrorCode::TooManyChains);
    }
}

TEST_CASE("update_ice_table")
{
    IceTable t = worked_example();
    const IceTable u = update_ice_table(t, {0, {0}});
    CHECK(final_ice_profile(u)(0, 0) == doctest::Approx(3.1).epsilon(1e-12));
    CHECK(u.fill_count(0, 0) == 1);
    CHECK(u.fill_count.sum() == 1);
    RMatrix diff = u.lambdas - t.lambdas;
    diff(0, 0) = 0.0;
    CHECK(diff.norm() == 0.0);

    RMatrix z(1, 2);
    z << 0.0, 1.0;
    const IceTable zt = update_ice_table(IceTable::from_lambdas(z, 1.0, 1.0), {0, {0, 1}});
    CHECK(zt.lambdas(0, 0) == 0.0);
    CHECK(zt.lambdas(0, 1) == doctest::Approx(0.5));
    CHECK(std::isinf(final_ice_profile(zt)(0, 0)));

    // Level after F fills is l0 + F P
    IceTable c = IceTable::from_lambdas(RMatrix::Constant(1, 1, 0.8), 0.7, 0.3);
    for (int f = 0; f < 25; ++f)
        c = update_ice_table(c, {0, {0}});
    CHECK(final_ice_profile(c)(0, 0) == doctest::Approx(0.3 / 0.8 + 25 * 0.7).epsilon(1e-12));

    const IceTable fresh = IceTable::from_lambdas(RMatrix::Ones(2, 2), 1.0, 1.0);
    CHECK((final_ice_profile(fresh) - RMatrix::Ones(2, 2)).norm() == 0.0);
}

TEST_CASE("design_2dif plan invariants and first pilot")
{
    const CovKernel k = correlated_kernel(3, 8, 10);
    const double p = 2.0, s2 = 0.4;
    const ObservationPlan plan = design_2dif(k, 6, 2, p, s2);
    REQUIRE(plan.size() == 6);
    for (const Pilot &pl : plan.pilots)
    {
        CHECK(pl.precoder.squaredNorm() == doctest::Approx(p).epsilon(1e-10));
        CHECK((pl.combiner.adjoint() * pl.combiner - CMatrix::Identity(2, 2)).norm() < 1e-10);
        const CMatrix x = pl.observation();
        CHECK((x.adjoint() * x - p * CMatrix::Identity(2, 2)).norm() < 1e-10);
    }
    // First pilot: top transmit eigenvector and the two top receive eigenvectors
    CHECK(plan.selections[0].n_t == 0);
    CHECK(plan.selections[0].n_r == std::vector<int>{0, 1});
    CHECK((plan.pilots[0].precoder - std::sqrt(p) * k.evd_T().basis.col(0).conjugate()).norm() < 1e-12);

    const ObservationPlan again = design_2dif(k, 6, 2, p, s2);
    CHECK((again.stacked() - plan.stacked()).norm() == 0.0);

    CHECK_THROWS_AS(design_2dif(k, 2, 9, p, s2), Error);
}

TEST_CASE("identity kernel follows the lowest-index rule")
{
    const CovKernel id(CMatrix::Identity(2, 2), CMatrix::Identity(4, 4));
    const ObservationPlan plan = design_2dif(id, 5, 2, 1.0, 1.0);
    CHECK(plan.selections[0].n_t == 0);
    CHECK(plan.selections[0].n_r == std::vector<int>{0, 1});
    CHECK(plan.selections[1].n_t == 0);
    CHECK(plan.selections[1].n_r == std::vector<int>{2, 3});
    CHECK(plan.selections[2].n_t == 1);
    CHECK(plan.selections[2].n_r == std::vector<int>{0, 1});
    CHECK(plan.selections[4].n_t == 0);
    CHECK(plan.selections[4].n_r == std::vector<int>{0, 1});
}

TEST_CASE("MI telescopes over pilots and cells")
{
    const CovKernel k = correlated_kernel(3, 8, 20);
    const double p = 1.5, s2 = 0.3;
    const IceFillResult r = run_ice_filling(k, 6, 2, p, s2);
    const double direct = mutual_information(k, r.plan, s2);
    double inc = 0.0;
    for (double d : r.increments)
    {
        CHECK(d >= 0.0);
        inc += d;
    }
    CHECK(std::abs(direct - inc) < 1e-8);

    const IceTable t0 = init_ice_table(k, p, s2);
    double cells = 0.0;
    for (int i = 0; i < t0.n_t(); ++i)
        for (int j = 0; j < t0.n_r(); ++j)
        {
            double lam = t0.lambdas(i, j);
            for (int f = 0; f < r.final_table.fill_count(i, j); ++f)
            {
                cells += std::log2(1.0 + p * lam / s2);
                lam = lam * s2 / (p * lam + s2);
            }
        }
    CHECK(std::abs(direct - cells) < 1e-8);
}

TEST_CASE("posterior keeps the prior eigenvectors")
{
    const CovKernel k = correlated_kernel(3, 8, 30);
    const double p = 1.0, s2 = 0.5;
    const IceFillResult r = run_ice_filling(k, 10, 2, p, s2);
    IceTable t = init_ice_table(k, p, s2);
    for (int q = 1; q <= 10; ++q)
    {
        t = update_ice_table(t, r.plan.selections[q - 1]);
        ObservationPlan head;
        head.pilots.assign(r.plan.pilots.begin(), r.plan.pilots.begin() + q);
        const CMatrix x = head.stacked();
        const CMatrix post = posterior_covariance(k, x, s2 * CMatrix::Identity(x.cols(), x.cols()));
        CMatrix predicted = CMatrix::Zero(24, 24);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 8; ++j)
            {
                const CVector u = kron(k.evd_T().basis.col(i), k.evd_R().basis.col(j));
                predicted += t.lambdas(i, j) * u * u.adjoint();
            }
        CHECK((post - predicted).norm() < 1e-8);
    }
}

TEST_CASE("greedy plan dominates random plans and is bounded by water filling")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        const CovKernel k = correlated_kernel(3, 8, 100 + 7 * seed);
        const double p = 1.0, s2 = 0.2;
        const double mi = mutual_information(k, design_2dif(k, 5, 2, p, s2), s2);
        for (int r = 0; r < 100; ++r)
            CHECK(mutual_information(k, design_random_plan(3, 8, 2, 5, p, seed * 1000 + r), s2) < mi);
        const WaterFillingSolution wf = design_waterfilling(k, 5, 2, p, s2);
        const double upper = mutual_information(k, wf.obs_matrix, s2 * CMatrix::Identity(wf.obs_matrix.cols(), wf.obs_matrix.cols()));
        CHECK(mi <= upper + 1e-9);
    }
}

TEST_CASE("worked example stays under the quantized water level")
{
    IceTable t = worked_example();
    const RMatrix l0 = final_ice_profile(t);
    const IceFillResult r = run_ice_filling(t, 4, 3);
    std::vector<double> lam(t.lambdas.data(), t.lambdas.data() + t.lambdas.size());
    std::sort(lam.rbegin(), lam.rend());
    RVector top(12);
    for (int k = 0; k < 12; ++k)
        top(k) = lam[k];
    const WaterFillingSolution wf = water_fill(top, 1.0, 2.0 * 12);
    CHECK(wf.beta == doctest::Approx(4.31).epsilon(0.01 / 4.31));
    const RMatrix lf = final_ice_profile(r.final_table);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j)
            if (l0(i, j) < wf.beta)
                CHECK(lf(i, j) <= wf.beta + 2.0);
}
