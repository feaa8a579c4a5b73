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

#include "obsdesign/simharness.hpp"

#include <doctest.h>

#include <cmath>

using namespace obsdesign;

namespace
{
    ScenarioConfig desk_config()
    {
        ScenarioConfig cfg;
        cfg.n_t = 2;
        cfg.n_r = 16;
        cfg.n_rf = 2;
        cfg.pilots = 12;
        cfg.snr_db = 10.0;
        cfg.spacing_over_lambda = 0.125;
        cfg.trials = 400;
        return cfg;
    }

    const NmseRow &row_of(const NmseReport &rep, const std::string &method, double value)
    {
        for (const NmseRow &r : rep.rows)
            if (r.method == method && r.value == value)
                return r;
        FAIL("missing row " << method);
        return rep.rows.front();
    }
}

TEST_CASE("channel synthesis")
{
    const CMatrix i2 = CMatrix::Identity(2, 2), i3 = CMatrix::Identity(3, 3);
    Rng a(7), b(7);
    CHECK((synthesize_channel(i2, i2, i3, i3, a) - sample_complex_gaussian(3, 2, b)).norm() == 0.0);

    const CMatrix r_tx = laplace_kernel(ArrayGeometry{2, 0.25}, 2.0);
    const CMatrix r_rx = laplace_kernel(ArrayGeometry{8, 0.25}, 2.0);
    const CMatrix i8 = CMatrix::Identity(8, 8);
    const CMatrix full = kron(r_tx, r_rx);
    Rng rng(9);
    CMatrix cov = CMatrix::Zero(16, 16);
    double energy = 0.0;
    const int n = 10000;
    for (int t = 0; t < n; ++t)
    {
        const CVector h = vec(synthesize_channel(r_tx, i2, r_rx, i8, rng));
        cov += h * h.adjoint() / double(n);
        energy += h.squaredNorm() / n;
    }
    CHECK(frobenius_relative_error(cov, full) < 0.1);
    CHECK(std::abs(energy / (r_tx.trace() * r_rx.trace()).real() - 1.0) < 0.03);

    // Coupling enters as C_rx^1/2 ... C_tx^1/2
    const CMatrix c = 2.0 * i2;
    Rng x(3), y(3);
    CHECK((synthesize_channel(i2, c, i3, i3, x) - std::sqrt(2.0) * sample_complex_gaussian(3, 2, y)).norm() < 1e-12);
}

TEST_CASE("pilot transmission")
{
    const ObservationPlan plan = design_random_plan(2, 6, 2, 4, 1.0, 5);
    Rng rng(1);
    const CMatrix h = sample_complex_gaussian(6, 2, rng);
    const PilotBatch clean = transmit(plan, h, 0.0, rng);
    CHECK((clean.y - plan.stacked().adjoint() * vec(h)).norm() < 1e-12);
    CHECK((clean.x - plan.stacked()).norm() == 0.0);

    const PilotBatch noisy = transmit(plan, h, 0.3, rng);
    CHECK((noisy.xi - 0.3 * CMatrix::Identity(8, 8)).norm() < 1e-12);

    ObservationPlan raw = plan;
    for (std::size_t q = 0; q < raw.pilots.size(); ++q)
        raw.pilots[q].combiner = sample_complex_gaussian(6, 2, 40 + q);
    const double s2 = 0.5;
    const CVector clean_y = raw.stacked().adjoint() * vec(h);
    CMatrix cov = CMatrix::Zero(8, 8);
    const int n = 10000;
    for (int t = 0; t < n; ++t)
    {
        const PilotBatch b = transmit(raw, h, s2, rng);
        const CVector z = b.y - clean_y;
        cov += z * z.adjoint() / double(n);
    }
    const CMatrix xi = transmit(raw, h, s2, rng).xi;
    CHECK((xi - s2 * raw.noise_shape()).norm() < 1e-12);
    CHECK(frobenius_relative_error(cov, xi) < 0.05);
}

TEST_CASE("SNR to noise")
{
    const CovKernel unit(CMatrix::Identity(1, 1), CMatrix::Identity(1, 1));
    CHECK(snr_to_noise(0.0, 1.0, unit) == doctest::Approx(1.0));
    CHECK(snr_to_noise(10.0, 1.0, unit) == doctest::Approx(0.1));
    const CovKernel big(laplace_kernel(ArrayGeometry{4, 0.125}, 1.0), laplace_kernel(ArrayGeometry{64, 0.125}, 1.0));
    CHECK(snr_to_noise(10.0, 2.0, big) == doctest::Approx(256.0 * 2.0 / 10.0));
}

TEST_CASE("method names")
{
    CHECK(parse_method("dft-mmse") == Method::DftMmse);
    CHECK(parse_method("ts2dif") == Method::TS2DIF);
    CHECK(parse_method("TS-2DIF") == Method::TS2DIF);
    CHECK(method_name(Method::WaterFilling) == "WaterFilling");
    CHECK_THROWS_AS(parse_method("magic"), Error);
}

TEST_CASE("desk-scale method ordering")
{
    ScenarioConfig cfg = desk_config();
    cfg.methods = {Method::TwoDIF, Method::IF, Method::DftMmse, Method::LS};
    const NmseReport rep = run_point(cfg, "snr_db", cfg.snr_db, 1);
    REQUIRE(rep.rows.size() == 4);
    const double two = rep.rows[0].nmse_db, ifb = rep.rows[1].nmse_db, dft = rep.rows[2].nmse_db, ls = rep.rows[3].nmse_db;
    CHECK(two < ifb);
    CHECK(ifb < dft);
    CHECK(dft < ls);
    for (const NmseRow &r : rep.rows)
        CHECK(std::isfinite(r.nmse_db));
}

TEST_CASE("identity kernel reduces 2DIF to DFT-MMSE")
{
    ScenarioConfig cfg = desk_config();
    cfg.family = KernelFamily{KernelTag::Identity, 0.0};
    cfg.truth = TruthModel::Family;
    cfg.pilots = 16;
    cfg.spacing_over_lambda = 0.5;
    cfg.methods = {Method::TwoDIF, Method::DftMmse};
    const NmseReport rep = run_point(cfg, "snr_db", cfg.snr_db, 1);
    CHECK(std::abs(rep.rows[0].nmse_db - rep.rows[1].nmse_db) < 0.3);
}

TEST_CASE("spacing sweep with a Laplace kernel")
{
    ScenarioConfig cfg = desk_config();
    cfg.family = KernelFamily{KernelTag::Laplace, 2.0};
    cfg.truth = TruthModel::Family;
    const std::vector<double> values{0.0625, 0.125, 0.25, 0.5};
    const NmseReport rep = run_sweep(cfg, SweepAxis::Spacing, values, 1);
    REQUIRE(rep.rows.size() == 4);
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        CHECK(rep.rows[i].nmse_db >= rep.rows[i - 1].nmse_db);
    CHECK(rep.rows[0].axis == "spacing_over_lambda");
}

TEST_CASE("reports do not depend on the worker count")
{
    ScenarioConfig cfg = desk_config();
    cfg.trials = 60;
    cfg.methods = {Method::TwoDIF, Method::Random, Method::LS};
    const std::vector<double> snr{0.0, 10.0};
    const std::string one = run_sweep(cfg, SweepAxis::Snr, snr, 1).to_csv();
    CHECK(one == run_sweep(cfg, SweepAxis::Snr, snr, 4).to_csv());
    CHECK(one == run_sweep(cfg, SweepAxis::Snr, snr, 8).to_csv());
    CHECK(one.rfind("scenario,method,axis,value,nmse_db,mi_bits,trials,seed\n", 0) == 0);

    cfg.seed = 2;
    CHECK(one != run_sweep(cfg, SweepAxis::Snr, snr, 1).to_csv());
}

TEST_CASE("Monte-Carlo error matches the posterior trace")
{
    ScenarioConfig cfg = desk_config();
    cfg.trials = 10000;
    cfg.methods = {Method::TwoDIF, Method::DftMmse};
    const NmseReport rep = run_point(cfg, "snr_db", cfg.snr_db, 0);
    for (const NmseRow &r : rep.rows)
    {
        const double expected = r.expected;
        CHECK(std::abs(r.mse / r.energy / expected - 1.0) < 0.03);
    }
}

TEST_CASE("pilot sweep")
{
    ScenarioConfig cfg = desk_config();
    cfg.trials = 200;
    const std::vector<double> q{4, 8, 12};
    const NmseReport rep = run_sweep(cfg, SweepAxis::Pilots, q, 1);
    REQUIRE(rep.rows.size() == 3);
    CHECK(row_of(rep, "2DIF", 4).nmse_db > row_of(rep, "2DIF", 12).nmse_db);
    CHECK(row_of(rep, "2DIF", 8).mi_bits < row_of(rep, "2DIF", 12).mi_bits);
}

TEST_CASE("adaptive frame loop")
{
    ScenarioConfig cfg = desk_config();
    cfg.snr_db = 15.0;
    const AdaptiveResult res = run_adaptive(cfg, 20);
    REQUIRE(res.frames.size() == 20);
    CHECK(res.frames.front().frame == 1);

    // Frame 1 designs with identity kernels
    const ScenarioModel m = build_model([&] { ScenarioConfig c = cfg; c.family.tag = KernelTag::Statistical; return c; }());
    const CovKernel id(CMatrix::Identity(2, 2), CMatrix::Identity(16, 16));
    const ObservationPlan plan = design_2dif(id, cfg.pilots, cfg.n_rf, cfg.power, m.noise);
    const CMatrix xi = m.noise * plan.noise_shape();
    const double first = expected_mse(m.truth, LmmseEstimator(id, plan.stacked(), xi).gain(), plan.stacked(), xi);
    CHECK(res.frames.front().expected_nmse_db == doctest::Approx(10.0 * std::log10(first / m.truth.trace_product())));
    CHECK(run_adaptive(cfg, 20).to_csv() == res.to_csv());
    for (const AdaptiveFrame &f : res.frames)
        CHECK(f.expected_nmse_db >= res.perfect_nmse_db - 1e-9);
    CHECK(res.to_csv().rfind("frame,nmse_db,expected_nmse_db,kernel_error\n", 0) == 0);
}

TEST_CASE("config validation")
{
    ScenarioConfig cfg = desk_config();
    cfg.n_rf = 17;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = desk_config();
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}
