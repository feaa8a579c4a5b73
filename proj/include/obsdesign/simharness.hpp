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

#ifndef OBSDESIGN_SIMHARNESS_HPP
#define OBSDESIGN_SIMHARNESS_HPP

#include "obsdesign/baselines.hpp"
#include "obsdesign/estimator.hpp"
#include "obsdesign/hybrid.hpp"
#include "obsdesign/icefill.hpp"
#include "obsdesign/kernels.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace obsdesign
{
    enum class Method
    {
        TwoDIF,
        TS2DIF,
        WaterFilling,
        DftMmse,
        LS,
        IF,
        Random
    };

    std::string method_name(Method m);
    Method parse_method(const std::string &name); // throws ValidationError

    // Which covariance generates the channels
    enum class TruthModel
    {
        Spatial, // scattering-integral correlation (cos^4 density) with the configured coupling
        Family   // the configured kernel family itself
    };

    struct ScenarioConfig
    {
        std::string scenario = "default";
        int n_t = 4;
        int n_r = 64;
        int n_rf = 4;
        double spacing_over_lambda = 0.125;
        int pilots = 48;
        double snr_db = 10.0;
        double power = 1.0;
        KernelFamily family;
        TruthModel truth = TruthModel::Spatial;
        CMatrix c_tx, c_rx; // empty = identity
        std::vector<Method> methods{Method::TwoDIF};
        int trials = 100;
        std::uint64_t seed = 1;
        int eta_training = 100; // realizations used to fit eta when it is not given

        void validate() const; // throws ValidationError naming the key
        ArrayGeometry tx_geometry() const { return {n_t, spacing_over_lambda}; }
        ArrayGeometry rx_geometry() const { return {n_r, spacing_over_lambda}; }
    };

    // H = left * H_iid * right
    class ChannelSynth
    {
    public:
        // left = C_rx^1/2 R_rx^1/2, right = R_tx^1/2 C_tx^1/2
        static ChannelSynth from_factors(const CMatrix &r_tx, const CMatrix &c_tx, const CMatrix &r_rx, const CMatrix &c_rx);
        // left = sigma_R^1/2, right = (sigma_T^1/2)^T
        static ChannelSynth from_kernel(const CovKernel &kernel);

        CMatrix draw(Rng &rng) const;

    private:
        CMatrix left_, right_;
    };

    CMatrix synthesize_channel(const CMatrix &r_tx, const CMatrix &c_tx, const CMatrix &r_rx, const CMatrix &c_rx, Rng &rng);

    // sigma^2 = P Tr(Sigma_T) Tr(Sigma_R) / 10^(snr/10)
    double snr_to_noise(double snr_db, double power, const CovKernel &kernel);

    // y_q = W_q^H H v_q + W_q^H z_q, z_q ~ CN(0, sigma^2 I_{N_R})
    PilotBatch transmit(const ObservationPlan &plan, const CMatrix &h, double noise, Rng &rng);
    // y = X^H h + z with white noise
    PilotBatch transmit(const CMatrix &x, const CMatrix &h, double noise, Rng &rng);

    // Ground truth and the kernel handed to the estimators for one scenario point
    struct ScenarioModel
    {
        CovKernel truth;
        CovKernel design;
        ChannelSynth synth;
        double noise = 1.0;
        double eta = 0.0; // fitted or configured eta, 0 when unused
    };

    ScenarioModel build_model(const ScenarioConfig &cfg);

    struct NmseRow
    {
        std::string scenario;
        std::string method;
        std::string axis;
        double value = 0.0;
        double nmse_db = 0.0;
        double mi_bits = 0.0;
        int trials = 0;
        std::uint64_t seed = 0;
        double nmse_linear = 0.0;
        double mse = 0.0;      // mean ||h - h_hat||^2
        double energy = 0.0;   // mean ||h||^2
        double expected = 0.0; // Tr(posterior) / Tr(prior) for matched LMMSE methods, else NaN
    };

    struct NmseReport
    {
        std::vector<NmseRow> rows;
        std::string to_csv() const;
    };

    enum class SweepAxis
    {
        Snr,
        Pilots,
        Spacing
    };

    std::string axis_name(SweepAxis axis);

    // One (method, point) row per entry; trials run on `threads` workers (0 = hardware concurrency)
    NmseReport run_sweep(const ScenarioConfig &cfg, SweepAxis axis, const std::vector<double> &values, int threads = 1);

    // Evaluates every configured method at the config's own operating point
    NmseReport run_point(const ScenarioConfig &cfg, const std::string &axis, double value, int threads = 1);

    struct AdaptiveFrame
    {
        int frame = 0;
        double nmse_db = 0.0;          // realized ||h - h_hat||^2 / ||h||^2 of this frame
        double expected_nmse_db = 0.0; // E||h - K y||^2 / E||h||^2 under the true kernel for the current design
        double kernel_error = 0.0;     // ||K_hat - K||_F / ||K||_F on the Kronecker products
    };

    struct AdaptiveResult
    {
        std::vector<AdaptiveFrame> frames;
        double perfect_nmse_db = 0.0; // expected NMSE of 2DIF with the true kernel
        std::string to_csv() const;
    };

    // Frame loop: design 2DIF with the current kernel, estimate, fold the estimate into the kernel.
    // Starts from identity kernels.
    AdaptiveResult run_adaptive(const ScenarioConfig &cfg, int frames);

    // Expected MSE of h_hat = K y when h ~ CN(0, truth) and y = X^H h + z, z ~ CN(0, xi)
    double expected_mse(const CovKernel &truth, const CMatrix &k, const CMatrix &x, const CMatrix &xi);

    double kronecker_relative_error(const CovKernel &estimate, const CovKernel &truth);
}

#endif
