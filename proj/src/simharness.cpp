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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>
#include <thread>

namespace obsdesign
{
    std::string method_name(Method m)
    {
        switch (m)
        {
        case Method::TwoDIF: return "2DIF";
        case Method::TS2DIF: return "TS2DIF";
        case Method::WaterFilling: return "WaterFilling";
        case Method::DftMmse: return "DFT-MMSE";
        case Method::LS: return "LS";
        case Method::IF: return "IF";
        case Method::Random: return "Random";
        }
        return "unknown";
    }

    Method parse_method(const std::string &name)
    {
        std::string s;
        for (char c : name)
            if (c != '-' && c != '_' && c != ' ')
                s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (s == "2dif") return Method::TwoDIF;
        if (s == "ts2dif") return Method::TS2DIF;
        if (s == "waterfilling" || s == "wf") return Method::WaterFilling;
        if (s == "dftmmse" || s == "mmse") return Method::DftMmse;
        if (s == "ls") return Method::LS;
        if (s == "if") return Method::IF;
        if (s == "random") return Method::Random;
        throw Error(ErrorCode::ValidationError, "run.method: unknown method '" + name + "'");
    }

    std::string axis_name(SweepAxis axis)
    {
        switch (axis)
        {
        case SweepAxis::Snr: return "snr_db";
        case SweepAxis::Pilots: return "q";
        case SweepAxis::Spacing: return "spacing_over_lambda";
        }
        return "unknown";
    }

    static Error invalid(const std::string &key, const std::string &why)
    {
        return Error(ErrorCode::ValidationError, key + ": " + why);
    }

    void ScenarioConfig::validate() const
    {
        if (n_t < 1) throw invalid("array.n_t", "must be >= 1");
        if (n_r < 1) throw invalid("array.n_r", "must be >= 1");
        if (n_rf < 1) throw invalid("array.n_rf", "must be >= 1");
        if (n_rf > n_r) throw invalid("array.n_rf", "RF chains (" + std::to_string(n_rf) + ") exceed receive antennas (" + std::to_string(n_r) + ")");
        if (!(spacing_over_lambda > 0.0) || !std::isfinite(spacing_over_lambda)) throw invalid("array.spacing_over_lambda", "must be positive");
        if (pilots < 1) throw invalid("pilot.q", "must be >= 1");
        if (!(power > 0.0) || !std::isfinite(power)) throw invalid("pilot.p", "must be positive");
        if (!std::isfinite(snr_db)) throw invalid("pilot.snr_db", "must be finite");
        if (family.eta < 0.0 || !std::isfinite(family.eta)) throw invalid("kernel.eta", "must be nonnegative");
        if (truth == TruthModel::Family && family.has_eta() && !(family.eta > 0.0))
            throw invalid("kernel.eta", "required when the channel truth is the kernel family");
        if (c_tx.size() && (c_tx.rows() != n_t || c_tx.cols() != n_t)) throw invalid("kernel.coupling_tx", "must be n_t x n_t");
        if (c_rx.size() && (c_rx.rows() != n_r || c_rx.cols() != n_r)) throw invalid("kernel.coupling_rx", "must be n_r x n_r");
        if (methods.empty()) throw invalid("run.method", "no method given");
        if (trials < 1) throw invalid("run.trials", "must be >= 1");
    }

    ChannelSynth ChannelSynth::from_factors(const CMatrix &r_tx, const CMatrix &c_tx, const CMatrix &r_rx, const CMatrix &c_rx)
    {
        ChannelSynth s;
        s.left_ = psd_sqrt(c_rx) * psd_sqrt(r_rx);
        s.right_ = psd_sqrt(r_tx) * psd_sqrt(c_tx);
        return s;
    }

    ChannelSynth ChannelSynth::from_kernel(const CovKernel &kernel)
    {
        ChannelSynth s;
        s.left_ = psd_sqrt(kernel.sigma_R());
        s.right_ = psd_sqrt(kernel.sigma_T()).transpose();
        return s;
    }

    CMatrix ChannelSynth::draw(Rng &rng) const
    {
        return left_ * sample_complex_gaussian(left_.cols(), right_.rows(), rng) * right_;
    }

    CMatrix synthesize_channel(const CMatrix &r_tx, const CMatrix &c_tx, const CMatrix &r_rx, const CMatrix &c_rx, Rng &rng)
    {
        return ChannelSynth::from_factors(r_tx, c_tx, r_rx, c_rx).draw(rng);
    }

    double snr_to_noise(double snr_db, double power, const CovKernel &kernel)
    {
        return power * kernel.trace_product() / std::pow(10.0, snr_db / 10.0);
    }

    PilotBatch transmit(const ObservationPlan &plan, const CMatrix &h, double noise, Rng &rng)
    {
        PilotBatch b;
        b.x = plan.stacked();
        b.xi = noise * plan.noise_shape();
        b.y.resize(b.x.cols());
        const double sd = std::sqrt(noise);
        Eigen::Index off = 0;
        for (const Pilot &p : plan.pilots)
        {
            if (p.precoder.size() != h.cols() || p.combiner.rows() != h.rows())
                throw Error(ErrorCode::DimensionMismatch, "transmit: plan does not match channel shape");
            CVector r = h * p.precoder;
            if (noise > 0.0)
                r += sd * sample_complex_gaussian(h.rows(), 1, rng).col(0);
            b.y.segment(off, p.combiner.cols()) = p.combiner.adjoint() * r;
            off += p.combiner.cols();
        }
        return b;
    }

    PilotBatch transmit(const CMatrix &x, const CMatrix &h, double noise, Rng &rng)
    {
        if (x.rows() != h.size())
            throw Error(ErrorCode::DimensionMismatch, "transmit: observation matrix does not match channel size");
        PilotBatch b;
        b.x = x;
        b.xi = noise * CMatrix::Identity(x.cols(), x.cols());
        b.y = x.adjoint() * vec(h);
        if (noise > 0.0)
            b.y += std::sqrt(noise) * sample_complex_gaussian(x.cols(), 1, rng).col(0);
        return b;
    }

    static CovKernel truth_kernel(const ScenarioConfig &cfg, ChannelSynth &synth)
    {
        const ArrayGeometry tx = cfg.tx_geometry(), rx = cfg.rx_geometry();
        const CMatrix ctx = cfg.c_tx.size() ? cfg.c_tx : CMatrix::Identity(cfg.n_t, cfg.n_t);
        const CMatrix crx = cfg.c_rx.size() ? cfg.c_rx : CMatrix::Identity(cfg.n_r, cfg.n_r);
        if (cfg.truth == TruthModel::Spatial || cfg.family.tag == KernelTag::Statistical)
        {
            const CMatrix rt = spatial_correlation(tx), rr = spatial_correlation(rx);
            synth = ChannelSynth::from_factors(rt, ctx, rr, crx);
            return assemble_kernel(rt, ctx, rr, crx);
        }
        CovKernel k = build_kernel(cfg.family, tx, rx, ctx, crx);
        synth = ChannelSynth::from_kernel(k);
        return k;
    }

    // Fits eta on training pilots observed through random plans
    static double train_eta(const ScenarioConfig &cfg, const ScenarioModel &m)
    {
        std::vector<Observation> obs;
        for (int r = 0; r < cfg.eta_training; ++r)
        {
            Rng rng(derive_seed(cfg.seed, 4, static_cast<std::uint64_t>(r)));
            const ObservationPlan plan = design_random_plan(cfg.n_t, cfg.n_r, cfg.n_rf, cfg.pilots, cfg.power, rng());
            const CMatrix h = m.synth.draw(rng);
            const PilotBatch b = transmit(plan, h, m.noise, rng);
            obs.push_back({b.y, b.x, b.xi});
        }
        return fit_eta(cfg.family, cfg.tx_geometry(), cfg.rx_geometry(), obs, EtaGrid(), cfg.c_tx, cfg.c_rx).eta;
    }

    ScenarioModel build_model(const ScenarioConfig &cfg)
    {
        cfg.validate();
        ScenarioModel m;
        m.truth = truth_kernel(cfg, m.synth);
        m.noise = snr_to_noise(cfg.snr_db, cfg.power, m.truth);
        switch (cfg.family.tag)
        {
        case KernelTag::Statistical:
            m.design = m.truth;
            break;
        case KernelTag::Identity:
            m.design = CovKernel(CMatrix::Identity(cfg.n_t, cfg.n_t), CMatrix::Identity(cfg.n_r, cfg.n_r));
            break;
        case KernelTag::Laplace:
        case KernelTag::Bessel:
        {
            KernelFamily fam = cfg.family;
            if (!(fam.eta > 0.0))
                fam.eta = train_eta(cfg, m);
            m.eta = fam.eta;
            m.design = build_kernel(fam, cfg.tx_geometry(), cfg.rx_geometry(), cfg.c_tx, cfg.c_rx);
            break;
        }
        }
        return m;
    }

    double expected_mse(const CovKernel &truth, const CMatrix &k, const CMatrix &x, const CMatrix &xi)
    {
        const CMatrix sx = truth.apply(x);
        const CMatrix g = x.adjoint() * sx + xi;
        const double cross = k.cwiseProduct(sx.conjugate()).sum().real(); // Re Tr(K (SX)^H)
        const double quad = (k * g).cwiseProduct(k.conjugate()).sum().real();
        return truth.trace_product() - 2.0 * cross + quad;
    }

    double kronecker_relative_error(const CovKernel &estimate, const CovKernel &truth)
    {
        const CMatrix &a = estimate.sigma_T(), &b = estimate.sigma_R();
        const CMatrix &c = truth.sigma_T(), &d = truth.sigma_R();
        // ||A(x)B - C(x)D||^2 = |A|^2|B|^2 + |C|^2|D|^2 - 2 Re(<A,C><B,D>)
        const cplx ac = a.cwiseProduct(c.conjugate()).sum();
        const cplx bd = b.cwiseProduct(d.conjugate()).sum();
        const double ref = c.squaredNorm() * d.squaredNorm();
        const double diff = a.squaredNorm() * b.squaredNorm() + ref - 2.0 * (ac * bd).real();
        return std::sqrt(std::max(diff, 0.0) / ref);
    }

    namespace
    {
        // A designed method ready for repeated trials
        struct Prepared
        {
            Method method;
            bool use_plan = true;
            ObservationPlan plan;
            CMatrix x, xi;
            CMatrix gain; // h_hat = gain * y
            double mi = 0.0;
            double expected = std::numeric_limits<double>::quiet_NaN();
        };

        Prepared prepare(Method method, const ScenarioConfig &cfg, const ScenarioModel &m, std::uint64_t point)
        {
            Prepared p;
            p.method = method;
            const double sigma2 = m.noise;
            switch (method)
            {
            case Method::TwoDIF:
                p.plan = design_2dif(m.design, cfg.pilots, cfg.n_rf, cfg.power, sigma2);
                break;
            case Method::TS2DIF:
                p.plan = design_ts2dif(m.design, cfg.pilots, cfg.n_rf, cfg.power, sigma2).pilots();
                break;
            case Method::WaterFilling:
                p.use_plan = false;
                p.x = design_waterfilling(m.design, cfg.pilots, cfg.n_rf, cfg.power, sigma2).obs_matrix;
                break;
            case Method::DftMmse:
            case Method::LS:
                p.plan = design_dft_plan(cfg.n_t, cfg.n_r, cfg.n_rf, cfg.power);
                break;
            case Method::IF:
                p.plan = design_if_plan(m.design, cfg.pilots * cfg.n_rf, cfg.power, sigma2);
                break;
            case Method::Random:
                p.plan = design_random_plan(cfg.n_t, cfg.n_r, cfg.n_rf, cfg.pilots, cfg.power, derive_seed(cfg.seed, 3, point));
                break;
            }
            if (p.use_plan)
            {
                p.x = p.plan.stacked();
                p.xi = sigma2 * p.plan.noise_shape();
            }
            else
                p.xi = sigma2 * CMatrix::Identity(p.x.cols(), p.x.cols());

            if (method == Method::LS)
            {
                if (p.x.cols() < p.x.rows())
                    throw Error(ErrorCode::Underdetermined, "LS: fewer observations than unknowns");
                Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(p.x.adjoint());
                if (cod.rank() < p.x.rows())
                    throw Error(ErrorCode::Underdetermined, "LS: observation matrix is rank deficient");
                p.gain = cod.pseudoInverse();
            }
            else if (method == Method::IF)
            {
                // Independent SIMO systems: each column is estimated with its own prior only
                const CMatrix st = m.design.sigma_T().diagonal().asDiagonal();
                p.gain = LmmseEstimator(CovKernel(st, m.design.sigma_R()), p.x, p.xi).gain();
            }
            else
                p.gain = LmmseEstimator(m.design, p.x, p.xi).gain();

            p.mi = mutual_information(m.truth, p.x, p.xi);
            p.expected = expected_mse(m.truth, p.gain, p.x, p.xi) / m.truth.trace_product();
            return p;
        }

        struct TrialResult
        {
            double ratio = 0.0, err = 0.0, energy = 0.0;
        };

        template <class F>
        void parallel_for(int n, int threads, F &&f)
        {
            if (threads <= 0)
                threads = std::max(1u, std::thread::hardware_concurrency());
            threads = std::min(threads, std::max(n, 1));
            if (threads <= 1)
            {
                for (int i = 0; i < n; ++i)
                    f(i);
                return;
            }
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(threads);
            for (int t = 0; t < threads; ++t)
                pool.emplace_back([&, t]()
                                  {
                    try
                    {
                        for (int i = t; i < n; i += threads)
                            f(i);
                    }
                    catch (...)
                    {
                        errors[t] = std::current_exception();
                    } });
            for (auto &th : pool)
                th.join();
            for (auto &e : errors)
                if (e)
                    std::rethrow_exception(e);
        }

        std::vector<NmseRow> evaluate_point(const ScenarioConfig &cfg, const std::string &axis, double value,
                                            std::uint64_t point, int threads)
        {
            const ScenarioModel m = build_model(cfg);
            std::vector<NmseRow> rows;
            for (Method method : cfg.methods)
            {
                Prepared p;
                try
                {
                    p = prepare(method, cfg, m, point);
                }
                catch (const Error &e)
                {
                    throw Error(e.code(), "scenario " + cfg.scenario + ", method " + method_name(method) + ", " + axis +
                                              "=" + std::to_string(value) + ": " + e.what());
                }

                std::vector<TrialResult> res(cfg.trials);
                parallel_for(cfg.trials, threads, [&](int trial)
                             {
                    // Same channel and noise streams for every method and sweep point
                    Rng ch(derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(trial)));
                    Rng nz(derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(trial)));
                    const CMatrix h = m.synth.draw(ch);
                    const PilotBatch b = p.use_plan ? transmit(p.plan, h, m.noise, nz) : transmit(p.x, h, m.noise, nz);
                    const CVector est = p.gain * b.y;
                    const CVector hv = vec(h);
                    TrialResult r;
                    r.err = (hv - est).squaredNorm();
                    r.energy = hv.squaredNorm();
                    r.ratio = r.err / r.energy;
                    res[trial] = r; });

                NmseRow row;
                row.scenario = cfg.scenario;
                row.method = method_name(method);
                row.axis = axis;
                row.value = value;
                row.trials = cfg.trials;
                row.seed = cfg.seed;
                double ratio = 0.0, err = 0.0, energy = 0.0;
                for (const TrialResult &r : res)
                {
                    ratio += r.ratio;
                    err += r.err;
                    energy += r.energy;
                }
                row.nmse_linear = ratio / cfg.trials;
                row.mse = err / cfg.trials;
                row.energy = energy / cfg.trials;
                row.nmse_db = 10.0 * std::log10(row.nmse_linear);
                row.mi_bits = p.mi;
                row.expected = p.expected;
                rows.push_back(row);
            }
            return rows;
        }
    }

    NmseReport run_point(const ScenarioConfig &cfg, const std::string &axis, double value, int threads)
    {
        NmseReport rep;
        rep.rows = evaluate_point(cfg, axis, value, 0, threads);
        return rep;
    }

    NmseReport run_sweep(const ScenarioConfig &cfg, SweepAxis axis, const std::vector<double> &values, int threads)
    {
        NmseReport rep;
        for (std::size_t i = 0; i < values.size(); ++i)
        {
            ScenarioConfig c = cfg;
            switch (axis)
            {
            case SweepAxis::Snr:
                c.snr_db = values[i];
                break;
            case SweepAxis::Pilots:
                c.pilots = static_cast<int>(std::lround(values[i]));
                break;
            case SweepAxis::Spacing:
                c.spacing_over_lambda = values[i];
                break;
            }
            auto rows = evaluate_point(c, axis_name(axis), values[i], i, threads);
            rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
        }
        return rep;
    }

    std::string NmseReport::to_csv() const
    {
        std::ostringstream os;
        os << "scenario,method,axis,value,nmse_db,mi_bits,trials,seed\n";
        char buf[256];
        for (const NmseRow &r : rows)
        {
            std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.10g,%.6f,%.6f,%d,%llu\n", r.scenario.c_str(), r.method.c_str(),
                          r.axis.c_str(), r.value, r.nmse_db, r.mi_bits, r.trials, static_cast<unsigned long long>(r.seed));
            os << buf;
        }
        return os.str();
    }

    std::string AdaptiveResult::to_csv() const
    {
        std::ostringstream os;
        os << "frame,nmse_db,expected_nmse_db,kernel_error\n";
        char buf[160];
        for (const AdaptiveFrame &f : frames)
        {
            std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f\n", f.frame, f.nmse_db, f.expected_nmse_db, f.kernel_error);
            os << buf;
        }
        return os.str();
    }

    AdaptiveResult run_adaptive(const ScenarioConfig &cfg, int frames)
    {
        if (frames < 1)
            throw Error(ErrorCode::InvalidArgument, "run_adaptive: need at least one frame");
        ScenarioConfig c = cfg;
        // Only the truth is needed; the design kernel is learned
        if (c.truth == TruthModel::Spatial)
            c.family.tag = KernelTag::Statistical;
        const ScenarioModel m = build_model(c);
        const double prior_energy = m.truth.trace_product();

        AdaptiveResult out;
        {
            const ObservationPlan plan = design_2dif(m.truth, c.pilots, c.n_rf, c.power, m.noise);
            const double tr = posterior_trace(m.truth, plan.stacked(), m.noise * plan.noise_shape());
            out.perfect_nmse_db = 10.0 * std::log10(tr / prior_energy);
        }

        CovKernel kernel(CMatrix::Identity(c.n_t, c.n_t), CMatrix::Identity(c.n_r, c.n_r));
        for (int t = 1; t <= frames; ++t)
        {
            const ObservationPlan plan = design_2dif(kernel, c.pilots, c.n_rf, c.power, m.noise);
            const CMatrix x = plan.stacked();
            const CMatrix xi = m.noise * plan.noise_shape();
            const LmmseEstimator est(kernel, x, xi);

            Rng ch(derive_seed(c.seed, 5, static_cast<std::uint64_t>(t)));
            Rng nz(derive_seed(c.seed, 6, static_cast<std::uint64_t>(t)));
            const CMatrix h = m.synth.draw(ch);
            const PilotBatch b = transmit(plan, h, m.noise, nz);
            const CVector h_hat = est.estimate(b.y);

            AdaptiveFrame f;
            f.frame = t;
            f.nmse_db = 10.0 * std::log10((vec(h) - h_hat).squaredNorm() / vec(h).squaredNorm());
            f.expected_nmse_db = 10.0 * std::log10(expected_mse(m.truth, est.gain(), x, xi) / prior_energy);

            // Frame t replaces the identity start outright at t = 1
            kernel = adaptive_update(kernel, unvec(h_hat, c.n_r, c.n_t), t);
            f.kernel_error = kronecker_relative_error(kernel, m.truth);
            out.frames.push_back(f);
        }
        return out;
    }
}
