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

#include "obsdesign/cli.hpp"
#include "obsdesign/cmt.hpp"
#include "obsdesign/plan_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace obsdesign::cli
{
    const std::vector<std::string> &commands()
    {
        static const std::vector<std::string> c{"design", "sweep-snr", "sweep-q", "sweep-spacing", "adaptive", "fit-kernel", "export-plan"};
        return c;
    }

    namespace
    {
        // Tracks files written by one run so a failure can remove them
        class Artifacts
        {
        public:
            explicit Artifacts(std::string dir) : dir_(std::move(dir)) {}

            std::string path(const std::string &name) const { return (std::filesystem::path(dir_) / name).string(); }

            void write(const std::string &name, const std::string &content)
            {
                const std::string p = path(name);
                write_file_atomic(p, content);
                files_.push_back(p);
            }

            void cmt(const std::string &name, const CMatrix &m) { write(name, format_cmt(m)); }

            void add(const std::vector<std::string> &paths) { files_.insert(files_.end(), paths.begin(), paths.end()); }

            void rollback()
            {
                std::error_code ec;
                for (const std::string &f : files_)
                {
                    std::filesystem::remove(f, ec);
                    std::filesystem::remove(f + ".tmp", ec);
                }
                files_.clear();
            }

        private:
            std::string dir_;
            std::vector<std::string> files_;
        };

        std::string fmt(const char *f, double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof(buf), f, v);
            return buf;
        }

        void write_kernel(Artifacts &art, const ScenarioConfig &cfg, const ScenarioModel &m)
        {
            art.cmt("sigma_T.cmt", m.design.sigma_T());
            art.cmt("sigma_R.cmt", m.design.sigma_R());
            std::ostringstream side;
            side << "family " << kernel_tag_name(cfg.family.tag) << "\n";
            side << "eta " << fmt("%.17g", m.eta) << "\n";
            art.write("kernel.txt", side.str());
        }

        void cmd_design(const ScenarioConfig &cfg, Artifacts &art, std::ostream &out)
        {
            const ScenarioModel m = build_model(cfg);
            write_kernel(art, cfg, m);
            for (Method method : cfg.methods)
            {
                const std::string name = method_name(method);
                const std::string dir = art.path(name);
                double mi = 0.0;
                int pilots = 0;
                switch (method)
                {
                case Method::TS2DIF:
                {
                    const HybridPlan hp = design_ts2dif(m.design, cfg.pilots, cfg.n_rf, cfg.power, m.noise);
                    art.add(save_hybrid_plan(dir, hp));
                    mi = mutual_information(m.design, hp.pilots(), m.noise);
                    pilots = hp.size();
                    break;
                }
                case Method::WaterFilling:
                {
                    const WaterFillingSolution wf = design_waterfilling(m.design, cfg.pilots, cfg.n_rf, cfg.power, m.noise);
                    std::filesystem::create_directories(dir);
                    art.cmt(name + "/X_ideal.cmt", wf.obs_matrix);
                    art.write(name + "/water_level.txt", "beta " + fmt("%.17g", wf.beta) + "\n");
                    mi = mutual_information(m.design, wf.obs_matrix, m.noise * CMatrix::Identity(wf.obs_matrix.cols(), wf.obs_matrix.cols()));
                    pilots = cfg.pilots;
                    break;
                }
                default:
                {
                    ObservationPlan plan;
                    if (method == Method::TwoDIF)
                        plan = design_2dif(m.design, cfg.pilots, cfg.n_rf, cfg.power, m.noise);
                    else if (method == Method::IF)
                        plan = design_if_plan(m.design, cfg.pilots * cfg.n_rf, cfg.power, m.noise);
                    else if (method == Method::Random)
                        plan = design_random_plan(cfg.n_t, cfg.n_r, cfg.n_rf, cfg.pilots, cfg.power, derive_seed(cfg.seed, 3, 0));
                    else
                        plan = design_dft_plan(cfg.n_t, cfg.n_r, cfg.n_rf, cfg.power);
                    art.add(save_plan(dir, plan));
                    mi = mutual_information(m.design, plan, m.noise);
                    pilots = plan.size();
                    break;
                }
                }
                out << "design method=" << name << " pilots=" << pilots << " noise=" << fmt("%.6g", m.noise)
                    << " mi_bits=" << fmt("%.6f", mi) << " dir=" << dir << "\n";
            }
        }

        void cmd_sweep(const ScenarioConfig &cfg, SweepAxis axis, const RunManifest &man, Artifacts &art, std::ostream &out)
        {
            std::string spec = man.values;
            if (spec.empty())
                spec = axis == SweepAxis::Snr ? "-5:20:5" : axis == SweepAxis::Pilots ? "8:48:8" : "0.0625,0.125,0.25,0.5";
            const std::vector<double> values = parse_value_list(spec);
            const NmseReport rep = run_sweep(cfg, axis, values, man.threads);
            for (const NmseRow &r : rep.rows)
                out << r.axis << "=" << fmt("%.6g", r.value) << " method=" << r.method << " nmse_db=" << fmt("%.3f", r.nmse_db)
                    << " mi_bits=" << fmt("%.3f", r.mi_bits) << "\n";
            art.write("nmse.csv", rep.to_csv());
        }

        void cmd_adaptive(const ScenarioConfig &cfg, const RunManifest &man, Artifacts &art, std::ostream &out)
        {
            if (man.frames < 1)
                throw Error(ErrorCode::ValidationError, "--frames: must be >= 1");
            const AdaptiveResult r = run_adaptive(cfg, man.frames);
            art.write("adaptive.csv", r.to_csv());
            const AdaptiveFrame &last = r.frames.back();
            out << "adaptive frames=" << man.frames << " final_nmse_db=" << fmt("%.3f", last.expected_nmse_db)
                << " perfect_nmse_db=" << fmt("%.3f", r.perfect_nmse_db) << " kernel_error=" << fmt("%.4f", last.kernel_error) << "\n";
        }

        void cmd_fit_kernel(ScenarioConfig cfg, Artifacts &art, std::ostream &out)
        {
            if (!cfg.family.has_eta())
                throw Error(ErrorCode::ValidationError, "kernel.family: fit-kernel needs laplace or bessel");
            // Training data comes from the configured truth; eta itself is re-estimated
            ScenarioConfig truth_cfg = cfg;
            truth_cfg.family.tag = KernelTag::Statistical;
            if (cfg.truth == TruthModel::Family)
                truth_cfg.family = cfg.family;
            const ScenarioModel truth = build_model(truth_cfg);

            std::vector<Observation> obs;
            for (int r = 0; r < cfg.eta_training; ++r)
            {
                Rng rng(derive_seed(cfg.seed, 4, static_cast<std::uint64_t>(r)));
                const ObservationPlan plan = design_random_plan(cfg.n_t, cfg.n_r, cfg.n_rf, cfg.pilots, cfg.power, rng());
                const PilotBatch b = transmit(plan, truth.synth.draw(rng), truth.noise, rng);
                obs.push_back({b.y, b.x, b.xi});
            }
            const EtaFit fit = fit_eta(cfg.family, cfg.tx_geometry(), cfg.rx_geometry(), obs, EtaGrid(), cfg.c_tx, cfg.c_rx);

            std::ostringstream csv;
            csv << "eta,log_likelihood\n";
            for (std::size_t k = 0; k < fit.grid.size(); ++k)
                csv << fmt("%.10g", fit.grid[k]) << "," << fmt("%.10g", fit.curve[k]) << "\n";
            art.write("eta_curve.csv", csv.str());

            ScenarioModel m;
            KernelFamily fam = cfg.family;
            fam.eta = fit.eta;
            m.design = build_kernel(fam, cfg.tx_geometry(), cfg.rx_geometry(), cfg.c_tx, cfg.c_rx);
            m.eta = fit.eta;
            write_kernel(art, cfg, m);
            out << "fit-kernel family=" << kernel_tag_name(cfg.family.tag) << " eta=" << fmt("%.6g", fit.eta)
                << " log_likelihood=" << fmt("%.6f", fit.log_likelihood) << "\n";
            for (std::size_t k = 0; k < fit.grid.size(); ++k)
                out << fmt("%.6g", fit.grid[k]) << "," << fmt("%.6f", fit.curve[k]) << "\n";
        }

        void cmd_export_plan(const ScenarioConfig &cfg, const RunManifest &man, Artifacts &art, std::ostream &out)
        {
            if (man.plan_dir.empty())
                throw Error(ErrorCode::ValidationError, "--plan: export-plan needs a plan directory");
            const ObservationPlan plan = load_plan(man.plan_dir);
            if (plan.n_t() != cfg.n_t || plan.n_r() != cfg.n_r)
                throw Error(ErrorCode::ValidationError, "--plan: plan antenna counts differ from array.n_t / array.n_r");
            art.add(save_plan(art.path("plan"), plan));
            const ScenarioModel m = build_model(cfg);
            out << "export-plan pilots=" << plan.size() << " mi_bits=" << fmt("%.9f", mutual_information(m.design, plan, m.noise))
                << " dir=" << art.path("plan") << "\n";
        }
    }

    int dispatch(const RunManifest &man, std::ostream &out, std::ostream &err)
    {
        Artifacts art(man.out_dir);
        try
        {
            const auto &cmds = commands();
            if (std::find(cmds.begin(), cmds.end(), man.command) == cmds.end())
                throw Error(ErrorCode::ValidationError, "unknown command '" + man.command + "'");
            // Everything is validated before any computation or output
            const ScenarioConfig cfg = man.config_path.empty() ? default_config(man.overrides) : parse_config(man.config_path, man.overrides);
            std::filesystem::create_directories(man.out_dir);

            if (man.command == "design")
                cmd_design(cfg, art, out);
            else if (man.command == "sweep-snr")
                cmd_sweep(cfg, SweepAxis::Snr, man, art, out);
            else if (man.command == "sweep-q")
                cmd_sweep(cfg, SweepAxis::Pilots, man, art, out);
            else if (man.command == "sweep-spacing")
                cmd_sweep(cfg, SweepAxis::Spacing, man, art, out);
            else if (man.command == "adaptive")
                cmd_adaptive(cfg, man, art, out);
            else if (man.command == "fit-kernel")
                cmd_fit_kernel(cfg, art, out);
            else
                cmd_export_plan(cfg, man, art, out);
            return 0;
        }
        catch (const Error &e)
        {
            art.rollback();
            err << "obsdesign " << man.command << ": " << e.what() << "\n";
            return 2;
        }
        catch (const std::exception &e)
        {
            art.rollback();
            err << "obsdesign " << man.command << ": " << e.what() << "\n";
            return 3;
        }
    }

    int run(int argc, char **argv, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Pilot observation matrix design and channel estimation experiments"};
        RunManifest man;
        std::vector<std::string> sets;
        app.add_option("command", man.command, "design | sweep-snr | sweep-q | sweep-spacing | adaptive | fit-kernel | export-plan")
            ->required()
            ->check(CLI::IsMember(commands()));
        app.add_option("--config", man.config_path, "Scenario file (INI sections array, pilot, kernel, run)");
        app.add_option("--out", man.out_dir, "Output directory")->capture_default_str();
        app.add_option("--set", sets, "Override SECTION.KEY=VALUE (repeatable)");
        app.add_option("--threads", man.threads, "Worker threads, 0 = auto")->capture_default_str();
        app.add_option("--values", man.values, "Sweep values: a,b,c or start:stop:step");
        app.add_option("--frames", man.frames, "Frames for the adaptive run")->capture_default_str();
        app.add_option("--plan", man.plan_dir, "Plan bundle directory for export-plan");

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            return app.exit(e, out, err);
        }
        try
        {
            for (const std::string &s : sets)
                man.overrides.push_back(parse_override(s));
        }
        catch (const Error &e)
        {
            err << "obsdesign: " << e.what() << "\n";
            return 2;
        }
        return dispatch(man, out, err);
    }
}
