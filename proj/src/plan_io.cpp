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

#include "obsdesign/plan_io.hpp"
#include "obsdesign/cmt.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace obsdesign
{
    std::string pilot_file(const std::string &dir, int q, const char *suffix)
    {
        char name[64];
        std::snprintf(name, sizeof(name), "pilot_%03d_%s.cmt", q + 1, suffix);
        return (std::filesystem::path(dir) / name).string();
    }

    static std::string index_text(const ObservationPlan &plan, const char *kind)
    {
        std::ostringstream os;
        os << "pilots " << plan.size() << "\n";
        os << "kind " << kind << "\n";
        for (int q = 0; q < plan.size(); ++q)
        {
            os << "pilot " << q + 1;
            if (q < static_cast<int>(plan.selections.size()))
            {
                const Selection &s = plan.selections[q];
                os << " tx " << s.n_t + 1 << " rx";
                for (int j : s.n_r)
                    os << ' ' << j + 1;
            }
            os << "\n";
        }
        return os.str();
    }

    static std::vector<std::string> save_common(const std::string &dir, const ObservationPlan &plan, const char *kind)
    {
        std::filesystem::create_directories(dir);
        std::vector<std::string> written;
        for (int q = 0; q < plan.size(); ++q)
        {
            const std::string v = pilot_file(dir, q, "v"), w = pilot_file(dir, q, "W");
            save_cmt(v, plan.pilots[q].precoder);
            written.push_back(v);
            save_cmt(w, plan.pilots[q].combiner);
            written.push_back(w);
        }
        const std::string idx = (std::filesystem::path(dir) / "plan.index").string();
        write_file_atomic(idx, index_text(plan, kind));
        written.push_back(idx);
        return written;
    }

    std::vector<std::string> save_plan(const std::string &dir, const ObservationPlan &plan)
    {
        return save_common(dir, plan, "ideal");
    }

    std::vector<std::string> save_hybrid_plan(const std::string &dir, const HybridPlan &plan)
    {
        ObservationPlan p = plan.pilots();
        p.selections = plan.ideal.selections;
        std::vector<std::string> written = save_common(dir, p, "hybrid");
        std::ostringstream csv;
        csv << "pilot,iter,residual\n";
        char buf[96];
        for (int q = 0; q < plan.size(); ++q)
        {
            const std::string a = pilot_file(dir, q, "A"), d = pilot_file(dir, q, "D");
            save_cmt(a, plan.analog[q]);
            written.push_back(a);
            save_cmt(d, plan.digital[q]);
            written.push_back(d);
            const auto &tr = plan.traces[q];
            for (std::size_t it = 0; it < tr.size(); ++it)
            {
                std::snprintf(buf, sizeof(buf), "%d,%zu,%.17g\n", q + 1, it + 1, tr[it].after_precoder);
                csv << buf;
            }
        }
        const std::string res = (std::filesystem::path(dir) / "residuals.csv").string();
        write_file_atomic(res, csv.str());
        written.push_back(res);
        return written;
    }

    ObservationPlan load_plan(const std::string &dir)
    {
        const std::string idx = (std::filesystem::path(dir) / "plan.index").string();
        std::ifstream is(idx);
        if (!is)
            throw Error(ErrorCode::IoError, "cannot open " + idx);

        ObservationPlan plan;
        int count = -1;
        std::string line;
        int lineno = 0;
        while (std::getline(is, line))
        {
            ++lineno;
            std::istringstream ls(line);
            std::string tag;
            if (!(ls >> tag))
                continue;
            if (tag == "pilots")
            {
                if (!(ls >> count) || count < 0)
                    throw Error(ErrorCode::ParseError, idx + ": line " + std::to_string(lineno) + ": bad pilot count");
            }
            else if (tag == "kind")
                continue;
            else if (tag == "pilot")
            {
                int q = 0;
                std::string word;
                if (!(ls >> q))
                    throw Error(ErrorCode::ParseError, idx + ": line " + std::to_string(lineno) + ": bad pilot line");
                if (ls >> word)
                {
                    Selection s;
                    std::string rx;
                    if (word != "tx" || !(ls >> s.n_t) || !(ls >> rx) || rx != "rx")
                        throw Error(ErrorCode::ParseError, idx + ": line " + std::to_string(lineno) + ": bad selection");
                    s.n_t -= 1;
                    int j;
                    while (ls >> j)
                        s.n_r.push_back(j - 1);
                    plan.selections.push_back(std::move(s));
                }
            }
            else
                throw Error(ErrorCode::ParseError, idx + ": line " + std::to_string(lineno) + ": unknown entry '" + tag + "'");
        }
        if (count < 0)
            throw Error(ErrorCode::ParseError, idx + ": missing pilot count");
        if (!plan.selections.empty() && static_cast<int>(plan.selections.size()) != count)
            throw Error(ErrorCode::ParseError, idx + ": selection count differs from pilot count");

        for (int q = 0; q < count; ++q)
        {
            Pilot p;
            const CMatrix v = load_cmt(pilot_file(dir, q, "v"));
            if (v.cols() != 1)
                throw Error(ErrorCode::ParseError, pilot_file(dir, q, "v") + ": precoder must be a column");
            p.precoder = v.col(0);
            p.combiner = load_cmt(pilot_file(dir, q, "W"));
            plan.pilots.push_back(std::move(p));
        }
        return plan;
    }
}
