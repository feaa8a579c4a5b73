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

#include "obsdesign/config.hpp"
#include "obsdesign/cmt.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace obsdesign
{
    namespace
    {
        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos)
                return "";
            const auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        std::string lower(std::string s)
        {
            for (char &c : s)
                c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            return s;
        }

        Error bad_value(const std::string &name, const std::string &value, const char *what)
        {
            return Error(ErrorCode::ValidationError, name + ": '" + value + "' is not " + what);
        }

        long long to_int(const std::string &name, const std::string &v)
        {
            char *end = nullptr;
            errno = 0;
            const long long x = std::strtoll(v.c_str(), &end, 10);
            if (end == v.c_str() || *end != '\0' || errno == ERANGE)
                throw bad_value(name, v, "an integer");
            return x;
        }

        double to_real(const std::string &name, const std::string &v)
        {
            char *end = nullptr;
            errno = 0;
            const double x = std::strtod(v.c_str(), &end);
            if (end == v.c_str() || *end != '\0' || !std::isfinite(x))
                throw bad_value(name, v, "a finite number");
            return x;
        }

        int to_dim(const std::string &name, const std::string &v)
        {
            const long long x = to_int(name, v);
            if (x < -1000000 || x > 1000000)
                throw bad_value(name, v, "a reasonable count");
            return static_cast<int>(x);
        }

        // Accepts a plain number or a fraction such as 1/8
        double to_ratio(const std::string &name, const std::string &v)
        {
            const auto slash = v.find('/');
            if (slash == std::string::npos)
                return to_real(name, v);
            const double num = to_real(name, trim(v.substr(0, slash)));
            const double den = to_real(name, trim(v.substr(slash + 1)));
            if (den == 0.0)
                throw bad_value(name, v, "a valid fraction");
            return num / den;
        }

        struct Pending
        {
            std::string coupling_tx, coupling_rx;
        };

        void assign(ScenarioConfig &cfg, Pending &pend, const std::string &section, const std::string &key,
                    const std::string &value)
        {
            const std::string name = section + "." + key;
            if (value.empty())
                return; // keep default
            if (section == "array")
            {
                if (key == "n_t") cfg.n_t = to_dim(name, value);
                else if (key == "n_r") cfg.n_r = to_dim(name, value);
                else if (key == "n_rf") cfg.n_rf = to_dim(name, value);
                else if (key == "spacing_over_lambda") cfg.spacing_over_lambda = to_ratio(name, value);
                else throw Error(ErrorCode::ValidationError, name + ": unknown key");
            }
            else if (section == "pilot")
            {
                if (key == "q") cfg.pilots = to_dim(name, value);
                else if (key == "p") cfg.power = to_real(name, value);
                else if (key == "snr_db") cfg.snr_db = to_real(name, value);
                else throw Error(ErrorCode::ValidationError, name + ": unknown key");
            }
            else if (section == "kernel")
            {
                if (key == "family")
                {
                    try
                    {
                        cfg.family.tag = parse_kernel_tag(value);
                    }
                    catch (const Error &)
                    {
                        throw bad_value(name, value, "one of statistical, laplace, bessel, identity");
                    }
                }
                else if (key == "eta") cfg.family.eta = to_real(name, value);
                else if (key == "coupling_tx") pend.coupling_tx = value;
                else if (key == "coupling_rx") pend.coupling_rx = value;
                else if (key == "truth")
                {
                    const std::string v = lower(value);
                    if (v == "spatial") cfg.truth = TruthModel::Spatial;
                    else if (v == "family") cfg.truth = TruthModel::Family;
                    else throw bad_value(name, value, "spatial or family");
                }
                else throw Error(ErrorCode::ValidationError, name + ": unknown key");
            }
            else if (section == "run")
            {
                if (key == "method")
                {
                    cfg.methods.clear();
                    std::istringstream ss(value);
                    std::string item;
                    while (std::getline(ss, item, ','))
                    {
                        item = trim(item);
                        if (item.empty())
                            continue;
                        try
                        {
                            cfg.methods.push_back(parse_method(item));
                        }
                        catch (const Error &)
                        {
                            throw bad_value(name, item, "a known method");
                        }
                    }
                }
                else if (key == "trials") cfg.trials = to_dim(name, value);
                else if (key == "seed")
                {
                    const long long s = to_int(name, value);
                    if (s < 0)
                        throw bad_value(name, value, "a nonnegative integer");
                    cfg.seed = static_cast<std::uint64_t>(s);
                }
                else if (key == "scenario") cfg.scenario = value;
                else throw Error(ErrorCode::ValidationError, name + ": unknown key");
            }
            else
                throw Error(ErrorCode::ValidationError, name + ": unknown section '" + section + "'");
        }

        CMatrix load_coupling(const std::string &base, const std::string &path, const std::string &key)
        {
            if (path.empty() || lower(path) == "identity")
                return CMatrix();
            std::filesystem::path p(path);
            if (p.is_relative())
                p = std::filesystem::path(base) / p;
            try
            {
                return load_cmt(p.string());
            }
            catch (const Error &e)
            {
                throw Error(ErrorCode::ValidationError, key + ": " + e.what());
            }
        }

        ScenarioConfig finish(ScenarioConfig cfg, Pending &pend, const std::string &base_dir, const std::vector<Override> &overrides)
        {
            for (const Override &o : overrides)
                assign(cfg, pend, o.section, o.key, o.value);
            cfg.c_tx = load_coupling(base_dir, pend.coupling_tx, "kernel.coupling_tx");
            cfg.c_rx = load_coupling(base_dir, pend.coupling_rx, "kernel.coupling_rx");
            cfg.validate();
            return cfg;
        }
    }

    Override parse_override(const std::string &text)
    {
        const auto eq = text.find('=');
        const auto dot = text.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw Error(ErrorCode::ValidationError, "override '" + text + "' must look like SECTION.KEY=VALUE");
        return {lower(trim(text.substr(0, dot))), lower(trim(text.substr(dot + 1, eq - dot - 1))), trim(text.substr(eq + 1))};
    }

    ScenarioConfig parse_config_text(const std::string &text, const std::string &base_dir, const std::vector<Override> &overrides)
    {
        ScenarioConfig cfg;
        Pending pend;
        std::istringstream is(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(is, line))
        {
            ++lineno;
            const auto hash = line.find_first_of("#;");
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;
            if (line.front() == '[')
            {
                if (line.back() != ']' || line.size() < 3)
                    throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": malformed section header");
                section = lower(trim(line.substr(1, line.size() - 2)));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key = value");
            if (section.empty())
                throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": key outside of a section");
            const std::string key = lower(trim(line.substr(0, eq)));
            if (key.empty())
                throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": empty key");
            assign(cfg, pend, section, key, trim(line.substr(eq + 1)));
        }
        return finish(cfg, pend, base_dir, overrides);
    }

    ScenarioConfig parse_config(const std::string &path, const std::vector<Override> &overrides)
    {
        std::ifstream is(path);
        if (!is)
            throw Error(ErrorCode::IoError, "cannot read config " + path);
        std::stringstream ss;
        ss << is.rdbuf();
        const std::string base = std::filesystem::path(path).parent_path().string();
        return parse_config_text(ss.str(), base.empty() ? "." : base, overrides);
    }

    ScenarioConfig default_config(const std::vector<Override> &overrides)
    {
        return parse_config_text("", ".", overrides);
    }

    std::vector<double> parse_value_list(const std::string &text)
    {
        std::vector<double> out;
        const std::string t = trim(text);
        if (t.find(':') != std::string::npos)
        {
            std::vector<double> parts;
            std::istringstream ss(t);
            std::string item;
            while (std::getline(ss, item, ':'))
                parts.push_back(to_real("--values", trim(item)));
            if (parts.size() != 3 || parts[2] <= 0.0 || parts[1] < parts[0])
                throw Error(ErrorCode::ValidationError, "--values: range must be start:stop:step with positive step");
            const long n = std::lround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
            for (long k = 0; k <= n; ++k)
                out.push_back(parts[0] + k * parts[2]);
            return out;
        }
        std::istringstream ss(t);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            item = trim(item);
            if (!item.empty())
                out.push_back(to_ratio("--values", item));
        }
        if (out.empty())
            throw Error(ErrorCode::ValidationError, "--values: empty list");
        return out;
    }
}
