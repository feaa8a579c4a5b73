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

#include "obsdesign/cmt.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace obsdesign
{
    static std::string format_entry(cplx z)
    {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", z.real(), z.imag());
        return buf;
    }

    // Parses one RE{+|-}IMj token
    static cplx parse_entry(const std::string &tok, Eigen::Index row)
    {
        auto fail = [&]()
        { return Error(ErrorCode::ParseError, "cmt: bad entry '" + tok + "' on data row " + std::to_string(row + 1)); };

        const char *s = tok.c_str();
        char *end = nullptr;
        errno = 0;
        const double re = std::strtod(s, &end);
        if (end == s)
            throw fail();
        if (*end != '+' && *end != '-')
            throw fail();
        const char *s2 = end;
        const double im = std::strtod(s2, &end);
        if (end == s2 || *end != 'j' || *(end + 1) != '\0')
            throw fail();
        if (!std::isfinite(re) || !std::isfinite(im))
            throw fail();
        return {re, im};
    }

    void write_cmt(std::ostream &os, const CMatrix &m)
    {
        os << m.rows() << ' ' << m.cols() << '\n';
        for (Eigen::Index i = 0; i < m.rows(); ++i)
        {
            for (Eigen::Index j = 0; j < m.cols(); ++j)
            {
                if (j)
                    os << ' ';
                os << format_entry(m(i, j));
            }
            os << '\n';
        }
    }

    CMatrix read_cmt(std::istream &is)
    {
        long rows = 0, cols = 0;
        std::string header;
        if (!std::getline(is, header))
            throw Error(ErrorCode::ParseError, "cmt: missing header");
        std::istringstream hs(header);
        if (!(hs >> rows >> cols) || rows <= 0 || cols <= 0)
            throw Error(ErrorCode::ParseError, "cmt: header must be 'rows cols' with positive values");

        CMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
        {
            std::string line;
            if (!std::getline(is, line))
                throw Error(ErrorCode::ParseError, "cmt: expected " + std::to_string(rows) + " data rows");
            std::istringstream ls(line);
            std::string tok;
            Eigen::Index j = 0;
            while (ls >> tok)
            {
                if (j >= cols)
                    throw Error(ErrorCode::ParseError, "cmt: too many entries on data row " + std::to_string(i + 1));
                m(i, j++) = parse_entry(tok, i);
            }
            if (j != cols)
                throw Error(ErrorCode::ParseError, "cmt: too few entries on data row " + std::to_string(i + 1));
        }
        return m;
    }

    std::string format_cmt(const CMatrix &m)
    {
        std::ostringstream os;
        write_cmt(os, m);
        return os.str();
    }

    CMatrix parse_cmt(const std::string &text)
    {
        std::istringstream is(text);
        return read_cmt(is);
    }

    void write_file_atomic(const std::string &path, const std::string &content)
    {
        const std::string tmp = path + ".tmp";
        {
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            if (!os)
                throw Error(ErrorCode::IoError, "cannot open " + tmp + " for writing");
            os << content;
            os.flush();
            if (!os)
                throw Error(ErrorCode::IoError, "write failed for " + tmp);
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec)
        {
            std::filesystem::remove(tmp, ec);
            throw Error(ErrorCode::IoError, "cannot rename " + tmp + " to " + path);
        }
    }

    void save_cmt(const std::string &path, const CMatrix &m)
    {
        write_file_atomic(path, format_cmt(m));
    }

    CMatrix load_cmt(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw Error(ErrorCode::IoError, "cannot open " + path);
        try
        {
            return read_cmt(is);
        }
        catch (const Error &e)
        {
            throw Error(e.code(), path + ": " + e.what());
        }
    }
}
