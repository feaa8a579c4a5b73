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

#ifndef OBSDESIGN_CMT_HPP
#define OBSDESIGN_CMT_HPP

#include "obsdesign/numkit.hpp"

#include <iosfwd>
#include <string>

namespace obsdesign
{
    // Complex Matrix Text: "rows cols" header, then one line per row of RE{+|-}IMj entries.
    // Writing uses 17 significant digits, so a write/read cycle is exact.
    void write_cmt(std::ostream &os, const CMatrix &m);
    CMatrix read_cmt(std::istream &is);

    std::string format_cmt(const CMatrix &m);
    CMatrix parse_cmt(const std::string &text);

    // File helpers. save_cmt writes to a temporary file and renames it into place.
    void save_cmt(const std::string &path, const CMatrix &m);
    CMatrix load_cmt(const std::string &path);

    // Writes text to path atomically (temp file + rename)
    void write_file_atomic(const std::string &path, const std::string &content);
}

#endif
