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

#ifndef OBSDESIGN_ERROR_HPP
#define OBSDESIGN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace obsdesign
{
    // Failure categories reported by every module
    enum class ErrorCode
    {
        NonSquare,
        NotHermitian,
        NotPSD,
        RankDeficient,
        DimensionMismatch,
        QuadratureUnstable,
        EmptySampleSet,
        DegenerateGram,
        TooManyChains,
        SingularGram,
        SingularDigital,
        SingularInnovation,
        SingularNoise,
        Underdetermined,
        InvalidArgument,
        ParseError,
        ValidationError,
        IoError
    };

    const char *error_code_name(ErrorCode code);

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what)
            : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };
}

#endif
