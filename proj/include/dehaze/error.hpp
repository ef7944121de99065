// Copyright 2026 The dehaze Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once
#include <stdexcept>
#include <string>

namespace dehaze {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

// Malformed PNG/JPEG stream. The message names the codec stage that failed.
class DecodeError : public IoError
{
public:
    using IoError::IoError;
};

// Input has no structure to measure (zero contrast, no visible edges).
class DegenerateInputError : public Error
{
public:
    using Error::Error;
};

class SolverError : public Error
{
public:
    SolverError(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations)
    {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

} // namespace dehaze
