// SPDX-License-Identifier: Apache-2.0
//
// schbf: hybrid beamforming design and SC-FDE link simulation for mmWave MIMO
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

#pragma once

#include <stdexcept>
#include <string>

namespace schbf
{

// Shape mismatch, empty input or an out-of-range dimension argument.
class DimensionError : public std::invalid_argument
{
public:
    explicit DimensionError(const std::string &what) : std::invalid_argument(what) {}
};

// Matrix is singular to working precision (condition estimate above 1e12).
class SingularityError : public std::runtime_error
{
public:
    explicit SingularityError(const std::string &what) : std::runtime_error(what) {}
};

// Invalid system, channel, link or experiment configuration.
class ConfigError : public std::invalid_argument
{
public:
    explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
};

// Bit payload length does not fit the constellation.
class FramingError : public std::invalid_argument
{
public:
    explicit FramingError(const std::string &what) : std::invalid_argument(what) {}
};

// A metric is undefined for the given input (e.g. PAPR of a zero-power block).
class MetricError : public std::domain_error
{
public:
    explicit MetricError(const std::string &what) : std::domain_error(what) {}
};

} // namespace schbf
