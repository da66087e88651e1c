// SPDX-License-Identifier: Apache-2.0
//
// nearfield: near-field channel laboratory for large virtual arrays
// Copyright (C) 2026 The nearfield Authors
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

#ifndef NEARFIELD_TYPES_HPP
#define NEARFIELD_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nearfield
{
    using Vec3 = Eigen::Vector3d;
    using cdouble = std::complex<double>;

    inline constexpr double kSpeedOfLight = 299792458.0; // m/s
    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

    inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
    inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

    /// Thrown by the scenario parser. Carries the 1-based line number of the offending line.
    class ParseError : public std::runtime_error
    {
    public:
        ParseError(int line, const std::string &what)
            : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
        int line() const noexcept { return line_; }

    private:
        int line_;
    };

    /// Thrown when a value violates a data-model invariant. `field()` names the offending field.
    class InvariantError : public std::invalid_argument
    {
    public:
        InvariantError(std::string field, const std::string &what)
            : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
        const std::string &field() const noexcept { return field_; }

    private:
        std::string field_;
    };

    /// Thrown by analysis steps that cannot produce a meaningful result (e.g. an all-noise profile).
    class AnalysisError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Inclusive, 1-based range of array elements.
    struct ElementRange
    {
        int start = 1;
        int end = 1;

        int size() const noexcept { return end - start + 1; }
        bool contains(int n) const noexcept { return n >= start && n <= end; }
        friend bool operator==(const ElementRange &, const ElementRange &) = default;
    };

} // namespace nearfield

#endif
