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

#include "nearfield/wavefront.hpp"

#include <cmath>
#include <stdexcept>

namespace nearfield
{
    namespace
    {
        void check_common(int n, double spacing, double wavelength)
        {
            if (n < 1)
                throw std::invalid_argument("element index must be >= 1");
            if (!(spacing > 0.0))
                throw std::invalid_argument("spacing must be positive");
            if (!(wavelength > 0.0))
                throw std::invalid_argument("wavelength must be positive");
        }

        void check_angle(double theta, const char *what)
        {
            if (!(theta >= 0.0 && theta <= kPi))
                throw std::invalid_argument(std::string(what) + " must lie in [0, pi]");
        }
    } // namespace

    double path_difference(const PhaseModelInput &in)
    {
        check_common(in.n, in.spacing, in.wavelength);
        check_angle(in.theta_ref, "theta_ref");
        check_angle(in.theta_n, "theta_n");
        if (in.n == 1)
            return 0.0;

        const double base = double(in.n - 1) * in.spacing;
        const double separation = in.theta_n - in.theta_ref;
        if (std::abs(separation) < kLimitBranchAngle)
            return -base * std::cos(in.theta_ref);

        // (sin a - sin b) / sin(b - a) == -cos((a+b)/2) / cos((b-a)/2)
        return -base * std::cos(0.5 * (in.theta_ref + in.theta_n)) / std::cos(0.5 * separation);
    }

    double near_field_phase(const PhaseModelInput &in) { return kTwoPi * path_difference(in) / in.wavelength; }

    double far_field_phase(int n, double spacing, double wavelength, double theta_ref)
    {
        check_common(n, spacing, wavelength);
        check_angle(theta_ref, "theta_ref");
        return kTwoPi * spacing * double(n - 1) * std::cos(theta_ref) / wavelength;
    }

    double signed_far_field_phase(int n, double spacing, double wavelength, double theta_ref)
    {
        return -far_field_phase(n, spacing, wavelength, theta_ref);
    }

    double rayleigh_distance(double aperture, double wavelength)
    {
        if (!(aperture >= 0.0))
            throw std::invalid_argument("aperture must be non-negative");
        if (!(wavelength > 0.0))
            throw std::invalid_argument("wavelength must be positive");
        return 2.0 * aperture * aperture / wavelength;
    }

    PhaseModelInput phase_model_input(const Scene &scene, int n, const Vec3 &target, double wavelength)
    {
        return {n, scene.array.spacing_d, wavelength, true_geometry(scene, 1, target).angle,
                true_geometry(scene, n, target).angle};
    }

    double exact_phase_oracle(const Scene &scene, int n, const Vec3 &target, double frequency)
    {
        const double r1 = true_geometry(scene, 1, target).distance;
        const double rn = true_geometry(scene, n, target).distance;
        return kTwoPi * frequency * (rn - r1) / kSpeedOfLight;
    }

} // namespace nearfield
