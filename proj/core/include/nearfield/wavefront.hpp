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

#ifndef NEARFIELD_WAVEFRONT_HPP
#define NEARFIELD_WAVEFRONT_HPP

#include "nearfield/scene.hpp"

namespace nearfield
{
    // Closed-form spherical-wave phase model for a linear array, built on the triangle formed by
    // the reference element (index 1), element n and the target. Angles are measured from the
    // array axis. All phases are phase lags relative to element 1: a channel coefficient carries
    // exp(-j * phase), so a longer path gives a larger phase.

    /// Angular separation below which the closed form switches to its analytic limit.
    inline constexpr double kLimitBranchAngle = 1e-9;

    struct PhaseModelInput
    {
        int n = 1;                // element index, reference is 1
        double spacing = 0.0;     // m
        double wavelength = 0.0;  // m
        double theta_ref = 0.0;   // rad, angle at element 1
        double theta_n = 0.0;     // rad, angle at element n
    };

    /// delta_n = r_n - r_1 = (n-1) d (sin theta_1 - sin theta_n) / sin(theta_n - theta_1),
    /// with the limit -(n-1) d cos theta_1 when the two angles coincide.
    double path_difference(const PhaseModelInput &in);

    /// 2 pi delta_n / lambda.
    double near_field_phase(const PhaseModelInput &in);

    /// Far-field phase magnitude 2 pi d (n-1) cos(theta_1) / lambda.
    double far_field_phase(int n, double spacing, double wavelength, double theta_ref);

    /// Signed far-field phase, -far_field_phase(); the limit of near_field_phase as theta_n -> theta_1.
    double signed_far_field_phase(int n, double spacing, double wavelength, double theta_ref);

    /// 2 D^2 / lambda.
    double rayleigh_distance(double aperture, double wavelength);

    /// Builds the model input for element n of `scene` from exact geometry.
    PhaseModelInput phase_model_input(const Scene &scene, int n, const Vec3 &target, double wavelength);

    /// Phase lag of element n relative to element 1 from exact Euclidean path lengths: 2 pi f (r_n - r_1) / c.
    double exact_phase_oracle(const Scene &scene, int n, const Vec3 &target, double frequency);

} // namespace nearfield

#endif
