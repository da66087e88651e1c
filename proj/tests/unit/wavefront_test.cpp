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
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace nearfield;
using nearfield::test::Gen;

namespace
{
    PhaseModelInput input(int n, double d, double lambda, double t1_deg, double tn_deg)
    {
        return {n, d, lambda, deg2rad(t1_deg), deg2rad(tn_deg)};
    }

    // Places a point so that element 1 (at 0) sees it at theta1 and element n (at (n-1)d) at thetan,
    // by intersecting the two rays, and returns r_n - r_1.
    double triangulated_difference(int n, double d, double theta1, double thetan)
    {
        const double base = double(n - 1) * d;
        // law of sines in the triangle (element 1, element n, point)
        const double apex = thetan - theta1;
        const double r1 = base * std::sin(kPi - thetan) / std::sin(apex);
        const double rn = base * std::sin(theta1) / std::sin(apex);
        return rn - r1;
    }
} // namespace

TEST(PathDifference, Examples)
{
    EXPECT_EQ(path_difference(input(1, 0.0125, 0.025, 30, 70)), 0.0);
    EXPECT_NEAR(path_difference(input(3, 0.0125, 0.025, 60, 60)), -0.0125, 1e-15);
    const double oracle = triangulated_difference(2, 0.0125, deg2rad(60), deg2rad(61));
    EXPECT_NEAR(oracle, -6.156e-3, 5e-7);
    EXPECT_NEAR(path_difference(input(2, 0.0125, 0.025, 60, 61)), oracle, 1e-15);
}

TEST(PathDifference, RejectsBadInput)
{
    EXPECT_THROW(path_difference(input(0, 0.01, 0.02, 60, 60)), std::invalid_argument);
    EXPECT_THROW(path_difference(input(2, -0.01, 0.02, 60, 60)), std::invalid_argument);
    EXPECT_THROW(path_difference(input(2, 0.01, 0.02, -1, 60)), std::invalid_argument);
}

TEST(NearFieldPhase, Examples)
{
    EXPECT_EQ(near_field_phase(input(1, 0.0125, 0.025, 10, 20)), 0.0);
    const double expected = kTwoPi / 0.025 * triangulated_difference(2, 0.0125, deg2rad(60), deg2rad(61));
    EXPECT_NEAR(near_field_phase(input(2, 0.0125, 0.025, 60, 61)), expected, 1e-12);
    EXPECT_NEAR(expected, -1.547, 1e-3);
    for (int n = 1; n <= 64; ++n)
        EXPECT_NEAR(near_field_phase(input(n, 0.0125, 0.025, 90, 90)), 0.0, 1e-12);
}

TEST(NearFieldPhase, LimitBranchIsContinuous)
{
    for (double t1 : {10.0, 45.0, 90.0, 135.0, 170.0})
    {
        const double a = deg2rad(t1);
        const double limit = path_difference({5, 0.01, 0.02, a, a});
        const double near = path_difference({5, 0.01, 0.02, a, a + 2.0 * kLimitBranchAngle});
        EXPECT_NEAR(limit, near, 1e-10) << t1;
    }
}

TEST(NearFieldPhase, MatchesExactPathLengthsOn2dGeometries)
{
    Gen g(2024);
    for (int trial = 0; trial < 1000; ++trial)
    {
        const int n_el = g.integer(2, 128);
        Scene s = test::free_space(n_el, Vec3::Zero());
        s.array.spacing_d = g.uniform(1e-3, 5e-2);
        const double r = g.uniform(0.05, 200.0);
        const double theta = g.uniform(0.0, kPi);
        s.rx = test::polar_point(s.array.origin, r, g.coin() ? theta : -theta);
        const double lambda = g.uniform(5e-3, 0.1);
        const int n = g.integer(1, n_el);
        if ((s.rx - test::oracle_element(s, n)).norm() < 1e-6)
            continue;

        const double exact = kTwoPi * (test::oracle_distance(s, n, s.rx) - test::oracle_distance(s, 1, s.rx)) / lambda;
        EXPECT_NEAR(near_field_phase(phase_model_input(s, n, s.rx, lambda)), exact, 1e-9)
            << "trial " << trial << " n=" << n << " r=" << r;
    }
}

TEST(FarFieldPhase, Examples)
{
    EXPECT_EQ(far_field_phase(1, 0.01, 0.02, 0.3), 0.0);
    for (int n = 1; n < 10; ++n)
        EXPECT_NEAR(far_field_phase(n, 0.01, 0.02, kPi / 2), 0.0, 1e-14);
    EXPECT_NEAR(far_field_phase(3, 0.01, 0.02, deg2rad(60)), kPi, 1e-14);
    EXPECT_DOUBLE_EQ(signed_far_field_phase(3, 0.01, 0.02, deg2rad(60)), -far_field_phase(3, 0.01, 0.02, deg2rad(60)));
}

TEST(FarFieldPhase, IsTheLimitOfTheSphericalModel)
{
    const Scene lab = load_preset("los_lab");
    const double lambda = lab.sweep.center_wavelength();
    const double theta1 = true_geometry(lab, 1, lab.rx).angle;
    const Vec3 e1 = element_position(lab, 1);
    const Vec3 dir = (lab.rx - e1).normalized();
    const double rayleigh = rayleigh_distance(lab.array.aperture(), lambda);
    double prev = std::numeric_limits<double>::infinity();
    for (double k : {1.0, 10.0, 100.0, 1000.0})
    {
        const Vec3 rx = e1 + k * rayleigh * dir;
        double worst = 0.0;
        for (int n = 1; n <= lab.array.n_elements; ++n)
            worst = std::max(worst, std::abs(near_field_phase(phase_model_input(lab, n, rx, lambda)) -
                                             signed_far_field_phase(n, lab.array.spacing_d, lambda, theta1)));
        EXPECT_LT(worst, prev);
        prev = worst;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(Rayleigh, Examples)
{
    EXPECT_EQ(rayleigh_distance(0.0, 0.025), 0.0);
    EXPECT_NEAR(rayleigh_distance(1.0, 0.025), 80.0, 1e-12);
    const Scene lab = load_preset("los_lab");
    EXPECT_NEAR(lab.array.aperture(), 63.0 * 0.5 * kSpeedOfLight / 13e9, 1e-12);
    EXPECT_NEAR(lab.array.aperture(), 0.7267, 1e-3);
    EXPECT_NEAR(rayleigh_distance(lab.array.aperture(), lab.sweep.center_wavelength()), 45.8, 0.1);
    EXPECT_THROW(rayleigh_distance(-1.0, 0.02), std::invalid_argument);
}

TEST(ExactPhaseOracle, Examples)
{
    Scene s = test::free_space(2, Vec3::Zero());
    s.rx = s.array.origin + Vec3(0.5 * s.array.spacing_d, 4.0, 0.0);
    EXPECT_EQ(exact_phase_oracle(s, 1, s.rx, 13e9), 0.0);
    EXPECT_NEAR(exact_phase_oracle(s, 2, s.rx, 13e9), 0.0, 1e-12);

    Gen g(5);
    for (int trial = 0; trial < 200; ++trial)
    {
        Scene t = test::free_space(32, test::polar_point(Vec3(0, 0, 2.5), g.uniform(0.5, 50), g.uniform(0.01, 3.13)));
        const int n = g.integer(1, 32);
        const double f = g.uniform(11e9, 15e9);
        EXPECT_NEAR(exact_phase_oracle(t, n, t.rx, f),
                    near_field_phase(phase_model_input(t, n, t.rx, kSpeedOfLight / f)), 1e-9);
    }
}
