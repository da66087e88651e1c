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


#ifndef NEARFIELD_TEST_SUPPORT_HPP
#define NEARFIELD_TEST_SUPPORT_HPP

#include "nearfield/mwmodel.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace nearfield::test
{
    /// Seeded generator for hand-rolled property tests.
    class Gen
    {
    public:
        explicit Gen(std::uint64_t seed) : eng_(seed) {}

        double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
        int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
        double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
        cdouble complex_normal() { return {normal(), normal()}; }
        bool coin() { return integer(0, 1) == 1; }
        std::mt19937_64 &engine() { return eng_; }

    private:
        std::mt19937_64 eng_;
    };

    inline double half_wavelength_13ghz() { return 0.5 * kSpeedOfLight / 13.0e9; }

    /// Empty room: array along +x at the origin height, Rx at `rx`.
    inline Scene free_space(int n_elements, const Vec3 &rx, int n_points = 801)
    {
        Scene s;
        s.array.n_elements = n_elements;
        s.array.origin = Vec3(0.0, 0.0, 2.5);
        s.rx = rx;
        s.sweep.n_points = n_points;
        return s;
    }

    /// Point at distance r and angle theta (from +x) in the horizontal plane through `from`.
    inline Vec3 polar_point(const Vec3 &from, double r, double theta)
    {
        return from + r * Vec3(std::cos(theta), std::sin(theta), 0.0);
    }

    // Independent geometry: positions written out from the array definition, no library calls.
    inline Vec3 oracle_element(const Scene &s, int n)
    {
        return s.array.origin + double(n - 1) * s.array.spacing_d * s.array.axis;
    }

    inline double oracle_distance(const Scene &s, int n, const Vec3 &target)
    {
        const Vec3 v = target - oracle_element(s, n);
        return std::sqrt(v.x() * v.x() + v.y() * v.y() + v.z() * v.z());
    }

    /// Reference DFT by direct summation, unitary: x_m = N^-1/2 sum_k X_k exp(+j 2 pi k m / N).
    inline std::vector<cdouble> oracle_idft(const std::vector<cdouble> &X)
    {
        const std::size_t N = X.size();
        std::vector<cdouble> x(N);
        for (std::size_t m = 0; m < N; ++m)
        {
            cdouble acc = 0.0;
            for (std::size_t k = 0; k < N; ++k)
                acc += X[k] * std::polar(1.0, 2.0 * kPi * double((k * m) % N) / double(N));
            x[m] = acc / std::sqrt(double(N));
        }
        return x;
    }

    /// Random Hermitian positive semidefinite matrix of rank <= `rank`.
    inline Eigen::MatrixXcd random_psd(Gen &g, int m, int rank)
    {
        Eigen::MatrixXcd a(m, rank);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < rank; ++j)
                a(i, j) = g.complex_normal();
        return a * a.adjoint();
    }

    /// Sum of delayed taps: H_k = sum_i a_i exp(-j 2 pi f_k tau_i).
    inline std::vector<cdouble> taps_response(const Sweep &sw, const std::vector<std::pair<double, cdouble>> &taps)
    {
        std::vector<cdouble> h(std::size_t(sw.n_points), 0.0);
        for (int k = 0; k < sw.n_points; ++k)
            for (const auto &[tau, a] : taps)
                h[std::size_t(k)] += a * std::polar(1.0, -kTwoPi * sw.frequency(k) * tau);
        return h;
    }

    /// One half of the two-scene splice: free-space LOS toward `angle_deg` from the axis at a random
    /// 3..8 m range, three random point scatterers, noise at `floor_dbm`.
    inline Scene splice_half(Gen &g, double angle_deg, int n_elements, std::uint64_t seed, double floor_dbm)
    {
        Scene s;
        s.array.n_elements = n_elements;
        s.array.spacing_d = 0.5 * s.sweep.center_wavelength();
        const double r = g.uniform(3.0, 8.0);
        s.rx = polar_point(s.array.origin, r, deg2rad(angle_deg));
        for (int i = 0; i < 3; ++i)
        {
            PointScatterer p;
            p.position = Vec3(4.0 * g.uniform(-1, 1), 4.0 * g.uniform(-1, 1), 2.5 + g.uniform(-1, 1));
            p.amplitude = g.uniform(0.05, 0.3);
            s.scatterers.push_back(p);
        }
        s.noise_floor_dbm = floor_dbm;
        s.seed = seed;
        return s;
    }

    /// Two 32-element halves seeing the Rx at 30 and 150 degrees, stacked; the splice is at element 33.
    inline Cfr splice_trial(int trial, double floor_dbm = -80.0)
    {
        Gen g(1000 + std::uint64_t(trial));
        const Scene a = splice_half(g, 30.0, 32, 2 * std::uint64_t(trial) + 1, floor_dbm);
        const Scene b = splice_half(g, 150.0, 32, 2 * std::uint64_t(trial) + 2, floor_dbm);
        return concat_elements(synthesize_cfr(a), synthesize_cfr(b));
    }

} // namespace nearfield::test

#endif
