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

#include "nearfield/mwmodel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nearfield
{
    namespace
    {
        void require_legal(const StationaryPartition &partition, int n_elements)
        {
            if (!is_legal(partition, n_elements))
                throw std::invalid_argument("build_mw_model: partition is not a legal cover of the array");
        }

        bool los_blocked(const Scene &scene, int n)
        {
            const Vec3 e = element_position(scene, n);
            for (const auto &b : scene.blockers)
                if (occludes(b, e, scene.rx, scene.sweep.center_wavelength()).blocked)
                    return true;
            return false;
        }

        // Nearest element to `ref` inside the interval whose LOS is clear; ties go to the lower index.
        int nearest_clear(const Scene &scene, ElementRange iv, int ref)
        {
            for (int off = 0; off < iv.size(); ++off)
                for (int n : {ref - off, ref + off})
                    if (iv.contains(n) && !los_blocked(scene, n))
                        return n;
            return ref;
        }
    } // namespace

    std::vector<PlanarPatch> build_mw_model(const Scene &scene, const StationaryPartition &partition)
    {
        require_legal(partition, scene.array.n_elements);
        std::vector<PlanarPatch> patches;
        for (const auto &iv : partition.intervals)
        {
            PlanarPatch p;
            p.interval = iv;
            const int nominal = (iv.start + iv.end) / 2;
            p.ref_element = nearest_clear(scene, iv, nominal);
            p.flagged = p.ref_element != nominal || los_blocked(scene, nominal);

            const auto geo = true_geometry(scene, p.ref_element, scene.rx);
            p.theta = geo.angle;
            p.r_ref = geo.distance;
            const auto los = enumerate_paths(scene, p.ref_element).front();
            p.gain_ref.resize(std::size_t(scene.sweep.n_points));
            for (int k = 0; k < scene.sweep.n_points; ++k)
                p.gain_ref[std::size_t(k)] = los.response(scene.sweep.frequency(k));
            patches.push_back(std::move(p));
        }
        return patches;
    }

    std::vector<PlanarPatch> build_mw_model(const Cfr &cfr, double spacing, const StationaryPartition &partition,
                                            const AnalysisConfig &config)
    {
        require_legal(partition, cfr.n_elements());
        const auto aod = estimate_aod(cfr, spacing, config);
        const double bw = delay_bin_width(cfr.sweep);
        std::vector<PlanarPatch> patches;
        for (const auto &iv : partition.intervals)
        {
            PlanarPatch p;
            p.interval = iv;
            const int nominal = (iv.start + iv.end) / 2;
            p.ref_element = nominal;
            for (int off = 0; off < iv.size(); ++off)
            {
                const int lo = nominal - off, hi = nominal + off;
                if (iv.contains(lo) && aod.valid[std::size_t(lo - 1)])
                {
                    p.ref_element = lo;
                    break;
                }
                if (iv.contains(hi) && aod.valid[std::size_t(hi - 1)])
                {
                    p.ref_element = hi;
                    break;
                }
            }
            p.flagged = p.ref_element != nominal || !aod.valid[std::size_t(nominal - 1)];
            const double theta = aod.angle[std::size_t(p.ref_element - 1)];
            p.theta = std::isfinite(theta) ? theta : 0.5 * kPi;
            const auto pdp = compute_pdp(cfr, p.ref_element, config.pdp_window);
            const auto peak = std::max_element(pdp.powers.begin(), pdp.powers.end()) - pdp.powers.begin();
            p.r_ref = double(peak) * bw * kSpeedOfLight;
            p.gain_ref = cfr.row(p.ref_element);
            patches.push_back(std::move(p));
        }
        return patches;
    }

    Cfr synthesize_mw_cfr(std::span<const PlanarPatch> patches, int n_elements, double spacing, const Sweep &sweep)
    {
        Cfr out{Eigen::MatrixXcd::Zero(n_elements, sweep.n_points), sweep};
        for (const auto &p : patches)
        {
            if (int(p.gain_ref.size()) != sweep.n_points)
                throw std::invalid_argument("synthesize_mw_cfr: patch gain does not match the sweep");
            const double c = std::cos(p.theta);
            for (int n = p.interval.start; n <= p.interval.end; ++n)
            {
                if (n < 1 || n > n_elements)
                    throw std::out_of_range("synthesize_mw_cfr: patch outside the array");
                const double advance = double(n - p.ref_element) * spacing * c; // m, path shortening
                for (int k = 0; k < sweep.n_points; ++k)
                {
                    const double phase = kTwoPi * sweep.frequency(k) * advance / kSpeedOfLight;
                    out.values(n - 1, k) = n == p.ref_element ? p.gain_ref[std::size_t(k)]
                                                              : p.gain_ref[std::size_t(k)] * std::polar(1.0, phase);
                }
            }
        }
        return out;
    }

    Cfr synthesize_mw_cfr(std::span<const PlanarPatch> patches, const Scene &scene)
    {
        return synthesize_mw_cfr(patches, scene.array.n_elements, scene.array.spacing_d, scene.sweep);
    }

    MwError mw_error(const Cfr &truth, const Cfr &approx)
    {
        if (truth.n_elements() != approx.n_elements() || truth.n_points() != approx.n_points())
            throw std::invalid_argument("mw_error: dimension mismatch");
        MwError e;
        e.element_deviation.assign(std::size_t(truth.n_elements()), 0.0);
        double sq = 0.0;
        long long count = 0;
        for (int n = 0; n < truth.n_elements(); ++n)
        {
            double row_sq = 0.0;
            int row_count = 0;
            for (int k = 0; k < truth.n_points(); ++k)
            {
                const cdouble t = truth.values(n, k), a = approx.values(n, k);
                if (t == 0.0 || a == 0.0)
                    continue;
                const double d = std::arg(a * std::conj(t)); // wrapped to (-pi, pi]
                row_sq += d * d;
                ++row_count;
            }
            sq += row_sq;
            count += row_count;
            e.element_deviation[std::size_t(n)] = row_count ? std::sqrt(row_sq / row_count) : 0.0;
        }
        e.phase_rmse = count ? std::sqrt(sq / double(count)) : 0.0;

        const double na = approx.values.norm(), nt = truth.values.norm();
        const cdouble inner = (approx.values.conjugate().cwiseProduct(truth.values)).sum();
        e.correlation = na > 0.0 && nt > 0.0 ? std::abs(inner) / (na * nt) : 0.0;
        return e;
    }

    StationaryPartition dyadic_partition(int n_elements, int k)
    {
        if (k < 0 || k > 30)
            throw std::invalid_argument("dyadic_partition: k out of range");
        return uniform_partition(n_elements, 1 << k);
    }

    void write_mw_error_csv(std::ostream &out, std::span<const MwErrorRow> rows)
    {
        out << "k_or_partition_id,n_intervals,phase_rmse_rad,correlation\n";
        for (const auto &r : rows)
            out << fmt::format("{},{},{:.10g},{:.12g}\n", r.id, r.n_intervals, r.phase_rmse, r.correlation);
    }

} // namespace nearfield
