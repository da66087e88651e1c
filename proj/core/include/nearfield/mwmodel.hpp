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

#ifndef NEARFIELD_MWMODEL_HPP
#define NEARFIELD_MWMODEL_HPP

#include "nearfield/stationarity.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nearfield
{
    /// One planar wavefront standing in for the spherical one over an interval.
    struct PlanarPatch
    {
        ElementRange interval;
        int ref_element = 1;
        double theta = 0.5 * kPi; // rad from the array axis
        double r_ref = 0.0;       // m
        std::vector<cdouble> gain_ref; // LOS response of the reference element per sweep point
        bool flagged = false;          // nominal reference was blocked; parameters come from another element
    };

    /// Scene mode: angle and distance from the true geometry at the reference, gain from the LOS path.
    std::vector<PlanarPatch> build_mw_model(const Scene &scene, const StationaryPartition &partition);

    /// Data mode: angle from the estimated AoD at the reference, gain from the observed response there.
    std::vector<PlanarPatch> build_mw_model(const Cfr &cfr, double spacing, const StationaryPartition &partition,
                                            const AnalysisConfig &config = {});

    /// H(n, f) = gain_ref(f) exp(+j 2 pi f / c (n - ref) d cos theta) inside each patch.
    Cfr synthesize_mw_cfr(std::span<const PlanarPatch> patches, const Scene &scene);
    Cfr synthesize_mw_cfr(std::span<const PlanarPatch> patches, int n_elements, double spacing, const Sweep &sweep);

    struct MwError
    {
        double phase_rmse = 0.0;                // rad, over all entries, wrapped differences
        double correlation = 1.0;               // |<approx, truth>| / (|approx| |truth|)
        std::vector<double> element_deviation;  // rad, per-element RMS of the wrapped difference
    };

    /// Entries where either response is exactly zero are left out of the phase statistics.
    MwError mw_error(const Cfr &truth, const Cfr &approx);

    /// 2^k equal intervals.
    StationaryPartition dyadic_partition(int n_elements, int k);

    struct MwErrorRow
    {
        std::string id;
        int n_intervals = 0;
        double phase_rmse = 0.0;
        double correlation = 0.0;
    };

    // mw_error.csv: k_or_partition_id,n_intervals,phase_rmse_rad,correlation
    void write_mw_error_csv(std::ostream &out, std::span<const MwErrorRow> rows);

} // namespace nearfield

#endif
