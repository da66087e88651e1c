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

#ifndef NEARFIELD_STATIONARITY_HPP
#define NEARFIELD_STATIONARITY_HPP

#include "nearfield/analysis.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nearfield
{
    /// Spatial correlation of the element responses inside one window, averaged over frequency.
    struct CorrelationMatrix
    {
        Eigen::MatrixXcd R;
        ElementRange window;

        int m() const noexcept { return int(R.rows()); }
    };

    CorrelationMatrix correlation_matrix(const Cfr &cfr, ElementRange window);

    /// 1 - Re tr(R1 R2) / (|R1|_F |R2|_F), clamped to [0, 1].
    /// Throws std::invalid_argument on size mismatch or an all-zero matrix.
    double cmd(const Eigen::MatrixXcd &r1, const Eigen::MatrixXcd &r2);
    double cmd(const CorrelationMatrix &r1, const CorrelationMatrix &r2);

    /// Pearson correlation of per-frequency magnitude profiles for every element pair.
    /// Entries involving a constant-magnitude profile are NaN.
    Eigen::MatrixXd pearson_profiles(const Cfr &cfr);

    enum class Criterion
    {
        cmd,
        slope,
        uniform_power
    };

    const char *to_string(Criterion criterion);

    struct StationaryPartition
    {
        std::vector<ElementRange> intervals;
        Criterion criterion = Criterion::cmd;
        std::vector<std::pair<std::string, double>> thresholds; // name, value
        std::vector<double> boundary_scores;                    // one per interval after the first
        std::vector<Criterion> boundary_criteria;               // what produced each boundary
        bool warning = false;
        std::string warning_text;

        int n_intervals() const noexcept { return int(intervals.size()); }
        /// First element of every interval but the first.
        std::vector<int> boundaries() const;
    };

    /// Disjoint, contiguous, covering 1..n_elements and every interval at least `min_si` long.
    bool is_legal(const StationaryPartition &partition, int n_elements, int min_si = 1);

    /// Contiguous equal-size intervals; the last `n_elements % count` elements are spread over the first intervals.
    StationaryPartition uniform_partition(int n_elements, int count);

    struct CmdConfig
    {
        int window = 4;         // m
        double threshold = 0.2; // tau
        int min_si = 0;         // 0 means "same as window"

        int effective_min_si() const noexcept { return min_si > 0 ? min_si : window; }
    };

    /// Greedy reference-anchored scan. The reference window is the first m elements of the current
    /// interval; a test window slides one element at a time. When a test window starting at s first
    /// exceeds tau, the next interval starts at that window's last element s + m - 1, no earlier
    /// than min_si past the current start. A trailing piece shorter than min_si stays in the last interval.
    StationaryPartition partition_by_cmd(const Cfr &cfr, const CmdConfig &config = {});

    /// D between every pair of m-element windows starting at elements i and j (1-based, row i-1, column j-1).
    /// NaN where either window carries no energy.
    Eigen::MatrixXd cmd_map(const Cfr &cfr, int window = 4);

    /// Centered moving average of odd width w (shrinking at the ends), then the centered difference,
    /// one-sided at the first and last element.
    std::vector<double> characteristic_slope(std::span<const double> s, int w = 5);

    enum class SlopeParameter
    {
        power,        // dB
        delay_spread, // ns
        aod           // degrees
    };

    const char *to_string(SlopeParameter parameter);

    struct SlopeConfig
    {
        SlopeParameter parameter = SlopeParameter::power;
        double k_threshold = 0.0; // per element, in the parameter's unit; 0 selects the default
        int smoothing = 5;
        double gamma_db = 3.0;
        int min_si = 4;

        double effective_threshold() const noexcept;
    };

    /// Boundaries at the middle of every run of >= 2 consecutive elements with |k| above threshold,
    /// then every interval whose power spread exceeds gamma is split where the running spread first does.
    StationaryPartition partition_by_slope(const ChannelStats &stats, const SlopeConfig &config = {});

    /// Uniform-power check alone on an existing partition.
    StationaryPartition enforce_uniform_power(const StationaryPartition &partition, std::span<const double> power_db,
                                              double gamma_db, int min_si);

    // partition.csv: interval_index,start,end,criterion,boundary_score
    void write_partition_csv(std::ostream &out, std::span<const StationaryPartition> partitions);
    // cmd_map.csv: i,j,D
    void write_cmd_map_csv(std::ostream &out, const Eigen::MatrixXd &map);

} // namespace nearfield

#endif
