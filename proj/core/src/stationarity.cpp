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

#include "nearfield/stationarity.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nearfield
{
    namespace
    {
        constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

        StationaryPartition single_interval(int n_elements, Criterion criterion, std::string warning)
        {
            StationaryPartition p;
            p.intervals = {{1, std::max(n_elements, 1)}};
            p.criterion = criterion;
            p.warning = !warning.empty();
            p.warning_text = std::move(warning);
            return p;
        }

        bool is_zero(const Eigen::MatrixXcd &r) { return r.norm() == 0.0; }

        // D with the degenerate cases folded in: two silent windows are alike, one silent window is not.
        double scan_distance(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b)
        {
            const bool za = is_zero(a), zb = is_zero(b);
            if (za && zb)
                return 0.0;
            if (za || zb)
                return 1.0;
            return cmd(a, b);
        }

        std::vector<double> parameter_series(const ChannelStats &stats, SlopeParameter parameter)
        {
            std::vector<double> s;
            switch (parameter)
            {
            case SlopeParameter::power:
                s = stats.power_db;
                break;
            case SlopeParameter::delay_spread:
                s = stats.delay_spread;
                for (auto &v : s)
                    v *= 1e9;
                break;
            case SlopeParameter::aod:
                s = stats.aod;
                for (std::size_t i = 0; i < s.size(); ++i)
                    s[i] = i < stats.aod_valid.size() && !stats.aod_valid[i] ? kNaN : rad2deg(s[i]);
                break;
            }
            return s;
        }

        // NaN entries take the value of the nearest finite neighbour (left wins ties).
        bool fill_gaps(std::vector<double> &s)
        {
            std::vector<int> finite;
            for (int i = 0; i < int(s.size()); ++i)
                if (std::isfinite(s[std::size_t(i)]))
                    finite.push_back(i);
            if (finite.empty())
                return false;
            for (int i = 0; i < int(s.size()); ++i)
            {
                if (std::isfinite(s[std::size_t(i)]))
                    continue;
                const auto it = std::lower_bound(finite.begin(), finite.end(), i);
                int best = it == finite.end() ? finite.back() : *it;
                if (it != finite.begin() && (it == finite.end() || i - *(it - 1) <= *it - i))
                    best = *(it - 1);
                s[std::size_t(i)] = s[std::size_t(best)];
            }
            return true;
        }

        // Boundaries are first elements of new intervals; drop those that would leave a piece shorter than min_si.
        std::vector<std::size_t> admissible(const std::vector<int> &candidates, int n_elements, int min_si)
        {
            std::vector<std::size_t> keep;
            int prev = 1;
            for (std::size_t i = 0; i < candidates.size(); ++i)
            {
                const int b = candidates[i];
                if (b - prev >= min_si && n_elements + 1 - b >= min_si)
                {
                    keep.push_back(i);
                    prev = b;
                }
            }
            return keep;
        }
    } // namespace

    CorrelationMatrix correlation_matrix(const Cfr &cfr, ElementRange window)
    {
        if (window.start < 1 || window.end > cfr.n_elements() || window.size() < 1)
            throw std::out_of_range(
                fmt::format("correlation window [{}, {}] outside 1..{}", window.start, window.end, cfr.n_elements()));
        const auto block = cfr.values.block(window.start - 1, 0, window.size(), cfr.n_points());
        CorrelationMatrix c;
        c.window = window;
        c.R = (block * block.adjoint()) / double(cfr.n_points());
        return c;
    }

    double cmd(const Eigen::MatrixXcd &r1, const Eigen::MatrixXcd &r2)
    {
        if (r1.rows() != r2.rows() || r1.cols() != r2.cols())
            throw std::invalid_argument("cmd: matrix sizes differ");
        const double n1 = r1.norm(), n2 = r2.norm();
        if (n1 == 0.0 || n2 == 0.0)
            throw std::invalid_argument("cmd: zero correlation matrix");
        const double tr = (r1 * r2).trace().real();
        return std::clamp(1.0 - tr / (n1 * n2), 0.0, 1.0);
    }

    double cmd(const CorrelationMatrix &r1, const CorrelationMatrix &r2) { return cmd(r1.R, r2.R); }

    Eigen::MatrixXd pearson_profiles(const Cfr &cfr)
    {
        if (cfr.n_points() < 2)
            throw std::invalid_argument("pearson_profiles: need at least two frequency points");
        Eigen::MatrixXd mag = cfr.values.cwiseAbs();
        const Eigen::VectorXd mean = mag.rowwise().mean();
        mag.colwise() -= mean;
        const Eigen::VectorXd norm = mag.rowwise().norm();
        const Eigen::MatrixXd cov = mag * mag.transpose();

        const int n = cfr.n_elements();
        Eigen::MatrixXd rho(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
            {
                const double denom = norm(i) * norm(j);
                rho(i, j) = denom > 0.0 ? std::clamp(cov(i, j) / denom, -1.0, 1.0) : kNaN;
            }
        return rho;
    }

    const char *to_string(Criterion criterion)
    {
        switch (criterion)
        {
        case Criterion::cmd:
            return "cmd";
        case Criterion::slope:
            return "slope";
        case Criterion::uniform_power:
            return "uniform-power";
        }
        return "?";
    }

    std::vector<int> StationaryPartition::boundaries() const
    {
        std::vector<int> b;
        for (std::size_t i = 1; i < intervals.size(); ++i)
            b.push_back(intervals[i].start);
        return b;
    }

    bool is_legal(const StationaryPartition &partition, int n_elements, int min_si)
    {
        if (partition.intervals.empty())
            return false;
        int next = 1;
        for (const auto &iv : partition.intervals)
        {
            if (iv.start != next || iv.end < iv.start)
                return false;
            if (iv.size() < min_si && partition.intervals.size() > 1)
                return false;
            next = iv.end + 1;
        }
        return next == n_elements + 1;
    }

    StationaryPartition uniform_partition(int n_elements, int count)
    {
        if (n_elements < 1 || count < 1 || count > n_elements)
            throw std::invalid_argument("uniform_partition: need 1 <= count <= n_elements");
        StationaryPartition p;
        p.criterion = Criterion::uniform_power;
        const int base = n_elements / count, extra = n_elements % count;
        int start = 1;
        for (int i = 0; i < count; ++i)
        {
            const int len = base + (i < extra ? 1 : 0);
            p.intervals.push_back({start, start + len - 1});
            if (i > 0)
            {
                p.boundary_scores.push_back(kNaN);
                p.boundary_criteria.push_back(Criterion::uniform_power);
            }
            start += len;
        }
        return p;
    }

    StationaryPartition partition_by_cmd(const Cfr &cfr, const CmdConfig &config)
    {
        const int m = config.window;
        if (m < 2)
            throw std::invalid_argument("partition_by_cmd: window must be >= 2");
        if (!(config.threshold > 0.0 && config.threshold < 1.0))
            throw std::invalid_argument("partition_by_cmd: threshold must lie in (0, 1)");
        const int n = cfr.n_elements();
        const int min_si = config.effective_min_si();

        auto tag = [&](StationaryPartition p) {
            p.thresholds = {{"window", double(m)}, {"threshold", config.threshold}, {"min_si", double(min_si)}};
            return p;
        };

        if (n < 2 * m)
            return tag(single_interval(n, Criterion::cmd, fmt::format("array shorter than 2m = {}", 2 * m)));
        if (cfr.values.norm() == 0.0)
            return tag(single_interval(n, Criterion::cmd, "all-zero response"));

        // windows[i] starts at element i + 1
        std::vector<Eigen::MatrixXcd> windows(static_cast<std::size_t>(n - m + 1));
        for (int s = 1; s + m - 1 <= n; ++s)
            windows[std::size_t(s - 1)] = correlation_matrix(cfr, {s, s + m - 1}).R;

        StationaryPartition p;
        p.criterion = Criterion::cmd;
        int cur = 1;
        while (true)
        {
            const auto &ref = windows[std::size_t(cur - 1)];
            int next = 0;
            double score = 0.0;
            for (int s = cur + 1; s + m - 1 <= n; ++s)
            {
                const double d = scan_distance(ref, windows[std::size_t(s - 1)]);
                if (d > config.threshold)
                {
                    next = std::max(s + m - 1, cur + min_si);
                    score = d;
                    break;
                }
            }
            // no crossing, or the remainder would be too short to stand alone
            if (next == 0 || n + 1 - next < min_si)
                break;
            p.intervals.push_back({cur, next - 1});
            p.boundary_scores.push_back(score);
            p.boundary_criteria.push_back(Criterion::cmd);
            cur = next;
            if (cur + m - 1 > n)
                break;
        }
        p.intervals.push_back({cur, n});
        return tag(std::move(p));
    }

    Eigen::MatrixXd cmd_map(const Cfr &cfr, int window)
    {
        if (window < 1 || window > cfr.n_elements())
            throw std::invalid_argument("cmd_map: window must lie in 1..n_elements");
        const int k = cfr.n_elements() - window + 1;
        std::vector<Eigen::MatrixXcd> r(static_cast<std::size_t>(k));
        for (int s = 1; s <= k; ++s)
            r[std::size_t(s - 1)] = correlation_matrix(cfr, {s, s + window - 1}).R;

        Eigen::MatrixXd map(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j)
            {
                const auto &a = r[std::size_t(i)];
                const auto &b = r[std::size_t(j)];
                map(i, j) = map(j, i) = is_zero(a) || is_zero(b) ? kNaN : cmd(a, b);
            }
        return map;
    }

    std::vector<double> characteristic_slope(std::span<const double> s, int w)
    {
        const int n = int(s.size());
        if (n < 2)
            throw std::invalid_argument("characteristic_slope: need at least two samples");
        if (w < 1 || w % 2 == 0)
            throw std::invalid_argument("characteristic_slope: smoothing width must be odd and positive");

        const int h = w / 2;
        std::vector<double> smooth(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
        {
            const int r = std::min({h, i, n - 1 - i}); // symmetric window, shrinks at the ends
            double sum = 0.0;
            for (int j = i - r; j <= i + r; ++j)
                sum += s[std::size_t(j)];
            smooth[std::size_t(i)] = sum / double(2 * r + 1);
        }

        std::vector<double> k(static_cast<std::size_t>(n));
        k[0] = smooth[1] - smooth[0];
        k[std::size_t(n - 1)] = smooth[std::size_t(n - 1)] - smooth[std::size_t(n - 2)];
        for (int i = 1; i + 1 < n; ++i)
            k[std::size_t(i)] = 0.5 * (smooth[std::size_t(i + 1)] - smooth[std::size_t(i - 1)]);
        return k;
    }

    const char *to_string(SlopeParameter parameter)
    {
        switch (parameter)
        {
        case SlopeParameter::power:
            return "power_db";
        case SlopeParameter::delay_spread:
            return "ds_ns";
        case SlopeParameter::aod:
            return "aod_deg";
        }
        return "?";
    }

    double SlopeConfig::effective_threshold() const noexcept
    {
        if (k_threshold > 0.0)
            return k_threshold;
        switch (parameter)
        {
        case SlopeParameter::power:
            return 0.5;
        case SlopeParameter::delay_spread:
            return 0.5;
        case SlopeParameter::aod:
            return 1.0;
        }
        return 0.5;
    }

    StationaryPartition enforce_uniform_power(const StationaryPartition &partition, std::span<const double> power_db,
                                              double gamma_db, int min_si)
    {
        StationaryPartition out = partition;
        out.intervals.clear();
        out.boundary_scores.clear();
        out.boundary_criteria.clear();

        auto add = [&](ElementRange iv, double score, Criterion why) {
            if (!out.intervals.empty())
            {
                out.boundary_scores.push_back(score);
                out.boundary_criteria.push_back(why);
            }
            out.intervals.push_back(iv);
        };

        for (std::size_t i = 0; i < partition.intervals.size(); ++i)
        {
            const double score = i == 0 ? kNaN : partition.boundary_scores[i - 1];
            const Criterion why = i == 0 ? partition.criterion : partition.boundary_criteria[i - 1];
            auto [start, end] = partition.intervals[i];
            bool first = true;
            while (true)
            {
                double lo = power_db[std::size_t(start - 1)], hi = lo;
                int breach = 0;
                for (int e = start + 1; e <= end; ++e)
                {
                    const double p = power_db[std::size_t(e - 1)];
                    if (!std::isfinite(p))
                        continue;
                    lo = std::min(lo, p);
                    hi = std::max(hi, p);
                    if (hi - lo > gamma_db)
                    {
                        breach = e;
                        break;
                    }
                }
                if (breach != 0)
                    breach = std::max(breach, start + min_si);
                if (breach == 0 || end + 1 - breach < min_si)
                {
                    add({start, end}, first ? score : gamma_db, first ? why : Criterion::uniform_power);
                    break;
                }
                add({start, breach - 1}, first ? score : gamma_db, first ? why : Criterion::uniform_power);
                first = false;
                start = breach;
            }
        }
        out.thresholds.emplace_back("gamma_db", gamma_db);
        return out;
    }

    StationaryPartition partition_by_slope(const ChannelStats &stats, const SlopeConfig &config)
    {
        const int n = stats.n_elements();
        const double thr = config.effective_threshold();
        auto tag = [&](StationaryPartition p) {
            p.thresholds.insert(p.thresholds.begin(), {{fmt::format("k_threshold_{}", to_string(config.parameter)), thr},
                                                       {"smoothing", double(config.smoothing)},
                                                       {"min_si", double(config.min_si)}});
            return p;
        };

        auto series = parameter_series(stats, config.parameter);
        if (n < 3 || !fill_gaps(series))
        {
            auto p = single_interval(n, Criterion::slope, n < 3 ? "fewer than three elements" : "parameter undefined");
            p.thresholds.emplace_back("gamma_db", config.gamma_db);
            return tag(std::move(p));
        }

        const auto k = characteristic_slope(series, config.smoothing);
        std::vector<int> candidates;
        std::vector<double> scores;
        for (int i = 0; i < n;)
        {
            if (std::abs(k[std::size_t(i)]) <= thr)
            {
                ++i;
                continue;
            }
            int j = i;
            double peak = 0.0;
            while (j < n && std::abs(k[std::size_t(j)]) > thr)
                peak = std::max(peak, std::abs(k[std::size_t(j++)]));
            // run covers elements i+1 .. j (1-based)
            if (j - i >= 2)
            {
                candidates.push_back((i + 1 + j + 1) / 2);
                scores.push_back(peak);
            }
            i = j;
        }

        StationaryPartition p;
        p.criterion = Criterion::slope;
        int start = 1;
        for (std::size_t idx : admissible(candidates, n, config.min_si))
        {
            p.intervals.push_back({start, candidates[idx] - 1});
            p.boundary_scores.push_back(scores[idx]);
            p.boundary_criteria.push_back(Criterion::slope);
            start = candidates[idx];
        }
        p.intervals.push_back({start, n});

        auto power = stats.power_db;
        fill_gaps(power);
        return tag(enforce_uniform_power(p, power, config.gamma_db, config.min_si));
    }

    void write_partition_csv(std::ostream &out, std::span<const StationaryPartition> partitions)
    {
        out << "interval_index,start,end,criterion,boundary_score\n";
        for (const auto &p : partitions)
            for (std::size_t i = 0; i < p.intervals.size(); ++i)
            {
                const double score = i == 0 ? kNaN : p.boundary_scores[i - 1];
                out << fmt::format("{},{},{},{},{}\n", i + 1, p.intervals[i].start, p.intervals[i].end,
                                   to_string(p.criterion),
                                   std::isfinite(score) ? fmt::format("{:.10g}", score) : std::string());
            }
    }

    void write_cmd_map_csv(std::ostream &out, const Eigen::MatrixXd &map)
    {
        out << "i,j,D\n";
        for (int i = 0; i < map.rows(); ++i)
            for (int j = 0; j < map.cols(); ++j)
            {
                const double d = map(i, j);
                out << fmt::format("{},{},{}\n", i + 1, j + 1, std::isfinite(d) ? fmt::format("{:.10g}", d) : "nan");
            }
    }

} // namespace nearfield
