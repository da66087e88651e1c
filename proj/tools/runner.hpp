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

#ifndef NEARFIELD_TOOLS_RUNNER_HPP
#define NEARFIELD_TOOLS_RUNNER_HPP

#include "nearfield/mwmodel.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nearfield::tools
{
    enum ExitCode : int
    {
        kOk = 0,
        kUnknownPreset = 2,
        kBadScenario = 3,
        kAnalysisFailed = 4,
    };

    class UnknownPresetError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Scenario file missing or unreadable.
    class ScenarioFileError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Paths contain '/' or '.', or name an existing file; anything else must be a preset.
    Scene resolve_scene(const std::string &path_or_preset);

    enum class CriterionChoice
    {
        cmd,
        slope,
        both
    };

    struct RunOptions
    {
        std::filesystem::path out_dir = "nearfield_out";
        std::optional<std::uint64_t> seed;
        std::optional<int> freq_points;
        std::optional<double> noise_floor_dbm;
        double cmd_threshold = 0.2;
        int window = 4;
        CriterionChoice criterion = CriterionChoice::both;
        SlopeParameter slope_parameter = SlopeParameter::power;
        bool binary = false;
        unsigned threads = 1;
    };

    struct Check
    {
        std::string name;
        bool passed = false;
        std::string detail;
    };

    struct RunReport
    {
        std::string scene_label;
        Scene scene;
        ChannelStats stats;
        std::vector<StationaryPartition> partitions;
        std::vector<MwErrorRow> mw_rows;
        std::vector<Check> checks;
        std::vector<std::filesystem::path> files;
        std::string text; // contents of report.txt
    };

    /// Applies the overrides in `options` to a scene (seed, sweep points, noise floor).
    Scene apply_overrides(Scene scene, const RunOptions &options);

    /// synth -> analysis -> stationarity -> mwmodel, writing every artifact into options.out_dir.
    RunReport run_pipeline(const std::string &path_or_preset, const RunOptions &options);

    struct PhaseCheckRow
    {
        int element = 1;
        double measured = 0.0;  // rad, phase lag relative to element 1
        double spherical = 0.0; // closed-form spherical model
        double planar = 0.0;    // signed far-field limit
    };

    struct PhaseCheckResult
    {
        double k = 1.0;
        double rx_distance = 0.0; // m from element 1
        double rayleigh = 0.0;    // m
        std::vector<PhaseCheckRow> rows;
        double corr_measured_spherical = 0.0; // Pearson; NaN if a column is constant
        double corr_measured_planar = 0.0;
        double corr_spherical_planar = 0.0;
        double max_abs_spherical_planar = 0.0;   // rad
        double max_abs_measured_spherical = 0.0; // rad
    };

    /// Moves the Rx along its direction from element 1 to k Rayleigh distances and compares the
    /// synthesized LOS phase with the spherical and far-field models. Requires k >= 1.
    PhaseCheckResult phase_check(const Scene &scene, double k);

    void write_phase_check_csv(std::ostream &out, const PhaseCheckResult &result);

    /// Pearson correlation of two equally long series; NaN when either is constant.
    double pearson(const std::vector<double> &a, const std::vector<double> &b);

} // namespace nearfield::tools

#endif
