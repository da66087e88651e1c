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


#include "runner.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nearfield;
using namespace nearfield::tools;

namespace
{
    std::filesystem::path scratch_dir(const std::string &name)
    {
        const auto dir = std::filesystem::temp_directory_path() / ("nearfield_runner_" + name);
        std::filesystem::remove_all(dir);
        return dir;
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }
} // namespace

TEST(ResolveScene, PresetsFilesAndErrors)
{
    EXPECT_EQ(resolve_scene("los_lab"), load_preset("los_lab"));
    EXPECT_THROW(resolve_scene("no_such_preset"), UnknownPresetError);
    EXPECT_THROW(resolve_scene("missing.toml"), ScenarioFileError);
    EXPECT_THROW(resolve_scene("/nonexistent/dir/scene.scn"), ScenarioFileError);

    const auto dir = scratch_dir("resolve");
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "bad.scn") << "[array]\nn_elements = many\n";
        std::ofstream(dir / "good.scn") << preset_text("olos_baffle");
    }
    EXPECT_THROW(resolve_scene((dir / "bad.scn").string()), ParseError);
    EXPECT_EQ(resolve_scene((dir / "good.scn").string()), load_preset("olos_baffle"));
    std::filesystem::remove_all(dir);
}

TEST(ApplyOverrides, SeedPointsNoise)
{
    RunOptions o;
    o.seed = 7;
    o.freq_points = 101;
    o.noise_floor_dbm = -95.0;
    const Scene s = apply_overrides(load_preset("los_lab"), o);
    EXPECT_EQ(s.seed, 7u);
    EXPECT_EQ(s.sweep.n_points, 101);
    EXPECT_EQ(s.noise_floor_dbm, -95.0);
    o.freq_points = 1;
    EXPECT_THROW(apply_overrides(load_preset("los_lab"), o), InvariantError);
}

TEST(RunPipeline, LosLabWritesEveryArtifact)
{
    RunOptions o;
    o.out_dir = scratch_dir("los");
    const auto r = run_pipeline("los_lab", o);
    for (const char *name : {"cfr.csv", "stats.csv", "pdp.csv", "partition.csv", "cmd_map.csv", "mw_error.csv", "report.txt"})
        EXPECT_TRUE(std::filesystem::exists(o.out_dir / name)) << name;
    for (const auto &f : r.files)
        EXPECT_TRUE(std::filesystem::exists(f));
    EXPECT_FALSE(std::filesystem::exists(o.out_dir / "cfr.bin"));
    for (const auto &c : r.checks)
        EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    ASSERT_EQ(r.partitions.size(), 2u);
    EXPECT_LE(r.partitions[0].n_intervals(), 2);
    EXPECT_NE(r.text.find("power spread <= 0.5 dB"), std::string::npos);
    EXPECT_EQ(slurp(o.out_dir / "report.txt"), r.text);
    // every knob in the report
    for (const char *knob : {"cmd threshold", "cmd window", "cmd min_si", "slope k_threshold", "uniform-power gamma",
                             "ds threshold", "los gate", "pdp window", "seed", "noise floor"})
        EXPECT_NE(r.text.find(knob), std::string::npos) << knob;
    std::filesystem::remove_all(o.out_dir);
}

TEST(RunPipeline, OlosBaffleReportsShadowAndBoundary)
{
    RunOptions o;
    o.out_dir = scratch_dir("olos");
    o.criterion = CriterionChoice::cmd;
    o.binary = true;
    const auto r = run_pipeline("olos_baffle", o);
    ASSERT_EQ(r.partitions.size(), 1u);
    const auto b = r.partitions[0].boundaries();
    EXPECT_TRUE(std::any_of(b.begin(), b.end(), [](int x) { return std::abs(x - 26) <= 2; }));
    for (const auto &c : r.checks)
        EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    EXPECT_NE(r.text.find("lose >= 10 dB"), std::string::npos);
    std::ifstream bin(o.out_dir / "cfr.bin", std::ios::binary);
    const Cfr h = read_cfr_binary(bin);
    EXPECT_EQ(h.n_elements(), 64);
    std::filesystem::remove_all(o.out_dir);
}

TEST(RunPipeline, SameSeedSameBytes)
{
    RunOptions a, b;
    a.seed = b.seed = 7;
    a.noise_floor_dbm = b.noise_floor_dbm = -90.0;
    a.freq_points = b.freq_points = 201;
    a.out_dir = scratch_dir("det_a");
    b.out_dir = scratch_dir("det_b");
    b.threads = 4;
    run_pipeline("olos_baffle", a);
    run_pipeline("olos_baffle", b);
    for (const char *name : {"cfr.csv", "stats.csv", "pdp.csv", "partition.csv", "cmd_map.csv", "mw_error.csv"})
        EXPECT_EQ(slurp(a.out_dir / name), slurp(b.out_dir / name)) << name;
    std::filesystem::remove_all(a.out_dir);
    std::filesystem::remove_all(b.out_dir);
}

TEST(PhaseCheck, Examples)
{
    const Scene lab = load_preset("los_lab");
    const auto near = phase_check(lab, 1.0);
    EXPECT_GT(near.corr_measured_spherical, 0.99);
    EXPECT_NEAR(near.rx_distance, near.rayleigh, 1e-9);
    const auto far = phase_check(lab, 1000.0);
    EXPECT_LT(far.max_abs_spherical_planar, 1e-3);
    EXPECT_THROW(phase_check(lab, 0.5), std::invalid_argument);

    Scene one = lab;
    one.array.n_elements = 1;
    const auto single = phase_check(one, 1.0);
    ASSERT_EQ(single.rows.size(), 1u);
    EXPECT_EQ(single.rows[0].measured, 0.0);
    EXPECT_EQ(single.rows[0].spherical, 0.0);
    EXPECT_EQ(single.rows[0].planar, 0.0);

    std::ostringstream out;
    write_phase_check_csv(out, near);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "element,measured_phase_rad,spherical_phase_rad,planar_phase_rad");
}

TEST(Pearson, Basics)
{
    EXPECT_NEAR(pearson({1, 2, 3}, {2, 4, 6}), 1.0, 1e-15);
    EXPECT_NEAR(pearson({1, 2, 3}, {3, 2, 1}), -1.0, 1e-15);
    EXPECT_TRUE(std::isnan(pearson({1, 1, 1}, {1, 2, 3})));
    EXPECT_TRUE(std::isnan(pearson({1}, {1})));
}
