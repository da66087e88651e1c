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

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

using namespace nearfield;
using namespace nearfield::tools;

namespace
{
    int report_error(int code, const std::exception &e)
    {
        std::cerr << "nearfield: " << e.what() << '\n';
        return code;
    }

    template <class F>
    int guarded(F &&body)
    {
        try
        {
            return body();
        }
        catch (const UnknownPresetError &e)
        {
            return report_error(kUnknownPreset, e);
        }
        catch (const ScenarioFileError &e)
        {
            return report_error(kBadScenario, e);
        }
        catch (const ParseError &e)
        {
            return report_error(kBadScenario, e);
        }
        catch (const InvariantError &e)
        {
            return report_error(kBadScenario, e);
        }
        catch (const std::exception &e)
        {
            return report_error(kAnalysisFailed, e);
        }
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"nearfield: near-field channel synthesis, analysis and stationarity partitioning"};
    app.require_subcommand(1);

    RunOptions opts;
    std::string scenario;
    std::uint64_t seed = 0;
    int freq_points = 0;
    double noise_floor = 0.0;
    std::string out_dir = "nearfield_out";

    auto *run = app.add_subcommand("run", "synthesize, analyze and partition a scenario file or preset");
    run->add_option("scenario", scenario, "scenario file path or preset name (los_lab, olos_baffle)")->required();
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    auto *seed_opt = run->add_option("--seed", seed, "noise seed override");
    auto *fp_opt = run->add_option("--freq-points", freq_points, "sweep points override")->check(CLI::PositiveNumber);
    auto *nf_opt = run->add_option("--noise-floor", noise_floor, "noise floor override in dBm");
    run->add_option("--cmd-threshold", opts.cmd_threshold, "CMD boundary threshold")->capture_default_str();
    run->add_option("--window", opts.window, "CMD window length in elements")->capture_default_str()->check(CLI::PositiveNumber);
    const std::map<std::string, CriterionChoice> criteria{
        {"cmd", CriterionChoice::cmd}, {"slope", CriterionChoice::slope}, {"both", CriterionChoice::both}};
    run->add_option("--criterion", opts.criterion, "partition criterion")
        ->transform(CLI::CheckedTransformer(criteria, CLI::ignore_case));
    const std::map<std::string, SlopeParameter> slope_params{{"power", SlopeParameter::power},
                                                             {"delay_spread", SlopeParameter::delay_spread},
                                                             {"aod", SlopeParameter::aod}};
    run->add_option("--slope-parameter", opts.slope_parameter, "parameter for the slope criterion")
        ->transform(CLI::CheckedTransformer(slope_params, CLI::ignore_case));
    run->add_flag("--binary", opts.binary, "also write cfr.bin");
    run->add_option("--threads", opts.threads, "synthesis worker threads")->capture_default_str();

    std::string preset;
    double k = 1.0;
    std::string csv_path;
    auto *pc = app.add_subcommand("phase-check", "compare synthesized LOS phase with the spherical and planar models");
    pc->add_option("scenario", preset, "preset name or scenario file")->required();
    pc->add_option("--k", k, "Rx distance in Rayleigh distances")->capture_default_str();
    pc->add_option("--out", csv_path, "write the table to this CSV file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    if (*run)
        return guarded([&] {
            opts.out_dir = out_dir;
            if (*seed_opt)
                opts.seed = seed;
            if (*fp_opt)
                opts.freq_points = freq_points;
            if (*nf_opt)
                opts.noise_floor_dbm = noise_floor;
            const auto report = run_pipeline(scenario, opts);
            std::cout << report.text;
            return int(kOk);
        });

    return guarded([&] {
        const auto res = phase_check(resolve_scene(preset), k);
        if (csv_path.empty())
            write_phase_check_csv(std::cout, res);
        else
        {
            std::ofstream out(csv_path);
            if (!out)
                throw std::runtime_error("cannot write " + csv_path);
            write_phase_check_csv(out, res);
        }
        std::cerr << fmt::format("k = {:g}, rx distance {:.6g} m, rayleigh distance {:.6g} m\n", res.k, res.rx_distance,
                                 res.rayleigh)
                  << fmt::format("corr(measured, spherical) = {:.9f}\ncorr(measured, planar) = {:.9f}\ncorr(spherical, planar) = {:.9f}\n",
                                 res.corr_measured_spherical, res.corr_measured_planar, res.corr_spherical_planar)
                  << fmt::format("max |spherical - planar| = {:.3e} rad\nmax |measured - spherical| = {:.3e} rad\n",
                                 res.max_abs_spherical_planar, res.max_abs_measured_spherical);
        return int(kOk);
    });
}
