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


// Acceptance suite: one PASS/FAIL line per criterion. Usage: nearfield_acceptance <path to nearfield executable>

#include "nearfield/wavefront.hpp"
#include "runner.hpp"
#include "test_support.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace nearfield;
using nearfield::test::Gen;

namespace
{
    struct Outcome
    {
        bool pass;
        std::string detail;
    };

    double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    double median(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    }

    Outcome phase_model_exactness()
    {
        const auto t0 = std::chrono::steady_clock::now();
        Gen g(1);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial)
        {
            const int n_el = g.integer(2, 128);
            Scene s = test::free_space(n_el, Vec3::Zero());
            s.array.spacing_d = g.uniform(1e-3, 5e-2);
            const double theta = g.uniform(0.0, kPi);
            s.rx = test::polar_point(s.array.origin, g.uniform(0.05, 200.0), g.coin() ? theta : -theta);
            const double lambda = g.uniform(5e-3, 0.1);
            const int n = g.integer(1, n_el);
            if ((s.rx - test::oracle_element(s, n)).norm() < 1e-6)
                continue;
            const double exact = kTwoPi * (test::oracle_distance(s, n, s.rx) - test::oracle_distance(s, 1, s.rx)) / lambda;
            worst = std::max(worst, std::abs(near_field_phase(phase_model_input(s, n, s.rx, lambda)) - exact));
        }
        const double dt = seconds_since(t0);
        return {worst < 1e-9 && dt < 1.0, fmt::format("max error {:.3e} rad over 1000 geometries in {:.3f} s", worst, dt)};
    }

    Outcome far_field_limit()
    {
        const Scene lab = load_preset("los_lab");
        std::string detail;
        double prev = std::numeric_limits<double>::infinity();
        bool mono = true;
        for (double k : {1.0, 10.0, 100.0, 1000.0})
        {
            const double e = tools::phase_check(lab, k).max_abs_spherical_planar;
            mono = mono && e < prev;
            prev = e;
            detail += fmt::format("{}k={:g}: {:.3e}", detail.empty() ? "" : ", ", k, e);
        }
        return {mono && prev < 1e-3, detail + " rad"};
    }

    Outcome los_phase_correlation()
    {
        const Scene lab = load_preset("los_lab");
        SynthOptions so;
        so.noise = false;
        const auto measured = los_phase(synthesize_cfr(lab, so), lab);
        const double lambda = kSpeedOfLight / lab.sweep.frequency(lab.sweep.center_index());
        std::vector<double> model;
        for (int n = 1; n <= lab.array.n_elements; ++n)
            model.push_back(near_field_phase(phase_model_input(lab, n, lab.rx, lambda)));
        const double r = tools::pearson(measured.phase, model);
        return {r > 0.99, fmt::format("pearson r = {:.9f}", r)};
    }

    Outcome los_power_and_aod()
    {
        const Scene lab = load_preset("los_lab");
        const auto st = compute_stats(synthesize_cfr(lab), lab);
        const auto [lo, hi] = std::minmax_element(st.power_db.begin(), st.power_db.end());
        bool mono = true;
        for (std::size_t i = 1; i < st.aod.size(); ++i)
            mono = mono && st.aod_valid[i] && st.aod[i] > st.aod[i - 1];
        const double span = rad2deg(st.aod.back() - st.aod.front());
        const double truth = rad2deg(true_geometry(lab, 64, lab.rx).angle - true_geometry(lab, 1, lab.rx).angle);
        const bool pass = *hi - *lo <= 0.5 && mono && std::abs(span - truth) <= 1.0;
        return {pass, fmt::format("power spread {:.3f} dB, AoD {} monotone, span {:.3f} deg vs geometric {:.3f} deg",
                                  *hi - *lo, mono ? "strictly" : "not", span, truth)};
    }

    Outcome olos_behavior()
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Scene lab = load_preset("los_lab");
        const Scene olos = load_preset("olos_baffle");
        const auto a = compute_stats(synthesize_cfr(lab), lab);
        const auto b = compute_stats(synthesize_cfr(olos), olos);
        double min_loss = std::numeric_limits<double>::infinity();
        std::vector<double> ds_shadow;
        int count = 0;
        for (int n = 1; n <= 64; ++n)
        {
            if (los_fresnel_parameter(olos, n) < 1.0)
                continue;
            ++count;
            min_loss = std::min(min_loss, a.power_db[std::size_t(n - 1)] - b.power_db[std::size_t(n - 1)]);
            ds_shadow.push_back(b.delay_spread[std::size_t(n - 1)]);
        }
        if (count == 0)
            return {false, "no element with nu >= 1"};
        const double rise = (median(ds_shadow) - median(a.delay_spread)) * 1e9;
        const double dt = seconds_since(t0);
        return {min_loss >= 10.0 && rise >= 2.0 && dt < 30.0,
                fmt::format("{} shadowed elements, minimum loss {:.2f} dB, median DS +{:.2f} ns, {:.2f} s", count,
                            min_loss, rise, dt)};
    }

    Outcome si_recovery()
    {
        const Scene olos = load_preset("olos_baffle");
        const auto p = partition_by_cmd(synthesize_cfr(olos));
        const auto b = p.boundaries();
        const bool edge = std::any_of(b.begin(), b.end(), [](int x) { return x >= 24 && x <= 28; });
        int hits = 0;
        for (int t = 0; t < 100; ++t)
        {
            const auto q = partition_by_cmd(test::splice_trial(t)).boundaries();
            hits += std::any_of(q.begin(), q.end(), [](int x) { return std::abs(x - 33) <= 2; });
        }
        std::string bs;
        for (int x : b)
            bs += fmt::format("{}{}", bs.empty() ? "" : " ", x);
        return {edge && hits >= 95,
                fmt::format("olos_baffle boundaries [{}], splice recovered in {}/100 trials", bs, hits)};
    }

    Outcome cmd_properties()
    {
        Gen g(7);
        double worst = 0.0;
        bool range = true;
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2), b = Eigen::MatrixXcd::Zero(2, 2);
        a(0, 0) = 1.0;
        b(1, 1) = 1.0;
        worst = std::max(worst, std::abs(cmd(a, b) - 1.0));
        for (int trial = 0; trial < 1000; ++trial)
        {
            const int m = g.integer(1, 8);
            const auto r1 = test::random_psd(g, m, g.integer(1, m));
            const auto r2 = test::random_psd(g, m, g.integer(1, m));
            const double c = std::pow(10.0, g.uniform(-3, 3));
            const double d = cmd(r1, r2);
            worst = std::max({worst, std::abs(cmd(r1, r1)), std::abs(cmd(r1, c * r1)), std::abs(d - cmd(r2, r1))});
            range = range && d >= -1e-9 && d <= 1.0 + 1e-9;
        }
        return {worst < 1e-9 && range, fmt::format("worst deviation {:.3e} over 1000 pairs", worst)};
    }

    Outcome mw_monotonicity()
    {
        const Scene lab = load_preset("los_lab");
        const Cfr truth = synthesize_los_cfr(lab);
        std::string detail;
        double prev = std::numeric_limits<double>::infinity();
        bool mono = true;
        for (int k = 0; k <= 5; ++k)
        {
            const double e = mw_error(truth, synthesize_mw_cfr(build_mw_model(lab, dyadic_partition(64, k)), lab)).phase_rmse;
            mono = mono && e <= prev + 1e-9;
            prev = e;
            detail += fmt::format("{}{:.3e}", detail.empty() ? "" : " ", e);
        }
        const double single = mw_error(truth, synthesize_mw_cfr(build_mw_model(lab, uniform_partition(64, 64)), lab)).phase_rmse;
        return {mono && single < 1e-9, fmt::format("phase_rmse 2^0..2^5: {}; singletons {:.3e}", detail, single)};
    }

    Outcome analysis_oracles()
    {
        Gen g(9);
        double parseval = 0.0;
        for (int trial = 0; trial < 20; ++trial)
        {
            std::vector<cdouble> row(801);
            for (auto &v : row)
                v = g.complex_normal();
            double sum_h = 0.0;
            for (const auto &v : row)
                sum_h += std::norm(v);
            const auto pdp = compute_pdp(row, 1.0, Window::rectangular);
            parseval = std::max(parseval, std::abs(std::accumulate(pdp.powers.begin(), pdp.powers.end(), 0.0) / sum_h - 1.0));
        }
        const Sweep sw;
        const double bw = delay_bin_width(sw);
        const double ds = rms_delay_spread(compute_pdp(test::taps_response(sw, {{0.0, 1.0}, {10e-9, 1.0}}), bw));

        const Scene one = test::free_space(1, Vec3(0, 5, 2.5));
        const auto pdp = compute_pdp(synthesize_cfr(one), 1);
        const long peak = std::max_element(pdp.powers.begin(), pdp.powers.end()) - pdp.powers.begin();
        const long expected = std::lround(5.0 / kSpeedOfLight / bw);

        const bool pass = parseval < 1e-9 && std::abs(ds - 5e-9) <= 0.5 * bw && peak == expected;
        return {pass, fmt::format("Parseval rel. error {:.2e}, two-tap DS {:.4f} ns (bin {:.4f} ns), peak bin {} vs {}",
                                  parseval, ds * 1e9, bw * 1e9, peak, expected)};
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    Outcome determinism(const std::string &exe)
    {
        if (exe.empty())
            return {false, "no executable given"};
        const auto base = std::filesystem::temp_directory_path() / "nearfield_acceptance_det";
        std::filesystem::remove_all(base);
        std::filesystem::create_directories(base);
        for (const char *run : {"a", "b"})
        {
            const std::string cmd = fmt::format("\"{}\" run olos_baffle --seed 7 --out \"{}\" > \"{}\"", exe,
                                                (base / run).string(), (base / (std::string(run) + ".log")).string());
            if (std::system(cmd.c_str()) != 0)
                return {false, fmt::format("command failed: {}", cmd)};
        }
        int same = 0, total = 0;
        std::string differing;
        for (const auto &entry : std::filesystem::directory_iterator(base / "a"))
        {
            if (entry.path().extension() != ".csv")
                continue;
            ++total;
            const auto name = entry.path().filename();
            if (slurp(entry.path()) == slurp(base / "b" / name) && !slurp(entry.path()).empty())
                ++same;
            else
                differing += " " + name.string();
        }
        std::filesystem::remove_all(base);
        return {total == 6 && same == total,
                fmt::format("{}/{} CSV files byte-identical{}", same, total, differing.empty() ? "" : ";" + differing)};
    }
} // namespace

int main(int argc, char **argv)
{
    const std::string exe = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"phase-model exactness", phase_model_exactness},
        {"far-field limit", far_field_limit},
        {"LOS phase vs spherical model", los_phase_correlation},
        {"LOS power spread and AoD", los_power_and_aod},
        {"OLOS shadow loss and delay spread", olos_behavior},
        {"stationary-interval recovery", si_recovery},
        {"CMD properties", cmd_properties},
        {"MW dyadic monotonicity", mw_monotonicity},
        {"analysis oracles", analysis_oracles},
        {"determinism", [&] { return determinism(exe); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        Outcome o{false, ""};
        try
        {
            o = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        fmt::print("{} {:>2} {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    }
    return failed == 0 ? 0 : 1;
}
