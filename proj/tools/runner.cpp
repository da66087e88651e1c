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

#include "nearfield/wavefront.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace nearfield::tools
{
    namespace
    {
        constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

        double median(std::vector<double> v)
        {
            if (v.empty())
                return kNaN;
            std::sort(v.begin(), v.end());
            const std::size_t h = v.size() / 2;
            return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
        }

        std::string fmt_vec(const Vec3 &v) { return fmt::format("({:.4g}, {:.4g}, {:.4g})", v.x(), v.y(), v.z()); }

        std::string fmt_intervals(const StationaryPartition &p)
        {
            std::string s;
            for (const auto &iv : p.intervals)
                s += fmt::format("{}[{}, {}]", s.empty() ? "" : " ", iv.start, iv.end);
            return s;
        }

        std::ofstream open_out(const std::filesystem::path &path, bool binary = false)
        {
            std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
            if (!out)
                throw std::runtime_error("cannot write " + path.string());
            return out;
        }

        std::vector<double> model_phase(const Scene &scene, const Vec3 &rx)
        {
            const double lambda = kSpeedOfLight / scene.sweep.frequency(scene.sweep.center_index());
            std::vector<double> out;
            for (int n = 1; n <= scene.array.n_elements; ++n)
                out.push_back(near_field_phase(phase_model_input(scene, n, rx, lambda)));
            return out;
        }

        struct ShadowSummary
        {
            std::vector<int> elements; // nu >= 1
            int first_shadowed = 0;    // first element with nu > 0
            double min_loss_db = kNaN;
            double median_ds_increase_ns = kNaN;
        };

        ShadowSummary shadow_summary(const Scene &scene, const ChannelStats &stats, const AnalysisConfig &cfg,
                                     unsigned threads)
        {
            ShadowSummary s;
            Scene open = scene;
            open.blockers.clear();
            SynthOptions so;
            so.threads = threads;
            const auto ref = compute_stats(synthesize_cfr(open, so), open, cfg);

            std::vector<double> ds_shadow;
            double min_loss = std::numeric_limits<double>::infinity();
            for (int n = 1; n <= scene.array.n_elements; ++n)
            {
                const double nu = los_fresnel_parameter(scene, n);
                if (nu > 0.0 && s.first_shadowed == 0)
                    s.first_shadowed = n;
                if (nu < 1.0)
                    continue;
                s.elements.push_back(n);
                min_loss = std::min(min_loss, ref.power_db[std::size_t(n - 1)] - stats.power_db[std::size_t(n - 1)]);
                ds_shadow.push_back(stats.delay_spread[std::size_t(n - 1)]);
            }
            if (!s.elements.empty())
            {
                s.min_loss_db = min_loss;
                s.median_ds_increase_ns = (median(ds_shadow) - median(ref.delay_spread)) * 1e9;
            }
            return s;
        }
    } // namespace

    Scene resolve_scene(const std::string &arg)
    {
        const std::filesystem::path p(arg);
        const bool looks_like_path = arg.find('/') != std::string::npos || arg.find('.') != std::string::npos;
        std::error_code ec;
        if (looks_like_path || std::filesystem::is_regular_file(p, ec))
        {
            if (!std::filesystem::is_regular_file(p, ec))
                throw ScenarioFileError("scenario file not found: " + arg);
            return load_scene(p);
        }
        if (!is_preset(arg))
            throw UnknownPresetError(fmt::format("unknown preset '{}' (known: los_lab, olos_baffle)", arg));
        return load_preset(arg);
    }

    Scene apply_overrides(Scene scene, const RunOptions &options)
    {
        if (options.seed)
            scene.seed = *options.seed;
        if (options.freq_points)
            scene.sweep.n_points = *options.freq_points;
        if (options.noise_floor_dbm)
            scene.noise_floor_dbm = *options.noise_floor_dbm;
        validate(scene);
        return scene;
    }

    double pearson(const std::vector<double> &a, const std::vector<double> &b)
    {
        if (a.size() != b.size() || a.size() < 2)
            return kNaN;
        const double n = double(a.size());
        const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
        const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            sab += (a[i] - ma) * (b[i] - mb);
            saa += (a[i] - ma) * (a[i] - ma);
            sbb += (b[i] - mb) * (b[i] - mb);
        }
        return saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : kNaN;
    }

    RunReport run_pipeline(const std::string &path_or_preset, const RunOptions &options)
    {
        RunReport report;
        report.scene_label = path_or_preset;
        report.scene = apply_overrides(resolve_scene(path_or_preset), options);
        const Scene &scene = report.scene;
        const int n_el = scene.array.n_elements;

        AnalysisConfig acfg;
        CmdConfig ccfg;
        ccfg.window = options.window;
        ccfg.threshold = options.cmd_threshold;
        SlopeConfig scfg;
        scfg.parameter = options.slope_parameter;

        SynthOptions so;
        so.threads = options.threads;
        const Cfr cfr = synthesize_cfr(scene, so);
        report.stats = compute_stats(cfr, scene, acfg);
        const auto &stats = report.stats;

        std::vector<PowerDelayProfile> pdps;
        for (int n = 1; n <= n_el; ++n)
            pdps.push_back(compute_pdp(cfr, n, acfg.pdp_window));

        if (options.criterion != CriterionChoice::slope)
            report.partitions.push_back(partition_by_cmd(cfr, ccfg));
        if (options.criterion != CriterionChoice::cmd)
            report.partitions.push_back(partition_by_slope(stats, scfg));
        const Eigen::MatrixXd map = n_el >= ccfg.window ? cmd_map(cfr, ccfg.window) : Eigen::MatrixXd();

        // MW: phase error against the LOS-only ground truth, correlation against the full response
        const Cfr truth = synthesize_los_cfr(scene);
        auto mw_row = [&](std::string id, const StationaryPartition &p) {
            const auto approx = synthesize_mw_cfr(build_mw_model(scene, p), scene);
            const auto e_los = mw_error(truth, approx);
            const auto e_full = mw_error(cfr, approx);
            report.mw_rows.push_back({std::move(id), p.n_intervals(), e_los.phase_rmse, e_full.correlation});
        };
        for (int k = 0; (1 << k) <= n_el && k <= 5; ++k)
            mw_row(fmt::format("k={}", k), dyadic_partition(n_el, k));
        for (const auto &p : report.partitions)
            mw_row(to_string(p.criterion), p);

        // built-in checks
        const auto [pmin, pmax] = std::minmax_element(stats.power_db.begin(), stats.power_db.end());
        const double spread = *pmax - *pmin;
        const bool open_scene = scene.blockers.empty();
        if (open_scene)
        {
            report.checks.push_back({"power spread <= 0.5 dB", spread <= 0.5, fmt::format("{:.3f} dB", spread)});

            bool mono = n_el >= 2;
            for (int i = 1; i < n_el; ++i)
                mono = mono && stats.aod_valid[std::size_t(i)] && stats.aod_valid[std::size_t(i - 1)] &&
                       (stats.aod[std::size_t(i)] - stats.aod[0]) * (stats.aod[std::size_t(n_el - 1)] - stats.aod[0]) > 0 &&
                       std::abs(stats.aod[std::size_t(i)] - stats.aod[0]) > std::abs(stats.aod[std::size_t(i - 1)] - stats.aod[0]);
            const double true_span = n_el >= 2 ? true_geometry(scene, n_el, scene.rx).angle - true_geometry(scene, 1, scene.rx).angle : 0.0;
            const double est_span = n_el >= 2 ? stats.aod[std::size_t(n_el - 1)] - stats.aod[0] : 0.0;
            report.checks.push_back({"AoD strictly monotone, span within 1 deg of geometry",
                                     mono && std::abs(rad2deg(est_span - true_span)) <= 1.0,
                                     fmt::format("span {:.3f} deg vs geometric {:.3f} deg", rad2deg(est_span), rad2deg(true_span))});

            const double r = pearson(stats.los_phase, model_phase(scene, scene.rx));
            report.checks.push_back({"LOS phase vs spherical model correlation > 0.99", r > 0.99, fmt::format("r = {:.6f}", r)});
        }
        else
        {
            const auto sh = shadow_summary(scene, stats, acfg, options.threads);
            if (!sh.elements.empty())
            {
                report.checks.push_back({"shadowed elements (nu >= 1) lose >= 10 dB", sh.min_loss_db >= 10.0,
                                         fmt::format("elements {}..{}, minimum loss {:.2f} dB", sh.elements.front(),
                                                     sh.elements.back(), sh.min_loss_db)});
                report.checks.push_back({"median DS over shadowed elements rises by >= 2 ns", sh.median_ds_increase_ns >= 2.0,
                                         fmt::format("+{:.2f} ns", sh.median_ds_increase_ns)});
            }
            if (sh.first_shadowed > 0)
                for (const auto &p : report.partitions)
                {
                    const auto b = p.boundaries();
                    const bool near = std::any_of(b.begin(), b.end(), [&](int x) { return std::abs(x - sh.first_shadowed) <= 2; });
                    report.checks.push_back({fmt::format("{} boundary within 2 of the shadow edge (element {})",
                                                         to_string(p.criterion), sh.first_shadowed),
                                             near, fmt_intervals(p)});
                }
        }
        {
            bool mono = true;
            double prev = std::numeric_limits<double>::infinity();
            int dyadic = 0;
            for (const auto &r : report.mw_rows)
                if (r.id.rfind("k=", 0) == 0)
                {
                    mono = mono && r.phase_rmse <= prev + 1e-9;
                    prev = r.phase_rmse;
                    ++dyadic;
                }
            report.checks.push_back({"MW phase error non-increasing under dyadic refinement", mono,
                                     fmt::format("{} levels", dyadic)});
        }

        // artifacts
        std::filesystem::create_directories(options.out_dir);
        auto file = [&](const char *name) {
            report.files.push_back(options.out_dir / name);
            return open_out(report.files.back(), std::string_view(name).ends_with(".bin"));
        };
        {
            auto out = file("cfr.csv");
            write_cfr_csv(out, cfr);
        }
        if (options.binary)
        {
            auto out = file("cfr.bin");
            write_cfr_binary(out, cfr);
        }
        {
            auto out = file("stats.csv");
            write_stats_csv(out, stats);
        }
        {
            auto out = file("pdp.csv");
            write_pdp_csv(out, pdps);
        }
        {
            auto out = file("partition.csv");
            write_partition_csv(out, report.partitions);
        }
        {
            auto out = file("cmd_map.csv");
            write_cmd_map_csv(out, map);
        }
        {
            auto out = file("mw_error.csv");
            write_mw_error_csv(out, report.mw_rows);
        }

        std::string t;
        auto line = [&t](const std::string &s) { t += s + "\n"; };
        line(fmt::format("nearfield run: {}", report.scene_label));
        line("");
        line("[scene]");
        line(fmt::format("elements            {}", n_el));
        line(fmt::format("spacing_d           {:.6g} m", scene.array.spacing_d));
        line(fmt::format("aperture            {:.6g} m", scene.array.aperture()));
        line(fmt::format("array origin / axis {} / {}", fmt_vec(scene.array.origin), fmt_vec(scene.array.axis)));
        line(fmt::format("rx                  {}", fmt_vec(scene.rx)));
        line(fmt::format("sweep               {:.6g}-{:.6g} GHz, {} points", scene.sweep.f_start / 1e9,
                         scene.sweep.f_stop / 1e9, scene.sweep.n_points));
        line(fmt::format("rayleigh distance   {:.4g} m at the center frequency",
                         rayleigh_distance(scene.array.aperture(), scene.sweep.center_wavelength())));
        line(fmt::format("walls / scatterers / blockers  {} / {} / {}", scene.walls.size(), scene.scatterers.size(),
                         scene.blockers.size()));
        line(fmt::format("noise floor         {}", scene.noise_floor_dbm ? fmt::format("{:.6g} dBm", *scene.noise_floor_dbm) : "off"));
        line(fmt::format("seed                {}", scene.seed));
        line("");
        line("[settings]");
        line(fmt::format("pdp window                 {}", acfg.pdp_window == Window::hann ? "hann" : "rectangular"));
        line(fmt::format("delay bin width            {:.6g} ns", delay_bin_width(scene.sweep) * 1e9));
        line(fmt::format("ds threshold               {:.6g} dB below peak", acfg.ds_threshold_db));
        line(fmt::format("los gate half width        {} bins", acfg.gate_half_width));
        line(fmt::format("los gate snr               {:.6g} dB over the median bin", acfg.gate_snr_db));
        line(fmt::format("criterion                  {}", options.criterion == CriterionChoice::both ? "both"
                                                         : options.criterion == CriterionChoice::cmd ? "cmd" : "slope"));
        line(fmt::format("cmd window m               {}", ccfg.window));
        line(fmt::format("cmd threshold tau          {:.6g}", ccfg.threshold));
        line(fmt::format("cmd min_si                 {}", ccfg.effective_min_si()));
        line(fmt::format("slope parameter            {}", to_string(scfg.parameter)));
        line(fmt::format("slope k_threshold          {:.6g} per element", scfg.effective_threshold()));
        line(fmt::format("slope smoothing w          {}", scfg.smoothing));
        line(fmt::format("uniform-power gamma        {:.6g} dB", scfg.gamma_db));
        line(fmt::format("slope min_si               {}", scfg.min_si));
        line(fmt::format("synthesis threads          {}", options.threads));
        line("");
        line("[channel]");
        line(fmt::format("power                 {:.3f} .. {:.3f} dB (spread {:.3f} dB)", *pmin, *pmax, spread));
        {
            const auto [dmin, dmax] = std::minmax_element(stats.delay_spread.begin(), stats.delay_spread.end());
            line(fmt::format("rms delay spread      {:.3f} .. {:.3f} ns (median {:.3f} ns)", *dmin * 1e9, *dmax * 1e9,
                             median(stats.delay_spread) * 1e9));
        }
        line(fmt::format("aod                   {:.3f} -> {:.3f} deg", rad2deg(stats.aod.front()), rad2deg(stats.aod.back())));
        line(fmt::format("los phase (unwrapped) {:.4f} -> {:.4f} rad", stats.los_phase.front(), stats.los_phase.back()));
        line(fmt::format("los-invalid elements  {}", std::count(stats.los_valid.begin(), stats.los_valid.end(), false)));
        line("");
        line("[partitions]");
        for (const auto &p : report.partitions)
        {
            line(fmt::format("{:<6} {} interval(s): {}", to_string(p.criterion), p.n_intervals(), fmt_intervals(p)));
            if (p.warning)
                line(fmt::format("       warning: {}", p.warning_text));
        }
        line("");
        line("[multiplanar model]");
        line("id      intervals  phase_rmse_rad  correlation");
        for (const auto &r : report.mw_rows)
            line(fmt::format("{:<7} {:>9}  {:>14.6g}  {:.9f}", r.id, r.n_intervals, r.phase_rmse, r.correlation));
        line("");
        line("[checks]");
        for (const auto &c : report.checks)
            line(fmt::format("{}  {} ({})", c.passed ? "PASS" : "FAIL", c.name, c.detail));
        line("");
        line("[files]");
        for (const auto &f : report.files)
            line(f.filename().string());
        line("report.txt");
        report.text = t;
        {
            auto out = file("report.txt");
            out << t;
        }
        return report;
    }

    PhaseCheckResult phase_check(const Scene &base, double k)
    {
        if (!(k >= 1.0))
            throw std::invalid_argument("phase_check: k must be >= 1");
        PhaseCheckResult res;
        res.k = k;
        Scene scene = base;
        const double lambda_c = scene.sweep.center_wavelength();
        res.rayleigh = rayleigh_distance(scene.array.aperture(), lambda_c);
        const Vec3 e1 = element_position(scene, 1);
        const Vec3 dir = (scene.rx - e1).normalized();
        res.rx_distance = k * res.rayleigh;
        if (res.rx_distance > 0.0)
            scene.rx = e1 + res.rx_distance * dir;
        else
            res.rx_distance = (scene.rx - e1).norm();
        validate(scene);

        const int n_el = scene.array.n_elements;
        const double lambda = kSpeedOfLight / scene.sweep.frequency(scene.sweep.center_index());
        const double theta1 = true_geometry(scene, 1, scene.rx).angle;
        SynthOptions so;
        so.noise = false;
        const auto measured = los_phase(synthesize_cfr(scene, so), scene);

        std::vector<double> m, a, b;
        for (int n = 1; n <= n_el; ++n)
        {
            PhaseCheckRow row;
            row.element = n;
            row.measured = measured.phase[std::size_t(n - 1)];
            row.spherical = near_field_phase(phase_model_input(scene, n, scene.rx, lambda));
            row.planar = signed_far_field_phase(n, scene.array.spacing_d, lambda, theta1);
            res.rows.push_back(row);
            m.push_back(row.measured);
            a.push_back(row.spherical);
            b.push_back(row.planar);
            res.max_abs_spherical_planar = std::max(res.max_abs_spherical_planar, std::abs(row.spherical - row.planar));
            res.max_abs_measured_spherical = std::max(res.max_abs_measured_spherical, std::abs(row.measured - row.spherical));
        }
        res.corr_measured_spherical = pearson(m, a);
        res.corr_measured_planar = pearson(m, b);
        res.corr_spherical_planar = pearson(a, b);
        return res;
    }

    void write_phase_check_csv(std::ostream &out, const PhaseCheckResult &r)
    {
        out << "element,measured_phase_rad,spherical_phase_rad,planar_phase_rad\n";
        for (const auto &row : r.rows)
            out << fmt::format("{},{:.12g},{:.12g},{:.12g}\n", row.element, row.measured, row.spherical, row.planar);
    }

} // namespace nearfield::tools
