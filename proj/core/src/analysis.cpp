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

#include "nearfield/analysis.hpp"

#include "fft.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace nearfield
{
    namespace
    {
        constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

        int wrap_bin(long long m, int n) { return int(((m % n) + n) % n); }

        int strongest_bin(const PowerDelayProfile &pdp)
        {
            return int(std::max_element(pdp.powers.begin(), pdp.powers.end()) - pdp.powers.begin());
        }

        double median(std::vector<double> v)
        {
            if (v.empty())
                return 0.0;
            const auto mid = v.begin() + std::ptrdiff_t(v.size() / 2);
            std::nth_element(v.begin(), mid, v.end());
            return *mid;
        }

        struct GatedTaps
        {
            std::vector<cdouble> value; // center-frequency response of the gated LOS tap
            std::vector<bool> valid;
        };

        // `delays` holds the LOS delay per element, or is empty for strongest-tap gating.
        GatedTaps gate_los_taps(const Cfr &cfr, const std::vector<double> &delays, const AnalysisConfig &config)
        {
            const int n_el = cfr.n_elements();
            const double bw = delay_bin_width(cfr.sweep);
            GatedTaps out{std::vector<cdouble>(static_cast<std::size_t>(n_el)),
                          std::vector<bool>(static_cast<std::size_t>(n_el), false)};
            for (int n = 1; n <= n_el; ++n)
            {
                const auto row = cfr.row(n);
                const auto pdp = compute_pdp(row, bw, config.pdp_window, n);
                double tau;
                if (delays.empty())
                    tau = refine_tap_delay(row, cfr.sweep, strongest_bin(pdp) * bw, config.pdp_window);
                else
                    tau = delays[std::size_t(n - 1)];
                const long long center = std::llround(tau / bw);

                double gate_peak = 0.0;
                for (long long m = center - config.gate_half_width; m <= center + config.gate_half_width; ++m)
                    gate_peak = std::max(gate_peak, pdp.powers[std::size_t(wrap_bin(m, pdp.n_bins()))]);
                const double noise = median(pdp.powers);
                const bool usable = gate_peak > 0.0 && gate_peak > noise * std::pow(10.0, config.gate_snr_db / 10.0);

                out.value[std::size_t(n - 1)] = tap_response(row, cfr.sweep, tau, config.pdp_window);
                out.valid[std::size_t(n - 1)] = usable && std::abs(out.value[std::size_t(n - 1)]) > 0.0;
            }
            return out;
        }

        std::vector<double> geometric_delays(const Cfr &cfr, const Scene &scene)
        {
            if (cfr.n_elements() != scene.array.n_elements)
                throw std::invalid_argument("CFR element count does not match the scene");
            std::vector<double> tau(static_cast<std::size_t>(cfr.n_elements()));
            for (int n = 1; n <= cfr.n_elements(); ++n)
                tau[std::size_t(n - 1)] = (scene.rx - element_position(scene, n)).norm() / kSpeedOfLight;
            return tau;
        }

        LosPhase phases_from_taps(const GatedTaps &taps)
        {
            const std::size_t n_el = taps.value.size();
            std::vector<double> raw(n_el, kNaN);
            for (std::size_t i = 0; i < n_el; ++i)
                if (taps.valid[i])
                    raw[i] = -std::arg(taps.value[i]);
            LosPhase out{unwrap_phase(raw), taps.valid};
            if (n_el > 0 && taps.valid[0])
            {
                const double ref = out.phase[0];
                for (auto &p : out.phase)
                    p -= ref;
            }
            return out;
        }

        AodEstimate aod_from_taps(const GatedTaps &taps, double spacing, double wavelength)
        {
            const int n_el = int(taps.value.size());
            AodEstimate out{std::vector<double>(std::size_t(n_el), kNaN), std::vector<bool>(std::size_t(n_el), false)};
            if (n_el < 2)
                return out;

            std::vector<double> pair(static_cast<std::size_t>(n_el - 1), kNaN);
            for (int i = 0; i + 1 < n_el; ++i)
            {
                if (!taps.valid[std::size_t(i)] || !taps.valid[std::size_t(i + 1)])
                    continue;
                const double dphi = -std::arg(taps.value[std::size_t(i + 1)] * std::conj(taps.value[std::size_t(i)]));
                const double c = -wavelength * dphi / (kTwoPi * spacing);
                if (std::abs(c) > 1.0) // aliasing or occlusion
                    continue;
                pair[std::size_t(i)] = std::acos(std::clamp(c, -1.0, 1.0));
            }

            if (n_el == 2)
            {
                out.angle = {pair[0], pair[0]};
                out.valid = {!std::isnan(pair[0]), !std::isnan(pair[0])};
                return out;
            }
            // pair i sits at element i + 1.5; interior elements average their two pairs,
            // the end elements extrapolate linearly
            for (int n = 1; n <= n_el; ++n)
            {
                double v;
                if (n == 1)
                    v = 1.5 * pair[0] - 0.5 * pair[1];
                else if (n == n_el)
                    v = 1.5 * pair[std::size_t(n_el - 2)] - 0.5 * pair[std::size_t(n_el - 3)];
                else
                    v = 0.5 * (pair[std::size_t(n - 2)] + pair[std::size_t(n - 1)]);
                out.angle[std::size_t(n - 1)] = v;
                out.valid[std::size_t(n - 1)] = !std::isnan(v);
            }
            return out;
        }

        ChannelStats stats_common(const Cfr &cfr, const GatedTaps &taps, std::vector<double> los_delay,
                                  double spacing, const AnalysisConfig &config)
        {
            const int n_el = cfr.n_elements();
            const double bw = delay_bin_width(cfr.sweep);
            ChannelStats s;
            s.power_db.resize(std::size_t(n_el));
            s.delay_spread.resize(std::size_t(n_el));
            for (int n = 1; n <= n_el; ++n)
            {
                const auto row = cfr.row(n);
                s.power_db[std::size_t(n - 1)] = received_power_db(row);
                const auto pdp = compute_pdp(row, bw, config.pdp_window, n);
                try
                {
                    s.delay_spread[std::size_t(n - 1)] = rms_delay_spread(pdp, config.ds_threshold_db);
                }
                catch (const AnalysisError &)
                {
                    throw AnalysisError(fmt::format("element {}: all-noise delay profile", n));
                }
            }
            if (n_el > 0 && !taps.valid[0])
                throw AnalysisError("element 1 has no usable LOS tap; cannot reference phases");

            const auto phase = phases_from_taps(taps);
            s.los_phase = phase.phase;
            s.los_valid = phase.valid;
            const double lambda = kSpeedOfLight / cfr.sweep.frequency(cfr.sweep.center_index());
            const auto aod = aod_from_taps(taps, spacing, lambda);
            s.aod = aod.angle;
            s.aod_valid = aod.valid;
            s.los_delay = std::move(los_delay);
            return s;
        }
    } // namespace

    double delay_bin_width(const Sweep &sweep) { return 1.0 / (double(sweep.n_points) * sweep.step()); }

    std::vector<double> window_coefficients(Window window, int n)
    {
        std::vector<double> w(static_cast<std::size_t>(n), 1.0);
        if (window == Window::hann && n > 1)
        {
            double sum = 0.0;
            for (int k = 0; k < n; ++k)
                sum += w[std::size_t(k)] = 0.5 * (1.0 - std::cos(kTwoPi * double(k) / double(n - 1)));
            for (auto &v : w)
                v *= double(n) / sum;
        }
        return w;
    }

    PowerDelayProfile compute_pdp(std::span<const cdouble> row, double bin_width, Window window, int element)
    {
        if (row.size() < 2)
            throw std::invalid_argument("compute_pdp: need at least two frequency points");
        const auto w = window_coefficients(window, int(row.size()));
        std::vector<cdouble> x(row.size());
        for (std::size_t k = 0; k < row.size(); ++k)
            x[k] = row[k] * w[k];
        const auto h = detail::idft_unitary(x);

        PowerDelayProfile pdp;
        pdp.bin_width = bin_width;
        pdp.element = element;
        pdp.powers.resize(h.size());
        for (std::size_t m = 0; m < h.size(); ++m)
            pdp.powers[m] = std::norm(h[m]);
        return pdp;
    }

    PowerDelayProfile compute_pdp(const Cfr &cfr, int n, Window window)
    {
        return compute_pdp(cfr.row(n), delay_bin_width(cfr.sweep), window, n);
    }

    double received_power_db(std::span<const cdouble> row)
    {
        if (row.empty())
            throw std::invalid_argument("received_power_db: empty response");
        double sum = 0.0;
        for (const auto &v : row)
            sum += std::norm(v);
        return 10.0 * std::log10(sum / double(row.size()));
    }

    double received_power_db(const PowerDelayProfile &pdp)
    {
        if (pdp.powers.empty())
            throw std::invalid_argument("received_power_db: empty profile");
        double sum = 0.0;
        for (double p : pdp.powers)
            sum += p;
        return 10.0 * std::log10(sum / double(pdp.powers.size()));
    }

    double rms_delay_spread(const PowerDelayProfile &pdp, double threshold_db)
    {
        if (pdp.powers.empty())
            throw AnalysisError("rms_delay_spread: empty profile");
        const int peak_bin = strongest_bin(pdp);
        const double peak = pdp.powers[std::size_t(peak_bin)];
        if (!(peak > 0.0) || !std::isfinite(peak))
            throw AnalysisError("rms_delay_spread: no bin above the noise threshold");

        const int n = pdp.n_bins();
        const double cutoff = peak * std::pow(10.0, -threshold_db / 10.0);
        double p0 = 0.0, p1 = 0.0, p2 = 0.0;
        for (int m = 0; m < n; ++m)
        {
            const double p = pdp.powers[std::size_t(m)];
            if (p < cutoff)
                continue;
            // offset from the peak on the circular axis, in [-n/2, n/2)
            const int rel = wrap_bin(m - peak_bin + n / 2, n) - n / 2;
            const double tau = double(rel) * pdp.bin_width;
            p0 += p;
            p1 += p * tau;
            p2 += p * tau * tau;
        }
        const double mean = p1 / p0;
        return std::sqrt(std::max(0.0, p2 / p0 - mean * mean));
    }

    cdouble tap_response(std::span<const cdouble> row, const Sweep &sweep, double tau, Window window)
    {
        const int n = int(row.size());
        if (n < 2 || n != sweep.n_points)
            throw std::invalid_argument("tap_response: row does not match the sweep");
        const auto w = window_coefficients(window, n);
        const int kc = sweep.center_index();
        cdouble acc = 0.0;
        double wsum = 0.0;
        for (int k = 0; k < n; ++k)
        {
            const double df = double(k - kc) * sweep.step();
            acc += w[std::size_t(k)] * row[std::size_t(k)] * std::polar(1.0, kTwoPi * df * tau);
            wsum += w[std::size_t(k)];
        }
        return acc / wsum;
    }

    double refine_tap_delay(std::span<const cdouble> row, const Sweep &sweep, double coarse_tau, Window window)
    {
        const double bw = delay_bin_width(sweep);
        auto score = [&](double t) { return std::abs(tap_response(row, sweep, t, window)); };
        // golden-section search on [coarse - bw, coarse + bw]
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = coarse_tau - bw, b = coarse_tau + bw;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = score(c), fd = score(d);
        for (int it = 0; it < 60 && b - a > 1e-6 * bw; ++it)
        {
            if (fc > fd)
            {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = score(c);
            }
            else
            {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = score(d);
            }
        }
        return 0.5 * (a + b);
    }

    LosPhase los_phase(const Cfr &cfr, const Scene &scene, const AnalysisConfig &config)
    {
        return phases_from_taps(gate_los_taps(cfr, geometric_delays(cfr, scene), config));
    }

    LosPhase los_phase(const Cfr &cfr, const AnalysisConfig &config)
    {
        return phases_from_taps(gate_los_taps(cfr, {}, config));
    }

    AodEstimate estimate_aod(const Cfr &cfr, const Scene &scene, const AnalysisConfig &config)
    {
        const auto taps = gate_los_taps(cfr, geometric_delays(cfr, scene), config);
        return aod_from_taps(taps, scene.array.spacing_d, kSpeedOfLight / cfr.sweep.frequency(cfr.sweep.center_index()));
    }

    AodEstimate estimate_aod(const Cfr &cfr, double spacing, const AnalysisConfig &config)
    {
        const auto taps = gate_los_taps(cfr, {}, config);
        return aod_from_taps(taps, spacing, kSpeedOfLight / cfr.sweep.frequency(cfr.sweep.center_index()));
    }

    ChannelStats compute_stats(const Cfr &cfr, const Scene &scene, const AnalysisConfig &config)
    {
        auto delay = geometric_delays(cfr, scene);
        const auto taps = gate_los_taps(cfr, delay, config);
        return stats_common(cfr, taps, std::move(delay), scene.array.spacing_d, config);
    }

    ChannelStats compute_stats(const Cfr &cfr, double spacing, const AnalysisConfig &config)
    {
        const double bw = delay_bin_width(cfr.sweep);
        std::vector<double> delay(static_cast<std::size_t>(cfr.n_elements()));
        for (int n = 1; n <= cfr.n_elements(); ++n)
        {
            const auto row = cfr.row(n);
            const auto pdp = compute_pdp(row, bw, config.pdp_window, n);
            delay[std::size_t(n - 1)] = refine_tap_delay(row, cfr.sweep, strongest_bin(pdp) * bw, config.pdp_window);
        }
        return stats_common(cfr, gate_los_taps(cfr, delay, config), std::move(delay), spacing, config);
    }

    double wrap_phase(double phase)
    {
        double w = std::remainder(phase, kTwoPi);
        if (w <= -kPi)
            w += kTwoPi;
        return w;
    }

    std::vector<double> unwrap_phase(std::span<const double> phase)
    {
        std::vector<double> out(phase.begin(), phase.end());
        double prev_raw = kNaN, prev_out = kNaN;
        for (auto &p : out)
        {
            if (std::isnan(p))
                continue;
            if (!std::isnan(prev_raw))
            {
                const double raw = p;
                p = prev_out + wrap_phase(raw - prev_raw);
                prev_raw = raw;
            }
            else
                prev_raw = p;
            prev_out = p;
        }
        return out;
    }

    void write_stats_csv(std::ostream &out, const ChannelStats &stats)
    {
        out << "element,power_db,ds_ns,phase_rad,aod_deg,tau_ns\n";
        for (int i = 0; i < stats.n_elements(); ++i)
        {
            const auto k = std::size_t(i);
            out << fmt::format("{},{:.10g},{:.10g},{:.12g},{:.10g},{:.10g}\n", i + 1, stats.power_db[k],
                               stats.delay_spread[k] * 1e9, stats.los_phase[k], rad2deg(stats.aod[k]),
                               stats.los_delay[k] * 1e9);
        }
    }

    void write_pdp_csv(std::ostream &out, std::span<const PowerDelayProfile> pdps)
    {
        out << "element,bin,delay_ns,power_db\n";
        for (const auto &pdp : pdps)
            for (int m = 0; m < pdp.n_bins(); ++m)
            {
                const double p = pdp.powers[std::size_t(m)];
                const double db = p > 0.0 ? std::max(10.0 * std::log10(p), -300.0) : -300.0;
                out << fmt::format("{},{},{:.6f},{:.6f}\n", pdp.element, m, pdp.delay(m) * 1e9, db);
            }
    }

} // namespace nearfield
