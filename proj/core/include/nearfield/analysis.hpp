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

#ifndef NEARFIELD_ANALYSIS_HPP
#define NEARFIELD_ANALYSIS_HPP

#include "nearfield/synth.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace nearfield
{
    enum class Window
    {
        rectangular,
        hann
    };

    /// Delay-domain power of one element. Bin m sits at delay m * bin_width.
    struct PowerDelayProfile
    {
        std::vector<double> powers; // linear
        double bin_width = 0.0;     // s
        int element = 0;

        int n_bins() const noexcept { return int(powers.size()); }
        double delay(int m) const noexcept { return double(m) * bin_width; }
    };

    /// Delay resolution of an inverse DFT over the sweep grid, 1 / (n_points * step).
    /// This is 1/B to within a factor (n_points - 1) / n_points.
    double delay_bin_width(const Sweep &sweep);

    /// Window coefficients with unit coherent gain (mean 1).
    std::vector<double> window_coefficients(Window window, int n);

    /// Unitary inverse DFT of the windowed response; with the rectangular window the total power
    /// equals sum |H|^2 exactly.
    PowerDelayProfile compute_pdp(std::span<const cdouble> row, double bin_width, Window window = Window::hann,
                                  int element = 0);
    PowerDelayProfile compute_pdp(const Cfr &cfr, int n, Window window = Window::hann);

    /// 10 log10(mean |H|^2), relative to the 0 dB amplitude reference.
    double received_power_db(std::span<const cdouble> row);

    /// Same quantity from a rectangular-window profile (Parseval).
    double received_power_db(const PowerDelayProfile &pdp);

    /// RMS delay spread over bins within `threshold_db` of the peak. Delays are taken relative to the
    /// peak bin on the circular delay axis, so leakage just below zero delay does not alias to the far end.
    /// Throws AnalysisError when no bin carries power.
    double rms_delay_spread(const PowerDelayProfile &pdp, double threshold_db = 20.0);

    /// Response of the tap at delay `tau`, referred to the sweep's center point:
    /// sum_k w_k H_k exp(+j 2 pi (f_k - f_c) tau) / sum_k w_k. In the delay domain this is the window's
    /// kernel centred exactly on `tau` (main lobe +-2 bins for Hann), so a lone path at `tau` returns its
    /// center-frequency value with the exact phase whatever its amplitude slope across the band.
    cdouble tap_response(std::span<const cdouble> row, const Sweep &sweep, double tau, Window window = Window::hann);

    /// Delay near `coarse_tau` (within one bin) that maximizes |tap_response|.
    double refine_tap_delay(std::span<const cdouble> row, const Sweep &sweep, double coarse_tau,
                            Window window = Window::hann);

    struct AnalysisConfig
    {
        Window pdp_window = Window::hann;
        double ds_threshold_db = 20.0;
        int gate_half_width = 2;   // bins inspected around the LOS delay for the validity check
        double gate_snr_db = 10.0; // gate peak must exceed the median profile bin by this much
    };

    /// Per-element LOS phase (phase lag, radians), unwrapped along the array, element 1 = 0.
    /// Invalid elements carry NaN and valid[n-1] == false.
    struct LosPhase
    {
        std::vector<double> phase;
        std::vector<bool> valid;
    };

    /// Gate centred on the geometric LOS delay of each element.
    LosPhase los_phase(const Cfr &cfr, const Scene &scene, const AnalysisConfig &config = {});

    /// Data-only mode: gate centred on the strongest tap of each element.
    LosPhase los_phase(const Cfr &cfr, const AnalysisConfig &config = {});

    /// Per-element LOS angle of departure (radians from the array axis), estimated from adjacent-pair
    /// phase differences at the center frequency, assigned to pair midpoints and interpolated to elements.
    struct AodEstimate
    {
        std::vector<double> angle;
        std::vector<bool> valid;
    };

    AodEstimate estimate_aod(const Cfr &cfr, const Scene &scene, const AnalysisConfig &config = {});
    AodEstimate estimate_aod(const Cfr &cfr, double spacing, const AnalysisConfig &config = {});

    /// Channel characteristics along the array. Angular spread, shadow fading, Ricean K and the
    /// arrival angle are carried for completeness but are never estimated.
    struct ChannelStats
    {
        std::vector<double> power_db;
        std::vector<double> delay_spread; // s
        std::vector<double> los_phase;    // rad
        std::vector<double> aod;          // rad
        std::vector<double> los_delay;    // s
        std::vector<bool> los_valid;
        std::vector<bool> aod_valid;

        std::optional<std::vector<double>> angular_spread;
        std::optional<std::vector<double>> shadow_fading;
        std::optional<std::vector<double>> k_factor;
        std::optional<std::vector<double>> arrival_angle;

        int n_elements() const noexcept { return int(power_db.size()); }
    };

    /// Throws AnalysisError when element 1 has no usable LOS tap or a profile is empty.
    ChannelStats compute_stats(const Cfr &cfr, const Scene &scene, const AnalysisConfig &config = {});
    ChannelStats compute_stats(const Cfr &cfr, double spacing, const AnalysisConfig &config = {});

    /// Wraps to (-pi, pi].
    double wrap_phase(double phase);

    /// 1-D unwrap with a pi jump tolerance. NaN entries are skipped and left as NaN.
    std::vector<double> unwrap_phase(std::span<const double> phase);

    // stats.csv: element,power_db,ds_ns,phase_rad,aod_deg,tau_ns
    void write_stats_csv(std::ostream &out, const ChannelStats &stats);
    // pdp.csv: element,bin,delay_ns,power_db
    void write_pdp_csv(std::ostream &out, std::span<const PowerDelayProfile> pdps);

} // namespace nearfield

#endif
