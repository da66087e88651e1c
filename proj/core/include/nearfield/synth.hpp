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

#ifndef NEARFIELD_SYNTH_HPP
#define NEARFIELD_SYNTH_HPP

#include "nearfield/scene.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <vector>

namespace nearfield
{
    enum class PathKind
    {
        los,
        wall_reflection,
        scatterer
    };

    const char *to_string(PathKind kind);

    struct PropagationPath
    {
        PathKind kind = PathKind::los;
        std::vector<Vec3> vertices;            // element, interaction points..., rx
        double length = 0.0;                   // m
        double interaction_gain = 1.0;         // gamma or scattering amplitude; 1 for LOS
        double blockage_db = 0.0;              // summed knife-edge loss at the sweep center
        std::vector<EdgeClearance> clearances; // one per (segment, blocker) pair whose plane the segment crosses

        /// Summed knife-edge loss at a given wavelength.
        double blockage_db_at(double wavelength) const;

        /// interaction_gain * lambda / (4 pi length) * 10^(-blockage/20) * exp(-j 2 pi f length / c).
        cdouble response(double frequency) const;
    };

    /// Knife-edge diffraction loss in dB:
    /// J(nu) = 6.9 + 20 log10(sqrt((nu - 0.1)^2 + 1) + nu - 0.1) for nu > -0.78, else 0.
    double knife_edge_loss(double nu);

    /// Largest Fresnel parameter of the direct element-to-Rx segment over all blockers at the sweep center;
    /// -inf when no blocker plane is crossed.
    double los_fresnel_parameter(const Scene &scene, int n);

    /// LOS, one image-method reflection per wall with a valid specular point, one path per scatterer.
    std::vector<PropagationPath> enumerate_paths(const Scene &scene, int n);

    /// Complex channel frequency response: rows are elements (row 0 is element 1), columns are sweep points.
    /// Values are amplitude gains; 0 dB corresponds to the 10 dBm transmit reference.
    struct Cfr
    {
        Eigen::MatrixXcd values;
        Sweep sweep;

        int n_elements() const noexcept { return int(values.rows()); }
        int n_points() const noexcept { return int(values.cols()); }

        /// Response of element n (1-based) across the sweep.
        std::vector<cdouble> row(int n) const;
    };

    struct SynthOptions
    {
        bool los_only = false; // drop walls and scatterers
        bool noise = true;     // add noise when the scene has a noise floor
        unsigned threads = 1;  // worker threads; output is identical for any count
    };

    Cfr synthesize_cfr(const Scene &scene, const SynthOptions &options = {});

    /// Noise-free, LOS-only response: the spherical-wave ground truth of the direct path.
    Cfr synthesize_los_cfr(const Scene &scene);

    /// Stacks two responses along the element axis. Sweeps must match.
    Cfr concat_elements(const Cfr &first, const Cfr &second);

    /// Counter-based complex Gaussian sample with E|z|^2 = variance, keyed by (seed, element, frequency index).
    cdouble noise_sample(std::uint64_t seed, int element, int freq_index, double variance);

    // CSV: header "element,f_hz,re,im", one row per (element, frequency), full double precision.
    void write_cfr_csv(std::ostream &out, const Cfr &cfr);
    Cfr read_cfr_csv(std::istream &in);

    // Little-endian binary: magic "NFCFR001", u32 elements, u32 points, f64 f_start, f64 f_stop,
    // then interleaved f64 re/im in element-major order.
    void write_cfr_binary(std::ostream &out, const Cfr &cfr);
    Cfr read_cfr_binary(std::istream &in);

} // namespace nearfield

#endif
