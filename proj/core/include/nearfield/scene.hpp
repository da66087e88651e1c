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

#ifndef NEARFIELD_SCENE_HPP
#define NEARFIELD_SCENE_HPP

#include "nearfield/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nearfield
{
    /// Frequency sweep, inclusive of both end points.
    struct Sweep
    {
        double f_start = 11.0e9; // Hz
        double f_stop = 15.0e9;  // Hz
        int n_points = 801;

        double center() const noexcept { return 0.5 * (f_start + f_stop); }
        double center_wavelength() const noexcept { return kSpeedOfLight / center(); }
        double bandwidth() const noexcept { return f_stop - f_start; }
        double step() const noexcept { return bandwidth() / double(n_points - 1); }
        double frequency(int k) const noexcept { return k == n_points - 1 ? f_stop : f_start + double(k) * step(); }

        // Index of the center frequency when it falls on the grid (odd point count), else the nearest point.
        int center_index() const noexcept { return (n_points - 1) / 2; }

        bool operator==(const Sweep &) const = default;
    };

    /// Uniform linear array. Elements are indexed 1..n_elements; element 1 sits at the origin.
    struct ArraySpec
    {
        int n_elements = 64;
        double spacing_d = 0.5 * kSpeedOfLight / 13.0e9; // m, element pitch (half wavelength at 13 GHz)
        Vec3 origin = Vec3(0.0, 0.0, 2.5); // m, position of element 1
        Vec3 axis = Vec3(1.0, 0.0, 0.0);   // unit vector, direction of increasing index

        double height() const noexcept { return origin.z(); }
        double aperture() const noexcept { return double(n_elements - 1) * spacing_d; }

        bool operator==(const ArraySpec &o) const
        {
            return n_elements == o.n_elements && spacing_d == o.spacing_d && origin == o.origin && axis == o.axis;
        }
    };

    /// Infinite planar reflector, image-method specular reflection with real coefficient gamma.
    struct Wall
    {
        Vec3 point = Vec3::Zero();
        Vec3 normal = Vec3::UnitZ();
        double gamma = 0.0;

        bool operator==(const Wall &o) const { return point == o.point && normal == o.normal && gamma == o.gamma; }
    };

    /// Isotropic point re-radiator.
    struct PointScatterer
    {
        Vec3 position = Vec3::Zero();
        double amplitude = 0.0;

        bool operator==(const PointScatterer &o) const { return position == o.position && amplitude == o.amplitude; }
    };

    struct Segment
    {
        Vec3 a;
        Vec3 b;
    };

    /// Zero-thickness absorbing rectangle. The width runs horizontally (perpendicular to the normal and to +z),
    /// the height runs along the remaining in-plane direction.
    struct Blocker
    {
        Vec3 center = Vec3::Zero();
        double width = 1.0;  // m
        double height = 1.0; // m
        Vec3 normal = Vec3::UnitY();

        Vec3 width_dir() const;
        Vec3 height_dir() const;
        std::array<Segment, 4> edges() const;

        bool operator==(const Blocker &o) const
        {
            return center == o.center && width == o.width && height == o.height && normal == o.normal;
        }
    };

    struct Scene
    {
        ArraySpec array;
        Vec3 rx = Vec3::Zero();
        std::vector<Wall> walls;
        std::vector<PointScatterer> scatterers;
        std::vector<Blocker> blockers;
        Sweep sweep;
        std::optional<double> noise_floor_dbm;
        std::uint64_t seed = 0;

        bool operator==(const Scene &o) const
        {
            return array == o.array && rx == o.rx && walls == o.walls && scatterers == o.scatterers &&
                   blockers == o.blockers && sweep == o.sweep && noise_floor_dbm == o.noise_floor_dbm && seed == o.seed;
        }
    };

    /// Checks every invariant of the data model; throws InvariantError naming the field.
    void validate(const Scene &scene);

    /// Parses scenario text (bracketed sections, key = value lines). Applies defaults and validates.
    Scene parse_scene(std::string_view text);

    /// Reads and parses a scenario file. Throws std::runtime_error if the file cannot be opened.
    Scene load_scene(const std::filesystem::path &path);

    /// Writes a scenario in the same text format; `parse_scene(serialize_scene(s)) == s` holds exactly.
    std::string serialize_scene(const Scene &scene);

    // Bundled presets: "los_lab" and "olos_baffle".
    std::vector<std::string> preset_names();
    bool is_preset(std::string_view name);
    std::string_view preset_text(std::string_view name); // throws std::out_of_range for unknown names
    Scene load_preset(std::string_view name);

    Vec3 element_position(const Scene &scene, int n);

    struct TrueGeometry
    {
        double distance; // m, element to target
        double angle;    // rad, between array axis and the element->target direction
    };

    TrueGeometry true_geometry(const Scene &scene, int n, const Vec3 &target);

    /// Fresnel clearance of one path segment with respect to a diffracting edge.
    struct EdgeClearance
    {
        double clearance = 0.0; // m, positive when the edge obstructs the segment
        double d1 = 0.0;        // m, segment start to the edge crossing
        double d2 = 0.0;        // m, edge crossing to the segment end
    };

    /// Single knife-edge Fresnel parameter nu = h * sqrt(2 (d1 + d2) / (lambda d1 d2)).
    double fresnel_parameter(const EdgeClearance &edge, double wavelength);

    struct Occlusion
    {
        bool blocked = false;                  // segment crosses the rectangle
        bool crosses_plane = false;            // segment crosses the blocker plane at all
        double nu = -std::numeric_limits<double>::infinity();
        EdgeClearance edge;                    // valid when crosses_plane
    };

    /// Occlusion of segment a-b by a blocker, with nu taken from the closest rectangle edge at `wavelength`.
    /// A segment that never reaches the blocker plane reports nu = -inf.
    Occlusion occludes(const Blocker &blocker, const Vec3 &a, const Vec3 &b, double wavelength);

} // namespace nearfield

#endif
