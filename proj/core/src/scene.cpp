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

#include "nearfield/scene.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nearfield
{
    namespace
    {
        constexpr double kUnitTolerance = 1e-12;

        bool is_unit(const Vec3 &v) { return std::abs(v.norm() - 1.0) <= kUnitTolerance; }

        void require_unit(const Vec3 &v, const std::string &field)
        {
            if (!v.allFinite() || !is_unit(v))
                throw InvariantError(field, "must be a unit vector");
        }

        void require_finite(const Vec3 &v, const std::string &field)
        {
            if (!v.allFinite())
                throw InvariantError(field, "must be finite");
        }

        std::string_view trim(std::string_view s)
        {
            const auto ws = " \t\r\n";
            const auto b = s.find_first_not_of(ws);
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(ws);
            return s.substr(b, e - b + 1);
        }

        double parse_double(std::string_view s, int line, std::string_view key)
        {
            s = trim(s);
            if (!s.empty() && s.front() == '+')
                s.remove_prefix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
                throw ParseError(line, fmt::format("'{}' expects a number, got '{}'", key, s));
            return v;
        }

        template <typename Int>
        Int parse_int(std::string_view s, int line, std::string_view key)
        {
            s = trim(s);
            Int v = 0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
                throw ParseError(line, fmt::format("'{}' expects an integer, got '{}'", key, s));
            return v;
        }

        Vec3 parse_vec3(std::string_view s, int line, std::string_view key)
        {
            Vec3 v;
            int i = 0;
            while (true)
            {
                const auto comma = s.find(',');
                const auto part = s.substr(0, comma);
                if (i == 3)
                    throw ParseError(line, fmt::format("'{}' expects three comma-separated values", key));
                v[i++] = parse_double(part, line, key);
                if (comma == std::string_view::npos)
                    break;
                s.remove_prefix(comma + 1);
            }
            if (i != 3)
                throw ParseError(line, fmt::format("'{}' expects three comma-separated values", key));
            return v;
        }

        // Scales a direction to unit length unless it already is within tolerance.
        Vec3 as_direction(const Vec3 &v)
        {
            const double n = v.norm();
            if (n == 0.0 || !std::isfinite(n) || is_unit(v))
                return v;
            return v / n;
        }

        enum class Section
        {
            none,
            array,
            sweep,
            rx,
            wall,
            scatterer,
            blocker,
            noise
        };

        Section section_from_name(std::string_view name, int line)
        {
            if (name == "array")
                return Section::array;
            if (name == "sweep")
                return Section::sweep;
            if (name == "rx")
                return Section::rx;
            if (name == "wall")
                return Section::wall;
            if (name == "scatterer")
                return Section::scatterer;
            if (name == "blocker")
                return Section::blocker;
            if (name == "noise")
                return Section::noise;
            throw ParseError(line, fmt::format("unknown section [{}]", name));
        }

        std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }
        std::string fmt_vec(const Vec3 &v) { return fmt::format("{:.17g}, {:.17g}, {:.17g}", v.x(), v.y(), v.z()); }
    } // namespace

    Vec3 Blocker::width_dir() const
    {
        const Vec3 n = normal.normalized();
        Vec3 u = Vec3::UnitZ().cross(n);
        if (u.norm() < 1e-9) // horizontal screen: width along +x
            u = Vec3::UnitX();
        return u.normalized();
    }

    Vec3 Blocker::height_dir() const { return normal.normalized().cross(width_dir()).normalized(); }

    std::array<Segment, 4> Blocker::edges() const
    {
        const Vec3 hw = 0.5 * width * width_dir();
        const Vec3 hh = 0.5 * height * height_dir();
        const Vec3 p00 = center - hw - hh, p10 = center + hw - hh, p11 = center + hw + hh, p01 = center - hw + hh;
        return {Segment{p00, p10}, Segment{p10, p11}, Segment{p11, p01}, Segment{p01, p00}};
    }

    void validate(const Scene &scene)
    {
        const auto &a = scene.array;
        if (a.n_elements < 1)
            throw InvariantError("array.n_elements", "must be at least 1");
        if (!(a.spacing_d > 0.0) || !std::isfinite(a.spacing_d))
            throw InvariantError("array.spacing_d", "must be positive");
        require_finite(a.origin, "array.origin");
        require_unit(a.axis, "array.axis");

        const auto &s = scene.sweep;
        if (!(s.f_start > 0.0) || !std::isfinite(s.f_start))
            throw InvariantError("sweep.f_start", "must be positive");
        if (!(s.f_start < s.f_stop) || !std::isfinite(s.f_stop))
            throw InvariantError("sweep.f_stop", "must exceed f_start");
        if (s.n_points < 2)
            throw InvariantError("sweep.n_points", "must be at least 2");

        require_finite(scene.rx, "rx.position");
        for (int n = 1; n <= a.n_elements; ++n)
            if ((element_position(scene, n) - scene.rx).norm() < 1e-9)
                throw InvariantError("rx.position", fmt::format("coincides with array element {}", n));

        for (std::size_t i = 0; i < scene.walls.size(); ++i)
        {
            const auto &w = scene.walls[i];
            require_finite(w.point, fmt::format("wall[{}].point", i));
            require_unit(w.normal, fmt::format("wall[{}].normal", i));
            if (!(w.gamma >= 0.0 && w.gamma <= 1.0))
                throw InvariantError(fmt::format("wall[{}].gamma", i), "must lie in [0, 1]");
        }
        for (std::size_t i = 0; i < scene.scatterers.size(); ++i)
        {
            const auto &sc = scene.scatterers[i];
            require_finite(sc.position, fmt::format("scatterer[{}].position", i));
            if (!(sc.amplitude >= 0.0 && sc.amplitude <= 1.0))
                throw InvariantError(fmt::format("scatterer[{}].amplitude", i), "must lie in [0, 1]");
        }
        for (std::size_t i = 0; i < scene.blockers.size(); ++i)
        {
            const auto &b = scene.blockers[i];
            require_finite(b.center, fmt::format("blocker[{}].center", i));
            require_unit(b.normal, fmt::format("blocker[{}].normal", i));
            if (!(b.width > 0.0) || !std::isfinite(b.width))
                throw InvariantError(fmt::format("blocker[{}].width", i), "must be positive");
            if (!(b.height > 0.0) || !std::isfinite(b.height))
                throw InvariantError(fmt::format("blocker[{}].height", i), "must be positive");
        }
        if (scene.noise_floor_dbm && !std::isfinite(*scene.noise_floor_dbm))
            throw InvariantError("noise.floor_dbm", "must be finite");
    }

    Scene parse_scene(std::string_view text)
    {
        Scene scene;
        bool spacing_given = false, rx_given = false, height_given = false;
        double height = 0.0;
        bool seen_array = false, seen_sweep = false, seen_rx = false, seen_noise = false;
        Section section = Section::none;

        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size())
        {
            const auto eol = text.find('\n', pos);
            std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
            pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
            ++line_no;

            if (const auto c = line.find_first_of("#;"); c != std::string_view::npos)
                line = line.substr(0, c);
            line = trim(line);
            if (line.empty())
                continue;

            if (line.front() == '[')
            {
                if (line.back() != ']')
                    throw ParseError(line_no, "unterminated section header");
                section = section_from_name(trim(line.substr(1, line.size() - 2)), line_no);
                auto once = [&](bool &seen, const char *name) {
                    if (seen)
                        throw ParseError(line_no, fmt::format("section [{}] may appear only once", name));
                    seen = true;
                };
                switch (section)
                {
                case Section::array: once(seen_array, "array"); break;
                case Section::sweep: once(seen_sweep, "sweep"); break;
                case Section::rx: once(seen_rx, "rx"); break;
                case Section::noise: once(seen_noise, "noise"); break;
                case Section::wall: scene.walls.emplace_back(); break;
                case Section::scatterer: scene.scatterers.emplace_back(); break;
                case Section::blocker: scene.blockers.emplace_back(); break;
                case Section::none: break;
                }
                continue;
            }

            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ParseError(line_no, fmt::format("expected 'key = value', got '{}'", line));
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            auto unknown = [&]() { return ParseError(line_no, fmt::format("unknown key '{}' in this section", key)); };

            switch (section)
            {
            case Section::none:
                throw ParseError(line_no, "key outside of any section");
            case Section::array:
                if (key == "n_elements")
                    scene.array.n_elements = parse_int<int>(value, line_no, key);
                else if (key == "spacing_d")
                    scene.array.spacing_d = parse_double(value, line_no, key), spacing_given = true;
                else if (key == "origin")
                    scene.array.origin = parse_vec3(value, line_no, key);
                else if (key == "axis")
                    scene.array.axis = as_direction(parse_vec3(value, line_no, key));
                else if (key == "height")
                    height = parse_double(value, line_no, key), height_given = true;
                else
                    throw unknown();
                break;
            case Section::sweep:
                if (key == "f_start")
                    scene.sweep.f_start = parse_double(value, line_no, key);
                else if (key == "f_stop")
                    scene.sweep.f_stop = parse_double(value, line_no, key);
                else if (key == "n_points")
                    scene.sweep.n_points = parse_int<int>(value, line_no, key);
                else
                    throw unknown();
                break;
            case Section::rx:
                if (key == "position")
                    scene.rx = parse_vec3(value, line_no, key), rx_given = true;
                else
                    throw unknown();
                break;
            case Section::wall:
                if (key == "point")
                    scene.walls.back().point = parse_vec3(value, line_no, key);
                else if (key == "normal")
                    scene.walls.back().normal = as_direction(parse_vec3(value, line_no, key));
                else if (key == "gamma")
                    scene.walls.back().gamma = parse_double(value, line_no, key);
                else
                    throw unknown();
                break;
            case Section::scatterer:
                if (key == "position")
                    scene.scatterers.back().position = parse_vec3(value, line_no, key);
                else if (key == "amplitude")
                    scene.scatterers.back().amplitude = parse_double(value, line_no, key);
                else
                    throw unknown();
                break;
            case Section::blocker:
                if (key == "center")
                    scene.blockers.back().center = parse_vec3(value, line_no, key);
                else if (key == "width")
                    scene.blockers.back().width = parse_double(value, line_no, key);
                else if (key == "height")
                    scene.blockers.back().height = parse_double(value, line_no, key);
                else if (key == "normal")
                    scene.blockers.back().normal = as_direction(parse_vec3(value, line_no, key));
                else
                    throw unknown();
                break;
            case Section::noise:
                if (key == "floor_dbm")
                    scene.noise_floor_dbm = parse_double(value, line_no, key);
                else if (key == "seed")
                    scene.seed = parse_int<std::uint64_t>(value, line_no, key);
                else
                    throw unknown();
                break;
            }
        }

        if (!rx_given)
            throw ParseError(line_no, "missing [rx] position");
        if (height_given)
            scene.array.origin.z() = height;
        if (!spacing_given)
            scene.array.spacing_d = 0.5 * scene.sweep.center_wavelength();

        validate(scene);
        return scene;
    }

    Scene load_scene(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error(fmt::format("cannot open scenario file '{}'", path.string()));
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_scene(buf.str());
    }

    std::string serialize_scene(const Scene &scene)
    {
        std::string out;
        auto line = [&out](std::string_view key, const std::string &value) {
            out += fmt::format("{} = {}\n", key, value);
        };

        out += "[array]\n";
        line("n_elements", std::to_string(scene.array.n_elements));
        line("spacing_d", fmt_double(scene.array.spacing_d));
        line("origin", fmt_vec(scene.array.origin));
        line("axis", fmt_vec(scene.array.axis));

        out += "\n[sweep]\n";
        line("f_start", fmt_double(scene.sweep.f_start));
        line("f_stop", fmt_double(scene.sweep.f_stop));
        line("n_points", std::to_string(scene.sweep.n_points));

        out += "\n[rx]\n";
        line("position", fmt_vec(scene.rx));

        for (const auto &w : scene.walls)
        {
            out += "\n[wall]\n";
            line("point", fmt_vec(w.point));
            line("normal", fmt_vec(w.normal));
            line("gamma", fmt_double(w.gamma));
        }
        for (const auto &s : scene.scatterers)
        {
            out += "\n[scatterer]\n";
            line("position", fmt_vec(s.position));
            line("amplitude", fmt_double(s.amplitude));
        }
        for (const auto &b : scene.blockers)
        {
            out += "\n[blocker]\n";
            line("center", fmt_vec(b.center));
            line("width", fmt_double(b.width));
            line("height", fmt_double(b.height));
            line("normal", fmt_vec(b.normal));
        }

        out += "\n[noise]\n";
        if (scene.noise_floor_dbm)
            line("floor_dbm", fmt_double(*scene.noise_floor_dbm));
        line("seed", std::to_string(scene.seed));
        return out;
    }

    Vec3 element_position(const Scene &scene, int n)
    {
        if (n < 1 || n > scene.array.n_elements)
            throw std::out_of_range(fmt::format("element index {} outside 1..{}", n, scene.array.n_elements));
        return scene.array.origin + double(n - 1) * scene.array.spacing_d * scene.array.axis;
    }

    TrueGeometry true_geometry(const Scene &scene, int n, const Vec3 &target)
    {
        const Vec3 v = target - element_position(scene, n);
        const double r = v.norm();
        if (!(r > 0.0))
            throw std::invalid_argument(fmt::format("target coincides with element {}", n));
        const double angle = std::atan2(scene.array.axis.cross(v).norm(), scene.array.axis.dot(v));
        return {r, angle};
    }

    double fresnel_parameter(const EdgeClearance &edge, double wavelength)
    {
        return edge.clearance * std::sqrt(2.0 * (edge.d1 + edge.d2) / (wavelength * edge.d1 * edge.d2));
    }

    Occlusion occludes(const Blocker &blocker, const Vec3 &a, const Vec3 &b, double wavelength)
    {
        Occlusion out;
        const Vec3 n = blocker.normal.normalized();
        const double da = (a - blocker.center).dot(n);
        const double db = (b - blocker.center).dot(n);
        if ((da > 0.0 && db > 0.0) || (da < 0.0 && db < 0.0) || (da == 0.0 && db == 0.0))
            return out;
        out.crosses_plane = true;

        const Vec3 ab = b - a;
        const double len = ab.norm();
        const Vec3 dir = ab / len;
        const Vec3 p = a + (da / (da - db)) * ab;

        const Vec3 u = blocker.width_dir(), v = blocker.height_dir();
        const double s = (p - blocker.center).dot(u), t = (p - blocker.center).dot(v);
        out.blocked = std::abs(s) <= 0.5 * blocker.width && std::abs(t) <= 0.5 * blocker.height;

        // closest edge point to the plane crossing
        double best = std::numeric_limits<double>::infinity();
        Vec3 edge_point = p;
        for (const auto &e : blocker.edges())
        {
            const Vec3 ev = e.b - e.a;
            const double w = std::clamp((p - e.a).dot(ev) / ev.squaredNorm(), 0.0, 1.0);
            const Vec3 q = e.a + w * ev;
            const double dist = (q - p).norm();
            if (dist < best)
                best = dist, edge_point = q;
        }

        const double h = (edge_point - a).cross(dir).norm();
        const double d1 = std::clamp((edge_point - a).dot(dir), 1e-9, len);
        const double d2 = std::max(len - d1, 1e-9);
        out.edge = {out.blocked ? h : -h, d1, d2};
        out.nu = fresnel_parameter(out.edge, wavelength);
        return out;
    }

} // namespace nearfield
