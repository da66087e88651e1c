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

#include "nearfield/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

namespace nearfield
{
    namespace
    {
        void accumulate_blockage(PropagationPath &path, const Scene &scene)
        {
            const double lambda_c = scene.sweep.center_wavelength();
            for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
            {
                const Vec3 &a = path.vertices[i];
                const Vec3 &b = path.vertices[i + 1];
                if ((b - a).norm() < 1e-12)
                    continue;
                for (const auto &blocker : scene.blockers)
                {
                    const auto occ = occludes(blocker, a, b, lambda_c);
                    if (!occ.crosses_plane)
                        continue;
                    path.clearances.push_back(occ.edge);
                    path.blockage_db += knife_edge_loss(occ.nu);
                }
            }
        }

        std::uint64_t splitmix64(std::uint64_t x)
        {
            x += 0x9E3779B97F4A7C15ull;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
            return x ^ (x >> 31);
        }

        // 53-bit uniform in (0, 1]
        double to_unit(std::uint64_t x) { return (double(x >> 11) + 1.0) * 0x1.0p-53; }

        template <typename T>
        void put_le(std::ostream &out, T value)
        {
            unsigned char bytes[sizeof(T)];
            std::memcpy(bytes, &value, sizeof(T));
            if constexpr (std::endian::native == std::endian::big)
                std::reverse(std::begin(bytes), std::end(bytes));
            out.write(reinterpret_cast<const char *>(bytes), sizeof(T));
        }

        template <typename T>
        T get_le(std::istream &in)
        {
            unsigned char bytes[sizeof(T)];
            if (!in.read(reinterpret_cast<char *>(bytes), sizeof(T)))
                throw std::runtime_error("truncated binary CFR");
            if constexpr (std::endian::native == std::endian::big)
                std::reverse(std::begin(bytes), std::end(bytes));
            T value;
            std::memcpy(&value, bytes, sizeof(T));
            return value;
        }

        constexpr char kMagic[8] = {'N', 'F', 'C', 'F', 'R', '0', '0', '1'};
    } // namespace

    const char *to_string(PathKind kind)
    {
        switch (kind)
        {
        case PathKind::los: return "los";
        case PathKind::wall_reflection: return "wall";
        case PathKind::scatterer: return "scatterer";
        }
        return "?";
    }

    double knife_edge_loss(double nu)
    {
        if (!(nu > -0.78))
            return 0.0;
        const double v = nu - 0.1;
        return 6.9 + 20.0 * std::log10(std::sqrt(v * v + 1.0) + v);
    }

    double PropagationPath::blockage_db_at(double wavelength) const
    {
        double loss = 0.0;
        for (const auto &c : clearances)
            loss += knife_edge_loss(fresnel_parameter(c, wavelength));
        return loss;
    }

    cdouble PropagationPath::response(double frequency) const
    {
        const double lambda = kSpeedOfLight / frequency;
        double amplitude = interaction_gain * lambda / (4.0 * kPi * length);
        if (!clearances.empty())
            amplitude *= std::pow(10.0, -blockage_db_at(lambda) / 20.0);
        return std::polar(amplitude, -kTwoPi * frequency * length / kSpeedOfLight);
    }

    std::vector<PropagationPath> enumerate_paths(const Scene &scene, int n)
    {
        const Vec3 e = element_position(scene, n);
        const Vec3 &rx = scene.rx;
        std::vector<PropagationPath> paths;
        paths.reserve(1 + scene.walls.size() + scene.scatterers.size());

        {
            PropagationPath los;
            los.kind = PathKind::los;
            los.vertices = {e, rx};
            los.length = (rx - e).norm();
            accumulate_blockage(los, scene);
            paths.push_back(std::move(los));
        }

        for (const auto &wall : scene.walls)
        {
            const double de = (e - wall.point).dot(wall.normal);
            const double dr = (rx - wall.point).dot(wall.normal);
            if (!(de * dr > 0.0)) // specular point exists only with both ends strictly on the same side
                continue;
            const Vec3 image = rx - 2.0 * dr * wall.normal;
            const Vec3 spec = e + (de / (de + dr)) * (image - e);

            PropagationPath p;
            p.kind = PathKind::wall_reflection;
            p.vertices = {e, spec, rx};
            p.length = (image - e).norm();
            p.interaction_gain = wall.gamma;
            accumulate_blockage(p, scene);
            paths.push_back(std::move(p));
        }

        for (const auto &sc : scene.scatterers)
        {
            PropagationPath p;
            p.kind = PathKind::scatterer;
            p.vertices = {e, sc.position, rx};
            p.length = (sc.position - e).norm() + (rx - sc.position).norm();
            p.interaction_gain = sc.amplitude;
            accumulate_blockage(p, scene);
            paths.push_back(std::move(p));
        }
        return paths;
    }

    double los_fresnel_parameter(const Scene &scene, int n)
    {
        const Vec3 e = element_position(scene, n);
        double nu = -std::numeric_limits<double>::infinity();
        for (const auto &b : scene.blockers)
            nu = std::max(nu, occludes(b, e, scene.rx, scene.sweep.center_wavelength()).nu);
        return nu;
    }

    std::vector<cdouble> Cfr::row(int n) const
    {
        if (n < 1 || n > n_elements())
            throw std::out_of_range(fmt::format("element index {} outside 1..{}", n, n_elements()));
        std::vector<cdouble> out(static_cast<std::size_t>(n_points()));
        for (int k = 0; k < n_points(); ++k)
            out[std::size_t(k)] = values(n - 1, k);
        return out;
    }

    cdouble noise_sample(std::uint64_t seed, int element, int freq_index, double variance)
    {
        std::uint64_t x = splitmix64(seed);
        x = splitmix64(x ^ std::uint64_t(std::uint32_t(element)));
        x = splitmix64(x ^ (std::uint64_t(std::uint32_t(freq_index)) << 32));
        const double u1 = to_unit(x);
        const double u2 = to_unit(splitmix64(x));
        const double radius = std::sqrt(-2.0 * std::log(u1)) * std::sqrt(0.5 * variance);
        return std::polar(radius, kTwoPi * u2);
    }

    Cfr synthesize_cfr(const Scene &scene, const SynthOptions &options)
    {
        const int n_el = scene.array.n_elements;
        const int n_pt = scene.sweep.n_points;
        Cfr cfr{Eigen::MatrixXcd::Zero(n_el, n_pt), scene.sweep};

        const bool add_noise = options.noise && scene.noise_floor_dbm.has_value();
        const double noise_var = add_noise ? std::pow(10.0, (*scene.noise_floor_dbm - 10.0) / 10.0) : 0.0;

        auto fill_rows = [&](int first, int last) {
            for (int n = first; n <= last; ++n)
            {
                auto paths = enumerate_paths(scene, n);
                if (options.los_only)
                    paths.resize(1);
                for (int k = 0; k < n_pt; ++k)
                {
                    const double f = scene.sweep.frequency(k);
                    cdouble h = 0.0;
                    for (const auto &p : paths)
                        h += p.response(f);
                    if (add_noise)
                        h += noise_sample(scene.seed, n, k, noise_var);
                    cfr.values(n - 1, k) = h;
                }
            }
        };

        const unsigned workers = std::clamp(options.threads, 1u, unsigned(std::max(n_el, 1)));
        if (workers == 1)
        {
            fill_rows(1, n_el);
            return cfr;
        }
        // each worker owns a disjoint set of rows
        std::vector<std::jthread> pool;
        const int chunk = (n_el + int(workers) - 1) / int(workers);
        for (int first = 1; first <= n_el; first += chunk)
            pool.emplace_back(fill_rows, first, std::min(n_el, first + chunk - 1));
        pool.clear();
        return cfr;
    }

    Cfr synthesize_los_cfr(const Scene &scene)
    {
        SynthOptions opt;
        opt.los_only = true;
        opt.noise = false;
        return synthesize_cfr(scene, opt);
    }

    Cfr concat_elements(const Cfr &first, const Cfr &second)
    {
        if (!(first.sweep == second.sweep) || first.n_points() != second.n_points())
            throw std::invalid_argument("concat_elements: sweeps differ");
        Cfr out{Eigen::MatrixXcd(first.n_elements() + second.n_elements(), first.n_points()), first.sweep};
        out.values.topRows(first.n_elements()) = first.values;
        out.values.bottomRows(second.n_elements()) = second.values;
        return out;
    }

    void write_cfr_csv(std::ostream &out, const Cfr &cfr)
    {
        out << "element,f_hz,re,im\n";
        for (int n = 0; n < cfr.n_elements(); ++n)
            for (int k = 0; k < cfr.n_points(); ++k)
            {
                const auto v = cfr.values(n, k);
                out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", n + 1, cfr.sweep.frequency(k), v.real(), v.imag());
            }
    }

    Cfr read_cfr_csv(std::istream &in)
    {
        std::string line;
        if (!std::getline(in, line) || line.rfind("element,f_hz,re,im", 0) != 0)
            throw std::runtime_error("CFR CSV: missing header 'element,f_hz,re,im'");

        struct Entry
        {
            int element;
            double f, re, im;
        };
        std::vector<Entry> entries;
        int line_no = 1;
        while (std::getline(in, line))
        {
            ++line_no;
            if (line.empty() || line == "\r")
                continue;
            Entry e{};
            std::istringstream ss(line);
            char c1 = 0, c2 = 0, c3 = 0;
            if (!(ss >> e.element >> c1 >> e.f >> c2 >> e.re >> c3 >> e.im) || c1 != ',' || c2 != ',' || c3 != ',')
                throw std::runtime_error(fmt::format("CFR CSV: malformed line {}", line_no));
            entries.push_back(e);
        }
        if (entries.empty())
            throw std::runtime_error("CFR CSV: no data");

        int n_el = 0;
        for (const auto &e : entries)
            n_el = std::max(n_el, e.element);
        if (entries.size() % std::size_t(n_el) != 0)
            throw std::runtime_error("CFR CSV: ragged element rows");
        const int n_pt = int(entries.size() / std::size_t(n_el));
        if (n_pt < 2)
            throw std::runtime_error("CFR CSV: need at least two frequency points");

        Cfr cfr{Eigen::MatrixXcd(n_el, n_pt), Sweep{entries.front().f, entries[std::size_t(n_pt - 1)].f, n_pt}};
        for (std::size_t i = 0; i < entries.size(); ++i)
        {
            const auto &e = entries[i];
            const int expected = int(i) / n_pt + 1;
            if (e.element != expected)
                throw std::runtime_error("CFR CSV: rows must be grouped by element in ascending order");
            cfr.values(e.element - 1, int(i) % n_pt) = {e.re, e.im};
        }
        return cfr;
    }

    void write_cfr_binary(std::ostream &out, const Cfr &cfr)
    {
        out.write(kMagic, sizeof(kMagic));
        put_le<std::uint32_t>(out, std::uint32_t(cfr.n_elements()));
        put_le<std::uint32_t>(out, std::uint32_t(cfr.n_points()));
        put_le<double>(out, cfr.sweep.f_start);
        put_le<double>(out, cfr.sweep.f_stop);
        for (int n = 0; n < cfr.n_elements(); ++n)
            for (int k = 0; k < cfr.n_points(); ++k)
            {
                put_le<double>(out, cfr.values(n, k).real());
                put_le<double>(out, cfr.values(n, k).imag());
            }
    }

    Cfr read_cfr_binary(std::istream &in)
    {
        char magic[sizeof(kMagic)];
        if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
            throw std::runtime_error("binary CFR: bad magic");
        const auto n_el = get_le<std::uint32_t>(in);
        const auto n_pt = get_le<std::uint32_t>(in);
        Cfr cfr;
        cfr.sweep.f_start = get_le<double>(in);
        cfr.sweep.f_stop = get_le<double>(in);
        cfr.sweep.n_points = int(n_pt);
        cfr.values.resize(n_el, n_pt);
        for (std::uint32_t n = 0; n < n_el; ++n)
            for (std::uint32_t k = 0; k < n_pt; ++k)
            {
                const double re = get_le<double>(in);
                const double im = get_le<double>(in);
                cfr.values(n, k) = {re, im};
            }
        return cfr;
    }

} // namespace nearfield
