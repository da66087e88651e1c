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

#include <stdexcept>

namespace nearfield
{
    namespace
    {
        // Laboratory room: 64-element virtual array along +x at 2.5 m; Rx 14 m from element 1 at 135 deg
        // from the axis.
        constexpr std::string_view kLosLab = R"(# los_lab: line-of-sight laboratory
[array]
n_elements = 64
origin = 0, 0, 2.5
axis = 1, 0, 0

[sweep]
f_start = 11e9
f_stop = 15e9
n_points = 801

[rx]
position = -9.8995, 9.8995, 2.5

# floor and ceiling
[wall]
point = 0, 0, 0
normal = 0, 0, 1
gamma = 0.3

[wall]
point = 0, 0, 4.5
normal = 0, 0, -1
gamma = 0.2

# wall behind the array
[wall]
point = 0, -1.5, 0
normal = 0, 1, 0
gamma = 0.15

# furniture behind the array
[scatterer]
position = -1.0, -3.0, 2.5
amplitude = 0.17

[scatterer]
position = 2.5, -4.0, 1.5
amplitude = 0.19
)";

        // Same room; a 1 m x 1 m baffle 3 mm in front of the array whose edge meets the LOS ray
        // of element 25.5; elements 26..64 lie in its shadow.
        constexpr std::string_view kOlosBaffle = R"(# olos_baffle: los_lab with a baffle shadowing elements 26 and up
[array]
n_elements = 64
origin = 0, 0, 2.5
axis = 1, 0, 0

[sweep]
f_start = 11e9
f_stop = 15e9
n_points = 801

[rx]
position = -9.8995, 9.8995, 2.5

[wall]
point = 0, 0, 0
normal = 0, 0, 1
gamma = 0.3

[wall]
point = 0, 0, 4.5
normal = 0, 0, -1
gamma = 0.2

[wall]
point = 0, -1.5, 0
normal = 0, 1, 0
gamma = 0.15

[scatterer]
position = -1.0, -3.0, 2.5
amplitude = 0.17

[scatterer]
position = 2.5, -4.0, 1.5
amplitude = 0.19

[blocker]
center = 0.7794, 0.003, 2.5
width = 1.0
height = 1.0
normal = 0, -1, 0
)";
    } // namespace

    std::vector<std::string> preset_names() { return {"los_lab", "olos_baffle"}; }

    bool is_preset(std::string_view name) { return name == "los_lab" || name == "olos_baffle"; }

    std::string_view preset_text(std::string_view name)
    {
        if (name == "los_lab")
            return kLosLab;
        if (name == "olos_baffle")
            return kOlosBaffle;
        throw std::out_of_range("unknown preset '" + std::string(name) + "'");
    }

    Scene load_preset(std::string_view name) { return parse_scene(preset_text(name)); }

} // namespace nearfield
