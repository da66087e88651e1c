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

#ifndef NEARFIELD_FFT_HPP
#define NEARFIELD_FFT_HPP

#include "nearfield/types.hpp"

#include <span>
#include <vector>

namespace nearfield::detail
{
    // Unitary DFT pair backed by FFTW. inverse: x_m = N^-1/2 sum_k X_k exp(+j 2 pi k m / N).
    std::vector<cdouble> dft_unitary(std::span<const cdouble> x);
    std::vector<cdouble> idft_unitary(std::span<const cdouble> x);

} // namespace nearfield::detail

#endif
