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

#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace nearfield::detail
{
    namespace
    {
        // The FFTW planner is not thread-safe; execution of an existing plan on new arrays is.
        class PlanCache
        {
        public:
            ~PlanCache()
            {
                for (auto &[key, plan] : plans_)
                    fftw_destroy_plan(plan);
            }

            fftw_plan get(int n, int sign)
            {
                std::lock_guard lock(mutex_);
                auto it = plans_.find({n, sign});
                if (it != plans_.end())
                    return it->second;
                std::vector<cdouble> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
                fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex *>(in.data()),
                                                  reinterpret_cast<fftw_complex *>(out.data()), sign,
                                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
                plans_.emplace(std::pair{n, sign}, plan);
                return plan;
            }

        private:
            std::mutex mutex_;
            std::map<std::pair<int, int>, fftw_plan> plans_;
        };

        PlanCache &cache()
        {
            static PlanCache c;
            return c;
        }

        std::vector<cdouble> run(std::span<const cdouble> x, int sign)
        {
            const int n = int(x.size());
            std::vector<cdouble> in(x.begin(), x.end()), out(x.size());
            if (n == 0)
                return out;
            fftw_execute_dft(cache().get(n, sign), reinterpret_cast<fftw_complex *>(in.data()),
                             reinterpret_cast<fftw_complex *>(out.data()));
            const double scale = 1.0 / std::sqrt(double(n));
            for (auto &v : out)
                v *= scale;
            return out;
        }
    } // namespace

    std::vector<cdouble> dft_unitary(std::span<const cdouble> x) { return run(x, FFTW_FORWARD); }
    std::vector<cdouble> idft_unitary(std::span<const cdouble> x) { return run(x, FFTW_BACKWARD); }

} // namespace nearfield::detail
