// Copyright 2026 The qkvp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Derivative-free Nelder-Mead simplex minimizer.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "qkvp/core.hpp"

namespace qkvp {

struct NelderMeadOptions {
    int max_iterations = 2000;
    double target = -std::numeric_limits<double>::infinity(); ///< stop once f <= target
    double f_tolerance = 1e-14;   ///< stop when simplex f-spread falls below
    double x_tolerance = 1e-10;   ///< ...and the simplex diameter falls below
    double initial_step = 0.5;
    // standard coefficients
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool reached_target = false;
};

using Objective = std::function<double(const std::vector<double> &)>;

inline NelderMeadResult nelder_mead(const Objective &f, std::vector<double> x0, const NelderMeadOptions &opt = {}) {
    const std::size_t n = x0.size();
    if (n == 0) {
        throw Error("nelder_mead: empty parameter vector");
    }
    NelderMeadResult result;
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += opt.initial_step;
    }
    auto eval = [&](const std::vector<double> &x) {
        ++result.evaluations;
        return f(x);
    };
    for (std::size_t i = 0; i <= n; ++i) {
        values[i] = eval(simplex[i]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    auto blend = [n](const std::vector<double> &base, const std::vector<double> &toward, double t,
                     std::vector<double> &out) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = base[i] + t * (toward[i] - base[i]);
        }
    };

    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n - 1];
        if (values[best] <= opt.target) {
            result.reached_target = true;
            break;
        }
        double diameter = 0.0;
        for (std::size_t v = 0; v <= n; ++v) {
            for (std::size_t i = 0; i < n; ++i) {
                diameter = std::max(diameter, std::abs(simplex[v][i] - simplex[best][i]));
            }
        }
        if (values[worst] - values[best] <= opt.f_tolerance && diameter <= opt.x_tolerance) {
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v <= n; ++v) {
            if (v == worst) {
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                centroid[i] += simplex[v][i] / static_cast<double>(n);
            }
        }

        // reflect worst through centroid
        blend(centroid, simplex[worst], -opt.reflection, trial);
        const double f_reflect = eval(trial);
        if (f_reflect < values[best]) {
            blend(centroid, simplex[worst], -opt.reflection * opt.expansion, trial2);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
            continue;
        }
        // contraction, outside if the reflected point improved on the worst
        const bool outside = f_reflect < values[worst];
        if (outside) {
            blend(centroid, trial, opt.contraction, trial2);
        } else {
            blend(centroid, simplex[worst], opt.contraction, trial2);
        }
        const double f_contract = eval(trial2);
        if (f_contract < (outside ? f_reflect : values[worst])) {
            simplex[worst] = trial2;
            values[worst] = f_contract;
            continue;
        }
        for (std::size_t v = 0; v <= n; ++v) {
            if (v == best) {
                continue;
            }
            blend(simplex[best], simplex[v], opt.shrink, trial);
            simplex[v] = trial;
            values[v] = eval(simplex[v]);
        }
    }

    const auto best_it = std::min_element(values.begin(), values.end());
    const std::size_t best = static_cast<std::size_t>(best_it - values.begin());
    result.x = simplex[best];
    result.f = values[best];
    result.iterations = iter;
    result.reached_target = result.reached_target || result.f <= opt.target;
    return result;
}

} // namespace qkvp
