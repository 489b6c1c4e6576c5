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
 * Gauss-Legendre (composite) and Gauss-Hermite rules.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qkvp/core.hpp"

namespace qkvp {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) {
        throw Error("gauss_legendre: need at least one point");
    }
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
        return rule;
    }
    // returns {P_n(x), P_n'(x)}
    auto legendre = [n](double x) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
    };
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Composite Gauss-Legendre on [a, b] with equal-width panels.
inline QuadratureRule composite_gauss_legendre(double a, double b, int panels, int points) {
    if (!(b > a) || panels < 1) {
        throw Error("composite_gauss_legendre: need b > a and panels >= 1");
    }
    const QuadratureRule base = gauss_legendre(points);
    QuadratureRule rule;
    rule.nodes.reserve(static_cast<std::size_t>(panels) * points);
    rule.weights.reserve(rule.nodes.capacity());
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        for (int i = 0; i < points; ++i) {
            rule.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
            rule.weights.push_back(0.5 * width * base.weights[i]);
        }
    }
    return rule;
}

/// Orthonormal Hermite polynomials p_0..p_vmax at x (weight e^{-x^2}).
inline std::vector<double> orthonormal_hermite(int vmax, double x) {
    std::vector<double> p(static_cast<std::size_t>(vmax) + 1);
    p[0] = std::pow(std::numbers::pi, -0.25);
    if (vmax >= 1) {
        p[1] = std::sqrt(2.0) * x * p[0];
    }
    for (int k = 1; k < vmax; ++k) {
        p[k + 1] = std::sqrt(2.0 / (k + 1)) * x * p[k] - std::sqrt(double(k) / (k + 1)) * p[k - 1];
    }
    return p;
}

/// n-point Gauss-Hermite rule for weight e^{-x^2}. Golub-Welsch nodes polished
/// by Newton; weights from the Christoffel sum, which stays positive in the tails.
inline QuadratureRule gauss_hermite(int n) {
    if (n < 1) {
        throw Error("gauss_hermite: need at least one point");
    }
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k / 2.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = solver.eigenvalues()(i);
        for (int iter = 0; iter < 20; ++iter) {
            const auto p = orthonormal_hermite(n, x);
            const double dp = std::sqrt(2.0 * n) * p[n - 1];
            const double dx = p[n] / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) {
                break;
            }
        }
        const auto p = orthonormal_hermite(n - 1, x);
        double sum = 0.0;
        for (double pk : p) {
            sum += pk * pk;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 1.0 / sum;
    }
    return rule;
}

} // namespace qkvp
