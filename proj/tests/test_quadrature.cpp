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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qkvp/quadrature.hpp"

using namespace qkvp;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    for (int n : {1, 2, 5, 16}) {
        const QuadratureRule r = gauss_legendre(n);
        for (int p = 0; p < 2 * n; ++p) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                s += r.weights[i] * std::pow(r.nodes[i], p);
            }
            const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
            EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " p=" << p;
        }
    }
}

TEST(GaussLegendre, CompositeRuleOnInterval) {
    const QuadratureRule r = composite_gauss_legendre(0.0, 3.0, 8, 6);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        s += r.weights[i] * std::exp(-r.nodes[i]) * std::sin(r.nodes[i]);
    }
    // integral of e^{-x} sin x on [0,3]
    const double exact = 0.5 * (1.0 - std::exp(-3.0) * (std::sin(3.0) + std::cos(3.0)));
    EXPECT_NEAR(s, exact, 1e-14);
    EXPECT_EQ(r.size(), 48u);
}

TEST(GaussHermite, MomentsOfGaussian) {
    const QuadratureRule r = gauss_hermite(30);
    for (int k = 0; k <= 20; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            s += r.weights[i] * std::pow(r.nodes[i], 2 * k);
        }
        EXPECT_NEAR(s / std::tgamma(k + 0.5), 1.0, 1e-11) << "k=" << k;
    }
}

TEST(Hermite, OrthonormalUnderGaussHermite) {
    const int vmax = 10;
    const QuadratureRule r = gauss_hermite(2 * vmax + 16);
    for (int v = 0; v <= vmax; ++v) {
        for (int w = 0; w <= vmax; ++w) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                const auto p = orthonormal_hermite(vmax, r.nodes[i]);
                s += r.weights[i] * p[v] * p[w];
            }
            EXPECT_NEAR(s, v == w ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(Quadrature, RejectsBadSizes) {
    EXPECT_THROW(gauss_legendre(0), Error);
    EXPECT_THROW(gauss_hermite(0), Error);
    EXPECT_THROW(composite_gauss_legendre(1.0, 0.0, 4, 4), Error);
}
