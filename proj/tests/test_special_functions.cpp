// Copyright 2026 The omas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "omas/special_functions.hpp"
#include "oracles.hpp"

using namespace omas;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(UpperGamma, ShapeOneIsExponential) {
  EXPECT_NEAR(upper_incomplete_gamma(1.0, 2.0), std::exp(-2.0), 1e-16);
  for (double x : {0.1, 1.0, 10.0, 100.0})
    EXPECT_LE(rel(upper_incomplete_gamma(1.0, x), std::exp(-x)), 1e-14) << x;
}

TEST(UpperGamma, MinusOneAtOne) {
  const double q = oracle::upper_gamma_quadrature(-1.0, 1.0);
  EXPECT_NEAR(q, 0.148496, 1e-6);
  EXPECT_LE(rel(upper_incomplete_gamma(-1.0, 1.0), q), 1e-10);
}

TEST(UpperGamma, RecurrenceOnGrid) {
  for (int a = -10; a <= 5; ++a) {
    for (double x : {0.1, 1.0, 10.0, 100.0}) {
      const double lhs = upper_incomplete_gamma(a + 1.0, x);
      const double rhs = a * upper_incomplete_gamma(a, x) + std::pow(x, a) * std::exp(-x);
      EXPECT_LE(rel(lhs, rhs), 1e-10) << "a=" << a << " x=" << x;
    }
  }
}

TEST(UpperGamma, AgreesWithBoostAndQuadrature) {
  for (double a : {0.5, 1.5, 2.0, 3.7, 5.0})
    for (double x : {0.1, 0.9, 2.5, 10.0, 40.0})
      EXPECT_LE(rel(upper_incomplete_gamma(a, x), boost::math::tgamma(a, x)), 1e-12)
          << "a=" << a << " x=" << x;
  for (double a : {-9.0, -4.0, -2.5, -1.0, -0.5, 0.0})
    for (double x : {0.1, 1.0, 5.0, 30.0})
      EXPECT_LE(rel(upper_incomplete_gamma(a, x), oracle::upper_gamma_quadrature(a, x)), 1e-9)
          << "a=" << a << " x=" << x;
}

TEST(UpperGamma, RejectsNonPositiveX) {
  EXPECT_THROW(upper_incomplete_gamma(1.0, 0.0), Error);
  EXPECT_THROW(upper_incomplete_gamma(-3.0, -1.0), Error);
}

TEST(ExponentialIntegral, AgreesWithBoost) {
  for (int n : {1, 2, 5, 10, 50})
    for (double x : {0.01, 0.5, 0.999, 1.0, 3.0, 25.0, 300.0})
      EXPECT_LE(rel(exponential_integral(n, x), boost::math::expint(n, x)), 1e-12)
          << "n=" << n << " x=" << x;
}

TEST(ExponentialIntegral, ScaledFormStaysFiniteForLargeArguments) {
  for (double x : {800.0, 5000.0, 1e5}) {
    const double v = scaled_exponential_integral(50, x);
    EXPECT_TRUE(std::isfinite(v));
    // e^x E_n(x) ~ 1/(x + n) for large x.
    EXPECT_NEAR(v * (x + 50.0), 1.0, 1e-3);
  }
  EXPECT_THROW(scaled_exponential_integral(-1, 1.0), Error);
  EXPECT_THROW(scaled_exponential_integral(2, 0.0), Error);
}
