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

#ifndef OMAS_SPECIAL_FUNCTIONS_HPP
#define OMAS_SPECIAL_FUNCTIONS_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "omas/error.hpp"

namespace omas {

namespace detail {

inline constexpr double kSpecialEps = std::numeric_limits<double>::epsilon();
inline constexpr double kTiny = 1e-300;
inline constexpr int kMaxIter = 100000;

/// x^a e^{-x} * h without spurious overflow/underflow when the product is
/// representable.
inline double scaled_power(double a, double x, double h) {
  const double log_mag = a * std::log(x) - x;
  if (std::abs(a * std::log(x)) < 600.0 && x < 600.0) return std::pow(x, a) * std::exp(-x) * h;
  return std::exp(log_mag) * h;
}

inline bool is_nonpositive_integer(double a) { return a <= 0.0 && std::floor(a) == a; }

/// Legendre continued fraction: Gamma(a, x) = x^a e^{-x} * returned value.
inline double gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kSpecialEps) return h;
  }
  throw Error("incomplete gamma continued fraction did not converge");
}

/// Lower incomplete gamma by its power series, for a > 0.
inline double lower_gamma_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 1; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kSpecialEps) return scaled_power(a, x, sum);
  }
  throw Error("incomplete gamma series did not converge");
}

}  // namespace detail

/// e^x E_n(x) for integer n >= 0 and x > 0, where
/// E_n(x) = int_1^inf e^{-x t} t^{-n} dt.
///
/// Continued fraction for x >= 1, power series otherwise. Working with the
/// scaled value keeps e^{x} E_n(x) finite for x in the thousands.
inline double scaled_exponential_integral(int n, double x) {
  if (n < 0) throw Error("exponential integral order must be nonnegative");
  if (!(x > 0.0)) throw Error("exponential integral needs x > 0, got " + std::to_string(x));
  if (n == 0) return 1.0 / x;
  using detail::kTiny;
  if (x >= 1.0) {
    double b = x + n;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < detail::kMaxIter; ++i) {
      const double a = -static_cast<double>(i) * (n - 1 + i);
      b += 2.0;
      d = 1.0 / (a * d + b);
      c = b + a / c;
      const double del = c * d;
      h *= del;
      if (std::abs(del - 1.0) < detail::kSpecialEps) return h;
    }
    throw Error("exponential integral continued fraction did not converge");
  }
  const int nm1 = n - 1;
  double ans = nm1 != 0 ? 1.0 / nm1 : -std::log(x) - std::numbers::egamma;
  double fact = 1.0;
  for (int i = 1; i < detail::kMaxIter; ++i) {
    fact *= -x / i;
    double del;
    if (i != nm1) {
      del = -fact / (i - nm1);
    } else {
      double psi = -std::numbers::egamma;
      for (int ii = 1; ii <= nm1; ++ii) psi += 1.0 / ii;
      del = fact * (-std::log(x) + psi);
    }
    ans += del;
    if (std::abs(del) < std::abs(ans) * detail::kSpecialEps) return ans * std::exp(x);
  }
  throw Error("exponential integral series did not converge");
}

inline double exponential_integral(int n, double x) {
  return scaled_exponential_integral(n, x) * std::exp(-x);
}

/// Upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt, x > 0.
///
/// Nonpositive integer a uses Gamma(1-n, x) = x^{1-n} E_n(x). Other a use the
/// continued fraction when x >= a + 1, the series complement for a > 0
/// otherwise, and the downward recurrence
///   Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a
/// for negative non-integer a with small x.
inline double upper_incomplete_gamma(double a, double x) {
  if (!(x > 0.0)) throw Error("upper incomplete gamma needs x > 0, got " + std::to_string(x));
  if (detail::is_nonpositive_integer(a)) {
    const int n = static_cast<int>(1.0 - a);
    return detail::scaled_power(a, x, scaled_exponential_integral(n, x));
  }
  if (x >= a + 1.0) return detail::scaled_power(a, x, detail::gamma_cf(a, x));
  if (a > 0.0) return std::tgamma(a) - detail::lower_gamma_series(a, x);
  const double shift = std::ceil(-a);
  double g = upper_incomplete_gamma(a + shift, x);
  for (double s = a + shift - 1.0; s >= a - 0.5; s -= 1.0)
    g = (g - detail::scaled_power(s, x, 1.0)) / s;
  return g;
}

}  // namespace omas

#endif  // OMAS_SPECIAL_FUNCTIONS_HPP
