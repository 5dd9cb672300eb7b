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

#ifndef OMAS_BOUNDS_HPP
#define OMAS_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "omas/error.hpp"
#include "omas/protocols.hpp"

namespace omas {

/// Strict-decrease margin for empirical error sequences.
inline constexpr double kDecreaseTol = 1e-12;
/// Slack when comparing an empirical error against a theoretical band.
inline constexpr double kBandTol = 1e-9;

/// Theoretical guarantees after one network change.
struct BoundsReport {
  std::size_t transient_time = 0;
  std::size_t convergence_time = 0;
  double tracking_bound = 0.0;
  double steady_bound = 0.0;
  bool assumptions_ok = true;
  std::vector<std::string> reasons;
  /// Dwell time at least the convergence time, so the error band is reached
  /// before the next change. Unknown dwell counts as guaranteed.
  bool bounded_error_guaranteed = true;
  /// Applicability condition for this protocol family.
  std::string conditions;
};

namespace detail {

/// ceil() that treats values within 1e-9 (relative) of an integer as that
/// integer, e.g. 1.8 / (0.03 - 0.02) is 180.00000000000003 in binary.
inline std::size_t ceil_ticks(double v) {
  if (v <= 0.0) return 0;
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(v));
}

/// `lead` is the largest state minus the target at the change (mirrored for
/// min). The lower-bound argument needs lead >= -Pi: the front of the largest
/// state reaches every agent after diameter ticks only if that state already
/// dominates the target. Agents that ran at least one tick always satisfy it;
/// arbitrary initial states may not, and then the bound holds one tick late.
inline BoundsReport approximate_bounds(std::size_t diam, double alpha, double slope, double lead,
                                       std::optional<std::size_t> dwell, bool strict) {
  if (alpha <= 0.0) throw Error("alpha must be positive");
  if (slope < 0.0) throw Error("slope bound must be nonnegative");
  BoundsReport r;
  r.conditions = "alpha > Pi & dwell >= diameter";
  r.transient_time = diam;
  r.tracking_bound = static_cast<double>(diam + 1) * slope + alpha * static_cast<double>(diam);
  r.steady_bound = alpha * static_cast<double>(diam);
  if (!(alpha > slope)) {
    std::ostringstream os;
    os << "decay alpha = " << alpha << " does not exceed the input slope bound Pi = " << slope;
    if (strict) throw AssumptionViolation(os.str());
    r.assumptions_ok = false;
    r.reasons.push_back(os.str());
    r.convergence_time = diam;
  } else {
    r.convergence_time =
        std::max(diam, ceil_ticks(std::max(lead, 0.0) / (alpha - slope)));
  }
  if (lead < -slope - kBandTol) {
    std::ostringstream os;
    os << "largest state trails the target by " << -lead << " > Pi = " << slope
       << " at the change";
    r.assumptions_ok = false;
    r.reasons.push_back(os.str());
  }
  if (dwell && *dwell < diam) {
    r.assumptions_ok = false;
    r.reasons.push_back("dwell time " + std::to_string(*dwell) + " is shorter than the diameter " +
                        std::to_string(diam));
  }
  if (dwell && *dwell < r.convergence_time) r.bounded_error_guaranteed = false;
  return r;
}

inline BoundsReport exact_bounds(std::size_t depth, double slope, std::optional<std::size_t> diam,
                                 std::optional<std::size_t> dwell) {
  if (depth < 1) throw Error("diameter bound must be at least 1");
  if (slope < 0.0) throw Error("slope bound must be nonnegative");
  BoundsReport r;
  r.conditions = "dwell >= Delta >= diameter";
  r.transient_time = depth;
  r.convergence_time = depth;
  r.tracking_bound = static_cast<double>(depth + 1) * slope;
  r.steady_bound = 0.0;
  if (diam && *diam > depth) {
    r.assumptions_ok = false;
    r.reasons.push_back("diameter " + std::to_string(*diam) + " exceeds the bound Delta = " +
                        std::to_string(depth));
  }
  if (dwell && *dwell < depth) {
    r.assumptions_ok = false;
    r.bounded_error_guaranteed = false;
    r.reasons.push_back("dwell time " + std::to_string(*dwell) + " is shorter than Delta = " +
                        std::to_string(depth));
  }
  return r;
}

}  // namespace detail

/// Guarantees for the approximate max protocol after a change, from the
/// diameter, decay, slope bound, the agents' states and the true maximum at
/// the change tick. With strict checking, alpha <= Pi throws.
inline BoundsReport admc_bounds(std::size_t diam, double alpha, double slope,
                                std::span<const double> x_at_change, double u_max_at_change,
                                std::optional<std::size_t> dwell = std::nullopt,
                                bool strict = false) {
  double lead = x_at_change.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  for (double x : x_at_change) lead = std::max(lead, x - u_max_at_change);
  return detail::approximate_bounds(diam, alpha, slope, lead, dwell, strict);
}

/// Mirror of admc_bounds: the overshoot is how far states sit below the true
/// minimum.
inline BoundsReport admc_min_bounds(std::size_t diam, double alpha, double slope,
                                    std::span<const double> x_at_change, double u_min_at_change,
                                    std::optional<std::size_t> dwell = std::nullopt,
                                    bool strict = false) {
  double lead = x_at_change.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  for (double x : x_at_change) lead = std::max(lead, u_min_at_change - x);
  return detail::approximate_bounds(diam, alpha, slope, lead, dwell, strict);
}

inline BoundsReport edmc_bounds(std::size_t depth, double slope,
                                std::optional<std::size_t> diam = std::nullopt,
                                std::optional<std::size_t> dwell = std::nullopt) {
  return detail::exact_bounds(depth, slope, diam, dwell);
}

inline BoundsReport edmc_min_bounds(std::size_t depth, double slope,
                                    std::optional<std::size_t> diam = std::nullopt,
                                    std::optional<std::size_t> dwell = std::nullopt) {
  return detail::exact_bounds(depth, slope, diam, dwell);
}

/// Dispatch on protocol parameters. `target` is the true extremum at the
/// change tick and `x_at_change` the agents' outputs there.
inline BoundsReport bounds_for(const ProtocolParams& params, std::size_t diam, double slope,
                               std::span<const double> x_at_change, double target,
                               std::optional<std::size_t> dwell = std::nullopt,
                               bool strict = false) {
  if (params.variant == Variant::exact)
    return edmc_bounds(params.depth, slope, diam, dwell);
  return params.mode == Mode::max
             ? admc_bounds(diam, params.alpha, slope, x_at_change, target, dwell, strict)
             : admc_min_bounds(diam, params.alpha, slope, x_at_change, target, dwell, strict);
}

struct DetectedTimes {
  std::size_t transient_time = 0;
  std::size_t convergence_time = 0;
  bool converged = true;
};

/// Empirical transient and convergence offsets for one window of errors,
/// `errors[0]` being the error at the change tick.
///
/// Convergence: first offset from which every later error in the window is
/// within the band. Transient: first offset from which the error strictly
/// decreases at every step until convergence, ignoring steps that start inside
/// the band. If the last error is outside the band the window did not
/// converge; both times are then the window length.
inline DetectedTimes detect_times(std::span<const double> errors, double band) {
  DetectedTimes t;
  const std::size_t n = errors.size();
  if (n == 0) return t;
  std::size_t conv = n;
  while (conv > 0 && errors[conv - 1] <= band + kBandTol) --conv;
  if (conv == n) {
    t.converged = false;
    t.transient_time = t.convergence_time = n;
    return t;
  }
  t.convergence_time = conv;
  std::size_t trans = conv;
  while (trans > 0) {
    const std::size_t s = trans - 1;
    const bool inside = errors[s] <= band + kBandTol;
    if (!inside && !(errors[s + 1] < errors[s] - kDecreaseTol)) break;
    --trans;
  }
  t.transient_time = trans;
  return t;
}

struct WindowAudit {
  std::size_t decrease_checks = 0;
  std::size_t decrease_violations = 0;
  std::size_t band_checks = 0;
  std::size_t band_violations = 0;
  /// Smallest observed one-step decrease among the decrease checks.
  double min_decrease = 0.0;
  std::vector<std::string> messages;

  bool ok() const { return decrease_violations == 0 && band_violations == 0; }
};

/// Checks the two tracking conditions on one window `errors[0..n)` that
/// starts at a change and ends just before the next one:
///  - strict decrease on [T^t, min(T^c, n-1)) at every step whose error is
///    above the band;
///  - error within the band on [T^c, n) when the window outlasts T^c.
inline WindowAudit audit_window(std::span<const double> errors, const BoundsReport& report,
                                long long change_tick = 0) {
  WindowAudit a;
  a.min_decrease = std::numeric_limits<double>::infinity();
  const std::size_t n = errors.size();
  const double band = report.tracking_bound;
  const std::size_t dec_end = std::min(report.convergence_time, n == 0 ? 0 : n - 1);
  for (std::size_t s = report.transient_time; s < dec_end; ++s) {
    if (errors[s] <= band + kBandTol) continue;
    ++a.decrease_checks;
    const double drop = errors[s] - errors[s + 1];
    a.min_decrease = std::min(a.min_decrease, drop);
    if (!(drop > kDecreaseTol)) {
      ++a.decrease_violations;
      a.messages.push_back("error did not decrease at tick " +
                           std::to_string(change_tick + static_cast<long long>(s)));
    }
  }
  if (report.convergence_time < n) {
    for (std::size_t s = report.convergence_time; s < n; ++s) {
      ++a.band_checks;
      if (errors[s] > band + kBandTol) {
        ++a.band_violations;
        a.messages.push_back("error " + std::to_string(errors[s]) + " above band " +
                             std::to_string(band) + " at tick " +
                             std::to_string(change_tick + static_cast<long long>(s)));
      }
    }
  }
  return a;
}

}  // namespace omas

#endif  // OMAS_BOUNDS_HPP
