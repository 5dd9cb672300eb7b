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

#ifndef OMAS_SIGNALS_HPP
#define OMAS_SIGNALS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "omas/error.hpp"
#include "omas/graph.hpp"
#include "omas/random.hpp"

namespace omas {

using Tick = std::int64_t;

/// Slack for comparing observed per-tick changes against a declared bound;
/// interpolation of decimal breakpoints is not exact in binary.
inline constexpr double kSlopeSlack = 1e-12;

namespace signal {

struct Constant {
  double value = 0.0;
};

/// Breakpoints (tick, value), ticks strictly increasing. Before the first
/// breakpoint and after the last the value is held.
struct Piecewise {
  enum class Interpolation { linear, step };
  std::vector<std::pair<Tick, double>> breakpoints;
  Interpolation interpolation = Interpolation::linear;
};

/// offset + amplitude * sin(2 pi k / period + phase)
struct Sinusoid {
  double offset = 0.0;
  double amplitude = 1.0;
  double period = 1.0;
  double phase = 0.0;
};

/// Uniform steps in [-step_bound, step_bound], clamped to [lo, hi]. Values are
/// expanded once up front so sampling stays a pure lookup; past the expanded
/// horizon the last value is held.
struct RandomWalk {
  double step_bound = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;

  static RandomWalk expand(double start, double step_bound, double lo, double hi,
                           Tick horizon, RandomStream& rng) {
    if (step_bound < 0.0) throw Error("random walk: negative step bound");
    if (lo > hi) throw Error("random walk: empty value range");
    RandomWalk w{step_bound, lo, hi, {}};
    double v = std::clamp(start, lo, hi);
    w.values.reserve(static_cast<std::size_t>(horizon) + 1);
    for (Tick k = 0; k <= horizon; ++k) {
      w.values.push_back(v);
      v = std::clamp(v + rng.uniform(-step_bound, step_bound), lo, hi);
    }
    return w;
  }
};

}  // namespace signal

/// One agent's reference signal.
class SignalSpec {
 public:
  using Variant = std::variant<signal::Constant, signal::Piecewise, signal::Sinusoid,
                               signal::RandomWalk>;

  SignalSpec() : v_(signal::Constant{}) {}
  template <class T>
    requires std::is_constructible_v<Variant, T&&>
  SignalSpec(T&& v) : v_(std::forward<T>(v)) {  // NOLINT
    validate();
  }

  static SignalSpec constant(double value) { return signal::Constant{value}; }
  static SignalSpec piecewise(std::vector<std::pair<Tick, double>> bps,
                              signal::Piecewise::Interpolation interp =
                                  signal::Piecewise::Interpolation::linear) {
    return signal::Piecewise{std::move(bps), interp};
  }
  static SignalSpec sinusoid(double offset, double amplitude, double period,
                             double phase = 0.0) {
    return signal::Sinusoid{offset, amplitude, period, phase};
  }

  const Variant& variant() const { return v_; }

  double sample(Tick k) const {
    return std::visit([k](const auto& s) { return eval(s, k); }, v_);
  }

  /// Upper bound on |u(k+1) - u(k)| implied by the parameters.
  double slope_bound() const {
    return std::visit([](const auto& s) { return bound(s); }, v_);
  }

  SignalSpec negated() const {
    return std::visit([](auto s) { return SignalSpec(negate(std::move(s))); }, v_);
  }

 private:
  void validate() const {
    if (const auto* p = std::get_if<signal::Piecewise>(&v_)) {
      if (p->breakpoints.empty()) throw Error("piecewise signal needs breakpoints");
      for (std::size_t i = 1; i < p->breakpoints.size(); ++i)
        if (p->breakpoints[i].first <= p->breakpoints[i - 1].first)
          throw Error("piecewise signal: breakpoint ticks must increase");
    }
    if (const auto* s = std::get_if<signal::Sinusoid>(&v_)) {
      if (!(s->period > 0.0)) throw Error("sinusoid: period must be positive");
    }
  }

  static double eval(const signal::Constant& s, Tick) { return s.value; }

  static double eval(const signal::Piecewise& s, Tick k) {
    const auto& bp = s.breakpoints;
    if (k <= bp.front().first) return bp.front().second;
    if (k >= bp.back().first) return bp.back().second;
    auto hi = std::upper_bound(bp.begin(), bp.end(), k,
                               [](Tick t, const auto& b) { return t < b.first; });
    auto lo = std::prev(hi);
    if (s.interpolation == signal::Piecewise::Interpolation::step) return lo->second;
    const double frac = static_cast<double>(k - lo->first) /
                        static_cast<double>(hi->first - lo->first);
    return lo->second + (hi->second - lo->second) * frac;
  }

  static double eval(const signal::Sinusoid& s, Tick k) {
    return s.offset +
           s.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / s.period +
                                  s.phase);
  }

  static double eval(const signal::RandomWalk& s, Tick k) {
    if (s.values.empty()) return 0.0;
    const auto idx = static_cast<std::size_t>(std::clamp<Tick>(
        k, 0, static_cast<Tick>(s.values.size()) - 1));
    return s.values[idx];
  }

  static double bound(const signal::Constant&) { return 0.0; }

  static double bound(const signal::Piecewise& s) {
    double b = 0.0;
    for (std::size_t i = 1; i < s.breakpoints.size(); ++i) {
      const double dv = std::abs(s.breakpoints[i].second - s.breakpoints[i - 1].second);
      const double dt = static_cast<double>(s.breakpoints[i].first - s.breakpoints[i - 1].first);
      b = std::max(b, s.interpolation == signal::Piecewise::Interpolation::step ? dv : dv / dt);
    }
    return b;
  }

  static double bound(const signal::Sinusoid& s) {
    return 2.0 * std::numbers::pi * std::abs(s.amplitude) / s.period;
  }

  static double bound(const signal::RandomWalk& s) { return s.step_bound; }

  static signal::Constant negate(signal::Constant s) { return {-s.value}; }
  static signal::Piecewise negate(signal::Piecewise s) {
    for (auto& b : s.breakpoints) b.second = -b.second;
    return s;
  }
  static signal::Sinusoid negate(signal::Sinusoid s) {
    s.offset = -s.offset;
    s.amplitude = -s.amplitude;
    return s;
  }
  static signal::RandomWalk negate(signal::RandomWalk s) {
    for (auto& v : s.values) v = -v;
    std::swap(s.lo, s.hi);
    s.lo = -s.lo;
    s.hi = -s.hi;
    return s;
  }

  Variant v_;
};

/// Per-agent reference signals with one certified slope bound.
///
/// Agents without an explicit entry fall back to the default spec when one is
/// set. The declared bound defaults to the largest per-spec bound; a smaller
/// explicit declaration is allowed but certify_slope() will reject it.
class SignalBank {
 public:
  SignalBank() = default;

  void set(NodeId i, SignalSpec spec) { specs_[i] = std::move(spec); }
  void set_default(SignalSpec spec) { default_ = std::move(spec); }
  void declare_slope_bound(double pi) {
    if (pi < 0.0) throw Error("slope bound must be nonnegative");
    declared_ = pi;
  }

  bool has(NodeId i) const { return specs_.count(i) != 0 || default_.has_value(); }

  const SignalSpec& spec(NodeId i) const {
    if (auto it = specs_.find(i); it != specs_.end()) return it->second;
    if (default_) return *default_;
    throw Error("no signal for agent " + std::to_string(i));
  }

  double sample(NodeId i, Tick k) const {
    if (k < 0) throw Error("signal sampled at negative tick");
    return spec(i).sample(k);
  }

  /// Declared slope bound (Pi).
  double slope_bound() const {
    if (declared_) return *declared_;
    double b = default_ ? default_->slope_bound() : 0.0;
    for (const auto& [id, s] : specs_) b = std::max(b, s.slope_bound());
    return b;
  }

  /// Largest observed |u(k+1) - u(k)| over every configured agent (and the
  /// default spec) for k < horizon. Throws AssumptionViolation when it exceeds
  /// the declared bound.
  double certify_slope(Tick horizon) const {
    if (horizon < 1) throw Error("certify_slope: horizon must be at least 1");
    double observed = 0.0;
    auto scan = [&](const SignalSpec& s) {
      double prev = s.sample(0);
      for (Tick k = 1; k <= horizon; ++k) {
        const double cur = s.sample(k);
        observed = std::max(observed, std::abs(cur - prev));
        prev = cur;
      }
    };
    if (default_) scan(*default_);
    for (const auto& [id, s] : specs_) scan(s);
    if (observed > slope_bound() + kSlopeSlack)
      throw AssumptionViolation("bounded input slope violated: observed per-tick change " +
                                std::to_string(observed) + " exceeds declared bound " +
                                std::to_string(slope_bound()));
    return observed;
  }

  double max_signal(const std::vector<NodeId>& active, Tick k) const {
    if (active.empty()) throw Error("max_signal: empty active set");
    double m = sample(active.front(), k);
    for (NodeId i : active) m = std::max(m, sample(i, k));
    return m;
  }

  double min_signal(const std::vector<NodeId>& active, Tick k) const {
    if (active.empty()) throw Error("min_signal: empty active set");
    double m = sample(active.front(), k);
    for (NodeId i : active) m = std::min(m, sample(i, k));
    return m;
  }

  SignalBank negated() const {
    SignalBank out;
    if (default_) out.default_ = default_->negated();
    for (const auto& [id, s] : specs_) out.specs_.emplace(id, s.negated());
    out.declared_ = declared_;
    return out;
  }

 private:
  std::map<NodeId, SignalSpec> specs_;
  std::optional<SignalSpec> default_;
  std::optional<double> declared_;
};

/// The six-agent reference bank of the line-topology experiment: every agent
/// holds 0.2 except agent 6, which ramps down by `slope` per tick over
/// [60, 80), holds, ramps up over [100, 140) and holds from 140 on.
inline SignalBank line6_reference_bank(double slope = 0.02) {
  const double base = 0.2;
  const double low = base - slope * 20.0;
  const double high = low + slope * 40.0;
  SignalBank bank;
  bank.set_default(SignalSpec::constant(base));
  bank.set(6, SignalSpec::piecewise({{0, base}, {60, base}, {80, low}, {100, low}, {140, high}}));
  bank.declare_slope_bound(slope);
  return bank;
}

/// Literal step reading of the same signal: constant offsets of -slope on
/// [60, 100) and +slope from 100 on. Its largest jump is 2*slope at k=100, so
/// the declared bound is 2*slope.
inline SignalBank line6_step_bank(double slope = 0.02) {
  const double base = 0.2;
  SignalBank bank;
  bank.set_default(SignalSpec::constant(base));
  bank.set(6, SignalSpec::piecewise({{0, base}, {60, base - slope}, {100, base + slope}},
                                    signal::Piecewise::Interpolation::step));
  bank.declare_slope_bound(2.0 * slope);
  return bank;
}

}  // namespace omas

#endif  // OMAS_SIGNALS_HPP
