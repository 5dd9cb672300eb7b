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

#ifndef OMAS_SIMULATOR_HPP
#define OMAS_SIMULATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "omas/bounds.hpp"
#include "omas/error.hpp"
#include "omas/graph.hpp"
#include "omas/protocols.hpp"
#include "omas/scenario.hpp"
#include "omas/size_estimation.hpp"

namespace omas {

struct AgentSample {
  NodeId id;
  double x;
  double u;
};

/// One tick of a consensus run. `error` is the largest deviation of any
/// active agent's output from `target`, the true extremum of the active
/// agents' inputs at the same tick.
struct TickRecord {
  Tick k = 0;
  double error = 0.0;
  double target = 0.0;
  std::size_t n_active = 0;
  std::vector<AgentSample> agents;
};

struct WindowEmpirical {
  DetectedTimes times;
  WindowAudit audit;
  /// Largest error from the theoretical convergence time to the window end.
  double max_error_after_convergence = 0.0;
};

/// One inter-change window [change_tick, end_tick).
struct WindowReport {
  Tick change_tick = 0;
  Tick end_tick = 0;
  std::size_t diameter = 0;
  std::size_t n_active = 0;
  BoundsReport bounds;
  WindowEmpirical empirical;

  Tick length() const { return end_tick - change_tick; }
};

struct RunResult {
  std::string scenario;
  std::string protocol;
  std::uint64_t seed = 0;
  double slope_bound = 0.0;
  std::vector<TickRecord> trace;
  std::vector<WindowReport> windows;

  std::vector<double> errors() const {
    std::vector<double> e;
    for (const auto& r : trace) e.push_back(r.error);
    return e;
  }
  /// Windows satisfying every precondition, including dwell >= T^c.
  bool all_windows_ok() const {
    return std::all_of(windows.begin(), windows.end(), [](const WindowReport& w) {
      return !w.bounds.assumptions_ok || !w.bounds.bounded_error_guaranteed ||
             w.empirical.audit.ok();
    });
  }
};

namespace detail {

inline double target_of(Mode mode, const std::vector<double>& u) {
  return mode == Mode::max ? *std::max_element(u.begin(), u.end())
                           : *std::min_element(u.begin(), u.end());
}

inline void require_finite(const std::vector<double>& v, Tick k) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error("non-finite state at tick " + std::to_string(k));
}

/// Graph in force at each tick of [0, horizon).
class GraphTimeline {
 public:
  explicit GraphTimeline(const Scenario& s) : seq_(graph_sequence(s)) {}

  const NetworkSnapshot& at(Tick k) const {
    std::size_t i = 0;
    while (i + 1 < seq_.size() && seq_[i + 1].first <= k) ++i;
    return seq_[i].second;
  }
  std::vector<Tick> change_ticks() const {
    std::vector<Tick> t;
    for (const auto& [k, g] : seq_) t.push_back(k);
    return t;
  }

 private:
  std::vector<std::pair<Tick, NetworkSnapshot>> seq_;
};

inline void finish_window(WindowReport& w, std::span<const double> errors) {
  const std::span<const double> win =
      errors.subspan(static_cast<std::size_t>(w.change_tick),
                     static_cast<std::size_t>(w.end_tick - w.change_tick));
  w.empirical.times = detect_times(win, w.bounds.tracking_bound);
  w.empirical.audit = audit_window(win, w.bounds, w.change_tick);
  double m = 0.0;
  for (std::size_t s = w.bounds.convergence_time; s < win.size(); ++s) m = std::max(m, win[s]);
  w.empirical.max_error_after_convergence = m;
}

}  // namespace detail

/// Runs a consensus scenario over [0, horizon).
///
/// Tick convention: the record at k holds the outputs x_k, inputs u_k, the
/// target over V_k and e_k; x_{k+1} is then computed from (G_k, x_k, u_k) for
/// remaining agents and from u_{k+1} for arriving ones. Initial states come
/// from `initial_state` if given (approximate: the state; exact: levels
/// 1..depth, level 0 holding u_0), otherwise every agent starts from u_0.
///
/// At each change tick (tick 0 included) a BoundsReport is computed from the
/// realized diameter, outputs and target; the window is audited once the run
/// completes.
inline RunResult run(const Scenario& s) {
  if (s.dse) throw ConfigError("scenario '" + s.name + "' is a size-estimation scenario");
  const detail::GraphTimeline timeline(s);
  const auto changes = timeline.change_ticks();
  const ProtocolParams& params = s.protocol;
  const double slope = s.slope_bound();

  RunResult res;
  res.scenario = s.name;
  res.protocol = params.name();
  res.seed = s.seed;
  res.slope_bound = slope;

  auto inputs_at = [&](const NetworkSnapshot& g, Tick k) {
    std::vector<double> u;
    u.reserve(g.size());
    for (NodeId i : g.nodes()) u.push_back(s.bank.sample(i, k));
    return u;
  };

  const NetworkSnapshot* g = &timeline.at(0);
  std::vector<double> u = inputs_at(*g, 0);
  ProtocolState x = init_state(params, u);
  if (s.initial_state) {
    const auto& x0 = *s.initial_state;
    if (auto* sc = std::get_if<ScalarState>(&x)) {
      *sc = x0;
    } else {
      auto& c = std::get<CascadeState>(x);
      for (std::size_t i = 0; i < c.levels.size(); ++i)
        for (std::size_t l = 1; l <= c.depth; ++l) c.levels[i][l] = x0[i];
    }
  }

  std::size_t next_change = 1;
  for (Tick k = 0; k < s.horizon; ++k) {
    const std::vector<double> out = outputs(x);
    detail::require_finite(out, k);
    TickRecord rec;
    rec.k = k;
    rec.n_active = g->size();
    rec.target = detail::target_of(params.mode, u);
    for (std::size_t i = 0; i < g->size(); ++i) {
      rec.error = std::max(rec.error, std::abs(out[i] - rec.target));
      rec.agents.push_back({g->nodes()[i], out[i], u[i]});
    }

    if (next_change - 1 < changes.size() && changes[next_change - 1] == k) {
      WindowReport w;
      w.change_tick = k;
      w.end_tick = next_change < changes.size() ? changes[next_change] : s.horizon;
      if (!is_connected(*g))
        throw AssumptionViolation("graph disconnected at tick " + std::to_string(k));
      w.diameter = diameter(*g);
      w.n_active = g->size();
      w.bounds = bounds_for(params, w.diameter, slope, out, rec.target,
                            static_cast<std::size_t>(w.end_tick - w.change_tick), s.strict);
      if (s.strict && params.variant == Variant::exact && w.diameter > params.depth)
        throw AssumptionViolation("diameter " + std::to_string(w.diameter) + " at tick " +
                                  std::to_string(k) + " exceeds Delta = " +
                                  std::to_string(params.depth));
      res.windows.push_back(std::move(w));
      ++next_change;
    }
    res.trace.push_back(std::move(rec));

    if (k + 1 == s.horizon) break;
    const NetworkSnapshot* g_next = &timeline.at(k + 1);
    std::vector<double> u_next = inputs_at(*g_next, k + 1);
    x = open_step(*g, *g_next, x, params, u, u_next, s.step_options);
    g = g_next;
    u = std::move(u_next);
  }

  const auto e = res.errors();
  for (auto& w : res.windows) detail::finish_window(w, e);
  return res;
}

struct AssumptionAudit {
  std::vector<std::string> messages;
  bool ok() const { return messages.empty(); }
};

/// Replays a finished run against its scenario: membership per tick matches
/// the schedule, changes are dwell-spaced, every graph is connected (and
/// within Delta for strict exact runs), inputs respect the slope bound and
/// errors are finite and nonnegative.
inline AssumptionAudit audit_assumptions(const Scenario& s, const RunResult& r) {
  AssumptionAudit a;
  auto fail = [&](const std::string& m) { a.messages.push_back(m); };
  if (r.trace.size() != static_cast<std::size_t>(s.horizon))
    fail("trace covers " + std::to_string(r.trace.size()) + " ticks, horizon is " +
         std::to_string(s.horizon));
  const detail::GraphTimeline timeline(s);
  const auto changes = timeline.change_ticks();
  for (std::size_t c = 1; c < changes.size(); ++c)
    if (changes[c] - changes[c - 1] < s.churn.dwell)
      fail("changes at ticks " + std::to_string(changes[c - 1]) + " and " +
           std::to_string(changes[c]) + " are closer than the dwell time");
  for (Tick k : changes) {
    const auto& g = timeline.at(k);
    if (!is_connected(g)) {
      fail("graph disconnected at tick " + std::to_string(k));
      continue;
    }
    if (s.strict && s.protocol.variant == Variant::exact && diameter(g) > s.protocol.depth)
      fail("diameter exceeds Delta at tick " + std::to_string(k));
  }
  const double slope = s.slope_bound();
  for (std::size_t t = 0; t < r.trace.size(); ++t) {
    const auto& rec = r.trace[t];
    const auto& g = timeline.at(rec.k);
    if (rec.agents.size() != g.size() || rec.n_active != g.size()) {
      fail("active set mismatch at tick " + std::to_string(rec.k));
      continue;
    }
    for (std::size_t i = 0; i < g.size(); ++i)
      if (rec.agents[i].id != g.nodes()[i]) fail("agent order mismatch at tick " + std::to_string(rec.k));
    if (!std::isfinite(rec.error) || rec.error < 0.0)
      fail("invalid error at tick " + std::to_string(rec.k));
    if (t + 1 < r.trace.size()) {
      const auto& nxt = r.trace[t + 1];
      for (const auto& ag : rec.agents)
        for (const auto& bg : nxt.agents)
          if (ag.id == bg.id && std::abs(bg.u - ag.u) > slope + kSlopeSlack)
            fail("input of agent " + std::to_string(ag.id) + " moved more than Pi at tick " +
                 std::to_string(rec.k));
    }
  }
  return a;
}

// Size estimation ----------------------------------------------------------------

struct EstimateSample {
  NodeId id;
  double n_hat;
};

struct DseTickRecord {
  Tick k = 0;
  std::size_t n_active = 0;
  /// Estimate every agent would compute from the exact coordinate maxima.
  double exact_estimate = 0.0;
  /// Largest per-coordinate consensus error over agents and coordinates.
  double max_error = 0.0;
  std::vector<EstimateSample> estimates;
};

struct DseWindowReport {
  Tick change_tick = 0;
  Tick end_tick = 0;
  std::size_t diameter = 0;
  std::size_t n_active = 0;
  /// Largest per-coordinate convergence time; bands are per coordinate.
  std::size_t convergence_time = 0;
  double steady_bound = 0.0;
  bool assumptions_ok = true;
  bool dwell_covers_convergence = true;
  std::size_t decrease_violations = 0;
  std::size_t band_violations = 0;
  /// Every agent within the per-coordinate steady band from convergence on.
  bool reconverged = true;
  double exact_estimate = 0.0;
  double expected_closed_form = 0.0;
  /// Mean of all agents' estimates over [change + T^c, end).
  double steady_mean_estimate = 0.0;
  /// Largest estimate spread across agents over the steady part.
  double steady_spread = 0.0;
  /// Largest (agent estimate - exact-maxima estimate) over the steady part.
  double steady_max_excess = 0.0;
};

struct DseRunResult {
  std::string scenario;
  std::string protocol;
  std::uint64_t seed = 0;
  std::size_t p = 0;
  std::vector<DseTickRecord> trace;
  std::vector<DseWindowReport> windows;
};

/// Runs a size-estimation scenario over [0, horizon). The tick convention
/// matches run(); draws come from the "dse" stream of the scenario seed.
inline DseRunResult run_size_estimation(const Scenario& s) {
  if (!s.dse) throw ConfigError("scenario '" + s.name + "' has no size_estimation section");
  const detail::GraphTimeline timeline(s);
  const auto changes = timeline.change_ticks();
  const ProtocolParams& params = s.protocol;
  const std::size_t p = s.dse->p;
  RandomStream rng = RandomStream::derive(s.seed, "dse");

  DseRunResult res;
  res.scenario = s.name;
  res.protocol = params.name();
  res.seed = s.seed;
  res.p = p;

  const NetworkSnapshot* g = &timeline.at(0);
  DseState state = dse_init(*g, p, params, rng);

  // Per-coordinate errors, [coordinate][tick], for the window audits.
  std::vector<std::vector<double>> coord_errors(p);
  std::vector<std::vector<BoundsReport>> coord_bounds;

  std::size_t next_change = 1;
  for (Tick k = 0; k < s.horizon; ++k) {
    const auto x = dse_outputs(state);
    const auto maxima = dse_true_maxima(state);
    DseTickRecord rec;
    rec.k = k;
    rec.n_active = g->size();
    rec.exact_estimate = mle_estimate(maxima);
    for (std::size_t j = 0; j < p; ++j) {
      double e = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(x[i][j] - maxima[j]));
      coord_errors[j].push_back(e);
      rec.max_error = std::max(rec.max_error, e);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      detail::require_finite(x[i], k);
      rec.estimates.push_back({g->nodes()[i], mle_estimate(x[i])});
    }

    if (next_change - 1 < changes.size() && changes[next_change - 1] == k) {
      DseWindowReport w;
      w.change_tick = k;
      w.end_tick = next_change < changes.size() ? changes[next_change] : s.horizon;
      if (!is_connected(*g))
        throw AssumptionViolation("graph disconnected at tick " + std::to_string(k));
      w.diameter = diameter(*g);
      w.n_active = g->size();
      const auto dwell = static_cast<std::size_t>(w.end_tick - w.change_tick);
      std::vector<BoundsReport> per_coord;
      for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> col(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) col[i] = x[i][j];
        per_coord.push_back(bounds_for(params, w.diameter, 0.0, col, maxima[j], dwell, s.strict));
      }
      for (const auto& b : per_coord) {
        w.convergence_time = std::max(w.convergence_time, b.convergence_time);
        w.assumptions_ok = w.assumptions_ok && b.assumptions_ok;
        w.dwell_covers_convergence = w.dwell_covers_convergence && b.bounded_error_guaranteed;
      }
      w.steady_bound = per_coord.front().steady_bound;
      w.exact_estimate = rec.exact_estimate;
      w.expected_closed_form =
          params.variant == Variant::exact
              ? expected_estimate_edmc(g->size(), p)
              : expected_estimate_admc(g->size(), p,
                                       params.alpha * static_cast<double>(w.diameter));
      coord_bounds.push_back(std::move(per_coord));
      res.windows.push_back(w);
      ++next_change;
    }
    res.trace.push_back(std::move(rec));

    if (k + 1 == s.horizon) break;
    const NetworkSnapshot* g_next = &timeline.at(k + 1);
    state = dse_step(*g, *g_next, state, params, rng, s.step_options);
    g = g_next;
  }

  for (std::size_t wi = 0; wi < res.windows.size(); ++wi) {
    auto& w = res.windows[wi];
    const auto off = static_cast<std::size_t>(w.change_tick);
    const auto len = static_cast<std::size_t>(w.end_tick - w.change_tick);
    for (std::size_t j = 0; j < p; ++j) {
      const std::span<const double> win(coord_errors[j].data() + off, len);
      const BoundsReport& b = coord_bounds[wi][j];
      const WindowAudit a = audit_window(win, b, w.change_tick);
      w.decrease_violations += a.decrease_violations;
      w.band_violations += a.band_violations;
      for (std::size_t t = b.convergence_time; t < len; ++t)
        if (win[t] > b.steady_bound + kBandTol) w.reconverged = false;
    }
    if (w.convergence_time >= len) w.reconverged = false;
    double sum = 0.0;
    std::size_t count = 0;
    for (Tick k = w.change_tick + static_cast<Tick>(w.convergence_time); k < w.end_tick; ++k) {
      const auto& rec = res.trace[static_cast<std::size_t>(k)];
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& e : rec.estimates) {
        sum += e.n_hat;
        ++count;
        lo = std::min(lo, e.n_hat);
        hi = std::max(hi, e.n_hat);
        w.steady_max_excess = std::max(w.steady_max_excess, e.n_hat - rec.exact_estimate);
      }
      if (!rec.estimates.empty()) w.steady_spread = std::max(w.steady_spread, hi - lo);
    }
    if (count == 0) {
      w.steady_max_excess = std::numeric_limits<double>::quiet_NaN();
      w.steady_mean_estimate = std::numeric_limits<double>::quiet_NaN();
    } else {
      w.steady_mean_estimate = sum / static_cast<double>(count);
    }
  }
  return res;
}

}  // namespace omas

#endif  // OMAS_SIMULATOR_HPP
