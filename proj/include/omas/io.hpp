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

#ifndef OMAS_IO_HPP
#define OMAS_IO_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "omas/bounds.hpp"
#include "omas/error.hpp"
#include "omas/simulator.hpp"

namespace omas {

// Serialization ----------------------------------------------------------------

inline nlohmann::json to_json(const BoundsReport& b) {
  return {{"transient_time", b.transient_time},
          {"convergence_time", b.convergence_time},
          {"tracking_bound", b.tracking_bound},
          {"steady_bound", b.steady_bound},
          {"assumptions_ok", b.assumptions_ok},
          {"bounded_error_guaranteed", b.bounded_error_guaranteed},
          {"conditions", b.conditions},
          {"reasons", b.reasons}};
}

namespace detail {

/// NaN and infinities have no JSON spelling; they become null.
inline nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline nlohmann::json optional_tick(std::optional<std::size_t> t) {
  if (t) return *t;
  return nullptr;
}

}  // namespace detail

inline nlohmann::json to_json(const WindowReport& w) {
  nlohmann::json j = to_json(w.bounds);
  j["change_tick"] = w.change_tick;
  j["end_tick"] = w.end_tick;
  j["diameter"] = w.diameter;
  j["n_active"] = w.n_active;
  j["empirical"] = {
      {"transient_time", detail::optional_tick(w.empirical.times.transient_time)},
      {"convergence_time", detail::optional_tick(w.empirical.times.convergence_time)},
      {"max_error_after_convergence", w.empirical.max_error_after_convergence},
      {"decrease_violations", w.empirical.audit.decrease_violations},
      {"band_violations", w.empirical.audit.band_violations}};
  return j;
}

/// Run summary. Top-level bound fields describe the first window (tick 0);
/// every window is listed under "windows".
inline nlohmann::json summary_json(const RunResult& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["protocol"] = r.protocol;
  j["seed"] = r.seed;
  j["slope_bound"] = r.slope_bound;
  if (!r.windows.empty()) {
    const auto& w0 = r.windows.front();
    j.update(to_json(w0.bounds));
    j["empirical_transient_time"] = detail::optional_tick(w0.empirical.times.transient_time);
    j["empirical_convergence_time"] = detail::optional_tick(w0.empirical.times.convergence_time);
  }
  double max_err = 0.0;
  for (const auto& t : r.trace) max_err = std::max(max_err, t.error);
  j["empirical_max_error"] = max_err;
  j["windows"] = nlohmann::json::array();
  for (const auto& w : r.windows) j["windows"].push_back(to_json(w));
  j["all_windows_ok"] = r.all_windows_ok();
  return j;
}

inline nlohmann::json summary_json(const DseRunResult& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["protocol"] = r.protocol;
  j["seed"] = r.seed;
  j["p"] = r.p;
  j["windows"] = nlohmann::json::array();
  for (const auto& w : r.windows) {
    j["windows"].push_back({{"change_tick", w.change_tick},
                            {"end_tick", w.end_tick},
                            {"diameter", w.diameter},
                            {"n_active", w.n_active},
                            {"convergence_time", w.convergence_time},
                            {"steady_bound", w.steady_bound},
                            {"assumptions_ok", w.assumptions_ok},
                            {"dwell_covers_convergence", w.dwell_covers_convergence},
                            {"reconverged", w.reconverged},
                            {"decrease_violations", w.decrease_violations},
                            {"band_violations", w.band_violations},
                            {"exact_estimate", w.exact_estimate},
                            {"expected_closed_form", w.expected_closed_form},
                            {"steady_mean_estimate", detail::number_or_null(w.steady_mean_estimate)},
                            {"steady_spread", w.steady_spread},
                            {"steady_max_excess", detail::number_or_null(w.steady_max_excess)}});
  }
  if (!r.windows.empty()) {
    const auto& w0 = r.windows.front();
    j["convergence_time"] = w0.convergence_time;
    j["steady_bound"] = w0.steady_bound;
    j["assumptions_ok"] = w0.assumptions_ok;
    j["expected_closed_form"] = w0.expected_closed_form;
  }
  return j;
}

// Files -----------------------------------------------------------------------

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  return out;
}

}  // namespace detail

inline void write_trace_csv(std::ostream& out, const RunResult& r) {
  out << "tick,agent,x,u,e,n_active\n";
  for (const auto& t : r.trace)
    for (const auto& a : t.agents)
      out << t.k << ',' << a.id << ',' << a.x << ',' << a.u << ',' << t.error << ','
          << t.n_active << '\n';
}

inline void write_trace_csv(std::ostream& out, const DseRunResult& r) {
  out << "tick,agent,n_hat\n";
  for (const auto& t : r.trace)
    for (const auto& e : t.estimates) out << t.k << ',' << e.id << ',' << e.n_hat << '\n';
}

/// Wide table: tick, target, error, then one column per agent ever active
/// (empty while inactive).
inline void write_states_csv(std::ostream& out, const RunResult& r) {
  std::set<NodeId> ids;
  for (const auto& t : r.trace)
    for (const auto& a : t.agents) ids.insert(a.id);
  out << "tick,target,error";
  for (NodeId i : ids) out << ",x" << i;
  out << '\n';
  for (const auto& t : r.trace) {
    std::map<NodeId, double> row;
    for (const auto& a : t.agents) row[a.id] = a.x;
    out << t.k << ',' << t.target << ',' << t.error;
    for (NodeId i : ids) {
      out << ',';
      if (auto it = row.find(i); it != row.end()) out << it->second;
    }
    out << '\n';
  }
}

/// Wide table: tick, n_true, exact-maxima estimate, then one column per agent.
inline void write_size_estimates_csv(std::ostream& out, const DseRunResult& r) {
  std::set<NodeId> ids;
  for (const auto& t : r.trace)
    for (const auto& e : t.estimates) ids.insert(e.id);
  out << "tick,n_true,exact_estimate";
  for (NodeId i : ids) out << ",n_hat" << i;
  out << '\n';
  for (const auto& t : r.trace) {
    std::map<NodeId, double> row;
    for (const auto& e : t.estimates) row[e.id] = e.n_hat;
    out << t.k << ',' << t.n_active << ',' << t.exact_estimate;
    for (NodeId i : ids) {
      out << ',';
      if (auto it = row.find(i); it != row.end()) out << it->second;
    }
    out << '\n';
  }
}

/// Writes trace.csv, summary.json and plotdata/ under `dir`.
template <class Result>
void write_run_outputs(const std::filesystem::path& dir, const Result& r,
                       const nlohmann::json& extra = nlohmann::json::object()) {
  std::filesystem::create_directories(dir / "plotdata");
  {
    auto out = detail::open_out(dir / "trace.csv");
    write_trace_csv(out, r);
  }
  {
    auto out = detail::open_out(dir / "summary.json");
    nlohmann::json j = summary_json(r);
    j.update(extra);
    out << j.dump(2) << '\n';
  }
  if constexpr (std::is_same_v<Result, RunResult>) {
    auto out = detail::open_out(dir / "plotdata" / "states.csv");
    write_states_csv(out, r);
  } else {
    auto out = detail::open_out(dir / "plotdata" / "size_estimates.csv");
    write_size_estimates_csv(out, r);
  }
}

}  // namespace omas

#endif  // OMAS_IO_HPP
