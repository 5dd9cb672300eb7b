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

#ifndef OMAS_SCENARIO_HPP
#define OMAS_SCENARIO_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "omas/error.hpp"
#include "omas/graph.hpp"
#include "omas/protocols.hpp"
#include "omas/random.hpp"
#include "omas/signals.hpp"

namespace omas {

struct TopologySpec {
  std::string generator = "line";
  std::size_t n = 1;
  std::size_t seed_line = 5;        // barabasi_albert: initial path length
  std::size_t edges_per_node = 2;   // barabasi_albert
  double extra_edge_prob = 0.2;     // random
  std::string edge_list;            // edge_list
};

/// Membership changes applied atomically at one tick; the batch counts as a
/// single network change.
struct ChurnBatch {
  Tick tick = 0;
  std::vector<ChurnEvent> events;
};

/// Every `period` ticks, each of the `last` most recently created nodes is
/// independently drawn active with probability `activity`. Draws that leave
/// the membership unchanged, disconnect the graph or (exact protocols) push
/// the diameter past the protocol's bound are redrawn up to `max_retries`.
struct TailChurnSpec {
  Tick period = 120;
  std::size_t last = 25;
  double activity = 0.5;
  std::size_t max_retries = 1000;
};

struct ChurnSpec {
  Tick dwell = 0;
  std::vector<ChurnBatch> batches;
  std::optional<TailChurnSpec> tail;
};

/// Signal template as written in the config; random walks are expanded per
/// agent when the bank is built.
struct SignalTemplate {
  std::string kind = "constant";
  double value = 0.0;
  std::vector<std::pair<Tick, double>> breakpoints;
  signal::Piecewise::Interpolation interpolation = signal::Piecewise::Interpolation::linear;
  double offset = 0.0, amplitude = 0.0, period = 1.0, phase = 0.0;
  std::optional<double> start;
  double step_bound = 0.0, lo = 0.0, hi = 1.0;
};

struct SignalConfig {
  std::optional<SignalTemplate> fallback;
  std::vector<std::pair<NodeId, SignalTemplate>> agents;
  std::optional<double> slope_bound;
};

struct DseConfig {
  std::size_t p = 2;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  Tick horizon = 0;
  TopologySpec topology;
  ProtocolParams protocol;
  SignalConfig signal_config;
  std::optional<DseConfig> dse;
  ChurnSpec churn;
  std::optional<std::vector<double>> initial_state;
  bool strict = true;
  OpenStepOptions step_options;

  // Resolved at load time from the seed.
  NetworkSnapshot initial_graph;
  std::vector<ChurnBatch> schedule;
  SignalBank bank;

  /// Input slope bound used by the theory: the bank's for consensus runs,
  /// zero for size estimation (inputs are constant between changes).
  double slope_bound() const { return dse ? 0.0 : bank.slope_bound(); }
};

// Resolution ------------------------------------------------------------------

inline NetworkSnapshot build_topology(const TopologySpec& t, std::uint64_t seed) {
  RandomStream rng = RandomStream::derive(seed, "topology");
  if (t.generator == "line") return line_graph(t.n);
  if (t.generator == "complete") return complete_graph(t.n);
  if (t.generator == "star") return star_graph(t.n == 0 ? 0 : t.n - 1);
  if (t.generator == "random") return random_connected_graph(t.n, t.extra_edge_prob, rng);
  if (t.generator == "barabasi_albert")
    return barabasi_albert(line_graph(t.seed_line), t.n, t.edges_per_node, rng);
  if (t.generator == "edge_list") return parse_edge_list(t.edge_list);
  throw ConfigError("unknown topology generator '" + t.generator + "'");
}

inline SignalSpec expand_signal(const SignalTemplate& t, NodeId agent, Tick horizon,
                                std::uint64_t seed) {
  if (t.kind == "constant") return SignalSpec::constant(t.value);
  if (t.kind == "piecewise_linear") return SignalSpec::piecewise(t.breakpoints, t.interpolation);
  if (t.kind == "sinusoid") return SignalSpec::sinusoid(t.offset, t.amplitude, t.period, t.phase);
  if (t.kind == "random_walk") {
    RandomStream rng = RandomStream::derive(seed, "signals", agent);
    const double start = t.start ? *t.start : rng.uniform(t.lo, t.hi);
    return signal::RandomWalk::expand(start, t.step_bound, t.lo, t.hi, horizon, rng);
  }
  throw ConfigError("unknown signal kind '" + t.kind + "'");
}

inline SignalBank build_signal_bank(const SignalConfig& cfg, const std::vector<NodeId>& universe,
                                    Tick horizon, std::uint64_t seed) {
  SignalBank bank;
  if (cfg.fallback) {
    if (cfg.fallback->kind == "random_walk") {
      for (NodeId i : universe) bank.set(i, expand_signal(*cfg.fallback, i, horizon, seed));
    } else {
      bank.set_default(expand_signal(*cfg.fallback, 0, horizon, seed));
    }
  }
  for (const auto& [id, t] : cfg.agents) bank.set(id, expand_signal(t, id, horizon, seed));
  if (cfg.slope_bound) bank.declare_slope_bound(*cfg.slope_bound);
  return bank;
}

/// Graph in force at every change tick, starting with tick 0.
inline std::vector<std::pair<Tick, NetworkSnapshot>> graph_sequence(const Scenario& s) {
  std::vector<std::pair<Tick, NetworkSnapshot>> seq{{0, s.initial_graph}};
  for (const auto& b : s.schedule) seq.emplace_back(b.tick, apply_churn(seq.back().second, b.events));
  return seq;
}

inline std::vector<ChurnBatch> realize_tail_churn(const TailChurnSpec& spec,
                                                  const NetworkSnapshot& g0, Tick horizon,
                                                  std::optional<std::size_t> max_diameter,
                                                  std::uint64_t seed) {
  if (spec.period < 1) throw ConfigError("churn period must be positive");
  RandomStream rng = RandomStream::derive(seed, "churn");
  const auto& order = g0.insertion_order();
  const std::size_t m = std::min(spec.last, order.size());
  const std::vector<NodeId> tail(order.end() - static_cast<std::ptrdiff_t>(m), order.end());
  std::vector<ChurnBatch> out;
  NetworkSnapshot current = g0;
  for (Tick t = spec.period; t < horizon; t += spec.period) {
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < spec.max_retries && !accepted; ++attempt) {
      ChurnBatch batch{t, {}};
      for (NodeId i : tail) {
        const bool want = rng.bernoulli(spec.activity);
        const bool is = current.contains(i);
        if (is && !want) batch.events.push_back(ChurnEvent::leave(i));
        if (!is && want) batch.events.push_back(ChurnEvent::join(i));
      }
      if (batch.events.empty()) continue;
      NetworkSnapshot next = current;
      for (const auto& ev : batch.events) next = next.apply(ev);
      if (next.empty() || !is_connected(next)) continue;
      if (max_diameter && diameter(next) > *max_diameter) continue;
      current = std::move(next);
      out.push_back(std::move(batch));
      accepted = true;
    }
    if (!accepted)
      throw AssumptionViolation("churn generator found no connected membership change at tick " +
                                std::to_string(t) + " after " +
                                std::to_string(spec.max_retries) + " attempts");
  }
  return out;
}

/// Resolves seeds and checks every load-time constraint: parameter ranges,
/// dwell spacing, connectivity after every change, slope certification, the
/// decay/slope condition and the diameter bound (the last two when strict).
inline void resolve(Scenario& s) {
  if (s.horizon < 1) throw ConfigError("horizon must be at least 1 tick");
  s.protocol.validate();
  if (s.dse && s.dse->p < 2) throw ConfigError("size estimation needs p >= 2");
  if (s.dse && s.protocol.mode != Mode::max)
    throw ConfigError("size estimation runs on max-consensus");

  s.initial_graph = build_topology(s.topology, s.seed);
  if (!is_connected(s.initial_graph))
    throw AssumptionViolation("initial graph is not connected");

  std::optional<std::size_t> depth_cap;
  if (s.strict && s.protocol.variant == Variant::exact) depth_cap = s.protocol.depth;

  if (s.churn.tail) {
    s.schedule = realize_tail_churn(*s.churn.tail, s.initial_graph, s.horizon, depth_cap, s.seed);
  } else {
    s.schedule = s.churn.batches;
    std::sort(s.schedule.begin(), s.schedule.end(),
              [](const ChurnBatch& a, const ChurnBatch& b) { return a.tick < b.tick; });
  }

  Tick last = 0;
  for (const auto& b : s.schedule) {
    if (b.tick <= 0 || b.tick >= s.horizon)
      throw ConfigError("churn batch at tick " + std::to_string(b.tick) +
                        " lies outside (0, horizon)");
    if (b.tick - last < s.churn.dwell)
      throw AssumptionViolation("dwell-time assumption violated: network changes at ticks " +
                                std::to_string(last) + " and " + std::to_string(b.tick) +
                                " are closer than the dwell time " +
                                std::to_string(s.churn.dwell));
    last = b.tick;
  }

  for (const auto& [tick, g] : graph_sequence(s)) {
    if (!is_connected(g))
      throw AssumptionViolation("graph is disconnected from tick " + std::to_string(tick));
    if (depth_cap && diameter(g) > *depth_cap)
      throw AssumptionViolation("diameter " + std::to_string(diameter(g)) + " at tick " +
                                std::to_string(tick) + " exceeds the bound Delta = " +
                                std::to_string(*depth_cap));
  }

  if (!s.dse) {
    if (!s.signal_config.fallback && s.signal_config.agents.empty())
      throw ConfigError("consensus scenario needs a signals section");
    s.bank = build_signal_bank(s.signal_config, s.initial_graph.insertion_order(), s.horizon,
                               s.seed);
    for (NodeId i : s.initial_graph.insertion_order())
      if (!s.bank.has(i)) throw ConfigError("agent " + std::to_string(i) + " has no signal");
    s.bank.certify_slope(s.horizon);
  }
  if (s.strict && s.protocol.variant == Variant::approximate &&
      !(s.protocol.alpha > s.slope_bound()))
    throw AssumptionViolation("decay alpha = " + std::to_string(s.protocol.alpha) +
                              " must exceed the input slope bound Pi = " +
                              std::to_string(s.slope_bound()));
  if (s.initial_state && s.initial_state->size() != s.initial_graph.size())
    throw ConfigError("initial_state has " + std::to_string(s.initial_state->size()) +
                      " entries for " + std::to_string(s.initial_graph.size()) + " agents");
}

// YAML -------------------------------------------------------------------------

namespace detail {

template <class T>
T get(const YAML::Node& node, const std::string& key, const std::string& where) {
  if (!node[key]) throw ConfigError("missing '" + key + "' in " + where);
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError("bad value for '" + key + "' in " + where + ": " + e.what());
  }
}

template <class T>
T get_or(const YAML::Node& node, const std::string& key, T fallback) {
  if (!node || !node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

inline SignalTemplate parse_signal(const YAML::Node& n, const std::string& where) {
  SignalTemplate t;
  t.kind = get<std::string>(n, "kind", where);
  if (t.kind == "constant") {
    t.value = get<double>(n, "value", where);
  } else if (t.kind == "piecewise_linear") {
    const YAML::Node bps = n["breakpoints"];
    if (!bps || !bps.IsSequence()) throw ConfigError("missing breakpoints in " + where);
    for (const auto& bp : bps) {
      if (!bp.IsSequence() || bp.size() != 2)
        throw ConfigError("breakpoints must be [tick, value] pairs in " + where);
      t.breakpoints.emplace_back(bp[0].as<Tick>(), bp[1].as<double>());
    }
    const auto interp = get_or<std::string>(n, "interpolation", "linear");
    if (interp == "step")
      t.interpolation = signal::Piecewise::Interpolation::step;
    else if (interp != "linear")
      throw ConfigError("interpolation must be linear or step in " + where);
  } else if (t.kind == "sinusoid") {
    t.offset = get_or<double>(n, "offset", 0.0);
    t.amplitude = get<double>(n, "amplitude", where);
    t.period = get<double>(n, "period", where);
    t.phase = get_or<double>(n, "phase", 0.0);
  } else if (t.kind == "random_walk") {
    t.step_bound = get<double>(n, "step_bound", where);
    t.lo = get_or<double>(n, "lo", 0.0);
    t.hi = get_or<double>(n, "hi", 1.0);
    if (n["start"]) t.start = n["start"].as<double>();
  } else {
    throw ConfigError("unknown signal kind '" + t.kind + "' in " + where);
  }
  return t;
}

inline std::vector<NodeId> parse_ids(const YAML::Node& n) {
  std::vector<NodeId> ids;
  if (!n) return ids;
  for (const auto& v : n) ids.push_back(v.as<NodeId>());
  return ids;
}

}  // namespace detail

/// Parses and resolves a scenario. `seed_override` replaces the file's seed.
inline Scenario load_scenario(const std::string& text,
                              std::optional<std::uint64_t> seed_override = std::nullopt) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("scenario must be a mapping");
  using detail::get;
  using detail::get_or;

  Scenario s;
  try {
    s.name = get_or<std::string>(root, "name", "scenario");
    s.seed = seed_override ? *seed_override : get_or<std::uint64_t>(root, "seed", 0);
    s.horizon = get<Tick>(root, "horizon", "scenario");

    const YAML::Node topo = root["topology"];
    if (!topo) throw ConfigError("missing 'topology' section");
    s.topology.generator = get<std::string>(topo, "generator", "topology");
    if (s.topology.generator == "edge_list")
      s.topology.edge_list = get<std::string>(topo, "edges", "topology");
    else
      s.topology.n = get<std::size_t>(topo, "n", "topology");
    s.topology.seed_line = get_or<std::size_t>(topo, "seed_line", 5);
    s.topology.edges_per_node = get_or<std::size_t>(topo, "edges_per_node", 2);
    s.topology.extra_edge_prob = get_or<double>(topo, "extra_edge_prob", 0.2);

    const YAML::Node proto = root["protocol"];
    if (!proto) throw ConfigError("missing 'protocol' section");
    const auto mode = get_or<std::string>(proto, "mode", "max");
    if (mode != "max" && mode != "min") throw ConfigError("protocol mode must be max or min");
    s.protocol.mode = mode == "max" ? Mode::max : Mode::min;
    const auto variant = get<std::string>(proto, "variant", "protocol");
    if (variant == "approximate") {
      s.protocol.variant = Variant::approximate;
      s.protocol.alpha = get<double>(proto, "alpha", "protocol (approximate variant)");
    } else if (variant == "exact") {
      s.protocol.variant = Variant::exact;
      s.protocol.depth = get<std::size_t>(proto, "depth", "protocol (exact variant)");
    } else {
      throw ConfigError("protocol variant must be approximate or exact");
    }

    if (const YAML::Node sig = root["signals"]) {
      if (sig["default"]) s.signal_config.fallback = detail::parse_signal(sig["default"], "signals.default");
      if (const YAML::Node agents = sig["agents"]) {
        for (const auto& a : agents)
          s.signal_config.agents.emplace_back(
              get<NodeId>(a, "id", "signals.agents"),
              detail::parse_signal(a, "signals.agents"));
      }
      if (sig["slope_bound"]) s.signal_config.slope_bound = sig["slope_bound"].as<double>();
    }

    if (const YAML::Node se = root["size_estimation"])
      s.dse = DseConfig{get<std::size_t>(se, "p", "size_estimation")};

    if (const YAML::Node init = root["initial_state"]) {
      std::vector<double> x0;
      for (const auto& v : init) x0.push_back(v.as<double>());
      s.initial_state = std::move(x0);
    }

    if (const YAML::Node ch = root["churn"]) {
      s.churn.dwell = get_or<Tick>(ch, "dwell", 0);
      const auto gen = get_or<std::string>(ch, "generator", "explicit");
      if (gen == "tail_random") {
        TailChurnSpec t;
        t.period = get_or<Tick>(ch, "period", s.churn.dwell);
        t.last = get<std::size_t>(ch, "last", "churn");
        t.activity = get_or<double>(ch, "activity", 0.5);
        t.max_retries = get_or<std::size_t>(ch, "max_retries", 1000);
        s.churn.tail = t;
      } else if (gen == "explicit") {
        if (const YAML::Node batches = ch["batches"]) {
          for (const auto& b : batches) {
            ChurnBatch batch{get<Tick>(b, "tick", "churn.batches"), {}};
            for (NodeId i : detail::parse_ids(b["deactivate"]))
              batch.events.push_back(ChurnEvent::leave(i));
            for (NodeId i : detail::parse_ids(b["activate"]))
              batch.events.push_back(ChurnEvent::join(i));
            s.churn.batches.push_back(std::move(batch));
          }
        }
      } else {
        throw ConfigError("unknown churn generator '" + gen + "'");
      }
    }

    if (const YAML::Node checks = root["checks"]) {
      s.strict = get_or<bool>(checks, "strict", true);
      s.step_options.exclude_departing_neighbors =
          get_or<bool>(checks, "exclude_departing_neighbors", false);
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }

  resolve(s);
  return s;
}

inline Scenario load_scenario_file(const std::string& path,
                                   std::optional<std::uint64_t> seed_override = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str(), seed_override);
}

}  // namespace omas

#endif  // OMAS_SCENARIO_HPP
