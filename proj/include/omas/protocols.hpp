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

#ifndef OMAS_PROTOCOLS_HPP
#define OMAS_PROTOCOLS_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "omas/error.hpp"
#include "omas/graph.hpp"
#include "omas/signals.hpp"

namespace omas {

/// Which extremum the network tracks.
enum class Mode { max, min };

/// approximate: scalar state with decay alpha.
/// exact: (depth+1)-level cascade, depth an upper bound on the diameter.
enum class Variant { approximate, exact };

struct ProtocolParams {
  Mode mode = Mode::max;
  Variant variant = Variant::approximate;
  double alpha = 0.0;
  std::size_t depth = 0;

  static ProtocolParams approximate(double alpha, Mode mode = Mode::max) {
    ProtocolParams p{mode, Variant::approximate, alpha, 0};
    p.validate();
    return p;
  }
  static ProtocolParams exact(std::size_t depth, Mode mode = Mode::max) {
    ProtocolParams p{mode, Variant::exact, 0.0, depth};
    p.validate();
    return p;
  }

  void validate() const {
    if (variant == Variant::approximate && !(alpha > 0.0 && alpha < 1.0))
      throw ConfigError("approximate protocol needs alpha in (0, 1), got " +
                        std::to_string(alpha));
    if (variant == Variant::exact && depth < 1)
      throw ConfigError("exact protocol needs a diameter bound of at least 1");
  }

  /// Per-agent state length.
  std::size_t width() const { return variant == Variant::exact ? depth + 1 : 1; }

  std::string name() const {
    const bool mx = mode == Mode::max;
    return variant == Variant::approximate ? (mx ? "ADMC" : "ADmC") : (mx ? "EDMC" : "EDmC");
  }
};

/// One value per active agent, aligned to NetworkSnapshot::nodes().
using ScalarState = std::vector<double>;

/// Per agent, levels 0..depth. Level 0 holds the agent's previous input,
/// level l the neighborhood extremum of level l-1 one tick earlier; the
/// agent's output is the last level.
struct CascadeState {
  std::size_t depth = 0;
  std::vector<std::vector<double>> levels;

  double output(std::size_t i) const { return levels.at(i).back(); }
};

using ProtocolState = std::variant<ScalarState, CascadeState>;

namespace detail {

struct MaxOrder {
  static double pick(double a, double b) { return std::max(a, b); }
  static constexpr double decay_sign = -1.0;
};

struct MinOrder {
  static double pick(double a, double b) { return std::min(a, b); }
  static constexpr double decay_sign = 1.0;
};

inline void check_aligned(const NetworkSnapshot& g, std::size_t states, std::size_t inputs) {
  if (states != g.size() || inputs != g.size())
    throw Error("state/input vectors are not aligned with the snapshot (" +
                std::to_string(states) + "/" + std::to_string(inputs) + " vs " +
                std::to_string(g.size()) + " nodes)");
}

template <class Order>
ScalarState approximate_step(const NetworkSnapshot& g, std::span<const double> x,
                             std::span<const double> u, double alpha) {
  check_aligned(g, x.size(), u.size());
  ScalarState next(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double best = x[i];
    for (std::size_t j : g.adjacency(i)) best = Order::pick(best, x[j]);
    next[i] = Order::pick(best + Order::decay_sign * alpha, u[i]);
  }
  return next;
}

template <class Order>
CascadeState exact_step(const NetworkSnapshot& g, const CascadeState& x,
                        std::span<const double> u) {
  check_aligned(g, x.levels.size(), u.size());
  for (const auto& row : x.levels)
    if (row.size() != x.depth + 1)
      throw Error("cascade length mismatch: expected " + std::to_string(x.depth + 1) +
                  " levels, found " + std::to_string(row.size()));
  CascadeState next{x.depth, std::vector<std::vector<double>>(
                                 x.levels.size(), std::vector<double>(x.depth + 1))};
  for (std::size_t i = 0; i < x.levels.size(); ++i) {
    next.levels[i][0] = u[i];
    for (std::size_t l = 1; l <= x.depth; ++l) {
      double best = x.levels[i][l - 1];
      for (std::size_t j : g.adjacency(i)) best = Order::pick(best, x.levels[j][l - 1]);
      next.levels[i][l] = best;
    }
  }
  return next;
}

}  // namespace detail

/// x'_i = max(max_{j in N_i + i} x_j - alpha, u_i), synchronously.
inline ScalarState admc_step(const NetworkSnapshot& g, std::span<const double> x,
                             std::span<const double> u, double alpha) {
  return detail::approximate_step<detail::MaxOrder>(g, x, u, alpha);
}

/// x'_i = min(min_{j in N_i + i} x_j + alpha, u_i), synchronously.
inline ScalarState admc_min_step(const NetworkSnapshot& g, std::span<const double> x,
                                 std::span<const double> u, double alpha) {
  return detail::approximate_step<detail::MinOrder>(g, x, u, alpha);
}

inline CascadeState edmc_step(const NetworkSnapshot& g, const CascadeState& x,
                              std::span<const double> u) {
  return detail::exact_step<detail::MaxOrder>(g, x, u);
}

inline CascadeState edmc_min_step(const NetworkSnapshot& g, const CascadeState& x,
                                  std::span<const double> u) {
  return detail::exact_step<detail::MinOrder>(g, x, u);
}

/// State of a freshly arrived agent: every level set to its current input.
inline std::vector<double> init_agent(const ProtocolParams& params, double u_now) {
  return std::vector<double>(params.width(), u_now);
}

/// Fresh state for a whole network, every agent initialized from `u`.
inline ProtocolState init_state(const ProtocolParams& params, std::span<const double> u) {
  if (params.variant == Variant::approximate) return ScalarState(u.begin(), u.end());
  CascadeState c{params.depth, {}};
  for (double v : u) c.levels.push_back(init_agent(params, v));
  return c;
}

inline std::size_t state_size(const ProtocolState& s) {
  return std::visit(
      [](const auto& st) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(st)>, ScalarState>)
          return st.size();
        else
          return st.levels.size();
      },
      s);
}

/// Output of the agent at position i.
inline double output(const ProtocolState& s, std::size_t i) {
  if (const auto* sc = std::get_if<ScalarState>(&s)) return sc->at(i);
  return std::get<CascadeState>(s).output(i);
}

inline std::vector<double> outputs(const ProtocolState& s) {
  std::vector<double> out(state_size(s));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = output(s, i);
  return out;
}

inline ProtocolState negated(ProtocolState s) {
  if (auto* sc = std::get_if<ScalarState>(&s)) {
    for (double& v : *sc) v = -v;
  } else {
    for (auto& row : std::get<CascadeState>(s).levels)
      for (double& v : row) v = -v;
  }
  return s;
}

/// One closed-network tick with the rule selected by `params`.
inline ProtocolState step(const ProtocolParams& params, const NetworkSnapshot& g,
                          const ProtocolState& x, std::span<const double> u) {
  if (params.variant == Variant::approximate) {
    const auto& sc = std::get<ScalarState>(x);
    return params.mode == Mode::max ? admc_step(g, sc, u, params.alpha)
                                    : admc_min_step(g, sc, u, params.alpha);
  }
  const auto& c = std::get<CascadeState>(x);
  if (c.depth != params.depth) throw Error("cascade depth does not match the protocol");
  return params.mode == Mode::max ? edmc_step(g, c, u) : edmc_min_step(g, c, u);
}

struct OpenStepOptions {
  /// Off: remaining agents still read the tick-k state of neighbors that
  /// depart between k and k+1. On: departing neighbors are ignored.
  bool exclude_departing_neighbors = false;
};

/// One open-network tick from `g_now` to `g_next`.
///
/// `u_now` is aligned to g_now.nodes() and drives the remaining agents;
/// `u_next` is aligned to g_next.nodes() and only read for arriving agents,
/// which start from init_agent(u_next). Departing agents are dropped. The
/// update for remaining agents is evaluated on g_now. The result is aligned
/// to g_next.nodes().
inline ProtocolState open_step(const NetworkSnapshot& g_now, const NetworkSnapshot& g_next,
                               const ProtocolState& x, const ProtocolParams& params,
                               std::span<const double> u_now, std::span<const double> u_next,
                               OpenStepOptions opts = {}) {
  detail::check_aligned(g_now, state_size(x), u_now.size());
  if (u_next.size() != g_next.size())
    throw Error("next-tick inputs are not aligned with the next snapshot");

  ProtocolState stepped;
  if (g_now == g_next || !opts.exclude_departing_neighbors) {
    stepped = step(params, g_now, x, u_now);
  } else {
    const NodePartition part = partition_nodes(g_now, g_next);
    std::vector<ChurnEvent> leave;
    for (NodeId d : part.departing) leave.push_back(ChurnEvent::leave(d));
    if (leave.size() == g_now.size()) {
      stepped = x;  // nobody remains; every entry below is an arrival
    } else {
      const NetworkSnapshot core = apply_churn(g_now, leave);
      std::vector<double> u_core;
      ProtocolState x_core = std::visit(
          [&](const auto& st) -> ProtocolState {
            using T = std::decay_t<decltype(st)>;
            T out;
            if constexpr (std::is_same_v<T, CascadeState>) out.depth = st.depth;
            for (NodeId i : core.nodes()) {
              const std::size_t at = g_now.index_of(i);
              if constexpr (std::is_same_v<T, ScalarState>)
                out.push_back(st[at]);
              else
                out.levels.push_back(st.levels[at]);
              u_core.push_back(u_now[at]);
            }
            return out;
          },
          x);
      ProtocolState core_next = step(params, core, x_core, u_core);
      // Re-expand to g_now alignment; departing rows keep stale values and are
      // discarded below.
      stepped = x;
      std::visit(
          [&](auto& dst) {
            using T = std::decay_t<decltype(dst)>;
            const auto& src = std::get<T>(core_next);
            for (std::size_t c = 0; c < core.size(); ++c) {
              const std::size_t at = g_now.index_of(core.nodes()[c]);
              if constexpr (std::is_same_v<T, ScalarState>)
                dst[at] = src[c];
              else
                dst.levels[at] = src.levels[c];
            }
          },
          stepped);
    }
  }

  return std::visit(
      [&](const auto& st) -> ProtocolState {
        using T = std::decay_t<decltype(st)>;
        T out;
        if constexpr (std::is_same_v<T, CascadeState>) out.depth = st.depth;
        for (std::size_t n = 0; n < g_next.size(); ++n) {
          const NodeId i = g_next.nodes()[n];
          if (g_now.contains(i)) {
            const std::size_t at = g_now.index_of(i);
            if constexpr (std::is_same_v<T, ScalarState>)
              out.push_back(st[at]);
            else
              out.levels.push_back(st.levels[at]);
          } else {
            if constexpr (std::is_same_v<T, ScalarState>)
              out.push_back(u_next[n]);
            else
              out.levels.push_back(init_agent(params, u_next[n]));
          }
        }
        return out;
      },
      stepped);
}

/// Convenience form sampling both input vectors from a signal bank at k and
/// k+1.
inline ProtocolState open_step(const NetworkSnapshot& g_now, const NetworkSnapshot& g_next,
                               const ProtocolState& x, const ProtocolParams& params,
                               const SignalBank& bank, Tick k, OpenStepOptions opts = {}) {
  std::vector<double> u_now, u_next;
  for (NodeId i : g_now.nodes()) u_now.push_back(bank.sample(i, k));
  for (NodeId i : g_next.nodes()) u_next.push_back(bank.sample(i, k + 1));
  return open_step(g_now, g_next, x, params, u_now, u_next, opts);
}

}  // namespace omas

#endif  // OMAS_PROTOCOLS_HPP
