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

#ifndef OMAS_SIZE_ESTIMATION_HPP
#define OMAS_SIZE_ESTIMATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "omas/error.hpp"
#include "omas/graph.hpp"
#include "omas/parallel.hpp"
#include "omas/protocols.hpp"
#include "omas/random.hpp"
#include "omas/special_functions.hpp"

namespace omas {

/// Two-sided 99% standard normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

/// Fresh private draws for an agent that joins (or starts): p i.i.d. uniforms
/// in (0, 1). Exact zeros are redrawn so the logarithm below stays finite.
inline std::vector<double> dse_generate(std::size_t p, RandomStream& rng) {
  if (p < 2) throw Error("size estimation needs p >= 2 random numbers per agent");
  std::vector<double> u(p);
  for (double& v : u) v = rng.uniform_open();
  return u;
}

/// Maximum-likelihood size estimate from p coordinate maxima:
///   n_hat = -p / sum_j ln x_j.
inline double mle_estimate(std::span<const double> x) {
  if (x.size() < 2) throw Error("mle_estimate needs at least two coordinates");
  double s = 0.0;
  for (double v : x) {
    if (!(v > 0.0 && v < 1.0))
      throw Error("mle_estimate: coordinate " + std::to_string(v) + " outside (0, 1)");
    s += std::log(v);
  }
  return -static_cast<double>(x.size()) / s;
}

/// Expected steady-state estimate with exact consensus: np / (p - 1).
inline double expected_estimate_edmc(std::size_t n, std::size_t p) {
  if (n < 1) throw Error("network size must be at least 1");
  if (p < 2) throw Error("expected estimate is infinite for p < 2");
  const double np = static_cast<double>(n) * static_cast<double>(p);
  return np / static_cast<double>(p - 1);
}

/// Worst-case expected steady-state estimate with approximate consensus whose
/// per-coordinate underestimate is eps:
///   eps^{p-1} e^{eps n p} (np)^p Gamma(1-p, eps n p).
///
/// With x = eps*n*p and Gamma(1-p, x) = x^{1-p} E_p(x) the prefactors cancel
/// to np * e^x E_p(x), which is evaluated in scaled form. eps = 0 returns
/// np / (p - 1) exactly.
inline double expected_estimate_admc(std::size_t n, std::size_t p, double eps) {
  if (eps < 0.0) throw Error("underestimate eps must be nonnegative");
  if (eps == 0.0) return expected_estimate_edmc(n, p);
  if (n < 1) throw Error("network size must be at least 1");
  if (p < 2) throw Error("expected estimate is infinite for p < 2");
  const double np = static_cast<double>(n) * static_cast<double>(p);
  return np * scaled_exponential_integral(static_cast<int>(p), eps * np);
}

struct MonteCarloSummary {
  std::size_t trials = 0;
  double mean = 0.0;
  /// Half-width of the 99% normal-approximation interval.
  double ci99 = 0.0;

  double lo() const { return mean - ci99; }
  double hi() const { return mean + ci99; }
  bool covers(double v) const { return v >= lo() && v <= hi(); }
};

/// Mean and 99% interval of `values`, summed in index order.
inline MonteCarloSummary summarize(std::span<const double> values) {
  MonteCarloSummary s;
  s.trials = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    s.ci99 = kZ99 * sd / std::sqrt(static_cast<double>(values.size()));
  }
  return s;
}

/// Floor applied to max_j - eps before taking logarithms.
inline constexpr double kWorstCaseFloor = 1e-12;

struct WorstCaseMonteCarlo {
  /// Estimator applied to (coordinate maximum - eps), floored.
  MonteCarloSummary worst_case;
  /// 1 / (mean_j(-ln max_j) + eps): the variable whose expectation the closed
  /// form integrates. Equivalent to the estimator on max_j * e^{-eps}.
  MonteCarloSummary shifted_gamma;
  std::size_t floored_trials = 0;
  std::size_t floored_coordinates = 0;
};

/// Monte Carlo of the worst case where one agent underestimates every
/// coordinate maximum by exactly eps. Trial t draws from the stream
/// derive(root_seed, "worst-case", t).
inline WorstCaseMonteCarlo dse_worst_case_monte_carlo(std::size_t n, std::size_t p, double eps,
                                                      std::size_t trials,
                                                      std::uint64_t root_seed) {
  if (trials < 1) throw Error("Monte Carlo needs at least one trial");
  if (n < 1 || p < 2) throw Error("Monte Carlo needs n >= 1 and p >= 2");
  if (eps < 0.0) throw Error("underestimate eps must be nonnegative");
  std::vector<double> literal(trials), shifted(trials);
  std::vector<std::size_t> floored(trials);
  parallel_for(trials, [&](std::size_t t) {
    RandomStream rng = RandomStream::derive(root_seed, "worst-case", t);
    double log_sum = 0.0;
    double neg_log_max = 0.0;
    std::size_t hits = 0;
    for (std::size_t j = 0; j < p; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i) m = std::max(m, rng.uniform_open());
      double shifted_max = m - eps;
      if (shifted_max <= 0.0) {
        shifted_max = kWorstCaseFloor;
        ++hits;
      }
      log_sum += std::log(shifted_max);
      neg_log_max += -std::log(m);
    }
    literal[t] = -static_cast<double>(p) / log_sum;
    shifted[t] = 1.0 / (neg_log_max / static_cast<double>(p) + eps);
    floored[t] = hits;
  });
  WorstCaseMonteCarlo out;
  out.worst_case = summarize(literal);
  out.shifted_gamma = summarize(shifted);
  for (std::size_t h : floored) {
    out.floored_coordinates += h;
    if (h > 0) ++out.floored_trials;
  }
  return out;
}

// Protocol state -------------------------------------------------------------

/// Size-estimation state over the active agents of a snapshot: one consensus
/// instance per coordinate plus every agent's private draws.
struct DseState {
  std::size_t p = 0;
  /// coords[j] tracks coordinate j, aligned to the snapshot.
  std::vector<ProtocolState> coords;
  /// inputs[i][j] is agent i's draw for coordinate j.
  std::vector<std::vector<double>> inputs;
};

/// Fresh state: every agent draws its vector and starts from it.
inline DseState dse_init(const NetworkSnapshot& g, std::size_t p, const ProtocolParams& params,
                         RandomStream& rng) {
  if (params.mode != Mode::max) throw ConfigError("size estimation runs on max-consensus");
  DseState s;
  s.p = p;
  for (std::size_t i = 0; i < g.size(); ++i) s.inputs.push_back(dse_generate(p, rng));
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> col(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) col[i] = s.inputs[i][j];
    s.coords.push_back(init_state(params, col));
  }
  return s;
}

/// One tick: agents that join regenerate their draws, remaining agents keep
/// theirs, and each coordinate takes an independent open_step over the same
/// pair of snapshots. Joining agents draw in ascending id order.
inline DseState dse_step(const NetworkSnapshot& g_now, const NetworkSnapshot& g_next,
                         const DseState& s, const ProtocolParams& params, RandomStream& rng,
                         OpenStepOptions opts = {}) {
  if (s.inputs.size() != g_now.size()) throw Error("size-estimation state is misaligned");
  DseState out;
  out.p = s.p;
  for (NodeId i : g_next.nodes()) {
    if (g_now.contains(i))
      out.inputs.push_back(s.inputs[g_now.index_of(i)]);
    else
      out.inputs.push_back(dse_generate(s.p, rng));
  }
  std::vector<double> u_now(g_now.size()), u_next(g_next.size());
  for (std::size_t j = 0; j < s.p; ++j) {
    for (std::size_t i = 0; i < g_now.size(); ++i) u_now[i] = s.inputs[i][j];
    for (std::size_t i = 0; i < g_next.size(); ++i) u_next[i] = out.inputs[i][j];
    out.coords.push_back(open_step(g_now, g_next, s.coords[j], params, u_now, u_next, opts));
  }
  return out;
}

/// Per-agent consensus outputs, agent-major: result[i][j].
inline std::vector<std::vector<double>> dse_outputs(const DseState& s) {
  const std::size_t n = s.inputs.size();
  std::vector<std::vector<double>> x(n, std::vector<double>(s.p));
  for (std::size_t j = 0; j < s.p; ++j)
    for (std::size_t i = 0; i < n; ++i) x[i][j] = output(s.coords[j], i);
  return x;
}

/// Each agent's current size estimate.
inline std::vector<double> dse_estimates(const DseState& s) {
  std::vector<double> est;
  for (const auto& row : dse_outputs(s)) est.push_back(mle_estimate(row));
  return est;
}

/// Coordinate maxima of the active agents' draws.
inline std::vector<double> dse_true_maxima(const DseState& s) {
  std::vector<double> m(s.p, 0.0);
  for (const auto& row : s.inputs)
    for (std::size_t j = 0; j < s.p; ++j) m[j] = std::max(m[j], row[j]);
  return m;
}

}  // namespace omas

#endif  // OMAS_SIZE_ESTIMATION_HPP
