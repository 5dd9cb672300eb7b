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

// omas command-line front end.
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 assumption violation.
// OMAS_OUT_DIR sets the default output directory (otherwise out/<scenario>).

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "omas/omas.hpp"

namespace fs = std::filesystem;
using namespace omas;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAssumption = 2;

struct SeedChoice {
  std::optional<std::uint64_t> value;
  bool automatic = false;
};

SeedChoice parse_seed(const std::string& text) {
  SeedChoice c;
  if (text.empty()) return c;
  if (text == "auto") {
    c.automatic = true;
    std::random_device rd;
    c.value = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "seed: " << *c.value << '\n';
    return c;
  }
  try {
    std::size_t used = 0;
    c.value = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("--seed expects an unsigned integer or 'auto', got '" + text + "'");
  }
  return c;
}

fs::path out_dir(const std::string& flag, const std::string& scenario) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("OMAS_OUT_DIR"); env && *env) return fs::path(env) / scenario;
  return fs::path("out") / scenario;
}

nlohmann::json seed_json(const SeedChoice& c) {
  nlohmann::json j = nlohmann::json::object();
  if (c.value) j["seed_source"] = c.automatic ? "auto" : "flag";
  return j;
}

void print_bounds(const std::string& label, const BoundsReport& b) {
  std::cout << std::setprecision(12) << label << '\n'
            << "  transient_time    " << b.transient_time << '\n'
            << "  convergence_time  " << b.convergence_time << '\n'
            << "  tracking_bound    " << b.tracking_bound << '\n'
            << "  steady_bound      " << b.steady_bound << '\n'
            << "  assumptions_ok    " << (b.assumptions_ok ? "true" : "false") << '\n'
            << "  conditions        " << b.conditions << '\n';
  for (const auto& r : b.reasons) std::cout << "  note: " << r << '\n';
}

// run ---------------------------------------------------------------------------

struct RunOptions {
  std::string scenario, out, seed;
};

int cmd_run(const RunOptions& o) {
  const SeedChoice seed = parse_seed(o.seed);
  const Scenario s = load_scenario_file(o.scenario, seed.value);
  const fs::path dir = out_dir(o.out, s.name);
  if (s.dse) {
    const auto r = run_size_estimation(s);
    write_run_outputs(dir, r, seed_json(seed));
    const auto& w = r.windows.front();
    std::cout << s.name << ": " << r.protocol << ", p = " << r.p << ", " << r.windows.size()
              << " window(s), steady bound " << w.steady_bound << ", expected estimate "
              << w.expected_closed_form << '\n';
  } else {
    const auto r = run(s);
    write_run_outputs(dir, r, seed_json(seed));
    const auto& b = r.windows.front().bounds;
    double emp = 0.0;
    for (double e : r.errors()) emp = std::max(emp, e);
    std::cout << s.name << ": " << r.protocol << ", tracking_bound " << b.tracking_bound
              << ", steady_bound " << b.steady_bound << ", convergence_time "
              << b.convergence_time << ", max error " << emp
              << (r.all_windows_ok() ? "" : " (window audit failed)") << '\n';
  }
  std::cout << "wrote " << dir.string() << '\n';
  return kExitOk;
}

// bounds ------------------------------------------------------------------------

struct BoundsOptions {
  std::string protocol = "admc";
  std::string scenario;
  std::size_t diameter = 0;
  std::size_t depth = 0;
  double alpha = 0.0;
  double slope = 0.0;
  double overshoot = 0.0;
  std::optional<std::size_t> dwell;
};

int cmd_bounds(const BoundsOptions& o) {
  if (!o.scenario.empty()) {
    Scenario s = load_scenario_file(o.scenario);
    const auto r = run(s);
    bool ok = true;
    for (const auto& w : r.windows) {
      print_bounds(r.protocol + " window [" + std::to_string(w.change_tick) + ", " +
                       std::to_string(w.end_tick) + "), diameter " + std::to_string(w.diameter),
                   w.bounds);
      ok = ok && w.bounds.assumptions_ok;
    }
    return ok ? kExitOk : kExitAssumption;
  }

  BoundsReport b;
  std::string label;
  if (o.protocol == "admc" || o.protocol == "admc-min") {
    if (o.diameter == 0) throw ConfigError("bounds: --diameter is required for " + o.protocol);
    if (!(o.alpha > 0.0)) throw ConfigError("bounds: --alpha must be positive");
    // Overshoot is expressed against the target: x - max u for max, min u - x for min.
    const std::vector<double> x{o.protocol == "admc" ? o.overshoot : -o.overshoot};
    b = o.protocol == "admc" ? admc_bounds(o.diameter, o.alpha, o.slope, x, 0.0, o.dwell, false)
                             : admc_min_bounds(o.diameter, o.alpha, o.slope, x, 0.0, o.dwell, false);
    label = o.protocol == "admc" ? "ADMC" : "ADmC";
  } else if (o.protocol == "edmc" || o.protocol == "edmc-min") {
    if (o.depth == 0) throw ConfigError("bounds: --depth is required for " + o.protocol);
    std::optional<std::size_t> diam;
    if (o.diameter > 0) diam = o.diameter;
    b = edmc_bounds(o.depth, o.slope, diam, o.dwell);
    label = o.protocol == "edmc" ? "EDMC" : "EDmC";
  } else {
    throw ConfigError("bounds: unknown protocol '" + o.protocol +
                      "' (admc, admc-min, edmc, edmc-min)");
  }
  print_bounds(label, b);
  return b.assumptions_ok ? kExitOk : kExitAssumption;
}

// size-est ----------------------------------------------------------------------

struct SizeOptions {
  std::string scenario, out, seed;
  std::size_t trials = 100000;
  std::size_t n = 0, p = 0;
  double eps = 0.0;
};

nlohmann::json monte_carlo_json(std::size_t n, std::size_t p, double eps, std::size_t trials,
                                std::uint64_t seed) {
  const auto mc = dse_worst_case_monte_carlo(n, p, eps, trials, seed);
  const double closed = eps == 0.0 ? expected_estimate_edmc(n, p) : expected_estimate_admc(n, p, eps);
  std::cout << std::setprecision(10) << "n = " << n << ", p = " << p << ", eps = " << eps
            << "\n  closed form            " << closed << "\n  monte_carlo_mean       "
            << mc.worst_case.mean << " +- " << mc.worst_case.ci99
            << "\n  shifted-gamma mean     " << mc.shifted_gamma.mean << " +- "
            << mc.shifted_gamma.ci99 << "\n  trials                 " << trials << '\n';
  return {{"monte_carlo_n", n},
          {"monte_carlo_eps", eps},
          {"monte_carlo_trials", trials},
          {"monte_carlo_mean", mc.worst_case.mean},
          {"ci99", mc.worst_case.ci99},
          {"shifted_gamma_mean", mc.shifted_gamma.mean},
          {"shifted_gamma_ci99", mc.shifted_gamma.ci99},
          {"floored_trials", mc.floored_trials},
          {"closed_form", closed}};
}

int cmd_size_est(const SizeOptions& o) {
  const SeedChoice seed = parse_seed(o.seed);
  if (o.scenario.empty()) {
    if (o.n == 0 || o.p < 2) throw ConfigError("size-est: give --scenario, or --n and --p >= 2");
    monte_carlo_json(o.n, o.p, o.eps, o.trials, seed.value.value_or(0));
    return kExitOk;
  }
  const Scenario s = load_scenario_file(o.scenario, seed.value);
  if (!s.dse) throw ConfigError("scenario '" + s.name + "' has no size_estimation section");
  const auto r = run_size_estimation(s);
  const auto& w0 = r.windows.front();
  const double eps = s.protocol.variant == Variant::approximate
                         ? s.protocol.alpha * static_cast<double>(w0.diameter)
                         : 0.0;
  nlohmann::json extra = monte_carlo_json(w0.n_active, r.p, eps, o.trials, s.seed);
  extra.update(seed_json(seed));
  const fs::path dir = out_dir(o.out, s.name);
  write_run_outputs(dir, r, extra);
  std::cout << "wrote " << dir.string() << '\n';
  return kExitOk;
}

// sweep -------------------------------------------------------------------------

struct SweepOptions {
  std::string scenario, out, grid;
};

struct SweepRow {
  double value = 0.0;
  double eps_emp = std::numeric_limits<double>::quiet_NaN();
  double eps_theory = std::numeric_limits<double>::quiet_NaN();
  double tc_emp = std::numeric_limits<double>::quiet_NaN();
  double tc_theory = std::numeric_limits<double>::quiet_NaN();
  double mean_estimate = std::numeric_limits<double>::quiet_NaN();
  double expected = std::numeric_limits<double>::quiet_NaN();
  double bias = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
};

void sweep_consensus(const Scenario& s, SweepRow& row) {
  const auto r = run(s);
  row.eps_emp = row.eps_theory = row.tc_emp = row.tc_theory = 0.0;
  for (const auto& w : r.windows) {
    row.eps_theory = std::max(row.eps_theory, w.bounds.tracking_bound);
    row.tc_theory = std::max(row.tc_theory, static_cast<double>(w.bounds.convergence_time));
    row.tc_emp = std::max(row.tc_emp, static_cast<double>(w.empirical.times.convergence_time));
    row.eps_emp = std::max(row.eps_emp, w.empirical.max_error_after_convergence);
  }
  if (!r.all_windows_ok()) row.status = "audit-failed";
}

void sweep_size(const Scenario& s, SweepRow& row) {
  const auto r = run_size_estimation(s);
  row.eps_emp = row.eps_theory = row.tc_emp = row.tc_theory = 0.0;
  double sum = 0.0, n_sum = 0.0, expected = 0.0;
  std::size_t count = 0;
  for (const auto& w : r.windows) {
    row.eps_theory = std::max(row.eps_theory, w.steady_bound);
    row.tc_theory = std::max(row.tc_theory, static_cast<double>(w.convergence_time));
    std::vector<double> errs;
    for (Tick k = w.change_tick; k < w.end_tick; ++k)
      errs.push_back(r.trace[static_cast<std::size_t>(k)].max_error);
    const auto t = detect_times(errs, w.steady_bound);
    row.tc_emp = std::max(row.tc_emp, static_cast<double>(t.convergence_time));
    for (std::size_t i = t.convergence_time; i < errs.size(); ++i)
      row.eps_emp = std::max(row.eps_emp, errs[i]);
    if (!std::isnan(w.steady_mean_estimate)) {
      const auto len = static_cast<double>(w.end_tick - w.change_tick) -
                       static_cast<double>(w.convergence_time);
      sum += w.steady_mean_estimate * len;
      n_sum += static_cast<double>(w.n_active) * len;
      expected += w.expected_closed_form * len;
      count += static_cast<std::size_t>(len);
    }
    if (!w.reconverged) row.status = "not-reconverged";
  }
  if (count > 0) {
    const auto c = static_cast<double>(count);
    row.mean_estimate = sum / c;
    row.expected = expected / c;
    row.bias = (sum - n_sum) / c;
  }
}

int cmd_sweep(const SweepOptions& o) {
  const auto eq = o.grid.find('=');
  if (eq == std::string::npos) throw ConfigError("--grid expects name=v1,v2,...");
  const std::string name = o.grid.substr(0, eq);
  if (name != "alpha" && name != "depth" && name != "p")
    throw ConfigError("--grid parameter must be alpha, depth or p, got '" + name + "'");
  std::vector<double> values;
  std::stringstream list(o.grid.substr(eq + 1));
  for (std::string item; std::getline(list, item, ',');) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--grid value '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw ConfigError("--grid has no values");

  const Scenario base = load_scenario_file(o.scenario);
  if (name == "alpha" && base.protocol.variant != Variant::approximate)
    throw ConfigError("alpha grid needs an approximate-protocol scenario");
  if (name == "depth" && base.protocol.variant != Variant::exact)
    throw ConfigError("depth grid needs an exact-protocol scenario");
  if (name == "p" && !base.dse) throw ConfigError("p grid needs a size-estimation scenario");

  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = values[i];
    try {
      Scenario s = base;
      if (name == "alpha") s.protocol.alpha = values[i];
      if (name == "depth") s.protocol.depth = static_cast<std::size_t>(values[i]);
      if (name == "p") s.dse->p = static_cast<std::size_t>(values[i]);
      resolve(s);
      if (s.dse)
        sweep_size(s, row);
      else
        sweep_consensus(s, row);
    } catch (const AssumptionViolation& e) {
      row.status = std::string("assumption: ") + e.what();
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
  });

  const fs::path dir = out_dir(o.out, base.name + "_sweep_" + name);
  fs::create_directories(dir);
  const fs::path csv = dir / "sweep.csv";
  std::ofstream out(csv);
  if (!out) throw ConfigError("cannot write " + csv.string());
  out << std::setprecision(17)
      << "param,value,eps_emp,eps_theory,Tc_emp,Tc_theory,mean_estimate,expected,bias,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    for (char& c : status)
      if (c == ',' || c == '\n') c = ';';
    out << name << ',' << r.value << ',' << r.eps_emp << ',' << r.eps_theory << ',' << r.tc_emp
        << ',' << r.tc_theory << ',' << r.mean_estimate << ',' << r.expected << ',' << r.bias
        << ',' << status << '\n';
    std::cout << name << '=' << r.value << "  eps_emp " << r.eps_emp << "  eps_theory "
              << r.eps_theory << "  Tc_emp " << r.tc_emp << "  Tc_theory " << r.tc_theory
              << "  " << r.status << '\n';
  }
  std::cout << "wrote " << csv.string() << '\n';
  return kExitOk;
}

// validate ----------------------------------------------------------------------

int cmd_validate(const std::string& path) {
  const Scenario s = load_scenario_file(path);
  std::cout << s.name << ": ok (" << s.protocol.name() << ", " << s.initial_graph.size()
            << " agents, diameter " << diameter(s.initial_graph) << ", " << s.schedule.size()
            << " change(s), slope bound " << s.slope_bound() << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max/min consensus simulator for open multi-agent systems"};
  app.require_subcommand(1, 1);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write trace, summary and plot data");
  run_cmd->add_option("--scenario,scenario", run_opts.scenario, "Scenario file")->required();
  run_cmd->add_option("--out", run_opts.out, "Output directory");
  run_cmd->add_option("--seed", run_opts.seed, "Seed override (u64 or 'auto')");

  BoundsOptions b_opts;
  auto* bounds_cmd = app.add_subcommand("bounds", "Print theoretical bounds");
  bounds_cmd->add_option("--protocol", b_opts.protocol, "admc, admc-min, edmc or edmc-min");
  bounds_cmd->add_option("--scenario", b_opts.scenario, "Derive bounds from a scenario run");
  bounds_cmd->add_option("--diameter", b_opts.diameter, "Network diameter");
  bounds_cmd->add_option("--depth", b_opts.depth, "Diameter bound Delta (exact protocols)");
  bounds_cmd->add_option("--alpha", b_opts.alpha, "Decay rate (approximate protocols)");
  bounds_cmd->add_option("--slope", b_opts.slope, "Input slope bound Pi");
  bounds_cmd->add_option("--overshoot", b_opts.overshoot, "Initial overshoot past the target");
  bounds_cmd->add_option("--dwell", b_opts.dwell, "Dwell time between network changes");

  SizeOptions s_opts;
  auto* size_cmd = app.add_subcommand("size-est", "Size estimation run and worst-case Monte Carlo");
  size_cmd->add_option("--scenario", s_opts.scenario, "Size-estimation scenario file");
  size_cmd->add_option("--out", s_opts.out, "Output directory");
  size_cmd->add_option("--seed", s_opts.seed, "Seed override (u64 or 'auto')");
  size_cmd->add_option("--trials", s_opts.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  size_cmd->add_option("--n", s_opts.n, "Network size (without --scenario)");
  size_cmd->add_option("--p", s_opts.p, "Coordinates per agent (without --scenario)");
  size_cmd->add_option("--eps", s_opts.eps, "Worst-case underestimate (without --scenario)");

  SweepOptions w_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid and tabulate errors");
  sweep_cmd->add_option("--scenario", w_opts.scenario, "Scenario file")->required();
  sweep_cmd->add_option("--grid", w_opts.grid, "name=v1,v2,... with name alpha, depth or p")
      ->required();
  sweep_cmd->add_option("--out", w_opts.out, "Output directory");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Load a scenario and check its assumptions");
  validate_cmd->add_option("--scenario,scenario", validate_path, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts);
    if (*bounds_cmd) return cmd_bounds(b_opts);
    if (*size_cmd) return cmd_size_est(s_opts);
    if (*sweep_cmd) return cmd_sweep(w_opts);
    if (*validate_cmd) return cmd_validate(validate_path);
  } catch (const AssumptionViolation& e) {
    std::cerr << "assumption violated: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
