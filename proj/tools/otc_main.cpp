// otc — command-line front end: steady states, master-equation trajectories,
// finite-population simulation, and cross-method verification for three
// classes of search-based OTC market models.
//
// Subcommands: integrate | steady | simulate | verify
// Exit status: 0 success (including a no-steady-state answer),
//              1 runtime or check failure, 2 config/validation errors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otc/error.hpp"
#include "otc/io.hpp"
#include "otc/models.hpp"
#include "otc/ode.hpp"
#include "otc/poincare_miranda.hpp"
#include "otc/random_draws.hpp"
#include "otc/sim.hpp"
#include "otc/state.hpp"
#include "otc/steady.hpp"

namespace {

using namespace otc;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CliOptions {
  std::string config_path;
  std::string out_override;
  bool quiet = false;
  std::optional<double> tol;
  std::optional<double> eps;
  std::optional<std::size_t> grid;
  std::optional<std::uint64_t> seed;
};

std::size_t model_assets(const RunConfig& config) {
  switch (config.model_class) {
    case ModelClass::NonSegmented: return config.nonseg->assets();
    case ModelClass::PartiallySegmented: return config.partseg->assets();
    case ModelClass::Heterogeneous: return 0;
  }
  return 0;
}

RhsFn config_rhs(const RunConfig& config) {
  switch (config.model_class) {
    case ModelClass::NonSegmented: return make_rhs(*config.nonseg);
    case ModelClass::PartiallySegmented: return make_rhs(*config.partseg);
    case ModelClass::Heterogeneous: return make_rhs(*config.het);
  }
  return {};
}

// Initial state from the config, validated, or the default split state.
StateDistribution config_initial(const RunConfig& config) {
  StateDistribution mu;
  switch (config.model_class) {
    case ModelClass::NonSegmented: mu = default_initial_state(*config.nonseg); break;
    case ModelClass::PartiallySegmented:
      mu = default_initial_state(*config.partseg);
      break;
    case ModelClass::Heterogeneous: mu = default_initial_state(*config.het); break;
  }
  if (config.initial) {
    mu.values = *config.initial;
    switch (config.model_class) {
      case ModelClass::NonSegmented: check_distribution(*config.nonseg, mu, 1e-9); break;
      case ModelClass::PartiallySegmented:
        check_distribution(*config.partseg, mu, 1e-9);
        break;
      case ModelClass::Heterogeneous: check_distribution(*config.het, mu, 1e-9); break;
    }
  }
  return mu;
}

RunConfig load_with_overrides(const CliOptions& options) {
  RunConfig config = load_config(options.config_path);
  if (!options.out_override.empty()) config.out_prefix = options.out_override;
  if (options.tol) {
    config.steady.tol = *options.tol;
    config.verify.tol = *options.tol;
  }
  if (options.eps) config.steady.eps = *options.eps;
  if (options.grid) config.steady.grid = *options.grid;
  if (options.seed) {
    config.simulate.seed = *options.seed;
    config.verify.seed = *options.seed;
  }
  return config;
}

Table series_table(const std::vector<std::string>& names,
                   const std::vector<double>& times,
                   const std::vector<StateDistribution>& states) {
  Table table;
  table.header.push_back("t");
  table.header.insert(table.header.end(), names.begin(), names.end());
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<std::string> row;
    row.push_back(format_full(times[i]));
    for (double v : states[i].values) row.push_back(format_full(v));
    table.rows.push_back(std::move(row));
  }
  return table;
}

int cmd_integrate(const RunConfig& config, bool quiet) {
  const StateDistribution state0 = config_initial(config);
  const Trajectory traj =
      integrate(config_rhs(config), state0, config.integrate.t_end,
                config.integrate.step, config.integrate.sample_every);
  const auto names = component_names(config.model_class, model_assets(config));
  const std::string path = config.out_prefix + "_trajectory.tsv";
  write_table_atomic(path, series_table(names, traj.times, traj.states));
  if (!quiet)
    std::cout << "wrote " << path << " (" << traj.times.size() << " samples, t_end="
              << format_full(traj.times.back()) << ")\n";
  return kExitOk;
}

void write_steady_tables(const RunConfig& config, const SteadySolution* solution,
                         const NoSteadyStateInfo* missing, bool quiet) {
  const auto names = component_names(config.model_class, model_assets(config));
  Table table;
  table.header = {"method", "no_steady_state", "residual_inf_norm",
                  "certified_box_volume", "detail"};
  table.header.insert(table.header.end(), names.begin(), names.end());
  std::vector<std::string> row;
  if (solution) {
    row = {to_string(solution->method), "0", format_full(solution->residual_inf_norm),
           solution->certified_box_volume ? format_full(*solution->certified_box_volume)
                                          : "na",
           ""};
    for (double v : solution->state.values) row.push_back(format_full(v));
  } else {
    row = {"none", "1", format_full(missing->best_residual), "na", missing->reason};
    for (std::size_t i = 0; i < names.size(); ++i) row.push_back("na");
  }
  table.rows.push_back(std::move(row));
  const std::string path = config.out_prefix + "_steady.tsv";
  write_table_atomic(path, table);
  if (!quiet) {
    if (solution)
      std::cout << "steady state found (" << to_string(solution->method)
                << "), residual " << format_full(solution->residual_inf_norm) << "\n";
    else
      std::cout << "no steady state: " << missing->reason << "\n";
    std::cout << "wrote " << path << "\n";
  }
}

int cmd_steady(const RunConfig& config, bool quiet) {
  switch (config.model_class) {
    case ModelClass::NonSegmented: {
      const SteadySolution sol = solve_nonsegmented(*config.nonseg, config.steady.tol);
      write_steady_tables(config, &sol, nullptr, quiet);
      return kExitOk;
    }
    case ModelClass::PartiallySegmented: {
      const SteadySolution sol =
          solve_partially_segmented(*config.partseg, config.steady.tol);
      write_steady_tables(config, &sol, nullptr, quiet);
      return kExitOk;
    }
    case ModelClass::Heterogeneous: {
      const HeterogeneousOutcome outcome =
          solve_heterogeneous(*config.het, config.steady.tol);
      write_steady_tables(config, outcome.solution ? &*outcome.solution : nullptr,
                          outcome.no_steady_state ? &*outcome.no_steady_state : nullptr,
                          quiet);

      const ConditionPReport report = check_condition_P(*config.het, Box::unit(6));
      Table cp;
      cp.header = {"condition", "holds", "margin"};
      for (std::size_t i = 0; i < report.conditions.size(); ++i)
        cp.rows.push_back({std::to_string(i + 1),
                           report.conditions[i].holds ? "1" : "0",
                           format_full(report.conditions[i].margin)});
      cp.rows.push_back({"all", report.holds ? "1" : "0", ""});
      const std::string cp_path = config.out_prefix + "_condition_p.tsv";
      write_table_atomic(cp_path, cp);
      if (!quiet) std::cout << "wrote " << cp_path << "\n";
      return kExitOk;
    }
  }
  return kExitRuntime;
}

int cmd_simulate(const RunConfig& config, bool quiet) {
  const StateDistribution state0 = config_initial(config);
  SimulationResult sim;
  switch (config.model_class) {
    case ModelClass::NonSegmented:
      sim = simulate(*config.nonseg, state0, config.simulate.n, config.simulate.t_end,
                     config.simulate.sample_every, config.simulate.seed);
      break;
    case ModelClass::PartiallySegmented:
      sim = simulate(*config.partseg, state0, config.simulate.n, config.simulate.t_end,
                     config.simulate.sample_every, config.simulate.seed);
      break;
    case ModelClass::Heterogeneous:
      sim = simulate(*config.het, state0, config.simulate.n, config.simulate.t_end,
                     config.simulate.sample_every, config.simulate.seed);
      break;
  }
  const auto names = component_names(config.model_class, model_assets(config));
  const std::string path = config.out_prefix + "_empirical.tsv";
  write_table_atomic(path, series_table(names, sim.sample_times, sim.empirical));
  if (!quiet)
    std::cout << "wrote " << path << " (" << sim.event_count << " events, seed "
              << sim.seed << ")\n";

  if (config.simulate.compare) {
    const Trajectory ode =
        integrate(config_rhs(config), state0, config.simulate.t_end,
                  config.integrate.step, config.simulate.sample_every);
    const MeanFieldComparison cmp = compare_to_meanfield(sim, ode);
    Table table;
    table.header = {"t", "max_abs_diff"};
    for (std::size_t i = 0; i < cmp.times.size(); ++i)
      table.rows.push_back({format_full(cmp.times[i]), format_full(cmp.per_time[i])});
    const std::string cmp_path = config.out_prefix + "_compare.tsv";
    write_table_atomic(cmp_path, table);
    if (!quiet) {
      std::cout << "wrote " << cmp_path << "\n";
      std::cout << "sup_distance " << format_full(cmp.sup) << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify: cross-method agreement and invariant checks at configured scale.

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <typename Params>
Check conservation_check(const Params& p, const StateDistribution& state0) {
  Check check{"conservation_drift", false, 0.0, 1e-9};
  const Trajectory traj = integrate(make_rhs(p), state0, 50.0, 1e-3, 1.0);
  const std::vector<double> at_start = constraint_residuals(p, traj.states.front());
  double drift = 0.0;
  for (const StateDistribution& s : traj.states) {
    const std::vector<double> res = constraint_residuals(p, s);
    for (std::size_t i = 0; i < res.size(); ++i)
      drift = std::max(drift, std::abs(res[i] - at_start[i]));
  }
  check.value = drift;
  check.pass = drift <= check.threshold;
  return check;
}

template <typename Params, typename Solver>
Check agreement_check(const Params& p, const StateDistribution& state0,
                      const Solver& solve, double tol) {
  Check check{"solver_vs_relaxation", false, 0.0, tol};
  const double relax_tol = std::clamp(tol * 1e-4, 1e-13, 1e-8);
  const SteadySolution sol = solve(p);
  const RelaxationReport relax =
      relax_to_steady(make_rhs(p), state0, relax_tol, 1e4, 1e-3);
  if (!relax.converged) {
    check.value = std::numeric_limits<double>::infinity();
    return check;
  }
  check.value = max_abs_diff(sol.state.values, relax.final_state.values);
  check.pass = check.value <= tol;
  return check;
}

std::vector<Check> verify_checks(const RunConfig& config) {
  std::vector<Check> checks;
  std::mt19937_64 rng(config.verify.seed);
  const double tol = config.verify.tol;

  switch (config.model_class) {
    case ModelClass::NonSegmented: {
      const NonSegmentedParams& p = *config.nonseg;
      // Bracket and monotonicity of the scalar residual over random draws.
      Check bracket{"scalar_bracket_monotonic", false, 0.0,
                    static_cast<double>(config.verify.draws)};
      std::size_t ok = 0;
      for (std::size_t d = 0; d < config.verify.draws; ++d) {
        const NonSegmentedParams q = draw_nonsegmented(rng);
        const double c = 1.0 - q.total_mass();
        bool good = steady_scalar_residual(q, 0.0) > 0.0 &&
                    steady_scalar_residual(q, c) < 0.0;
        double prev = steady_scalar_residual(q, 0.0);
        for (int j = 1; j <= 20 && good; ++j) {
          const double x = c * static_cast<double>(j) / 20.0;
          const double fx = steady_scalar_residual(q, x);
          good = fx < prev;
          prev = fx;
        }
        if (good) ++ok;
      }
      bracket.value = static_cast<double>(ok);
      bracket.pass = ok == config.verify.draws;
      checks.push_back(bracket);

      checks.push_back(agreement_check(
          p, config_initial(config),
          [&](const NonSegmentedParams& q) { return solve_nonsegmented(q, 1e-12); },
          tol));

      if (p.assets() == 1) {
        Check equiv{"k1_equivalence", false, 0.0, 1e-10};
        PartiallySegmentedParams twin;
        twin.lambda = p.lambda;
        twin.gamma_ui = p.gamma_ui;
        twin.gamma_di = p.gamma_di;
        twin.gamma_tilde_ui = {p.gamma_u};
        twin.gamma_tilde_di = {p.gamma_d};
        twin.m = p.m;
        const SteadySolution a = solve_nonsegmented(p, 1e-12);
        const SteadySolution b = solve_partially_segmented(twin, 1e-12);
        equiv.value = max_abs_diff(a.state.values, b.state.values);
        equiv.pass = equiv.value <= equiv.threshold;
        checks.push_back(equiv);
      }
      checks.push_back(conservation_check(p, config_initial(config)));
      break;
    }
    case ModelClass::PartiallySegmented: {
      const PartiallySegmentedParams& p = *config.partseg;
      checks.push_back(agreement_check(
          p, config_initial(config),
          [&](const PartiallySegmentedParams& q) {
            return solve_partially_segmented(q, 1e-12);
          },
          tol));

      Check unique{"multi_start_uniqueness", false, 0.0, 1e-8};
      std::vector<double> reference;
      double spread = 0.0;
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (int start = 0; start < 8; ++start) {
        std::vector<double> x0(p.assets());
        for (double& v : x0) v = unit(rng);
        const std::vector<double> zero = gauss_seidel_zero(p, x0, 1e-12);
        if (reference.empty())
          reference = zero;
        else
          spread = std::max(spread, max_abs_diff(reference, zero));
      }
      unique.value = spread;
      unique.pass = spread <= unique.threshold;
      checks.push_back(unique);

      checks.push_back(conservation_check(p, config_initial(config)));
      break;
    }
    case ModelClass::Heterogeneous: {
      const HeterogeneousParams& p = *config.het;
      if (is_closed_form_family(p)) {
        // Existence verdicts across the supply sweep: root sign decides.
        Check sweep{"closed_form_family_sweep", false, 0.0, 4.0};
        const double svals[4] = {0.5, 1.0, 1.5, 1.75};
        const char* expected[4] = {"yes", "yes", "boundary", "no"};
        std::size_t ok = 0;
        for (int i = 0; i < 4; ++i) {
          const std::optional<double> root = closed_form_root(svals[i]);
          const char* verdict = !root ? "no" : (*root == 0.0 ? "boundary" : "yes");
          if (std::string(verdict) == expected[i]) ++ok;
        }
        sweep.value = static_cast<double>(ok);
        sweep.pass = ok == 4;
        checks.push_back(sweep);
      }
      const HeterogeneousOutcome outcome = solve_heterogeneous(p, 1e-10);
      if (outcome.found()) {
        Check agree{"solver_vs_relaxation", false, 0.0, tol};
        const double relax_tol = std::clamp(tol * 1e-4, 1e-13, 1e-8);
        const RelaxationReport relax =
            relax_to_steady(make_rhs(p), config_initial(config), relax_tol, 1e4, 1e-3);
        agree.value = relax.converged
                          ? max_abs_diff(outcome.solution->state.values,
                                         relax.final_state.values)
                          : std::numeric_limits<double>::infinity();
        agree.pass = agree.value <= tol;
        checks.push_back(agree);
      }
      checks.push_back(conservation_check(p, config_initial(config)));
      break;
    }
  }

  // Simulation against the mean-field trajectory, at configured scale.
  {
    Check lln{"simulation_vs_meanfield", false, 0.0, config.verify.sim_sup_tol};
    const StateDistribution state0 = config_initial(config);
    const double t_end = 50.0;
    SimulationResult sim;
    switch (config.model_class) {
      case ModelClass::NonSegmented:
        sim = simulate(*config.nonseg, state0, config.verify.sim_n, t_end, 1.0,
                       config.verify.seed);
        break;
      case ModelClass::PartiallySegmented:
        sim = simulate(*config.partseg, state0, config.verify.sim_n, t_end, 1.0,
                       config.verify.seed);
        break;
      case ModelClass::Heterogeneous:
        sim = simulate(*config.het, state0, config.verify.sim_n, t_end, 1.0,
                       config.verify.seed);
        break;
    }
    const Trajectory ode = integrate(config_rhs(config), state0, t_end, 1e-3, 1.0);
    lln.value = compare_to_meanfield(sim, ode).sup;
    lln.pass = lln.value <= lln.threshold;
    checks.push_back(lln);
  }
  return checks;
}

int cmd_verify(const RunConfig& config, bool quiet) {
  const std::vector<Check> checks = verify_checks(config);
  Table table;
  table.header = {"check", "status", "value", "threshold"};
  bool all_pass = true;
  for (const Check& c : checks) {
    table.rows.push_back({c.name, c.pass ? "pass" : "fail", format_full(c.value),
                          format_full(c.threshold)});
    all_pass = all_pass && c.pass;
    if (!quiet)
      std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  value="
                << format_full(c.value) << " threshold=" << format_full(c.threshold)
                << "\n";
  }
  const std::string path = config.out_prefix + "_verify.tsv";
  write_table_atomic(path, table);
  if (!quiet)
    std::cout << "wrote " << path << (all_pass ? " (all checks passed)\n"
                                               : " (FAILURES present)\n");
  return all_pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady states and simulation for OTC market models"};
  app.require_subcommand(1);

  CliOptions options;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config_path, "path to a JSON run config")
        ->required();
    sub->add_option("--out", options.out_override, "output path prefix override");
    sub->add_option("--tol", options.tol, "solver/verify tolerance override");
    sub->add_option("--eps", options.eps, "subdivision volume threshold override");
    sub->add_option("--grid", options.grid, "face grid resolution override");
    sub->add_option("--seed", options.seed, "random seed override");
    sub->add_flag("--quiet", options.quiet, "suppress progress output");
  };

  CLI::App* integrate_cmd =
      app.add_subcommand("integrate", "integrate the master equation");
  CLI::App* steady_cmd = app.add_subcommand("steady", "compute the steady state");
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "run the finite-population jump process");
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run cross-method agreement checks");
  for (CLI::App* sub : {integrate_cmd, steady_cmd, simulate_cmd, verify_cmd})
    add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig config = load_with_overrides(options);
    if (integrate_cmd->parsed()) return cmd_integrate(config, options.quiet);
    if (steady_cmd->parsed()) return cmd_steady(config, options.quiet);
    if (simulate_cmd->parsed()) return cmd_simulate(config, options.quiet);
    if (verify_cmd->parsed()) return cmd_verify(config, options.quiet);
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ConfigParse:
      case ErrorCode::MassOverflow:
      case ErrorCode::NonPositiveRate:
      case ErrorCode::SplitNotUnit:
      case ErrorCode::SupplyOutOfRange:
      case ErrorCode::InvalidInitialState:
      case ErrorCode::DimensionMismatch:
        return kExitConfig;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
