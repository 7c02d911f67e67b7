// Command-line front end: simulate sweeps, derive cutoff parameters, run the
// exact enumerator on tiny configurations, and validate config files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "cdnet/entanglement.hpp"
#include "cdnet/experiment.hpp"
#include "cdnet/oracle.hpp"
#include "cdnet/protocol.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace cdnet;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

void print_point(const ExperimentConfig& cfg) {
  std::printf("lattice: %s %s", std::string(to_string(cfg.lattice.kind)).c_str(),
              std::string(to_string(cfg.lattice.boundary)).c_str());
  for (int d : cfg.lattice.dims) std::printf(" %d", d);
  std::printf("\n%-8s %-8s %-8s %-8s %-8s %-6s %-4s %-6s %-6s\n", "p_gen", "p_swap", "T", "F_new",
              "F_min", "t_cut", "M", "steps", "window");
  for (const auto& p : cfg.points) {
    std::printf("%-8s %-8s %-8s %-8s %-8s %-6d %-4d %-6d %-6d\n",
                format_number(p.hardware.p_gen).c_str(), format_number(p.hardware.p_swap).c_str(),
                format_number(p.hardware.coherence_time).c_str(),
                format_number(p.hardware.f_new).c_str(), format_number(p.f_min).c_str(), p.cutoff,
                p.max_swap_distance, p.schedule.steps, p.schedule.window);
  }
  std::printf("q grid: %zu value(s); N=%lld; seed=%llu\n", cfg.q_values.size(),
              static_cast<long long>(cfg.realizations),
              static_cast<unsigned long long>(cfg.base_seed));
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool serial,
                 bool timeseries) {
  const auto cfg = load_config(config_path);
  const auto out = run_sweep(cfg, serial ? Execution::Serial : Execution::Parallel);
  fs::create_directories(out_dir);
  const fs::path csv_path = fs::path(out_dir) / "results.csv";
  const fs::path meta_path = fs::path(out_dir) / "results.meta.json";
  {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    write_csv(csv, out.rows);
  }
  {
    std::ofstream meta(meta_path);
    if (!meta) throw std::runtime_error("cannot write " + meta_path.string());
    meta << sweep_metadata(cfg).dump(2) << '\n';
  }
  if (timeseries) {
    std::ofstream ts(fs::path(out_dir) / "timeseries.csv");
    write_timeseries_csv(ts, cfg, out.series);
  }
  std::printf("wrote %zu rows to %s\n", out.rows.size(), csv_path.string().c_str());
  return 0;
}

int cmd_derive(double coherence, double f_new, double f_min, int m, int cutoff) {
  if ((m > 0) == (cutoff > 0)) {
    std::fprintf(stderr, "error: give exactly one of --M or --tcut\n");
    return kExitConfig;
  }
  try {
    HardwareParams hw{1.0, 1.0, coherence, f_new};
    validate(hw);
    PolicyParams check{1, 1, f_min, 0.0};
    validate(check);
    if (m > 0) {
      const double bound = cutoff_bound(coherence, f_new, f_min, m);
      const int t_cut = max_cutoff(coherence, f_new, f_min, m);
      std::printf("%-8s %-8s %-8s %-4s %-12s %-6s\n", "T", "F_new", "F_min", "M", "bound", "t_cut");
      std::printf("%-8s %-8s %-8s %-4d %-12.6f %-6d\n", format_number(coherence).c_str(),
                  format_number(f_new).c_str(), format_number(f_min).c_str(), m, bound, t_cut);
    } else {
      const int max_m = max_swap_distance(coherence, cutoff, f_new, f_min);
      std::printf("%-8s %-8s %-8s %-6s %-12s %-4s\n", "T", "F_new", "F_min", "t_cut", "bound(M)", "M");
      std::printf("%-8s %-8s %-8s %-6d %-12.6f %-4d\n", format_number(coherence).c_str(),
                  format_number(f_new).c_str(), format_number(f_min).c_str(), cutoff,
                  cutoff_bound(coherence, f_new, f_min, max_m), max_m);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr,
                 "error: %s\n  relation: t_cut <= -T ln((3/(4F_new-1)) ((4F_min-1)/3)^(1/M))\n",
                 e.what());
    return kExitConfig;
  }
  return 0;
}

int cmd_oracle(const std::string& config_path, int t, long long budget) {
  const auto cfg = load_config(config_path);
  if (cfg.points.size() != 1 || cfg.q_values.size() != 1) {
    throw ConfigError("oracle needs a single hardware point and a single q");
  }
  const auto& point = cfg.points.front();
  const auto graph = build_lattice(cfg.lattice, point.max_swap_distance);
  ProtocolConfig protocol;
  protocol.hardware = point.hardware;
  protocol.policy = {point.cutoff, point.max_swap_distance, point.f_min, cfg.q_values.front()};
  const int at = t >= 0 ? t : point.schedule.steps - 1;
  const auto exact = enumerate_exact(graph, protocol, at, budget);
  std::printf("t=%d branches=%lld states=%zu total_probability=%.15f\n", exact.t,
              static_cast<long long>(exact.branches), exact.distinct_states,
              exact.total_probability);
  std::printf("%-6s %-20s %-20s\n", "node", "E[v]", "E[k]");
  for (NodeId i = 0; i < graph.node_count(); ++i) {
    std::printf("%-6d %-20.15g %-20.15g\n", i, exact.v[i], exact.k[i]);
  }
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const auto cfg = load_config(config_path);
  print_point(cfg);
  std::printf("config OK\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous entanglement distribution on regular lattices"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool serial = false;
  bool timeseries = false;
  int threads = 0;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo sweep and write CSV + metadata");
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_flag("--serial", serial, "Use the single-threaded reference path");
  simulate->add_flag("--timeseries", timeseries, "Also write per-step mean series");
  simulate->add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");

  double coherence = 0.0, f_new = 0.0, f_min = 0.5;
  int m = 0, cutoff = 0;
  auto* derive = app.add_subcommand("derive-params", "Evaluate the cutoff relation");
  derive->add_option("--T", coherence, "Coherence time in time steps")->required();
  derive->add_option("--Fnew", f_new, "Generation fidelity")->required();
  derive->add_option("--Fmin", f_min, "Minimum fidelity")->capture_default_str();
  derive->add_option("--M", m, "Maximum swap distance (prints the largest cutoff)");
  derive->add_option("--tcut", cutoff, "Cutoff time (prints the largest swap distance)");

  int oracle_t = -1;
  long long budget = kDefaultBranchBudget;
  auto* oracle = app.add_subcommand("oracle", "Exact expectations by exhaustive enumeration");
  oracle->add_option("--config", config_path, "Tiny experiment config (JSON)")->required()->check(CLI::ExistingFile);
  oracle->add_option("--t", oracle_t, "Observation step (default: last scheduled step)");
  oracle->add_option("--budget", budget, "Branch budget")->capture_default_str();

  auto* validate_cmd = app.add_subcommand("validate", "Parse and resolve a config");
  validate_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (*simulate) return cmd_simulate(config_path, out_dir, serial, timeseries);
    if (*derive) return cmd_derive(coherence, f_new, f_min, m, cutoff);
    if (*oracle) return cmd_oracle(config_path, oracle_t, budget);
    if (*validate_cmd) return cmd_validate(config_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return kExitInvariant;
  } catch (const BranchBudgetExceeded& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
