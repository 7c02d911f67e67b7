#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cdnet/entanglement.hpp"
#include "cdnet/estimation.hpp"
#include "cdnet/lattice.hpp"

namespace cdnet {

/// Invalid or unparsable experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which nodes get rows in the output.
struct NodeSelection {
  enum class Kind { All, Representative, List } kind = Kind::Representative;
  std::vector<NodeId> nodes;  // for Kind::List
};

/// One resolved hardware/policy combination of a sweep (q excluded).
struct SweepPoint {
  HardwareParams hardware;  // coherence_time already scaled when linked to p_gen
  int cutoff = 0;
  int max_swap_distance = 0;
  double f_min = 0.5;
  Schedule schedule;
};

struct ExperimentConfig {
  LatticeSpec lattice;
  std::vector<SweepPoint> points;  // cartesian product over listed hardware values
  std::vector<double> q_values;
  std::int64_t realizations = 0;
  std::uint64_t base_seed = 0;
  std::int64_t q_index_base = 0;
  NodeSelection tracked;
  bool verify_fidelity = false;
  bool link_pgen_scaling = false;
  nlohmann::json source;  // configuration as written

  /// Largest M over the sweep; periodic lattices are validated against it.
  int max_swap_distance() const;
};

/// Parses and fully resolves a configuration: "auto" cutoffs and swap
/// distances are derived, the cutoff relation and the periodic wrap rule are
/// checked. Throws ConfigError on any problem.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Seed of the realization stream used for q grid index `q_index`.
std::uint64_t stream_seed(std::uint64_t base_seed, std::int64_t q_index);

struct SweepResultRow {
  std::string topology;
  std::string boundary;
  std::string dims;
  int degree = 0;
  double q = 0.0;
  double p_gen = 0.0;
  double p_swap = 0.0;
  double coherence_time = 0.0;
  int cutoff = 0;
  double f_new = 0.0;
  double f_min = 0.0;
  int max_swap_distance = 0;
  std::int64_t realizations = 0;
  int steps = 0;
  int window = 0;
  NodeId node = 0;
  Metric metric = Metric::VirtualNeighborhood;
  double mean = 0.0;
  double std_dev = 0.0;
  double band6 = 0.0;
  bool steady = false;
};

/// Mean series over time of one tracked node, for convergence plots.
struct TimeSeriesRow {
  std::size_t point = 0;
  double q = 0.0;
  NodeId node = 0;
  Metric metric = Metric::VirtualNeighborhood;
  int t = 0;
  double mean = 0.0;
};

struct SweepOutput {
  std::vector<SweepResultRow> rows;
  std::vector<TimeSeriesRow> series;
};

std::vector<NodeId> tracked_nodes(const NodeSelection& selection, const PhysicalGraph& graph);

/// Runs every (point, q) combination. Rows are ordered by point, then q, then
/// node, then metric (v before k).
SweepOutput run_sweep(const ExperimentConfig& config, Execution execution = Execution::Parallel);

/// Column names, in output order.
const std::vector<std::string>& csv_columns();
void write_csv(std::ostream& os, const std::vector<SweepResultRow>& rows);
void write_timeseries_csv(std::ostream& os, const ExperimentConfig& config,
                          const std::vector<TimeSeriesRow>& rows);

/// Sidecar recording the resolved configuration, seeds and code version.
nlohmann::json sweep_metadata(const ExperimentConfig& config);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace cdnet
