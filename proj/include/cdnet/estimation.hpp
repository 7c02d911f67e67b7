#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdnet/lattice.hpp"
#include "cdnet/metrics.hpp"
#include "cdnet/protocol.hpp"

namespace cdnet {

/// Simulation length and steady-state window, in time steps.
struct Schedule {
  int steps = 0;
  int window = 0;
};

/// 3 t_cut steps with a t_cut window; finite chains run 6 t_cut steps.
Schedule default_schedule(int cutoff, Topology kind, Boundary boundary);

struct SteadyStateVerdict {
  bool success = false;
  double error_scale = 0.0;  // eps' = 3 (b - a) / sqrt(N)
  double min_overlap = 0.0;  // smallest confidence-interval overlap over window pairs
};

/// Declares a steady state iff every pair of window means overlaps by at
/// least 1.5 eps', i.e. 2 eps' - |X_i - X_j| >= 1.5 eps'. Requires at least
/// two window points and N >= 1.
SteadyStateVerdict steady_state_check(std::span<const double> window_means, double lower,
                                      double upper, std::int64_t realizations);

/// v_i(t) and k_i(t) of one realization, indexed [t * nodes + i].
struct RealizationSeries {
  int steps = 0;
  std::int32_t nodes = 0;
  std::vector<int> v;
  std::vector<int> k;
};

/// Runs one realization from the empty state. Every observation is checked
/// against the metric bounds; with config.verify_fidelity every live link is
/// also checked against F_min.
RealizationSeries run_realization(const PhysicalGraph& graph, const ProtocolConfig& config,
                                  const Schedule& schedule, std::uint64_t seed);

/// Exact integer sums over realizations of v, k and their squares for every
/// (t, node). Integer accumulation makes the reduction order-free.
class SeriesAccumulator {
 public:
  SeriesAccumulator() = default;
  SeriesAccumulator(int steps, std::int32_t nodes);

  void add(const RealizationSeries& series);
  void merge(const SeriesAccumulator& other);

  std::int64_t count() const noexcept { return count_; }
  int steps() const noexcept { return steps_; }
  std::int32_t nodes() const noexcept { return nodes_; }

  double mean(Metric m, int t, NodeId node) const;
  /// Sample standard deviation (N - 1 denominator).
  double std_dev(Metric m, int t, NodeId node) const;
  std::int64_t sum(Metric m, int t, NodeId node) const;

  friend bool operator==(const SeriesAccumulator&, const SeriesAccumulator&) = default;

 private:
  std::size_t at(int t, NodeId node) const {
    return static_cast<std::size_t>(t) * nodes_ + node;
  }
  const std::vector<std::int64_t>& sums(Metric m) const { return m == Metric::VirtualNeighborhood ? sum_v_ : sum_k_; }
  const std::vector<std::int64_t>& squares(Metric m) const { return m == Metric::VirtualNeighborhood ? sq_v_ : sq_k_; }

  int steps_ = 0;
  std::int32_t nodes_ = 0;
  std::int64_t count_ = 0;
  std::vector<std::int64_t> sum_v_, sum_k_, sq_v_, sq_k_;
};

struct EstimateRecord {
  NodeId node = 0;
  Metric metric = Metric::VirtualNeighborhood;
  double mean = 0.0;     // sample mean at the final step
  double std_dev = 0.0;  // sample standard deviation at the final step
  double band6 = 0.0;    // 6 s / sqrt(N)
  SteadyStateVerdict verdict;
};

struct EstimateResult {
  Schedule schedule;
  SeriesAccumulator series;
  std::vector<EstimateRecord> records;  // node-major, v before k

  const EstimateRecord& record(NodeId node, Metric m) const {
    return records[2 * static_cast<std::size_t>(node) + (m == Metric::VirtualNeighborhood ? 0 : 1)];
  }
};

enum class Execution { Serial, Parallel };

/// Seed of realization r in a stream: mix_seed(stream_seed, r).
std::uint64_t realization_seed(std::uint64_t stream_seed, std::int64_t realization);

/// Monte Carlo estimate of the steady-state metrics of every node over N
/// realizations. The serial path is the reference; the parallel path
/// distributes realizations over OpenMP threads and returns identical results.
EstimateResult estimate(const PhysicalGraph& graph, const ProtocolConfig& config,
                        const Schedule& schedule, std::int64_t realizations,
                        std::uint64_t stream_seed, Execution execution = Execution::Parallel);

/// Records computed from accumulated series (exposed for testing).
std::vector<EstimateRecord> summarize(const SeriesAccumulator& series, const Schedule& schedule,
                                      const std::vector<MetricBounds>& bounds);

}  // namespace cdnet
