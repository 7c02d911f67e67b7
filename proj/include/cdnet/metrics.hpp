#pragma once

#include <vector>

#include "cdnet/lattice.hpp"
#include "cdnet/protocol.hpp"

namespace cdnet {

enum class Metric { VirtualNeighborhood, VirtualDegree };
std::string_view to_string(Metric m);  // "v" / "k"

/// Number of distinct nodes sharing at least one link with `node`.
int virtual_neighborhood_size(const NetworkState& state, NodeId node);
/// Number of links incident to `node`, counting multiplicity.
int virtual_degree(const NetworkState& state, NodeId node);

struct MetricBounds {
  int v;
  int k;
};

/// Upper bounds on v_i and k_i in an infinite regular network of degree d
/// (2, 3, 4 or 6). Throws std::invalid_argument for other degrees.
MetricBounds metric_bounds(int degree, int cutoff, int max_swap_distance);

/// Per-node bounds for an arbitrary lattice: k_i <= d_i t_cut and
/// v_i <= min(d_i t_cut, |nodes within M hops|). On periodic lattices these
/// coincide with metric_bounds().
std::vector<MetricBounds> node_bounds(const PhysicalGraph& g, int cutoff,
                                      int max_swap_distance);

/// v_i and k_i of every node at one observation.
struct MetricSample {
  int t = 0;
  std::vector<int> v;
  std::vector<int> k;
};

/// Computes all nodes' metrics in one pass over the links.
class MetricObserver {
 public:
  void observe(const NetworkState& state, std::int32_t node_count, MetricSample& out);

 private:
  std::vector<std::int32_t> offsets_;
  std::vector<NodeId> counterparts_;
  std::vector<NodeId> stamp_;
};

/// Throws InvariantViolation when a sample exceeds its bounds or v_i > k_i.
void check_bounds(const MetricSample& sample, const std::vector<MetricBounds>& bounds);

}  // namespace cdnet
