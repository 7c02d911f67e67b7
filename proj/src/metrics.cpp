#include "cdnet/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cdnet {

std::string_view to_string(Metric m) {
  return m == Metric::VirtualNeighborhood ? "v" : "k";
}

int virtual_neighborhood_size(const NetworkState& state, NodeId node) {
  std::vector<NodeId> seen;
  for (const Link& l : state.links) {
    if (l.a.node == node || l.b.node == node) seen.push_back(l.counterpart(node));
  }
  std::sort(seen.begin(), seen.end());
  return static_cast<int>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

int virtual_degree(const NetworkState& state, NodeId node) {
  return static_cast<int>(std::count_if(state.links.begin(), state.links.end(), [&](const Link& l) {
    return l.a.node == node || l.b.node == node;
  }));
}

MetricBounds metric_bounds(int degree, int cutoff, int max_swap_distance) {
  switch (degree) {
    case 2: return {2 * std::min(cutoff, max_swap_distance), 2 * cutoff};
    case 3:
    case 4:
    case 6: {
      const int shells = max_swap_distance * (max_swap_distance + 1) / 2;
      return {degree * std::min(cutoff, shells), degree * cutoff};
    }
    default:
      throw std::invalid_argument("no metric bounds for physical degree " +
                                  std::to_string(degree));
  }
}

std::vector<MetricBounds> node_bounds(const PhysicalGraph& g, int cutoff,
                                      int max_swap_distance) {
  std::vector<MetricBounds> out(g.node_count());
  if (g.boundary() == Boundary::Periodic) {
    std::fill(out.begin(), out.end(), metric_bounds(g.nominal_degree(), cutoff, max_swap_distance));
    return out;
  }
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const int k = g.degree(i) * cutoff;
    const int reach = static_cast<int>(potential_neighborhood(g, i, max_swap_distance).size());
    out[i] = {std::min(k, reach), k};
  }
  return out;
}

void MetricObserver::observe(const NetworkState& state, std::int32_t node_count,
                             MetricSample& out) {
  out.t = state.observation_time();
  offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
  for (const Link& l : state.links) {
    ++offsets_[l.a.node + 1];
    ++offsets_[l.b.node + 1];
  }
  for (std::int32_t v = 0; v < node_count; ++v) offsets_[v + 1] += offsets_[v];
  counterparts_.resize(offsets_.back());
  out.k.resize(node_count);
  for (std::int32_t v = 0; v < node_count; ++v) out.k[v] = 0;
  for (const Link& l : state.links) {
    counterparts_[offsets_[l.a.node] + out.k[l.a.node]++] = l.b.node;
    counterparts_[offsets_[l.b.node] + out.k[l.b.node]++] = l.a.node;
  }
  stamp_.assign(node_count, -1);
  out.v.assign(node_count, 0);
  for (std::int32_t v = 0; v < node_count; ++v) {
    int distinct = 0;
    for (std::int32_t e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      const NodeId j = counterparts_[e];
      if (stamp_[j] != v) {
        stamp_[j] = v;
        ++distinct;
      }
    }
    out.v[v] = distinct;
  }
}

void check_bounds(const MetricSample& sample, const std::vector<MetricBounds>& bounds) {
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const int v = sample.v[i];
    const int k = sample.k[i];
    if (v < 0 || v > k || k > bounds[i].k || v > bounds[i].v) {
      throw InvariantViolation("metric bound violated at node " + std::to_string(i) +
                               " t=" + std::to_string(sample.t) + ": v=" + std::to_string(v) +
                               " k=" + std::to_string(k) + " (bounds v<=" +
                               std::to_string(bounds[i].v) + ", k<=" +
                               std::to_string(bounds[i].k) + ")");
    }
  }
}

}  // namespace cdnet
