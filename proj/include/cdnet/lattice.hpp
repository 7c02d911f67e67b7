#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cdnet {

using NodeId = std::int32_t;

enum class Topology { Chain, Honeycomb, Square, Triangular };
enum class Boundary { Finite, Periodic };

/// Port direction. Chains use West/East only; honeycomb nodes carry West,
/// East and one of South/North; triangular adds the NorthEast/SouthWest
/// diagonal. Values are the canonical port order.
enum class Orientation : std::uint8_t {
  West = 0,
  East = 1,
  South = 2,
  North = 3,
  NorthEast = 4,
  SouthWest = 5,
};
inline constexpr int kOrientationCount = 6;

int nominal_degree(Topology kind);
std::string_view to_string(Topology kind);
std::string_view to_string(Boundary boundary);
std::string_view to_string(Orientation o);
Topology parse_topology(std::string_view text);
Boundary parse_boundary(std::string_view text);

struct LatticeSpec {
  Topology kind = Topology::Square;
  Boundary boundary = Boundary::Periodic;
  std::vector<int> dims;  // {n} for chains, {width, height} otherwise
};

struct Port {
  Orientation orientation;
  NodeId neighbor;
  std::int32_t channel;
};

struct Channel {
  NodeId a;
  NodeId b;
  Orientation at_a;  // port orientation of the channel at a
  Orientation at_b;
};

class PhysicalGraph {
 public:
  PhysicalGraph(LatticeSpec spec, std::vector<std::vector<Port>> ports,
                std::vector<Channel> channels);

  const LatticeSpec& spec() const noexcept { return spec_; }
  Topology kind() const noexcept { return spec_.kind; }
  Boundary boundary() const noexcept { return spec_.boundary; }
  int nominal_degree() const noexcept { return cdnet::nominal_degree(spec_.kind); }

  std::int32_t node_count() const noexcept {
    return static_cast<std::int32_t>(ports_.size());
  }
  const std::vector<Port>& ports(NodeId node) const { return ports_.at(node); }
  int degree(NodeId node) const {
    return static_cast<int>(ports_.at(node).size());
  }
  const std::vector<Channel>& channels() const noexcept { return channels_; }

  /// Grid coordinates of a node (row-major indexing; y is 0 for chains).
  int x_of(NodeId node) const noexcept { return node % spec_.dims[0]; }
  int y_of(NodeId node) const noexcept { return node / spec_.dims[0]; }

  /// "10x10" style description of the dimensions.
  std::string dims_string() const;

 private:
  LatticeSpec spec_;
  std::vector<std::vector<Port>> ports_;
  std::vector<Channel> channels_;
};

/// Builds a regular lattice. Periodic dimensions must each be at least
/// 2 * max_swap_distance + 2 so that no chain of at most that many segments
/// can wrap around the torus; periodic honeycomb dimensions must be even.
/// Throws std::invalid_argument otherwise.
PhysicalGraph build_lattice(const LatticeSpec& spec, int max_swap_distance = 1);

/// Smallest periodic dimension accepted for a given maximum swap distance.
constexpr int min_periodic_dim(int max_swap_distance) {
  return 2 * max_swap_distance + 2;
}

/// Hop count of the shortest channel path, or -1 if b is unreachable.
int graph_distance(const PhysicalGraph& g, NodeId a, NodeId b);

/// All nodes j != i with graph_distance(i, j) <= max_distance, ascending.
std::vector<NodeId> potential_neighborhood(const PhysicalGraph& g, NodeId i,
                                           int max_distance);

/// Node used when a single node stands in for the lattice: node 0 on periodic
/// lattices, the node closest to the geometric centre on finite ones.
NodeId representative_node(const PhysicalGraph& g);

}  // namespace cdnet
