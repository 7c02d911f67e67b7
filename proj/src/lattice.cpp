#include "cdnet/lattice.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <stdexcept>
#include <utility>

namespace cdnet {
namespace {

struct Step {
  Orientation orientation;
  int dx;
  int dy;
};

// Canonical port order per topology. Honeycomb vertical ports are filtered
// by parity in neighbor_of().
std::vector<Step> steps_for(Topology kind) {
  using O = Orientation;
  switch (kind) {
    case Topology::Chain:
      return {{O::West, -1, 0}, {O::East, 1, 0}};
    case Topology::Honeycomb:
    case Topology::Square:
      return {{O::West, -1, 0}, {O::East, 1, 0}, {O::South, 0, -1}, {O::North, 0, 1}};
    case Topology::Triangular:
      return {{O::West, -1, 0},     {O::East, 1, 0},      {O::South, 0, -1},
              {O::North, 0, 1},     {O::NorthEast, 1, 1}, {O::SouthWest, -1, -1}};
  }
  return {};
}

bool is_positive(Orientation o) {
  return o == Orientation::East || o == Orientation::North ||
         o == Orientation::NorthEast;
}

Orientation opposite(Orientation o) {
  using O = Orientation;
  switch (o) {
    case O::West: return O::East;
    case O::East: return O::West;
    case O::South: return O::North;
    case O::North: return O::South;
    case O::NorthEast: return O::SouthWest;
    case O::SouthWest: return O::NorthEast;
  }
  return o;
}

int wrap(int v, int n) { return ((v % n) + n) % n; }

}  // namespace

int nominal_degree(Topology kind) {
  switch (kind) {
    case Topology::Chain: return 2;
    case Topology::Honeycomb: return 3;
    case Topology::Square: return 4;
    case Topology::Triangular: return 6;
  }
  return 0;
}

std::string_view to_string(Topology kind) {
  switch (kind) {
    case Topology::Chain: return "chain";
    case Topology::Honeycomb: return "honeycomb";
    case Topology::Square: return "square";
    case Topology::Triangular: return "triangular";
  }
  return "?";
}

std::string_view to_string(Boundary boundary) {
  return boundary == Boundary::Finite ? "finite" : "periodic";
}

std::string_view to_string(Orientation o) {
  static constexpr std::array<std::string_view, kOrientationCount> names = {
      "W", "E", "S", "N", "NE", "SW"};
  return names[static_cast<int>(o)];
}

Topology parse_topology(std::string_view text) {
  if (text == "chain") return Topology::Chain;
  if (text == "honeycomb") return Topology::Honeycomb;
  if (text == "square") return Topology::Square;
  if (text == "triangular") return Topology::Triangular;
  throw std::invalid_argument("unknown topology '" + std::string(text) + "'");
}

Boundary parse_boundary(std::string_view text) {
  if (text == "finite") return Boundary::Finite;
  if (text == "periodic") return Boundary::Periodic;
  throw std::invalid_argument("unknown boundary '" + std::string(text) + "'");
}

PhysicalGraph::PhysicalGraph(LatticeSpec spec, std::vector<std::vector<Port>> ports,
                             std::vector<Channel> channels)
    : spec_(std::move(spec)), ports_(std::move(ports)), channels_(std::move(channels)) {}

std::string PhysicalGraph::dims_string() const {
  std::string out;
  for (std::size_t i = 0; i < spec_.dims.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(spec_.dims[i]);
  }
  return out;
}

PhysicalGraph build_lattice(const LatticeSpec& spec, int max_swap_distance) {
  const bool chain = spec.kind == Topology::Chain;
  const std::size_t want_dims = chain ? 1 : 2;
  if (spec.dims.size() != want_dims) {
    throw std::invalid_argument(std::string(to_string(spec.kind)) + " lattice needs " +
                                std::to_string(want_dims) + " dimension(s)");
  }
  for (int d : spec.dims) {
    if (d < 1) throw std::invalid_argument("lattice dimensions must be positive");
  }
  if (max_swap_distance < 1) {
    throw std::invalid_argument("maximum swap distance must be >= 1");
  }
  const bool periodic = spec.boundary == Boundary::Periodic;
  if (periodic) {
    const int min_dim = min_periodic_dim(max_swap_distance);
    for (int d : spec.dims) {
      if (d < min_dim) {
        throw std::invalid_argument(
            "periodic dimension " + std::to_string(d) + " is below " +
            std::to_string(min_dim) + " (2M+2 for M=" +
            std::to_string(max_swap_distance) + "); chains would wrap around");
      }
    }
    if (spec.kind == Topology::Honeycomb && (spec.dims[0] % 2 || spec.dims[1] % 2)) {
      throw std::invalid_argument("periodic honeycomb dimensions must be even");
    }
  }

  const int width = spec.dims[0];
  const int height = chain ? 1 : spec.dims[1];
  const int n = width * height;
  const auto steps = steps_for(spec.kind);

  auto neighbor_of = [&](int x, int y, const Step& s) -> NodeId {
    if (spec.kind == Topology::Honeycomb && s.dy != 0) {
      const bool up = ((x + y) % 2) == 0;
      if ((s.dy > 0) != up) return -1;
    }
    int nx = x + s.dx;
    int ny = y + s.dy;
    if (periodic) {
      nx = wrap(nx, width);
      ny = wrap(ny, height);
    } else if (nx < 0 || nx >= width || ny < 0 || ny >= height) {
      return -1;
    }
    return ny * width + nx;
  };

  // Channels are owned by their positive-direction endpoint.
  std::vector<std::array<std::int32_t, kOrientationCount>> channel_of(n);
  for (auto& row : channel_of) row.fill(-1);
  std::vector<Channel> channels;
  for (NodeId v = 0; v < n; ++v) {
    const int x = v % width;
    const int y = v / width;
    for (const Step& s : steps) {
      if (!is_positive(s.orientation)) continue;
      const NodeId u = neighbor_of(x, y, s);
      if (u < 0) continue;
      channel_of[v][static_cast<int>(s.orientation)] =
          static_cast<std::int32_t>(channels.size());
      channels.push_back({v, u, s.orientation, opposite(s.orientation)});
    }
  }

  std::vector<std::vector<Port>> ports(n);
  for (NodeId v = 0; v < n; ++v) {
    const int x = v % width;
    const int y = v / width;
    for (const Step& s : steps) {
      const NodeId u = neighbor_of(x, y, s);
      if (u < 0) continue;
      const std::int32_t c =
          is_positive(s.orientation)
              ? channel_of[v][static_cast<int>(s.orientation)]
              : channel_of[u][static_cast<int>(opposite(s.orientation))];
      ports[v].push_back({s.orientation, u, c});
    }
  }
  return PhysicalGraph(spec, std::move(ports), std::move(channels));
}

int graph_distance(const PhysicalGraph& g, NodeId a, NodeId b) {
  const auto n = g.node_count();
  if (a < 0 || a >= n || b < 0 || b >= n) throw std::out_of_range("node id");
  if (a == b) return 0;
  std::vector<int> dist(n, -1);
  std::deque<NodeId> frontier{a};
  dist[a] = 0;
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop_front();
    for (const Port& p : g.ports(v)) {
      if (dist[p.neighbor] >= 0) continue;
      dist[p.neighbor] = dist[v] + 1;
      if (p.neighbor == b) return dist[b];
      frontier.push_back(p.neighbor);
    }
  }
  return -1;
}

std::vector<NodeId> potential_neighborhood(const PhysicalGraph& g, NodeId i,
                                           int max_distance) {
  if (max_distance < 1) throw std::invalid_argument("swap distance must be >= 1");
  const auto n = g.node_count();
  std::vector<int> dist(n, -1);
  std::deque<NodeId> frontier{i};
  dist.at(i) = 0;
  std::vector<NodeId> out;
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop_front();
    if (dist[v] == max_distance) continue;
    for (const Port& p : g.ports(v)) {
      if (dist[p.neighbor] >= 0) continue;
      dist[p.neighbor] = dist[v] + 1;
      out.push_back(p.neighbor);
      frontier.push_back(p.neighbor);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

NodeId representative_node(const PhysicalGraph& g) {
  if (g.boundary() == Boundary::Periodic) return 0;
  const auto& dims = g.spec().dims;
  const int cx = (dims[0] - 1) / 2;
  const int cy = dims.size() > 1 ? (dims[1] - 1) / 2 : 0;
  return cy * dims[0] + cx;
}

}  // namespace cdnet
