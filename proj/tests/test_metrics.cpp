#include "doctest.h"

#include <stdexcept>

#include "cdnet/metrics.hpp"

using namespace cdnet;

namespace {

PhysicalGraph make(Topology kind, Boundary boundary, std::vector<int> dims, int m = 1) {
  return build_lattice(LatticeSpec{kind, boundary, std::move(dims)}, m);
}

Link link(NodeId a, Orientation oa, NodeId b, Orientation ob, int m = 1) {
  Link l;
  l.a = {a, oa};
  l.b = {b, ob};
  l.segments = m;
  return l;
}

}  // namespace

TEST_CASE("v counts distinct partners, k counts links") {
  NetworkState s;
  s.time = 1;
  // two parallel links 0-1, one 0-2 (m=2), one 1-2
  s.links.push_back(link(0, Orientation::East, 1, Orientation::West));
  s.links.push_back(link(0, Orientation::East, 1, Orientation::West));
  s.links.push_back(link(0, Orientation::West, 2, Orientation::East, 2));
  s.links.push_back(link(1, Orientation::East, 2, Orientation::West));
  CHECK(virtual_degree(s, 0) == 3);
  CHECK(virtual_neighborhood_size(s, 0) == 2);
  CHECK(virtual_degree(s, 1) == 3);
  CHECK(virtual_neighborhood_size(s, 1) == 2);
  CHECK(virtual_degree(s, 3) == 0);

  MetricObserver obs;
  MetricSample sample;
  obs.observe(s, 4, sample);
  CHECK(sample.t == 0);
  CHECK(sample.v == std::vector<int>{2, 2, 2, 0});
  CHECK(sample.k == std::vector<int>{3, 3, 2, 0});
}

TEST_CASE("bounds for infinite networks") {
  // t_cut = 11, M = 3
  CHECK(metric_bounds(2, 11, 3).v == 6);
  CHECK(metric_bounds(3, 11, 3).v == 18);
  CHECK(metric_bounds(4, 11, 3).v == 24);
  CHECK(metric_bounds(6, 11, 3).v == 36);
  CHECK(metric_bounds(4, 11, 3).k == 44);
  CHECK(metric_bounds(6, 11, 3).k == 66);
  // short cutoff caps v
  CHECK(metric_bounds(2, 2, 3).v == 4);
  CHECK(metric_bounds(4, 2, 3).v == 8);
  CHECK(metric_bounds(3, 2, 3).k == 6);
  CHECK_THROWS_AS(metric_bounds(5, 11, 3), std::invalid_argument);
}

TEST_CASE("per-node bounds agree with the infinite bounds on periodic lattices") {
  struct Case {
    Topology kind;
    std::vector<int> dims;
  };
  const Case cases[] = {{Topology::Chain, {10}},
                        {Topology::Honeycomb, {10, 10}},
                        {Topology::Square, {10, 10}},
                        {Topology::Triangular, {10, 10}}};
  for (const auto& c : cases) {
    for (int tcut : {1, 2, 5, 11}) {
      const auto g = make(c.kind, Boundary::Periodic, c.dims, 3);
      const auto expected = metric_bounds(g.nominal_degree(), tcut, 3);
      for (const auto& b : node_bounds(g, tcut, 3)) {
        CHECK(b.v == expected.v);
        CHECK(b.k == expected.k);
      }
    }
  }
}

TEST_CASE("per-node bounds on a finite chain") {
  const auto g = make(Topology::Chain, Boundary::Finite, {10});
  const auto b = node_bounds(g, 11, 3);
  CHECK(b[0].v == 3);
  CHECK(b[0].k == 11);
  CHECK(b[1].v == 4);
  CHECK(b[5].v == 6);
  CHECK(b[5].k == 22);
}

TEST_CASE("bound violations are reported") {
  MetricSample s;
  s.v = {3};
  s.k = {5};
  CHECK_NOTHROW(check_bounds(s, {{3, 5}}));
  CHECK_THROWS_AS(check_bounds(s, {{2, 5}}), InvariantViolation);
  CHECK_THROWS_AS(check_bounds(s, {{3, 4}}), InvariantViolation);
  s.v = {4};
  s.k = {3};
  CHECK_THROWS_AS(check_bounds(s, {{10, 10}}), InvariantViolation);
}

TEST_CASE("metric names") {
  CHECK(to_string(Metric::VirtualNeighborhood) == "v");
  CHECK(to_string(Metric::VirtualDegree) == "k");
}
