#include "doctest.h"

#include <cmath>

#include "cdnet/estimation.hpp"
#include "cdnet/oracle.hpp"

using namespace cdnet;

namespace {

PhysicalGraph make(Topology kind, Boundary boundary, std::vector<int> dims, int m = 1) {
  return build_lattice(LatticeSpec{kind, boundary, std::move(dims)}, m);
}

ProtocolConfig config(double p_gen, double q, int tcut, int m, double p_swap = 1.0) {
  ProtocolConfig c;
  c.hardware = {p_gen, p_swap, 50.0, 0.9};
  c.policy = {tcut, m, 0.5, q};
  return c;
}

}  // namespace

TEST_CASE("two-node chain") {
  const auto g = make(Topology::Chain, Boundary::Finite, {2});
  for (int t = 0; t < 6; ++t) {
    const auto e = enumerate_exact(g, config(0.3, 0.7, 4, 2), t);
    // some link generated in the last min(t+1, t_cut) steps
    const double expect_v = 1.0 - std::pow(0.7, std::min(t + 1, 4));
    CHECK(e.v[0] == doctest::Approx(expect_v).epsilon(1e-12));
    CHECK(e.k[0] == doctest::Approx(0.3 * std::min(t + 1, 4)).epsilon(1e-12));
    CHECK(e.total_probability == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("three-node chain middle node loses both links to a swap") {
  const auto g = make(Topology::Chain, Boundary::Finite, {3});
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto e = enumerate_exact(g, config(1.0, q, 1, 2), 0);
    CHECK(e.v[1] == doctest::Approx(2.0 * (1.0 - q)));
    CHECK(e.v[0] == doctest::Approx(1.0));
    CHECK(e.k[2] == doctest::Approx(1.0));
  }
  // a failed swap takes the two links with it
  const auto f = enumerate_exact(g, config(1.0, 1.0, 1, 2, 0.25), 0);
  CHECK(f.v[0] == doctest::Approx(0.25));
  CHECK(f.v[1] == doctest::Approx(0.0));
}

TEST_CASE("no generation, no links") {
  const auto g = make(Topology::Square, Boundary::Finite, {3, 3});
  const auto e = enumerate_exact(g, config(0.0, 0.5, 3, 2), 4);
  for (double v : e.v) CHECK(v == 0.0);
  CHECK(e.distinct_states == 1);
}

TEST_CASE("deterministic filling on a torus") {
  const auto g = make(Topology::Square, Boundary::Periodic, {10, 10}, 3);
  for (int t : {0, 5, 10, 11, 20}) {
    const auto e = enumerate_exact(g, config(1.0, 0.0, 11, 3), t);
    CHECK(e.distinct_states == 1);
    for (NodeId i = 0; i < g.node_count(); ++i) {
      CHECK(e.k[i] == 4.0 * std::min(t + 1, 11));
      CHECK(e.v[i] == 4.0);
    }
  }
}

TEST_CASE("node outcome distribution sums to one") {
  using E = IncidenceIndex::Entry;
  const std::vector<E> incident = {{0, Orientation::West},
                                   {1, Orientation::West},
                                   {2, Orientation::East},
                                   {3, Orientation::North},
                                   {4, Orientation::South}};
  const auto outs = enumerate_node_outcomes(5, incident, 0.6, 0.7);
  double total = 0;
  for (const auto& [o, w] : outs) {
    total += w;
    CHECK(o.junctions.size() * 2 + o.destroyed.size() + o.untouched.size() == 5);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // with q = 0 there is a single outcome
  CHECK(enumerate_node_outcomes(5, incident, 0.0, 0.7).size() == 1);
}

TEST_CASE("branch budget is enforced") {
  const auto g = make(Topology::Square, Boundary::Finite, {3, 3});
  CHECK_THROWS_AS(enumerate_exact(g, config(0.5, 0.5, 3, 2), 3, 1000), BranchBudgetExceeded);
}

TEST_CASE("Monte Carlo agrees with exact enumeration on small networks") {
  struct Case {
    Topology kind;
    std::vector<int> dims;
    ProtocolConfig cfg;
    int t;
  };
  const Case cases[] = {
      {Topology::Chain, {4}, config(0.7, 0.5, 3, 2, 0.8), 3},
      {Topology::Chain, {5}, config(1.0, 0.6, 2, 3), 2},
      {Topology::Square, {2, 2}, config(0.8, 0.7, 2, 2, 0.9), 1},
  };
  const std::int64_t n = 20'000;
  for (const auto& c : cases) {
    CAPTURE(to_string(c.kind));
    const auto g = make(c.kind, Boundary::Finite, c.dims, c.cfg.policy.max_swap_distance);
    const auto exact = enumerate_exact(g, c.cfg, c.t);
    CHECK(exact.total_probability == doctest::Approx(1.0).epsilon(1e-9));
    const auto mc = estimate(g, c.cfg, Schedule{c.t + 1, 2}, n, 17, Execution::Serial);
    for (NodeId i = 0; i < g.node_count(); ++i) {
      for (Metric m : {Metric::VirtualNeighborhood, Metric::VirtualDegree}) {
        const auto& rec = mc.record(i, m);
        const double want = m == Metric::VirtualNeighborhood ? exact.v[i] : exact.k[i];
        CAPTURE(i);
        CHECK(std::abs(rec.mean - want) <= std::max(rec.band6, 1e-12));
      }
    }
  }
}
