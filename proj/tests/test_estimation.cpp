#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "cdnet/estimation.hpp"

using namespace cdnet;

namespace {

PhysicalGraph make(Topology kind, Boundary boundary, std::vector<int> dims, int m = 1) {
  return build_lattice(LatticeSpec{kind, boundary, std::move(dims)}, m);
}

ProtocolConfig config(double p_gen, double q, double T = 50.0, int tcut = 11) {
  ProtocolConfig c;
  c.hardware = {p_gen, 1.0, T, 0.9};
  c.policy = {tcut, 3, 0.5, q};
  return c;
}

}  // namespace

TEST_CASE("default schedule") {
  CHECK(default_schedule(11, Topology::Square, Boundary::Periodic).steps == 33);
  CHECK(default_schedule(11, Topology::Square, Boundary::Periodic).window == 11);
  CHECK(default_schedule(11, Topology::Square, Boundary::Finite).steps == 33);
  CHECK(default_schedule(11, Topology::Chain, Boundary::Finite).steps == 66);
  CHECK(default_schedule(11, Topology::Chain, Boundary::Periodic).steps == 33);
}

TEST_CASE("steady-state check algebra") {
  const std::int64_t n = 10'000;
  const double eps = 3.0 * 24.0 / 100.0;  // 0.72
  const std::vector<double> flat(11, 7.5);
  auto v = steady_state_check(flat, 0, 24, n);
  CHECK(v.success);
  CHECK(v.error_scale == doctest::Approx(eps));
  CHECK(v.min_overlap == doctest::Approx(2 * eps));

  std::vector<double> apart = flat;
  apart[3] += eps;
  v = steady_state_check(apart, 0, 24, n);
  CHECK_FALSE(v.success);
  CHECK(v.min_overlap == doctest::Approx(eps));

  std::vector<double> close = flat;
  close[0] += 0.4 * eps;
  v = steady_state_check(close, 0, 24, n);
  CHECK(v.success);
  CHECK(v.min_overlap == doctest::Approx(1.6 * eps));

  // exactly eps'/2 apart is still accepted
  std::vector<double> edge = {1.0, 1.0 + eps / 2};
  CHECK(steady_state_check(edge, 0, 24, n).success);

  CHECK_THROWS_AS(steady_state_check(std::vector<double>{1.0}, 0, 24, n), std::invalid_argument);
  CHECK_THROWS_AS(steady_state_check(flat, 0, 24, 0), std::invalid_argument);
}

namespace {

// Fraction of `trials` windows of `w` i.i.d. sample means that the detector
// accepts. `sample_sum` returns the sum of N fresh draws.
template <class SampleSum>
double acceptance_rate(SampleSum sample_sum, int w, double b, std::int64_t n, int trials) {
  std::vector<double> window(w);
  int successes = 0;
  for (int trial = 0; trial < trials; ++trial) {
    for (double& x : window) x = static_cast<double>(sample_sum()) / n;
    successes += steady_state_check(window, 0, b, n).success ? 1 : 0;
  }
  return static_cast<double>(successes) / trials;
}

}  // namespace

TEST_CASE("steady-state check is calibrated on i.i.d. windows") {
  std::mt19937_64 gen(2024);
  const std::int64_t n = 10'000;

  // Values spread uniformly over the whole range [0, b]. This is close to the
  // worst case for the detector: with a window of 11 such a spread passes
  // only ~98-99% of the time, so the short window is used here.
  std::uniform_int_distribution<int> uniform(0, 24);
  auto uniform_sum = [&] {
    std::int64_t sum = 0;
    for (std::int64_t i = 0; i < n; ++i) sum += uniform(gen);
    return sum;
  };
  CHECK(acceptance_rate(uniform_sum, 5, 24, n, 1000) >= 0.99);

  // k at q = 0 and p_gen = 0.5 on the square lattice is Binomial(4 t_cut, 1/2)
  // in steady state; window t_cut = 11. N such draws sum to Binomial(44 N, 1/2).
  std::binomial_distribution<std::int64_t> k_sum(44 * n, 0.5);
  CHECK(acceptance_rate([&] { return k_sum(gen); }, 11, 44, n, 1000) >= 0.99);
}

TEST_CASE("q = 0 with certain generation fills every channel deterministically") {
  const auto g = make(Topology::Square, Boundary::Periodic, {10, 10}, 3);
  const Schedule sched{33, 11};
  const auto r = estimate(g, config(1.0, 0.0), sched, 20, 99);
  for (int t = 0; t < sched.steps; ++t) {
    for (NodeId i = 0; i < g.node_count(); ++i) {
      CHECK(r.series.mean(Metric::VirtualDegree, t, i) == 4.0 * std::min(t + 1, 11));
      CHECK(r.series.mean(Metric::VirtualNeighborhood, t, i) == 4.0);
      CHECK(r.series.std_dev(Metric::VirtualDegree, t, i) == 0.0);
    }
  }
  for (const auto& rec : r.records) {
    CHECK(rec.verdict.success);
    CHECK(rec.band6 == 0.0);
  }
}

TEST_CASE("serial and parallel estimates are identical") {
  const auto g = make(Topology::Triangular, Boundary::Periodic, {8, 8}, 3);
  const Schedule sched{20, 5};
  const auto cfg = config(0.6, 0.4);
  const auto a = estimate(g, cfg, sched, 40, 7, Execution::Serial);
  const auto b = estimate(g, cfg, sched, 40, 7, Execution::Parallel);
  CHECK(a.series == b.series);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].mean == b.records[i].mean);
    CHECK(a.records[i].std_dev == b.records[i].std_dev);
  }
  const auto c = estimate(g, cfg, sched, 40, 8, Execution::Serial);
  CHECK_FALSE(a.series == c.series);
}

TEST_CASE("reported mean is the mean of the final-step samples") {
  const auto g = make(Topology::Honeycomb, Boundary::Periodic, {8, 8}, 3);
  const Schedule sched{15, 5};
  const auto cfg = config(0.8, 0.3);
  const std::int64_t n = 25;
  const auto r = estimate(g, cfg, sched, n, 31);
  for (NodeId node : {0, 17, 63}) {
    double sum_v = 0, sum_k = 0, sq_k = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const auto s = run_realization(g, cfg, sched, realization_seed(31, i));
      const std::size_t at = static_cast<std::size_t>(sched.steps - 1) * s.nodes + node;
      sum_v += s.v[at];
      sum_k += s.k[at];
      sq_k += static_cast<double>(s.k[at]) * s.k[at];
    }
    const double mean_k = sum_k / n;
    CHECK(r.record(node, Metric::VirtualNeighborhood).mean == doctest::Approx(sum_v / n).epsilon(1e-15));
    CHECK(r.record(node, Metric::VirtualDegree).mean == doctest::Approx(mean_k).epsilon(1e-15));
    const double var = (sq_k - n * mean_k * mean_k) / (n - 1);
    CHECK(r.record(node, Metric::VirtualDegree).std_dev == doctest::Approx(std::sqrt(var)).epsilon(1e-9));
    CHECK(r.record(node, Metric::VirtualDegree).band6 ==
          doctest::Approx(6 * std::sqrt(var) / std::sqrt(double(n))).epsilon(1e-9));
  }
}

TEST_CASE("accumulator merge equals sequential adds") {
  const auto g = make(Topology::Chain, Boundary::Periodic, {10}, 3);
  const Schedule sched{10, 5};
  const auto cfg = config(0.7, 0.5);
  SeriesAccumulator whole(sched.steps, g.node_count());
  SeriesAccumulator left(sched.steps, g.node_count());
  SeriesAccumulator right(sched.steps, g.node_count());
  for (int i = 0; i < 10; ++i) {
    const auto s = run_realization(g, cfg, sched, realization_seed(3, i));
    whole.add(s);
    (i % 3 == 0 ? left : right).add(s);
  }
  right.merge(left);
  CHECK(right == whole);
  CHECK(whole.count() == 10);
}

TEST_CASE("summaries use the final window") {
  const auto g = make(Topology::Chain, Boundary::Finite, {3});
  const auto cfg = config(1.0, 0.0, 50.0, 3);
  const Schedule sched{6, 1};  // window clamped to two points
  SeriesAccumulator acc(sched.steps, g.node_count());
  acc.add(run_realization(g, cfg, sched, 1));
  const auto records = summarize(acc, sched, node_bounds(g, 3, 3));
  REQUIRE(records.size() == 6);
  CHECK(records[2].node == 1);
  CHECK(records[2].metric == Metric::VirtualNeighborhood);
  CHECK(records[2].mean == 2.0);
  CHECK(records[3].mean == 6.0);
  CHECK(records[3].verdict.success);
}
