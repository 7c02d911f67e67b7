/*
 * Serial reference vs OpenMP estimate on a periodic square lattice.
 * Usage: bench_estimate [N] [q] [T]
 */

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "cdnet/entanglement.hpp"
#include "cdnet/estimation.hpp"
#include "cdnet/lattice.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cdnet;

int main(int argc, char** argv) {
  const std::int64_t n = argc > 1 ? std::atoll(argv[1]) : 200;
  const double q = argc > 2 ? std::atof(argv[2]) : 0.3;
  const double coherence = argc > 3 ? std::atof(argv[3]) : 50.0;
  if (n < 2 || q < 0 || q > 1 || coherence <= 0) {
    std::fprintf(stderr, "usage: bench_estimate [N >= 2] [q in 0..1] [T > 0]\n");
    return 2;
  }

  const auto graph = build_lattice({Topology::Square, Boundary::Periodic, {10, 10}}, 3);
  ProtocolConfig config;
  config.hardware = {1.0, 1.0, coherence, 0.9};
  config.policy = {max_cutoff(coherence, 0.9, 0.5, 3), 3, 0.5, q};
  const auto schedule = default_schedule(config.policy.cutoff, graph.kind(), graph.boundary());

  using clock = std::chrono::steady_clock;
  auto time = [&](Execution ex) {
    const auto t0 = clock::now();
    auto r = estimate(graph, config, schedule, n, 7, ex);
    const auto ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    return std::make_pair(std::move(r), ms);
  };

  const auto [serial, serial_ms] = time(Execution::Serial);
  const auto [parallel, parallel_ms] = time(Execution::Parallel);
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  const bool same = serial.series == parallel.series;
  const double steps = static_cast<double>(n) * schedule.steps;
  std::printf("N=%lld q=%g t_cut=%d steps/realization=%d threads=%d\n", static_cast<long long>(n),
              q, config.policy.cutoff, schedule.steps, threads);
  std::printf("serial   %10.1f ms  (%.2f us/step)\n", serial_ms, 1e3 * serial_ms / steps);
  std::printf("parallel %10.1f ms  (%.2f us/step)  speedup %.2fx\n", parallel_ms,
              1e3 * parallel_ms / steps, serial_ms / parallel_ms);
  std::printf("identical accumulators: %s\n", same ? "yes" : "NO");
  std::printf("v(node 0) = %.4f +- %.4f\n", serial.record(0, Metric::VirtualNeighborhood).mean,
              serial.record(0, Metric::VirtualNeighborhood).band6);
  return same ? 0 : 1;
}
