#include "cdnet/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cdnet {

Schedule default_schedule(int cutoff, Topology kind, Boundary boundary) {
  if (cutoff < 1) throw std::invalid_argument("t_cut must be >= 1");
  const int factor = (kind == Topology::Chain && boundary == Boundary::Finite) ? 6 : 3;
  return {factor * cutoff, cutoff};
}

SteadyStateVerdict steady_state_check(std::span<const double> window_means, double lower,
                                      double upper, std::int64_t realizations) {
  if (window_means.size() < 2) throw std::invalid_argument("steady-state window needs >= 2 points");
  if (realizations < 1) throw std::invalid_argument("need at least one realization");
  SteadyStateVerdict verdict;
  verdict.error_scale = 3.0 * (upper - lower) / std::sqrt(static_cast<double>(realizations));
  const double eps = verdict.error_scale;
  verdict.min_overlap = std::numeric_limits<double>::infinity();
  verdict.success = true;
  for (std::size_t i = 0; i < window_means.size(); ++i) {
    for (std::size_t j = i + 1; j < window_means.size(); ++j) {
      const double overlap = 2.0 * eps - std::abs(window_means[i] - window_means[j]);
      verdict.min_overlap = std::min(verdict.min_overlap, overlap);
      if (overlap < 1.5 * eps) verdict.success = false;
    }
  }
  return verdict;
}

namespace {

struct RealizationWorkspace {
  StepWorkspace step;
  MetricObserver observer;
  MetricSample sample;
  NetworkState state;
};

void run_into(const PhysicalGraph& graph, const ProtocolConfig& config, const Schedule& schedule,
              const std::vector<MetricBounds>& bounds, std::uint64_t seed,
              RealizationWorkspace& ws, RealizationSeries& out) {
  const auto n = graph.node_count();
  out.steps = schedule.steps;
  out.nodes = n;
  out.v.resize(static_cast<std::size_t>(schedule.steps) * n);
  out.k.resize(out.v.size());

  Rng rng(seed);
  ws.state = NetworkState{};
  for (int t = 0; t < schedule.steps; ++t) {
    protocol_step(ws.state, graph, config, rng, ws.step);
#ifndef NDEBUG
    check_state(ws.state, graph, config.policy);
#else
    if (config.verify_fidelity) check_state(ws.state, graph, config.policy);
#endif
    ws.observer.observe(ws.state, n, ws.sample);
    check_bounds(ws.sample, bounds);
    std::copy(ws.sample.v.begin(), ws.sample.v.end(), out.v.begin() + static_cast<std::ptrdiff_t>(t) * n);
    std::copy(ws.sample.k.begin(), ws.sample.k.end(), out.k.begin() + static_cast<std::ptrdiff_t>(t) * n);
  }
}

void validate_inputs(const ProtocolConfig& config, const Schedule& schedule) {
  validate(config.hardware);
  validate(config.policy);
  if (schedule.steps < 1) throw std::invalid_argument("schedule needs at least one step");
}

}  // namespace

RealizationSeries run_realization(const PhysicalGraph& graph, const ProtocolConfig& config,
                                  const Schedule& schedule, std::uint64_t seed) {
  validate_inputs(config, schedule);
  const auto bounds = node_bounds(graph, config.policy.cutoff, config.policy.max_swap_distance);
  RealizationWorkspace ws;
  RealizationSeries out;
  run_into(graph, config, schedule, bounds, seed, ws, out);
  return out;
}

SeriesAccumulator::SeriesAccumulator(int steps, std::int32_t nodes)
    : steps_(steps),
      nodes_(nodes),
      sum_v_(static_cast<std::size_t>(steps) * nodes, 0),
      sum_k_(sum_v_.size(), 0),
      sq_v_(sum_v_.size(), 0),
      sq_k_(sum_v_.size(), 0) {}

void SeriesAccumulator::add(const RealizationSeries& series) {
  if (series.steps != steps_ || series.nodes != nodes_) {
    throw std::invalid_argument("series shape does not match accumulator");
  }
  for (std::size_t i = 0; i < sum_v_.size(); ++i) {
    const std::int64_t v = series.v[i];
    const std::int64_t k = series.k[i];
    sum_v_[i] += v;
    sq_v_[i] += v * v;
    sum_k_[i] += k;
    sq_k_[i] += k * k;
  }
  ++count_;
}

void SeriesAccumulator::merge(const SeriesAccumulator& other) {
  if (other.steps_ != steps_ || other.nodes_ != nodes_) {
    throw std::invalid_argument("accumulator shapes differ");
  }
  for (std::size_t i = 0; i < sum_v_.size(); ++i) {
    sum_v_[i] += other.sum_v_[i];
    sq_v_[i] += other.sq_v_[i];
    sum_k_[i] += other.sum_k_[i];
    sq_k_[i] += other.sq_k_[i];
  }
  count_ += other.count_;
}

std::int64_t SeriesAccumulator::sum(Metric m, int t, NodeId node) const {
  return sums(m)[at(t, node)];
}

double SeriesAccumulator::mean(Metric m, int t, NodeId node) const {
  return static_cast<double>(sums(m)[at(t, node)]) / static_cast<double>(count_);
}

double SeriesAccumulator::std_dev(Metric m, int t, NodeId node) const {
  if (count_ < 2) return 0.0;
  const auto n = static_cast<__int128>(count_);
  const auto s = static_cast<__int128>(sums(m)[at(t, node)]);
  const auto sq = static_cast<__int128>(squares(m)[at(t, node)]);
  // Exact integer numerator: N * sum(x^2) - (sum x)^2.
  const __int128 numerator = n * sq - s * s;
  if (numerator <= 0) return 0.0;
  return std::sqrt(static_cast<double>(numerator) /
                   (static_cast<double>(count_) * static_cast<double>(count_ - 1)));
}

std::uint64_t realization_seed(std::uint64_t stream_seed, std::int64_t realization) {
  return mix_seed(stream_seed, static_cast<std::uint64_t>(realization));
}

std::vector<EstimateRecord> summarize(const SeriesAccumulator& series, const Schedule& schedule,
                                      const std::vector<MetricBounds>& bounds) {
  const int last = series.steps() - 1;
  const int window = std::min(series.steps(), std::max(schedule.window, 2));
  const double root_n = std::sqrt(static_cast<double>(series.count()));
  std::vector<EstimateRecord> records;
  records.reserve(2 * static_cast<std::size_t>(series.nodes()));
  std::vector<double> means(window);
  for (NodeId i = 0; i < series.nodes(); ++i) {
    for (Metric m : {Metric::VirtualNeighborhood, Metric::VirtualDegree}) {
      EstimateRecord r;
      r.node = i;
      r.metric = m;
      r.mean = series.mean(m, last, i);
      r.std_dev = series.std_dev(m, last, i);
      r.band6 = 6.0 * r.std_dev / root_n;
      for (int w = 0; w < window; ++w) means[w] = series.mean(m, series.steps() - window + w, i);
      const double upper = m == Metric::VirtualNeighborhood ? bounds[i].v : bounds[i].k;
      r.verdict = steady_state_check(means, 0.0, upper, series.count());
      records.push_back(r);
    }
  }
  return records;
}

EstimateResult estimate(const PhysicalGraph& graph, const ProtocolConfig& config,
                        const Schedule& schedule, std::int64_t realizations,
                        std::uint64_t stream_seed, Execution execution) {
  if (realizations < 2) throw std::invalid_argument("need at least two realizations");
  validate_inputs(config, schedule);
  if (schedule.steps < 2) throw std::invalid_argument("schedule needs at least two steps");
  const auto n = graph.node_count();
  const auto bounds = node_bounds(graph, config.policy.cutoff, config.policy.max_swap_distance);

  EstimateResult result;
  result.schedule = schedule;
  result.series = SeriesAccumulator(schedule.steps, n);

  if (execution == Execution::Serial) {
    RealizationWorkspace ws;
    RealizationSeries series;
    for (std::int64_t r = 0; r < realizations; ++r) {
      run_into(graph, config, schedule, bounds, realization_seed(stream_seed, r), ws, series);
      result.series.add(series);
    }
  } else {
    // Exceptions cannot leave an OpenMP region; keep the one from the
    // lowest realization index so the reported error is schedule-independent.
    std::exception_ptr error;
    std::int64_t error_at = realizations;
#pragma omp parallel
    {
      RealizationWorkspace ws;
      RealizationSeries series;
      SeriesAccumulator local(schedule.steps, n);
#pragma omp for schedule(dynamic, 8)
      for (std::int64_t r = 0; r < realizations; ++r) {
        try {
          run_into(graph, config, schedule, bounds, realization_seed(stream_seed, r), ws, series);
          local.add(series);
        } catch (...) {
#pragma omp critical(cdnet_estimate_error)
          if (r < error_at) {
            error_at = r;
            error = std::current_exception();
          }
        }
      }
#pragma omp critical(cdnet_estimate_merge)
      result.series.merge(local);
    }
    if (error) std::rethrow_exception(error);
  }

  result.records = summarize(result.series, schedule, bounds);
  return result;
}

}  // namespace cdnet
