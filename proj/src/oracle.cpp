#include "cdnet/oracle.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "cdnet/metrics.hpp"

namespace cdnet {
namespace {

using LinkKey = std::tuple<NodeId, int, NodeId, int, int, int, std::int64_t>;
using StateKey = std::vector<LinkKey>;

StateKey key_of(const NetworkState& state) {
  StateKey key;
  key.reserve(state.links.size());
  for (const Link& l : state.links) {
    Endpoint a = l.a;
    Endpoint b = l.b;
    if (std::tie(b.node, b.orientation) < std::tie(a.node, a.orientation)) std::swap(a, b);
    key.emplace_back(a.node, static_cast<int>(a.orientation), b.node,
                     static_cast<int>(b.orientation), l.segments, l.birth_min, l.birth_sum);
  }
  std::sort(key.begin(), key.end());
  return key;
}

void add_outcome(std::vector<std::pair<JunctionOutcome, double>>& acc, JunctionOutcome out,
                 double weight) {
  out.canonicalize();
  for (auto& [o, w] : acc) {
    if (o == out) {
      w += weight;
      return;
    }
  }
  acc.emplace_back(std::move(out), weight);
}

void walk_pool(const SwapPool& pool, const JunctionOutcome& out, double weight, double q,
               double p_swap, std::vector<std::pair<JunctionOutcome, double>>& acc) {
  if (q <= 0.0 || !pool.can_pair()) {
    SwapPool rest = pool;
    JunctionOutcome done = out;
    rest.finish(done);
    add_outcome(acc, std::move(done), weight);
    return;
  }
  const std::pair<SwapDecision, double> decisions[] = {
      {SwapDecision::Skip, 1.0 - q},
      {SwapDecision::Fail, q * (1.0 - p_swap)},
      {SwapDecision::Succeed, q * p_swap},
  };
  const double n = pool.size();
  for (std::uint32_t i = 0; i < pool.size(); ++i) {
    for (std::uint32_t j = i + 1; j < pool.size(); ++j) {
      if (pool.entry(i).orientation == pool.entry(j).orientation) continue;
      // {i, j} is drawn as (i then j) or (j then i).
      const double pair_weight =
          (1.0 / pool.partner_count(i) + 1.0 / pool.partner_count(j)) / n;
      for (const auto& [decision, p] : decisions) {
        if (p <= 0.0) continue;
        SwapPool next = pool;
        JunctionOutcome next_out = out;
        next.commit(i, j, decision, next_out);
        walk_pool(next, next_out, weight * pair_weight * p, q, p_swap, acc);
      }
    }
  }
}

struct Enumerator {
  const PhysicalGraph& graph;
  const ProtocolConfig& config;
  std::int64_t budget;
  std::int64_t branches = 0;
  std::map<StateKey, std::pair<NetworkState, double>> next;

  void charge() {
    if (++branches > budget) {
      throw BranchBudgetExceeded("exact enumeration exceeds the branch budget of " +
                                 std::to_string(budget));
    }
  }

  void record(NetworkState state, double p) {
    auto key = key_of(state);
    auto it = next.find(key);
    if (it == next.end()) {
      next.emplace(std::move(key), std::make_pair(std::move(state), p));
    } else {
      it->second.second += p;
    }
  }

  void combine(const NetworkState& state, double p,
               const std::vector<std::vector<std::pair<JunctionOutcome, double>>>& per_node,
               std::vector<JunctionOutcome>& chosen, std::size_t node) {
    if (node == per_node.size()) {
      charge();
      NetworkState resolved = state;
      resolve_swaps(resolved, chosen, config.policy.max_swap_distance);
      ++resolved.time;
      record(std::move(resolved), p);
      return;
    }
    for (const auto& [outcome, w] : per_node[node]) {
      chosen[node] = outcome;
      combine(state, p * w, per_node, chosen, node + 1);
    }
  }

  void swap_phase(const NetworkState& state, double p) {
    IncidenceIndex incidence;
    incidence.rebuild(state, graph.node_count());
    std::vector<std::vector<std::pair<JunctionOutcome, double>>> per_node(graph.node_count());
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      per_node[v] = enumerate_node_outcomes(v, incidence.at(v), config.policy.q,
                                            config.hardware.p_swap);
    }
    std::vector<JunctionOutcome> chosen(graph.node_count());
    combine(state, p, per_node, chosen, 0);
  }

  void generation(NetworkState& state, double p, std::size_t channel) {
    const auto& channels = graph.channels();
    if (channel == channels.size()) {
      swap_phase(state, p);
      return;
    }
    const double p_gen = config.hardware.p_gen;
    if (p_gen < 1.0) generation(state, p * (1.0 - p_gen), channel + 1);
    if (p_gen > 0.0) {
      add_elementary_link(state, channels[channel]);
      generation(state, p * p_gen, channel + 1);
      state.links.pop_back();
      --state.next_id;
    }
  }
};

}  // namespace

std::vector<std::pair<JunctionOutcome, double>> enumerate_node_outcomes(
    NodeId node, std::span<const IncidenceIndex::Entry> incident, double q, double p_swap) {
  std::vector<std::pair<JunctionOutcome, double>> acc;
  SwapPool pool;
  JunctionOutcome out;
  pool.reset(node, incident, out);
  walk_pool(pool, out, 1.0, q, p_swap, acc);
  return acc;
}

ExactExpectation enumerate_exact(const PhysicalGraph& graph, const ProtocolConfig& config,
                                 int t, std::int64_t budget) {
  if (t < 0) throw std::invalid_argument("observation step must be >= 0");
  validate(config.hardware);
  validate(config.policy);

  Enumerator e{graph, config, budget, 0, {}};
  std::map<StateKey, std::pair<NetworkState, double>> current;
  current.emplace(StateKey{}, std::make_pair(NetworkState{}, 1.0));
  for (int step = 0; step <= t; ++step) {
    e.next.clear();
    for (auto& [key, entry] : current) {
      if (entry.second <= 0.0) continue;
      NetworkState state = entry.first;
      apply_cutoff(state, config.policy.cutoff);
      e.generation(state, entry.second, 0);
    }
    current.swap(e.next);
  }

  ExactExpectation result;
  result.t = t;
  result.v.assign(graph.node_count(), 0.0);
  result.k.assign(graph.node_count(), 0.0);
  result.branches = e.branches;
  result.distinct_states = current.size();
  MetricObserver observer;
  MetricSample sample;
  for (const auto& [key, entry] : current) {
    const auto& [state, p] = entry;
    observer.observe(state, graph.node_count(), sample);
    for (NodeId i = 0; i < graph.node_count(); ++i) {
      result.v[i] += p * sample.v[i];
      result.k[i] += p * sample.k[i];
    }
    result.total_probability += p;
  }
  return result;
}

}  // namespace cdnet
