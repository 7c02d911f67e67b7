#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cdnet/lattice.hpp"
#include "cdnet/protocol.hpp"

namespace cdnet {

class BranchBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::int64_t kDefaultBranchBudget = 10'000'000;

/// Exact per-node expectations of v_i(t) and k_i(t).
struct ExactExpectation {
  int t = 0;
  std::vector<double> v;
  std::vector<double> k;
  double total_probability = 0.0;  // must be 1 up to rounding
  std::int64_t branches = 0;       // leaves visited over all steps
  std::size_t distinct_states = 0;  // support size at time t
};

/// Expected metrics at observation step t, starting from the empty state, by
/// exhaustive enumeration of every generation, pairing and swap outcome with
/// its exact probability. Resolution runs through resolve_swaps and pairing
/// through SwapPool, so only the random choices are replaced. Throws
/// BranchBudgetExceeded when more than `budget` branches would be visited.
ExactExpectation enumerate_exact(const PhysicalGraph& graph, const ProtocolConfig& config,
                                 int t, std::int64_t budget = kDefaultBranchBudget);

/// Exact distribution of one node's swap-phase outcome, with equal outcomes
/// merged. Pairs are enumerated unordered, weighted by both draw orders.
std::vector<std::pair<JunctionOutcome, double>> enumerate_node_outcomes(
    NodeId node, std::span<const IncidenceIndex::Entry> incident, double q, double p_swap);

}  // namespace cdnet
