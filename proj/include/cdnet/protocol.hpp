#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cdnet/entanglement.hpp"
#include "cdnet/lattice.hpp"
#include "cdnet/rng.hpp"

namespace cdnet {

/// Raised when a realization reaches a state the protocol forbids.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Endpoint {
  NodeId node;
  Orientation orientation;  // port direction of the qubit holding this end

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

/// An entangled link. Age and fidelity are derived lazily from the birth
/// bookkeeping of its elementary segments.
struct Link {
  std::uint64_t id = 0;
  Endpoint a{};
  Endpoint b{};
  int segments = 1;          // swap distance m
  int birth_min = 0;         // birth step of the oldest segment
  std::int64_t birth_sum = 0;  // sum of segment birth steps

  int age(int now) const noexcept { return now - birth_min; }
  const Endpoint& end(int side) const noexcept { return side == 0 ? a : b; }
  /// Side (0 or 1) of the endpoint held by `node`; the endpoints are distinct.
  int side_at(NodeId node) const noexcept { return a.node == node ? 0 : 1; }
  NodeId counterpart(NodeId node) const noexcept { return a.node == node ? b.node : a.node; }
};

/// Live links plus the step counter. `time` is the index of the next step to
/// execute, so observations made after a step refer to time - 1.
struct NetworkState {
  int time = 0;
  std::vector<Link> links;
  std::uint64_t next_id = 0;

  int observation_time() const noexcept { return time - 1; }
};

/// Per-node incidence index over a snapshot of the link list (CSR layout).
class IncidenceIndex {
 public:
  struct Entry {
    std::int32_t link;
    Orientation orientation;  // local orientation at this node
  };

  void rebuild(const NetworkState& state, std::int32_t node_count);
  std::span<const Entry> at(NodeId node) const {
    return {entries_.data() + offsets_[node], entries_.data() + offsets_[node + 1]};
  }
  std::int32_t node_count() const noexcept {
    return static_cast<std::int32_t>(offsets_.size()) - 1;
  }

 private:
  std::vector<std::int32_t> offsets_;
  std::vector<Entry> entries_;
  std::vector<std::int32_t> cursor_;
};

/// Result of the swap phase at one node. Link references are indices into the
/// post-generation snapshot.
struct JunctionOutcome {
  NodeId node = -1;
  std::vector<std::pair<std::int32_t, std::int32_t>> junctions;  // successful swaps
  std::vector<std::int32_t> destroyed;  // consumed by failed swaps
  std::vector<std::int32_t> untouched;

  void clear(NodeId n) {
    node = n;
    junctions.clear();
    destroyed.clear();
    untouched.clear();
  }
  /// Sorts each list so that equal outcomes compare equal.
  void canonicalize();
  friend bool operator==(const JunctionOutcome&, const JunctionOutcome&) = default;
};

enum class SwapDecision { Skip, Fail, Succeed };

/// Pairing state machine of one node's swap phase. The Monte Carlo driver
/// draws its choices at random; the exact enumerator walks every branch.
/// Pool indices run over the links grouped by orientation (canonical port
/// order), so index lookups cost at most one step per orientation.
class SwapPool {
 public:
  void reset(NodeId node, std::span<const IncidenceIndex::Entry> incident,
             JunctionOutcome& out);

  /// True while two differently-oriented links remain.
  bool can_pair() const noexcept { return distinct_ >= 2; }
  std::uint32_t size() const noexcept { return size_; }
  const IncidenceIndex::Entry& entry(std::uint32_t i) const;
  /// Number of pool links whose orientation differs from entry(first).
  std::uint32_t partner_count(std::uint32_t first) const;
  /// Pool index of the rank-th link oriented differently from entry(first).
  std::uint32_t partner(std::uint32_t first, std::uint32_t rank) const;

  /// Resolves the pair and removes both links from the pool.
  void commit(std::uint32_t first, std::uint32_t second, SwapDecision decision,
              JunctionOutcome& out);
  /// Moves the residual pool into `untouched`.
  void finish(JunctionOutcome& out);

 private:
  struct Slot {
    int bucket;
    std::uint32_t offset;
  };
  Slot locate(std::uint32_t i) const;
  void remove(Slot slot);

  std::vector<IncidenceIndex::Entry> buckets_[kOrientationCount];
  std::uint32_t size_ = 0;
  int distinct_ = 0;
};

/// Draws pairs uniformly at random until no differently-oriented pair is
/// left; each pair is attempted with probability q and succeeds with
/// probability p_swap.
void local_swap_selection(NodeId node, std::span<const IncidenceIndex::Entry> incident,
                          double q, double p_swap, Rng& rng, SwapPool& pool,
                          JunctionOutcome& out);

/// Link accounting of one resolution phase, in constituent links.
struct ResolveStats {
  std::int64_t input_links = 0;
  std::int64_t untouched = 0;        // kept unchanged
  std::int64_t fused = 0;            // consumed into a kept longer link
  std::int64_t chains_formed = 0;    // number of kept longer links
  std::int64_t removed_failed = 0;   // in a component touched by a failed swap
  std::int64_t removed_cycle = 0;
  std::int64_t removed_self_loop = 0;
  std::int64_t removed_too_long = 0;  // resolved swap distance above M

  std::int64_t accounted() const noexcept {
    return untouched + fused + removed_failed + removed_cycle + removed_self_loop +
           removed_too_long;
  }
  ResolveStats& operator+=(const ResolveStats& o) noexcept;
};

class ResolveWorkspace {
 public:
  std::vector<std::int64_t> partner;  // per (link, side): partner (link*2+side) or -1
  std::vector<std::uint8_t> destroyed;
  std::vector<std::uint8_t> visited;
  std::vector<std::int32_t> component;
  std::vector<Link> next;
};

/// Global resolution of the swap phase: junction chains collapse into single
/// links, components touched by a failed swap vanish, closed loops and
/// self-loops vanish, then links longer than M are discarded. Outcomes must
/// be computed against the current link list. Throws InvariantViolation if a
/// link end is junctioned twice or two equally-oriented links are paired.
ResolveStats resolve_swaps(NetworkState& state, std::span<const JunctionOutcome> outcomes,
                           int max_swap_distance, ResolveWorkspace& ws);
ResolveStats resolve_swaps(NetworkState& state, std::span<const JunctionOutcome> outcomes,
                           int max_swap_distance);

/// Removes every link whose age at the current step has reached t_cut.
void apply_cutoff(NetworkState& state, int cutoff);

/// Heralds one elementary link per channel with probability p_gen, channels
/// in canonical order.
void generate_links(NetworkState& state, const PhysicalGraph& graph, double p_gen, Rng& rng);

/// Adds an elementary link over one channel born at the current step.
void add_elementary_link(NetworkState& state, const Channel& channel);

struct ProtocolConfig {
  HardwareParams hardware;
  PolicyParams policy;
  bool verify_fidelity = false;
};

/// Reusable buffers for protocol_step; one per worker.
struct StepWorkspace {
  IncidenceIndex incidence;
  SwapPool pool;
  std::vector<JunctionOutcome> outcomes;
  ResolveWorkspace resolve;
};

/// One full protocol step: cutoff, generation, simultaneous swap selection
/// at every node, global resolution, maximum-distance discard; then advances
/// the step counter. Node selections draw from per-node substreams seeded
/// from one word of `rng` per step.
ResolveStats protocol_step(NetworkState& state, const PhysicalGraph& graph,
                           const ProtocolConfig& config, Rng& rng, StepWorkspace& ws);

/// Closed-form fidelity of a link at the state's observation time.
double link_fidelity(const Link& link, const NetworkState& state, const HardwareParams& hw);

/// Throws InvariantViolation if a live link is below F_min - 1e-9.
void verify_fidelity_floor(const NetworkState& state, const HardwareParams& hw, double f_min);

/// Throws InvariantViolation when an invariant of the post-step state fails:
/// distinct endpoints, 1 <= m <= M, age < t_cut, orientation matches a port.
void check_state(const NetworkState& state, const PhysicalGraph& graph,
                 const PolicyParams& policy);

}  // namespace cdnet
