#include "cdnet/protocol.hpp"

#include <algorithm>
#include <string>

namespace cdnet {

void IncidenceIndex::rebuild(const NetworkState& state, std::int32_t node_count) {
  offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
  for (const Link& l : state.links) {
    ++offsets_[l.a.node + 1];
    ++offsets_[l.b.node + 1];
  }
  for (std::int32_t v = 0; v < node_count; ++v) offsets_[v + 1] += offsets_[v];
  entries_.resize(offsets_.back());
  // Fill in link order so each node's entries are in canonical order.
  cursor_.assign(offsets_.begin(), offsets_.end() - 1);
  for (std::int32_t i = 0; i < static_cast<std::int32_t>(state.links.size()); ++i) {
    const Link& l = state.links[i];
    entries_[cursor_[l.a.node]++] = {i, l.a.orientation};
    entries_[cursor_[l.b.node]++] = {i, l.b.orientation};
  }
}

void JunctionOutcome::canonicalize() {
  for (auto& [x, y] : junctions) {
    if (x > y) std::swap(x, y);
  }
  std::sort(junctions.begin(), junctions.end());
  std::sort(destroyed.begin(), destroyed.end());
  std::sort(untouched.begin(), untouched.end());
}

void SwapPool::reset(NodeId node, std::span<const IncidenceIndex::Entry> incident,
                     JunctionOutcome& out) {
  out.clear(node);
  for (auto& b : buckets_) b.clear();
  for (const auto& e : incident) buckets_[static_cast<int>(e.orientation)].push_back(e);
  size_ = static_cast<std::uint32_t>(incident.size());
  distinct_ = 0;
  for (const auto& b : buckets_) distinct_ += b.empty() ? 0 : 1;
}

SwapPool::Slot SwapPool::locate(std::uint32_t i) const {
  for (int b = 0; b < kOrientationCount; ++b) {
    const auto n = static_cast<std::uint32_t>(buckets_[b].size());
    if (i < n) return {b, i};
    i -= n;
  }
  throw std::out_of_range("swap pool index out of range");
}

const IncidenceIndex::Entry& SwapPool::entry(std::uint32_t i) const {
  const Slot s = locate(i);
  return buckets_[s.bucket][s.offset];
}

std::uint32_t SwapPool::partner_count(std::uint32_t first) const {
  return size_ - static_cast<std::uint32_t>(buckets_[locate(first).bucket].size());
}

std::uint32_t SwapPool::partner(std::uint32_t first, std::uint32_t rank) const {
  const int own = locate(first).bucket;
  std::uint32_t skipped = 0;
  for (int b = 0; b < kOrientationCount; ++b) {
    const auto n = static_cast<std::uint32_t>(buckets_[b].size());
    if (b != own) {
      if (rank < n) return skipped + rank;
      rank -= n;
    }
    skipped += n;
  }
  throw std::out_of_range("swap partner rank out of range");
}

void SwapPool::remove(Slot slot) {
  auto& bucket = buckets_[slot.bucket];
  bucket[slot.offset] = bucket.back();
  bucket.pop_back();
  --size_;
  if (bucket.empty()) --distinct_;
}

void SwapPool::commit(std::uint32_t first, std::uint32_t second, SwapDecision decision,
                      JunctionOutcome& out) {
  const Slot sa = locate(first);
  const Slot sb = locate(second);
  if (sa.bucket == sb.bucket) {
    throw InvariantViolation("node " + std::to_string(out.node) +
                             " paired two links of equal orientation");
  }
  const std::int32_t a = buckets_[sa.bucket][sa.offset].link;
  const std::int32_t b = buckets_[sb.bucket][sb.offset].link;
  switch (decision) {
    case SwapDecision::Succeed: out.junctions.emplace_back(a, b); break;
    case SwapDecision::Fail:
      out.destroyed.push_back(a);
      out.destroyed.push_back(b);
      break;
    case SwapDecision::Skip:
      out.untouched.push_back(a);
      out.untouched.push_back(b);
      break;
  }
  // Different buckets, so removing one leaves the other's slot valid.
  remove(sa);
  remove(sb);
}

void SwapPool::finish(JunctionOutcome& out) {
  for (auto& b : buckets_) {
    for (const auto& e : b) out.untouched.push_back(e.link);
    b.clear();
  }
  size_ = 0;
  distinct_ = 0;
}

void local_swap_selection(NodeId node, std::span<const IncidenceIndex::Entry> incident,
                          double q, double p_swap, Rng& rng, SwapPool& pool,
                          JunctionOutcome& out) {
  pool.reset(node, incident, out);
  if (q > 0.0) {
    while (pool.can_pair()) {
      const std::uint32_t first = rng.below(pool.size());
      const std::uint32_t second = pool.partner(first, rng.below(pool.partner_count(first)));
      SwapDecision decision = SwapDecision::Skip;
      if (rng.bernoulli(q)) {
        decision = rng.bernoulli(p_swap) ? SwapDecision::Succeed : SwapDecision::Fail;
      }
      pool.commit(first, second, decision, out);
    }
  }
  pool.finish(out);
}

ResolveStats& ResolveStats::operator+=(const ResolveStats& o) noexcept {
  input_links += o.input_links;
  untouched += o.untouched;
  fused += o.fused;
  chains_formed += o.chains_formed;
  removed_failed += o.removed_failed;
  removed_cycle += o.removed_cycle;
  removed_self_loop += o.removed_self_loop;
  removed_too_long += o.removed_too_long;
  return *this;
}

namespace {

void link_sides(std::vector<std::int64_t>& partner, const std::vector<Link>& links,
                NodeId node, std::int32_t x, std::int32_t y) {
  const std::int64_t ex = 2 * std::int64_t{x} + links[x].side_at(node);
  const std::int64_t ey = 2 * std::int64_t{y} + links[y].side_at(node);
  if (x == y || partner[ex] >= 0 || partner[ey] >= 0) {
    throw InvariantViolation("link end junctioned twice at node " + std::to_string(node));
  }
  if (links[x].end(static_cast<int>(ex & 1)).node != node ||
      links[y].end(static_cast<int>(ey & 1)).node != node) {
    throw InvariantViolation("junction at node " + std::to_string(node) +
                             " references a link not held there");
  }
  partner[ex] = ey;
  partner[ey] = ex;
}

}  // namespace

ResolveStats resolve_swaps(NetworkState& state, std::span<const JunctionOutcome> outcomes,
                           int max_swap_distance, ResolveWorkspace& ws) {
  const auto& links = state.links;
  const auto n_links = static_cast<std::int32_t>(links.size());
  ResolveStats stats;
  stats.input_links = n_links;

  ws.partner.assign(2 * static_cast<std::size_t>(n_links), -1);
  ws.destroyed.assign(n_links, 0);
  ws.visited.assign(n_links, 0);
  ws.next.clear();

  for (const JunctionOutcome& o : outcomes) {
    for (auto [x, y] : o.junctions) {
      if (links[x].end(links[x].side_at(o.node)).orientation ==
          links[y].end(links[y].side_at(o.node)).orientation) {
        throw InvariantViolation("junction of equally oriented links at node " +
                                 std::to_string(o.node));
      }
      link_sides(ws.partner, links, o.node, x, y);
    }
    for (std::int32_t x : o.destroyed) ws.destroyed[x] = 1;
  }

  for (std::int32_t start = 0; start < n_links; ++start) {
    if (ws.visited[start]) continue;
    if (ws.partner[2 * start] < 0 && ws.partner[2 * start + 1] < 0) {
      ws.visited[start] = 1;
      if (ws.destroyed[start]) {
        ++stats.removed_failed;
      } else {
        ++stats.untouched;
        ws.next.push_back(links[start]);
      }
      continue;
    }

    // Walk out through side 0 to find a free end, or come back (closed loop).
    std::int32_t cur = start;
    int exit_side = 0;
    bool loop = false;
    for (;;) {
      const std::int64_t p = ws.partner[2 * cur + exit_side];
      if (p < 0) break;
      cur = static_cast<std::int32_t>(p >> 1);
      exit_side = 1 - static_cast<int>(p & 1);
      if (cur == start && exit_side == 0) {
        loop = true;
        break;
      }
    }

    ws.component.clear();
    bool any_destroyed = false;
    Link fused;
    if (loop) {
      std::int32_t c = start;
      int side = 1;
      do {
        ws.component.push_back(c);
        const std::int64_t p = ws.partner[2 * c + side];
        c = static_cast<std::int32_t>(p >> 1);
        side = 1 - static_cast<int>(p & 1);
      } while (c != start);
    } else {
      // `cur` has a free end at exit_side; walk the path from there.
      const std::int32_t head = cur;
      const int head_side = exit_side;
      fused.a = links[head].end(head_side);
      fused.segments = 0;
      fused.birth_min = links[head].birth_min;
      fused.birth_sum = 0;
      std::int32_t c = head;
      int out_side = 1 - head_side;
      for (;;) {
        ws.component.push_back(c);
        fused.segments += links[c].segments;
        fused.birth_min = std::min(fused.birth_min, links[c].birth_min);
        fused.birth_sum += links[c].birth_sum;
        const std::int64_t p = ws.partner[2 * c + out_side];
        if (p < 0) {
          fused.b = links[c].end(out_side);
          break;
        }
        c = static_cast<std::int32_t>(p >> 1);
        out_side = 1 - static_cast<int>(p & 1);
      }
    }

    for (std::int32_t c : ws.component) {
      ws.visited[c] = 1;
      any_destroyed = any_destroyed || ws.destroyed[c];
    }
    const auto size = static_cast<std::int64_t>(ws.component.size());
    if (any_destroyed) {
      stats.removed_failed += size;
    } else if (loop) {
      stats.removed_cycle += size;
    } else if (fused.a.node == fused.b.node) {
      stats.removed_self_loop += size;
    } else if (fused.segments > max_swap_distance) {
      stats.removed_too_long += size;
    } else {
      stats.fused += size;
      ++stats.chains_formed;
      fused.id = state.next_id++;
      ws.next.push_back(fused);
    }
  }

  state.links.swap(ws.next);
  return stats;
}

ResolveStats resolve_swaps(NetworkState& state, std::span<const JunctionOutcome> outcomes,
                           int max_swap_distance) {
  ResolveWorkspace ws;
  return resolve_swaps(state, outcomes, max_swap_distance, ws);
}

void apply_cutoff(NetworkState& state, int cutoff) {
  const int now = state.time;
  std::erase_if(state.links, [&](const Link& l) { return l.age(now) >= cutoff; });
}

void add_elementary_link(NetworkState& state, const Channel& channel) {
  Link l;
  l.id = state.next_id++;
  l.a = {channel.a, channel.at_a};
  l.b = {channel.b, channel.at_b};
  l.segments = 1;
  l.birth_min = state.time;
  l.birth_sum = state.time;
  state.links.push_back(l);
}

void generate_links(NetworkState& state, const PhysicalGraph& graph, double p_gen, Rng& rng) {
  for (const Channel& c : graph.channels()) {
    if (rng.bernoulli(p_gen)) add_elementary_link(state, c);
  }
}

ResolveStats protocol_step(NetworkState& state, const PhysicalGraph& graph,
                           const ProtocolConfig& config, Rng& rng, StepWorkspace& ws) {
  const auto n = graph.node_count();
  apply_cutoff(state, config.policy.cutoff);
  generate_links(state, graph, config.hardware.p_gen, rng);

  const std::uint64_t step_seed = rng();
  ws.incidence.rebuild(state, n);
  ws.outcomes.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    Rng node_rng(mix_seed(step_seed, static_cast<std::uint64_t>(v)));
    local_swap_selection(v, ws.incidence.at(v), config.policy.q, config.hardware.p_swap,
                         node_rng, ws.pool, ws.outcomes[v]);
  }
  ResolveStats stats =
      resolve_swaps(state, ws.outcomes, config.policy.max_swap_distance, ws.resolve);
  ++state.time;
  if (config.verify_fidelity) {
    verify_fidelity_floor(state, config.hardware, config.policy.f_min);
  }
  return stats;
}

double link_fidelity(const Link& link, const NetworkState& state, const HardwareParams& hw) {
  return link_fidelity(hw.f_new, link.segments, static_cast<double>(link.birth_sum),
                       state.observation_time(), hw.coherence_time);
}

void verify_fidelity_floor(const NetworkState& state, const HardwareParams& hw, double f_min) {
  for (const Link& l : state.links) {
    const double f = link_fidelity(l, state, hw);
    if (f < f_min - 1e-9) {
      throw InvariantViolation("link " + std::to_string(l.id) + " has fidelity " +
                               std::to_string(f) + " below F_min " + std::to_string(f_min));
    }
  }
}

void check_state(const NetworkState& state, const PhysicalGraph& graph,
                 const PolicyParams& policy) {
  const int now = state.observation_time();
  auto has_port = [&](const Endpoint& e) {
    for (const Port& p : graph.ports(e.node)) {
      if (p.orientation == e.orientation) return true;
    }
    return false;
  };
  for (const Link& l : state.links) {
    if (l.a.node == l.b.node) throw InvariantViolation("self-loop link survived");
    if (l.segments < 1 || l.segments > policy.max_swap_distance) {
      throw InvariantViolation("link swap distance outside [1, M]");
    }
    if (l.age(now) < 0 || l.age(now) >= policy.cutoff) {
      throw InvariantViolation("link age outside [0, t_cut)");
    }
    if (!has_port(l.a) || !has_port(l.b)) {
      throw InvariantViolation("link endpoint on a nonexistent port");
    }
  }
}

}  // namespace cdnet
