#pragma once

// Patient timeline graphs assembled from pairwise relation labels. EQUAL
// merges events (union-find), BEFORE/AFTER add directed edges between the
// merged classes, VAGUE adds nothing.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "medtok/error.hpp"
#include "medtok/record.hpp"
#include "medtok/trc.hpp"

namespace medtok::trc {

struct EventKey {
  std::string record_id;
  std::size_t start = 0;
  std::size_t end = 0;

  auto operator<=>(const EventKey&) const = default;
};

inline EventKey key_of(const Event& e) { return {e.record_id, e.start, e.end}; }

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

struct TimelineNode {
  std::vector<EventKey> events;  // sorted; events.front() orders the node
  std::vector<std::string> surfaces;
};

struct TimelineEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::vector<std::size_t> pairs;  // supporting pair indices, ascending
  double confidence = 1.0;         // max over supporting pairs
};

struct Violation {
  std::string kind;                // "cycle" or "contraction"
  std::vector<std::size_t> nodes;  // cycle in edge order, or the merged node
  std::vector<std::size_t> pairs;
};

struct RemovedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double confidence = 1.0;
  std::vector<std::size_t> pairs;
};

struct TemporalGraph {
  std::vector<TimelineNode> nodes;
  std::vector<TimelineEdge> edges;  // sorted by (from, to)
  std::vector<Violation> violations;
  std::optional<std::vector<std::size_t>> order;
  std::vector<RemovedEdge> removed;
  bool truncated_violations = false;

  bool has_cycles() const {
    return std::any_of(violations.begin(), violations.end(), [](const Violation& v) { return v.kind == "cycle"; });
  }
};

inline constexpr std::size_t kMaxReportedCycles = 100;

namespace detail {

inline double confidence_of(const EventPair& p) { return p.confidence.value_or(1.0); }

/// Tarjan's SCC, iterative. Returns component id per node.
inline std::vector<std::size_t> strongly_connected(std::size_t n, const std::vector<std::vector<std::size_t>>& adj,
                                                   std::size_t& components) {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, none), low(n, 0), comp(n, none);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // node, next child
  std::size_t counter = 0;
  components = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != none) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, child] = call.back();
      if (child == 0 && index[v] == none) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (child < adj[v].size()) {
        const std::size_t w = adj[v][child++];
        if (index[w] == none) {
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        while (true) {
          const std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = components;
          if (w == v) break;
        }
        ++components;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return comp;
}

/// Shortest cycle through start using only nodes of the same component.
inline std::vector<std::size_t> witness_cycle(std::size_t start, const std::vector<std::vector<std::size_t>>& adj,
                                              const std::vector<std::size_t>& comp) {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> prev(adj.size(), none);
  std::queue<std::size_t> q;
  q.push(start);
  std::size_t last = none;
  while (!q.empty() && last == none) {
    const std::size_t v = q.front();
    q.pop();
    for (const std::size_t w : adj[v]) {
      if (comp[w] != comp[start]) continue;
      if (w == start) {
        last = v;
        break;
      }
      if (prev[w] == none) {
        prev[w] = v;
        q.push(w);
      }
    }
  }
  std::vector<std::size_t> cycle;
  for (std::size_t v = last; v != start; v = prev[v]) cycle.push_back(v);
  cycle.push_back(start);
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

inline std::vector<std::vector<std::size_t>> adjacency(const TemporalGraph& g) {
  std::vector<std::vector<std::size_t>> adj(g.nodes.size());
  for (const auto& e : g.edges) adj[e.from].push_back(e.to);  // edges sorted, so lists are too
  return adj;
}

/// Recomputes cycle violations and, when acyclic, the topological order.
inline void analyse(TemporalGraph& g) {
  std::erase_if(g.violations, [](const Violation& v) { return v.kind == "cycle"; });
  g.truncated_violations = false;
  g.order.reset();
  const auto adj = adjacency(g);
  std::size_t components = 0;
  const auto comp = strongly_connected(g.nodes.size(), adj, components);
  std::vector<std::size_t> size(components, 0);
  std::vector<std::size_t> first(components, static_cast<std::size_t>(-1));
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    ++size[comp[v]];
    first[comp[v]] = std::min(first[comp[v]], v);  // node ids follow event order
  }
  std::vector<std::size_t> starts;
  for (std::size_t c = 0; c < components; ++c) {
    if (size[c] > 1) starts.push_back(first[c]);
  }
  std::sort(starts.begin(), starts.end());
  std::vector<Violation> cycles;
  for (const std::size_t s : starts) {
    if (cycles.size() == kMaxReportedCycles) {
      g.truncated_violations = true;
      break;
    }
    Violation v;
    v.kind = "cycle";
    v.nodes = witness_cycle(s, adj, comp);
    for (std::size_t i = 0; i < v.nodes.size(); ++i) {
      const std::size_t a = v.nodes[i];
      const std::size_t b = v.nodes[(i + 1) % v.nodes.size()];
      const auto it = std::lower_bound(g.edges.begin(), g.edges.end(), std::pair(a, b),
                                       [](const TimelineEdge& e, const std::pair<std::size_t, std::size_t>& k) {
                                         return std::pair(e.from, e.to) < k;
                                       });
      v.pairs.insert(v.pairs.end(), it->pairs.begin(), it->pairs.end());
    }
    cycles.push_back(std::move(v));
  }
  g.violations.insert(g.violations.begin(), cycles.begin(), cycles.end());
  if (!starts.empty()) return;

  // Kahn's algorithm; among ready nodes the one with the earliest event wins.
  std::vector<std::size_t> indegree(g.nodes.size(), 0);
  for (const auto& e : g.edges) ++indegree[e.to];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const std::size_t w : adj[v]) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  g.order = std::move(order);
}

inline RelationLabel timeline_label(const EventPair& p, bool use_gold) {
  const auto& l = use_gold ? p.gold : (p.predicted ? p.predicted : p.gold);
  if (!l) throw ValidationError("pair in record '" + p.e1.record_id + "' has no label");
  if (*l == RelationLabel::invalid) throw ValidationError("INVALID label cannot enter a timeline");
  return *l;
}

}  // namespace detail

/// Builds the graph from labeled pairs (predicted label when present, else
/// gold; or gold only). Node ids follow the earliest event of each class.
inline TemporalGraph build_timeline(std::span<const EventPair> pairs, bool use_gold = false) {
  std::map<EventKey, std::string> surfaces;
  for (const auto& p : pairs) {
    surfaces.emplace(key_of(p.e1), p.e1.surface);
    surfaces.emplace(key_of(p.e2), p.e2.surface);
  }
  std::vector<EventKey> keys;
  for (const auto& [k, s] : surfaces) keys.push_back(k);
  auto event_id = [&](const Event& e) {
    return static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), key_of(e)) - keys.begin());
  };

  std::vector<RelationLabel> labels;
  labels.reserve(pairs.size());
  UnionFind uf(keys.size());
  for (const auto& p : pairs) {
    labels.push_back(detail::timeline_label(p, use_gold));
    if (labels.back() == RelationLabel::equal) uf.unite(event_id(p.e1), event_id(p.e2));
  }

  // Classes numbered by their earliest event.
  TemporalGraph g;
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> class_of_root(keys.size(), none);
  std::vector<std::size_t> node_of(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::size_t r = uf.find(i);
    if (class_of_root[r] == none) {
      class_of_root[r] = g.nodes.size();
      g.nodes.emplace_back();
    }
    node_of[i] = class_of_root[r];
    g.nodes[node_of[i]].events.push_back(keys[i]);
    g.nodes[node_of[i]].surfaces.push_back(surfaces[keys[i]]);
  }

  std::map<std::pair<std::size_t, std::size_t>, TimelineEdge> edges;
  std::map<std::size_t, Violation> contractions;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto l = labels[i];
    if (l != RelationLabel::before && l != RelationLabel::after) continue;
    std::size_t a = node_of[event_id(pairs[i].e1)];
    std::size_t b = node_of[event_id(pairs[i].e2)];
    if (l == RelationLabel::after) std::swap(a, b);
    if (a == b) {
      auto& v = contractions[a];
      v.kind = "contraction";
      v.nodes = {a};
      v.pairs.push_back(i);
      continue;
    }
    auto& e = edges[{a, b}];
    if (e.pairs.empty()) {
      e.from = a;
      e.to = b;
      e.confidence = detail::confidence_of(pairs[i]);
    } else {
      e.confidence = std::max(e.confidence, detail::confidence_of(pairs[i]));
    }
    e.pairs.push_back(i);
  }
  for (auto& [k, e] : edges) g.edges.push_back(std::move(e));
  for (auto& [k, v] : contractions) g.violations.push_back(std::move(v));
  detail::analyse(g);
  return g;
}

/// Breaks every cycle by dropping, per reported cycle, the edge with the
/// lowest confidence (ties: latest supporting span, then highest pair
/// index), and repeats until acyclic. Removed edges are logged.
inline TemporalGraph repair_timeline(TemporalGraph g, std::span<const EventPair> pairs) {
  auto latest = [&](const TimelineEdge& e) {
    std::tuple<std::size_t, std::size_t, std::size_t> best{0, 0, 0};
    for (const auto i : e.pairs) {
      if (i >= pairs.size()) throw ValidationError("timeline refers to a pair that is not in the input");
      best = std::max(best, std::tuple(pairs[i].e1.start, pairs[i].e2.start, i));
    }
    return best;
  };
  while (g.has_cycles()) {
    std::vector<std::pair<std::size_t, std::size_t>> doomed;
    for (const auto& v : g.violations) {
      if (v.kind != "cycle") continue;
      const TimelineEdge* worst = nullptr;
      for (std::size_t i = 0; i < v.nodes.size(); ++i) {
        const auto key = std::pair(v.nodes[i], v.nodes[(i + 1) % v.nodes.size()]);
        const auto it = std::lower_bound(g.edges.begin(), g.edges.end(), key, [](const TimelineEdge& e, const auto& k) {
          return std::pair(e.from, e.to) < k;
        });
        const TimelineEdge& e = *it;
        if (!worst || e.confidence < worst->confidence ||
            (e.confidence == worst->confidence && latest(e) > latest(*worst))) {
          worst = &e;
        }
      }
      doomed.emplace_back(worst->from, worst->to);
    }
    std::sort(doomed.begin(), doomed.end());
    doomed.erase(std::unique(doomed.begin(), doomed.end()), doomed.end());
    std::vector<TimelineEdge> kept;
    for (auto& e : g.edges) {
      if (std::binary_search(doomed.begin(), doomed.end(), std::pair(e.from, e.to))) {
        g.removed.push_back({e.from, e.to, e.confidence, e.pairs});
      } else {
        kept.push_back(std::move(e));
      }
    }
    g.edges = std::move(kept);
    detail::analyse(g);
  }
  return g;
}

inline ordered_json to_json(const TemporalGraph& g) {
  ordered_json j;
  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    ordered_json n;
    n["id"] = i;
    ordered_json events = ordered_json::array();
    for (std::size_t k = 0; k < g.nodes[i].events.size(); ++k) {
      const auto& e = g.nodes[i].events[k];
      ordered_json o;
      o["record_id"] = e.record_id;
      o["start"] = e.start;
      o["end"] = e.end;
      o["surface"] = g.nodes[i].surfaces[k];
      events.push_back(std::move(o));
    }
    n["events"] = std::move(events);
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const auto& e : g.edges) {
    ordered_json o;
    o["from"] = e.from;
    o["to"] = e.to;
    o["confidence"] = e.confidence;
    o["pairs"] = e.pairs;
    edges.push_back(std::move(o));
  }
  j["edges"] = std::move(edges);
  ordered_json violations = ordered_json::array();
  for (const auto& v : g.violations) {
    ordered_json o;
    o["kind"] = v.kind;
    o["nodes"] = v.nodes;
    o["pairs"] = v.pairs;
    violations.push_back(std::move(o));
  }
  j["violations"] = std::move(violations);
  j["violations_truncated"] = g.truncated_violations;
  j["order"] = g.order ? ordered_json(*g.order) : ordered_json(nullptr);
  ordered_json removed = ordered_json::array();
  for (const auto& r : g.removed) {
    ordered_json o;
    o["from"] = r.from;
    o["to"] = r.to;
    o["confidence"] = r.confidence;
    o["pairs"] = r.pairs;
    removed.push_back(std::move(o));
  }
  j["removed"] = std::move(removed);
  return j;
}

}  // namespace medtok::trc
