#include "pgb/netgraph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>

namespace pgb {

void NetworkGraph::check_node(NodeId v) const {
  if (v < 0 || v >= num_nodes()) {
    throw validation_error("node id out of range: " + std::to_string(v));
  }
}

NodeId NetworkGraph::add_node(NodeKind kind, int primary_cap, int backup_cap) {
  if (primary_cap < 0 || backup_cap < 0) {
    throw validation_error("node capacities must be non-negative");
  }
  if (kind == NodeKind::host && (primary_cap != 0 || backup_cap != 0)) {
    throw validation_error("hosts carry no instance capacity");
  }
  kind_.push_back(kind);
  primary_cap_.push_back(primary_cap);
  backup_cap_.push_back(backup_cap);
  adj_.emplace_back();
  return static_cast<NodeId>(kind_.size()) - 1;
}

void NetworkGraph::add_edge(NodeId u, NodeId v) {
  check_node(u);
  check_node(v);
  if (u == v) {
    throw validation_error("self-loop rejected at node " + std::to_string(u));
  }
  if (has_edge(u, v)) {
    throw validation_error("duplicate edge " + std::to_string(u) + "-" +
                           std::to_string(v));
  }
  auto insert_sorted = [](std::vector<NodeId>& vec, NodeId x) {
    vec.insert(std::lower_bound(vec.begin(), vec.end(), x), x);
  };
  insert_sorted(adj_[u], v);
  insert_sorted(adj_[v], u);
  edges_.emplace_back(std::min(u, v), std::max(u, v));
}

bool NetworkGraph::has_edge(NodeId u, NodeId v) const {
  check_node(u);
  check_node(v);
  const auto& a = adj_[u];
  return std::binary_search(a.begin(), a.end(), v);
}

std::vector<NodeId> NetworkGraph::servers() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < num_nodes(); ++v) {
    if (kind_[v] == NodeKind::server) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> NetworkGraph::hosts() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < num_nodes(); ++v) {
    if (kind_[v] == NodeKind::host) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> NetworkGraph::endpoint_nodes() const {
  std::vector<NodeId> h = hosts();
  if (!h.empty()) return h;
  std::vector<NodeId> all(num_nodes());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

int NetworkGraph::total_primary_capacity() const {
  return std::accumulate(primary_cap_.begin(), primary_cap_.end(), 0);
}

int NetworkGraph::total_backup_capacity() const {
  return std::accumulate(backup_cap_.begin(), backup_cap_.end(), 0);
}

void NetworkGraph::set_capacity(NodeId v, int primary_cap, int backup_cap) {
  check_node(v);
  if (primary_cap < 0 || backup_cap < 0) {
    throw validation_error("node capacities must be non-negative");
  }
  if (kind_[v] == NodeKind::host && (primary_cap != 0 || backup_cap != 0)) {
    throw validation_error("hosts carry no instance capacity");
  }
  primary_cap_[v] = primary_cap;
  backup_cap_[v] = backup_cap;
}

void NetworkGraph::set_uniform_capacities(int primary_cap, int backup_cap) {
  for (NodeId v = 0; v < num_nodes(); ++v) {
    if (kind_[v] == NodeKind::server) set_capacity(v, primary_cap, backup_cap);
  }
}

std::optional<std::pair<NodeId, NodeId>> NetworkGraph::disconnected_pair()
    const {
  if (num_nodes() == 0) return std::nullopt;
  std::vector<char> seen(num_nodes(), 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId w : adj_[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        q.push(w);
      }
    }
  }
  for (NodeId v = 0; v < num_nodes(); ++v) {
    if (!seen[v]) return std::make_pair(NodeId{0}, v);
  }
  return std::nullopt;
}

bool NetworkGraph::connected() const { return !disconnected_pair().has_value(); }

std::vector<NodeId> DistanceTable::path(NodeId u, NodeId v) const {
  std::vector<NodeId> out{u};
  while (u != v) {
    u = next_hop(u, v);
    out.push_back(u);
  }
  return out;
}

NetworkGraph build_fat_tree(int pods) {
  if (pods < 2 || pods % 2 != 0) {
    throw validation_error("fat tree pod count must be even and >= 2, got " +
                           std::to_string(pods));
  }
  const int h = pods / 2;
  const int num_core = h * h;
  const int num_agg = pods * h;
  const int num_edge = pods * h;
  const int num_hosts = pods * h * h;

  NetworkGraph g;
  for (int i = 0; i < num_core; ++i) g.add_node(NodeKind::server);
  for (int i = 0; i < num_agg; ++i) g.add_node(NodeKind::server);
  for (int i = 0; i < num_edge; ++i) g.add_node(NodeKind::server);
  for (int i = 0; i < num_hosts; ++i) g.add_node(NodeKind::host);

  auto core_id = [&](int c) { return c; };
  auto agg_id = [&](int pod, int a) { return num_core + pod * h + a; };
  auto edge_id = [&](int pod, int e) { return num_core + num_agg + pod * h + e; };
  auto host_id = [&](int pod, int e, int m) {
    return num_core + num_agg + num_edge + (pod * h + e) * h + m;
  };

  for (int pod = 0; pod < pods; ++pod) {
    for (int e = 0; e < h; ++e) {
      for (int a = 0; a < h; ++a) g.add_edge(edge_id(pod, e), agg_id(pod, a));
      for (int m = 0; m < h; ++m) g.add_edge(host_id(pod, e, m), edge_id(pod, e));
    }
    // The a-th aggregation switch of every pod uplinks to core group a.
    for (int a = 0; a < h; ++a) {
      for (int j = 0; j < h; ++j) g.add_edge(agg_id(pod, a), core_id(a * h + j));
    }
  }
  return g;
}

namespace {

std::vector<std::vector<NodeId>> components_by_min_id(const NetworkGraph& g) {
  std::vector<int> comp(g.num_nodes(), -1);
  std::vector<std::vector<NodeId>> comps;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (comp[s] != -1) continue;
    int c = static_cast<int>(comps.size());
    comps.emplace_back();
    std::queue<NodeId> q;
    q.push(s);
    comp[s] = c;
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop();
      comps[c].push_back(u);
      for (NodeId w : g.neighbors(u)) {
        if (comp[w] == -1) {
          comp[w] = c;
          q.push(w);
        }
      }
    }
  }
  // BFS seeds run in ascending id order, so components are already ordered
  // by their smallest member.
  return comps;
}

}  // namespace

NetworkGraph build_random_graph(int num_servers, double connect_prob,
                                std::mt19937_64& rng) {
  if (num_servers < 2) {
    throw validation_error("random graph needs at least two servers");
  }
  if (connect_prob < 0.0 || connect_prob > 1.0) {
    throw validation_error("connect_prob must lie in [0,1]");
  }
  NetworkGraph g;
  for (int i = 0; i < num_servers; ++i) g.add_node(NodeKind::server);
  std::bernoulli_distribution coin(connect_prob);
  for (NodeId u = 0; u < num_servers; ++u) {
    for (NodeId v = u + 1; v < num_servers; ++v) {
      if (coin(rng)) g.add_edge(u, v);
    }
  }
  auto comps = components_by_min_id(g);
  if (comps.size() > 1) {
    std::vector<NodeId> merged = comps[0];
    for (std::size_t c = 1; c < comps.size(); ++c) {
      std::uniform_int_distribution<std::size_t> pick_merged(0, merged.size() - 1);
      std::uniform_int_distribution<std::size_t> pick_comp(0, comps[c].size() - 1);
      g.add_edge(merged[pick_merged(rng)], comps[c][pick_comp(rng)]);
      merged.insert(merged.end(), comps[c].begin(), comps[c].end());
    }
  }
  return g;
}

DistanceTable all_pairs_shortest(const NetworkGraph& g) {
  if (auto bad = g.disconnected_pair()) {
    throw validation_error("graph is disconnected: no path between nodes " +
                           std::to_string(bad->first) + " and " +
                           std::to_string(bad->second));
  }
  const int n = g.num_nodes();
  DistanceTable t;
  t.n_ = n;
  t.dist_.assign(static_cast<std::size_t>(n) * n, -1);
  t.next_.assign(static_cast<std::size_t>(n) * n, -1);

  std::vector<NodeId> queue(static_cast<std::size_t>(n));
  for (NodeId s = 0; s < n; ++s) {
    auto* d = &t.dist_[t.idx(s, 0)];
    d[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      NodeId u = queue[head++];
      for (NodeId w : g.neighbors(u)) {
        if (d[w] == -1) {
          d[w] = d[u] + 1;
          queue[tail++] = w;
        }
      }
    }
  }
  // dist is symmetric, so the lowest-id neighbor of u that is one hop closer
  // to v gives a unique deterministic next hop.
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      for (NodeId w : g.neighbors(u)) {  // neighbors are sorted ascending
        if (t.dist(w, v) == t.dist(u, v) - 1) {
          t.next_[t.idx(u, v)] = w;
          break;
        }
      }
    }
  }
  return t;
}

}  // namespace pgb
