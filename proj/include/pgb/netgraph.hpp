#pragma once

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "pgb/common.hpp"

namespace pgb {

enum class NodeKind : std::uint8_t { host, server };

// Undirected topology over dense node ids 0..N-1. Switch-attached machines
// are kind=server and carry instance capacities; hosts only originate and
// terminate chain traffic.
class NetworkGraph {
 public:
  NodeId add_node(NodeKind kind, int primary_cap = 0, int backup_cap = 0);
  void add_edge(NodeId u, NodeId v);

  int num_nodes() const { return static_cast<int>(kind_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  NodeKind kind(NodeId v) const { return kind_.at(v); }
  bool is_server(NodeId v) const { return kind_.at(v) == NodeKind::server; }
  int primary_capacity(NodeId v) const { return primary_cap_.at(v); }
  int backup_capacity(NodeId v) const { return backup_cap_.at(v); }
  const std::vector<NodeId>& neighbors(NodeId v) const { return adj_.at(v); }
  const std::vector<std::pair<NodeId, NodeId>>& edges() const { return edges_; }
  bool has_edge(NodeId u, NodeId v) const;

  std::vector<NodeId> servers() const;
  std::vector<NodeId> hosts() const;
  // Chain endpoints: hosts when the topology has them, otherwise every node.
  std::vector<NodeId> endpoint_nodes() const;

  int total_primary_capacity() const;
  int total_backup_capacity() const;
  void set_capacity(NodeId v, int primary_cap, int backup_cap);
  // Applies to server nodes only; hosts keep zero capacity.
  void set_uniform_capacities(int primary_cap, int backup_cap);

  bool connected() const;
  // A sample unreachable pair, if any, for error messages.
  std::optional<std::pair<NodeId, NodeId>> disconnected_pair() const;

 private:
  void check_node(NodeId v) const;

  std::vector<NodeKind> kind_;
  std::vector<int> primary_cap_;
  std::vector<int> backup_cap_;
  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::pair<NodeId, NodeId>> edges_;
};

// Hop distances for all node pairs plus deterministic path reconstruction.
// next_hop(u,v) is the lowest-id neighbor of u that makes progress toward v,
// so reconstructed paths are unique and reproducible.
class DistanceTable {
 public:
  DistanceTable() = default;
  int num_nodes() const { return n_; }
  int dist(NodeId u, NodeId v) const { return dist_[idx(u, v)]; }
  NodeId next_hop(NodeId u, NodeId v) const { return next_[idx(u, v)]; }
  std::vector<NodeId> path(NodeId u, NodeId v) const;

 private:
  friend DistanceTable all_pairs_shortest(const NetworkGraph& g);
  std::size_t idx(NodeId u, NodeId v) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(v);
  }
  int n_ = 0;
  std::vector<std::int32_t> dist_;
  std::vector<NodeId> next_;
};

// Standard k-ary fat tree with `pods` pods (even, >= 2): (pods/2)^2 core,
// pods*(pods/2) aggregation and edge switches (all kind=server), and
// pods*(pods/2)^2 hosts, ids assigned core, agg, edge, hosts in that order.
NetworkGraph build_fat_tree(int pods);

// Erdos-Renyi graph over `num_servers` server nodes; each pair is linked
// with probability connect_prob. Disconnected results are repaired with one
// uniformly chosen bridge edge per missing component link.
NetworkGraph build_random_graph(int num_servers, double connect_prob,
                                std::mt19937_64& rng);

// BFS from every node. Throws validation_error naming a sample unreachable
// pair when the graph is disconnected.
DistanceTable all_pairs_shortest(const NetworkGraph& g);

}  // namespace pgb
