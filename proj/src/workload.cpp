#include "pgb/workload.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

namespace pgb {

void ServiceChain::finalize() {
  positions_.clear();
  for (int i = 0; i < static_cast<int>(route.size()); ++i) {
    positions_[route[i]].push_back(i);
  }
}

std::optional<int> ServiceChain::segment_length(NodeId u, NodeId v) const {
  auto iu = positions_.find(u);
  auto iv = positions_.find(v);
  if (iu == positions_.end() || iv == positions_.end()) return std::nullopt;
  const auto& pu = iu->second;  // ascending by construction
  const auto& pv = iv->second;
  int best = std::numeric_limits<int>::max();
  std::size_t j = 0;
  for (int p : pu) {
    while (j < pv.size() && pv[j] <= p) ++j;
    if (j == pv.size()) break;
    best = std::min(best, pv[j] - p);
  }
  if (best == std::numeric_limits<int>::max()) return std::nullopt;
  return best;
}

std::vector<PrimaryInstance> place_primary_instances(const NetworkGraph& g,
                                                     int num_types,
                                                     std::mt19937_64& rng) {
  if (num_types < 1) {
    throw validation_error("num_types must be >= 1");
  }
  std::vector<NodeId> slots;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (int s = 0; s < g.primary_capacity(v); ++s) slots.push_back(v);
  }
  if (slots.empty()) {
    throw validation_error("graph has zero total primary capacity");
  }
  if (static_cast<int>(slots.size()) < num_types) {
    throw validation_error(
        "total primary capacity " + std::to_string(slots.size()) +
        " cannot host one instance of each of " + std::to_string(num_types) +
        " types");
  }
  std::shuffle(slots.begin(), slots.end(), rng);

  std::vector<int> type_order(num_types);
  std::vector<PrimaryInstance> out;
  out.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const int batch_pos = static_cast<int>(i % num_types);
    if (batch_pos == 0) {
      for (int t = 0; t < num_types; ++t) type_order[t] = t;
      std::shuffle(type_order.begin(), type_order.end(), rng);
    }
    out.push_back({static_cast<int>(i), slots[i], type_order[batch_pos]});
  }
  return out;
}

ServiceChain assign_and_route(const ChainSpec& spec,
                              const std::vector<PrimaryInstance>& instances,
                              const DistanceTable& dists) {
  ServiceChain chain;
  chain.id = spec.id;
  chain.source = spec.source;
  chain.dest = spec.dest;
  chain.requested = spec.requested;
  chain.rate = spec.rate;
  if (spec.rate <= 0.0) {
    throw validation_error("chain rate must be positive");
  }

  NodeId cur = spec.source;
  std::vector<NodeId> waypoints{spec.source};
  for (int ftype : spec.requested) {
    const PrimaryInstance* best = nullptr;
    for (const auto& inst : instances) {
      if (inst.ftype != ftype) continue;
      if (best == nullptr ||
          std::make_pair(dists.dist(cur, inst.server), inst.id) <
              std::make_pair(dists.dist(cur, best->server), best->id)) {
        best = &inst;
      }
    }
    if (best == nullptr) {
      throw validation_error("no deployed instance of function type " +
                             std::to_string(ftype));
    }
    chain.assigned.push_back(best->id);
    cur = best->server;
    waypoints.push_back(cur);
  }
  waypoints.push_back(spec.dest);

  chain.route.push_back(spec.source);
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    auto leg = dists.path(waypoints[i], waypoints[i + 1]);
    // The leg starts at the node the route already ends on.
    chain.route.insert(chain.route.end(), leg.begin() + 1, leg.end());
  }
  chain.finalize();
  return chain;
}

std::vector<ServiceChain> generate_chains(
    const NetworkGraph& g, const std::vector<PrimaryInstance>& instances,
    int count, std::pair<int, int> len_range, const DistanceTable& dists,
    double rate, std::mt19937_64& rng) {
  if (count < 0) {
    throw validation_error("chain count must be >= 0");
  }
  if (count == 0) return {};
  if (len_range.first < 1 || len_range.second < len_range.first) {
    throw validation_error("chain length range must satisfy 1 <= min <= max");
  }
  std::set<int> type_set;
  for (const auto& inst : instances) type_set.insert(inst.ftype);
  if (type_set.empty()) {
    throw validation_error("cannot generate chains without deployed instances");
  }
  std::vector<int> types(type_set.begin(), type_set.end());
  std::vector<NodeId> endpoints = g.endpoint_nodes();
  if (endpoints.size() < 2) {
    throw validation_error("need at least two endpoint nodes for chains");
  }

  std::uniform_int_distribution<std::size_t> pick_endpoint(0, endpoints.size() - 1);
  std::uniform_int_distribution<int> pick_len(len_range.first, len_range.second);
  std::uniform_int_distribution<std::size_t> pick_type(0, types.size() - 1);

  std::vector<ServiceChain> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    ChainSpec spec;
    spec.id = i;
    spec.rate = rate;
    spec.source = endpoints[pick_endpoint(rng)];
    do {
      spec.dest = endpoints[pick_endpoint(rng)];
    } while (spec.dest == spec.source);
    const int len = pick_len(rng);
    spec.requested.reserve(len);
    for (int k = 0; k < len; ++k) spec.requested.push_back(types[pick_type(rng)]);
    out.push_back(assign_and_route(spec, instances, dists));
  }
  return out;
}

}  // namespace pgb
