#pragma once

#include <optional>
#include <random>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pgb/netgraph.hpp"

namespace pgb {

struct PrimaryInstance {
  int id = -1;
  NodeId server = -1;
  int ftype = -1;
};

// Requested service chain before instances are bound to it.
struct ChainSpec {
  int id = -1;
  NodeId source = -1;
  NodeId dest = -1;
  std::vector<int> requested;  // function type per step, repeats allowed
  double rate = 1.0;           // packets per millisecond
};

// A routed chain. The route lists every node the traffic touches, in order,
// with consecutive entries adjacent in the graph; nodes may repeat when the
// walk doubles back through a junction.
class ServiceChain {
 public:
  int id = -1;
  NodeId source = -1;
  NodeId dest = -1;
  std::vector<int> requested;
  std::vector<int> assigned;  // primary instance id per requested step
  std::vector<NodeId> route;
  double rate = 1.0;

  // Builds the route position index; call once after `route` is final.
  void finalize();

  // Fewest hops from a visit of u to a strictly later visit of v on this
  // route; nullopt when the route never goes u -> v.
  std::optional<int> segment_length(NodeId u, NodeId v) const;
  bool traverses(NodeId u, NodeId v) const {
    return segment_length(u, v).has_value();
  }

 private:
  std::unordered_map<NodeId, std::vector<int>> positions_;
};

// Fills every server to its primary capacity. Slot positions are a uniform
// shuffle of all capacity slots; function types cycle through a fresh random
// permutation per batch, so per-type counts differ by at most one.
std::vector<PrimaryInstance> place_primary_instances(const NetworkGraph& g,
                                                     int num_types,
                                                     std::mt19937_64& rng);

// Binds each requested step to the closest instance of its type (first step
// measured from the source, later steps from the previous instance's server;
// ties -> lowest instance id) and concatenates deterministic shortest paths.
ServiceChain assign_and_route(const ChainSpec& spec,
                              const std::vector<PrimaryInstance>& instances,
                              const DistanceTable& dists);

// Draws `count` chains: uniform source != dest endpoints, uniform length in
// len_range, uniform function types among those actually deployed; each is
// routed via assign_and_route.
std::vector<ServiceChain> generate_chains(
    const NetworkGraph& g, const std::vector<PrimaryInstance>& instances,
    int count, std::pair<int, int> len_range, const DistanceTable& dists,
    double rate, std::mt19937_64& rng);

}  // namespace pgb
