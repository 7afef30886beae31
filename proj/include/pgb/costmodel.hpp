#pragma once

#include <cstdint>
#include <vector>

#include "pgb/netgraph.hpp"
#include "pgb/workload.hpp"

namespace pgb {

class DeploymentPlan;

// Update sizes in bytes. A piggybacked state update rides an existing chain
// packet; a stand-alone update needs its own packet and headers.
struct CostParams {
  int piggyback_bytes = 20;
  int standalone_bytes = 60;
  void validate() const;
};

// Expected and deterministic per-update-event transfer costs of a plan.
// Expected costs average over which chain's packet arrives next (uniform
// across all chains); deterministic columns assume every piggybackable
// instance rides its best chain while the rest send stand-alone packets.
struct CostReport {
  std::vector<double> piggyback_cost;   // per instance, byte-hops
  std::vector<double> standalone_cost;  // per instance, byte-hops
  std::vector<double> cost;             // per instance, sum of the two
  double total_cost = 0.0;              // objective: sum over instances

  int covered = 0;
  int piggybackable = 0;
  int uncovered = 0;
  double piggyback_ratio = 0.0;  // piggybackable / covered

  std::int64_t piggyback_hops = 0;   // best-chain segment hops
  std::int64_t standalone_hops = 0;  // shortest-path hops of the rest
  std::int64_t total_hops = 0;
  std::int64_t total_bytes = 0;      // one update per instance
  std::int64_t total_byte_hops = 0;  // bytes x hops, same accounting
};

// Expected piggyback byte-hops for one instance: sum of segment * piggyback
// bytes over chains traversing primary -> backup, averaged over all chains.
// Zero when uncovered or when there are no chains.
double expected_piggyback_cost(const PrimaryInstance& inst,
                               const DeploymentPlan& plan,
                               const std::vector<ServiceChain>& chains,
                               const CostParams& params);

// Expected stand-alone byte-hops: the fraction of chains that cannot carry
// the update, times shortest-path hops to the backup at stand-alone bytes.
// With no chains at all every update is stand-alone at shortest-path hops.
double expected_standalone_cost(const PrimaryInstance& inst,
                                const DeploymentPlan& plan,
                                const std::vector<ServiceChain>& chains,
                                const DistanceTable& dists,
                                const CostParams& params);

CostReport total_expected_cost(const DeploymentPlan& plan,
                               const std::vector<PrimaryInstance>& instances,
                               const std::vector<ServiceChain>& chains,
                               const DistanceTable& dists,
                               const CostParams& params);

}  // namespace pgb
