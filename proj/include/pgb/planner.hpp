#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pgb/costmodel.hpp"
#include "pgb/netgraph.hpp"
#include "pgb/workload.hpp"

namespace pgb {

enum class Provenance : std::uint8_t { uncovered, piggyback, standalone };

const char* to_string(Provenance p);

// Backup deployment state: which (type, server) pairs hold a backup, which
// server replicates each primary instance, and how each instance got there.
// A server holds at most one backup per type, and a backup serves at most
// assoc_limit primaries.
class DeploymentPlan {
 public:
  DeploymentPlan(int num_types, int num_nodes, int num_instances,
                 int assoc_limit);

  int num_types() const { return num_types_; }
  int num_nodes() const { return num_nodes_; }
  int num_instances() const { return static_cast<int>(backup_of_.size()); }
  int assoc_limit() const { return assoc_limit_; }

  bool installed(int ftype, NodeId v) const { return installed_[cell(ftype, v)]; }
  int installed_count(NodeId v) const { return installed_count_[v]; }
  int association_count(int ftype, NodeId v) const {
    return assoc_count_[cell(ftype, v)];
  }
  std::optional<NodeId> backup_server(int instance) const;
  Provenance provenance(int instance) const { return provenance_.at(instance); }
  int covered_count() const;
  int uncovered_count() const { return num_instances() - covered_count(); }

  void install(int ftype, NodeId v);
  void associate(const PrimaryInstance& inst, NodeId v, Provenance prov);
  void mark_uncovered(int instance);

 private:
  std::size_t cell(int ftype, NodeId v) const;

  int num_types_;
  int num_nodes_;
  int assoc_limit_;
  std::vector<std::uint8_t> installed_;
  std::vector<int> installed_count_;
  std::vector<int> assoc_count_;
  std::vector<NodeId> backup_of_;
  std::vector<Provenance> provenance_;
};

// Structural checks against the capacity and association limits: per-server
// backup capacity, at most one backup server per instance (exactly one when
// covered), per-backup association cap, no self-backup. Returns one message
// per violation; empty means the plan is valid.
std::vector<std::string> plan_violations(
    const DeploymentPlan& plan, const NetworkGraph& g,
    const std::vector<PrimaryInstance>& instances);

void validate_plan(const DeploymentPlan& plan, const NetworkGraph& g,
                   const std::vector<PrimaryInstance>& instances);

// Piggyback affinity of candidate backup servers for one function type:
// per-instance score sums rate/segment over the chains that request the
// type and traverse instance-server -> candidate; the server score sums
// those over instances. Entries keep candidate order.
struct ServerScore {
  NodeId server = -1;
  double total = 0.0;
  std::vector<double> per_instance;  // parallel to the instances argument
};

std::vector<ServerScore> piggyback_scores(
    const std::vector<const PrimaryInstance*>& instances_f,
    const std::vector<const ServiceChain*>& chains_f,
    const std::vector<NodeId>& candidate_servers);

struct PiggybackDeployment {
  DeploymentPlan plan;
  std::vector<int> leftovers;  // instance ids never associated, ascending
};

// Phase 1: processes types by descending chain demand; repeatedly installs a
// backup on the highest-scoring server with spare capacity and associates up
// to assoc_limit positive-score instances (never one hosted on that server),
// until no server scores above zero for the type.
PiggybackDeployment deploy_piggyback(const NetworkGraph& g,
                                     const std::vector<PrimaryInstance>& instances,
                                     const std::vector<ServiceChain>& chains,
                                     int assoc_limit);

// Servers that can accept one more association of the given type: either the
// type's backup is present with spare association slots, or the server has
// spare backup capacity for a new install.
std::vector<NodeId> available_servers(const DeploymentPlan& plan, int ftype,
                                      const NetworkGraph& g);

// Phase 2: repeatedly serves the leftover whose gap between closest and
// second-closest available server is largest (one option left -> infinite
// priority), assigning it to the closest available server; instances with no
// options are marked uncovered.
void deploy_standalone(const NetworkGraph& g, const DistanceTable& dists,
                       DeploymentPlan& plan, const std::vector<int>& leftovers,
                       const std::vector<PrimaryInstance>& instances);

// Both phases back to back; the headline strategy.
DeploymentPlan plan_piggybackup(const NetworkGraph& g, const DistanceTable& dists,
                                const std::vector<PrimaryInstance>& instances,
                                const std::vector<ServiceChain>& chains,
                                int assoc_limit);

// Baseline: instances in random order each pick a uniformly random available
// server (never their own host).
DeploymentPlan deploy_random(const NetworkGraph& g, const DistanceTable& dists,
                             const std::vector<PrimaryInstance>& instances,
                             const std::vector<ServiceChain>& chains,
                             int assoc_limit, std::mt19937_64& rng);

// Baseline: instances in random order each pick the closest available server
// (ties -> lower id), reusing non-full backups.
DeploymentPlan deploy_shortest_path(const NetworkGraph& g,
                                    const DistanceTable& dists,
                                    const std::vector<PrimaryInstance>& instances,
                                    const std::vector<ServiceChain>& chains,
                                    int assoc_limit, std::mt19937_64& rng);

struct ExactGuard {
  int max_instances = 8;
  int max_servers = 6;
  int max_types = 3;
};

struct ExactResult {
  enum class Status { optimal, infeasible };
  Status status = Status::infeasible;
  std::optional<DeploymentPlan> plan;
  // Objective scaled by max(|chains|,1) so it is an exact integer.
  std::int64_t cost_numer = 0;
  int cost_denom = 1;
  double cost() const {
    return static_cast<double>(cost_numer) / static_cast<double>(cost_denom);
  }
};

// Optimal full-coverage deployment by depth-first branch and bound over
// per-instance server choices, pruned with an admissible per-instance
// cheapest-assignment bound. Throws guard_error beyond the size guard.
ExactResult solve_exact(const NetworkGraph& g, const DistanceTable& dists,
                        const std::vector<PrimaryInstance>& instances,
                        const std::vector<ServiceChain>& chains, int assoc_limit,
                        const CostParams& params = {},
                        const ExactGuard& guard = {});

}  // namespace pgb
