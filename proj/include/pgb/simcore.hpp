#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pgb/costmodel.hpp"
#include "pgb/netgraph.hpp"
#include "pgb/planner.hpp"
#include "pgb/workload.hpp"

namespace pgb {

enum class SelectionMode : std::uint8_t { bounded_waiting, fcfs };

struct SimParams {
  double epoch_length = 1.0;  // milliseconds
  int num_epochs = 1000;
  SelectionMode mode = SelectionMode::bounded_waiting;
  CostParams cost;
  void validate() const;
};

// Per-chain packet arrival timestamps, strictly increasing, over [0,horizon).
struct ArrivalStream {
  double horizon = 0.0;
  std::vector<std::vector<double>> per_chain;  // indexed by chain id
};

// Poisson arrivals per chain: exponential inter-arrival times with mean
// 1/rate, truncated to the horizon. Each chain draws from its own substream
// keyed by (seed, chain id), so streams do not depend on chain order.
ArrivalStream generate_arrivals(const std::vector<ServiceChain>& chains,
                                double horizon, std::uint64_t seed);

enum class DeliveryMode : std::uint8_t {
  piggyback_candidate,  // rode the predicted chain inside its own epoch
  piggyback_fcfs,       // rode the first available packet instead
  standalone            // sent its own packet
};

const char* to_string(DeliveryMode m);

struct DeliveryRecord {
  int instance = -1;
  int epoch = -1;  // epoch whose update this record delivers
  DeliveryMode mode = DeliveryMode::standalone;
  int chain = -1;  // carrying chain, -1 for standalone
  int hops = 0;
  int bytes = 0;
  double wait = 0.0;  // delivery time minus epoch start, <= 2 * epoch_length
};

struct SimReport {
  std::vector<DeliveryRecord> records;
  int covered_instances = 0;
  int uncovered_instances = 0;
  std::int64_t candidate_deliveries = 0;
  std::int64_t fcfs_deliveries = 0;
  std::int64_t standalone_deliveries = 0;
  std::int64_t piggyback_hops = 0;
  std::int64_t standalone_hops = 0;
  std::int64_t total_byte_hops = 0;
  std::int64_t total_bytes = 0;
  double mean_piggyback_hops = 0.0;  // over piggybacked deliveries
  double mean_wait = 0.0;
  // Fraction of epochs whose predicted candidate chain arrived in-epoch,
  // among epochs that had a candidate (bounded_waiting mode only).
  std::int64_t prediction_hits = 0;
  std::int64_t prediction_total = 0;
  double success_probability = 0.0;
};

// One instance's piggybacking options: chains that traverse primary ->
// backup, with segment hop counts, sorted by (segment, chain id).
struct PiggyChain {
  int chain = -1;
  int seg = 0;
};

struct InstanceSim {
  int instance = -1;
  NodeId primary = -1;
  NodeId backup = -1;
  std::vector<PiggyChain> piggy;
};

InstanceSim make_instance_sim(const DeploymentPlan& plan,
                              const PrimaryInstance& inst,
                              const std::vector<ServiceChain>& chains);

struct Prediction {
  std::vector<int> predicted;        // chain ids expected to arrive in-epoch
  std::optional<int> candidate;      // shortest-segment predicted chain
};

// A chain is predicted for the epoch starting at t when its last arrival
// plus its mean gap lands before the epoch ends (overdue chains included).
// The candidate is the predicted piggybackable chain with the shortest
// segment, ties to the lower chain id.
Prediction predict_candidates(const InstanceSim& inst,
                              const std::vector<double>& last_arrival,
                              const std::vector<double>& mean_gap,
                              double epoch_start, double epoch_length);

// Runs the epoch protocol for every covered instance. bounded_waiting waits
// one epoch for the predicted candidate, falls back to the first
// piggybackable packet of the next epoch, then to a stand-alone packet at
// that epoch's end; fcfs rides the first piggybackable packet of each epoch
// or sends stand-alone at epoch end. Every epoch yields exactly one record
// per covered instance, attributed to the epoch that generated the update.
SimReport run_simulation(const DeploymentPlan& plan,
                         const std::vector<PrimaryInstance>& instances,
                         const std::vector<ServiceChain>& chains,
                         const ArrivalStream& arrivals,
                         const DistanceTable& dists, const SimParams& params);

}  // namespace pgb
