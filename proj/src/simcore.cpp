#include "pgb/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace pgb {

void SimParams::validate() const {
  if (epoch_length <= 0.0) {
    throw validation_error("epoch length must be positive");
  }
  if (num_epochs < 1) {
    throw validation_error("need at least one epoch");
  }
  cost.validate();
}

const char* to_string(DeliveryMode m) {
  switch (m) {
    case DeliveryMode::piggyback_candidate: return "piggyback_candidate";
    case DeliveryMode::piggyback_fcfs: return "piggyback_fcfs";
    case DeliveryMode::standalone: return "standalone";
  }
  return "standalone";
}

ArrivalStream generate_arrivals(const std::vector<ServiceChain>& chains,
                                double horizon, std::uint64_t seed) {
  if (horizon <= 0.0) {
    throw validation_error("arrival horizon must be positive");
  }
  ArrivalStream s;
  s.horizon = horizon;
  s.per_chain.resize(chains.size());
  for (const auto& c : chains) {
    if (c.id < 0 || c.id >= static_cast<int>(chains.size())) {
      throw validation_error("chain ids must be dense 0..N-1 for simulation");
    }
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(c.id)));
    std::exponential_distribution<double> gap(c.rate);
    auto& out = s.per_chain[c.id];
    double t = 0.0;
    for (;;) {
      double dt = gap(rng);
      while (dt <= 0.0) dt = gap(rng);  // keep timestamps strictly increasing
      t += dt;
      if (t >= horizon) break;
      out.push_back(t);
    }
  }
  return s;
}

InstanceSim make_instance_sim(const DeploymentPlan& plan,
                              const PrimaryInstance& inst,
                              const std::vector<ServiceChain>& chains) {
  InstanceSim s;
  s.instance = inst.id;
  s.primary = inst.server;
  auto v = plan.backup_server(inst.id);
  if (!v) {
    throw validation_error("instance " + std::to_string(inst.id) +
                           " has no backup server");
  }
  s.backup = *v;
  for (const auto& c : chains) {
    if (auto seg = c.segment_length(s.primary, s.backup)) {
      s.piggy.push_back({c.id, *seg});
    }
  }
  std::sort(s.piggy.begin(), s.piggy.end(), [](const auto& a, const auto& b) {
    return a.seg != b.seg ? a.seg < b.seg : a.chain < b.chain;
  });
  return s;
}

Prediction predict_candidates(const InstanceSim& inst,
                              const std::vector<double>& last_arrival,
                              const std::vector<double>& mean_gap,
                              double epoch_start, double epoch_length) {
  Prediction p;
  const double epoch_end = epoch_start + epoch_length;
  for (const auto& pc : inst.piggy) {
    if (last_arrival.at(pc.chain) + mean_gap.at(pc.chain) < epoch_end) {
      p.predicted.push_back(pc.chain);
      if (!p.candidate) p.candidate = pc.chain;  // piggy is (seg,id)-sorted
    }
  }
  return p;
}

namespace {

// Per-chain epoch digest: last arrival strictly before each epoch start and
// first arrival inside each epoch, for num_epochs+1 epochs (the extra epoch
// serves deferred deliveries of the final one).
struct ChainEpochs {
  std::vector<double> last_before;
  std::vector<double> first_in;  // NaN when the epoch has no arrival
};

ChainEpochs digest_chain(const std::vector<double>& arr, double mean_gap,
                         double epoch_length, int epochs) {
  ChainEpochs d;
  d.last_before.assign(epochs, -mean_gap);
  d.first_in.assign(epochs, std::nan(""));
  std::size_t i = 0;
  for (int e = 0; e < epochs; ++e) {
    const double start = e * epoch_length;
    const double end = start + epoch_length;
    // i indexes the first arrival >= start.
    d.last_before[e] = i > 0 ? arr[i - 1] : -mean_gap;
    if (i < arr.size() && arr[i] < end) d.first_in[e] = arr[i];
    while (i < arr.size() && arr[i] < end) ++i;
  }
  return d;
}

}  // namespace

SimReport run_simulation(const DeploymentPlan& plan,
                         const std::vector<PrimaryInstance>& instances,
                         const std::vector<ServiceChain>& chains,
                         const ArrivalStream& arrivals,
                         const DistanceTable& dists, const SimParams& params) {
  params.validate();
  const double T = params.epoch_length;
  const int E = params.num_epochs;
  if (arrivals.horizon + 1e-9 < E * T) {
    throw validation_error("arrival stream horizon shorter than the simulation");
  }
  if (arrivals.per_chain.size() != chains.size()) {
    throw validation_error("arrival stream does not match the chain set");
  }

  std::vector<double> mean_gap(chains.size(), 0.0);
  for (const auto& c : chains) mean_gap.at(c.id) = 1.0 / c.rate;

  std::vector<ChainEpochs> digest(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    digest[c] = digest_chain(arrivals.per_chain[c], mean_gap[c], T, E + 1);
  }

  SimReport r;
  std::vector<InstanceSim> sims;
  for (const auto& inst : instances) {
    if (!plan.backup_server(inst.id)) {
      ++r.uncovered_instances;
      continue;
    }
    sims.push_back(make_instance_sim(plan, inst, chains));
    ++r.covered_instances;
  }
  r.records.reserve(static_cast<std::size_t>(r.covered_instances) * E);

  std::vector<double> last_arrival(chains.size(), 0.0);
  for (int e = 0; e < E; ++e) {
    const double start = e * T;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      last_arrival[c] = digest[c].last_before[e];
    }
    for (const auto& sim : sims) {
      DeliveryRecord rec;
      rec.instance = sim.instance;
      rec.epoch = e;
      const int lmin = dists.dist(sim.primary, sim.backup);

      auto first_in = [&](int chain, int epoch) {
        return digest[chain].first_in[epoch];
      };
      auto fcfs_pick = [&](int epoch) -> const PiggyChain* {
        const PiggyChain* best = nullptr;
        double best_t = 0.0;
        for (const auto& pc : sim.piggy) {
          const double t = first_in(pc.chain, epoch);
          if (std::isnan(t)) continue;
          if (best == nullptr || t < best_t) {
            best = &pc;
            best_t = t;
          }
        }
        return best;
      };

      if (params.mode == SelectionMode::bounded_waiting) {
        Prediction p = predict_candidates(sim, last_arrival, mean_gap, start, T);
        bool delivered = false;
        if (p.candidate) {
          ++r.prediction_total;
          const double t = first_in(*p.candidate, e);
          if (!std::isnan(t)) {
            ++r.prediction_hits;
            const auto& pc = *std::find_if(
                sim.piggy.begin(), sim.piggy.end(),
                [&](const PiggyChain& x) { return x.chain == *p.candidate; });
            rec.mode = DeliveryMode::piggyback_candidate;
            rec.chain = pc.chain;
            rec.hops = pc.seg;
            rec.bytes = params.cost.piggyback_bytes;
            rec.wait = t - start;
            delivered = true;
          }
        }
        if (!delivered) {
          // Missed (or never had) a candidate: first piggybackable packet of
          // the next epoch, stand-alone at its end otherwise.
          if (const PiggyChain* pc = fcfs_pick(e + 1)) {
            rec.mode = DeliveryMode::piggyback_fcfs;
            rec.chain = pc->chain;
            rec.hops = pc->seg;
            rec.bytes = params.cost.piggyback_bytes;
            rec.wait = first_in(pc->chain, e + 1) - start;
          } else {
            rec.mode = DeliveryMode::standalone;
            rec.chain = -1;
            rec.hops = lmin;
            rec.bytes = params.cost.standalone_bytes;
            rec.wait = 2.0 * T;
          }
        }
      } else {  // fcfs
        if (const PiggyChain* pc = fcfs_pick(e)) {
          rec.mode = DeliveryMode::piggyback_fcfs;
          rec.chain = pc->chain;
          rec.hops = pc->seg;
          rec.bytes = params.cost.piggyback_bytes;
          rec.wait = first_in(pc->chain, e) - start;
        } else {
          rec.mode = DeliveryMode::standalone;
          rec.chain = -1;
          rec.hops = lmin;
          rec.bytes = params.cost.standalone_bytes;
          rec.wait = T;
        }
      }
      r.records.push_back(rec);
    }
  }

  double wait_sum = 0.0;
  for (const auto& rec : r.records) {
    wait_sum += rec.wait;
    r.total_bytes += rec.bytes;
    r.total_byte_hops += static_cast<std::int64_t>(rec.bytes) * rec.hops;
    switch (rec.mode) {
      case DeliveryMode::piggyback_candidate:
        ++r.candidate_deliveries;
        r.piggyback_hops += rec.hops;
        break;
      case DeliveryMode::piggyback_fcfs:
        ++r.fcfs_deliveries;
        r.piggyback_hops += rec.hops;
        break;
      case DeliveryMode::standalone:
        ++r.standalone_deliveries;
        r.standalone_hops += rec.hops;
        break;
    }
  }
  const std::int64_t piggybacked = r.candidate_deliveries + r.fcfs_deliveries;
  r.mean_piggyback_hops =
      piggybacked > 0 ? static_cast<double>(r.piggyback_hops) / piggybacked : 0.0;
  r.mean_wait =
      r.records.empty() ? 0.0 : wait_sum / static_cast<double>(r.records.size());
  r.success_probability =
      r.prediction_total > 0
          ? static_cast<double>(r.prediction_hits) / r.prediction_total
          : 0.0;
  return r;
}

}  // namespace pgb
