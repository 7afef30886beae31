#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pgb/netgraph.hpp"
#include "pgb/planner.hpp"
#include "pgb/simcore.hpp"
#include "pgb/workload.hpp"

using namespace pgb;

namespace {

NetworkGraph line_graph(int n) {
  NetworkGraph g;
  for (int i = 0; i < n; ++i) g.add_node(NodeKind::server, 4, 4);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

ServiceChain chain_with_route(int id, std::vector<NodeId> route, double rate = 1.0) {
  ServiceChain c;
  c.id = id;
  c.source = route.front();
  c.dest = route.back();
  c.rate = rate;
  c.route = std::move(route);
  c.finalize();
  return c;
}

// One instance on a 4-node line whose single chain covers primary -> backup
// with a 2-hop segment; arrivals are injected by hand.
struct LineSim {
  NetworkGraph g = line_graph(4);
  DistanceTable d = all_pairs_shortest(g);
  std::vector<PrimaryInstance> instances{{0, 1, 0}};
  std::vector<ServiceChain> chains{chain_with_route(0, {0, 1, 2, 3}, 1.0)};
  DeploymentPlan plan{1, 4, 1, 2};
  LineSim() {
    plan.install(0, 3);
    plan.associate(instances[0], 3, Provenance::piggyback);
  }
};

}  // namespace

TEST_CASE("sim params validate their fields") {
  CHECK_NOTHROW(SimParams{}.validate());
  SimParams bad;
  bad.epoch_length = 0.0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
  bad = SimParams{};
  bad.num_epochs = 0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
  bad = SimParams{};
  bad.cost.piggyback_bytes = 0;
  CHECK_THROWS_AS(bad.validate(), validation_error);
}

TEST_CASE("poisson arrivals have the right density and shape") {
  std::vector<ServiceChain> chains{chain_with_route(0, {0, 1}, 1.0),
                                   chain_with_route(1, {1, 0}, 2.0)};
  const double horizon = 10000.0;
  ArrivalStream s = generate_arrivals(chains, horizon, 42);
  REQUIRE_EQ(s.per_chain.size(), 2);

  for (int c = 0; c < 2; ++c) {
    const auto& a = s.per_chain[c];
    REQUIRE(!a.empty());
    CHECK(a.front() > 0.0);
    CHECK(a.back() < horizon);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
  }
  // Counts concentrate hard around rate * horizon at this scale.
  CHECK(std::abs(static_cast<double>(s.per_chain[0].size()) - 10000.0) < 400.0);
  CHECK(std::abs(static_cast<double>(s.per_chain[1].size()) - 20000.0) < 600.0);

  double gap_sum = 0.0;
  const auto& a = s.per_chain[0];
  for (std::size_t i = 1; i < a.size(); ++i) gap_sum += a[i] - a[i - 1];
  CHECK_EQ(gap_sum / static_cast<double>(a.size() - 1),
           doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("arrival substreams depend on chain id, not list order") {
  std::vector<ServiceChain> fwd{chain_with_route(0, {0, 1}, 0.7),
                                chain_with_route(1, {1, 0}, 1.3),
                                chain_with_route(2, {0, 1}, 2.1)};
  std::vector<ServiceChain> rev(fwd.rbegin(), fwd.rend());
  ArrivalStream a = generate_arrivals(fwd, 500.0, 7);
  ArrivalStream b = generate_arrivals(rev, 500.0, 7);
  for (int c = 0; c < 3; ++c) CHECK_EQ(a.per_chain[c], b.per_chain[c]);

  ArrivalStream c2 = generate_arrivals(fwd, 500.0, 7);
  for (int c = 0; c < 3; ++c) CHECK_EQ(a.per_chain[c], c2.per_chain[c]);
  ArrivalStream other = generate_arrivals(fwd, 500.0, 8);
  CHECK(a.per_chain[0] != other.per_chain[0]);
}

TEST_CASE("arrival generation rejects bad input") {
  std::vector<ServiceChain> chains{chain_with_route(0, {0, 1}, 1.0)};
  CHECK_THROWS_AS(generate_arrivals(chains, 0.0, 1), validation_error);
  std::vector<ServiceChain> sparse{chain_with_route(3, {0, 1}, 1.0)};
  CHECK_THROWS_AS(generate_arrivals(sparse, 10.0, 1), validation_error);
}

TEST_CASE("instance sim collects carrying chains sorted by segment") {
  LineSim fix;
  std::vector<ServiceChain> chains{
      chain_with_route(0, {0, 1, 2, 3}, 1.0),  // seg 2
      chain_with_route(1, {1, 2, 3}, 1.0),     // seg 2, higher id
      chain_with_route(2, {2, 1, 2, 3}, 1.0),  // seg 2 via revisit
      chain_with_route(3, {3, 2, 1, 0}, 1.0),  // wrong direction
  };
  InstanceSim s = make_instance_sim(fix.plan, fix.instances[0], chains);
  CHECK_EQ(s.primary, 1);
  CHECK_EQ(s.backup, 3);
  REQUIRE_EQ(s.piggy.size(), 3);
  CHECK_EQ(s.piggy[0].chain, 0);
  CHECK_EQ(s.piggy[1].chain, 1);
  CHECK_EQ(s.piggy[2].chain, 2);
  for (const auto& pc : s.piggy) CHECK_EQ(pc.seg, 2);

  DeploymentPlan bare(1, 4, 1, 2);
  bare.mark_uncovered(0);
  CHECK_THROWS_AS(make_instance_sim(bare, fix.instances[0], chains),
                  validation_error);
}

TEST_CASE("prediction keeps due chains and picks the shortest segment") {
  InstanceSim s;
  s.instance = 0;
  s.primary = 0;
  s.backup = 1;
  // Sorted by (segment, id): ids 0,4,7,1,2 with segments 1,2,3,4,5.
  s.piggy = {{0, 1}, {4, 2}, {7, 3}, {1, 4}, {2, 5}};

  std::vector<double> last(8, 100.0), gap(8, 100.0);
  last[0] = 0.2; gap[0] = 2.0;  // 2.2 >= 1.0: not due this epoch
  last[1] = 0.1; gap[1] = 0.5;  // 0.6 < 1.0: due
  last[2] = -0.5; gap[2] = 1.2; // 0.7 < 1.0: due
  last[4] = 0.3; gap[4] = 0.4;  // 0.7 < 1.0: due
  last[7] = 0.0; gap[7] = 0.9;  // 0.9 < 1.0: due

  Prediction p = predict_candidates(s, last, gap, 0.0, 1.0);
  CHECK_EQ(p.predicted, std::vector<int>{4, 7, 1, 2});
  REQUIRE(p.candidate.has_value());
  // Chain 0 has the shortest segment but is not due; chain 4 wins.
  CHECK_EQ(*p.candidate, 4);

  // An overdue chain (expected before the epoch started) still counts.
  last[4] = -3.0; gap[4] = 0.4;
  p = predict_candidates(s, last, gap, 0.0, 1.0);
  CHECK_EQ(*p.candidate, 4);

  // Nothing due: no candidate at all.
  std::vector<double> never(8, 100.0);
  p = predict_candidates(s, never, never, 0.0, 1.0);
  CHECK(p.predicted.empty());
  CHECK(!p.candidate.has_value());
}

TEST_CASE("bounded waiting walks hit, deferred pickup and give-up states") {
  LineSim fix;
  ArrivalStream arr;
  arr.horizon = 4.0;
  arr.per_chain = {{0.5, 2.5}};  // epoch 0 hit, epoch 1 empty, epoch 2 hit
  SimParams params;
  params.epoch_length = 1.0;
  params.num_epochs = 3;
  params.mode = SelectionMode::bounded_waiting;

  SimReport r = run_simulation(fix.plan, fix.instances, fix.chains, arr, fix.d,
                               params);
  CHECK_EQ(r.covered_instances, 1);
  REQUIRE_EQ(r.records.size(), 3);

  // Epoch 0: the candidate is predicted (fresh stream counts as due) and its
  // packet arrives at 0.5.
  CHECK_EQ(r.records[0].mode, DeliveryMode::piggyback_candidate);
  CHECK_EQ(r.records[0].chain, 0);
  CHECK_EQ(r.records[0].hops, 2);
  CHECK_EQ(r.records[0].wait, doctest::Approx(0.5));

  // Epoch 1: predicted (0.5 + 1.0 < 2.0) but no packet shows; the epoch-2
  // arrival at 2.5 carries it with a 1.5 wait from the epoch-1 start.
  CHECK_EQ(r.records[1].mode, DeliveryMode::piggyback_fcfs);
  CHECK_EQ(r.records[1].wait, doctest::Approx(1.5));

  // Epoch 2: overdue chain still predicted, packet at 2.5 hits.
  CHECK_EQ(r.records[2].mode, DeliveryMode::piggyback_candidate);
  CHECK_EQ(r.records[2].wait, doctest::Approx(0.5));

  CHECK_EQ(r.prediction_total, 3);
  CHECK_EQ(r.prediction_hits, 2);
  CHECK_EQ(r.success_probability, doctest::Approx(2.0 / 3.0));
  CHECK_EQ(r.candidate_deliveries, 2);
  CHECK_EQ(r.fcfs_deliveries, 1);
  CHECK_EQ(r.standalone_deliveries, 0);
  CHECK_EQ(r.piggyback_hops, 6);
  CHECK_EQ(r.mean_piggyback_hops, doctest::Approx(2.0));
}

TEST_CASE("fcfs mode rides the first in-epoch packet or sends its own") {
  LineSim fix;
  ArrivalStream arr;
  arr.horizon = 4.0;
  arr.per_chain = {{0.5, 2.5}};
  SimParams params;
  params.epoch_length = 1.0;
  params.num_epochs = 3;
  params.mode = SelectionMode::fcfs;

  SimReport r = run_simulation(fix.plan, fix.instances, fix.chains, arr, fix.d,
                               params);
  REQUIRE_EQ(r.records.size(), 3);
  CHECK_EQ(r.records[0].mode, DeliveryMode::piggyback_fcfs);
  CHECK_EQ(r.records[0].wait, doctest::Approx(0.5));
  CHECK_EQ(r.records[1].mode, DeliveryMode::standalone);
  CHECK_EQ(r.records[1].wait, doctest::Approx(1.0));  // gives up at epoch end
  CHECK_EQ(r.records[1].hops, 2);                     // shortest path 1 -> 3
  CHECK_EQ(r.records[1].bytes, 60);
  CHECK_EQ(r.records[2].mode, DeliveryMode::piggyback_fcfs);
  CHECK_EQ(r.records[2].wait, doctest::Approx(0.5));
  // fcfs never predicts, so success probability is undefined-as-zero.
  CHECK_EQ(r.prediction_total, 0);
  CHECK_EQ(r.success_probability, 0.0);
}

TEST_CASE("a silent network degrades to stand-alone updates at two epochs") {
  LineSim fix;
  ArrivalStream arr;
  arr.horizon = 3.0;
  arr.per_chain = {{}};
  SimParams params;
  params.epoch_length = 1.0;
  params.num_epochs = 2;

  SimReport r = run_simulation(fix.plan, fix.instances, fix.chains, arr, fix.d,
                               params);
  REQUIRE_EQ(r.records.size(), 2);
  for (const auto& rec : r.records) {
    CHECK_EQ(rec.mode, DeliveryMode::standalone);
    CHECK_EQ(rec.wait, doctest::Approx(2.0));
    CHECK_EQ(rec.hops, 2);
    CHECK_EQ(rec.chain, -1);
  }
  // The fresh stream was predicted both epochs and missed both times.
  CHECK_EQ(r.prediction_total, 2);
  CHECK_EQ(r.prediction_hits, 0);
}

TEST_CASE("run_simulation validates the stream against its inputs") {
  LineSim fix;
  SimParams params;
  params.epoch_length = 1.0;
  params.num_epochs = 5;

  ArrivalStream shortstream;
  shortstream.horizon = 3.0;
  shortstream.per_chain = {{}};
  CHECK_THROWS_AS(run_simulation(fix.plan, fix.instances, fix.chains,
                                 shortstream, fix.d, params),
                  validation_error);

  ArrivalStream mismatched;
  mismatched.horizon = 10.0;
  mismatched.per_chain = {{}, {}};
  CHECK_THROWS_AS(run_simulation(fix.plan, fix.instances, fix.chains,
                                 mismatched, fix.d, params),
                  validation_error);
}

TEST_CASE("simulation conserves records and respects wait bounds") {
  NetworkGraph g = build_fat_tree(4);
  g.set_uniform_capacities(8, 3);
  DistanceTable d = all_pairs_shortest(g);
  std::mt19937_64 rng(99);
  auto instances = place_primary_instances(g, 30, rng);
  auto chains = generate_chains(g, instances, 40, {1, 20}, d, 1.0, rng);
  DeploymentPlan plan = plan_piggybackup(g, d, instances, chains, 5);

  SimParams params;
  params.epoch_length = 1.0;
  params.num_epochs = 50;
  const double horizon = (params.num_epochs + 1) * params.epoch_length;

  for (SelectionMode mode : {SelectionMode::bounded_waiting, SelectionMode::fcfs}) {
    params.mode = mode;
    ArrivalStream arr = generate_arrivals(chains, horizon, 2718);
    SimReport r = run_simulation(plan, instances, chains, arr, d, params);

    CHECK_EQ(r.covered_instances + r.uncovered_instances,
             static_cast<int>(instances.size()));
    CHECK_EQ(r.records.size(),
             static_cast<std::size_t>(r.covered_instances) * params.num_epochs);
    CHECK_EQ(r.candidate_deliveries + r.fcfs_deliveries + r.standalone_deliveries,
             static_cast<std::int64_t>(r.records.size()));
    CHECK(r.prediction_hits <= r.prediction_total);

    std::int64_t pg_hops = 0, sa_hops = 0, bytes = 0, byte_hops = 0;
    const double cap =
        (mode == SelectionMode::bounded_waiting ? 2.0 : 1.0) * params.epoch_length;
    for (const auto& rec : r.records) {
      CHECK(rec.wait >= 0.0);
      CHECK(rec.wait <= cap + 1e-9);
      if (rec.mode == DeliveryMode::standalone) {
        CHECK_EQ(rec.chain, -1);
        sa_hops += rec.hops;
      } else {
        CHECK(rec.chain >= 0);
        pg_hops += rec.hops;
      }
      bytes += rec.bytes;
      byte_hops += static_cast<std::int64_t>(rec.bytes) * rec.hops;
    }
    CHECK_EQ(pg_hops, r.piggyback_hops);
    CHECK_EQ(sa_hops, r.standalone_hops);
    CHECK_EQ(bytes, r.total_bytes);
    CHECK_EQ(byte_hops, r.total_byte_hops);
    if (mode == SelectionMode::fcfs) CHECK_EQ(r.prediction_total, 0);
  }
}

TEST_CASE("simulation replays identically from the same seed") {
  NetworkGraph g = build_fat_tree(2);
  g.set_uniform_capacities(6, 3);
  DistanceTable d = all_pairs_shortest(g);
  std::mt19937_64 rng(5);
  auto instances = place_primary_instances(g, 8, rng);
  auto chains = generate_chains(g, instances, 12, {1, 8}, d, 1.0, rng);
  DeploymentPlan plan = plan_piggybackup(g, d, instances, chains, 5);

  SimParams params;
  params.epoch_length = 1.0;
  params.num_epochs = 100;
  const double horizon = (params.num_epochs + 1) * params.epoch_length;

  ArrivalStream a1 = generate_arrivals(chains, horizon, 13);
  ArrivalStream a2 = generate_arrivals(chains, horizon, 13);
  SimReport r1 = run_simulation(plan, instances, chains, a1, d, params);
  SimReport r2 = run_simulation(plan, instances, chains, a2, d, params);

  REQUIRE_EQ(r1.records.size(), r2.records.size());
  for (std::size_t i = 0; i < r1.records.size(); ++i) {
    CHECK_EQ(r1.records[i].instance, r2.records[i].instance);
    CHECK_EQ(r1.records[i].epoch, r2.records[i].epoch);
    CHECK_EQ(r1.records[i].mode, r2.records[i].mode);
    CHECK_EQ(r1.records[i].chain, r2.records[i].chain);
    CHECK_EQ(r1.records[i].hops, r2.records[i].hops);
    CHECK_EQ(r1.records[i].wait, r2.records[i].wait);
  }
  CHECK_EQ(r1.success_probability, r2.success_probability);
  CHECK_EQ(r1.total_byte_hops, r2.total_byte_hops);
}

TEST_CASE("uncovered instances are counted but produce no records") {
  NetworkGraph g = line_graph(3);
  DistanceTable d = all_pairs_shortest(g);
  std::vector<PrimaryInstance> instances{{0, 0, 0}, {1, 1, 1}};
  std::vector<ServiceChain> chains{chain_with_route(0, {0, 1, 2}, 1.0)};
  DeploymentPlan plan(2, 3, 2, 2);
  plan.install(0, 1);
  plan.associate(instances[0], 1, Provenance::piggyback);
  plan.mark_uncovered(1);

  SimParams params;
  params.epoch_length = 1.0;
  params.num_epochs = 4;
  ArrivalStream arr = generate_arrivals(chains, 5.0, 3);
  SimReport r = run_simulation(plan, instances, chains, arr, d, params);
  CHECK_EQ(r.covered_instances, 1);
  CHECK_EQ(r.uncovered_instances, 1);
  CHECK_EQ(r.records.size(), 4);
  for (const auto& rec : r.records) CHECK_EQ(rec.instance, 0);
}
