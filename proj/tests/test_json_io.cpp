#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <string>
#include <vector>

#include "pgb/json_io.hpp"

using namespace pgb;

namespace {

NetworkGraph sample_graph() {
  NetworkGraph g;
  g.add_node(NodeKind::server, 3, 2);
  g.add_node(NodeKind::server, 1, 0);
  g.add_node(NodeKind::host);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  return g;
}

ServiceChain sample_chain(int id, std::vector<NodeId> route) {
  ServiceChain c;
  c.id = id;
  c.source = route.front();
  c.dest = route.back();
  c.rate = 1.5;
  c.requested = {0, 1};
  c.assigned = {0, 1};
  c.route = std::move(route);
  c.finalize();
  return c;
}

}  // namespace

TEST_CASE("graphs survive the JSON round trip") {
  NetworkGraph g = sample_graph();
  json j = graph_to_json(g);
  NetworkGraph back = graph_from_json(j);
  CHECK_EQ(back.num_nodes(), 3);
  CHECK_EQ(back.kind(2), NodeKind::host);
  CHECK_EQ(back.primary_capacity(0), 3);
  CHECK_EQ(back.backup_capacity(0), 2);
  CHECK_EQ(back.backup_capacity(1), 0);
  CHECK_EQ(back.edges(), g.edges());
  CHECK_EQ(graph_to_json(back), j);

  json sparse = j;
  sparse["nodes"][1]["id"] = 5;
  CHECK_THROWS_AS(graph_from_json(sparse), validation_error);
  json weird = j;
  weird["nodes"][0]["kind"] = "switchboard";
  CHECK_THROWS_AS(graph_from_json(weird), validation_error);
}

TEST_CASE("instances and chains survive the JSON round trip") {
  std::vector<PrimaryInstance> instances{{0, 0, 0}, {1, 1, 1}};
  auto insts_back = instances_from_json(instances_to_json(instances));
  REQUIRE_EQ(insts_back.size(), 2);
  CHECK_EQ(insts_back[1].server, 1);
  CHECK_EQ(insts_back[1].ftype, 1);

  std::vector<ServiceChain> chains{sample_chain(0, {2, 1, 0, 1})};
  json j = chains_to_json(chains);
  auto back = chains_from_json(j);
  REQUIRE_EQ(back.size(), 1);
  CHECK_EQ(back[0].route, chains[0].route);
  CHECK_EQ(back[0].rate, 1.5);
  CHECK_EQ(back[0].requested, std::vector<int>{0, 1});
  // finalize() ran on load: segment queries work immediately.
  CHECK_EQ(back[0].segment_length(2, 0), std::optional<int>{2});
  CHECK(back[0].traverses(1, 0));
}

TEST_CASE("plans round trip with installs, assignments and tags") {
  NetworkGraph g = sample_graph();
  std::vector<PrimaryInstance> instances{{0, 0, 0}, {1, 1, 1}, {2, 0, 1}};
  DeploymentPlan plan(2, 3, 3, 2);
  plan.install(0, 1);
  plan.install(1, 0);
  plan.associate(instances[0], 1, Provenance::piggyback);
  plan.associate(instances[1], 0, Provenance::standalone);
  plan.mark_uncovered(2);

  json j = plan_to_json(plan);
  CHECK_EQ(j.at("k_limit"), 2);
  DeploymentPlan back = plan_from_json(j, g, instances);
  CHECK(back.installed(0, 1));
  CHECK(back.installed(1, 0));
  CHECK_EQ(back.backup_server(0), std::optional<NodeId>{1});
  CHECK_EQ(back.backup_server(1), std::optional<NodeId>{0});
  CHECK(!back.backup_server(2).has_value());
  CHECK_EQ(back.provenance(0), Provenance::piggyback);
  CHECK_EQ(back.provenance(1), Provenance::standalone);
  CHECK_EQ(back.provenance(2), Provenance::uncovered);
  CHECK_EQ(plan_to_json(back), j);

  json bad_tag = j;
  bad_tag["provenance"]["0"] = "uncovered";
  CHECK_THROWS_AS(plan_from_json(bad_tag, g, instances), validation_error);
  json bad_ref = j;
  bad_ref["J"][0]["instance"] = 9;
  CHECK_THROWS_AS(plan_from_json(bad_ref, g, instances), validation_error);
}

TEST_CASE("report serializers expose every headline number") {
  CostReport cr;
  cr.total_cost = 12.5;
  cr.covered = 3;
  cr.piggybackable = 2;
  cr.piggyback_ratio = 2.0 / 3.0;
  cr.cost = {1.0, 2.0, 9.5};
  json cj = cost_report_to_json(cr);
  CHECK_EQ(cj.at("total_cost"), 12.5);
  CHECK_EQ(cj.at("covered"), 3);
  CHECK_EQ(cj.at("per_instance").at("cost").size(), 3);

  SimReport sr;
  sr.covered_instances = 2;
  sr.candidate_deliveries = 5;
  sr.success_probability = 0.8;
  sr.records.push_back({0, 1, DeliveryMode::piggyback_fcfs, 3, 2, 20, 0.25});
  sr.records.push_back({1, 1, DeliveryMode::standalone, -1, 4, 60, 1.0});
  json sj = sim_report_to_json(sr);
  CHECK_EQ(sj.at("success_probability"), 0.8);
  CHECK_EQ(sj.at("candidate_deliveries"), 5);

  std::string csv = sim_records_to_csv(sr);
  CHECK_EQ(csv.substr(0, csv.find('\n')),
           "instance,epoch,mode,chain,hops,bytes,wait");
  CHECK(csv.find("0,1,piggyback_fcfs,3,2,20,0.25") != std::string::npos);
  CHECK(csv.find("1,1,standalone,-1,4,60,1") != std::string::npos);
}

TEST_CASE("file helpers write, read and reject garbage") {
  const std::string path = "pgb_io_test.json";
  save_text_file(path, "{\"answer\": 42}");
  json j = load_json_file(path);
  CHECK_EQ(j.at("answer"), 42);

  save_text_file(path, "{not json");
  CHECK_THROWS_AS(load_json_file(path), validation_error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_json_file(path), validation_error);
  CHECK_THROWS_AS(save_text_file("no_such_dir/x/y.json", "{}"),
                  validation_error);
}
