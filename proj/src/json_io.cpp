#include "pgb/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pgb {

json graph_to_json(const NetworkGraph& g) {
  json nodes = json::array();
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    nodes.push_back({{"id", v},
                     {"kind", g.kind(v) == NodeKind::host ? "host" : "server"},
                     {"primary_cap", g.primary_capacity(v)},
                     {"backup_cap", g.backup_capacity(v)}});
  }
  json edges = json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back({u, v});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

NetworkGraph graph_from_json(const json& j) {
  NetworkGraph g;
  const auto& nodes = j.at("nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.at("id").get<int>() != static_cast<int>(i)) {
      throw validation_error("graph nodes must be listed with dense ids");
    }
    const std::string kind = n.at("kind").get<std::string>();
    if (kind != "host" && kind != "server") {
      throw validation_error("unknown node kind: " + kind);
    }
    g.add_node(kind == "host" ? NodeKind::host : NodeKind::server,
               n.at("primary_cap").get<int>(), n.at("backup_cap").get<int>());
  }
  for (const auto& e : j.at("edges")) {
    g.add_edge(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
  }
  return g;
}

json instances_to_json(const std::vector<PrimaryInstance>& instances) {
  json arr = json::array();
  for (const auto& inst : instances) {
    arr.push_back(
        {{"id", inst.id}, {"server", inst.server}, {"ftype", inst.ftype}});
  }
  return arr;
}

std::vector<PrimaryInstance> instances_from_json(const json& j) {
  std::vector<PrimaryInstance> out;
  for (const auto& e : j) {
    out.push_back({e.at("id").get<int>(), e.at("server").get<NodeId>(),
                   e.at("ftype").get<int>()});
  }
  return out;
}

json chains_to_json(const std::vector<ServiceChain>& chains) {
  json arr = json::array();
  for (const auto& c : chains) {
    arr.push_back({{"id", c.id},
                   {"src", c.source},
                   {"dst", c.dest},
                   {"requested", c.requested},
                   {"assigned", c.assigned},
                   {"route", c.route},
                   {"rate", c.rate}});
  }
  return {{"chains", std::move(arr)}};
}

std::vector<ServiceChain> chains_from_json(const json& j) {
  std::vector<ServiceChain> out;
  for (const auto& e : j.at("chains")) {
    ServiceChain c;
    c.id = e.at("id").get<int>();
    c.source = e.at("src").get<NodeId>();
    c.dest = e.at("dst").get<NodeId>();
    c.requested = e.at("requested").get<std::vector<int>>();
    c.assigned = e.at("assigned").get<std::vector<int>>();
    c.route = e.at("route").get<std::vector<NodeId>>();
    c.rate = e.at("rate").get<double>();
    c.finalize();
    out.push_back(std::move(c));
  }
  return out;
}

json plan_to_json(const DeploymentPlan& plan) {
  json installs = json::array();
  for (int f = 0; f < plan.num_types(); ++f) {
    for (NodeId v = 0; v < plan.num_nodes(); ++v) {
      if (plan.installed(f, v)) installs.push_back({{"ftype", f}, {"server", v}});
    }
  }
  json assignments = json::array();
  json provenance = json::object();
  for (int n = 0; n < plan.num_instances(); ++n) {
    if (auto v = plan.backup_server(n)) {
      assignments.push_back({{"instance", n}, {"server", *v}});
    }
    provenance[std::to_string(n)] = to_string(plan.provenance(n));
  }
  return {{"I", std::move(installs)},
          {"J", std::move(assignments)},
          {"provenance", std::move(provenance)},
          {"k_limit", plan.assoc_limit()}};
}

DeploymentPlan plan_from_json(const json& j, const NetworkGraph& g,
                              const std::vector<PrimaryInstance>& instances) {
  int num_types = 1;
  for (const auto& inst : instances) num_types = std::max(num_types, inst.ftype + 1);
  for (const auto& e : j.at("I")) {
    num_types = std::max(num_types, e.at("ftype").get<int>() + 1);
  }
  DeploymentPlan plan(num_types, g.num_nodes(),
                      static_cast<int>(instances.size()),
                      j.at("k_limit").get<int>());
  for (const auto& e : j.at("I")) {
    plan.install(e.at("ftype").get<int>(), e.at("server").get<NodeId>());
  }
  const auto& prov = j.at("provenance");
  for (const auto& e : j.at("J")) {
    const int id = e.at("instance").get<int>();
    if (id < 0 || id >= static_cast<int>(instances.size()) ||
        instances[id].id != id) {
      throw validation_error("plan references unknown instance " +
                             std::to_string(id));
    }
    const std::string tag = prov.at(std::to_string(id)).get<std::string>();
    Provenance p;
    if (tag == "piggyback") {
      p = Provenance::piggyback;
    } else if (tag == "standalone") {
      p = Provenance::standalone;
    } else {
      throw validation_error("assigned instance " + std::to_string(id) +
                             " carries tag '" + tag + "'");
    }
    plan.associate(instances[id], e.at("server").get<NodeId>(), p);
  }
  return plan;
}

json cost_report_to_json(const CostReport& r) {
  return {{"total_cost", r.total_cost},
          {"covered", r.covered},
          {"piggybackable", r.piggybackable},
          {"uncovered", r.uncovered},
          {"piggyback_ratio", r.piggyback_ratio},
          {"piggyback_hops", r.piggyback_hops},
          {"standalone_hops", r.standalone_hops},
          {"total_hops", r.total_hops},
          {"total_bytes", r.total_bytes},
          {"total_byte_hops", r.total_byte_hops},
          {"per_instance",
           {{"piggyback_cost", r.piggyback_cost},
            {"standalone_cost", r.standalone_cost},
            {"cost", r.cost}}}};
}

json sim_report_to_json(const SimReport& r) {
  return {{"covered_instances", r.covered_instances},
          {"uncovered_instances", r.uncovered_instances},
          {"candidate_deliveries", r.candidate_deliveries},
          {"fcfs_deliveries", r.fcfs_deliveries},
          {"standalone_deliveries", r.standalone_deliveries},
          {"piggyback_hops", r.piggyback_hops},
          {"standalone_hops", r.standalone_hops},
          {"total_byte_hops", r.total_byte_hops},
          {"total_bytes", r.total_bytes},
          {"mean_piggyback_hops", r.mean_piggyback_hops},
          {"mean_wait", r.mean_wait},
          {"prediction_hits", r.prediction_hits},
          {"prediction_total", r.prediction_total},
          {"success_probability", r.success_probability}};
}

std::string sim_records_to_csv(const SimReport& r) {
  std::ostringstream os;
  os << "instance,epoch,mode,chain,hops,bytes,wait\n";
  for (const auto& rec : r.records) {
    os << rec.instance << ',' << rec.epoch << ',' << to_string(rec.mode) << ','
       << rec.chain << ',' << rec.hops << ',' << rec.bytes << ',' << rec.wait
       << '\n';
  }
  return os.str();
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw validation_error("cannot open file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw validation_error("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw validation_error("cannot write file: " + path);
  }
  out << text;
}

}  // namespace pgb
