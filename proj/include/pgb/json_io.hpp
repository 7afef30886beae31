#pragma once

#include <string>

#include "json.hpp"
#include "pgb/costmodel.hpp"
#include "pgb/netgraph.hpp"
#include "pgb/planner.hpp"
#include "pgb/simcore.hpp"
#include "pgb/workload.hpp"

namespace pgb {

using json = nlohmann::json;

json graph_to_json(const NetworkGraph& g);
NetworkGraph graph_from_json(const json& j);

json instances_to_json(const std::vector<PrimaryInstance>& instances);
std::vector<PrimaryInstance> instances_from_json(const json& j);

json chains_to_json(const std::vector<ServiceChain>& chains);
std::vector<ServiceChain> chains_from_json(const json& j);

json plan_to_json(const DeploymentPlan& plan);
DeploymentPlan plan_from_json(const json& j, const NetworkGraph& g,
                              const std::vector<PrimaryInstance>& instances);

json cost_report_to_json(const CostReport& r);
json sim_report_to_json(const SimReport& r);
std::string sim_records_to_csv(const SimReport& r);

json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& text);

}  // namespace pgb
