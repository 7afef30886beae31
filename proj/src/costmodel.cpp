#include "pgb/costmodel.hpp"

#include <algorithm>
#include <limits>

#include "pgb/planner.hpp"

namespace pgb {

void CostParams::validate() const {
  if (piggyback_bytes <= 0 || standalone_bytes <= 0) {
    throw validation_error("update sizes must be positive");
  }
  if (piggyback_bytes > standalone_bytes) {
    throw validation_error(
        "piggyback update size cannot exceed stand-alone update size");
  }
}

double expected_piggyback_cost(const PrimaryInstance& inst,
                               const DeploymentPlan& plan,
                               const std::vector<ServiceChain>& chains,
                               const CostParams& params) {
  auto v = plan.backup_server(inst.id);
  if (!v || chains.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : chains) {
    if (auto seg = c.segment_length(inst.server, *v)) {
      sum += static_cast<double>(*seg) * params.piggyback_bytes;
    }
  }
  return sum / static_cast<double>(chains.size());
}

double expected_standalone_cost(const PrimaryInstance& inst,
                                const DeploymentPlan& plan,
                                const std::vector<ServiceChain>& chains,
                                const DistanceTable& dists,
                                const CostParams& params) {
  auto v = plan.backup_server(inst.id);
  if (!v) return 0.0;
  const double lmin = dists.dist(inst.server, *v);
  if (chains.empty()) return lmin * params.standalone_bytes;
  int carried = 0;
  for (const auto& c : chains) {
    if (c.traverses(inst.server, *v)) ++carried;
  }
  const double rest = static_cast<double>(chains.size() - carried);
  return rest * lmin * params.standalone_bytes /
         static_cast<double>(chains.size());
}

CostReport total_expected_cost(const DeploymentPlan& plan,
                               const std::vector<PrimaryInstance>& instances,
                               const std::vector<ServiceChain>& chains,
                               const DistanceTable& dists,
                               const CostParams& params) {
  params.validate();
  CostReport r;
  r.piggyback_cost.reserve(instances.size());
  r.standalone_cost.reserve(instances.size());
  r.cost.reserve(instances.size());
  for (const auto& inst : instances) {
    const double pg = expected_piggyback_cost(inst, plan, chains, params);
    const double alone =
        expected_standalone_cost(inst, plan, chains, dists, params);
    r.piggyback_cost.push_back(pg);
    r.standalone_cost.push_back(alone);
    r.cost.push_back(pg + alone);
    r.total_cost += pg + alone;

    auto v = plan.backup_server(inst.id);
    if (!v) {
      ++r.uncovered;
      continue;
    }
    ++r.covered;
    int best_seg = std::numeric_limits<int>::max();
    for (const auto& c : chains) {
      if (auto seg = c.segment_length(inst.server, *v)) {
        best_seg = std::min(best_seg, *seg);
      }
    }
    if (best_seg != std::numeric_limits<int>::max()) {
      ++r.piggybackable;
      r.piggyback_hops += best_seg;
      r.total_bytes += params.piggyback_bytes;
      r.total_byte_hops +=
          static_cast<std::int64_t>(best_seg) * params.piggyback_bytes;
    } else {
      const int lmin = dists.dist(inst.server, *v);
      r.standalone_hops += lmin;
      r.total_bytes += params.standalone_bytes;
      r.total_byte_hops +=
          static_cast<std::int64_t>(lmin) * params.standalone_bytes;
    }
  }
  r.total_hops = r.piggyback_hops + r.standalone_hops;
  r.piggyback_ratio =
      r.covered > 0 ? static_cast<double>(r.piggybackable) / r.covered : 0.0;
  return r;
}

}  // namespace pgb
