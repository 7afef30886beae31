#include "pgb/planner.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>

namespace pgb {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::uncovered: return "uncovered";
    case Provenance::piggyback: return "piggyback";
    case Provenance::standalone: return "standalone";
  }
  return "uncovered";
}

DeploymentPlan::DeploymentPlan(int num_types, int num_nodes, int num_instances,
                               int assoc_limit)
    : num_types_(num_types), num_nodes_(num_nodes), assoc_limit_(assoc_limit) {
  if (num_types < 1 || num_nodes < 1 || num_instances < 0) {
    throw validation_error("plan dimensions must be positive");
  }
  if (assoc_limit < 1) {
    throw validation_error("association limit must be >= 1");
  }
  installed_.assign(static_cast<std::size_t>(num_types) * num_nodes, 0);
  assoc_count_.assign(static_cast<std::size_t>(num_types) * num_nodes, 0);
  installed_count_.assign(num_nodes, 0);
  backup_of_.assign(num_instances, -1);
  provenance_.assign(num_instances, Provenance::uncovered);
}

std::size_t DeploymentPlan::cell(int ftype, NodeId v) const {
  if (ftype < 0 || ftype >= num_types_ || v < 0 || v >= num_nodes_) {
    throw validation_error("plan cell out of range");
  }
  return static_cast<std::size_t>(ftype) * num_nodes_ + v;
}

std::optional<NodeId> DeploymentPlan::backup_server(int instance) const {
  NodeId v = backup_of_.at(instance);
  if (v < 0) return std::nullopt;
  return v;
}

int DeploymentPlan::covered_count() const {
  int n = 0;
  for (NodeId v : backup_of_) n += (v >= 0);
  return n;
}

void DeploymentPlan::install(int ftype, NodeId v) {
  auto c = cell(ftype, v);
  if (installed_[c]) {
    throw validation_error("backup of type " + std::to_string(ftype) +
                           " already installed on server " + std::to_string(v));
  }
  installed_[c] = 1;
  ++installed_count_[v];
}

void DeploymentPlan::associate(const PrimaryInstance& inst, NodeId v,
                               Provenance prov) {
  auto c = cell(inst.ftype, v);
  if (!installed_[c]) {
    throw validation_error("no backup of type " + std::to_string(inst.ftype) +
                           " installed on server " + std::to_string(v));
  }
  if (v == inst.server) {
    throw validation_error("instance " + std::to_string(inst.id) +
                           " cannot back up on its own server");
  }
  if (assoc_count_[c] >= assoc_limit_) {
    throw validation_error("backup on server " + std::to_string(v) +
                           " is already serving " + std::to_string(assoc_limit_) +
                           " instances");
  }
  if (backup_of_.at(inst.id) != -1) {
    throw validation_error("instance " + std::to_string(inst.id) +
                           " already has a backup");
  }
  if (prov == Provenance::uncovered) {
    throw validation_error("covered instance cannot be tagged uncovered");
  }
  backup_of_[inst.id] = v;
  provenance_[inst.id] = prov;
  ++assoc_count_[c];
}

void DeploymentPlan::mark_uncovered(int instance) {
  if (backup_of_.at(instance) != -1) {
    throw validation_error("instance " + std::to_string(instance) +
                           " already has a backup");
  }
  provenance_[instance] = Provenance::uncovered;
}

std::vector<std::string> plan_violations(
    const DeploymentPlan& plan, const NetworkGraph& g,
    const std::vector<PrimaryInstance>& instances) {
  std::vector<std::string> out;
  if (plan.num_nodes() != g.num_nodes()) {
    out.push_back("plan built for a different node count");
    return out;
  }
  // Per-server install count against backup capacity.
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    int cnt = 0;
    for (int f = 0; f < plan.num_types(); ++f) cnt += plan.installed(f, v);
    if (cnt > g.backup_capacity(v)) {
      out.push_back("node " + std::to_string(v) + " holds " +
                    std::to_string(cnt) + " backups but has capacity " +
                    std::to_string(g.backup_capacity(v)));
    }
  }
  // Per-instance assignment shape.
  std::vector<int> assoc(static_cast<std::size_t>(plan.num_types()) *
                             plan.num_nodes(),
                         0);
  for (const auto& inst : instances) {
    auto v = plan.backup_server(inst.id);
    auto prov = plan.provenance(inst.id);
    if (prov == Provenance::uncovered) {
      if (v) {
        out.push_back("instance " + std::to_string(inst.id) +
                      " tagged uncovered but assigned to " + std::to_string(*v));
      }
      continue;
    }
    if (!v) {
      out.push_back("instance " + std::to_string(inst.id) +
                    " tagged covered but has no backup server");
      continue;
    }
    if (*v == inst.server) {
      out.push_back("instance " + std::to_string(inst.id) +
                    " backed up on its own server " + std::to_string(*v));
    }
    if (!plan.installed(inst.ftype, *v)) {
      out.push_back("instance " + std::to_string(inst.id) +
                    " assigned to server " + std::to_string(*v) +
                    " without an installed type-" + std::to_string(inst.ftype) +
                    " backup");
    }
    ++assoc[static_cast<std::size_t>(inst.ftype) * plan.num_nodes() + *v];
  }
  for (int f = 0; f < plan.num_types(); ++f) {
    for (NodeId v = 0; v < plan.num_nodes(); ++v) {
      int a = assoc[static_cast<std::size_t>(f) * plan.num_nodes() + v];
      int cap = plan.installed(f, v) ? plan.assoc_limit() : 0;
      if (a > cap) {
        out.push_back("backup (type " + std::to_string(f) + ", server " +
                      std::to_string(v) + ") serves " + std::to_string(a) +
                      " instances, limit " + std::to_string(cap));
      }
    }
  }
  return out;
}

void validate_plan(const DeploymentPlan& plan, const NetworkGraph& g,
                   const std::vector<PrimaryInstance>& instances) {
  auto v = plan_violations(plan, g, instances);
  if (!v.empty()) {
    std::string msg = "invalid plan:";
    for (const auto& m : v) msg += "\n  " + m;
    throw validation_error(msg);
  }
}

std::vector<ServerScore> piggyback_scores(
    const std::vector<const PrimaryInstance*>& instances_f,
    const std::vector<const ServiceChain*>& chains_f,
    const std::vector<NodeId>& candidate_servers) {
  std::vector<ServerScore> out;
  out.reserve(candidate_servers.size());
  for (NodeId v : candidate_servers) {
    ServerScore s;
    s.server = v;
    s.per_instance.reserve(instances_f.size());
    for (const auto* inst : instances_f) {
      double score = 0.0;
      for (const auto* c : chains_f) {
        if (auto seg = c->segment_length(inst->server, v)) {
          score += c->rate / static_cast<double>(*seg);
        }
      }
      s.per_instance.push_back(score);
      s.total += score;
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

int max_ftype(const std::vector<PrimaryInstance>& instances) {
  int m = -1;
  for (const auto& inst : instances) m = std::max(m, inst.ftype);
  return m;
}

// Covered-instance tag for the baselines: piggyback when some chain can
// actually carry the update from the primary to this backup.
Provenance tag_for(const PrimaryInstance& inst, NodeId backup,
                   const std::vector<ServiceChain>& chains) {
  for (const auto& c : chains) {
    if (c.traverses(inst.server, backup)) return Provenance::piggyback;
  }
  return Provenance::standalone;
}

}  // namespace

PiggybackDeployment deploy_piggyback(const NetworkGraph& g,
                                     const std::vector<PrimaryInstance>& instances,
                                     const std::vector<ServiceChain>& chains,
                                     int assoc_limit) {
  const int num_types = std::max(1, max_ftype(instances) + 1);
  DeploymentPlan plan(num_types, g.num_nodes(),
                      static_cast<int>(instances.size()), assoc_limit);

  std::vector<std::vector<const PrimaryInstance*>> by_type(num_types);
  for (const auto& inst : instances) by_type.at(inst.ftype).push_back(&inst);
  std::vector<std::vector<const ServiceChain*>> chains_of(num_types);
  for (const auto& c : chains) {
    std::set<int> seen(c.requested.begin(), c.requested.end());
    for (int f : seen) {
      if (f >= 0 && f < num_types) chains_of[f].push_back(&c);
    }
  }

  // Types with the most requesting chains first; ties by lower type id.
  std::vector<int> order;
  for (int f = 0; f < num_types; ++f) {
    if (!by_type[f].empty()) order.push_back(f);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return chains_of[a].size() > chains_of[b].size();
  });

  const std::vector<NodeId> servers = g.servers();
  for (int f : order) {
    std::vector<const PrimaryInstance*> remaining = by_type[f];
    while (!remaining.empty()) {
      std::vector<NodeId> candidates;
      for (NodeId v : servers) {
        if (plan.installed_count(v) < g.backup_capacity(v) &&
            !plan.installed(f, v)) {
          candidates.push_back(v);
        }
      }
      if (candidates.empty()) break;
      auto scores = piggyback_scores(remaining, chains_of[f], candidates);
      std::size_t best = 0;
      for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i].total > scores[best].total) best = i;
      }
      if (scores[best].total <= 0.0) break;
      const NodeId vstar = scores[best].server;
      plan.install(f, vstar);

      // Associate the strongest-scoring instances, skipping zero scores and
      // instances hosted on the chosen server itself.
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (scores[best].per_instance[i] > 0.0 && remaining[i]->server != vstar) {
          idx.push_back(i);
        }
      }
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (scores[best].per_instance[a] != scores[best].per_instance[b]) {
          return scores[best].per_instance[a] > scores[best].per_instance[b];
        }
        return remaining[a]->id < remaining[b]->id;
      });
      if (idx.size() > static_cast<std::size_t>(assoc_limit)) {
        idx.resize(assoc_limit);
      }
      std::set<std::size_t> taken(idx.begin(), idx.end());
      for (std::size_t i : idx) {
        plan.associate(*remaining[i], vstar, Provenance::piggyback);
      }
      std::vector<const PrimaryInstance*> next;
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (!taken.count(i)) next.push_back(remaining[i]);
      }
      remaining = std::move(next);
    }
  }

  PiggybackDeployment out{std::move(plan), {}};
  for (const auto& inst : instances) {
    if (!out.plan.backup_server(inst.id)) out.leftovers.push_back(inst.id);
  }
  std::sort(out.leftovers.begin(), out.leftovers.end());
  return out;
}

std::vector<NodeId> available_servers(const DeploymentPlan& plan, int ftype,
                                      const NetworkGraph& g) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!g.is_server(v)) continue;
    if (plan.installed(ftype, v)
            ? plan.association_count(ftype, v) < plan.assoc_limit()
            : plan.installed_count(v) < g.backup_capacity(v)) {
      out.push_back(v);
    }
  }
  return out;
}

void deploy_standalone(const NetworkGraph& g, const DistanceTable& dists,
                       DeploymentPlan& plan, const std::vector<int>& leftovers,
                       const std::vector<PrimaryInstance>& instances) {
  constexpr int kUrgent = std::numeric_limits<int>::max();
  std::unordered_map<int, const PrimaryInstance*> by_id;
  for (const auto& inst : instances) by_id[inst.id] = &inst;

  std::vector<int> pending = leftovers;
  std::sort(pending.begin(), pending.end());
  while (!pending.empty()) {
    // Priority = gap between closest and second-closest available server;
    // an instance down to one option (or none) is most urgent.
    int best_pos = -1;
    int best_gap = -1;
    std::vector<std::vector<NodeId>> cand(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto& inst = *by_id.at(pending[i]);
      for (NodeId v : available_servers(plan, inst.ftype, g)) {
        if (v != inst.server) cand[i].push_back(v);
      }
      int gap;
      if (cand[i].size() <= 1) {
        gap = kUrgent;
      } else {
        int d1 = std::numeric_limits<int>::max();
        int d2 = std::numeric_limits<int>::max();
        for (NodeId v : cand[i]) {
          int d = dists.dist(inst.server, v);
          if (d < d1) {
            d2 = d1;
            d1 = d;
          } else if (d < d2) {
            d2 = d;
          }
        }
        gap = d2 - d1;
      }
      if (gap > best_gap) {
        best_gap = gap;
        best_pos = static_cast<int>(i);
      }
    }
    const auto& inst = *by_id.at(pending[best_pos]);
    const auto& options = cand[best_pos];
    if (options.empty()) {
      plan.mark_uncovered(inst.id);
    } else {
      NodeId vstar = options[0];
      for (NodeId v : options) {
        if (dists.dist(inst.server, v) < dists.dist(inst.server, vstar)) vstar = v;
      }
      if (!plan.installed(inst.ftype, vstar)) plan.install(inst.ftype, vstar);
      plan.associate(inst, vstar, Provenance::standalone);
    }
    pending.erase(pending.begin() + best_pos);
  }
}

DeploymentPlan plan_piggybackup(const NetworkGraph& g, const DistanceTable& dists,
                                const std::vector<PrimaryInstance>& instances,
                                const std::vector<ServiceChain>& chains,
                                int assoc_limit) {
  auto phase1 = deploy_piggyback(g, instances, chains, assoc_limit);
  deploy_standalone(g, dists, phase1.plan, phase1.leftovers, instances);
  return std::move(phase1.plan);
}

namespace {

DeploymentPlan baseline_deploy(const NetworkGraph& g, const DistanceTable& dists,
                               const std::vector<PrimaryInstance>& instances,
                               const std::vector<ServiceChain>& chains,
                               int assoc_limit, std::mt19937_64& rng,
                               bool closest) {
  const int num_types = std::max(1, max_ftype(instances) + 1);
  DeploymentPlan plan(num_types, g.num_nodes(),
                      static_cast<int>(instances.size()), assoc_limit);
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i : order) {
    const auto& inst = instances[i];
    std::vector<NodeId> options;
    for (NodeId v : available_servers(plan, inst.ftype, g)) {
      if (v != inst.server) options.push_back(v);
    }
    if (options.empty()) {
      plan.mark_uncovered(inst.id);
      continue;
    }
    NodeId pick;
    if (closest) {
      pick = options[0];
      for (NodeId v : options) {
        if (dists.dist(inst.server, v) < dists.dist(inst.server, pick)) pick = v;
      }
    } else {
      std::uniform_int_distribution<std::size_t> d(0, options.size() - 1);
      pick = options[d(rng)];
    }
    if (!plan.installed(inst.ftype, pick)) plan.install(inst.ftype, pick);
    plan.associate(inst, pick, tag_for(inst, pick, chains));
  }
  return plan;
}

}  // namespace

DeploymentPlan deploy_random(const NetworkGraph& g, const DistanceTable& dists,
                             const std::vector<PrimaryInstance>& instances,
                             const std::vector<ServiceChain>& chains,
                             int assoc_limit, std::mt19937_64& rng) {
  return baseline_deploy(g, dists, instances, chains, assoc_limit, rng, false);
}

DeploymentPlan deploy_shortest_path(const NetworkGraph& g,
                                    const DistanceTable& dists,
                                    const std::vector<PrimaryInstance>& instances,
                                    const std::vector<ServiceChain>& chains,
                                    int assoc_limit, std::mt19937_64& rng) {
  return baseline_deploy(g, dists, instances, chains, assoc_limit, rng, true);
}

namespace {

struct ExactCandidate {
  NodeId server;
  std::int64_t cost;  // objective numerator contribution
};

}  // namespace

ExactResult solve_exact(const NetworkGraph& g, const DistanceTable& dists,
                        const std::vector<PrimaryInstance>& instances,
                        const std::vector<ServiceChain>& chains, int assoc_limit,
                        const CostParams& params, const ExactGuard& guard) {
  params.validate();
  const std::vector<NodeId> servers = g.servers();
  std::set<int> types;
  for (const auto& inst : instances) types.insert(inst.ftype);
  if (static_cast<int>(instances.size()) > guard.max_instances ||
      static_cast<int>(servers.size()) > guard.max_servers ||
      static_cast<int>(types.size()) > guard.max_types) {
    throw guard_error(
        "exact solver guard exceeded: " + std::to_string(instances.size()) +
        " instances / " + std::to_string(servers.size()) + " servers / " +
        std::to_string(types.size()) + " types (limits " +
        std::to_string(guard.max_instances) + "/" +
        std::to_string(guard.max_servers) + "/" +
        std::to_string(guard.max_types) + ")");
  }
  if (assoc_limit < 1) {
    throw validation_error("association limit must be >= 1");
  }

  ExactResult result;
  result.cost_denom = std::max<int>(1, static_cast<int>(chains.size()));
  const int n = static_cast<int>(instances.size());
  if (n == 0) {
    const int num_types = 1;
    result.status = ExactResult::Status::optimal;
    result.plan.emplace(num_types, g.num_nodes(), 0, assoc_limit);
    result.cost_numer = 0;
    return result;
  }

  // Dense type index for bookkeeping arrays.
  std::map<int, int> type_idx;
  for (int f : types) type_idx.emplace(f, static_cast<int>(type_idx.size()));
  const int nt = static_cast<int>(type_idx.size());

  // Per-instance candidate servers with exact integer costs, cheapest first.
  // The objective scaled by |chains| stays integral because segment lengths,
  // hop counts, and byte sizes are all integers.
  std::vector<std::vector<ExactCandidate>> cands(n);
  std::vector<std::int64_t> cheapest(n);
  for (int i = 0; i < n; ++i) {
    const auto& inst = instances[i];
    for (NodeId v : servers) {
      if (v == inst.server) continue;
      std::int64_t cost;
      if (chains.empty()) {
        cost = static_cast<std::int64_t>(dists.dist(inst.server, v)) *
               params.standalone_bytes;
      } else {
        std::int64_t pg = 0;
        std::int64_t carried = 0;
        for (const auto& c : chains) {
          if (auto seg = c.segment_length(inst.server, v)) {
            pg += static_cast<std::int64_t>(*seg) * params.piggyback_bytes;
            ++carried;
          }
        }
        const std::int64_t rest =
            static_cast<std::int64_t>(chains.size()) - carried;
        cost = pg + rest * static_cast<std::int64_t>(dists.dist(inst.server, v)) *
                        params.standalone_bytes;
      }
      cands[i].push_back({v, cost});
    }
    if (cands[i].empty()) {
      result.status = ExactResult::Status::infeasible;
      return result;
    }
    std::sort(cands[i].begin(), cands[i].end(), [](const auto& a, const auto& b) {
      return a.cost != b.cost ? a.cost < b.cost : a.server < b.server;
    });
    cheapest[i] = cands[i].front().cost;
  }
  std::vector<std::int64_t> suffix_min(n + 1, 0);
  for (int i = n - 1; i >= 0; --i) suffix_min[i] = suffix_min[i + 1] + cheapest[i];

  std::vector<std::vector<int>> assoc(nt, std::vector<int>(g.num_nodes(), 0));
  std::vector<int> types_at(g.num_nodes(), 0);
  std::vector<NodeId> assign(n, -1);
  std::vector<NodeId> best_assign;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();

  auto dfs = [&](auto&& self, int i, std::int64_t acc) -> void {
    if (acc + suffix_min[i] >= best) return;
    if (i == n) {
      best = acc;
      best_assign = assign;
      return;
    }
    const auto& inst = instances[i];
    const int ti = type_idx.at(inst.ftype);
    for (const auto& c : cands[i]) {
      int& a = assoc[ti][c.server];
      if (a > 0) {
        if (a >= assoc_limit) continue;
      } else {
        if (types_at[c.server] >= g.backup_capacity(c.server)) continue;
      }
      if (a == 0) ++types_at[c.server];
      ++a;
      assign[i] = c.server;
      self(self, i + 1, acc + c.cost);
      assign[i] = -1;
      --a;
      if (a == 0) --types_at[c.server];
    }
  };
  dfs(dfs, 0, 0);

  if (best_assign.empty()) {
    result.status = ExactResult::Status::infeasible;
    return result;
  }
  result.status = ExactResult::Status::optimal;
  result.cost_numer = best;

  const int num_types = std::max(1, max_ftype(instances) + 1);
  DeploymentPlan plan(num_types, g.num_nodes(), n, assoc_limit);
  for (int i = 0; i < n; ++i) {
    if (!plan.installed(instances[i].ftype, best_assign[i])) {
      plan.install(instances[i].ftype, best_assign[i]);
    }
  }
  for (int i = 0; i < n; ++i) {
    plan.associate(instances[i], best_assign[i],
                   tag_for(instances[i], best_assign[i], chains));
  }
  result.plan = std::move(plan);
  return result;
}

}  // namespace pgb
