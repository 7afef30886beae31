#include "pgb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace pgb {

namespace {

const std::set<std::string> kStrategies{"piggybackup", "random",
                                        "shortest_path", "exact"};

}  // namespace

void ExperimentConfig::validate() const {
  if (topology.kind == TopologySpec::Kind::fat_tree) {
    if (topology.pods < 2 || topology.pods % 2 != 0) {
      throw validation_error("fat tree pod count must be even and >= 2");
    }
  } else {
    if (topology.num_servers < 1) {
      throw validation_error("random topology needs at least one server");
    }
    if (topology.connect_prob < 0.0 || topology.connect_prob > 1.0) {
      throw validation_error("connect_prob must lie in [0,1]");
    }
  }
  if (num_types < 1) throw validation_error("num_types must be >= 1");
  if (num_chains < 0) throw validation_error("num_chains must be >= 0");
  if (primary_capacity < 0 || backup_capacity < 0) {
    throw validation_error("capacities must be non-negative");
  }
  if (assoc_limit < 1) throw validation_error("assoc_limit must be >= 1");
  if (chain_rate <= 0.0) throw validation_error("chain_rate must be positive");
  if (chain_len_min < 1 || chain_len_max < chain_len_min) {
    throw validation_error("chain length range must satisfy 1 <= min <= max");
  }
  cost.validate();
  if (sim_enabled) sim.validate();
  if (strategies.empty()) throw validation_error("no strategies configured");
  for (const auto& s : strategies) {
    if (!kStrategies.count(s)) {
      throw validation_error("unknown strategy: " + s);
    }
  }
  if (seeds.empty()) throw validation_error("no seeds configured");
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("topology")) {
    const auto& t = j.at("topology");
    const std::string kind = t.value("type", "fat_tree");
    if (kind == "fat_tree") {
      cfg.topology.kind = TopologySpec::Kind::fat_tree;
      cfg.topology.pods = t.value("pods", cfg.topology.pods);
    } else if (kind == "random") {
      cfg.topology.kind = TopologySpec::Kind::random;
      cfg.topology.num_servers = t.value("num_servers", cfg.topology.num_servers);
      cfg.topology.connect_prob = t.value("connect_prob", cfg.topology.connect_prob);
    } else {
      throw validation_error("unknown topology type: " + kind);
    }
  }
  cfg.num_types = j.value("num_types", cfg.num_types);
  cfg.num_chains = j.value("num_chains", cfg.num_chains);
  cfg.primary_capacity = j.value("primary_capacity", cfg.primary_capacity);
  cfg.backup_capacity = j.value("backup_capacity", cfg.backup_capacity);
  cfg.assoc_limit = j.value("assoc_limit", j.value("k_limit", cfg.assoc_limit));
  cfg.chain_rate = j.value("chain_rate", cfg.chain_rate);
  cfg.chain_len_min = j.value("chain_len_min", cfg.chain_len_min);
  cfg.chain_len_max = j.value("chain_len_max", cfg.chain_len_max);
  if (j.contains("cost")) {
    const auto& c = j.at("cost");
    cfg.cost.piggyback_bytes = c.value("piggyback_bytes", cfg.cost.piggyback_bytes);
    cfg.cost.standalone_bytes =
        c.value("standalone_bytes", cfg.cost.standalone_bytes);
  }
  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    cfg.sim_enabled = s.value("enabled", false);
    cfg.sim.epoch_length = s.value("epoch_length", cfg.sim.epoch_length);
    cfg.sim.num_epochs = s.value("num_epochs", cfg.sim.num_epochs);
    const std::string mode = s.value("mode", "bounded_waiting");
    if (mode == "bounded_waiting") {
      cfg.sim.mode = SelectionMode::bounded_waiting;
    } else if (mode == "fcfs") {
      cfg.sim.mode = SelectionMode::fcfs;
    } else {
      throw validation_error("unknown selection mode: " + mode);
    }
  }
  cfg.sim.cost = cfg.cost;
  if (j.contains("strategies")) {
    cfg.strategies = j.at("strategies").get<std::vector<std::string>>();
  }
  if (j.contains("seeds")) {
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
  if (j.contains("exact_guard")) {
    const auto& g = j.at("exact_guard");
    cfg.exact_guard.max_instances =
        g.value("max_instances", cfg.exact_guard.max_instances);
    cfg.exact_guard.max_servers =
        g.value("max_servers", cfg.exact_guard.max_servers);
    cfg.exact_guard.max_types = g.value("max_types", cfg.exact_guard.max_types);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    cfg.sweep_axis = s.value("axis", "");
    if (s.contains("values")) {
      cfg.sweep_values = s.at("values").get<std::vector<double>>();
    }
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json t;
  if (cfg.topology.kind == TopologySpec::Kind::fat_tree) {
    t = {{"type", "fat_tree"}, {"pods", cfg.topology.pods}};
  } else {
    t = {{"type", "random"},
         {"num_servers", cfg.topology.num_servers},
         {"connect_prob", cfg.topology.connect_prob}};
  }
  json j{{"topology", std::move(t)},
         {"num_types", cfg.num_types},
         {"num_chains", cfg.num_chains},
         {"primary_capacity", cfg.primary_capacity},
         {"backup_capacity", cfg.backup_capacity},
         {"assoc_limit", cfg.assoc_limit},
         {"chain_rate", cfg.chain_rate},
         {"chain_len_min", cfg.chain_len_min},
         {"chain_len_max", cfg.chain_len_max},
         {"cost",
          {{"piggyback_bytes", cfg.cost.piggyback_bytes},
           {"standalone_bytes", cfg.cost.standalone_bytes}}},
         {"sim",
          {{"enabled", cfg.sim_enabled},
           {"epoch_length", cfg.sim.epoch_length},
           {"num_epochs", cfg.sim.num_epochs},
           {"mode", cfg.sim.mode == SelectionMode::fcfs ? "fcfs"
                                                        : "bounded_waiting"}}},
         {"strategies", cfg.strategies},
         {"seeds", cfg.seeds},
         {"exact_guard",
          {{"max_instances", cfg.exact_guard.max_instances},
           {"max_servers", cfg.exact_guard.max_servers},
           {"max_types", cfg.exact_guard.max_types}}}};
  if (!cfg.sweep_axis.empty()) {
    j["sweep"] = {{"axis", cfg.sweep_axis}, {"values", cfg.sweep_values}};
  }
  return j;
}

Scenario build_scenario(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Scenario sc;
  std::mt19937_64 topo_rng(derive_seed(seed, "topo"));
  if (cfg.topology.kind == TopologySpec::Kind::fat_tree) {
    sc.graph = build_fat_tree(cfg.topology.pods);
  } else {
    sc.graph = build_random_graph(cfg.topology.num_servers,
                                  cfg.topology.connect_prob, topo_rng);
  }
  sc.graph.set_uniform_capacities(cfg.primary_capacity, cfg.backup_capacity);
  sc.dists = all_pairs_shortest(sc.graph);

  std::mt19937_64 place_rng(derive_seed(seed, "place"));
  sc.instances = place_primary_instances(sc.graph, cfg.num_types, place_rng);

  std::mt19937_64 chain_rng(derive_seed(seed, "chains"));
  sc.chains = generate_chains(sc.graph, sc.instances, cfg.num_chains,
                              {cfg.chain_len_min, cfg.chain_len_max}, sc.dists,
                              cfg.chain_rate, chain_rng);
  return sc;
}

DeploymentPlan run_strategy(const Scenario& sc, const ExperimentConfig& cfg,
                            const std::string& strategy, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, "strategy:" + strategy));
  if (strategy == "piggybackup") {
    return plan_piggybackup(sc.graph, sc.dists, sc.instances, sc.chains,
                            cfg.assoc_limit);
  }
  if (strategy == "random") {
    return deploy_random(sc.graph, sc.dists, sc.instances, sc.chains,
                         cfg.assoc_limit, rng);
  }
  if (strategy == "shortest_path") {
    return deploy_shortest_path(sc.graph, sc.dists, sc.instances, sc.chains,
                                cfg.assoc_limit, rng);
  }
  if (strategy == "exact") {
    auto res = solve_exact(sc.graph, sc.dists, sc.instances, sc.chains,
                           cfg.assoc_limit, cfg.cost, cfg.exact_guard);
    if (res.status != ExactResult::Status::optimal) {
      throw infeasible_error("no feasible full-coverage deployment exists");
    }
    return *std::move(res.plan);
  }
  throw validation_error("unknown strategy: " + strategy);
}

std::vector<ResultRow> run_scenario(const ExperimentConfig& cfg,
                                    std::uint64_t seed,
                                    const std::string& scenario_id) {
  Scenario sc = build_scenario(cfg, seed);
  std::vector<ResultRow> rows;
  for (const auto& strategy : cfg.strategies) {
    const auto t0 = std::chrono::steady_clock::now();
    DeploymentPlan plan = run_strategy(sc, cfg, strategy, seed);
    CostReport cost =
        total_expected_cost(plan, sc.instances, sc.chains, sc.dists, cfg.cost);
    ResultRow row;
    row.scenario = scenario_id;
    row.strategy = strategy;
    row.seed = seed;
    row.piggyback_ratio = cost.piggyback_ratio;
    row.piggyback_hops = cost.piggyback_hops;
    row.standalone_hops = cost.standalone_hops;
    row.total_hops = cost.total_hops;
    row.total_bytes = cost.total_bytes;
    row.total_byte_hops = cost.total_byte_hops;
    row.expected_cost = cost.total_cost;
    if (cfg.sim_enabled) {
      SimParams sp = cfg.sim;
      sp.cost = cfg.cost;
      const double horizon = (sp.num_epochs + 1) * sp.epoch_length;
      ArrivalStream arrivals =
          generate_arrivals(sc.chains, horizon, derive_seed(seed, "sim"));
      SimReport sim = run_simulation(plan, sc.instances, sc.chains, arrivals,
                                     sc.dists, sp);
      row.sim_success_prob = sim.success_probability;
      row.sim_mean_piggyback_hops = sim.mean_piggyback_hops;
      row.sim_total_byte_hops = static_cast<double>(sim.total_byte_hops);
    } else {
      row.sim_success_prob = std::nan("");
      row.sim_mean_piggyback_hops = std::nan("");
      row.sim_total_byte_hops = std::nan("");
    }
    const auto t1 = std::chrono::steady_clock::now();
    row.runtime_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
            t1 - t0)
            .count();
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    if (a.strategy != b.strategy) return a.strategy < b.strategy;
    return a.seed < b.seed;
  });
}

}  // namespace

ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis,
                            double value) {
  ExperimentConfig cfg = base;
  if (axis == "num_chains") {
    cfg.num_chains = static_cast<int>(value);
  } else if (axis == "backup_capacity") {
    cfg.backup_capacity = static_cast<int>(value);
  } else if (axis == "primary_capacity") {
    cfg.primary_capacity = static_cast<int>(value);
  } else if (axis == "assoc_limit" || axis == "k_limit") {
    cfg.assoc_limit = static_cast<int>(value);
  } else if (axis == "num_types") {
    cfg.num_types = static_cast<int>(value);
  } else if (axis == "chain_rate" || axis == "rate") {
    cfg.chain_rate = value;
  } else if (axis == "connect_prob") {
    if (cfg.topology.kind != TopologySpec::Kind::random) {
      throw validation_error("connect_prob sweeps need a random topology");
    }
    cfg.topology.connect_prob = value;
  } else if (axis == "pods") {
    if (cfg.topology.kind != TopologySpec::Kind::fat_tree) {
      throw validation_error("pods sweeps need a fat tree topology");
    }
    cfg.topology.pods = static_cast<int>(value);
  } else if (axis == "num_epochs") {
    cfg.sim.num_epochs = static_cast<int>(value);
  } else {
    throw validation_error("unknown sweep axis: " + axis);
  }
  cfg.validate();
  return cfg;
}

SweepResult run_sweep(const ExperimentConfig& base, const std::string& axis,
                      const std::vector<double>& values) {
  base.validate();
  SweepResult out;
  if (axis.empty()) {
    for (std::uint64_t seed : base.seeds) {
      auto rows = run_scenario(base, seed, "default");
      out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }
  } else {
    if (values.empty()) {
      throw validation_error("sweep axis given without values");
    }
    for (double v : values) {
      ExperimentConfig cfg = apply_axis(base, axis, v);
      const std::string id = axis + "=" + format_value(v);
      for (std::uint64_t seed : cfg.seeds) {
        auto rows = run_scenario(cfg, seed, id);
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
      }
    }
  }
  sort_rows(out.rows);
  out.aggregates = aggregate_rows(out.rows);
  return out;
}

const std::vector<std::string>& result_metric_names() {
  static const std::vector<std::string> names{
      "piggyback_ratio",  "piggyback_hops",          "standalone_hops",
      "total_hops",       "total_bytes",             "total_byte_hops",
      "expected_cost",    "sim_success_prob",        "sim_mean_piggyback_hops",
      "sim_total_byte_hops", "runtime_ms"};
  return names;
}

namespace {

std::vector<double> metric_values(const ResultRow& r) {
  return {r.piggyback_ratio,
          static_cast<double>(r.piggyback_hops),
          static_cast<double>(r.standalone_hops),
          static_cast<double>(r.total_hops),
          static_cast<double>(r.total_bytes),
          static_cast<double>(r.total_byte_hops),
          r.expected_cost,
          r.sim_success_prob,
          r.sim_mean_piggyback_hops,
          r.sim_total_byte_hops,
          r.runtime_ms};
}

}  // namespace

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "scenario,strategy,seed";
  for (const auto& m : result_metric_names()) os << ',' << m;
  os << '\n';
  os.precision(17);
  for (const auto& r : rows) {
    os << r.scenario << ',' << r.strategy << ',' << r.seed;
    for (double v : metric_values(r)) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

std::vector<ResultRow> rows_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) {
    throw validation_error("empty CSV");
  }
  const std::string expected_header = [] {
    std::string h = "scenario,strategy,seed";
    for (const auto& m : result_metric_names()) h += "," + m;
    return h;
  }();
  if (line != expected_header) {
    throw validation_error("unexpected CSV header: " + line);
  }
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 3 + result_metric_names().size()) {
      throw validation_error("malformed CSV row: " + line);
    }
    ResultRow r;
    r.scenario = cells[0];
    r.strategy = cells[1];
    r.seed = std::stoull(cells[2]);
    std::vector<double> vals;
    for (std::size_t i = 3; i < cells.size(); ++i) vals.push_back(std::stod(cells[i]));
    r.piggyback_ratio = vals[0];
    r.piggyback_hops = static_cast<std::int64_t>(vals[1]);
    r.standalone_hops = static_cast<std::int64_t>(vals[2]);
    r.total_hops = static_cast<std::int64_t>(vals[3]);
    r.total_bytes = static_cast<std::int64_t>(vals[4]);
    r.total_byte_hops = static_cast<std::int64_t>(vals[5]);
    r.expected_cost = vals[6];
    r.sim_success_prob = vals[7];
    r.sim_mean_piggyback_hops = vals[8];
    r.sim_total_byte_hops = vals[9];
    r.runtime_ms = vals[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>>
      groups;
  for (const auto& r : rows) groups[{r.scenario, r.strategy}].push_back(&r);
  std::vector<AggregateRow> out;
  const std::size_t nm = result_metric_names().size();
  for (const auto& [key, members] : groups) {
    AggregateRow a;
    a.scenario = key.first;
    a.strategy = key.second;
    a.n = static_cast<int>(members.size());
    a.mean.assign(nm, 0.0);
    a.sd.assign(nm, 0.0);
    for (const auto* r : members) {
      auto vals = metric_values(*r);
      for (std::size_t i = 0; i < nm; ++i) a.mean[i] += vals[i];
    }
    for (std::size_t i = 0; i < nm; ++i) a.mean[i] /= a.n;
    if (a.n > 1) {
      for (const auto* r : members) {
        auto vals = metric_values(*r);
        for (std::size_t i = 0; i < nm; ++i) {
          const double d = vals[i] - a.mean[i];
          a.sd[i] += d * d;
        }
      }
      for (std::size_t i = 0; i < nm; ++i) {
        a.sd[i] = std::sqrt(a.sd[i] / (a.n - 1));
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::string aggregates_to_csv(const std::vector<AggregateRow>& aggs) {
  std::ostringstream os;
  os << "scenario,strategy,n";
  for (const auto& m : result_metric_names()) {
    os << ',' << m << "_mean," << m << "_sd";
  }
  os << '\n';
  os.precision(17);
  for (const auto& a : aggs) {
    os << a.scenario << ',' << a.strategy << ',' << a.n;
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
      os << ',' << a.mean[i] << ',' << a.sd[i];
    }
    os << '\n';
  }
  return os.str();
}

json rows_to_json(const std::vector<ResultRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json o{{"scenario", r.scenario}, {"strategy", r.strategy}, {"seed", r.seed}};
    auto vals = metric_values(r);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (std::isnan(vals[i])) {
        o[result_metric_names()[i]] = nullptr;
      } else {
        o[result_metric_names()[i]] = vals[i];
      }
    }
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<CompareRow> compare_rows(const std::vector<ResultRow>& ours,
                                     const std::vector<ResultRow>& baseline) {
  auto mean_by_scenario = [](const std::vector<ResultRow>& rows) {
    std::map<std::string, std::pair<std::vector<double>, int>> acc;
    for (const auto& r : rows) {
      auto vals = metric_values(r);
      auto& [sum, n] = acc[r.scenario];
      if (sum.empty()) sum.assign(vals.size(), 0.0);
      for (std::size_t i = 0; i < vals.size(); ++i) sum[i] += vals[i];
      ++n;
    }
    std::map<std::string, std::vector<double>> out;
    for (auto& [k, v] : acc) {
      for (auto& s : v.first) s /= v.second;
      out[k] = v.first;
    }
    return out;
  };
  auto a = mean_by_scenario(ours);
  auto b = mean_by_scenario(baseline);
  std::vector<CompareRow> out;
  for (const auto& [scenario, ours_mean] : a) {
    auto it = b.find(scenario);
    if (it == b.end()) continue;
    for (std::size_t i = 0; i < result_metric_names().size(); ++i) {
      CompareRow row;
      row.scenario = scenario;
      row.metric = result_metric_names()[i];
      row.ours_mean = ours_mean[i];
      row.baseline_mean = it->second[i];
      row.reduction_pct =
          it->second[i] != 0.0
              ? 100.0 * (it->second[i] - ours_mean[i]) / it->second[i]
              : std::nan("");
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::string compare_to_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream os;
  os << "scenario,metric,ours_mean,baseline_mean,reduction_pct\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << r.scenario << ',' << r.metric << ',' << r.ours_mean << ','
       << r.baseline_mean << ',' << r.reduction_pct << '\n';
  }
  return os.str();
}

json compare_to_json(const std::vector<CompareRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"scenario", r.scenario},
                   {"metric", r.metric},
                   {"ours_mean", r.ours_mean},
                   {"baseline_mean", r.baseline_mean},
                   {"reduction_pct", r.reduction_pct}});
  }
  return arr;
}

}  // namespace pgb
