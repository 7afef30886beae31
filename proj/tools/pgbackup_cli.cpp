// pgbackup: plan and evaluate piggybacked backup deployments.
//
// Subcommands: generate, deploy, evaluate, simulate, sweep, compare.
// Exit codes: 0 success, 1 validation/config error, 2 infeasible or
// guard-sized-input violation.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pgb/harness.hpp"
#include "pgb/json_io.hpp"

namespace {

using pgb::json;

pgb::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) {
    pgb::ExperimentConfig cfg;
    cfg.validate();
    return cfg;
  }
  return pgb::config_from_json(pgb::load_json_file(path));
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
  } else {
    pgb::save_text_file(out_path, text);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pgb::validation_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

pgb::Scenario load_scenario(const std::string& path) {
  const json j = pgb::load_json_file(path);
  if (!j.contains("graph") || !j.contains("instances") || !j.contains("chains")) {
    throw pgb::validation_error(
        "scenario bundle needs graph, instances, and chains sections");
  }
  pgb::Scenario sc;
  sc.graph = pgb::graph_from_json(j.at("graph"));
  sc.dists = pgb::all_pairs_shortest(sc.graph);
  sc.instances = pgb::instances_from_json(j.at("instances"));
  sc.chains = pgb::chains_from_json(j.at("chains"));
  return sc;
}

json scenario_to_json(const pgb::Scenario& sc) {
  return json{{"graph", pgb::graph_to_json(sc.graph)},
              {"instances", pgb::instances_to_json(sc.instances)},
              {"chains", pgb::chains_to_json(sc.chains)}};
}

void apply_overrides(pgb::ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                     std::optional<int> seeds, const std::string& strategy) {
  if (seed) cfg.seeds = {*seed};
  if (seeds) {
    if (*seeds < 1) throw pgb::validation_error("--seeds must be >= 1");
    cfg.seeds.clear();
    for (int i = 0; i < *seeds; ++i) cfg.seeds.push_back(i);
  }
  if (!strategy.empty()) cfg.strategies = {strategy};
  cfg.validate();
}

int run(int argc, char** argv) {
  CLI::App app{"planner and simulator for piggybacked backup state updates"};
  std::string config_path, out_path, strategy, sweep_strategy, format = "json";
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> seed_opt;
  std::optional<int> seeds_opt;
  std::string scenario_path, plan_path, ours_path, baseline_path;
  std::string aggregates_path;

  auto add_common = [&](CLI::App* sub, bool with_format) {
    sub->add_option("--config", config_path, "experiment config JSON");
    sub->add_option("--out", out_path, "output path (default: stdout)");
    if (with_format) {
      sub->add_option("--format", format, "output format")
          ->check(CLI::IsMember({"csv", "json"}));
    }
  };

  auto* gen = app.add_subcommand("generate",
                                 "build a seeded scenario bundle (graph, "
                                 "instances, chains)");
  add_common(gen, false);
  gen->add_option("--seed", seed, "master scenario seed");

  auto* dep = app.add_subcommand("deploy", "run one strategy, emit a plan file");
  add_common(dep, false);
  dep->add_option("scenario", scenario_path, "scenario bundle JSON")->required();
  dep->add_option("--seed", seed, "strategy seed (randomized baselines)");
  dep->add_option("--strategy", strategy, "deployment strategy")
      ->default_val("piggybackup")
      ->check(CLI::IsMember({"piggybackup", "random", "shortest_path", "exact"}));

  auto* eva = app.add_subcommand("evaluate", "score a plan against its scenario");
  add_common(eva, true);
  eva->add_option("scenario", scenario_path, "scenario bundle JSON")->required();
  eva->add_option("plan", plan_path, "plan JSON")->required();

  auto* sim = app.add_subcommand("simulate",
                                 "epoch-driven delivery simulation of a plan");
  add_common(sim, true);
  sim->add_option("scenario", scenario_path, "scenario bundle JSON")->required();
  sim->add_option("plan", plan_path, "plan JSON")->required();
  sim->add_option("--seed", seed, "arrival process seed");

  auto* swp = app.add_subcommand("sweep", "run the configured experiment sweep");
  add_common(swp, true);
  swp->add_option("--seed", seed_opt, "override: run this single seed");
  swp->add_option("--seeds", seeds_opt, "override: run seeds 0..N-1");
  swp->add_option("--strategy", sweep_strategy, "override: run only this strategy")
      ->check(CLI::IsMember({"piggybackup", "random", "shortest_path", "exact"}));
  swp->add_option("--aggregates", aggregates_path,
                  "also write per-(scenario,strategy) means to this CSV");

  auto* cmp = app.add_subcommand("compare",
                                 "reduction percentages between two result CSVs");
  cmp->add_option("ours", ours_path, "result CSV to credit")->required();
  cmp->add_option("baseline", baseline_path, "result CSV to compare against")
      ->required();
  cmp->add_option("--out", out_path, "output path (default: stdout)");
  cmp->add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));

  app.require_subcommand(1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (gen->parsed()) {
    auto cfg = load_config(config_path);
    auto sc = pgb::build_scenario(cfg, seed);
    emit(out_path, scenario_to_json(sc).dump(2));
  } else if (dep->parsed()) {
    auto cfg = load_config(config_path);
    auto sc = load_scenario(scenario_path);
    auto plan = pgb::run_strategy(sc, cfg, strategy, seed);
    emit(out_path, pgb::plan_to_json(plan).dump(2));
  } else if (eva->parsed()) {
    auto cfg = load_config(config_path);
    auto sc = load_scenario(scenario_path);
    auto plan =
        pgb::plan_from_json(pgb::load_json_file(plan_path), sc.graph, sc.instances);
    auto report =
        pgb::total_expected_cost(plan, sc.instances, sc.chains, sc.dists, cfg.cost);
    if (format == "csv") {
      std::ostringstream os;
      os.precision(17);
      os << "instance,piggyback_cost,standalone_cost,cost\n";
      for (std::size_t i = 0; i < report.cost.size(); ++i) {
        os << i << ',' << report.piggyback_cost[i] << ','
           << report.standalone_cost[i] << ',' << report.cost[i] << '\n';
      }
      emit(out_path, os.str());
    } else {
      emit(out_path, pgb::cost_report_to_json(report).dump(2));
    }
  } else if (sim->parsed()) {
    auto cfg = load_config(config_path);
    auto sc = load_scenario(scenario_path);
    auto plan =
        pgb::plan_from_json(pgb::load_json_file(plan_path), sc.graph, sc.instances);
    pgb::SimParams sp = cfg.sim;
    sp.cost = cfg.cost;
    const double horizon = (sp.num_epochs + 1) * sp.epoch_length;
    auto arrivals =
        pgb::generate_arrivals(sc.chains, horizon, pgb::derive_seed(seed, "sim"));
    auto report =
        pgb::run_simulation(plan, sc.instances, sc.chains, arrivals, sc.dists, sp);
    if (format == "csv") {
      emit(out_path, pgb::sim_records_to_csv(report));
    } else {
      emit(out_path, pgb::sim_report_to_json(report).dump(2));
    }
  } else if (swp->parsed()) {
    auto cfg = load_config(config_path);
    apply_overrides(cfg, seed_opt, seeds_opt, sweep_strategy);
    auto result = pgb::run_sweep(cfg, cfg.sweep_axis, cfg.sweep_values);
    if (format == "csv") {
      emit(out_path, pgb::rows_to_csv(result.rows));
    } else {
      emit(out_path, pgb::rows_to_json(result.rows).dump(2));
    }
    if (!aggregates_path.empty()) {
      pgb::save_text_file(aggregates_path,
                          pgb::aggregates_to_csv(result.aggregates));
    }
  } else if (cmp->parsed()) {
    auto ours = pgb::rows_from_csv(read_file(ours_path));
    auto baseline = pgb::rows_from_csv(read_file(baseline_path));
    auto rows = pgb::compare_rows(ours, baseline);
    if (format == "csv") {
      emit(out_path, pgb::compare_to_csv(rows));
    } else {
      emit(out_path, pgb::compare_to_json(rows).dump(2));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pgb::guard_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const pgb::infeasible_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
