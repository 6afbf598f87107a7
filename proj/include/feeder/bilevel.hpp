#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feeder/instancegen.hpp"
#include "feeder/model.hpp"
#include "feeder/search.hpp"

namespace feeder {

// All charger configurations over the candidate sites (homogeneous types per
// site, power limits respected), sorted ascending by total charger count with
// a lexicographic (site, type, count) tie-break.
std::vector<ChargingConfig> enumerate_configs(const std::vector<SiteCandidate>& sites,
                                              const std::vector<ChargerType>& charger_types,
                                              int max_per_site);

struct ScenarioOutcome {
  int scenario = 0;
  double z_l = 0;          // best objective of the lower-level solve
  double gamma = 0;        // reference emission of the scenario
  double co2 = 0;
  int ev_count = 0;
  int gv_count = 0;
  double charging_min = 0;
  double cpu_s = 0;
  bool feasible = false;
};

struct ConfigEvaluation {
  ChargingConfig config;
  int n_chargers = 0;
  std::vector<ScenarioOutcome> per_scenario;
  double zbar_l = 0;       // expected lower-level cost
  double infra_cost = 0;
  double z_u = 0;          // infra + expected cost
  int fleet_ev = 0;        // coverage-percentile fleet
  int fleet_gv = 0;
  bool complete = false;   // every scenario solved feasibly
};

struct PlanOptions {
  double pi = 0;
  double coverage = 0.9;
  int repetitions = 3;     // lower-level runs per (config, scenario), best kept
  bool early_stop = true;  // stop once the per-count minimum starts rising
  int workers = 1;
  std::uint64_t seed = 1;
};

// Expected lower-level cost of one configuration over the scenario set
// (probabilities must sum to one). Reference emissions are solved per
// scenario and cached by the caller when sweeping configurations.
ConfigEvaluation expected_cost(const ChargingConfig& config,
                               const std::vector<Scenario>& scenarios,
                               const SearchParams& params, const PlanOptions& opt,
                               const std::vector<double>* gamma_cache = nullptr);

double upper_cost(const ChargingConfig& config, double zbar_l,
                  const std::vector<SiteCandidate>& sites,
                  const std::vector<ChargerType>& charger_types);

// Smallest per-type fleet able to serve the stated share of scenarios.
std::pair<int, int> percentile_fleet(const std::vector<std::pair<int, int>>& per_scenario,
                                     double coverage);

struct PlanResult {
  std::vector<ConfigEvaluation> evaluated;  // in enumeration order
  int best_index = -1;
  bool stopped_early = false;
};

// Configuration sweep in charger-count order with the early-stopping rule on
// per-count minima; the lower level is the annealing solver.
PlanResult plan(const std::vector<SiteCandidate>& sites,
                const std::vector<ChargerType>& charger_types, int max_per_site,
                const std::vector<Scenario>& scenarios, const SearchParams& params,
                const PlanOptions& opt);

std::string plan_report_csv(const PlanResult& result, const std::vector<SiteCandidate>& sites,
                            const std::vector<ChargerType>& charger_types);

}  // namespace feeder
