#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "feeder/charging.hpp"
#include "feeder/model.hpp"
#include "feeder/rng.hpp"
#include "feeder/routesched.hpp"

namespace feeder {

// Tuned defaults are the retained parameter vector of the sequential tuning
// experiment: (100, 200, 20, 0.3, 250, 150, 1e5, 300, 400, 0.9).
struct SearchParams {
  double rho1 = 100;   // penalty per unserved user
  double rho2 = 200;   // penalty per used vehicle
  double rho3 = 20;    // penalty per kg CO2 above the target
  double rho4 = 0.3;   // penalty per kWh of unavoidable energy shortfall
  int n_remove = 250;  // run remove-route every n_remove iterations
  int n_stagnant = 150;
  long iter_max = 100000;
  int n_imp = 300;     // restart factor
  double T_red = 400;  // threshold reduction divisor
  double t_max = 0.9;  // threshold scale coefficient
  double delta_min = 0.2;  // degree of destruction range
  double delta_max = 0.5;
  double alpha_repair = 1.0;
  int regret_k = 3;        // 2 or 3
  int init_samples = 500;  // greedy constructions for the initial solution
  int remove_cap = 30;     // cap on extra removals in remove-route
  std::uint64_t seed = 1;
};

SearchParams load_params(const std::string& path);
void save_params(const SearchParams& p, const std::string& path);

struct TracePoint {
  long iter = 0;
  double best_cost = 0;
};

struct SearchTrace {
  std::vector<TracePoint> best_updates;  // non-increasing best cost
  long iterations = 0;
  long acceptances = 0;
  std::array<long, 8> operator_uses{};  // 7 LS operators + remove-route
  long repair_calls = 0;
  double wall_s = 0;
};

struct SolveResult {
  Solution best;
  SearchTrace trace;
  bool feasible = false;  // hard constraints, charging sync, SOC and CO2 cap
};

// Eq.-style penalized cost: c(s) + rho1*unserved + rho2*vehicles
// + rho3*max(0, co2 - cap) + rho4*energy shortfall.
double penalized_cost(const Solution& sol, double co2_cap, const SearchParams& params);

// Best of `init_samples` randomized greedy constructions.
Solution generate_init_sol(const Instance& inst, double co2_cap, const SearchParams& params,
                           Rng& rng);

// The seven neighbourhood operators, applied in place. Returns false when no
// feasible neighbour was found (solution left unchanged).
enum class LsOperator {
  RelocateEnsemble = 0,
  DestroyRepair = 1,
  TwoOpt = 2,
  FourOpt = 3,
  TwoOptStar = 4,
  SwapRequests = 5,
  SwapSegments = 6,
};
bool apply_operator(LsOperator op, Solution& sol, const Instance& inst, double co2_cap,
                    const SearchParams& params, Rng& rng);

// Dissolves one random route and reinserts its requests (plus a few extra
// removals) over the remaining fleet or one new vehicle.
void remove_route_op(Solution& sol, const Instance& inst, double co2_cap,
                     const SearchParams& params, Rng& rng);

// Swaps vehicle types across routes to cut cost subject to the CO2 cap;
// energy-infeasible electric routes are relieved with worst-relocate.
void route_exchange_improve(Solution& sol, const Instance& inst, double co2_cap,
                            const SearchParams& params, Rng& rng);

// The deterministic-annealing metaheuristic for one demand scenario.
// co2_cap is (1 - pi) * Gamma when pi > 0, +infinity otherwise.
SolveResult solve_fs_mfrp(const Instance& inst, double co2_cap, const SearchParams& params,
                          std::uint64_t seed);

// Gasoline-only reference run without the emission constraint; returns the
// total emission of its best solution.
double reference_emission(const Instance& inst, const SearchParams& params, std::uint64_t seed);

// Feasibility gates used by the solver and the tests.
bool energy_feasible(const Solution& sol, const Instance& inst);
bool co2_feasible(const Solution& sol, const Instance& inst, double co2_cap);

}  // namespace feeder
