#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feeder/model.hpp"

namespace feeder {

struct SearchParams;

enum class RouteViolation { None, Tw, RideTime, Load };

// One vehicle's tour from the start depot to the end depot. Charging
// durations live in per-position arrays aligned with `seq`; schedule and
// load caches are filled by reschedule().
struct Route {
  int vtype = 0;
  std::vector<int> seq;          // vertex ids, front()==0, back()==N+1
  std::vector<Sec> charge_tau;   // per position; 0 unless charger dummy
  std::vector<Sec> charge_wait;  // idle before plugging in, per position

  // Evaluation caches.
  bool evaluated = false;
  bool feasible = false;
  std::vector<Sec> begin;     // service begin per position
  std::vector<Sec> earliest;  // earliest-start pass, for insertion screening
  std::vector<Sec> latest;    // TW-chain latest begin, for insertion screening
  std::vector<int> load;      // load after serving each position
  Metre length_m = 0;
  int served = 0;

  int size() const { return static_cast<int>(seq.size()); }
  bool empty_route() const { return served == 0; }
};

struct ScheduleResult {
  bool feasible = false;
  RouteViolation violation = RouteViolation::None;
  std::vector<Sec> begin;
  std::vector<int> load;
  // Ride time per request served on this route, aligned with `request_ids`.
  std::vector<int> request_ids;
  std::vector<Sec> ride;
};

// Charging operation as exposed to reports/dumps: start is the plug-in time.
struct ChargingOp {
  int position = 0;
  int dummy = 0;
  int physical = 0;
  Sec start = 0;
  Sec tau = 0;
};

struct Solution {
  struct Loc {
    int route = -1;
    int ppos = -1;
    int dpos = -1;
  };

  std::vector<Route> routes;
  std::vector<int> unserved;             // request ids, kept sorted
  std::vector<std::uint8_t> dummy_used;  // per vertex id
  std::vector<Loc> where;                // per request id

  // Caches; recompute_caches() rebuilds them from scratch.
  double energy_cost = 0;
  double fleet_cost = 0;
  double co2_kg = 0;
  double energy_violation_kwh = 0;
  int n_vehicles = 0;

  int n_unserved() const { return static_cast<int>(unserved.size()); }
  double cost() const { return energy_cost + fleet_cost; }
};

// Exact schedule evaluation for a fixed visit sequence: earliest-start
// construction, forward-time-slack delays to absorb ride-time violations,
// and an exact difference-constraint fallback. Charging durations are fixed
// service prolongations at charger positions.
ScheduleResult evaluate_route(const Route& route, const Instance& inst);

// Runs evaluate_route and stores schedule/load/length caches in the route.
// Returns schedule feasibility.
bool reschedule(Route& route, const Instance& inst);

// Energy cost plus vehicle fixed costs if the route serves any request.
double route_cost(const Route& route, const Instance& inst);

// Emission of a route (gasoline only; electric routes emit zero).
double co2_of(const Route& route, const Instance& inst);

double solution_co2(const Solution& sol, const Instance& inst);

// Context for penalized insertion deltas. With `params` null the delta is
// the plain cost change.
struct CostContext {
  double co2_cap = 0;
  double co2_now = 0;
  const SearchParams* params = nullptr;
};

struct InsertionPlan {
  int ppos = 0;
  int dpos = 0;
  double delta = 0;
  Route tentative;  // evaluated route with the request inserted
};

// Best feasible (pickup, dropoff) insertion into one route, minimizing the
// (penalized) cost delta; nullopt when no feasible pair exists. Scans all
// precedence-respecting position pairs; screening only discards provably
// infeasible pairs, so the result matches exhaustive enumeration.
std::optional<InsertionPlan> best_insertion(const Route& route, const Request& req,
                                            const Instance& inst, const CostContext& ctx);

// Worst dip below e_min along the route in kWh, given its scheduled charge
// amounts; 0 for gasoline routes and energy-feasible electric ones.
double route_energy_deficit(const Route& route, const Instance& inst);

// Route mutation helpers; all reschedule the touched route.
Route make_route(int vtype, const Instance& inst);
void insert_request(Route& route, const Request& req, int ppos, int dpos, const Instance& inst);
void remove_request(Route& route, const Request& req, const Instance& inst);
// Removes charger visits with zero charge. Positions of v in `route.seq`.
void strip_charging(Route& route, const Instance& inst, std::vector<int>* freed_dummies = nullptr);

std::vector<ChargingOp> charging_ops(const Route& route, const Instance& inst);

// Rebuilds every solution cache (and each route's schedule) from scratch.
void recompute_caches(Solution& sol, const Instance& inst);

// Rebuilds where[] entries for one route index.
void reindex_route(Solution& sol, int route_idx, const Instance& inst);
void reindex_all(Solution& sol, const Instance& inst);

// Drops empty routes, releasing their charger dummies.
void drop_empty_routes(Solution& sol, const Instance& inst);

std::string solution_to_json(const Solution& sol, const Instance& inst);
Solution solution_from_json(const std::string& text, const Instance& inst);

}  // namespace feeder
