#pragma once

#include <optional>
#include <vector>

#include "feeder/model.hpp"
#include "feeder/rng.hpp"
#include "feeder/routesched.hpp"

namespace feeder {

struct SearchParams;

// Per-charger occupancy: non-overlapping half-open intervals [start, end).
struct ChargerOccupancy {
  struct Interval {
    Sec start = 0;
    Sec end = 0;
    int vehicle = -1;  // route index
  };

  std::vector<std::vector<Interval>> by_charger;  // per physical charger, sorted
  std::vector<std::uint8_t> dummy_used;           // per vertex id

  void reset(const Instance& inst);
  bool is_free(int physical, Sec start, Sec end) const;
  // Earliest start >= from such that [start, start+len) is free.
  Sec earliest_free(int physical, Sec from, Sec len) const;
  void add(int physical, Sec start, Sec end, int vehicle);
};

ChargerOccupancy build_occupancy(const Solution& sol, const Instance& inst);

struct EnergyProfile {
  std::vector<double> soc;   // arrival SOC per position
  int first_violation = -1;  // position index, -1 when none
  double deficit_kwh = 0;    // worst dip below e_min
  double charged_kwh = 0;
  double consumed_kwh = 0;
  bool feasible = true;
};

// SOC propagation along an electric route: E_0 = e_init, minus beta*c per
// arc, plus alpha*tau after each charger visit (capped at e_max by the
// scheduling side).
EnergyProfile propagate_soc(const Route& route, const Instance& inst);

struct Conflict {
  int physical = 0;
  int vehicle_a = 0;
  int vehicle_b = 0;
  Sec overlap_start = 0;
  Sec overlap_end = 0;
};

// All pairwise overlaps of charging intervals on the same physical charger.
std::vector<Conflict> detect_conflicts(const Solution& sol, const Instance& inst);

// Inserts charger visits with minimal partial recharges until the route is
// energy-feasible. Candidate (arc, charger) pairs are ranked by added detour
// plus waiting time; with respect_occupancy the start times dodge occupied
// intervals. Returns nullopt when no feasible plan exists (route untouched).
std::optional<Route> schedule_charging(const Route& route, ChargerOccupancy& occ,
                                       const Instance& inst, bool respect_occupancy,
                                       Sec max_total_wait = 30 * kMinute);

// Re-derives minimal charge amounts for the charger visits already on the
// route (lazy rule: top up at the latest charger before each dip). Visits
// left with zero charge are removed from the sequence; solution-level dummy
// bookkeeping is the caller's (commit) responsibility.
void retrim_charging(Route& route, const Instance& inst);

// Ejects uniformly random requests from energy-infeasible electric routes
// until each route is feasible; ejected requests join the unserved pool.
void repair_energy_feasibility(Solution& sol, const Instance& inst, Rng& rng);

// The two-step repair of charging conflicts and unserved requests: rebuild
// occupancy over EVs sorted by charged energy, strip-and-eject conflicting
// vehicles, then reinsert the pool on k randomly chosen EVs (k=3) or a new
// EV, with occupancy-aware charging. Returns false when the iteration budget
// is exhausted.
bool repair_sol(Solution& sol, const Instance& inst, const SearchParams& params, Rng& rng,
                int max_rounds = 40);

}  // namespace feeder
