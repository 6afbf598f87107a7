#include "feeder/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "feeder/charging.hpp"
#include "feeder/preprocess.hpp"

namespace feeder {

namespace {

constexpr double kTol = 1e-9;
constexpr double kInfCost = std::numeric_limits<double>::infinity();

struct Ctx {
  const Instance& inst;
  double co2_cap;
  const SearchParams& params;
  Rng& rng;
};

struct RouteContrib {
  double energy = 0;
  double fleet = 0;
  double co2 = 0;
  double deficit = 0;
  int used = 0;
};

RouteContrib contrib(const Route& r, const Instance& inst) {
  RouteContrib c;
  const VehicleType& t = inst.vehicle_types[r.vtype];
  c.energy = t.energy_price * t.consumption * (static_cast<double>(r.length_m) / 1000.0);
  if (r.served > 0) {
    c.fleet = t.daily_cost + t.overnight_charger_cost;
    c.used = 1;
  }
  c.co2 = co2_of(r, inst);
  c.deficit = route_energy_deficit(r, inst);
  return c;
}

Solution empty_solution(const Instance& inst) {
  Solution sol;
  sol.dummy_used.assign(inst.n_vertices(), 0);
  sol.where.assign(inst.n_requests(), Solution::Loc{});
  for (int r = 0; r < inst.n_requests(); ++r) sol.unserved.push_back(r);
  return sol;
}

void unserved_add(Solution& sol, int req) {
  auto it = std::lower_bound(sol.unserved.begin(), sol.unserved.end(), req);
  if (it == sol.unserved.end() || *it != req) sol.unserved.insert(it, req);
  sol.where[req] = Solution::Loc{};
}

void unserved_del(Solution& sol, int req) {
  auto it = std::lower_bound(sol.unserved.begin(), sol.unserved.end(), req);
  if (it != sol.unserved.end() && *it == req) sol.unserved.erase(it);
}

// Replaces route `ri` with an evaluated route, keeping every cache in step.
void commit_route(Solution& sol, int ri, Route&& nr, const Instance& inst) {
  Route& old = sol.routes[ri];
  RouteContrib a = contrib(old, inst);
  RouteContrib b = contrib(nr, inst);
  sol.energy_cost += b.energy - a.energy;
  sol.fleet_cost += b.fleet - a.fleet;
  sol.co2_kg += b.co2 - a.co2;
  sol.energy_violation_kwh += b.deficit - a.deficit;
  sol.n_vehicles += b.used - a.used;
  for (int v : old.seq)
    if (inst.is_charger(v)) sol.dummy_used[v] = 0;
  for (int v : nr.seq)
    if (inst.is_charger(v)) sol.dummy_used[v] = 1;
  old = std::move(nr);
  reindex_route(sol, ri, inst);
}

int append_route(Solution& sol, Route&& r, const Instance& inst) {
  RouteContrib b = contrib(r, inst);
  sol.energy_cost += b.energy;
  sol.fleet_cost += b.fleet;
  sol.co2_kg += b.co2;
  sol.energy_violation_kwh += b.deficit;
  sol.n_vehicles += b.used;
  for (int v : r.seq)
    if (inst.is_charger(v)) sol.dummy_used[v] = 1;
  sol.routes.push_back(std::move(r));
  int ri = static_cast<int>(sol.routes.size()) - 1;
  reindex_route(sol, ri, inst);
  return ri;
}

int type_count(const Solution& sol, int vtype) {
  int n = 0;
  for (const Route& r : sol.routes)
    if (r.vtype == vtype) ++n;
  return n;
}

// Removes the last route, undoing its cache contribution.
void pop_route(Solution& sol, const Instance& inst) {
  const Route& r = sol.routes.back();
  RouteContrib c = contrib(r, inst);
  sol.energy_cost -= c.energy;
  sol.fleet_cost -= c.fleet;
  sol.co2_kg -= c.co2;
  sol.energy_violation_kwh -= c.deficit;
  sol.n_vehicles -= c.used;
  for (int v : r.seq)
    if (inst.is_charger(v)) sol.dummy_used[v] = 0;
  sol.routes.pop_back();
}

// Re-evaluates a mutated route: schedule first, then charge re-derivation
// and, if a shortfall remains, new charger visits. Falls back to the
// penalized deficit. Every operator passes its tentative routes through
// here, so stale caches never reach a commit.
void fix_ev_route(Route& r, const Solution& sol, const Instance& inst) {
  retrim_charging(r, inst);  // also strips chargers from gasoline routes
  reschedule(r, inst);
  if (inst.vehicle_types[r.vtype].kind != PowerKind::Electric) return;
  if (!r.feasible) return;
  if (route_energy_deficit(r, inst) > kTol) {
    ChargerOccupancy occ;
    occ.reset(inst);
    occ.dummy_used = sol.dummy_used;
    for (int v : r.seq)
      if (inst.is_charger(v)) occ.dummy_used[v] = 1;  // our own visits stay ours
    if (auto charged = schedule_charging(r, occ, inst, /*respect_occupancy=*/false)) r = *charged;
  }
}

struct InsertCandidate {
  double delta = 0;
  Route tent;
};

// Best insertion into one route including any charging the insertion needs;
// delta is the full penalized change of the solution.
std::optional<InsertCandidate> try_insert(const Route& route, int req, const Solution& sol,
                                          const Ctx& c) {
  CostContext cc;
  cc.co2_cap = c.co2_cap;
  cc.co2_now = sol.co2_kg;
  cc.params = &c.params;
  auto plan = best_insertion(route, c.inst.requests[req], c.inst, cc);
  if (!plan) return std::nullopt;
  Route tent = std::move(plan->tentative);
  if (c.inst.vehicle_types[tent.vtype].kind == PowerKind::Electric &&
      route_energy_deficit(tent, c.inst) > kTol) {
    ChargerOccupancy occ;
    occ.reset(c.inst);
    occ.dummy_used = sol.dummy_used;
    for (int v : tent.seq)
      if (c.inst.is_charger(v)) occ.dummy_used[v] = 1;
    if (auto charged = schedule_charging(tent, occ, c.inst, false)) tent = *charged;
  }
  RouteContrib a = contrib(route, c.inst);
  RouteContrib b = contrib(tent, c.inst);
  double pen_now = std::max(0.0, sol.co2_kg - c.co2_cap);
  double pen_new = std::max(0.0, sol.co2_kg - a.co2 + b.co2 - c.co2_cap);
  double delta = (b.energy + b.fleet) - (a.energy + a.fleet) +
                 c.params.rho2 * (b.used - a.used) + c.params.rho3 * (pen_new - pen_now) +
                 c.params.rho4 * (b.deficit - a.deficit) - c.params.rho1;
  InsertCandidate out;
  out.delta = delta;
  out.tent = std::move(tent);
  return out;
}

// Removes a request from its route (with charge retrimming) and returns the
// new route for inspection before committing.
Route route_without(const Solution& sol, int req, const Ctx& c) {
  const Solution::Loc& loc = sol.where[req];
  Route r = sol.routes[loc.route];
  remove_request(r, c.inst.requests[req], c.inst);
  fix_ev_route(r, sol, c.inst);
  return r;
}

void eject_to_pool(Solution& sol, int req, const Ctx& c) {
  int ri = sol.where[req].route;
  Route nr = route_without(sol, req, c);
  for (int v : sol.routes[ri].seq) {
    int rq = c.inst.request_of(v);
    if (rq == req) sol.where[req] = Solution::Loc{};
  }
  commit_route(sol, ri, std::move(nr), c.inst);
  unserved_add(sol, req);
}

std::vector<int> served_requests(const Solution& sol, const Instance& inst) {
  std::vector<int> out;
  for (int r = 0; r < inst.n_requests(); ++r)
    if (sol.where[r].route >= 0) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Removal operators for destroy-repair and remove-route.

double removal_saving(const Solution& sol, int req, const Ctx& c) {
  const Solution::Loc& loc = sol.where[req];
  Route nr = route_without(sol, req, c);
  RouteContrib a = contrib(sol.routes[loc.route], c.inst);
  RouteContrib b = contrib(nr, c.inst);
  double pen_now = std::max(0.0, sol.co2_kg - c.co2_cap);
  double pen_new = std::max(0.0, sol.co2_kg - a.co2 + b.co2 - c.co2_cap);
  return (a.energy + a.fleet) - (b.energy + b.fleet) + c.params.rho2 * (a.used - b.used) +
         c.params.rho3 * (pen_now - pen_new) + c.params.rho4 * (a.deficit - b.deficit);
}

enum class RemovalOp { Random = 0, Worst = 1, DistanceRelated = 2, TwRelated = 3, Shaw = 4 };

Sec station_time(const Request& r, const Instance& inst) {
  const Vertex& p = inst.vx(r.pickup);
  const Vertex& d = inst.vx(r.dropoff);
  return p.transit_station ? p.tw_open : d.tw_open;
}

void remove_m(Solution& sol, int m, RemovalOp op, const Ctx& c) {
  std::vector<int> served = served_requests(sol, c.inst);
  if (served.empty()) return;
  m = std::min<int>(m, static_cast<int>(served.size()));

  std::vector<int> victims;
  switch (op) {
    case RemovalOp::Random: {
      shuffle(served, c.rng);
      victims.assign(served.begin(), served.begin() + m);
      break;
    }
    case RemovalOp::Worst: {
      std::vector<std::pair<double, int>> scored;
      for (int r : served) scored.push_back({removal_saving(sol, r, c), r});
      std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
      });
      for (int i = 0; i < m; ++i) victims.push_back(scored[i].second);
      break;
    }
    case RemovalOp::DistanceRelated:
    case RemovalOp::TwRelated:
    case RemovalOp::Shaw: {
      const int seed_req = served[c.rng.index(served.size())];
      double max_d = 1;
      for (int r : served)
        max_d = std::max(max_d, static_cast<double>(c.inst.dist_m(
                                    c.inst.requests[seed_req].pickup, c.inst.requests[r].pickup)));
      auto related = [&](int r) {
        const Request& a = c.inst.requests[seed_req];
        const Request& b = c.inst.requests[r];
        double dd = (static_cast<double>(c.inst.dist_m(a.pickup, b.pickup)) +
                     static_cast<double>(c.inst.dist_m(a.dropoff, b.dropoff))) /
                    (2.0 * max_d);
        double dt = std::abs(static_cast<double>(station_time(a, c.inst) - station_time(b, c.inst))) /
                    static_cast<double>(kHorizon);
        double dq = std::abs(a.passengers - b.passengers) / 4.0;
        switch (op) {
          case RemovalOp::DistanceRelated: return dd;
          case RemovalOp::TwRelated: return dt;
          default: return (9.0 * dd + 3.0 * dt + 2.0 * dq) / 14.0;  // Shaw weights
        }
      };
      std::vector<std::pair<double, int>> scored;
      for (int r : served) scored.push_back({related(r), r});
      std::sort(scored.begin(), scored.end());
      for (int i = 0; i < m && i < static_cast<int>(scored.size()); ++i)
        victims.push_back(scored[i].second);
      break;
    }
  }
  for (int r : victims) eject_to_pool(sol, r, c);
  drop_empty_routes(sol, c.inst);
}

// ---------------------------------------------------------------------------
// Insertion machinery.

struct BestSpot {
  int route = -1;
  double delta = kInfCost;
  Route tent;
};

BestSpot best_over_routes(const Solution& sol, int req, const Ctx& c,
                          const std::vector<int>* subset = nullptr) {
  BestSpot best;
  auto consider = [&](int ri) {
    auto cand = try_insert(sol.routes[ri], req, sol, c);
    if (cand && cand->delta < best.delta) {
      best.route = ri;
      best.delta = cand->delta;
      best.tent = std::move(cand->tent);
    }
  };
  if (subset) {
    for (int ri : *subset) consider(ri);
  } else {
    for (int ri = 0; ri < static_cast<int>(sol.routes.size()); ++ri) consider(ri);
  }
  return best;
}

int new_vehicle_type(const Solution& sol, const Ctx& c) {
  const bool violated = sol.co2_kg > c.co2_cap + kTol;
  const int ev = c.inst.electric_type();
  const int gv = c.inst.gasoline_type();
  int want = violated ? ev : gv;
  if (type_count(sol, want) >= c.inst.fleet_bounds[want]) want = violated ? gv : ev;
  if (type_count(sol, want) >= c.inst.fleet_bounds[want]) return -1;
  return want;
}

void greedy_insert_pool(Solution& sol, const Ctx& c, bool allow_new_route, int forced_new_type) {
  std::vector<int> pool = sol.unserved;
  shuffle(pool, c.rng);
  std::vector<int> leftovers;
  for (int req : pool) {
    BestSpot spot = best_over_routes(sol, req, c);
    if (spot.route >= 0) {
      unserved_del(sol, req);
      commit_route(sol, spot.route, std::move(spot.tent), c.inst);
    } else {
      leftovers.push_back(req);
    }
  }
  if (!leftovers.empty() && allow_new_route) {
    int vt = forced_new_type >= 0 ? forced_new_type : new_vehicle_type(sol, c);
    if (vt >= 0 && type_count(sol, vt) < c.inst.fleet_bounds[vt]) {
      int ri = append_route(sol, make_route(vt, c.inst), c.inst);
      for (int req : leftovers) {
        auto cand = try_insert(sol.routes[ri], req, sol, c);
        if (cand) {
          unserved_del(sol, req);
          commit_route(sol, ri, std::move(cand->tent), c.inst);
        }
      }
      drop_empty_routes(sol, c.inst);
    }
  }
}

void regret_insert_pool(Solution& sol, const Ctx& c, bool allow_new_route, int forced_new_type) {
  const int k = std::max(2, c.params.regret_k);
  // Cache of insertion deltas per (request, route); only the column of the
  // route just changed gets refreshed between rounds.
  std::vector<int> pool = sol.unserved;
  std::map<int, std::vector<double>> deltas;  // req -> per-route delta
  auto fill = [&](int req, int ri) {
    auto cand = try_insert(sol.routes[ri], req, sol, c);
    deltas[req][ri] = cand ? cand->delta : kInfCost;
  };
  for (int req : pool) {
    deltas[req].assign(sol.routes.size(), kInfCost);
    for (int ri = 0; ri < static_cast<int>(sol.routes.size()); ++ri) fill(req, ri);
  }

  while (!sol.unserved.empty()) {
    int best_req = -1;
    int best_route = -1;
    double best_regret = -kInfCost;
    for (int req : sol.unserved) {
      const auto& row = deltas[req];
      int top = -1;
      std::vector<double> sorted;
      for (int ri = 0; ri < static_cast<int>(row.size()); ++ri) {
        if (row[ri] >= kInfCost) continue;
        sorted.push_back(row[ri]);
        if (top < 0 || row[ri] < row[top]) top = ri;
      }
      if (top < 0) continue;
      std::sort(sorted.begin(), sorted.end());
      double regret = 0;
      for (int i = 1; i < k; ++i) {
        double other =
            i < static_cast<int>(sorted.size()) ? sorted[i] : sorted.back() + c.params.rho1;
        regret += other - sorted[0];
      }
      if (regret > best_regret + kTol ||
          (regret > best_regret - kTol && (best_req < 0 || req < best_req))) {
        best_regret = regret;
        best_req = req;
        best_route = top;
      }
    }
    if (best_req < 0) break;
    // Recompute the winning insertion; the cached delta may be stale only
    // for the refreshed column, so this stays exact.
    auto cand = try_insert(sol.routes[best_route], best_req, sol, c);
    if (!cand) {
      deltas[best_req][best_route] = kInfCost;
      continue;
    }
    unserved_del(sol, best_req);
    commit_route(sol, best_route, std::move(cand->tent), c.inst);
    deltas.erase(best_req);
    for (auto& kv : deltas) fill(kv.first, best_route);
  }

  if (!sol.unserved.empty() && allow_new_route) {
    int vt = forced_new_type >= 0 ? forced_new_type : new_vehicle_type(sol, c);
    if (vt >= 0 && type_count(sol, vt) < c.inst.fleet_bounds[vt]) {
      int ri = append_route(sol, make_route(vt, c.inst), c.inst);
      std::vector<int> rest = sol.unserved;
      for (int req : rest) {
        auto cand = try_insert(sol.routes[ri], req, sol, c);
        if (cand) {
          unserved_del(sol, req);
          commit_route(sol, ri, std::move(cand->tent), c.inst);
        }
      }
      drop_empty_routes(sol, c.inst);
    }
  }
}

void repair_pool(Solution& sol, const Ctx& c, bool allow_new_route, int forced_new_type) {
  if (c.rng.coin())
    greedy_insert_pool(sol, c, allow_new_route, forced_new_type);
  else
    regret_insert_pool(sol, c, allow_new_route, forced_new_type);
}

// ---------------------------------------------------------------------------
// Neighbourhood operators.

// Penalized delta of replacing routes (old -> new) against current totals.
double replace_delta(const Solution& sol, const Ctx& c,
                     const std::vector<std::pair<const Route*, const Route*>>& repl) {
  double d_energy = 0, d_fleet = 0, d_co2 = 0, d_def = 0;
  int d_used = 0;
  for (auto [oldr, newr] : repl) {
    RouteContrib a = contrib(*oldr, c.inst);
    RouteContrib b = contrib(*newr, c.inst);
    d_energy += b.energy - a.energy;
    d_fleet += b.fleet - a.fleet;
    d_co2 += b.co2 - a.co2;
    d_def += b.deficit - a.deficit;
    d_used += b.used - a.used;
  }
  double pen_now = std::max(0.0, sol.co2_kg - c.co2_cap);
  double pen_new = std::max(0.0, sol.co2_kg + d_co2 - c.co2_cap);
  return d_energy + d_fleet + c.params.rho2 * d_used + c.params.rho3 * (pen_new - pen_now) +
         c.params.rho4 * d_def;
}

std::vector<int> nonempty_routes(const Solution& sol) {
  std::vector<int> out;
  for (int ri = 0; ri < static_cast<int>(sol.routes.size()); ++ri)
    if (sol.routes[ri].served > 0) out.push_back(ri);
  return out;
}

bool op_relocate_ensemble(Solution& sol, const Ctx& c) {
  std::vector<int> served = served_requests(sol, c.inst);
  if (served.empty()) return false;

  int req = -1;
  if (c.rng.coin()) {  // greedy relocate: random request
    req = served[c.rng.index(served.size())];
  } else {  // worst relocate: most expensive request of a random route
    std::vector<int> routes = nonempty_routes(sol);
    if (routes.empty()) return false;
    int ri = routes[c.rng.index(routes.size())];
    double best_saving = -kInfCost;
    for (int r : served) {
      if (sol.where[r].route != ri) continue;
      double s = removal_saving(sol, r, c);
      if (s > best_saving) {
        best_saving = s;
        req = r;
      }
    }
    if (req < 0) return false;
  }

  const int from = sol.where[req].route;
  Route src = route_without(sol, req, c);
  if (!src.feasible) return false;

  // Temporary solution view with the request removed, so deltas are priced
  // against the right CO2 total.
  RouteContrib a = contrib(sol.routes[from], c.inst);
  RouteContrib b = contrib(src, c.inst);
  Solution& s = sol;
  double saved_co2 = s.co2_kg;
  s.co2_kg += b.co2 - a.co2;
  BestSpot best;
  for (int ri = 0; ri < static_cast<int>(s.routes.size()); ++ri) {
    if (ri == from) continue;
    auto cand = try_insert(s.routes[ri], req, s, c);
    if (cand && cand->delta < best.delta) {
      best.route = ri;
      best.delta = cand->delta;
      best.tent = std::move(cand->tent);
    }
  }
  s.co2_kg = saved_co2;
  if (best.route < 0) return false;

  commit_route(sol, from, std::move(src), c.inst);
  sol.where[req] = Solution::Loc{};
  commit_route(sol, best.route, std::move(best.tent), c.inst);
  drop_empty_routes(sol, c.inst);
  return true;
}

bool op_destroy_repair(Solution& sol, const Ctx& c) {
  std::vector<int> served = served_requests(sol, c.inst);
  if (served.empty()) return false;
  const bool violated_before = sol.co2_kg > c.co2_cap + kTol;
  const double frac = c.rng.uniform(c.params.delta_min, c.params.delta_max);
  int m = std::max(1, static_cast<int>(std::llround(frac * static_cast<double>(served.size()))));
  RemovalOp op = static_cast<RemovalOp>(c.rng.index(5));
  remove_m(sol, m, op, c);
  int forced = violated_before ? c.inst.electric_type() : c.inst.gasoline_type();
  if (type_count(sol, forced) >= c.inst.fleet_bounds[forced]) forced = -1;
  repair_pool(sol, c, /*allow_new_route=*/true, forced);
  return true;
}

// Reverses seq[s .. s+len-1] together with its charge arrays.
Route reversed_segment(const Route& r, int s, int len) {
  Route t = r;
  std::reverse(t.seq.begin() + s, t.seq.begin() + s + len);
  std::reverse(t.charge_tau.begin() + s, t.charge_tau.begin() + s + len);
  std::reverse(t.charge_wait.begin() + s, t.charge_wait.begin() + s + len);
  return t;
}

bool op_two_opt(Solution& sol, const Ctx& c) {
  std::vector<int> routes = nonempty_routes(sol);
  if (routes.empty()) return false;
  const int ri = routes[c.rng.index(routes.size())];
  const Route& r = sol.routes[ri];
  const int len = static_cast<int>(c.rng.uniform_int(2, 4));
  const int q = r.size();
  if (q - 2 < len) return false;
  const int n_starts = q - 1 - len;
  const int off = static_cast<int>(c.rng.index(static_cast<std::size_t>(n_starts)));
  for (int k = 0; k < n_starts; ++k) {
    const int s = 1 + (off + k) % n_starts;
    Route t = reversed_segment(r, s, len);
    fix_ev_route(t, sol, c.inst);
    if (!t.feasible) continue;
    std::vector<std::pair<const Route*, const Route*>> repl = {{&r, &t}};
    if (replace_delta(sol, c, repl) < -kTol) {
      commit_route(sol, ri, std::move(t), c.inst);
      return true;
    }
  }
  return false;
}

bool op_four_opt(Solution& sol, const Ctx& c) {
  std::vector<int> routes = nonempty_routes(sol);
  if (routes.empty()) return false;
  const int ri = routes[c.rng.index(routes.size())];
  const Route& r = sol.routes[ri];
  const int q = r.size();
  if (q < 5) return false;  // need three interior nodes

  double best_delta = -kTol;
  std::optional<Route> best;
  for (int s = 1; s + 2 <= q - 2; ++s) {
    int idx[3] = {s, s + 1, s + 2};
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& p : perms) {
      if (p[0] == 0 && p[1] == 1 && p[2] == 2) continue;
      Route t = r;
      for (int i = 0; i < 3; ++i) {
        t.seq[idx[i]] = r.seq[idx[p[i]]];
        t.charge_tau[idx[i]] = r.charge_tau[idx[p[i]]];
        t.charge_wait[idx[i]] = r.charge_wait[idx[p[i]]];
      }
      fix_ev_route(t, sol, c.inst);
      if (!t.feasible) continue;
      std::vector<std::pair<const Route*, const Route*>> repl = {{&r, &t}};
      double d = replace_delta(sol, c, repl);
      if (d < best_delta) {
        best_delta = d;
        best = std::move(t);
      }
    }
  }
  if (!best) return false;
  commit_route(sol, ri, std::move(*best), c.inst);
  return true;
}

// Positions i such that the vehicle is empty on the arc seq[i] -> seq[i+1].
std::vector<int> zero_load_arcs(const Route& r) {
  std::vector<int> out;
  for (int i = 0; i + 1 < r.size(); ++i)
    if (r.load[i] == 0) out.push_back(i);
  return out;
}

bool route_has_charger(const Route& r, const Instance& inst) {
  for (int v : r.seq)
    if (inst.is_charger(v)) return true;
  return false;
}

Route splice_routes(const Route& head, int a, const Route& tail, int b) {
  Route t;
  t.vtype = head.vtype;
  t.seq.assign(head.seq.begin(), head.seq.begin() + a + 1);
  t.charge_tau.assign(head.charge_tau.begin(), head.charge_tau.begin() + a + 1);
  t.charge_wait.assign(head.charge_wait.begin(), head.charge_wait.begin() + a + 1);
  t.seq.insert(t.seq.end(), tail.seq.begin() + b + 1, tail.seq.end());
  t.charge_tau.insert(t.charge_tau.end(), tail.charge_tau.begin() + b + 1, tail.charge_tau.end());
  t.charge_wait.insert(t.charge_wait.end(), tail.charge_wait.begin() + b + 1,
                       tail.charge_wait.end());
  return t;
}

bool op_two_opt_star(Solution& sol, const Ctx& c) {
  std::vector<int> routes = nonempty_routes(sol);
  if (routes.size() < 2) return false;
  shuffle(routes, c.rng);
  const int r1 = routes[0], r2 = routes[1];
  const Route& a = sol.routes[r1];
  const Route& b = sol.routes[r2];
  std::vector<int> za = zero_load_arcs(a), zb = zero_load_arcs(b);
  if (za.empty() || zb.empty()) return false;
  const int oa = static_cast<int>(c.rng.index(za.size()));
  const int ob = static_cast<int>(c.rng.index(zb.size()));
  int budget = 48;  // candidate pairs scanned before giving up
  for (std::size_t ka = 0; ka < za.size(); ++ka) {
    for (std::size_t kb = 0; kb < zb.size(); ++kb) {
      if (--budget < 0) return false;
      const int pa = za[(oa + ka) % za.size()];
      const int pb = zb[(ob + kb) % zb.size()];
      Route na = splice_routes(a, pa, b, pb);
      Route nb = splice_routes(b, pb, a, pa);
      if (c.inst.vehicle_types[na.vtype].kind == PowerKind::Gasoline &&
          route_has_charger(na, c.inst))
        continue;
      if (c.inst.vehicle_types[nb.vtype].kind == PowerKind::Gasoline &&
          route_has_charger(nb, c.inst))
        continue;
      fix_ev_route(na, sol, c.inst);
      fix_ev_route(nb, sol, c.inst);
      if (!na.feasible || !nb.feasible) continue;
      std::vector<std::pair<const Route*, const Route*>> repl = {{&a, &na}, {&b, &nb}};
      if (replace_delta(sol, c, repl) < -kTol) {
        commit_route(sol, r1, std::move(na), c.inst);
        commit_route(sol, r2, std::move(nb), c.inst);
        drop_empty_routes(sol, c.inst);
        return true;
      }
    }
  }
  return false;
}

bool op_swap_requests(Solution& sol, const Ctx& c) {
  std::vector<int> routes = nonempty_routes(sol);
  if (routes.size() < 2) return false;
  shuffle(routes, c.rng);
  const int r1 = routes[0], r2 = routes[1];
  std::vector<int> reqs1, reqs2;
  for (int v : sol.routes[r1].seq)
    if (c.inst.vx(v).kind == VertexKind::Pickup) reqs1.push_back(c.inst.request_of(v));
  for (int v : sol.routes[r2].seq)
    if (c.inst.vx(v).kind == VertexKind::Pickup) reqs2.push_back(c.inst.request_of(v));
  const int qa = reqs1[c.rng.index(reqs1.size())];
  const int qb = reqs2[c.rng.index(reqs2.size())];

  // Position-preserving exchange first.
  {
    Route na = sol.routes[r1];
    Route nb = sol.routes[r2];
    const Solution::Loc la = sol.where[qa], lb = sol.where[qb];
    na.seq[la.ppos] = c.inst.requests[qb].pickup;
    na.seq[la.dpos] = c.inst.requests[qb].dropoff;
    nb.seq[lb.ppos] = c.inst.requests[qa].pickup;
    nb.seq[lb.dpos] = c.inst.requests[qa].dropoff;
    fix_ev_route(na, sol, c.inst);
    fix_ev_route(nb, sol, c.inst);
    if (na.feasible && nb.feasible) {
      commit_route(sol, r1, std::move(na), c.inst);
      commit_route(sol, r2, std::move(nb), c.inst);
      return true;
    }
  }

  // Fall back to remove-both, best-insert crosswise.
  Route na = sol.routes[r1];
  remove_request(na, c.inst.requests[qa], c.inst);
  fix_ev_route(na, sol, c.inst);
  Route nb = sol.routes[r2];
  remove_request(nb, c.inst.requests[qb], c.inst);
  fix_ev_route(nb, sol, c.inst);
  if (!na.feasible || !nb.feasible) return false;
  CostContext cc;
  cc.co2_cap = c.co2_cap;
  cc.co2_now = sol.co2_kg;
  cc.params = &c.params;
  auto pa = best_insertion(na, c.inst.requests[qb], c.inst, cc);
  if (!pa) return false;
  auto pb = best_insertion(nb, c.inst.requests[qa], c.inst, cc);
  if (!pb) return false;
  Route fa = std::move(pa->tentative);
  Route fb = std::move(pb->tentative);
  fix_ev_route(fa, sol, c.inst);
  fix_ev_route(fb, sol, c.inst);
  if (!fa.feasible || !fb.feasible) return false;
  commit_route(sol, r1, std::move(fa), c.inst);
  commit_route(sol, r2, std::move(fb), c.inst);
  return true;
}

bool op_swap_segments(Solution& sol, const Ctx& c) {
  std::vector<int> routes = nonempty_routes(sol);
  if (routes.size() < 2) return false;
  shuffle(routes, c.rng);
  const int r1 = routes[0], r2 = routes[1];
  const Route& a = sol.routes[r1];
  const Route& b = sol.routes[r2];
  std::vector<int> za = zero_load_arcs(a), zb = zero_load_arcs(b);
  if (za.size() < 2 || zb.size() < 2) return false;

  auto segments = [](const std::vector<int>& z) {
    std::vector<std::pair<int, int>> segs;  // (split_before, split_after)
    for (std::size_t i = 0; i + 1 < z.size(); ++i)
      if (z[i + 1] > z[i] + 0) segs.push_back({z[i], z[i + 1]});
    return segs;
  };
  auto segs_a = segments(za);
  auto segs_b = segments(zb);
  if (segs_a.empty() || segs_b.empty()) return false;
  const int sa0 = static_cast<int>(c.rng.index(segs_a.size()));
  const int sb0 = static_cast<int>(c.rng.index(segs_b.size()));

  int budget = 48;  // segment pairs scanned before giving up
  for (std::size_t ka = 0; ka < segs_a.size(); ++ka) {
    for (std::size_t kb = 0; kb < segs_b.size(); ++kb) {
      if (--budget < 0) return false;
      auto [a1, a2] = segs_a[(sa0 + ka) % segs_a.size()];
      auto [b1, b2] = segs_b[(sb0 + kb) % segs_b.size()];
      auto build = [&](const Route& host, int h1, int h2, const Route& donor, int d1, int d2) {
        Route t;
        t.vtype = host.vtype;
        auto app = [&](const Route& r, int from, int to) {  // [from, to)
          t.seq.insert(t.seq.end(), r.seq.begin() + from, r.seq.begin() + to);
          t.charge_tau.insert(t.charge_tau.end(), r.charge_tau.begin() + from,
                              r.charge_tau.begin() + to);
          t.charge_wait.insert(t.charge_wait.end(), r.charge_wait.begin() + from,
                               r.charge_wait.begin() + to);
        };
        app(host, 0, h1 + 1);
        app(donor, d1 + 1, d2 + 1);
        app(host, h2 + 1, host.size());
        return t;
      };
      Route na = build(a, a1, a2, b, b1, b2);
      Route nb = build(b, b1, b2, a, a1, a2);
      if (c.inst.vehicle_types[na.vtype].kind == PowerKind::Gasoline &&
          route_has_charger(na, c.inst))
        continue;
      if (c.inst.vehicle_types[nb.vtype].kind == PowerKind::Gasoline &&
          route_has_charger(nb, c.inst))
        continue;
      fix_ev_route(na, sol, c.inst);
      fix_ev_route(nb, sol, c.inst);
      if (!na.feasible || !nb.feasible) continue;
      std::vector<std::pair<const Route*, const Route*>> repl = {{&a, &na}, {&b, &nb}};
      if (replace_delta(sol, c, repl) < -kTol) {
        commit_route(sol, r1, std::move(na), c.inst);
        commit_route(sol, r2, std::move(nb), c.inst);
        drop_empty_routes(sol, c.inst);
        return true;
      }
    }
  }
  return false;
}

}  // namespace

double penalized_cost(const Solution& sol, double co2_cap, const SearchParams& params) {
  double pen = sol.cost();
  pen += params.rho1 * sol.n_unserved();
  pen += params.rho2 * sol.n_vehicles;
  pen += params.rho3 * std::max(0.0, sol.co2_kg - co2_cap);
  pen += params.rho4 * sol.energy_violation_kwh;
  return pen;
}

Solution generate_init_sol(const Instance& inst, double co2_cap, const SearchParams& params,
                           Rng& rng) {
  Ctx c{inst, co2_cap, params, rng};
  Solution best;
  double best_pen = kInfCost;
  for (int sample = 0; sample < std::max(1, params.init_samples); ++sample) {
    Solution sol = empty_solution(inst);
    std::vector<int> pool(static_cast<std::size_t>(inst.n_requests()));
    for (int i = 0; i < inst.n_requests(); ++i) pool[i] = i;
    shuffle(pool, rng);
    for (int req : pool) {
      std::vector<int> order(sol.routes.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      shuffle(order, rng);
      bool placed = false;
      for (int ri : order) {
        auto cand = try_insert(sol.routes[ri], req, sol, c);
        if (cand) {
          unserved_del(sol, req);
          commit_route(sol, ri, std::move(cand->tent), c.inst);
          placed = true;
          break;
        }
      }
      if (!placed) {
        int vt = new_vehicle_type(sol, c);
        if (vt >= 0) {
          int ri = append_route(sol, make_route(vt, inst), inst);
          auto cand = try_insert(sol.routes[ri], req, sol, c);
          if (cand) {
            unserved_del(sol, req);
            commit_route(sol, ri, std::move(cand->tent), inst);
            placed = true;
          } else {
            pop_route(sol, inst);
          }
        }
      }
    }
    drop_empty_routes(sol, inst);
    double pen = penalized_cost(sol, co2_cap, params);
    if (pen < best_pen) {
      best_pen = pen;
      best = std::move(sol);
    }
  }
  return best;
}

bool apply_operator(LsOperator op, Solution& sol, const Instance& inst, double co2_cap,
                    const SearchParams& params, Rng& rng) {
  Ctx c{inst, co2_cap, params, rng};
  switch (op) {
    case LsOperator::RelocateEnsemble: return op_relocate_ensemble(sol, c);
    case LsOperator::DestroyRepair: return op_destroy_repair(sol, c);
    case LsOperator::TwoOpt: return op_two_opt(sol, c);
    case LsOperator::FourOpt: return op_four_opt(sol, c);
    case LsOperator::TwoOptStar: return op_two_opt_star(sol, c);
    case LsOperator::SwapRequests: return op_swap_requests(sol, c);
    case LsOperator::SwapSegments: return op_swap_segments(sol, c);
  }
  return false;
}

void remove_route_op(Solution& sol, const Instance& inst, double co2_cap,
                     const SearchParams& params, Rng& rng) {
  Ctx c{inst, co2_cap, params, rng};
  std::vector<int> routes = nonempty_routes(sol);
  if (routes.empty()) return;
  const bool violated_before = sol.co2_kg > co2_cap + kTol;
  const int ri = routes[rng.index(routes.size())];
  std::vector<int> dissolved;
  for (int v : sol.routes[ri].seq)
    if (inst.vx(v).kind == VertexKind::Pickup) dissolved.push_back(inst.request_of(v));
  for (int req : dissolved) eject_to_pool(sol, req, c);
  drop_empty_routes(sol, inst);

  const int remaining = static_cast<int>(served_requests(sol, inst).size());
  if (remaining > 0) {
    const double frac = rng.uniform(params.delta_min, params.delta_max);
    const int hi = std::max(
        1, std::min(params.remove_cap, static_cast<int>(frac * static_cast<double>(remaining))));
    const int m = static_cast<int>(rng.uniform_int(1, hi));
    remove_m(sol, m, static_cast<RemovalOp>(rng.index(5)), c);
  }
  int forced = violated_before ? inst.electric_type() : inst.gasoline_type();
  if (type_count(sol, forced) >= inst.fleet_bounds[forced]) forced = -1;
  repair_pool(sol, c, /*allow_new_route=*/true, forced);
}

void route_exchange_improve(Solution& sol, const Instance& inst, double co2_cap,
                            const SearchParams& params, Rng& rng) {
  Ctx c{inst, co2_cap, params, rng};
  const int ev = inst.electric_type();
  const int gv = inst.gasoline_type();
  if (ev < 0 || gv < 0) return;

  auto flipped = [&](int ri) -> std::optional<Route> {
    Route t = sol.routes[ri];
    t.vtype = t.vtype == ev ? gv : ev;
    if (inst.vehicle_types[t.vtype].kind == PowerKind::Gasoline) retrim_charging(t, inst);
    fix_ev_route(t, sol, inst);
    if (!t.feasible) return std::nullopt;
    return t;
  };

  // Restore the emission cap first: flip the gasoline routes with the best
  // emission saved per euro added.
  int guard = 0;
  while (sol.co2_kg > co2_cap + kTol && guard++ < 256) {
    int best_ri = -1;
    double best_ratio = -kInfCost;
    Route best_route;
    for (int ri = 0; ri < static_cast<int>(sol.routes.size()); ++ri) {
      if (sol.routes[ri].vtype != gv || sol.routes[ri].served == 0) continue;
      if (type_count(sol, ev) >= inst.fleet_bounds[ev]) break;
      auto t = flipped(ri);
      if (!t) continue;
      RouteContrib a = contrib(sol.routes[ri], inst);
      RouteContrib b = contrib(*t, inst);
      const double saved = a.co2 - b.co2;
      if (saved <= kTol) continue;
      const double extra = (b.energy + b.fleet + params.rho4 * b.deficit) -
                           (a.energy + a.fleet + params.rho4 * a.deficit);
      const double ratio = saved / std::max(1e-6, extra);
      if (extra <= 0) {  // cheaper and cleaner, take immediately
        best_ri = ri;
        best_route = std::move(*t);
        break;
      }
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_ri = ri;
        best_route = std::move(*t);
      }
    }
    if (best_ri < 0) break;
    commit_route(sol, best_ri, std::move(best_route), inst);
  }

  // Pure cost improvement that keeps the cap.
  bool improved = true;
  guard = 0;
  while (improved && guard++ < 256) {
    improved = false;
    for (int ri = 0; ri < static_cast<int>(sol.routes.size()); ++ri) {
      if (sol.routes[ri].served == 0) continue;
      const int target = sol.routes[ri].vtype == ev ? gv : ev;
      if (type_count(sol, target) >= inst.fleet_bounds[target]) continue;
      auto t = flipped(ri);
      if (!t) continue;
      RouteContrib a = contrib(sol.routes[ri], inst);
      RouteContrib b = contrib(*t, inst);
      const double d_cost = (b.energy + b.fleet) - (a.energy + a.fleet);
      const double new_co2 = sol.co2_kg - a.co2 + b.co2;
      const double d_def = b.deficit - a.deficit;
      if (d_cost + params.rho4 * d_def < -kTol && new_co2 <= co2_cap + kTol) {
        commit_route(sol, ri, std::move(*t), inst);
        improved = true;
      }
    }
  }

  // Relieve energy-infeasible electric routes with worst-relocate.
  for (int ri = 0; ri < static_cast<int>(sol.routes.size()); ++ri) {
    if (inst.vehicle_types[sol.routes[ri].vtype].kind != PowerKind::Electric) continue;
    int guard2 = sol.routes[ri].served + 1;
    while (route_energy_deficit(sol.routes[ri], inst) > kTol && guard2-- > 0 &&
           sol.routes[ri].served > 0) {
      int worst = -1;
      double best_saving = -kInfCost;
      for (int v : sol.routes[ri].seq) {
        if (inst.vx(v).kind != VertexKind::Pickup) continue;
        int r = inst.request_of(v);
        double s = removal_saving(sol, r, c);
        if (s > best_saving) {
          best_saving = s;
          worst = r;
        }
      }
      if (worst < 0) break;
      Route nr = route_without(sol, worst, c);
      BestSpot best;
      for (int rj = 0; rj < static_cast<int>(sol.routes.size()); ++rj) {
        if (rj == ri) continue;
        auto cand = try_insert(sol.routes[rj], worst, sol, c);
        if (cand && cand->delta < best.delta) {
          best.route = rj;
          best.delta = cand->delta;
          best.tent = std::move(cand->tent);
        }
      }
      if (best.route < 0) break;  // leave the deficit to the penalty
      commit_route(sol, ri, std::move(nr), c.inst);
      sol.where[worst] = Solution::Loc{};
      commit_route(sol, best.route, std::move(best.tent), c.inst);
    }
  }
  drop_empty_routes(sol, inst);
}

bool energy_feasible(const Solution& sol, const Instance& inst) {
  for (const Route& r : sol.routes) {
    if (inst.vehicle_types[r.vtype].kind != PowerKind::Electric) continue;
    if (!propagate_soc(r, inst).feasible) return false;
  }
  return true;
}

bool co2_feasible(const Solution& sol, const Instance& inst, double co2_cap) {
  (void)inst;
  return sol.co2_kg <= co2_cap + kTol;
}

namespace {

std::uint64_t solution_signature(const Solution& sol) {
  std::vector<std::uint64_t> hashes;
  for (const Route& r : sol.routes) {
    std::uint64_t h = 1469598103934665603ULL ^ static_cast<std::uint64_t>(r.vtype);
    for (int v : r.seq) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL;
      h *= 1099511628211ULL;
    }
    hashes.push_back(h);
  }
  std::sort(hashes.begin(), hashes.end());
  std::uint64_t h = 14695981039346656037ULL;
  for (std::uint64_t x : hashes) {
    h ^= x;
    h *= 1099511628211ULL;
  }
  return h;
}

class TabuList {
 public:
  explicit TabuList(std::size_t cap = 10000) : cap_(cap) {}
  bool contains(std::uint64_t sig) const { return set_.count(sig) > 0; }
  void insert(std::uint64_t sig) {
    if (set_.insert(sig).second) {
      order_.push_back(sig);
      if (order_.size() > cap_) {
        set_.erase(order_.front());
        order_.pop_front();
      }
    }
  }

 private:
  std::size_t cap_;
  std::unordered_set<std::uint64_t> set_;
  std::deque<std::uint64_t> order_;
};

bool fully_feasible(const Solution& sol, const Instance& inst, double co2_cap) {
  return sol.n_unserved() == 0 && energy_feasible(sol, inst) &&
         co2_feasible(sol, inst, co2_cap) && detect_conflicts(sol, inst).empty();
}

}  // namespace

SolveResult solve_fs_mfrp(const Instance& inst, double co2_cap, const SearchParams& params,
                          std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);
  SolveResult out;
  SearchTrace& trace = out.trace;

  Solution s = generate_init_sol(inst, co2_cap, params, rng);
  Solution sp = s;      // temporary solution s'
  Solution sbest = s;
  bool best_ok = fully_feasible(sbest, inst, co2_cap);
  if (best_ok) trace.best_updates.push_back({0, sbest.cost()});

  const double tmax =
      inst.n_requests() > 0 && s.cost() > 0
          ? params.t_max * (s.cost() / static_cast<double>(inst.n_requests()))
          : params.t_max;
  double T = tmax;
  long i_imp = 0;
  int stagnant = 0;
  bool improved_since_restart = false;
  TabuList tabu;

  for (long iter = 1; iter <= params.iter_max; ++iter) {
    ++trace.iterations;
    ++i_imp;
    if (stagnant >= params.n_stagnant) break;

    const LsOperator op = static_cast<LsOperator>(rng.index(7));
    ++trace.operator_uses[static_cast<int>(op)];
    apply_operator(op, sp, inst, co2_cap, params, rng);
    if (params.n_remove > 0 && iter % params.n_remove == 0) {
      ++trace.operator_uses[7];
      remove_route_op(sp, inst, co2_cap, params, rng);
    }

    if (penalized_cost(sp, co2_cap, params) < penalized_cost(s, co2_cap, params) + T) {
      s = sp;
      ++trace.acceptances;
      if (s.n_unserved() == 0) {
        route_exchange_improve(s, inst, co2_cap, params, rng);
        const bool promising =
            (s.cost() < sbest.cost() - kTol || s.n_vehicles < sbest.n_vehicles || !best_ok) &&
            co2_feasible(s, inst, co2_cap);
        if (promising && (!detect_conflicts(s, inst).empty() || !energy_feasible(s, inst))) {
          const std::uint64_t sig = solution_signature(s);
          if (!tabu.contains(sig) && rng.uniform01() < params.alpha_repair) {
            tabu.insert(sig);
            ++trace.repair_calls;
            repair_energy_feasibility(s, inst, rng);
            if (s.n_unserved() != 0 || !detect_conflicts(s, inst).empty())
              repair_sol(s, inst, params, rng);
          }
        }
        const bool better = !best_ok || s.cost() < sbest.cost() - kTol;
        if (better && fully_feasible(s, inst, co2_cap)) {
          sbest = s;
          best_ok = true;
          i_imp = 0;
          stagnant = 0;
          improved_since_restart = true;
          trace.best_updates.push_back({iter, sbest.cost()});
        }
      }
    }

    if (i_imp > 0) {
      T -= tmax / params.T_red;
      if (T < 0) {
        T = rng.uniform01() * tmax;
        if (i_imp > static_cast<long>(params.n_imp) * std::max(1, sbest.n_vehicles)) {
          sp = sbest;
          i_imp = 0;
          if (!improved_since_restart)
            ++stagnant;
          else
            stagnant = 0;
          improved_since_restart = false;
        }
      }
    }
  }

  out.best = sbest;
  out.feasible = fully_feasible(out.best, inst, co2_cap);
  trace.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double reference_emission(const Instance& inst, const SearchParams& params, std::uint64_t seed) {
  Instance gv_only = inst;
  const int ev = gv_only.electric_type();
  if (ev >= 0) gv_only.fleet_bounds[ev] = 0;
  SolveResult res = solve_fs_mfrp(gv_only, std::numeric_limits<double>::infinity(), params, seed);
  return res.best.co2_kg;
}

SearchParams load_params(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open parameter file " + path);
  SearchParams p;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    std::string key, eq;
    if (!(ss >> key)) continue;
    std::string rest;
    std::getline(ss, rest);
    const auto pos = rest.find('=');
    std::string val = pos == std::string::npos ? rest : rest.substr(pos + 1);
    std::istringstream vs(val);
    if (key == "rho1") vs >> p.rho1;
    else if (key == "rho2") vs >> p.rho2;
    else if (key == "rho3") vs >> p.rho3;
    else if (key == "rho4") vs >> p.rho4;
    else if (key == "n_remove") vs >> p.n_remove;
    else if (key == "n_stagnant") vs >> p.n_stagnant;
    else if (key == "iter_max") vs >> p.iter_max;
    else if (key == "n_imp") vs >> p.n_imp;
    else if (key == "T_red") vs >> p.T_red;
    else if (key == "t_max") vs >> p.t_max;
    else if (key == "delta_min") vs >> p.delta_min;
    else if (key == "delta_max") vs >> p.delta_max;
    else if (key == "alpha_repair") vs >> p.alpha_repair;
    else if (key == "regret_k") vs >> p.regret_k;
    else if (key == "init_samples") vs >> p.init_samples;
    else if (key == "remove_cap") vs >> p.remove_cap;
    else if (key == "seed") vs >> p.seed;
    else throw std::runtime_error("unknown parameter key '" + key + "'");
  }
  return p;
}

void save_params(const SearchParams& p, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open parameter file " + path + " for writing");
  f << "rho1 = " << p.rho1 << "\n"
    << "rho2 = " << p.rho2 << "\n"
    << "rho3 = " << p.rho3 << "\n"
    << "rho4 = " << p.rho4 << "\n"
    << "n_remove = " << p.n_remove << "\n"
    << "n_stagnant = " << p.n_stagnant << "\n"
    << "iter_max = " << p.iter_max << "\n"
    << "n_imp = " << p.n_imp << "\n"
    << "T_red = " << p.T_red << "\n"
    << "t_max = " << p.t_max << "\n"
    << "delta_min = " << p.delta_min << "\n"
    << "delta_max = " << p.delta_max << "\n"
    << "alpha_repair = " << p.alpha_repair << "\n"
    << "regret_k = " << p.regret_k << "\n"
    << "init_samples = " << p.init_samples << "\n"
    << "remove_cap = " << p.remove_cap << "\n"
    << "seed = " << p.seed << "\n";
}

}  // namespace feeder
