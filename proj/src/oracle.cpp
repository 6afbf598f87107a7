#include "feeder/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace feeder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Sec kBig = std::numeric_limits<Sec>::max() / 4;
constexpr double kEps = 1e-9;

// --- Independent schedule feasibility -------------------------------------
// Difference constraints solved with Floyd-Warshall on the full distance
// matrix; deliberately a different algorithm from the search-side evaluator.

struct StpBuilder {
  int n = 0;                      // variables; node n is the zero reference
  std::vector<std::vector<Sec>> w;  // w[i][j]: B_j - B_i >= w[i][j]

  explicit StpBuilder(int vars) : n(vars), w(vars + 1, std::vector<Sec>(vars + 1, -kBig)) {
    for (int i = 0; i <= vars; ++i) w[i][i] = 0;
  }
  void ge(int j, int i, Sec c) { w[i][j] = std::max(w[i][j], c); }  // B_j >= B_i + c
  void lower(int i, Sec e) { ge(i, n, e); }                         // B_i >= e
  void upper(int i, Sec l) { ge(n, i, -l); }                        // B_i <= l

  std::optional<std::vector<Sec>> solve() const {
    auto d = w;
    const int m = n + 1;
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i) {
        if (d[i][k] == -kBig) continue;
        for (int j = 0; j < m; ++j) {
          if (d[k][j] == -kBig) continue;
          d[i][j] = std::max(d[i][j], d[i][k] + d[k][j]);
        }
      }
    for (int i = 0; i < m; ++i)
      if (d[i][i] > 0) return std::nullopt;
    std::vector<Sec> b(n);
    for (int i = 0; i < n; ++i) b[i] = d[n][i] == -kBig ? 0 : d[n][i];
    return b;
  }
};

struct RouteDraft {
  int vtype = 0;
  std::vector<int> seq;  // without depots
  Metre dist = 0;
  std::vector<Sec> tau;  // aligned with seq, charger positions only
};

// Adds one route's chain, window and ride constraints. Variable ids are
// offset .. offset + |seq| + 1 (start depot, visits, end depot).
void add_route_constraints(StpBuilder& stp, const RouteDraft& r, const Instance& inst,
                           int offset) {
  const int q = static_cast<int>(r.seq.size());
  auto vid = [&](int pos) { return offset + pos; };  // pos 0 = start depot
  std::vector<int> full;
  full.push_back(inst.depot_start());
  for (int v : r.seq) full.push_back(v);
  full.push_back(inst.depot_end());
  for (int pos = 0; pos < q + 2; ++pos) {
    const Vertex& v = inst.vx(full[pos]);
    stp.lower(vid(pos), v.tw_open);
    if (v.kind == VertexKind::Pickup || v.kind == VertexKind::Dropoff)
      stp.upper(vid(pos), v.tw_close);
    if (pos + 1 < q + 2) {
      Sec tau = 0;
      if (pos >= 1 && pos <= q) tau = r.tau[pos - 1];
      stp.ge(vid(pos + 1), vid(pos), v.service + tau + inst.time_s(full[pos], full[pos + 1]));
    }
  }
  for (int a = 0; a < q; ++a) {
    const int va = r.seq[a];
    if (inst.vx(va).kind != VertexKind::Pickup) continue;
    const int req = inst.request_of(va);
    for (int b = a + 1; b < q; ++b) {
      if (r.seq[b] == inst.requests[req].dropoff) {
        // B_d - B_p <= L + u
        stp.ge(vid(a + 1), vid(b + 1),
               -(inst.requests[req].max_ride + inst.vx(va).service));
      }
    }
  }
}

struct ChargeOpDraft {
  int route = 0;
  int pos = 0;  // position in draft seq
  int physical = 0;
  Sec tau = 0;
};

// Joint feasibility of all routes including charger service orders. Tries
// every ordering of ops per physical charger (oracle-sized inputs only).
bool joint_schedule_feasible(const std::vector<RouteDraft>& routes, const Instance& inst) {
  std::vector<int> offsets;
  int vars = 0;
  for (const RouteDraft& r : routes) {
    offsets.push_back(vars);
    vars += static_cast<int>(r.seq.size()) + 2;
  }
  std::vector<std::vector<ChargeOpDraft>> per_charger(inst.chargers.size());
  for (int ri = 0; ri < static_cast<int>(routes.size()); ++ri)
    for (int pos = 0; pos < static_cast<int>(routes[ri].seq.size()); ++pos)
      if (inst.is_charger(routes[ri].seq[pos]) && routes[ri].tau[pos] > 0)
        per_charger[inst.vx(routes[ri].seq[pos]).physical_charger].push_back(
            {ri, pos, inst.vx(routes[ri].seq[pos]).physical_charger, routes[ri].tau[pos]});

  std::vector<std::vector<ChargeOpDraft>> contended;
  for (auto& v : per_charger)
    if (v.size() >= 2) contended.push_back(v);

  auto solve_with_orders = [&](const std::vector<std::vector<int>>& orders) {
    StpBuilder stp(vars);
    for (int ri = 0; ri < static_cast<int>(routes.size()); ++ri)
      add_route_constraints(stp, routes[ri], inst, offsets[ri]);
    for (std::size_t c = 0; c < contended.size(); ++c) {
      for (std::size_t k = 0; k + 1 < orders[c].size(); ++k) {
        const ChargeOpDraft& first = contended[c][orders[c][k]];
        const ChargeOpDraft& second = contended[c][orders[c][k + 1]];
        const int vf = offsets[first.route] + first.pos + 1;
        const int vs = offsets[second.route] + second.pos + 1;
        const Sec uf = inst.vx(routes[first.route].seq[first.pos]).service;
        const Sec us = inst.vx(routes[second.route].seq[second.pos]).service;
        // plug-in of `second` waits for `first` to finish
        stp.ge(vs, vf, uf + first.tau - us);
      }
    }
    return stp.solve().has_value();
  };

  if (contended.empty()) {
    return solve_with_orders({});
  }
  // Cartesian product of permutations per contended charger.
  std::vector<std::vector<int>> orders(contended.size());
  for (std::size_t c = 0; c < contended.size(); ++c) {
    orders[c].resize(contended[c].size());
    for (std::size_t i = 0; i < orders[c].size(); ++i) orders[c][i] = static_cast<int>(i);
  }
  std::vector<std::vector<int>> current = orders;
  // Recursive product over per-charger permutations.
  std::function<bool(std::size_t)> rec = [&](std::size_t c) -> bool {
    if (c == contended.size()) return solve_with_orders(current);
    std::vector<int> perm = orders[c];
    std::sort(perm.begin(), perm.end());
    do {
      current[c] = perm;
      if (rec(c + 1)) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
  };
  return rec(0);
}

// --- Charging plan enumeration ---------------------------------------------

// A charging plan is the route sequence with charger visits spliced in
// (using one representative dummy per physical charger) and the aligned
// charge durations; distinct dummy ids are assigned at combination time.
struct ChargePlan {
  std::vector<int> seq;
  std::vector<Sec> tau_at;  // aligned with seq; 0 at non-chargers
  Metre added_dist = 0;
};

struct PlanEnumerator {
  const Instance& inst;
  const VehicleType& vt;
  std::vector<ChargePlan> plans;

  void enumerate(const std::vector<int>& bare, int max_inserts) {
    recurse(bare, std::vector<Sec>(bare.size(), 0), 0, max_inserts);
    std::sort(plans.begin(), plans.end(),
              [](const ChargePlan& a, const ChargePlan& b) { return a.added_dist < b.added_dist; });
    if (plans.size() > 64) plans.resize(64);
  }

 private:
  void recurse(std::vector<int> seq, std::vector<Sec> tau_at, Metre added, int budget) {
    // Arrival SOC along 0 -> seq -> N+1, charge applied on departure.
    const int q = static_cast<int>(seq.size());
    std::vector<double> arrival(q + 1);  // seq positions plus the end depot
    double soc = vt.e_init;
    double min_soc = soc;
    int dip = -1;  // index into arrival
    int prev = inst.depot_start();
    for (int i = 0; i <= q; ++i) {
      const int v = i < q ? seq[i] : inst.depot_end();
      soc -= vt.consumption * inst.dist_km(prev, v);
      arrival[i] = soc;
      if (soc < vt.e_min - kEps && dip < 0) dip = i;
      min_soc = std::min(min_soc, soc);
      if (i < q && inst.is_charger(v)) {
        const double rate =
            inst.charger_types[inst.chargers[inst.vx(v).physical_charger].type].rate_kwh_per_s();
        soc = std::min(vt.e_max, soc + rate * static_cast<double>(tau_at[i]));
      }
      prev = v;
    }
    if (dip < 0) {
      plans.push_back({std::move(seq), std::move(tau_at), added});
      return;
    }
    if (budget <= 0) return;

    for (int a = 0; a <= dip && a <= q; ++a) {
      const int pred = a == 0 ? inst.depot_start() : seq[a - 1];
      const int succ = a == q ? inst.depot_end() : seq[a];
      if (inst.is_charger(pred)) continue;
      const VertexKind sk = inst.vx(succ).kind;
      if (sk != VertexKind::Pickup && sk != VertexKind::DepotEnd) continue;
      for (const PhysicalCharger& pc : inst.chargers) {
        const auto dummies = inst.dummies_of(pc.id);
        if (dummies.empty()) continue;
        const int dv = dummies.front();
        const double soc_pred = a == 0 ? vt.e_init : arrival[a - 1];
        const double at_charger = soc_pred - vt.consumption * inst.dist_km(pred, dv);
        if (at_charger < vt.e_min - kEps) continue;
        const double detour_burn =
            vt.consumption *
            (inst.dist_km(pred, dv) + inst.dist_km(dv, succ) - inst.dist_km(pred, succ));
        const double need = (vt.e_min - min_soc) + detour_burn;
        const double g = std::min(need, vt.e_max - at_charger);
        if (g < kEps) continue;
        const double rate = inst.charger_types[pc.type].rate_kwh_per_s();
        const Sec tau = static_cast<Sec>(std::ceil(g / rate - kEps));
        if (tau <= 0) continue;

        std::vector<int> seq2 = seq;
        std::vector<Sec> tau2 = tau_at;
        seq2.insert(seq2.begin() + a, dv);
        tau2.insert(tau2.begin() + a, tau);
        const Metre add2 = inst.dist_m(pred, dv) + inst.dist_m(dv, succ) - inst.dist_m(pred, succ);
        recurse(std::move(seq2), std::move(tau2), added + add2, budget - 1);
      }
    }
  }
};

// --- Branch and bound -------------------------------------------------------

struct VehicleSlot {
  int vtype = 0;
};

struct Searcher {
  const Instance& inst;
  double cap;  // co2 cap
  double incumbent;
  bool found = false;
  std::vector<RouteDraft> best_routes;
  double best_cost = kInf;
  double best_co2 = 0;

  std::vector<VehicleSlot> fleet;
  std::vector<Metre> min_in;   // admissible per-vertex incoming bound
  double cheapest_rate = 0;    // min EUR/metre over allowed types

  std::vector<RouteDraft> closed;
  std::vector<int> closed_min_req;  // per closed route, min request id (same-type symmetry)

  explicit Searcher(const Instance& i, double co2_cap, double inc)
      : inst(i), cap(co2_cap), incumbent(inc) {
    for (std::size_t t = 0; t < i.vehicle_types.size(); ++t) {
      const int n = std::min(i.fleet_bounds[t], std::max(1, i.n_requests()));
      for (int k = 0; k < n; ++k) fleet.push_back({static_cast<int>(t)});
    }
    std::sort(fleet.begin(), fleet.end(),
              [](const VehicleSlot& a, const VehicleSlot& b) { return a.vtype < b.vtype; });
    min_in.assign(i.n_vertices(), 0);
    for (int v = 1; v < i.n_vertices() - 1; ++v) {
      Metre m = std::numeric_limits<Metre>::max();
      for (int u = 0; u < i.n_vertices() - 1; ++u) {
        if (u == v) continue;
        if (!i.arc(u, v)) continue;
        m = std::min(m, i.dist_m(u, v));
      }
      min_in[v] = m == std::numeric_limits<Metre>::max() ? 0 : m;
    }
    cheapest_rate = kInf;
    for (std::size_t t = 0; t < i.vehicle_types.size(); ++t) {
      if (i.fleet_bounds[t] <= 0) continue;
      cheapest_rate = std::min(
          cheapest_rate, i.vehicle_types[t].energy_price * i.vehicle_types[t].consumption / 1000.0);
    }
    if (cheapest_rate == kInf) cheapest_rate = 0;
  }

  double remaining_lb(std::uint32_t remaining) const {
    Metre m = 0;
    for (int r = 0; r < inst.n_requests(); ++r)
      if (remaining & (1u << r)) m += min_in[inst.pickup_of(r)] + min_in[inst.dropoff_of(r)];
    return cheapest_rate * static_cast<double>(m);
  }

  void run() {
    const std::uint32_t all =
        inst.n_requests() >= 32 ? ~0u : ((1u << inst.n_requests()) - 1u);
    dfs_vehicle(0, all, 0.0, 0.0, -1);
  }

  void dfs_vehicle(std::size_t vi, std::uint32_t remaining, double cost, double co2,
                   int prev_min_req) {
    if (cost + remaining_lb(remaining) >= incumbent - 1e-12) return;
    if (remaining == 0) {
      finalize(cost, co2);
      return;
    }
    if (vi >= fleet.size()) return;

    // Skip the rest of this type (identical vehicles stay unused).
    std::size_t next_type = vi;
    while (next_type < fleet.size() && fleet[next_type].vtype == fleet[vi].vtype) ++next_type;
    dfs_vehicle(next_type, remaining, cost, co2, -1);

    // Or open this vehicle with a non-empty route.
    RouteDraft r;
    r.vtype = fleet[vi].vtype;
    extend(vi, r, remaining, 0, 0, inst.vx(inst.depot_start()).tw_open, cost, co2, prev_min_req);
  }

  void extend(std::size_t vi, RouteDraft& r, std::uint32_t remaining, std::uint32_t onboard,
              int load, Sec depart, double cost, double co2, int prev_min_req) {
    const VehicleType& vt = inst.vehicle_types[r.vtype];
    const int last = r.seq.empty() ? inst.depot_start() : r.seq.back();

    // Close the route.
    if (!r.seq.empty() && onboard == 0) {
      const Metre leg = inst.dist_m(last, inst.depot_end());
      RouteDraft done = r;
      done.dist = r.dist + leg;
      double c2 = cost + (static_cast<double>(leg) / 1000.0) * vt.energy_price * vt.consumption +
                  vt.daily_cost + vt.overnight_charger_cost;
      double g2 = co2;
      if (vt.kind == PowerKind::Gasoline)
        g2 += vt.co2_rate * vt.consumption * static_cast<double>(leg) / 1000.0;
      if (g2 <= cap + kEps && c2 + remaining_lb(remaining) < incumbent - 1e-12) {
        int min_req = inst.n_requests();
        for (int v : done.seq)
          if (inst.vx(v).kind == VertexKind::Pickup)
            min_req = std::min(min_req, inst.request_of(v));
        const bool same_type_ok = prev_min_req < 0 || min_req > prev_min_req;
        if (same_type_ok && route_alone_feasible(done)) {
          closed.push_back(done);
          const int next_prev =
              (vi + 1 < fleet.size() && fleet[vi + 1].vtype == fleet[vi].vtype) ? min_req : -1;
          dfs_vehicle(vi + 1, remaining, c2, g2, next_prev);
          closed.pop_back();
        }
      }
    }

    // Extend with a pickup or an onboard dropoff.
    for (int req = 0; req < inst.n_requests(); ++req) {
      int v = -1;
      if (remaining & (1u << req)) {
        v = inst.pickup_of(req);
        if (load + inst.requests[req].passengers > vt.capacity) continue;
      } else if (onboard & (1u << req)) {
        v = inst.dropoff_of(req);
      } else {
        continue;
      }
      if (!inst.arc(last, v)) continue;
      const Sec arrive = depart + inst.time_s(last, v);
      const Sec begin = std::max(arrive, inst.vx(v).tw_open);
      if (begin > inst.vx(v).tw_close) continue;
      const Metre leg = inst.dist_m(last, v);
      const double c2 =
          cost + (static_cast<double>(leg) / 1000.0) * vt.energy_price * vt.consumption;
      double g2 = co2;
      if (vt.kind == PowerKind::Gasoline)
        g2 += vt.co2_rate * vt.consumption * static_cast<double>(leg) / 1000.0;
      if (g2 > cap + kEps) continue;
      if (c2 + remaining_lb(remaining & ~(inst.vx(v).kind == VertexKind::Pickup
                                              ? (1u << req)
                                              : 0u)) >= incumbent - 1e-12)
        continue;

      r.seq.push_back(v);
      r.dist += leg;
      if (inst.vx(v).kind == VertexKind::Pickup) {
        extend(vi, r, remaining & ~(1u << req), onboard | (1u << req),
               load + inst.requests[req].passengers, begin + inst.vx(v).service, c2, g2,
               prev_min_req);
      } else {
        extend(vi, r, remaining, onboard & ~(1u << req), load - inst.requests[req].passengers,
               begin + inst.vx(v).service, c2, g2, prev_min_req);
      }
      r.dist -= leg;
      r.seq.pop_back();
    }
  }

  bool route_alone_feasible(const RouteDraft& r) const {
    RouteDraft d = r;
    d.tau.assign(r.seq.size(), 0);
    return joint_schedule_feasible({d}, inst);
  }

  void finalize(double cost, double co2) {
    if (co2 > cap + kEps) return;
    // Charging plans for energy-short electric routes.
    std::vector<std::vector<ChargePlan>> options(closed.size());
    std::vector<int> needs_plan;
    for (std::size_t ri = 0; ri < closed.size(); ++ri) {
      const RouteDraft& r = closed[ri];
      const VehicleType& vt = inst.vehicle_types[r.vtype];
      if (vt.kind != PowerKind::Electric) continue;
      double soc = vt.e_init;
      int prev = inst.depot_start();
      bool ok = true;
      std::vector<int> full = r.seq;
      full.push_back(inst.depot_end());
      for (int v : full) {
        soc -= vt.consumption * inst.dist_km(prev, v);
        if (soc < vt.e_min - kEps) ok = false;
        prev = v;
      }
      if (ok) continue;
      PlanEnumerator pe{inst, vt, {}};
      pe.enumerate(r.seq, 3);
      if (pe.plans.empty()) return;  // this assignment cannot be made energy-feasible
      options[ri] = std::move(pe.plans);
      needs_plan.push_back(static_cast<int>(ri));
    }

    // Combine plans (disjoint dummy budgets per physical charger).
    std::vector<int> pick(needs_plan.size(), 0);
    std::function<void(std::size_t, double)> combine = [&](std::size_t k, double extra) {
      if (cost + extra >= incumbent - 1e-12) return;
      if (k == needs_plan.size()) {
        attempt(cost + extra, co2, pick, needs_plan, options);
        return;
      }
      const int ri = needs_plan[k];
      for (std::size_t p = 0; p < options[ri].size(); ++p) {
        pick[k] = static_cast<int>(p);
        const VehicleType& vt = inst.vehicle_types[closed[ri].vtype];
        const double add = static_cast<double>(options[ri][p].added_dist) / 1000.0 *
                           vt.energy_price * vt.consumption;
        combine(k + 1, extra + add);
      }
    };
    combine(0, 0.0);
  }

  void attempt(double cost, double co2, const std::vector<int>& pick,
               const std::vector<int>& needs_plan,
               const std::vector<std::vector<ChargePlan>>& options) {
    // Materialize routes with charger visits, assigning distinct dummies.
    std::vector<RouteDraft> routes = closed;
    for (auto& r : routes) r.tau.assign(r.seq.size(), 0);
    std::vector<int> next_dummy(inst.chargers.size(), 0);

    for (std::size_t k = 0; k < needs_plan.size(); ++k) {
      const int ri = needs_plan[k];
      const ChargePlan& plan = options[ri][pick[k]];
      RouteDraft& r = routes[ri];
      r.seq = plan.seq;
      r.tau = plan.tau_at;
      r.dist = 0;
      int prev = inst.depot_start();
      for (std::size_t i = 0; i < r.seq.size(); ++i) {
        if (inst.is_charger(r.seq[i])) {
          const int physical = inst.vx(r.seq[i]).physical_charger;
          const auto dummies = inst.dummies_of(physical);
          if (next_dummy[physical] >= static_cast<int>(dummies.size())) return;  // out of slots
          r.seq[i] = dummies[next_dummy[physical]++];
        }
        r.dist += inst.dist_m(prev, r.seq[i]);
        prev = r.seq[i];
      }
      r.dist += inst.dist_m(prev, inst.depot_end());
    }

    if (!joint_schedule_feasible(routes, inst)) return;
    if (cost < incumbent - 1e-12) {
      incumbent = cost;
      best_cost = cost;
      best_co2 = co2;
      best_routes = routes;
      found = true;
    }
  }
};

Solution materialize(const std::vector<RouteDraft>& drafts, const Instance& inst) {
  Solution sol;
  for (const RouteDraft& d : drafts) {
    Route r;
    r.vtype = d.vtype;
    r.seq.push_back(inst.depot_start());
    for (int v : d.seq) r.seq.push_back(v);
    r.seq.push_back(inst.depot_end());
    r.charge_tau.assign(r.seq.size(), 0);
    r.charge_wait.assign(r.seq.size(), 0);
    for (std::size_t i = 0; i < d.seq.size(); ++i)
      if (!d.tau.empty()) r.charge_tau[i + 1] = d.tau[i];
    sol.routes.push_back(std::move(r));
  }
  recompute_caches(sol, inst);
  return sol;
}

}  // namespace

OracleResult exact_solve(const Instance& inst, double pi, std::optional<double> gamma,
                         int max_requests, double incumbent_hint) {
  if (inst.n_requests() > max_requests)
    throw std::invalid_argument("exact_solve: size bound exceeded");
  if (inst.n_requests() >= 31) throw std::invalid_argument("exact_solve: mask width exceeded");
  double cap = kInf;
  if (pi > 0) {
    if (!gamma) throw std::invalid_argument("exact_solve: pi > 0 needs a reference emission");
    cap = (1.0 - pi) * *gamma;
  }
  double inc = incumbent_hint == kInf ? kInf : incumbent_hint * (1 + 1e-9) + 1e-7;
  Searcher s(inst, cap, inc);
  s.run();
  OracleResult out;
  out.solved = s.found;
  if (s.found) {
    out.cost = s.best_cost;
    out.co2 = s.best_co2;
    out.best = materialize(s.best_routes, inst);
  }
  return out;
}

OracleResult exact_reference(const Instance& inst, int max_requests) {
  Instance gv_only = inst;
  const int ev = gv_only.electric_type();
  if (ev >= 0) gv_only.fleet_bounds[ev] = 0;
  return exact_solve(gv_only, 0.0, std::nullopt, max_requests);
}

ExactConfigResult exact_best_config(const std::vector<ChargingConfig>& configs,
                                    const std::vector<Scenario>& scenarios, double pi,
                                    int max_requests) {
  if (configs.size() > 8) throw std::invalid_argument("exact_best_config: size bound exceeded");
  ExactConfigResult out;
  double psum = 0;
  for (const Scenario& sc : scenarios) psum += sc.probability;
  if (std::abs(psum - 1.0) > 1e-9)
    throw std::invalid_argument("scenario probabilities must sum to one");

  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    double zbar = 0;
    bool all_ok = true;
    for (const Scenario& sc : scenarios) {
      Instance inst = with_config(sc.instance, configs[ci]);
      OracleResult ref = exact_reference(inst, max_requests);
      if (!ref.solved) {
        all_ok = false;
        break;
      }
      OracleResult low = exact_solve(inst, pi, ref.co2, max_requests);
      if (!low.solved) {
        all_ok = false;
        break;
      }
      zbar += sc.probability * low.cost;
    }
    if (!all_ok) continue;
    const Instance& base = scenarios.front().instance;
    double infra = 0;
    for (std::size_t w = 0; w < configs[ci].counts.size(); ++w) {
      bool open = false;
      for (std::size_t h = 0; h < configs[ci].counts[w].size(); ++h) {
        if (configs[ci].counts[w][h] > 0) {
          open = true;
          infra += configs[ci].counts[w][h] * base.charger_types[h].daily_cost;
        }
      }
      if (open) infra += base.sites[w].opening_cost;
    }
    const double zu = infra + zbar;
    if (out.config_index < 0 || zu < out.z_u - 1e-12) {
      out.config_index = static_cast<int>(ci);
      out.z_u = zu;
      out.zbar_l = zbar;
      out.solved = true;
    }
  }
  return out;
}

}  // namespace feeder
