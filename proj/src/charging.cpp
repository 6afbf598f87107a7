#include "feeder/charging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "feeder/search.hpp"

namespace feeder {

namespace {
constexpr double kEps = 1e-9;

double charger_rate(const Instance& inst, int physical) {
  return inst.charger_types[inst.chargers[physical].type].rate_kwh_per_s();
}
}  // namespace

void ChargerOccupancy::reset(const Instance& inst) {
  by_charger.assign(inst.chargers.size(), {});
  dummy_used.assign(inst.n_vertices(), 0);
}

bool ChargerOccupancy::is_free(int physical, Sec start, Sec end) const {
  for (const Interval& iv : by_charger[physical])
    if (iv.start < end && start < iv.end) return false;
  return true;
}

Sec ChargerOccupancy::earliest_free(int physical, Sec from, Sec len) const {
  Sec t = from;
  for (const Interval& iv : by_charger[physical]) {
    if (iv.end <= t) continue;
    if (iv.start >= t + len) break;
    t = iv.end;
  }
  return t;
}

void ChargerOccupancy::add(int physical, Sec start, Sec end, int vehicle) {
  auto& v = by_charger[physical];
  Interval iv{start, end, vehicle};
  v.insert(std::upper_bound(v.begin(), v.end(), iv,
                            [](const Interval& a, const Interval& b) { return a.start < b.start; }),
           iv);
}

ChargerOccupancy build_occupancy(const Solution& sol, const Instance& inst) {
  ChargerOccupancy occ;
  occ.reset(inst);
  occ.dummy_used = sol.dummy_used;
  if (occ.dummy_used.size() != static_cast<std::size_t>(inst.n_vertices()))
    occ.dummy_used.assign(inst.n_vertices(), 0);
  for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
    for (const ChargingOp& op : charging_ops(sol.routes[ri], inst)) {
      if (op.tau > 0) occ.add(op.physical, op.start, op.start + op.tau, static_cast<int>(ri));
      occ.dummy_used[op.dummy] = 1;
    }
  }
  return occ;
}

EnergyProfile propagate_soc(const Route& route, const Instance& inst) {
  EnergyProfile prof;
  const VehicleType& t = inst.vehicle_types[route.vtype];
  const int q = route.size();
  prof.soc.assign(q, 0);
  if (t.kind != PowerKind::Electric) return prof;

  double soc = t.e_init;
  prof.soc[0] = soc;
  double min_soc = soc;
  for (int i = 1; i < q; ++i) {
    const int prev = route.seq[i - 1];
    if (inst.is_charger(prev) && route.charge_tau[i - 1] > 0) {
      const double add = charger_rate(inst, inst.vx(prev).physical_charger) *
                         static_cast<double>(route.charge_tau[i - 1]);
      prof.charged_kwh += add;
      soc += add;
      if (soc > t.e_max + kEps && prof.first_violation < 0) prof.first_violation = i - 1;
    }
    const double burn = t.consumption * inst.dist_km(prev, route.seq[i]);
    prof.consumed_kwh += burn;
    soc -= burn;
    prof.soc[i] = soc;
    min_soc = std::min(min_soc, soc);
    if (soc < t.e_min - kEps && prof.first_violation < 0) prof.first_violation = i;
  }
  prof.deficit_kwh = std::max(0.0, t.e_min - min_soc);
  prof.feasible = prof.first_violation < 0;
  return prof;
}

std::vector<Conflict> detect_conflicts(const Solution& sol, const Instance& inst) {
  std::vector<Conflict> out;
  std::vector<std::vector<ChargerOccupancy::Interval>> per(inst.chargers.size());
  for (std::size_t ri = 0; ri < sol.routes.size(); ++ri)
    for (const ChargingOp& op : charging_ops(sol.routes[ri], inst))
      if (op.tau > 0) per[op.physical].push_back({op.start, op.start + op.tau, static_cast<int>(ri)});
  for (std::size_t c = 0; c < per.size(); ++c) {
    auto& v = per[c];
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      return a.start < b.start || (a.start == b.start && a.vehicle < b.vehicle);
    });
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = i + 1; j < v.size() && v[j].start < v[i].end; ++j) {
        Conflict cf;
        cf.physical = static_cast<int>(c);
        cf.vehicle_a = v[i].vehicle;
        cf.vehicle_b = v[j].vehicle;
        cf.overlap_start = v[j].start;
        cf.overlap_end = std::min(v[i].end, v[j].end);
        out.push_back(cf);
      }
    }
  }
  return out;
}

std::optional<Route> schedule_charging(const Route& route, ChargerOccupancy& occ,
                                       const Instance& inst, bool respect_occupancy,
                                       Sec max_total_wait) {
  const VehicleType& vt = inst.vehicle_types[route.vtype];
  if (vt.kind != PowerKind::Electric) return route;

  Route work = route;
  if (!work.evaluated) reschedule(work, inst);
  if (!work.feasible) return std::nullopt;

  std::vector<int> consumed;  // dummies claimed by this call
  std::vector<ChargerOccupancy::Interval> local;  // slots claimed by this call
  auto slot_free = [&](int physical, Sec s, Sec e) {
    if (respect_occupancy && !occ.is_free(physical, s, e)) return false;
    for (const auto& iv : local)
      if (iv.vehicle == physical && iv.start < e && s < iv.end) return false;
    return true;
  };
  auto slot_earliest = [&](int physical, Sec from, Sec len) {
    Sec t = from;
    for (int pass = 0; pass < 8; ++pass) {
      Sec t2 = respect_occupancy ? occ.earliest_free(physical, t, len) : t;
      bool moved = false;
      for (const auto& iv : local) {
        if (iv.vehicle == physical && iv.start < t2 + len && t2 < iv.end) {
          t2 = iv.end;
          moved = true;
        }
      }
      if (t2 == t && !moved) return t;
      t = t2;
    }
    return t;
  };

  for (int attempt = 0; attempt < 16; ++attempt) {
    EnergyProfile prof = propagate_soc(work, inst);
    if (prof.feasible) return work;
    const int f = prof.first_violation;
    if (f < 0 || prof.soc[f] > vt.e_max) return std::nullopt;  // overcharge is not ours to fix

    // Suffix minimum of arrival SOC from each position onward.
    const int q = work.size();
    std::vector<double> sufmin(q);
    sufmin[q - 1] = prof.soc[q - 1];
    for (int i = q - 2; i >= 0; --i) sufmin[i] = std::min(prof.soc[i], sufmin[i + 1]);

    Sec existing_wait = 0;
    for (Sec w : work.charge_wait) existing_wait += w;

    struct Candidate {
      Sec score = 0;
      int charger = 0;
      int pos = 0;
      Route tent;
      int dummy = -1;
      Sec start = 0, tau = 0;
    };
    std::optional<Candidate> best;

    for (int a = 1; a <= f && a < q; ++a) {
      const int pred = work.seq[a - 1];
      const int succ = work.seq[a];
      if (inst.is_charger(pred)) continue;  // no charger-to-charger arcs
      const VertexKind sk = inst.vx(succ).kind;
      if (sk != VertexKind::Pickup && sk != VertexKind::DepotEnd) continue;

      for (const PhysicalCharger& pc : inst.chargers) {
        int dummy = -1;
        for (int dv : inst.dummies_of(pc.id)) {
          if (!occ.dummy_used[dv] &&
              std::find(consumed.begin(), consumed.end(), dv) == consumed.end() &&
              std::find(work.seq.begin(), work.seq.end(), dv) == work.seq.end()) {
            dummy = dv;
            break;
          }
        }
        if (dummy < 0) continue;

        const double soc_at_s = prof.soc[a - 1] - vt.consumption * inst.dist_km(pred, dummy);
        if (soc_at_s < vt.e_min - kEps) continue;
        const double detour_burn =
            vt.consumption *
            (inst.dist_km(pred, dummy) + inst.dist_km(dummy, succ) - inst.dist_km(pred, succ));
        const double need = vt.e_min - (sufmin[a] - detour_burn);
        double g = std::min(need, vt.e_max - soc_at_s);
        if (g < kEps) continue;
        const double rate = charger_rate(inst, pc.id);
        Sec tau = static_cast<Sec>(std::ceil(g / rate - kEps));
        if (tau <= 0) continue;

        Route tent = work;
        tent.seq.insert(tent.seq.begin() + a, dummy);
        tent.charge_tau.insert(tent.charge_tau.begin() + a, tau);
        tent.charge_wait.insert(tent.charge_wait.begin() + a, 0);
        if (!reschedule(tent, inst)) continue;

        Sec wait = 0;
        Sec start = tent.begin[a] + inst.vx(dummy).service;
        bool slot_ok = true;
        for (int adjust = 0; adjust < 4; ++adjust) {
          start = tent.begin[a] + inst.vx(dummy).service + tent.charge_wait[a];
          if (slot_free(pc.id, start, start + tau)) break;
          Sec t_free = slot_earliest(pc.id, start, tau);
          wait = tent.charge_wait[a] + (t_free - start);
          if (existing_wait + wait > max_total_wait) {
            slot_ok = false;
            break;
          }
          tent.charge_wait[a] = wait;
          if (!reschedule(tent, inst)) {
            slot_ok = false;
            break;
          }
          if (adjust == 3) slot_ok = slot_free(pc.id, tent.begin[a] + inst.vx(dummy).service + wait,
                                               tent.begin[a] + inst.vx(dummy).service + wait + tau);
        }
        if (!slot_ok) continue;
        start = tent.begin[a] + inst.vx(dummy).service + tent.charge_wait[a];

        const Sec detour_time = inst.time_s(pred, dummy) + inst.vx(dummy).service +
                                inst.time_s(dummy, succ) - inst.time_s(pred, succ);
        const Sec score = detour_time + tent.charge_wait[a];
        if (!best || score < best->score ||
            (score == best->score && (pc.id < best->charger ||
                                      (pc.id == best->charger && a < best->pos)))) {
          Candidate c;
          c.score = score;
          c.charger = pc.id;
          c.pos = a;
          c.tent = std::move(tent);
          c.dummy = dummy;
          c.start = start;
          c.tau = tau;
          best = std::move(c);
        }
      }
    }
    if (!best) return std::nullopt;
    work = best->tent;
    consumed.push_back(best->dummy);
    local.push_back({best->start, best->start + best->tau, best->charger});
  }
  return std::nullopt;
}

void retrim_charging(Route& route, const Instance& inst) {
  const VehicleType& vt = inst.vehicle_types[route.vtype];
  bool has_charger = false;
  for (int v : route.seq)
    if (inst.is_charger(v)) has_charger = true;
  if (!has_charger) return;

  if (vt.kind != PowerKind::Electric) {
    strip_charging(route, inst, nullptr);
    return;
  }

  for (std::size_t i = 0; i < route.charge_tau.size(); ++i) {
    route.charge_tau[i] = 0;
    route.charge_wait[i] = 0;
  }

  // Lazy rule: fix each dip at the latest charger before it with headroom.
  for (int guard = 0; guard < 64; ++guard) {
    EnergyProfile prof = propagate_soc(route, inst);
    if (prof.feasible) break;
    const int f = prof.first_violation;
    if (f < 0) break;
    bool progressed = false;
    for (int c = f - 1; c >= 1; --c) {
      if (!inst.is_charger(route.seq[c])) continue;
      const double rate = charger_rate(inst, inst.vx(route.seq[c]).physical_charger);
      const double post = prof.soc[c] + rate * static_cast<double>(route.charge_tau[c]);
      const double headroom = vt.e_max - post;
      if (headroom < kEps) continue;
      const double need = vt.e_min - prof.soc[f];
      const double g = std::min(need, headroom);
      Sec extra = std::max<Sec>(1, static_cast<Sec>(std::ceil(g / rate - kEps)));
      route.charge_tau[c] += extra;
      progressed = true;
      break;
    }
    if (!progressed) break;  // residual deficit stays, priced by the search
  }

  for (int i = route.size() - 1; i >= 0; --i) {
    if (inst.is_charger(route.seq[i]) && route.charge_tau[i] == 0) {
      route.seq.erase(route.seq.begin() + i);
      route.charge_tau.erase(route.charge_tau.begin() + i);
      route.charge_wait.erase(route.charge_wait.begin() + i);
    }
  }
  reschedule(route, inst);
}

void repair_energy_feasibility(Solution& sol, const Instance& inst, Rng& rng) {
  for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
    Route& r = sol.routes[ri];
    if (inst.vehicle_types[r.vtype].kind != PowerKind::Electric) continue;
    while (!propagate_soc(r, inst).feasible && r.served > 0) {
      std::vector<int> on_route;
      for (int v : r.seq)
        if (inst.vx(v).kind == VertexKind::Pickup) on_route.push_back(inst.request_of(v));
      const int req = on_route[rng.index(on_route.size())];
      remove_request(r, inst.requests[req], inst);
      sol.unserved.push_back(req);
      retrim_charging(r, inst);
    }
  }
  std::sort(sol.unserved.begin(), sol.unserved.end());
  recompute_caches(sol, inst);
}

namespace {

// Greedy reinsertion of one request over candidate EV routes, with
// occupancy-aware charging. Returns true when placed; updates occ.
bool reinsert_on_evs(Solution& sol, const Instance& inst, const SearchParams& params, int req,
                     const std::vector<int>& candidates, ChargerOccupancy& occ, double co2_cap) {
  CostContext ctx;
  ctx.co2_cap = co2_cap;
  ctx.co2_now = sol.co2_kg;
  ctx.params = &params;

  struct Placed {
    int ri = -1;
    double delta = 0;
    Route tent;
  };
  std::optional<Placed> best;
  for (int ri : candidates) {
    auto plan = best_insertion(sol.routes[ri], inst.requests[req], inst, ctx);
    if (!plan) continue;
    Route tent = plan->tentative;
    if (!propagate_soc(tent, inst).feasible) {
      auto charged = schedule_charging(tent, occ, inst, /*respect_occupancy=*/true);
      if (!charged) continue;
      tent = *charged;
    }
    // The insertion may shift this vehicle's existing slots; verify them all.
    bool slots_ok = true;
    for (const ChargingOp& op : charging_ops(tent, inst)) {
      if (op.tau == 0) continue;
      for (const auto& iv : occ.by_charger[op.physical]) {
        if (iv.vehicle == ri) continue;
        if (iv.start < op.start + op.tau && op.start < iv.end) {
          slots_ok = false;
          break;
        }
      }
      if (!slots_ok) break;
    }
    if (!slots_ok) continue;
    if (!best || plan->delta < best->delta) best = Placed{ri, plan->delta, std::move(tent)};
  }
  if (!best) return false;

  for (int v : best->tent.seq)
    if (inst.is_charger(v)) sol.dummy_used[v] = 1;
  sol.routes[best->ri] = std::move(best->tent);
  sol.unserved.erase(std::find(sol.unserved.begin(), sol.unserved.end(), req));
  // Rebuild this vehicle's occupancy entries.
  for (auto& per : occ.by_charger)
    per.erase(std::remove_if(per.begin(), per.end(),
                             [&](const auto& iv) { return iv.vehicle == best->ri; }),
              per.end());
  for (const ChargingOp& op : charging_ops(sol.routes[best->ri], inst))
    if (op.tau > 0) occ.add(op.physical, op.start, op.start + op.tau, best->ri);
  occ.dummy_used = sol.dummy_used;
  return true;
}

}  // namespace

bool repair_sol(Solution& sol, const Instance& inst, const SearchParams& params, Rng& rng,
                int max_rounds) {
  const int ev_type = inst.electric_type();
  const double co2_cap = inst.gamma_ref ? (1.0 - inst.pi) * *inst.gamma_ref
                                        : std::numeric_limits<double>::infinity();

  repair_energy_feasibility(sol, inst, rng);

  for (int round = 0; round < max_rounds; ++round) {
    // Sequential occupancy rebuild over EVs sorted by charged energy.
    std::vector<std::pair<double, int>> evs;
    for (std::size_t ri = 0; ri < sol.routes.size(); ++ri) {
      Route& r = sol.routes[ri];
      if (inst.vehicle_types[r.vtype].kind != PowerKind::Electric) continue;
      double charged = 0;
      for (const ChargingOp& op : charging_ops(r, inst))
        charged += charger_rate(inst, op.physical) * static_cast<double>(op.tau);
      evs.push_back({charged, static_cast<int>(ri)});
    }
    std::sort(evs.begin(), evs.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });

    ChargerOccupancy occ;
    occ.reset(inst);
    for (auto [charged, ri] : evs) {
      Route& r = sol.routes[ri];
      bool conflict = false;
      for (const ChargingOp& op : charging_ops(r, inst)) {
        if (op.tau > 0 && !occ.is_free(op.physical, op.start, op.start + op.tau)) {
          conflict = true;
          break;
        }
      }
      if (conflict) {
        std::vector<int> freed;
        strip_charging(r, inst, &freed);
        for (int v : freed) sol.dummy_used[v] = 0;
        while (!propagate_soc(r, inst).feasible && r.served > 0) {
          std::vector<int> on_route;
          for (int v : r.seq)
            if (inst.vx(v).kind == VertexKind::Pickup) on_route.push_back(inst.request_of(v));
          const int req = on_route[rng.index(on_route.size())];
          remove_request(r, inst.requests[req], inst);
          sol.unserved.push_back(req);
        }
      } else {
        for (const ChargingOp& op : charging_ops(r, inst)) {
          if (op.tau > 0) occ.add(op.physical, op.start, op.start + op.tau, ri);
          occ.dummy_used[op.dummy] = 1;
        }
      }
    }
    recompute_caches(sol, inst);
    occ.dummy_used = sol.dummy_used;

    // Reinsert the pool on k randomly selected EVs, a new EV if needed.
    std::vector<int> pool = sol.unserved;
    shuffle(pool, rng);
    for (int req : pool) {
      std::vector<int> ev_idx;
      for (std::size_t ri = 0; ri < sol.routes.size(); ++ri)
        if (inst.vehicle_types[sol.routes[ri].vtype].kind == PowerKind::Electric)
          ev_idx.push_back(static_cast<int>(ri));
      shuffle(ev_idx, rng);
      if (static_cast<int>(ev_idx.size()) > 3) ev_idx.resize(3);
      if (reinsert_on_evs(sol, inst, params, req, ev_idx, occ, co2_cap)) continue;

      int ev_count = 0;
      for (const Route& r : sol.routes)
        if (r.vtype == ev_type) ++ev_count;
      if (ev_count < inst.fleet_bounds[ev_type]) {
        sol.routes.push_back(make_route(ev_type, inst));
        std::vector<int> fresh = {static_cast<int>(sol.routes.size()) - 1};
        if (!reinsert_on_evs(sol, inst, params, req, fresh, occ, co2_cap)) {
          sol.routes.pop_back();
        }
      }
    }
    drop_empty_routes(sol, inst);
    recompute_caches(sol, inst);
    if (sol.unserved.empty() && detect_conflicts(sol, inst).empty()) {
      bool energy_ok = true;
      for (const Route& r : sol.routes)
        if (inst.vehicle_types[r.vtype].kind == PowerKind::Electric &&
            !propagate_soc(r, inst).feasible)
          energy_ok = false;
      if (energy_ok) return true;
    }
  }
  return false;
}

}  // namespace feeder
