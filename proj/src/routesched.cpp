#include "feeder/routesched.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "feeder/search.hpp"
#include "json.hpp"

namespace feeder {

namespace {

constexpr Sec kInf = std::numeric_limits<Sec>::max() / 4;

struct PairPos {
  int req = -1;
  int ppos = -1;
  int dpos = -1;
};

// Complete pickup/dropoff pairs on the route, in pickup order.
std::vector<PairPos> request_positions(const std::vector<int>& seq, const Instance& inst) {
  std::vector<PairPos> pairs;
  pairs.reserve(seq.size() / 2);
  for (int i = 0; i < static_cast<int>(seq.size()); ++i) {
    const int r = inst.request_of(seq[i]);
    if (r < 0) continue;
    if (inst.vx(seq[i]).kind == VertexKind::Pickup) {
      pairs.push_back({r, i, -1});
    } else {
      for (PairPos& p : pairs)
        if (p.req == r && p.dpos < 0) {
          p.dpos = i;
          break;
        }
    }
  }
  std::size_t keep = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i].dpos > pairs[i].ppos) pairs[keep++] = pairs[i];
  pairs.resize(keep);
  return pairs;
}

// Scratch state for one evaluation: gaps, window bounds and the pickup /
// dropoff pairing are computed once and shared by every pass.
struct EvalScratch {
  int q = 0;
  std::vector<Sec> gap;       // departure-to-arrival separation per arc
  std::vector<Sec> open, close;
  std::vector<Sec> ride_cap;  // per dropoff position: L + u(pickup); -1 otherwise
  std::vector<int> pair_pick; // per dropoff position: pickup position; -1 otherwise
  std::vector<PairPos> pairs;
  std::vector<Sec> B, W, suffix_w;
  // Epoch-tagged request-to-pickup-position index; avoids per-eval clears.
  std::vector<int> req_pos, req_epoch;
  int epoch = 0;

  void fill(const Route& r, const Instance& inst) {
    q = r.size();
    gap.resize(q > 0 ? q - 1 : 0);
    open.resize(q);
    close.resize(q);
    ride_cap.assign(q, -1);
    pair_pick.assign(q, -1);
    if (req_pos.size() < static_cast<std::size_t>(inst.n_requests())) {
      req_pos.assign(inst.n_requests(), -1);
      req_epoch.assign(inst.n_requests(), -1);
    }
    ++epoch;
    pairs.clear();
    for (int i = 0; i < q; ++i) {
      const Vertex& v = inst.vx(r.seq[i]);
      open[i] = v.tw_open;
      close[i] = v.tw_close;
      if (i + 1 < q)
        gap[i] = v.service + r.charge_wait[i] + r.charge_tau[i] +
                 inst.time_s(r.seq[i], r.seq[i + 1]);
      const int req = inst.request_of(r.seq[i]);
      if (req < 0) continue;
      if (v.kind == VertexKind::Pickup) {
        req_pos[req] = i;
        req_epoch[req] = epoch;
      } else if (req_epoch[req] == epoch && req_pos[req] >= 0) {
        const int ppos = req_pos[req];
        pairs.push_back({req, ppos, i});
        ride_cap[i] = inst.requests[req].max_ride + inst.vx(r.seq[ppos]).service;
        pair_pick[i] = ppos;
      }
    }
  }

  bool forward_earliest() {
    B.resize(q);
    B[0] = std::max<Sec>(0, open[0]);
    for (int i = 1; i < q; ++i) {
      B[i] = std::max(B[i - 1] + gap[i - 1], open[i]);
      if (B[i] > close[i]) return false;
    }
    return true;
  }

  bool rides_ok() const {
    for (int i = 0; i < q; ++i)
      if (pair_pick[i] >= 0 && B[i] - B[pair_pick[i]] > ride_cap[i]) return false;
    return true;
  }

  void recompute_waits() {
    W.assign(q, 0);
    for (int i = 1; i < q; ++i) W[i] = B[i] - (B[i - 1] + gap[i - 1]);
  }

  // Sound certificate of ride infeasibility: interval propagation over the
  // chain, window and ride constraints. Every derived bound is valid for all
  // schedules, so an empty interval dooms the sequence; a full interval does
  // not certify feasibility (the exact fallback decides those).
  bool provably_ride_infeasible() {
    lo.assign(B.begin(), B.end());  // forward-earliest is the tightest start
    hi.resize(q);
    hi[q - 1] = close[q - 1];
    for (int i = q - 2; i >= 0; --i) hi[i] = std::min(close[i], hi[i + 1] - gap[i]);
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (int i = 0; i < q; ++i) {
        if (i > 0) lo[i] = std::max(lo[i], lo[i - 1] + gap[i - 1]);
        if (pair_pick[i] >= 0)  // B_d <= B_p + cap
          hi[i] = std::min(hi[i], hi[pair_pick[i]] + ride_cap[i]);
        if (lo[i] > hi[i]) return true;
      }
      for (int i = q - 1; i >= 0; --i) {
        if (i + 1 < q) hi[i] = std::min(hi[i], hi[i + 1] - gap[i]);
        if (pair_pick[i] >= 0)  // B_p >= B_d - cap
          lo[pair_pick[i]] = std::max(lo[pair_pick[i]], lo[i] - ride_cap[i]);
        if (lo[i] > hi[i]) return true;
      }
    }
    return false;
  }
  std::vector<Sec> lo, hi;

  // Forward time slack at position j; ride terms apply to dropoffs whose
  // pickup precedes j.
  Sec forward_slack(int j) const {
    Sec cum_w = 0;
    Sec slack = kInf;
    for (int i = j; i < q; ++i) {
      if (i > j) cum_w += W[i];
      Sec s = close[i] - B[i];
      if (pair_pick[i] >= 0 && pair_pick[i] < j)
        s = std::min(s, ride_cap[i] - (B[i] - B[pair_pick[i]]));
      slack = std::min(slack, cum_w + std::max<Sec>(0, s));
      if (slack == 0) break;
    }
    return slack;
  }

  // Direct per-constraint recheck; every feasible verdict must pass it.
  bool verify() const {
    for (int i = 0; i < q; ++i) {
      if (B[i] < open[i] || B[i] > close[i]) return false;
      if (i > 0 && B[i] < B[i - 1] + gap[i - 1]) return false;
    }
    return rides_ok();
  }

  // Exact feasibility of the difference-constraint system by Bellman-Ford
  // longest path; writes the witness schedule into B.
  bool stp() {
    const int src = q;
    struct Edge {
      int from, to;
      Sec w;
    };
    std::vector<Edge> edges;
    edges.reserve(3 * q);
    for (int i = 0; i < q; ++i) {
      edges.push_back({src, i, open[i]});
      edges.push_back({i, src, -close[i]});
      if (i + 1 < q) edges.push_back({i, i + 1, gap[i]});
      if (pair_pick[i] >= 0) edges.push_back({i, pair_pick[i], -ride_cap[i]});
    }
    std::vector<Sec> d(q + 1, -kInf);
    d[src] = 0;
    bool changed = true;
    for (int round = 0; round <= q + 1 && changed; ++round) {
      changed = false;
      for (const Edge& e : edges) {
        if (d[e.from] == -kInf) continue;
        if (d[e.from] + e.w > d[e.to]) {
          d[e.to] = d[e.from] + e.w;
          changed = true;
        }
      }
      if (round == q + 1 && changed) return false;  // positive cycle
    }
    if (d[src] > 0) return false;
    B.assign(d.begin(), d.begin() + q);
    return verify();
  }
};

thread_local EvalScratch g_scratch;

}  // namespace

ScheduleResult evaluate_route(const Route& route, const Instance& inst) {
  ScheduleResult res;
  const int q = route.size();
  if (q < 2 || route.seq.front() != inst.depot_start() || route.seq.back() != inst.depot_end()) {
    res.violation = RouteViolation::Load;
    return res;
  }

  // Loads are schedule independent; a dropoff preceding its pickup dips the
  // profile negative and an unmatched pickup leaves the final load positive.
  const int cap = inst.vehicle_types[route.vtype].capacity;
  res.load.resize(q);
  int cur = 0;
  bool load_ok = true;
  for (int i = 0; i < q; ++i) {
    cur += inst.vx(route.seq[i]).load_delta;
    res.load[i] = cur;
    if (cur < 0 || cur > cap) load_ok = false;
  }
  if (cur != 0) load_ok = false;
  if (!load_ok) {
    res.violation = RouteViolation::Load;
    return res;
  }

  EvalScratch& sc = g_scratch;
  sc.fill(route, inst);
  if (!sc.forward_earliest()) {
    res.violation = RouteViolation::Tw;
    return res;
  }

  auto finish = [&]() {
    res.feasible = true;
    res.violation = RouteViolation::None;
    res.begin = sc.B;
    for (const PairPos& p : sc.pairs) {
      res.request_ids.push_back(p.req);
      res.ride.push_back(res.begin[p.dpos] -
                         (res.begin[p.ppos] + inst.vx(route.seq[p.ppos]).service));
    }
  };

  if (sc.rides_ok()) {
    finish();
    return res;
  }
  if (sc.provably_ride_infeasible()) {
    res.violation = RouteViolation::RideTime;
    return res;
  }

  // Eight-step slack shifts: delay the depot departure, then each pickup, to
  // absorb ride-time excess into waiting time. Stops as soon as the rides
  // fit; the closing verify() guards the verdict either way.
  sc.recompute_waits();
  Sec total_w = 0;
  for (int i = 1; i < q; ++i) total_w += sc.W[i];
  const Sec shift = std::min(sc.forward_slack(0), total_w);
  if (shift > 0) {
    sc.B[0] += shift;
    for (int i = 1; i < q; ++i) sc.B[i] = std::max(sc.B[i], sc.B[i - 1] + sc.gap[i - 1]);
    sc.recompute_waits();
  }
  // Delaying a pickup can only relieve the ride of its own passenger, so
  // only pickups of currently violated pairs are shifted, left to right.
  bool settled = sc.rides_ok();
  for (int round = 0; round < q && !settled; ++round) {
    int j = -1;
    for (int i = 0; i < q; ++i) {
      if (sc.pair_pick[i] >= 0 && sc.B[i] - sc.B[sc.pair_pick[i]] > sc.ride_cap[i] &&
          (j < 0 || sc.pair_pick[i] < j))
        j = sc.pair_pick[i];
    }
    if (j <= 0) break;
    Sec tail_w = 0;
    for (int i = j + 1; i < q; ++i) tail_w += sc.W[i];
    const Sec d = std::min(sc.forward_slack(j), tail_w);
    if (d <= 0) break;  // no slack left for the earliest violated pickup
    sc.B[j] += d;
    for (int i = j + 1; i < q; ++i) sc.B[i] = std::max(sc.B[i], sc.B[i - 1] + sc.gap[i - 1]);
    sc.recompute_waits();
    settled = sc.rides_ok();
  }
  if (settled && sc.verify()) {
    finish();
    return res;
  }

  // Exact fallback for the rare sequences the greedy shifts cannot settle.
  if (sc.stp()) {
    finish();
    return res;
  }
  res.violation = RouteViolation::RideTime;
  return res;
}

bool reschedule(Route& route, const Instance& inst) {
  ScheduleResult r = evaluate_route(route, inst);
  const int q = route.size();
  route.evaluated = true;
  route.feasible = r.feasible;
  route.begin = std::move(r.begin);
  route.load = std::move(r.load);
  route.served = 0;
  route.length_m = 0;
  for (int i = 0; i + 1 < q; ++i) route.length_m += inst.dist_m(route.seq[i], route.seq[i + 1]);
  for (int i = 0; i < q; ++i)
    if (inst.vx(route.seq[i]).kind == VertexKind::Pickup) ++route.served;

  auto gap = [&](int i) {
    return inst.vx(route.seq[i]).service + route.charge_wait[i] + route.charge_tau[i] +
           inst.time_s(route.seq[i], route.seq[i + 1]);
  };
  route.earliest.resize(q);
  route.latest.resize(q);
  route.earliest[0] = std::max<Sec>(0, inst.vx(route.seq[0]).tw_open);
  for (int i = 1; i < q; ++i)
    route.earliest[i] =
        std::max(route.earliest[i - 1] + gap(i - 1), inst.vx(route.seq[i]).tw_open);
  route.latest[q - 1] = inst.vx(route.seq[q - 1]).tw_close;
  for (int i = q - 2; i >= 0; --i)
    route.latest[i] = std::min(inst.vx(route.seq[i]).tw_close, route.latest[i + 1] - gap(i));
  return route.feasible;
}

double route_cost(const Route& route, const Instance& inst) {
  const VehicleType& t = inst.vehicle_types[route.vtype];
  Metre len = 0;
  int served = 0;
  for (int i = 0; i + 1 < route.size(); ++i) len += inst.dist_m(route.seq[i], route.seq[i + 1]);
  for (int v : route.seq)
    if (inst.vx(v).kind == VertexKind::Pickup) ++served;
  double cost = t.energy_price * t.consumption * (static_cast<double>(len) / 1000.0);
  if (served > 0) cost += t.daily_cost + t.overnight_charger_cost;
  return cost;
}

double co2_of(const Route& route, const Instance& inst) {
  const VehicleType& t = inst.vehicle_types[route.vtype];
  if (t.kind != PowerKind::Gasoline) return 0;
  Metre len = 0;
  for (int i = 0; i + 1 < route.size(); ++i) len += inst.dist_m(route.seq[i], route.seq[i + 1]);
  return t.co2_rate * t.consumption * (static_cast<double>(len) / 1000.0);
}

double solution_co2(const Solution& sol, const Instance& inst) {
  double g = 0;
  for (const Route& r : sol.routes) g += co2_of(r, inst);
  return g;
}

Route make_route(int vtype, const Instance& inst) {
  Route r;
  r.vtype = vtype;
  r.seq = {inst.depot_start(), inst.depot_end()};
  r.charge_tau.assign(2, 0);
  r.charge_wait.assign(2, 0);
  reschedule(r, inst);
  return r;
}

void insert_request(Route& route, const Request& req, int ppos, int dpos, const Instance& inst) {
  route.seq.insert(route.seq.begin() + ppos, req.pickup);
  route.charge_tau.insert(route.charge_tau.begin() + ppos, 0);
  route.charge_wait.insert(route.charge_wait.begin() + ppos, 0);
  route.seq.insert(route.seq.begin() + dpos, req.dropoff);
  route.charge_tau.insert(route.charge_tau.begin() + dpos, 0);
  route.charge_wait.insert(route.charge_wait.begin() + dpos, 0);
  reschedule(route, inst);
}

void remove_request(Route& route, const Request& req, const Instance& inst) {
  for (int i = route.size() - 1; i >= 0; --i) {
    if (route.seq[i] == req.pickup || route.seq[i] == req.dropoff) {
      route.seq.erase(route.seq.begin() + i);
      route.charge_tau.erase(route.charge_tau.begin() + i);
      route.charge_wait.erase(route.charge_wait.begin() + i);
    }
  }
  reschedule(route, inst);
}

void strip_charging(Route& route, const Instance& inst, std::vector<int>* freed_dummies) {
  for (int i = route.size() - 1; i >= 0; --i) {
    if (inst.is_charger(route.seq[i])) {
      if (freed_dummies) freed_dummies->push_back(route.seq[i]);
      route.seq.erase(route.seq.begin() + i);
      route.charge_tau.erase(route.charge_tau.begin() + i);
      route.charge_wait.erase(route.charge_wait.begin() + i);
    }
  }
  reschedule(route, inst);
}

std::vector<ChargingOp> charging_ops(const Route& route, const Instance& inst) {
  std::vector<ChargingOp> ops;
  for (int i = 0; i < route.size(); ++i) {
    if (!inst.is_charger(route.seq[i])) continue;
    ChargingOp op;
    op.position = i;
    op.dummy = route.seq[i];
    op.physical = inst.vx(route.seq[i]).physical_charger;
    op.start = (i < static_cast<int>(route.begin.size()) ? route.begin[i] : 0) +
               inst.vx(route.seq[i]).service + route.charge_wait[i];
    op.tau = route.charge_tau[i];
    ops.push_back(op);
  }
  return ops;
}

std::optional<InsertionPlan> best_insertion(const Route& route, const Request& req,
                                            const Instance& inst, const CostContext& ctx) {
  Route fallback;
  if (!route.evaluated) {
    fallback = route;
    reschedule(fallback, inst);
  }
  const Route& base = route.evaluated ? route : fallback;
  if (!base.feasible) return std::nullopt;

  const int q = base.size();
  const int cap = inst.vehicle_types[base.vtype].capacity;
  if (req.passengers > cap) return std::nullopt;
  const Vertex& pv = inst.vx(req.pickup);
  const Vertex& dv = inst.vx(req.dropoff);
  const double cost_before = route_cost(base, inst);
  const double co2_before = co2_of(base, inst);
  const double deficit_before =
      ctx.params != nullptr ? route_energy_deficit(base, inst) : 0.0;
  const bool was_empty = base.served == 0;

  auto gap_from = [&](int i, int v) {
    return inst.vx(base.seq[i]).service + base.charge_wait[i] + base.charge_tau[i] +
           inst.time_s(base.seq[i], v);
  };
  const VehicleType& vt = inst.vehicle_types[base.vtype];
  const double rate = vt.energy_price * vt.consumption / 1000.0;  // EUR per metre
  const double fixed_lb =
      was_empty ? (ctx.params != nullptr ? ctx.params->rho2 : vt.daily_cost) : 0.0;

  // Builds the candidate sequence without copying the evaluation caches.
  auto splice = [&](int a, int j) {
    Route tent;
    tent.vtype = base.vtype;
    tent.seq.reserve(q + 2);
    tent.charge_tau.reserve(q + 2);
    tent.charge_wait.reserve(q + 2);
    for (int i = 0; i < q; ++i) {
      if (i == a) {
        tent.seq.push_back(req.pickup);
        tent.charge_tau.push_back(0);
        tent.charge_wait.push_back(0);
      }
      if (i == j) {
        tent.seq.push_back(req.dropoff);
        tent.charge_tau.push_back(0);
        tent.charge_wait.push_back(0);
      }
      tent.seq.push_back(base.seq[i]);
      tent.charge_tau.push_back(base.charge_tau[i]);
      tent.charge_wait.push_back(base.charge_wait[i]);
    }
    return tent;
  };

  std::optional<InsertionPlan> best;
  for (int a = 1; a < q; ++a) {
    // Visits already past the pickup window rule out this and every later
    // position (earliest[] is non-decreasing along the route).
    if (base.earliest[a - 1] > pv.tw_close) break;
    // Earliest begin at the pickup when inserted before original position a.
    Sec ea = std::max(pv.tw_open, base.earliest[a - 1] + gap_from(a - 1, req.pickup));
    if (ea > pv.tw_close) continue;
    // Triangle-based lower bound on the dropoff begin; rounding to integer
    // seconds can undercut the true bound by a couple of seconds.
    const Sec via_p = ea + pv.service + inst.time_s(req.pickup, req.dropoff) - 4;
    if (via_p > dv.tw_close) continue;
    const bool chain_a_ok =
        ea + pv.service + inst.time_s(req.pickup, base.seq[a]) <= base.latest[a];
    const Metre detour_p = inst.dist_m(base.seq[a - 1], req.pickup) +
                           inst.dist_m(req.pickup, base.seq[a]) -
                           inst.dist_m(base.seq[a - 1], base.seq[a]);

    int seg_max = base.load[a - 1];
    for (int j = a; j < q; ++j) {
      if (j > a) seg_max = std::max(seg_max, base.load[j - 1]);
      if (seg_max + req.passengers > cap) break;
      if (j > a && !chain_a_ok) break;
      // Past the ride-time reach of any feasible pickup time.
      if (j > a && base.earliest[j - 1] - pv.tw_close - pv.service > req.max_ride) break;

      Sec ed;
      int succ;
      Metre detour;  // exact added distance of the double splice
      if (j == a) {
        ed = std::max(dv.tw_open, ea + pv.service + inst.time_s(req.pickup, req.dropoff));
        succ = base.seq[a];
        detour = inst.dist_m(base.seq[a - 1], req.pickup) +
                 inst.dist_m(req.pickup, req.dropoff) + inst.dist_m(req.dropoff, succ) -
                 inst.dist_m(base.seq[a - 1], succ);
      } else {
        if (inst.is_charger(base.seq[j - 1])) continue;  // no charger -> dropoff arc
        Sec via_prev = base.earliest[j - 1] + gap_from(j - 1, req.dropoff);
        ed = std::max(dv.tw_open, std::max(via_prev, via_p));
        succ = base.seq[j];
        detour = detour_p + inst.dist_m(base.seq[j - 1], req.dropoff) +
                 inst.dist_m(req.dropoff, succ) - inst.dist_m(base.seq[j - 1], succ);
      }
      if (ed > dv.tw_close) continue;
      if (ed - pv.tw_close - pv.service > req.max_ride) continue;
      if (ed + dv.service + inst.time_s(req.dropoff, succ) > base.latest[j]) continue;
      // The remaining delta terms (CO2 and energy penalties) never decrease
      // on insertion, so the distance part bounds the delta from below.
      if (best && rate * static_cast<double>(detour) + fixed_lb >= best->delta - 1e-12)
        continue;

      Route tent = splice(a, j);
      if (!reschedule(tent, inst)) continue;

      double delta = route_cost(tent, inst) - cost_before;
      if (ctx.params != nullptr) {
        const SearchParams& p = *ctx.params;
        if (was_empty) delta += p.rho2;
        double co2_after = co2_of(tent, inst);
        double pen_now = std::max(0.0, ctx.co2_now - ctx.co2_cap);
        double pen_new = std::max(0.0, ctx.co2_now - co2_before + co2_after - ctx.co2_cap);
        delta += p.rho3 * (pen_new - pen_now);
        delta += p.rho4 * (route_energy_deficit(tent, inst) - deficit_before);
      }
      if (!best || delta < best->delta) {
        InsertionPlan plan;
        plan.ppos = a;
        plan.dpos = j + 1;
        plan.delta = delta;
        plan.tentative = std::move(tent);
        best = std::move(plan);
      }
    }
  }
  return best;
}

double route_energy_deficit(const Route& route, const Instance& inst) {
  const VehicleType& t = inst.vehicle_types[route.vtype];
  if (t.kind != PowerKind::Electric) return 0;
  double soc = t.e_init;
  double min_soc = soc;
  for (int i = 1; i < route.size(); ++i) {
    int prev = route.seq[i - 1];
    if (inst.is_charger(prev)) {
      const PhysicalCharger& pc = inst.chargers[inst.vx(prev).physical_charger];
      soc = std::min(t.e_max,
                     soc + inst.charger_types[pc.type].rate_kwh_per_s() *
                               static_cast<double>(route.charge_tau[i - 1]));
    }
    soc -= t.consumption * inst.dist_km(prev, route.seq[i]);
    min_soc = std::min(min_soc, soc);
  }
  return std::max(0.0, t.e_min - min_soc);
}

void reindex_route(Solution& sol, int route_idx, const Instance& inst) {
  const Route& r = sol.routes[route_idx];
  for (int i = 0; i < r.size(); ++i) {
    int req = inst.request_of(r.seq[i]);
    if (req < 0) continue;
    if (inst.vx(r.seq[i]).kind == VertexKind::Pickup) {
      sol.where[req].route = route_idx;
      sol.where[req].ppos = i;
    } else {
      sol.where[req].dpos = i;
    }
  }
}

void reindex_all(Solution& sol, const Instance& inst) {
  sol.where.assign(inst.n_requests(), Solution::Loc{});
  for (int ri = 0; ri < static_cast<int>(sol.routes.size()); ++ri) reindex_route(sol, ri, inst);
}

void drop_empty_routes(Solution& sol, const Instance& inst) {
  bool any = false;
  for (int ri = static_cast<int>(sol.routes.size()) - 1; ri >= 0; --ri) {
    if (sol.routes[ri].served == 0) {
      for (int v : sol.routes[ri].seq)
        if (inst.is_charger(v)) sol.dummy_used[v] = 0;
      sol.routes.erase(sol.routes.begin() + ri);
      any = true;
    }
  }
  if (any) reindex_all(sol, inst);
}

void recompute_caches(Solution& sol, const Instance& inst) {
  sol.energy_cost = 0;
  sol.fleet_cost = 0;
  sol.co2_kg = 0;
  sol.energy_violation_kwh = 0;
  sol.n_vehicles = 0;
  sol.dummy_used.assign(inst.n_vertices(), 0);
  std::vector<std::uint8_t> served(inst.n_requests(), 0);
  for (Route& r : sol.routes) {
    reschedule(r, inst);
    const VehicleType& t = inst.vehicle_types[r.vtype];
    sol.energy_cost += t.energy_price * t.consumption * (static_cast<double>(r.length_m) / 1000.0);
    if (r.served > 0) {
      sol.fleet_cost += t.daily_cost + t.overnight_charger_cost;
      ++sol.n_vehicles;
    }
    sol.co2_kg += co2_of(r, inst);
    sol.energy_violation_kwh += route_energy_deficit(r, inst);
    for (int v : r.seq) {
      if (inst.is_charger(v)) sol.dummy_used[v] = 1;
      int req = inst.request_of(v);
      if (req >= 0 && inst.vx(v).kind == VertexKind::Pickup) served[req] = 1;
    }
  }
  sol.unserved.clear();
  for (int r = 0; r < inst.n_requests(); ++r)
    if (!served[r]) sol.unserved.push_back(r);
  reindex_all(sol, inst);
}

std::string solution_to_json(const Solution& sol, const Instance& inst) {
  nlohmann::json j;
  j["routes"] = nlohmann::json::array();
  for (const Route& r : sol.routes) {
    nlohmann::json jr;
    jr["vtype"] = r.vtype;
    jr["seq"] = r.seq;
    jr["begin"] = r.begin;
    jr["charge_tau"] = r.charge_tau;
    jr["charge_wait"] = r.charge_wait;
    nlohmann::json ops = nlohmann::json::array();
    for (const ChargingOp& op : charging_ops(r, inst)) {
      ops.push_back({{"dummy", op.dummy},
                     {"physical", op.physical},
                     {"start", op.start},
                     {"tau", op.tau}});
    }
    jr["charging_ops"] = ops;
    j["routes"].push_back(jr);
  }
  j["unserved"] = sol.unserved;
  j["cost"] = sol.cost();
  j["energy_cost"] = sol.energy_cost;
  j["fleet_cost"] = sol.fleet_cost;
  j["co2_kg"] = sol.co2_kg;
  j["energy_violation_kwh"] = sol.energy_violation_kwh;
  j["n_vehicles"] = sol.n_vehicles;
  return j.dump(2);
}

Solution solution_from_json(const std::string& text, const Instance& inst) {
  nlohmann::json j = nlohmann::json::parse(text);
  Solution sol;
  for (const auto& jr : j.at("routes")) {
    Route r;
    r.vtype = jr.at("vtype").get<int>();
    r.seq = jr.at("seq").get<std::vector<int>>();
    r.charge_tau = jr.at("charge_tau").get<std::vector<Sec>>();
    r.charge_wait = jr.at("charge_wait").get<std::vector<Sec>>();
    sol.routes.push_back(std::move(r));
  }
  recompute_caches(sol, inst);
  return sol;
}

}  // namespace feeder
