#pragma once

// Shared helpers for the test suites: hand-built instances with exact
// coordinates, and schedule-feasibility oracles that share no code with the
// production evaluator.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "feeder/instancegen.hpp"
#include "feeder/model.hpp"
#include "feeder/preprocess.hpp"
#include "feeder/routesched.hpp"
#include "feeder/rng.hpp"

namespace feeder::test {

struct ManualRequest {
  double x_km = 0, y_km = 0;  // the non-station endpoint
  int passengers = 1;
  Direction dir = Direction::Outbound;
  // Station-side window, seconds from midnight.
  Sec tw_open = 6 * kHour;
  Sec tw_close = 7 * kHour;
  double max_ride_factor = 1.5;  // applied to the direct ride time
  Sec max_ride_override = -1;    // wins when >= 0
};

struct ManualSetup {
  std::vector<ManualRequest> requests;
  std::vector<VehicleType> vehicle_types;  // defaults to {type1 EV, GV}
  int fleet_ev = 4, fleet_gv = 4;
  std::vector<SiteCandidate> sites;        // default: one site at the station
  std::vector<ChargerType> charger_types;  // default: rapid
  ChargingConfig config;                   // default: no chargers
  int dummies_per_charger = 4;
  Sec service_time = 30;
};

inline Instance build_manual(const ManualSetup& setup) {
  Instance inst;
  inst.speed_kmh = 50.0;
  inst.dummies_per_charger = setup.dummies_per_charger;
  inst.vehicle_types = setup.vehicle_types;
  if (inst.vehicle_types.empty()) inst.vehicle_types = {default_ev_type1(), default_gv()};
  inst.fleet_bounds = {setup.fleet_ev, setup.fleet_gv};
  inst.sites = setup.sites;
  if (inst.sites.empty()) inst.sites = {{0, 0, 0, 1000.0, 4.11}};
  inst.charger_types = setup.charger_types;
  if (inst.charger_types.empty()) inst.charger_types = {default_rapid_charger()};
  inst.config = setup.config;
  if (inst.config.open.empty()) {
    inst.config.open.assign(inst.sites.size(), 0);
    inst.config.counts.assign(inst.sites.size(),
                              std::vector<int>(inst.charger_types.size(), 0));
  }

  Vertex depot;
  depot.id = 0;
  depot.kind = VertexKind::DepotStart;
  inst.vertices.push_back(depot);

  const int n = static_cast<int>(setup.requests.size());
  for (int r = 0; r < n; ++r) {
    const ManualRequest& mr = setup.requests[r];
    Vertex p;
    p.id = 1 + r;
    p.kind = VertexKind::Pickup;
    p.load_delta = mr.passengers;
    p.service = setup.service_time;
    if (mr.dir == Direction::Inbound) {
      p.transit_station = true;
      p.tw_open = mr.tw_open;
      p.tw_close = mr.tw_close;
    } else {
      p.x = static_cast<Metre>(mr.x_km * 1000);
      p.y = static_cast<Metre>(mr.y_km * 1000);
    }
    inst.vertices.push_back(p);
  }
  for (int r = 0; r < n; ++r) {
    const ManualRequest& mr = setup.requests[r];
    Vertex d;
    d.id = 1 + n + r;
    d.kind = VertexKind::Dropoff;
    d.load_delta = -mr.passengers;
    if (mr.dir == Direction::Outbound) {
      d.transit_station = true;
      d.tw_open = mr.tw_open;
      d.tw_close = mr.tw_close;
    } else {
      d.x = static_cast<Metre>(mr.x_km * 1000);
      d.y = static_cast<Metre>(mr.y_km * 1000);
    }
    inst.vertices.push_back(d);
  }
  inst.build_charger_vertices(0, 0);
  for (int r = 0; r < n; ++r) {
    Request req;
    req.id = r;
    req.pickup = 1 + r;
    req.dropoff = 1 + n + r;
    req.passengers = setup.requests[r].passengers;
    req.direction = setup.requests[r].dir;
    if (setup.requests[r].max_ride_override >= 0)
      req.max_ride = setup.requests[r].max_ride_override;
    else
      req.max_ride = static_cast<Sec>(setup.requests[r].max_ride_factor *
                                      static_cast<double>(direct_ride_time(req, inst)));
    inst.requests.push_back(req);
  }
  return inst;
}

inline Route make_route_seq(const Instance& inst, int vtype, const std::vector<int>& middle) {
  Route r;
  r.vtype = vtype;
  r.seq.push_back(inst.depot_start());
  for (int v : middle) r.seq.push_back(v);
  r.seq.push_back(inst.depot_end());
  r.charge_tau.assign(r.seq.size(), 0);
  r.charge_wait.assign(r.seq.size(), 0);
  reschedule(r, inst);
  return r;
}

// ---------------------------------------------------------------------------
// Independent schedule oracle: Fourier-Motzkin elimination over the system
// e_i <= B_i <= l_i, B_{i+1} >= B_i + gap_i, B_d - B_p <= L + u. Exact on
// integers; shares no code with the production evaluator.

struct FmOracle {
  static bool feasible(const Route& r, const Instance& inst) {
    const int q = r.size();
    constexpr Sec kNone = std::numeric_limits<Sec>::max() / 4;
    std::vector<Sec> lo(q), hi(q);
    for (int i = 0; i < q; ++i) {
      lo[i] = inst.vx(r.seq[i]).tw_open;
      hi[i] = inst.vx(r.seq[i]).tw_close;
    }
    // ub[a][b]: tightest c with B_b - B_a <= c.
    std::vector<std::vector<Sec>> ub(q, std::vector<Sec>(q, kNone));
    auto add = [&](int a, int b, Sec c) { ub[a][b] = std::min(ub[a][b], c); };
    for (int i = 0; i + 1 < q; ++i) {
      const Sec gap = inst.vx(r.seq[i]).service + r.charge_wait[i] + r.charge_tau[i] +
                      inst.time_s(r.seq[i], r.seq[i + 1]);
      add(i + 1, i, -gap);  // B_i - B_{i+1} <= -gap
    }
    for (int i = 0; i < q; ++i) {
      const int req = inst.request_of(r.seq[i]);
      if (req < 0 || inst.vx(r.seq[i]).kind != VertexKind::Pickup) continue;
      for (int j = i + 1; j < q; ++j)
        if (r.seq[j] == inst.requests[req].dropoff)
          add(i, j, inst.requests[req].max_ride + inst.vx(r.seq[i]).service);
    }
    // Eliminate B_{q-1}, ..., B_1; each elimination combines every upper
    // bound on B_k with every lower bound on B_k.
    for (int k = q - 1; k >= 0; --k) {
      if (lo[k] > hi[k]) return false;
      for (int a = 0; a < k; ++a) {
        if (ub[a][k] != kNone) {                       // B_k <= B_a + ub[a][k]
          lo[a] = std::max(lo[a], lo[k] - ub[a][k]);   // with B_k >= lo[k]
          for (int b = 0; b < k; ++b)
            if (ub[k][b] != kNone) {                   // with B_k >= B_b - ub[k][b]
              if (a == b) {
                if (ub[a][k] + ub[k][b] < 0) return false;
              } else {
                add(a, b, ub[a][k] + ub[k][b]);
              }
            }
        }
        if (ub[k][a] != kNone)                         // B_a <= B_k + ub[k][a] <= hi[k] + ...
          hi[a] = std::min(hi[a], hi[k] + ub[k][a]);
      }
    }
    return lo[0] <= hi[0];
  }
};

// Literal begin-time search on the one-second grid with a node budget;
// returns nullopt when the budget runs out.
inline std::optional<bool> grid_feasible(const Route& r, const Instance& inst,
                                         long budget = 2000000) {
  const int q = r.size();
  struct RidePair {
    int p, d;
    Sec limit;
  };
  std::vector<RidePair> pairs;
  for (int i = 0; i < q; ++i) {
    const int req = inst.request_of(r.seq[i]);
    if (req < 0 || inst.vx(r.seq[i]).kind != VertexKind::Pickup) continue;
    for (int j = i + 1; j < q; ++j)
      if (r.seq[j] == inst.requests[req].dropoff)
        pairs.push_back({i, j, inst.requests[req].max_ride + inst.vx(r.seq[i]).service});
  }
  std::vector<Sec> B(q);
  long nodes = 0;
  std::function<std::optional<bool>(int)> rec = [&](int pos) -> std::optional<bool> {
    if (pos == q) return true;
    Sec t0 = inst.vx(r.seq[pos]).tw_open;
    if (pos > 0)
      t0 = std::max(t0, B[pos - 1] + inst.vx(r.seq[pos - 1]).service + r.charge_wait[pos - 1] +
                            r.charge_tau[pos - 1] + inst.time_s(r.seq[pos - 1], r.seq[pos]));
    const Sec t1 = inst.vx(r.seq[pos]).tw_close;
    for (Sec t = t0; t <= t1; ++t) {
      if (++nodes > budget) return std::nullopt;
      B[pos] = t;
      bool ride_broken = false;
      for (const RidePair& p : pairs)
        if (p.d == pos && B[pos] - B[p.p] > p.limit) {
          ride_broken = true;
          break;
        }
      if (ride_broken) break;  // larger t only lengthens those rides
      auto sub = rec(pos + 1);
      if (!sub.has_value()) return std::nullopt;
      if (*sub) return true;
    }
    return false;
  };
  return rec(0);
}

}  // namespace feeder::test
