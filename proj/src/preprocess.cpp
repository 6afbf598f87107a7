#include "feeder/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "feeder/routesched.hpp"

namespace feeder {

std::optional<std::string> tighten_time_windows(Instance& inst) {
  const int n = inst.n_requests();
  bool changed = true;
  int guard = 0;
  while (changed && guard++ < 64) {
    changed = false;
    for (int r = 0; r < n; ++r) {
      Vertex& p = inst.vertices[inst.pickup_of(r)];
      Vertex& d = inst.vertices[inst.dropoff_of(r)];
      const Sec t = inst.time_s(p.id, d.id);
      const Sec L = inst.requests[r].max_ride;
      Sec v;
      v = std::max(p.tw_open, d.tw_open - L - p.service);
      if (v != p.tw_open) { p.tw_open = v; changed = true; }
      v = std::min(p.tw_close, d.tw_close - t - p.service);
      if (v != p.tw_close) { p.tw_close = v; changed = true; }
      v = std::max(d.tw_open, p.tw_open + p.service + t);
      if (v != d.tw_open) { d.tw_open = v; changed = true; }
      v = std::min(d.tw_close, p.tw_close + p.service + L);
      if (v != d.tw_close) { d.tw_close = v; changed = true; }
      if (p.tw_open > p.tw_close || d.tw_open > d.tw_close)
        return "infeasible request " + std::to_string(r) + ": time window tightened to empty";
    }
  }
  return std::nullopt;
}

namespace {

// Path feasibility shared by compatibility and charger-pair checks: evaluate
// the mini-route 0 -> order -> N+1 with the given vehicle type.
bool path_feasible(const std::vector<int>& order, int vtype, const Instance& inst) {
  Route r;
  r.vtype = vtype;
  r.seq.reserve(order.size() + 2);
  r.seq.push_back(inst.depot_start());
  for (int v : order) r.seq.push_back(v);
  r.seq.push_back(inst.depot_end());
  r.charge_tau.assign(r.seq.size(), 0);
  r.charge_wait.assign(r.seq.size(), 0);
  return evaluate_route(r, inst).feasible;
}

int most_permissive_type(const Instance& inst) {
  int best = 0;
  for (std::size_t k = 1; k < inst.vehicle_types.size(); ++k)
    if (inst.vehicle_types[k].capacity > inst.vehicle_types[best].capacity)
      best = static_cast<int>(k);
  return best;
}

}  // namespace

bool requests_compatible(int i, int j, const Instance& inst) {
  const int pi = inst.pickup_of(i), di = inst.dropoff_of(i);
  const int pj = inst.pickup_of(j), dj = inst.dropoff_of(j);
  const int vt = most_permissive_type(inst);
  const std::vector<std::vector<int>> orders = {
      {pi, pj, di, dj}, {pi, pj, dj, di}, {pj, pi, di, dj},
      {pj, pi, dj, di}, {pi, di, pj, dj}, {pj, dj, pi, di},
  };
  for (const auto& o : orders)
    if (path_feasible(o, vt, inst)) return true;
  return false;
}

ArcMask eliminate_arcs(Instance& inst) {
  const int nv = inst.n_vertices();
  const int n = inst.n_requests();
  ArcMask mask;
  mask.n_vertices = nv;
  mask.allowed.assign(static_cast<std::size_t>(nv) * nv, 1);
  auto kill = [&](int i, int j) {
    auto& a = mask.allowed[static_cast<std::size_t>(i) * nv + j];
    if (a) {
      a = 0;
      ++mask.eliminated;
    }
  };

  const int d0 = inst.depot_start(), dN = inst.depot_end();
  for (int v = 0; v < nv; ++v) {
    kill(v, v);
    kill(v, d0);  // no arc into the start depot
    kill(dN, v);  // none out of the end depot
  }
  kill(d0, dN);  // depot-to-depot; empty tours are handled outside the mask

  for (int r = 0; r < n; ++r) {
    kill(inst.dropoff_of(r), inst.pickup_of(r));  // own pair reversed
    kill(d0, inst.dropoff_of(r));                 // dropoff cannot come first
    kill(inst.pickup_of(r), dN);                  // pickup cannot come last
  }

  // Charger arc structure: successors of a charger are pickups or the end
  // depot; charger-to-charger arcs are not part of the model.
  for (int s : inst.charger_dummies()) {
    for (int v = 0; v < nv; ++v) {
      const VertexKind k = inst.vx(v).kind;
      if (k == VertexKind::Dropoff || k == VertexKind::ChargerDummy) kill(s, v);
    }
  }

  // Pairwise elimination: all cross arcs between the four nodes of an
  // incompatible request pair (the two requests can never share a vehicle).
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (requests_compatible(i, j, inst)) continue;
      const int a[2] = {inst.pickup_of(i), inst.dropoff_of(i)};
      const int b[2] = {inst.pickup_of(j), inst.dropoff_of(j)};
      for (int u : a)
        for (int v : b) {
          kill(u, v);
          kill(v, u);
        }
    }
  }

  inst.arc_ok = mask.allowed;
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) {
      if (i == j) continue;
      // The depot-to-depot arc keeps its true (zero) length: empty tours are
      // represented on it and must stay free.
      if (i == d0 && j == dN) continue;
      if (!mask(i, j)) {
        inst.dist[static_cast<std::size_t>(i) * nv + j] = kEliminatedDist;
        inst.time[static_cast<std::size_t>(i) * nv + j] =
            static_cast<Sec>(std::llround(static_cast<double>(kEliminatedDist) * 3.6 / inst.speed_kmh));
      }
    }
  }
  return mask;
}

std::vector<ChargerPairTriple> charger_infeasible_pairs(const Instance& inst) {
  std::vector<ChargerPairTriple> out;
  const int n = inst.n_requests();
  // Earliest-departure bound with zero charging duration; infeasible iff the
  // chain e_{n+i} + u + t(n+i, s) + u_s + t(s, j) overruns l_j.
  auto leg_infeasible = [&](int from_req, int s, int to_req) {
    const Vertex& d = inst.vx(inst.dropoff_of(from_req));
    const Vertex& p = inst.vx(inst.pickup_of(to_req));
    Sec arrive_s = d.tw_open + d.service + inst.time_s(d.id, s);
    Sec arrive_p = arrive_s + inst.vx(s).service + inst.time_s(s, p.id);
    return arrive_p > p.tw_close;
  };
  for (int s : inst.charger_dummies()) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (leg_infeasible(i, s, j) && leg_infeasible(j, s, i)) out.push_back({i, j, s});
      }
    }
  }
  return out;
}

ArcMask preprocess(Instance& inst) {
  if (auto err = tighten_time_windows(inst)) throw std::runtime_error(*err);
  return eliminate_arcs(inst);
}

}  // namespace feeder
