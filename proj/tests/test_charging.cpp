#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "feeder/charging.hpp"
#include "feeder/search.hpp"
#include "support.hpp"

using namespace feeder;
using namespace feeder::test;

namespace {

// One outbound request whose tour totals 70 km: depot -> (20,0) -> (35,0) ->
// depot. Vehicle starts half full (58.5 kWh of 117), burning 65.66 kWh.
Instance seventy_km_instance(double e_init_frac = 0.5, double site_x_km = 10.0) {
  ManualSetup setup;
  ManualRequest r;
  r.x_km = 20.0;
  r.dir = Direction::Outbound;
  r.tw_open = 0;
  r.tw_close = 20 * kHour;
  setup.requests = {r};
  setup.sites = {{0, static_cast<Metre>(site_x_km * 1000), 0, 1000.0, 4.11}};
  setup.config.open = {1};
  setup.config.counts = {{1}};
  Instance inst = build_manual(setup);
  Vertex& d = inst.vertices[inst.dropoff_of(0)];
  d.x = 35000;
  d.y = 0;
  d.transit_station = true;
  d.tw_open = 0;
  d.tw_close = 20 * kHour;
  inst.rebuild_matrices();
  inst.requests[0].max_ride = 10 * kHour;
  VehicleType& ev = inst.vehicle_types[inst.electric_type()];
  ev.e_init = ev.e_max * e_init_frac;
  return inst;
}

}  // namespace

TEST_CASE("SOC propagation reports the worst dip") {
  Instance inst = seventy_km_instance();
  Route r = make_route_seq(inst, inst.electric_type(),
                           {inst.pickup_of(0), inst.dropoff_of(0)});
  REQUIRE(r.feasible);
  REQUIRE(r.length_m == 70000);
  EnergyProfile prof = propagate_soc(r, inst);
  CHECK_FALSE(prof.feasible);
  CHECK(prof.first_violation == r.size() - 1);
  CHECK(prof.consumed_kwh == doctest::Approx(65.66));
  CHECK(prof.deficit_kwh == doctest::Approx(7.16));
  CHECK(route_energy_deficit(r, inst) == doctest::Approx(prof.deficit_kwh));
}

TEST_CASE("fully charged route is energy feasible") {
  Instance inst = seventy_km_instance(1.0);
  Route r = make_route_seq(inst, inst.electric_type(),
                           {inst.pickup_of(0), inst.dropoff_of(0)});
  EnergyProfile prof = propagate_soc(r, inst);
  CHECK(prof.feasible);
  // 117 kWh minus 65.66 leaves 51.34 at the end depot.
  CHECK(prof.soc.back() == doctest::Approx(117 - 65.66));
}

TEST_CASE("empty route keeps the initial charge") {
  Instance inst = seventy_km_instance();
  Route r = make_route(inst.electric_type(), inst);
  EnergyProfile prof = propagate_soc(r, inst);
  CHECK(prof.feasible);
  for (double s : prof.soc) CHECK(s == doctest::Approx(58.5));
}

TEST_CASE("minimal partial recharge covers the deficit") {
  // Charger on the return path (detour-free at (10,0)): tau covers the
  // 7.16 kWh dip at 125 kW, i.e. ceil(7.16 * 3600 / 125) = 207 s (~3.44 min).
  Instance inst = seventy_km_instance();
  Route r = make_route_seq(inst, inst.electric_type(),
                           {inst.pickup_of(0), inst.dropoff_of(0)});
  ChargerOccupancy occ;
  occ.reset(inst);
  auto charged = schedule_charging(r, occ, inst, false);
  REQUIRE(charged.has_value());
  CHECK(propagate_soc(*charged, inst).feasible);
  Sec total_tau = 0;
  int visits = 0;
  for (const ChargingOp& op : charging_ops(*charged, inst)) {
    total_tau += op.tau;
    ++visits;
  }
  CHECK(visits == 1);
  CHECK(total_tau == 207);
  CHECK(charged->length_m == 70000);  // on-path charger, no detour

  // Partial-recharge minimality: one second less re-creates the dip.
  Route trimmed = *charged;
  for (std::size_t i = 0; i < trimmed.charge_tau.size(); ++i)
    if (trimmed.charge_tau[i] > 0) trimmed.charge_tau[i] -= 1;
  reschedule(trimmed, inst);
  CHECK_FALSE(propagate_soc(trimmed, inst).feasible);
}

TEST_CASE("energy-feasible route is returned unchanged") {
  Instance inst = seventy_km_instance(1.0);
  Route r = make_route_seq(inst, inst.electric_type(),
                           {inst.pickup_of(0), inst.dropoff_of(0)});
  ChargerOccupancy occ;
  occ.reset(inst);
  auto charged = schedule_charging(r, occ, inst, false);
  REQUIRE(charged.has_value());
  CHECK(charged->seq == r.seq);
}

TEST_CASE("no slack means no charging plan") {
  // The dip hits at the dropoff, so the only legal insertion arc is
  // depot -> pickup, and the pickup window closes too early to absorb the
  // detour via the remote charger.
  Instance inst = seventy_km_instance(0.25, 40.0);
  Vertex& p = inst.vertices[inst.pickup_of(0)];
  p.tw_open = 0;
  p.tw_close = 25 * kMinute;  // direct arrival takes 24 min
  inst.rebuild_matrices();
  Route r = make_route_seq(inst, inst.electric_type(),
                           {inst.pickup_of(0), inst.dropoff_of(0)});
  REQUIRE(r.feasible);
  REQUIRE_FALSE(propagate_soc(r, inst).feasible);
  ChargerOccupancy occ;
  occ.reset(inst);
  auto charged = schedule_charging(r, occ, inst, false);
  CHECK_FALSE(charged.has_value());
}

TEST_CASE("conflict detection on a shared charger") {
  Instance inst = seventy_km_instance();
  const int ev = inst.electric_type();
  const auto dummies = inst.dummies_of(0);
  REQUIRE(dummies.size() >= 2);

  auto charged_route = [&](int dummy, Sec tau) {
    Route r = make_route(ev, inst);
    r.seq.insert(r.seq.begin() + 1, inst.pickup_of(0));
    r.seq.insert(r.seq.begin() + 2, inst.dropoff_of(0));
    r.seq.insert(r.seq.begin() + 3, dummy);
    r.charge_tau.assign(r.seq.size(), 0);
    r.charge_wait.assign(r.seq.size(), 0);
    r.charge_tau[3] = tau;
    reschedule(r, inst);
    return r;
  };

  Solution sol;
  sol.routes.push_back(charged_route(dummies[0], 20 * kMinute));
  sol.routes.push_back(charged_route(dummies[1], 20 * kMinute));
  recompute_caches(sol, inst);
  // Both routes run the identical earliest schedule, so the plug intervals
  // coincide on the same physical charger.
  auto conflicts = detect_conflicts(sol, inst);
  REQUIRE(conflicts.size() == 1);
  CHECK(conflicts[0].physical == 0);
  CHECK(conflicts[0].overlap_end - conflicts[0].overlap_start == 20 * kMinute);

  // Same intervals on different chargers: no conflict.
  ManualSetup setup2;
  ManualRequest mr;
  mr.x_km = 20.0;
  mr.dir = Direction::Outbound;
  mr.tw_open = 0;
  mr.tw_close = 20 * kHour;
  setup2.requests = {mr};
  setup2.sites = {{0, 10000, 0, 1000.0, 4.11}};
  setup2.config.open = {1};
  setup2.config.counts = {{2}};  // two physical chargers
  Instance inst2 = build_manual(setup2);
  Vertex& d2 = inst2.vertices[inst2.dropoff_of(0)];
  d2.x = 35000;
  d2.transit_station = true;
  d2.tw_open = 0;
  d2.tw_close = 20 * kHour;
  inst2.rebuild_matrices();
  inst2.requests[0].max_ride = 10 * kHour;
  REQUIRE(inst2.chargers.size() == 2);
  const auto da = inst2.dummies_of(0);
  const auto db = inst2.dummies_of(1);
  Solution sol2;
  {
    Route r = make_route(inst2.electric_type(), inst2);
    r.seq.insert(r.seq.begin() + 1, inst2.pickup_of(0));
    r.seq.insert(r.seq.begin() + 2, inst2.dropoff_of(0));
    r.seq.insert(r.seq.begin() + 3, da[0]);
    r.charge_tau.assign(r.seq.size(), 0);
    r.charge_wait.assign(r.seq.size(), 0);
    r.charge_tau[3] = 20 * kMinute;
    reschedule(r, inst2);
    sol2.routes.push_back(r);
    r.seq[3] = db[0];
    reschedule(r, inst2);
    sol2.routes.push_back(r);
  }
  recompute_caches(sol2, inst2);
  CHECK(detect_conflicts(sol2, inst2).empty());
}

TEST_CASE("conflict-free verdict matches an interval sweep oracle") {
  Rng rng(4242);
  Instance inst = seventy_km_instance();
  const auto dummies = inst.dummies_of(0);
  for (int it = 0; it < 200; ++it) {
    Solution sol;
    struct Iv {
      Sec a, b;
      int physical;
    };
    std::vector<Iv> ivs;
    const int nops = 1 + static_cast<int>(rng.index(dummies.size()));
    for (int i = 0; i < nops; ++i) {
      Route r = make_route(inst.electric_type(), inst);
      r.seq.insert(r.seq.begin() + 1, dummies[i]);
      r.charge_tau.assign(r.seq.size(), 0);
      r.charge_wait.assign(r.seq.size(), 0);
      r.charge_tau[1] = 60 + static_cast<Sec>(rng.index(1200));
      r.charge_wait[1] = static_cast<Sec>(rng.index(1800));
      reschedule(r, inst);
      sol.routes.push_back(r);
      const ChargingOp op = charging_ops(sol.routes.back(), inst)[0];
      ivs.push_back({op.start, op.start + op.tau, op.physical});
    }
    recompute_caches(sol, inst);
    bool overlap = false;
    for (std::size_t i = 0; i < ivs.size(); ++i)
      for (std::size_t j = i + 1; j < ivs.size(); ++j)
        if (ivs[i].physical == ivs[j].physical && ivs[i].a < ivs[j].b && ivs[j].a < ivs[i].b)
          overlap = true;
    CHECK(detect_conflicts(sol, inst).empty() == !overlap);
  }
}

TEST_CASE("energy repair ejects until feasible and terminates") {
  ManualSetup setup;
  for (int i = 0; i < 4; ++i) {
    ManualRequest r;
    r.x_km = 15.0 + i;
    r.dir = Direction::Outbound;
    r.tw_open = 0;
    r.tw_close = 20 * kHour;
    setup.requests.push_back(r);
  }
  Instance inst = build_manual(setup);
  for (int i = 0; i < 4; ++i) inst.requests[i].max_ride = 10 * kHour;
  VehicleType& ev = inst.vehicle_types[inst.electric_type()];
  ev.e_init = 0.4 * ev.e_max;

  std::vector<int> mid;
  for (int i = 0; i < 4; ++i) {
    mid.push_back(inst.pickup_of(i));
    mid.push_back(inst.dropoff_of(i));
  }
  Solution sol;
  sol.routes.push_back(make_route_seq(inst, inst.electric_type(), mid));
  recompute_caches(sol, inst);
  REQUIRE_FALSE(propagate_soc(sol.routes[0], inst).feasible);

  Rng rng(5);
  repair_energy_feasibility(sol, inst, rng);
  for (const Route& r : sol.routes) CHECK(propagate_soc(r, inst).feasible);
  CHECK(sol.n_unserved() > 0);

  // Already-feasible solutions pass through unchanged.
  Instance full = inst;
  full.vehicle_types[full.electric_type()].e_init =
      full.vehicle_types[full.electric_type()].e_max;
  Solution ok;
  ok.routes.push_back(
      make_route_seq(full, full.electric_type(), {full.pickup_of(0), full.dropoff_of(0)}));
  recompute_caches(ok, full);
  Solution before = ok;
  repair_energy_feasibility(ok, full, rng);
  CHECK(ok.routes.size() == before.routes.size());
  CHECK(ok.n_unserved() == before.n_unserved());
  CHECK(ok.routes[0].seq == before.routes[0].seq);
}

TEST_CASE("repair_sol untangles a shared charger with enough slack") {
  // Two EVs, each needing a mid-day top-up, one physical charger. Windows
  // leave slack, so one vehicle shifts its plug time.
  ManualSetup setup;
  for (int i = 0; i < 2; ++i) {
    ManualRequest r;
    r.x_km = 20.0;
    r.y_km = i == 0 ? 0.5 : -0.5;
    r.dir = Direction::Outbound;
    r.tw_open = 0;
    r.tw_close = 20 * kHour;
    setup.requests.push_back(r);
  }
  setup.sites = {{0, 10000, 0, 1000.0, 4.11}};
  setup.config.open = {1};
  setup.config.counts = {{1}};
  setup.fleet_ev = 3;
  Instance inst = build_manual(setup);
  for (int i = 0; i < 2; ++i) {
    Vertex& d = inst.vertices[inst.dropoff_of(i)];
    d.x = 35000;
    d.transit_station = true;
    d.tw_open = 0;
    d.tw_close = 20 * kHour;
    inst.requests[i].max_ride = 10 * kHour;
  }
  inst.rebuild_matrices();
  VehicleType& ev = inst.vehicle_types[inst.electric_type()];
  ev.e_init = 0.5 * ev.e_max;
  inst.gamma_ref = 1e9;

  const auto dummies = inst.dummies_of(0);
  Solution sol;
  for (int i = 0; i < 2; ++i) {
    Route r = make_route(inst.electric_type(), inst);
    r.seq.insert(r.seq.begin() + 1, inst.pickup_of(i));
    r.seq.insert(r.seq.begin() + 2, inst.dropoff_of(i));
    r.seq.insert(r.seq.begin() + 3, dummies[i]);
    r.charge_tau.assign(r.seq.size(), 0);
    r.charge_wait.assign(r.seq.size(), 0);
    r.charge_tau[3] = 210;
    reschedule(r, inst);
    sol.routes.push_back(r);
  }
  recompute_caches(sol, inst);
  REQUIRE_FALSE(detect_conflicts(sol, inst).empty());

  SearchParams params;
  Rng rng(11);
  const bool ok = repair_sol(sol, inst, params, rng);
  REQUIRE(ok);
  CHECK(sol.n_unserved() == 0);
  CHECK(detect_conflicts(sol, inst).empty());
  for (const Route& r : sol.routes) CHECK(propagate_soc(r, inst).feasible);

  // Conflict-free input passes through with everything still served.
  Solution again = sol;
  CHECK(repair_sol(again, inst, params, rng));
  CHECK(again.n_unserved() == 0);
}
