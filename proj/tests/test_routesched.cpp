#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "feeder/charging.hpp"
#include "feeder/routesched.hpp"
#include "feeder/search.hpp"
#include "support.hpp"

using namespace feeder;
using namespace feeder::test;

namespace {

Instance one_request_instance() {
  ManualSetup setup;
  setup.requests = {{3.0, 0.0, 2, Direction::Outbound, 8 * kHour, 8 * kHour + 10 * kMinute}};
  return build_manual(setup);
}

}  // namespace

TEST_CASE("single direct route with wide windows starts at the earliest begin") {
  ManualSetup setup;
  setup.requests = {{3.0, 0.0, 2, Direction::Outbound, 0, 20 * kHour}};
  Instance inst = build_manual(setup);
  const int gv = inst.gasoline_type();
  Route r = make_route_seq(inst, gv, {inst.pickup_of(0), inst.dropoff_of(0)});
  ScheduleResult res = evaluate_route(r, inst);
  REQUIRE(res.feasible);
  CHECK(res.begin[1] == inst.time_s(0, inst.pickup_of(0)));
  CHECK(res.begin[2] >= inst.vx(inst.dropoff_of(0)).tw_open);
}

TEST_CASE("unreachable dropoff window is infeasible(tw)") {
  ManualSetup setup;
  setup.requests = {{40.0, 0.0, 1, Direction::Outbound, 6 * kHour, 6 * kHour + 10 * kMinute}};
  // 40 km away, train at 06:00-06:10: cannot be reached from a 0-open depot?
  // travel is 48 min; window closes 06:10 so earliest arrival 48 min > close
  // only if the pickup cannot happen before... pickup window is wide, so the
  // binding check is dropoff close vs travel: 06:10 close < 48 min + pickup.
  Instance inst = build_manual(setup);
  inst.vertices[inst.pickup_of(0)].tw_open = 6 * kHour;  // leave at 06:00 earliest
  inst.rebuild_matrices();
  const int gv = inst.gasoline_type();
  Route r = make_route_seq(inst, gv, {inst.pickup_of(0), inst.dropoff_of(0)});
  ScheduleResult res = evaluate_route(r, inst);
  CHECK_FALSE(res.feasible);
  CHECK(res.violation == RouteViolation::Tw);
}

TEST_CASE("load violation detected structurally") {
  Instance inst = one_request_instance();
  const int gv = inst.gasoline_type();
  // Dropoff before pickup dips the load negative.
  Route r = make_route_seq(inst, gv, {inst.dropoff_of(0), inst.pickup_of(0)});
  ScheduleResult res = evaluate_route(r, inst);
  CHECK_FALSE(res.feasible);
  CHECK(res.violation == RouteViolation::Load);
}

TEST_CASE("forward slack shift rescues a greedy ride-time violation") {
  // Two interleaved requests on a line; the second pickup opens late, so the
  // earliest-start schedule parks the first passenger for half an hour. A
  // delayed departure keeps every window and the ride-time cap.
  ManualSetup setup;
  ManualRequest r1;
  r1.x_km = 1.0;
  r1.dir = Direction::Outbound;
  r1.tw_open = 0;
  r1.tw_close = 10 * kHour;
  r1.max_ride_override = 300;
  ManualRequest r2;
  r2.x_km = 2.0;
  r2.dir = Direction::Outbound;
  r2.tw_open = 0;
  r2.tw_close = 10 * kHour;
  r2.max_ride_override = 2 * kHour;
  setup.requests = {r1, r2};
  setup.service_time = 0;
  Instance inst = build_manual(setup);
  // Open the second pickup late; both dropoffs are at the station.
  inst.vertices[inst.pickup_of(1)].tw_open = 2000;
  inst.rebuild_matrices();
  const int gv = inst.gasoline_type();
  Route r = make_route_seq(
      inst, gv, {inst.pickup_of(0), inst.pickup_of(1), inst.dropoff_of(0), inst.dropoff_of(1)});
  ScheduleResult res = evaluate_route(r, inst);
  REQUIRE(res.feasible);
  CHECK(FmOracle::feasible(r, inst));
  // Ride of request 0 within its 300 s cap even though the earliest
  // schedule would hold it for ~1900 s.
  for (std::size_t i = 0; i < res.request_ids.size(); ++i)
    if (res.request_ids[i] == 0) CHECK(res.ride[i] <= 300);
}

TEST_CASE("route cost arithmetic per vehicle type") {
  // 100 km tour: depot -> pickup at 25 km -> dropoff at 50 km -> depot.
  ManualSetup setup;
  ManualRequest r1;
  r1.x_km = 25.0;
  r1.dir = Direction::Inbound;  // pickup at the station
  r1.tw_open = 0;
  r1.tw_close = 20 * kHour;
  setup.requests = {r1};
  Instance inst = build_manual(setup);
  // Move the dropoff out to 50 km on the same axis -> legs 0, 50, 50... use
  // an outbound request instead: pickup at (25,0), dropoff at station is only
  // 50 km total. Place explicit coordinates for a 100 km tour.
  inst.vertices[inst.pickup_of(0)].x = 25000;
  inst.vertices[inst.pickup_of(0)].y = 0;
  inst.vertices[inst.pickup_of(0)].transit_station = false;
  inst.vertices[inst.pickup_of(0)].tw_open = 0;
  inst.vertices[inst.pickup_of(0)].tw_close = 20 * kHour;
  inst.vertices[inst.dropoff_of(0)].x = 50000;
  inst.vertices[inst.dropoff_of(0)].y = 0;
  inst.vertices[inst.dropoff_of(0)].transit_station = true;
  inst.vertices[inst.dropoff_of(0)].tw_open = 0;
  inst.vertices[inst.dropoff_of(0)].tw_close = 20 * kHour;
  inst.rebuild_matrices();
  inst.requests[0].max_ride = 10 * kHour;

  const int ev = inst.electric_type();
  const int gv = inst.gasoline_type();
  Route r_ev = make_route_seq(inst, ev, {inst.pickup_of(0), inst.dropoff_of(0)});
  REQUIRE(r_ev.length_m == 100000);
  const double fbar = inst.vehicle_types[ev].overnight_charger_cost;
  CHECK(route_cost(r_ev, inst) == doctest::Approx(0.938 * 100 * 0.23 + 23.78 + fbar).epsilon(1e-9));
  CHECK(co2_of(r_ev, inst) == 0.0);

  Route r_gv = make_route_seq(inst, gv, {inst.pickup_of(0), inst.dropoff_of(0)});
  CHECK(route_cost(r_gv, inst) == doctest::Approx(100 * 0.002 * 1.83 + 16.17).epsilon(1e-9));
  CHECK(co2_of(r_gv, inst) == doctest::Approx(88.0 * 0.002 * 100).epsilon(1e-9));

  Route empty = make_route(gv, inst);
  CHECK(route_cost(empty, inst) == 0.0);
}

TEST_CASE("solution emission is additive over routes") {
  ManualSetup setup;
  setup.requests = {{2.0, 0.0, 1, Direction::Outbound, 8 * kHour, 9 * kHour},
                    {0.0, 3.0, 1, Direction::Outbound, 10 * kHour, 11 * kHour}};
  Instance inst = build_manual(setup);
  const int gv = inst.gasoline_type();
  Solution sol;
  sol.routes.push_back(make_route_seq(inst, gv, {inst.pickup_of(0), inst.dropoff_of(0)}));
  sol.routes.push_back(make_route_seq(inst, gv, {inst.pickup_of(1), inst.dropoff_of(1)}));
  recompute_caches(sol, inst);
  CHECK(sol.co2_kg ==
        doctest::Approx(co2_of(sol.routes[0], inst) + co2_of(sol.routes[1], inst)));
  CHECK(sol.cost() ==
        doctest::Approx(route_cost(sol.routes[0], inst) + route_cost(sol.routes[1], inst)));
}

TEST_CASE("best insertion matches exhaustive enumeration") {
  ManualSetup setup;
  setup.requests = {{2.0, 0.0, 1, Direction::Outbound, 8 * kHour, 8 * kHour + 30 * kMinute},
                    {0.0, 3.0, 1, Direction::Outbound, 9 * kHour, 9 * kHour + 30 * kMinute},
                    {-2.0, 1.0, 1, Direction::Outbound, 10 * kHour, 10 * kHour + 30 * kMinute},
                    {1.5, 1.5, 2, Direction::Inbound, 11 * kHour, 11 * kHour + 10 * kMinute}};
  Instance inst = build_manual(setup);
  const int gv = inst.gasoline_type();
  Route base = make_route_seq(inst, gv,
                              {inst.pickup_of(0), inst.dropoff_of(0), inst.pickup_of(1),
                               inst.dropoff_of(1), inst.pickup_of(2), inst.dropoff_of(2)});
  REQUIRE(base.feasible);

  CostContext ctx;  // plain cost deltas
  auto plan = best_insertion(base, inst.requests[3], inst, ctx);

  // Brute force over every precedence-respecting position pair.
  std::optional<double> best_delta;
  for (int a = 1; a < base.size(); ++a) {
    for (int b = a + 1; b <= base.size(); ++b) {
      Route t = base;
      insert_request(t, inst.requests[3], a, b, inst);
      if (!t.feasible) continue;
      const double delta = route_cost(t, inst) - route_cost(base, inst);
      if (!best_delta || delta < *best_delta) best_delta = delta;
    }
  }
  REQUIRE(plan.has_value() == best_delta.has_value());
  if (plan) CHECK(plan->delta == doctest::Approx(*best_delta).epsilon(1e-12));
}

TEST_CASE("insertion into an empty route lands at positions (1,2)") {
  Instance inst = one_request_instance();
  Route empty = make_route(inst.gasoline_type(), inst);
  CostContext ctx;
  auto plan = best_insertion(empty, inst.requests[0], inst, ctx);
  REQUIRE(plan.has_value());
  CHECK(plan->ppos == 1);
  CHECK(plan->dpos == 2);
}

TEST_CASE("no insertion into a vehicle at capacity") {
  ManualSetup setup;
  setup.requests = {{2.0, 0.0, 4, Direction::Outbound, 8 * kHour, 9 * kHour},
                    {2.5, 0.0, 4, Direction::Outbound, 8 * kHour, 9 * kHour},
                    {3.0, 0.0, 4, Direction::Outbound, 8 * kHour, 9 * kHour}};
  Instance inst = build_manual(setup);
  // A 4-seat vehicle cannot take a 4-passenger request on top of another.
  inst.vehicle_types[inst.gasoline_type()].capacity = 4;
  const int gv = inst.gasoline_type();
  Route base = make_route_seq(inst, gv, {inst.pickup_of(0), inst.dropoff_of(0)});
  REQUIRE(base.feasible);
  // Request 1 fits sequentially but never concurrently; request with 5+
  // passengers can never fit. Force concurrency by shrinking windows so that
  // serial service is impossible: window identical and tight.
  CostContext ctx;
  auto plan = best_insertion(base, inst.requests[1], inst, ctx);
  CHECK(plan.has_value());  // serial service is fine
  // Concurrent-only: make both dropoff windows end immediately after open.
  Instance tight = inst;
  tight.vertices[tight.dropoff_of(0)].tw_open = 8 * kHour;
  tight.vertices[tight.dropoff_of(0)].tw_close = 8 * kHour + 4 * kMinute;
  tight.vertices[tight.dropoff_of(1)].tw_open = 8 * kHour;
  tight.vertices[tight.dropoff_of(1)].tw_close = 8 * kHour + 4 * kMinute;
  tight.rebuild_matrices();
  Route tbase = make_route_seq(tight, gv, {tight.pickup_of(0), tight.dropoff_of(0)});
  REQUIRE(tbase.feasible);
  auto tplan = best_insertion(tbase, tight.requests[1], tight, ctx);
  CHECK_FALSE(tplan.has_value());
}

TEST_CASE("evaluator agrees with the independent oracles on random routes") {
  Rng rng(20240817);
  int checked = 0, grid_checked = 0;
  for (int it = 0; it < 300; ++it) {
    ManualSetup setup;
    const int n = 1 + static_cast<int>(rng.index(4));
    for (int r = 0; r < n; ++r) {
      ManualRequest mr;
      mr.x_km = rng.uniform(-3, 3);
      mr.y_km = rng.uniform(-3, 3);
      mr.passengers = 1 + static_cast<int>(rng.index(4));
      mr.dir = rng.coin() ? Direction::Outbound : Direction::Inbound;
      const Sec t0 = 6 * kHour + static_cast<Sec>(rng.index(8)) * 15 * kMinute;
      mr.tw_open = t0;
      mr.tw_close = t0 + 10 * kMinute;
      mr.max_ride_factor = 1.5;
      setup.requests.push_back(mr);
    }
    Instance inst = build_manual(setup);

    // Random precedence-respecting visit order (possibly infeasible).
    std::vector<int> seq;
    std::vector<int> open;
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    shuffle(pool, rng);
    std::size_t next = 0;
    while (seq.size() < static_cast<std::size_t>(2 * n)) {
      const bool can_open = next < pool.size();
      const bool can_close = !open.empty();
      if (can_open && (!can_close || rng.coin())) {
        seq.push_back(inst.pickup_of(pool[next]));
        open.push_back(pool[next]);
        ++next;
      } else {
        const std::size_t k = rng.index(open.size());
        seq.push_back(inst.dropoff_of(open[k]));
        open.erase(open.begin() + k);
      }
    }
    Route r = make_route_seq(inst, inst.gasoline_type(), seq);
    const bool got = evaluate_route(r, inst).feasible;

    // Loads can rule the route out before any schedule question arises.
    int load = 0;
    bool load_ok = true;
    for (int v : r.seq) {
      load += inst.vx(v).load_delta;
      if (load < 0 || load > inst.vehicle_types[r.vtype].capacity) load_ok = false;
    }
    const bool want = load_ok && FmOracle::feasible(r, inst);
    CHECK(got == want);
    ++checked;
    if (auto grid = grid_feasible(r, inst, 500000)) {
      CHECK(got == (load_ok && *grid));
      ++grid_checked;
    }
  }
  CHECK(checked == 300);
  CHECK(grid_checked > 80);
}
