#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "feeder/preprocess.hpp"
#include "support.hpp"

using namespace feeder;
using namespace feeder::test;

TEST_CASE("window tightening arithmetic on an outbound request") {
  // Dropoff window [08:50, 09:00], direct time 12 min, pickup service 30 s,
  // ride cap 18 min: pickup window becomes [08:31:30, 08:47:30].
  ManualSetup setup;
  ManualRequest r;
  r.x_km = 10.0;
  r.dir = Direction::Outbound;
  r.tw_open = 8 * kHour + 50 * kMinute;
  r.tw_close = 9 * kHour;
  setup.requests = {r};
  Instance inst = build_manual(setup);
  REQUIRE(direct_ride_time(inst.requests[0], inst) == 720);
  REQUIRE(inst.requests[0].max_ride == 1080);

  REQUIRE_FALSE(tighten_time_windows(inst).has_value());
  const Vertex& p = inst.vx(inst.pickup_of(0));
  CHECK(p.tw_open == 8 * kHour + 31 * kMinute + 30);
  CHECK(p.tw_close == 8 * kHour + 47 * kMinute + 30);

  // Tightening is idempotent (already at the fixed point).
  Instance again = inst;
  REQUIRE_FALSE(tighten_time_windows(again).has_value());
  for (int v = 0; v < inst.n_vertices(); ++v) {
    CHECK(again.vx(v).tw_open == inst.vx(v).tw_open);
    CHECK(again.vx(v).tw_close == inst.vx(v).tw_close);
  }
}

TEST_CASE("tightening never widens a window") {
  Rng rng(7);
  for (int it = 0; it < 50; ++it) {
    ManualSetup setup;
    const int n = 1 + static_cast<int>(rng.index(4));
    for (int i = 0; i < n; ++i) {
      ManualRequest mr;
      mr.x_km = rng.uniform(-3, 3);
      mr.y_km = rng.uniform(-3, 3);
      mr.dir = rng.coin() ? Direction::Outbound : Direction::Inbound;
      const Sec t0 = 6 * kHour + static_cast<Sec>(rng.index(32)) * 15 * kMinute;
      mr.tw_open = t0;
      mr.tw_close = t0 + 10 * kMinute;
      setup.requests.push_back(mr);
    }
    Instance inst = build_manual(setup);
    Instance before = inst;
    if (tighten_time_windows(inst).has_value()) continue;
    for (int v = 0; v < inst.n_vertices(); ++v) {
      CHECK(inst.vx(v).tw_open >= before.vx(v).tw_open);
      CHECK(inst.vx(v).tw_close <= before.vx(v).tw_close);
    }
  }
}

TEST_CASE("ride cap below the direct time empties the window") {
  ManualSetup setup;
  ManualRequest r;
  r.x_km = 10.0;
  r.dir = Direction::Outbound;
  r.tw_open = 8 * kHour + 50 * kMinute;
  r.tw_close = 8 * kHour + 52 * kMinute;
  r.max_ride_override = 600;  // below the 720 s direct time
  setup.requests = {r};
  Instance inst = build_manual(setup);
  auto err = tighten_time_windows(inst);
  REQUIRE(err.has_value());
  CHECK(err->find("request 0") != std::string::npos);
}

TEST_CASE("identical co-located requests are compatible") {
  ManualSetup setup;
  ManualRequest r;
  r.x_km = 2.0;
  r.dir = Direction::Outbound;
  r.tw_open = 8 * kHour;
  r.tw_close = 8 * kHour + 10 * kMinute;
  setup.requests = {r, r};
  Instance inst = build_manual(setup);
  REQUIRE_FALSE(tighten_time_windows(inst).has_value());
  CHECK(requests_compatible(0, 1, inst));
  CHECK(requests_compatible(1, 0, inst));
}

TEST_CASE("far-apart requests on the same train are incompatible") {
  // Both must reach the station inside the same tight window from opposite
  // ends of the area; no vehicle can do both.
  ManualSetup setup;
  ManualRequest a, b;
  a.x_km = 8.0;
  a.dir = Direction::Outbound;
  a.tw_open = 8 * kHour;
  a.tw_close = 8 * kHour + 6 * kMinute;
  b = a;
  b.x_km = -8.0;
  setup.requests = {a, b};
  Instance inst = build_manual(setup);
  REQUIRE_FALSE(tighten_time_windows(inst).has_value());
  CHECK_FALSE(requests_compatible(0, 1, inst));
  CHECK(requests_compatible(0, 1, inst) == requests_compatible(1, 0, inst));
}

TEST_CASE("structural eliminations on a single-request instance") {
  ManualSetup setup;
  setup.requests = {{2.0, 0.0, 1, Direction::Outbound, 8 * kHour, 9 * kHour}};
  Instance inst = build_manual(setup);
  REQUIRE_FALSE(tighten_time_windows(inst).has_value());
  ArcMask mask = eliminate_arcs(inst);
  const int d0 = inst.depot_start(), dN = inst.depot_end();
  const int p = inst.pickup_of(0), d = inst.dropoff_of(0);
  CHECK_FALSE(mask(d0, dN));
  CHECK_FALSE(mask(d, p));   // own pair reversed
  CHECK_FALSE(mask(d0, d));  // dropoff straight from the depot
  CHECK_FALSE(mask(p, dN));  // pickup straight into the end depot
  CHECK(mask(p, d));
  CHECK(mask(d0, p));
  CHECK(mask(d, dN));
  for (int v = 0; v < inst.n_vertices(); ++v) {
    CHECK_FALSE(mask(v, d0));
    CHECK_FALSE(mask(dN, v));
    CHECK_FALSE(mask(v, v));
  }
  // Sentinel distances forbid eliminated arcs in any schedule.
  CHECK(inst.dist_m(d, p) == kEliminatedDist);
}

TEST_CASE("incompatible pairs lose their cross arcs but keep own arcs") {
  ManualSetup setup;
  ManualRequest a, b;
  a.x_km = 8.0;
  a.dir = Direction::Outbound;
  a.tw_open = 8 * kHour;
  a.tw_close = 8 * kHour + 6 * kMinute;
  b = a;
  b.x_km = -8.0;
  setup.requests = {a, b};
  Instance inst = build_manual(setup);
  REQUIRE_FALSE(tighten_time_windows(inst).has_value());
  REQUIRE_FALSE(requests_compatible(0, 1, inst));
  ArcMask mask = eliminate_arcs(inst);
  const int p0 = inst.pickup_of(0), d0v = inst.dropoff_of(0);
  const int p1 = inst.pickup_of(1), d1v = inst.dropoff_of(1);
  CHECK(mask(p0, d0v));
  CHECK(mask(p1, d1v));
  for (int u : {p0, d0v})
    for (int v : {p1, d1v}) {
      CHECK_FALSE(mask(u, v));
      CHECK_FALSE(mask(v, u));
    }
}

TEST_CASE("elimination never strands a pickup") {
  Rng rng(99);
  for (int it = 0; it < 100; ++it) {
    ManualSetup setup;
    const int n = 2 + static_cast<int>(rng.index(4));
    for (int i = 0; i < n; ++i) {
      ManualRequest mr;
      mr.x_km = rng.uniform(-4, 4);
      mr.y_km = rng.uniform(-4, 4);
      mr.dir = rng.coin() ? Direction::Outbound : Direction::Inbound;
      const Sec t0 = 6 * kHour + static_cast<Sec>(rng.index(16)) * 30 * kMinute;
      mr.tw_open = t0;
      mr.tw_close = t0 + 10 * kMinute;
      setup.requests.push_back(mr);
    }
    Instance inst = build_manual(setup);
    if (tighten_time_windows(inst).has_value()) continue;
    ArcMask mask = eliminate_arcs(inst);
    for (int i = 0; i < n; ++i) {
      int out = 0;
      for (int v = 0; v < inst.n_vertices(); ++v)
        if (v != inst.pickup_of(i) && mask(inst.pickup_of(i), v)) ++out;
      CHECK(out > 0);
    }
  }
}

TEST_CASE("charger pair triples") {
  ManualSetup setup;
  ManualRequest a, b;
  a.x_km = 1.0;
  a.dir = Direction::Outbound;
  a.tw_open = 8 * kHour;
  a.tw_close = 8 * kHour + 10 * kMinute;
  b = a;
  b.x_km = -1.0;
  b.tw_open = 8 * kHour + 5 * kMinute;
  b.tw_close = 8 * kHour + 15 * kMinute;
  setup.requests = {a, b};
  setup.config.open = {1};
  setup.config.counts = {{1}};

  SUBCASE("charger at the station with wide windows yields no triples") {
    Instance inst = build_manual(setup);
    REQUIRE_FALSE(tighten_time_windows(inst).has_value());
    CHECK(charger_infeasible_pairs(inst).empty());
  }

  SUBCASE("remote charger with tight windows yields triples for every dummy") {
    setup.sites = {{0, 30000, 30000, 1000.0, 4.11}};  // 42 km off
    Instance inst = build_manual(setup);
    REQUIRE_FALSE(tighten_time_windows(inst).has_value());
    auto triples = charger_infeasible_pairs(inst);
    CHECK(static_cast<int>(triples.size()) == inst.dummies_per_charger);
    for (const auto& t : triples) {
      CHECK(t.i == 0);
      CHECK(t.j == 1);
    }
  }
}

TEST_CASE("preprocess throws on an infeasible request") {
  ManualSetup setup;
  ManualRequest r;
  r.x_km = 10.0;
  r.dir = Direction::Outbound;
  r.tw_open = 8 * kHour + 50 * kMinute;
  r.tw_close = 8 * kHour + 52 * kMinute;
  r.max_ride_override = 600;
  setup.requests = {r};
  Instance inst = build_manual(setup);
  CHECK_THROWS_AS(preprocess(inst), std::runtime_error);
}
