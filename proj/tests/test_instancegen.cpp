#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <set>

#include "feeder/instancegen.hpp"
#include "feeder/preprocess.hpp"
#include "feeder/search.hpp"
#include "support.hpp"

using namespace feeder;
using namespace feeder::test;

namespace {

Instance generated(const GenParams& p) {
  ChargingConfig cfg;
  cfg.open = {1};
  cfg.counts = {{2, 0}};
  return generate_instance(p, build_timetable(default_timetable_spec()),
                           {default_ev_type1(), default_gv()}, {{0, 0, 0, 1000.0, 4.11}},
                           {default_rapid_charger(), default_superfast_charger()}, cfg);
}

}  // namespace

TEST_CASE("service-day timetable carries the rush-hour pattern") {
  Timetable tt = build_timetable(default_timetable_spec());
  std::set<Sec> deps(tt.departures.begin(), tt.departures.end());
  CHECK(deps.count(7 * kHour));
  CHECK(deps.count(7 * kHour + 15 * kMinute));
  CHECK(deps.count(7 * kHour + 30 * kMinute));
  CHECK(deps.count(12 * kHour));
  CHECK_FALSE(deps.count(12 * kHour + 15 * kMinute));  // hourly off-peak
  CHECK(deps.count(6 * kHour));
  CHECK(deps.count(23 * kHour));

  // Departure count equals the dedup'd band union.
  std::set<Sec> expect;
  for (const FrequencyBand& b : default_timetable_spec().bands)
    for (Sec t = b.start; t <= b.end; t += b.headway) expect.insert(t);
  CHECK(deps == expect);
}

TEST_CASE("single hourly band") {
  TimetableSpec spec;
  spec.bands = {{6 * kHour, 8 * kHour, 60 * kMinute}};
  Timetable tt = build_timetable(spec);
  CHECK(tt.departures == std::vector<Sec>{6 * kHour, 7 * kHour, 8 * kHour});
}

TEST_CASE("overlapping bands are rejected") {
  TimetableSpec spec;
  spec.bands = {{6 * kHour, 8 * kHour, 60 * kMinute}, {7 * kHour, 9 * kHour, 30 * kMinute}};
  CHECK_THROWS_AS(build_timetable(spec), std::invalid_argument);
}

TEST_CASE("generated instances have the expected shape and validate") {
  GenParams p;
  p.n_requests = 100;
  p.seed = 7;
  Instance inst = generated(p);
  CHECK(inst.n_requests() == 100);
  // depot + 100 pickups + 100 dropoffs + 2 chargers x 4 dummies + end depot
  CHECK(inst.n_vertices() == 1 + 200 + 8 + 1);
  CHECK(validate_instance(inst).empty());
  // Every request has exactly one transit-station endpoint at the centre.
  for (const Request& r : inst.requests) {
    const Vertex& pv = inst.vx(r.pickup);
    const Vertex& dv = inst.vx(r.dropoff);
    CHECK(pv.transit_station != dv.transit_station);
    const Vertex& st = pv.transit_station ? pv : dv;
    CHECK(st.x == 0);
    CHECK(st.y == 0);
  }
  // Windows survive tightening.
  Instance t = inst;
  CHECK_FALSE(tighten_time_windows(t).has_value());
}

TEST_CASE("zero requests leaves depot and charger vertices only") {
  GenParams p;
  p.n_requests = 0;
  p.seed = 1;
  Instance inst = generated(p);
  CHECK(inst.n_requests() == 0);
  CHECK(inst.n_vertices() == 2 + 8);
  CHECK(validate_instance(inst).empty());
}

TEST_CASE("identical seeds give byte-identical files, different seeds differ") {
  GenParams p;
  p.n_requests = 40;
  p.seed = 123;
  const std::string a = instance_to_json(generated(p));
  const std::string b = instance_to_json(generated(p));
  CHECK(a == b);
  p.seed = 124;
  CHECK(a != instance_to_json(generated(p)));
}

TEST_CASE("case-study geometry keeps stops off the station ring") {
  GenParams p = case_study_params();
  p.seed = 3;
  Instance inst = generated(p);
  REQUIRE(inst.n_requests() == 200);
  for (const Request& r : inst.requests) {
    const Vertex& stop =
        inst.vx(r.pickup).transit_station ? inst.vx(r.dropoff) : inst.vx(r.pickup);
    const double dist_km =
        std::sqrt(static_cast<double>(stop.x) * stop.x + static_cast<double>(stop.y) * stop.y) /
        1000.0;
    CHECK(dist_km >= 1.0);
    CHECK(dist_km <= 17.8 / 2 + 1e-9);
  }
}

TEST_CASE("scenario probabilities are uniform and substreams independent") {
  GenParams p;
  p.n_requests = 10;
  p.seed = 5;
  ChargingConfig cfg;
  cfg.open = {1};
  cfg.counts = {{1, 0}};
  auto scenarios = generate_scenarios(
      p, build_timetable(default_timetable_spec()), {default_ev_type1(), default_gv()},
      {{0, 0, 0, 1000.0, 4.11}}, {default_rapid_charger(), default_superfast_charger()}, cfg, 5);
  REQUIRE(scenarios.size() == 5);
  double psum = 0;
  std::set<std::string> bodies;
  for (const Scenario& sc : scenarios) {
    CHECK(sc.probability == doctest::Approx(0.2));
    psum += sc.probability;
    bodies.insert(instance_to_json(sc.instance));
  }
  CHECK(psum == doctest::Approx(1.0));
  CHECK(bodies.size() == 5);  // independent draws
}

TEST_CASE("request train times follow the timetable density") {
  // Uniform sampling over departures makes hourly request counts
  // proportional to hourly departure counts; chi-square against that
  // expectation must stay below a generous critical value.
  GenParams p;
  p.n_requests = 2000;
  p.seed = 11;
  Timetable tt = build_timetable(default_timetable_spec());
  Instance inst = generated(p);

  std::map<int, int> dep_per_hour;
  for (Sec t : tt.departures) ++dep_per_hour[static_cast<int>(t / kHour)];
  std::map<int, int> req_per_hour;
  for (const Request& r : inst.requests) {
    const bool inbound = inst.vx(r.pickup).transit_station;
    const Vertex& st = inbound ? inst.vx(r.pickup) : inst.vx(r.dropoff);
    // Outbound windows end `buffer` before the train; inbound open at it.
    const Sec train = inbound ? st.tw_open : st.tw_close + p.station_buffer;
    ++req_per_hour[static_cast<int>(train / kHour)];
  }
  double chi2 = 0;
  for (const auto& [hour, deps] : dep_per_hour) {
    const double expect =
        static_cast<double>(p.n_requests) * deps / static_cast<double>(tt.departures.size());
    const double got = req_per_hour.count(hour) ? req_per_hour[hour] : 0;
    chi2 += (got - expect) * (got - expect) / expect;
  }
  // 1% critical value for ~17 dof is about 33.4.
  CHECK(chi2 < 40.0);
}

TEST_CASE("write-read round trip is the identity") {
  GenParams p;
  p.n_requests = 25;
  p.seed = 9;
  Instance inst = generated(p);
  const std::string path = "roundtrip_instance.json";
  write_instance(inst, path);
  Instance back = read_instance(path);
  std::remove(path.c_str());
  CHECK(instance_to_json(inst) == instance_to_json(back));
  CHECK(back.dist == inst.dist);
  CHECK(back.time == inst.time);
  CHECK(back.chargers.size() == inst.chargers.size());
}

TEST_CASE("missing fields are named in parse errors") {
  GenParams p;
  p.n_requests = 2;
  p.seed = 1;
  std::string text = instance_to_json(generated(p));
  const auto pos = text.find("\"requests\"");
  REQUIRE(pos != std::string::npos);
  std::string broken = text;
  broken.replace(pos, 10, "\"requestz\"");
  try {
    instance_from_json(broken);
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("requests") != std::string::npos);
  }
}

TEST_CASE("a written two-request file validates and solves") {
  GenParams p;
  p.n_requests = 2;
  p.seed = 42;
  Instance inst = generated(p);
  const std::string path = "hand_instance.json";
  write_instance(inst, path);
  Instance back = read_instance(path);
  std::remove(path.c_str());
  REQUIRE(validate_instance(back).empty());
  preprocess(back);
  SearchParams params;
  params.init_samples = 50;
  params.iter_max = 500;
  SolveResult res = solve_fs_mfrp(back, std::numeric_limits<double>::infinity(), params, 1);
  CHECK(res.feasible);
  CHECK(res.best.n_unserved() == 0);
}
