#include "feeder/instancegen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace feeder {

using nlohmann::json;

TimetableSpec default_timetable_spec() {
  TimetableSpec s;
  auto h = [](int hours) { return static_cast<Sec>(hours) * kHour; };
  s.bands = {
      {h(6), h(7), 30 * kMinute},  {h(7), h(9), 15 * kMinute},  {h(9), h(11), 30 * kMinute},
      {h(11), h(16), 60 * kMinute}, {h(16), h(17), 30 * kMinute}, {h(17), h(19), 15 * kMinute},
      {h(19), h(20), 30 * kMinute}, {h(20), h(23), 60 * kMinute},
  };
  return s;
}

Timetable build_timetable(const TimetableSpec& spec) {
  std::vector<FrequencyBand> bands = spec.bands;
  std::sort(bands.begin(), bands.end(),
            [](const FrequencyBand& a, const FrequencyBand& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (bands[i].headway <= 0) throw std::invalid_argument("timetable band with non-positive headway");
    if (bands[i].end < bands[i].start) throw std::invalid_argument("timetable band ends before it starts");
    if (i + 1 < bands.size() && bands[i].end > bands[i + 1].start)
      throw std::invalid_argument("overlapping timetable bands");
  }
  std::set<Sec> deps;
  for (const FrequencyBand& b : bands)
    for (Sec t = b.start; t <= b.end; t += b.headway) deps.insert(t);
  Timetable tt;
  tt.departures.assign(deps.begin(), deps.end());
  return tt;
}

GenParams case_study_params() {
  GenParams p;
  p.geometry = Geometry::Disc;
  p.diameter_km = 17.8;
  p.station_exclusion_km = 1.0;
  p.n_requests = 200;
  return p;
}

namespace {

std::vector<std::pair<Metre, Metre>> grid_stops(const GenParams& p) {
  std::vector<std::pair<Metre, Metre>> stops;
  const Metre spacing = static_cast<Metre>(std::llround(p.stop_spacing_km * 1000.0));
  if (spacing <= 0) throw std::invalid_argument("stop spacing must be positive");
  const double radius_m =
      (p.geometry == Geometry::Square ? p.side_km / 2.0 : p.diameter_km / 2.0) * 1000.0;
  const Metre half = static_cast<Metre>(std::floor(radius_m / static_cast<double>(spacing))) * spacing;
  const double excl_m = p.station_exclusion_km * 1000.0;
  for (Metre x = -half; x <= half; x += spacing) {
    for (Metre y = -half; y <= half; y += spacing) {
      const double r = std::sqrt(static_cast<double>(x) * x + static_cast<double>(y) * y);
      if (p.geometry == Geometry::Disc && r > radius_m + 1e-9) continue;
      if (x == 0 && y == 0) continue;  // the station itself
      if (excl_m > 0 && r < excl_m - 1e-9) continue;
      stops.push_back({x, y});
    }
  }
  if (stops.empty()) throw std::invalid_argument("service area contains no stops");
  return stops;
}

}  // namespace

Instance generate_instance(const GenParams& params, const Timetable& timetable,
                           const std::vector<VehicleType>& vehicle_types,
                           const std::vector<SiteCandidate>& sites,
                           const std::vector<ChargerType>& charger_types,
                           const ChargingConfig& config) {
  if (timetable.departures.empty()) throw std::invalid_argument("empty timetable");
  Rng rng(params.seed);
  const auto stops = grid_stops(params);
  const int n = params.n_requests;

  Instance inst;
  inst.speed_kmh = params.speed_kmh;
  inst.dummies_per_charger = params.dummies_per_charger;
  inst.sites = sites;
  inst.charger_types = charger_types;
  inst.config = config;
  inst.vehicle_types = vehicle_types;
  inst.fleet_bounds.assign(vehicle_types.size(), std::max(4, n));

  Vertex depot;
  depot.id = 0;
  depot.kind = VertexKind::DepotStart;
  depot.x = 0;
  depot.y = 0;  // co-located with the station
  depot.tw_open = 0;
  depot.tw_close = kHorizon;
  inst.vertices.push_back(depot);

  struct Draw {
    std::pair<Metre, Metre> stop;
    int pax;
    Direction dir;
    Sec train;
  };
  std::vector<Draw> draws;
  for (int r = 0; r < n; ++r) {
    Draw d;
    d.stop = stops[rng.index(stops.size())];
    d.pax = static_cast<int>(rng.uniform_int(params.pax_min, params.pax_max));
    d.dir = rng.coin() ? Direction::Outbound : Direction::Inbound;
    d.train = timetable.departures[rng.index(timetable.departures.size())];
    draws.push_back(d);
  }

  // Pickups 1..n then dropoffs n+1..2n; duplicate physical stops simply get
  // their own vertex.
  for (int r = 0; r < n; ++r) {
    const Draw& d = draws[r];
    Vertex p;
    p.id = 1 + r;
    p.kind = VertexKind::Pickup;
    p.load_delta = d.pax;
    p.service = params.service_time;
    if (d.dir == Direction::Outbound) {
      p.x = d.stop.first;
      p.y = d.stop.second;
      p.tw_open = 0;
      p.tw_close = kHorizon;
    } else {
      p.x = 0;
      p.y = 0;
      p.transit_station = true;
      p.tw_open = d.train;
      p.tw_close = d.train + params.max_station_wait;
    }
    inst.vertices.push_back(p);
  }
  for (int r = 0; r < n; ++r) {
    const Draw& d = draws[r];
    Vertex q;
    q.id = 1 + n + r;
    q.kind = VertexKind::Dropoff;
    q.load_delta = -d.pax;
    q.service = 0;
    if (d.dir == Direction::Outbound) {
      q.x = 0;
      q.y = 0;
      q.transit_station = true;
      q.tw_open = d.train - params.max_station_wait;
      q.tw_close = d.train - params.station_buffer;
    } else {
      q.x = d.stop.first;
      q.y = d.stop.second;
      q.tw_open = 0;
      q.tw_close = kHorizon;
    }
    inst.vertices.push_back(q);
  }

  inst.build_charger_vertices(0, 0);
  if (inst.n_vertices() > params.max_vertices)
    throw std::invalid_argument("request count exceeds the vertex budget");

  for (int r = 0; r < n; ++r) {
    Request req;
    req.id = r;
    req.pickup = 1 + r;
    req.dropoff = 1 + n + r;
    req.passengers = draws[r].pax;
    req.direction = draws[r].dir;
    req.max_ride = static_cast<Sec>(
        std::llround(params.detour_factor * static_cast<double>(direct_ride_time(req, inst))));
    inst.requests.push_back(req);
  }
  return inst;
}

std::vector<Scenario> generate_scenarios(const GenParams& params, const Timetable& timetable,
                                         const std::vector<VehicleType>& vehicle_types,
                                         const std::vector<SiteCandidate>& sites,
                                         const std::vector<ChargerType>& charger_types,
                                         const ChargingConfig& config, int n_scenarios) {
  if (n_scenarios < 1) throw std::invalid_argument("need at least one scenario");
  std::vector<Scenario> out;
  for (int k = 0; k < n_scenarios; ++k) {
    GenParams p = params;
    p.seed = Rng::substream(params.seed, static_cast<std::uint64_t>(k)).next();
    Scenario sc;
    sc.id = k;
    sc.probability = 1.0 / n_scenarios;
    sc.instance = generate_instance(p, timetable, vehicle_types, sites, charger_types, config);
    out.push_back(std::move(sc));
  }
  return out;
}

namespace {

json vertex_to_json(const Vertex& v) {
  json j;
  j["id"] = v.id;
  switch (v.kind) {
    case VertexKind::DepotStart: j["kind"] = "depot_start"; break;
    case VertexKind::DepotEnd: j["kind"] = "depot_end"; break;
    case VertexKind::Pickup: j["kind"] = "pickup"; break;
    case VertexKind::Dropoff: j["kind"] = "dropoff"; break;
    case VertexKind::ChargerDummy: j["kind"] = "charger_dummy"; break;
  }
  j["x_m"] = v.x;
  j["y_m"] = v.y;
  j["service_s"] = v.service;
  j["load"] = v.load_delta;
  j["tw"] = {v.tw_open, v.tw_close};
  j["transit"] = v.transit_station;
  j["charger"] = v.physical_charger;
  return j;
}

Vertex vertex_from_json(const json& j) {
  Vertex v;
  v.id = j.at("id").get<int>();
  const std::string k = j.at("kind").get<std::string>();
  if (k == "depot_start") v.kind = VertexKind::DepotStart;
  else if (k == "depot_end") v.kind = VertexKind::DepotEnd;
  else if (k == "pickup") v.kind = VertexKind::Pickup;
  else if (k == "dropoff") v.kind = VertexKind::Dropoff;
  else if (k == "charger_dummy") v.kind = VertexKind::ChargerDummy;
  else throw std::runtime_error("vertices[].kind: unknown value '" + k + "'");
  v.x = j.at("x_m").get<Metre>();
  v.y = j.at("y_m").get<Metre>();
  v.service = j.at("service_s").get<Sec>();
  v.load_delta = j.at("load").get<int>();
  v.tw_open = j.at("tw").at(0).get<Sec>();
  v.tw_close = j.at("tw").at(1).get<Sec>();
  v.transit_station = j.at("transit").get<bool>();
  v.physical_charger = j.at("charger").get<int>();
  return v;
}

json vtype_to_json(const VehicleType& t) {
  json j;
  j["kind"] = t.kind == PowerKind::Electric ? "electric" : "gasoline";
  j["capacity"] = t.capacity;
  j["e_min"] = t.e_min;
  j["e_max"] = t.e_max;
  j["e_init"] = t.e_init;
  j["consumption"] = t.consumption;
  j["energy_price"] = t.energy_price;
  j["co2_rate"] = t.co2_rate;
  j["daily_cost"] = t.daily_cost;
  j["overnight_charger_cost"] = t.overnight_charger_cost;
  j["name"] = t.name;
  return j;
}

VehicleType vtype_from_json(const json& j) {
  VehicleType t;
  t.kind = j.at("kind").get<std::string>() == "electric" ? PowerKind::Electric
                                                         : PowerKind::Gasoline;
  t.capacity = j.at("capacity").get<int>();
  t.e_min = j.at("e_min").get<double>();
  t.e_max = j.at("e_max").get<double>();
  t.e_init = j.at("e_init").get<double>();
  t.consumption = j.at("consumption").get<double>();
  t.energy_price = j.at("energy_price").get<double>();
  t.co2_rate = j.at("co2_rate").get<double>();
  t.daily_cost = j.at("daily_cost").get<double>();
  t.overnight_charger_cost = j.at("overnight_charger_cost").get<double>();
  t.name = j.at("name").get<std::string>();
  return t;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json j;
  j["meta"]["seed"] = 0;  // populated by the generator CLI
  j["meta"]["speed_kmh"] = inst.speed_kmh;
  j["meta"]["dummies_per_charger"] = inst.dummies_per_charger;
  j["vertices"] = json::array();
  for (const Vertex& v : inst.vertices) j["vertices"].push_back(vertex_to_json(v));
  j["requests"] = json::array();
  for (const Request& r : inst.requests) {
    json jr;
    jr["id"] = r.id;
    jr["pickup"] = r.pickup;
    jr["dropoff"] = r.dropoff;
    jr["passengers"] = r.passengers;
    jr["direction"] = r.direction == Direction::Outbound ? "outbound" : "inbound";
    jr["max_ride_s"] = r.max_ride;
    j["requests"].push_back(jr);
  }
  j["vehicle_types"] = json::array();
  for (const VehicleType& t : inst.vehicle_types) j["vehicle_types"].push_back(vtype_to_json(t));
  j["fleet_bounds"] = inst.fleet_bounds;
  j["sites"] = json::array();
  for (const SiteCandidate& s : inst.sites) {
    j["sites"].push_back({{"id", s.id},
                          {"x_m", s.x},
                          {"y_m", s.y},
                          {"power_limit_kw", s.power_limit_kw},
                          {"opening_cost", s.opening_cost}});
  }
  j["charger_types"] = json::array();
  for (const ChargerType& c : inst.charger_types) {
    j["charger_types"].push_back(
        {{"id", c.id}, {"power_kw", c.power_kw}, {"daily_cost", c.daily_cost}, {"name", c.name}});
  }
  j["charging_config"]["open"] = inst.config.open;
  j["charging_config"]["counts"] = inst.config.counts;
  j["co2"]["pi"] = inst.pi;
  if (inst.gamma_ref) j["co2"]["gamma"] = *inst.gamma_ref;
  return j.dump(2);
}

Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("instance parse error: ") + e.what());
  }
  Instance inst;
  auto need = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw std::runtime_error(std::string("instance missing field `") + key + "`");
    return j.at(key);
  };
  try {
    const json& meta = need("meta");
    inst.speed_kmh = meta.at("speed_kmh").get<double>();
    inst.dummies_per_charger = meta.at("dummies_per_charger").get<int>();
    for (const json& jv : need("vertices")) inst.vertices.push_back(vertex_from_json(jv));
    for (const json& jr : need("requests")) {
      Request r;
      r.id = jr.at("id").get<int>();
      r.pickup = jr.at("pickup").get<int>();
      r.dropoff = jr.at("dropoff").get<int>();
      r.passengers = jr.at("passengers").get<int>();
      r.direction = jr.at("direction").get<std::string>() == "outbound" ? Direction::Outbound
                                                                        : Direction::Inbound;
      r.max_ride = jr.at("max_ride_s").get<Sec>();
      inst.requests.push_back(r);
    }
    for (const json& jt : need("vehicle_types")) inst.vehicle_types.push_back(vtype_from_json(jt));
    inst.fleet_bounds = need("fleet_bounds").get<std::vector<int>>();
    for (const json& js : need("sites")) {
      SiteCandidate s;
      s.id = js.at("id").get<int>();
      s.x = js.at("x_m").get<Metre>();
      s.y = js.at("y_m").get<Metre>();
      s.power_limit_kw = js.at("power_limit_kw").get<double>();
      s.opening_cost = js.at("opening_cost").get<double>();
      inst.sites.push_back(s);
    }
    for (const json& jc : need("charger_types")) {
      ChargerType c;
      c.id = jc.at("id").get<int>();
      c.power_kw = jc.at("power_kw").get<double>();
      c.daily_cost = jc.at("daily_cost").get<double>();
      c.name = jc.at("name").get<std::string>();
      inst.charger_types.push_back(c);
    }
    const json& cc = need("charging_config");
    inst.config.open = cc.at("open").get<std::vector<std::uint8_t>>();
    inst.config.counts = cc.at("counts").get<std::vector<std::vector<int>>>();
    const json& co2 = need("co2");
    inst.pi = co2.at("pi").get<double>();
    if (co2.contains("gamma")) inst.gamma_ref = co2.at("gamma").get<double>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("instance parse error: ") + e.what());
  }

  // Physical chargers are derived from the config in file order, matching
  // the dummy vertices' wiring.
  inst.chargers.clear();
  for (std::size_t w = 0; w < inst.config.counts.size(); ++w)
    for (std::size_t h = 0; h < inst.config.counts[w].size(); ++h)
      for (int c = 0; c < inst.config.counts[w][h]; ++c)
        inst.chargers.push_back(
            {static_cast<int>(inst.chargers.size()), static_cast<int>(w), static_cast<int>(h)});
  inst.rebuild_matrices();
  return inst;
}

void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << instance_to_json(inst) << "\n";
}

Instance read_instance(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return instance_from_json(ss.str());
}

Instance with_config(const Instance& base, const ChargingConfig& config) {
  Instance inst = base;
  // Drop old charger dummies and the end depot, then rebuild both.
  Metre dep_x = inst.vertices.back().x, dep_y = inst.vertices.back().y;
  while (!inst.vertices.empty() &&
         (inst.vertices.back().kind == VertexKind::ChargerDummy ||
          inst.vertices.back().kind == VertexKind::DepotEnd))
    inst.vertices.pop_back();
  inst.config = config;
  inst.arc_ok.clear();
  inst.build_charger_vertices(dep_x, dep_y);
  return inst;
}

}  // namespace feeder
