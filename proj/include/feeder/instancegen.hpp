#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feeder/model.hpp"
#include "feeder/rng.hpp"

namespace feeder {

struct FrequencyBand {
  Sec start = 0;    // seconds from midnight, closed interval
  Sec end = 0;
  Sec headway = 0;  // seconds between departures
};

struct TimetableSpec {
  std::vector<FrequencyBand> bands;
};

struct Timetable {
  std::vector<Sec> departures;  // strictly increasing, seconds from midnight
};

// Service-day bands: 15 min in 7-9 and 17-19, 30 min in 6-7, 9-11, 16-17 and
// 19-20, hourly otherwise within 6-23.
TimetableSpec default_timetable_spec();

// Union of per-band departures over closed intervals; throws on overlapping
// band interiors or non-positive headways.
Timetable build_timetable(const TimetableSpec& spec);

enum class Geometry { Square, Disc };

struct GenParams {
  Geometry geometry = Geometry::Square;
  double side_km = 4.0;        // square side
  double diameter_km = 17.8;   // disc diameter
  double stop_spacing_km = 1.0;
  double station_exclusion_km = 0.0;  // stops closer than this are dropped
  int n_requests = 0;
  int pax_min = 1;
  int pax_max = 4;
  Sec max_station_wait = 10 * kMinute;
  Sec station_buffer = 2 * kMinute;  // slack before a train departure
  double detour_factor = 1.5;
  Sec service_time = 30;  // per pickup
  int dummies_per_charger = 4;
  double speed_kmh = 50.0;
  int max_vertices = 100000;
  std::uint64_t seed = 0;
};

GenParams case_study_params();

// Stops on a uniform grid with the station at the centre; each request draws
// a stop, a passenger count, a direction and a train time. Outbound requests
// get their dropoff window at the station, inbound their pickup window.
Instance generate_instance(const GenParams& params, const Timetable& timetable,
                           const std::vector<VehicleType>& vehicle_types,
                           const std::vector<SiteCandidate>& sites,
                           const std::vector<ChargerType>& charger_types,
                           const ChargingConfig& config);

struct Scenario {
  int id = 0;
  double probability = 0;
  Instance instance;
};

// Independent draws with per-scenario substreams of (seed, id); uniform
// probabilities by default.
std::vector<Scenario> generate_scenarios(const GenParams& params, const Timetable& timetable,
                                         const std::vector<VehicleType>& vehicle_types,
                                         const std::vector<SiteCandidate>& sites,
                                         const std::vector<ChargerType>& charger_types,
                                         const ChargingConfig& config, int n_scenarios);

// JSON persistence; write-then-read is the identity on every field. Parse
// errors name the offending field.
void write_instance(const Instance& inst, const std::string& path);
Instance read_instance(const std::string& path);
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

// Rebuilds charger dummies and matrices for a different charging config;
// used when sweeping configurations over fixed demand scenarios.
Instance with_config(const Instance& base, const ChargingConfig& config);

}  // namespace feeder
