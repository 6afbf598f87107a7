#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace feeder {

using Sec = std::int64_t;    // wall-clock times and durations, integer seconds
using Metre = std::int64_t;  // distances, integer metres

constexpr Sec kMinute = 60;
constexpr Sec kHour = 3600;
// Latest representable service time; charger dummies and depots carry this as
// their closing time so they never constrain a schedule.
constexpr Sec kHorizon = 48 * kHour;

// Arc distance sentinel used for eliminated arcs (1e6 km).
constexpr Metre kEliminatedDist = 1000000000;

enum class VertexKind { DepotStart, DepotEnd, Pickup, Dropoff, ChargerDummy };
enum class Direction { Outbound, Inbound };
enum class PowerKind { Electric, Gasoline };

struct Vertex {
  int id = 0;
  VertexKind kind = VertexKind::Pickup;
  Metre x = 0, y = 0;
  Sec service = 0;      // u_i
  int load_delta = 0;   // q_i, signed (+ pickup, - dropoff, 0 otherwise)
  Sec tw_open = 0;      // e_i
  Sec tw_close = kHorizon;  // l_i
  bool transit_station = false;
  int physical_charger = -1;  // >= 0 only on charger dummies
};

// Paired pickup/dropoff with the P/D index convention: pickup vertex p is in
// {1..n} and its dropoff is p + n.
struct Request {
  int id = 0;
  int pickup = 0;
  int dropoff = 0;
  int passengers = 1;
  Direction direction = Direction::Outbound;
  Sec max_ride = 0;  // L_i
};

struct VehicleType {
  PowerKind kind = PowerKind::Gasoline;
  int capacity = 0;            // Q_max, seats
  double e_min = 0;            // kWh, electric only
  double e_max = 0;
  double e_init = 0;
  double consumption = 0;      // beta: kWh/km (electric) or l/km (gasoline)
  double energy_price = 0;     // lambda: EUR/kWh or EUR/l
  double co2_rate = 0;         // theta: kg per kWh or per litre
  double daily_cost = 0;       // f_k, EUR/day
  double overnight_charger_cost = 0;  // f-bar_k, EUR/day; 0 iff gasoline
  std::string name;
};

struct ChargerType {
  int id = 0;
  double power_kw = 0;    // theta_h
  double daily_cost = 0;  // f_h, EUR/day
  std::string name;

  double rate_kwh_per_s() const { return power_kw / 3600.0; }
  double rate_kwh_per_min() const { return power_kw / 60.0; }
};

struct SiteCandidate {
  int id = 0;
  Metre x = 0, y = 0;
  double power_limit_kw = 0;  // omega_w
  double opening_cost = 0;    // f_0, EUR/day
};

// Upper-level decision: which sites are open and how many chargers of each
// type they carry. Site charger types are homogeneous.
struct ChargingConfig {
  std::vector<std::uint8_t> open;        // y-tilde_w
  std::vector<std::vector<int>> counts;  // y_hw indexed [site][charger type]

  int total_chargers() const;
  bool empty() const { return total_chargers() == 0; }
};

// One installed charger derived from a ChargingConfig.
struct PhysicalCharger {
  int id = 0;
  int site = 0;
  int type = 0;
};

struct Instance {
  std::vector<Vertex> vertices;  // 0, P, D, S', N+1 in that order
  std::vector<Request> requests;
  std::vector<VehicleType> vehicle_types;  // one electric and one gasoline
  std::vector<int> fleet_bounds;           // n_m per vehicle type
  std::vector<SiteCandidate> sites;
  std::vector<ChargerType> charger_types;
  ChargingConfig config;
  std::vector<PhysicalCharger> chargers;  // derived from config
  int dummies_per_charger = 4;
  double speed_kmh = 50.0;
  double pi = 0.0;                   // CO2 reduction target, in [0,1]
  std::optional<double> gamma_ref;   // reference emission (kg), once computed

  std::vector<Metre> dist;          // c_ij, flattened V*V
  std::vector<Sec> time;            // t_ij, flattened V*V
  std::vector<std::uint8_t> arc_ok; // arc mask; empty until preprocessing

  int n_requests() const { return static_cast<int>(requests.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int depot_start() const { return 0; }
  int depot_end() const { return n_vertices() - 1; }
  int pickup_of(int r) const { return 1 + r; }
  int dropoff_of(int r) const { return 1 + n_requests() + r; }

  // Request index of a pickup or dropoff vertex, -1 otherwise.
  int request_of(int v) const {
    int n = n_requests();
    if (v >= 1 && v <= n) return v - 1;
    if (v >= n + 1 && v <= 2 * n) return v - n - 1;
    return -1;
  }

  const Vertex& vx(int v) const { return vertices[static_cast<std::size_t>(v)]; }
  bool is_charger(int v) const { return vx(v).kind == VertexKind::ChargerDummy; }

  Metre dist_m(int i, int j) const { return dist[static_cast<std::size_t>(i) * vertices.size() + j]; }
  Sec time_s(int i, int j) const { return time[static_cast<std::size_t>(i) * vertices.size() + j]; }
  double dist_km(int i, int j) const { return static_cast<double>(dist_m(i, j)) / 1000.0; }
  bool arc(int i, int j) const {
    return arc_ok.empty() || arc_ok[static_cast<std::size_t>(i) * vertices.size() + j] != 0;
  }

  int electric_type() const;
  int gasoline_type() const;

  std::vector<int> dummies_of(int physical) const;
  std::vector<int> charger_dummies() const;

  // Recomputes c_ij and t_ij from coordinates: Euclidean metres, seconds at
  // speed_kmh, both rounded to integers. Clears any arc mask / sentinels.
  void rebuild_matrices();

  // Appends charger dummy vertices (dummies_per_charger each) and the final
  // depot vertex for the chargers implied by `config`; vertices must end at
  // the last dropoff when called. Rebuilds matrices.
  void build_charger_vertices(Metre depot_x, Metre depot_y, Sec dummy_service = 0);
};

// Structural invariant check; returns human-readable findings, empty = valid.
std::vector<std::string> validate_instance(const Instance& inst);

// t(pickup, dropoff) in seconds.
Sec direct_ride_time(const Request& req, const Instance& inst);

// Table-derived default configurations.
VehicleType default_ev_type1();
VehicleType default_ev_type2();
VehicleType default_gv();
ChargerType default_rapid_charger();
ChargerType default_superfast_charger();
double default_opening_cost(const ChargerType& t);

}  // namespace feeder
