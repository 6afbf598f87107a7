#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>
#include <sstream>

#include "feeder/milpexport.hpp"
#include "feeder/oracle.hpp"
#include "feeder/preprocess.hpp"
#include "feeder/search.hpp"
#include "support.hpp"

using namespace feeder;
using namespace feeder::test;

namespace {

// Minimal parser for the exported LP dialect; used to audit the text through
// a route independent of the exporter's internal model.
struct LpText {
  std::map<std::string, double> obj;
  struct Row {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    char sense = 'L';
    double rhs = 0;
  };
  std::vector<Row> rows;
  std::map<std::string, std::pair<double, double>> bounds;
  std::set<std::string> binaries;

  static LpText parse(const std::string& text) {
    LpText lp;
    std::istringstream is(text);
    std::string line, section;
    std::vector<std::string> tokens;
    auto flush_row = [&]() {
      if (tokens.empty()) return;
      if (section == "obj") {
        parse_terms(tokens, 0, tokens.size(), lp.obj);
      } else if (section == "rows") {
        Row r;
        r.name = tokens[0].substr(0, tokens[0].size() - 1);
        std::size_t i = 1, sense_at = tokens.size();
        for (std::size_t k = 1; k < tokens.size(); ++k)
          if (tokens[k] == "<=" || tokens[k] == ">=" || tokens[k] == "=") sense_at = k;
        std::map<std::string, double> terms;
        parse_terms(tokens, i, sense_at, terms);
        for (const auto& [n, c] : terms) r.terms.push_back({n, c});
        r.sense = tokens[sense_at] == "<=" ? 'L' : (tokens[sense_at] == ">=" ? 'G' : 'E');
        r.rhs = std::stod(tokens[sense_at + 1]);
        lp.rows.push_back(std::move(r));
      }
      tokens.clear();
    };
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '\\') continue;
      if (line == "Minimize" || line == "Subject To" || line == "Bounds" ||
          line == "Binaries" || line == "End") {
        flush_row();
        section = line == "Minimize" ? "obj"
                  : line == "Subject To" ? "rows"
                  : line == "Bounds" ? "bounds"
                  : line == "Binaries" ? "bin" : "end";
        continue;
      }
      std::istringstream ls(line);
      std::string tok;
      if (section == "bounds") {
        // " lo <= name <= hi" or " name = v"
        std::vector<std::string> t;
        while (ls >> tok) t.push_back(tok);
        if (t.size() == 5 && t[1] == "<=" && t[3] == "<=") {
          lp.bounds[t[2]] = {std::stod(t[0]), std::stod(t[4])};
        } else if (t.size() == 3 && t[1] == "=") {
          lp.bounds[t[0]] = {std::stod(t[2]), std::stod(t[2])};
        }
        continue;
      }
      if (section == "bin") {
        while (ls >> tok) lp.binaries.insert(tok);
        continue;
      }
      const bool continuation = line.size() >= 2 && line[0] == ' ' && line[1] == ' ';
      if (!continuation) flush_row();
      while (ls >> tok) {
        if (tok == "obj:" && section == "obj") continue;
        tokens.push_back(tok);
      }
    }
    flush_row();
    return lp;
  }

  static void parse_terms(const std::vector<std::string>& t, std::size_t from, std::size_t to,
                          std::map<std::string, double>& out) {
    double sign = 1;
    for (std::size_t i = from; i < to;) {
      if (t[i] == "+") {
        sign = 1;
        ++i;
      } else if (t[i] == "-") {
        sign = -1;
        ++i;
      }
      const double c = std::stod(t[i]);
      const std::string& name = t[i + 1];
      out[name] += sign * c;
      sign = 1;
      i += 2;
    }
  }
};

double eval_terms(const std::vector<std::pair<std::string, double>>& terms,
                  const std::map<std::string, double>& a) {
  double v = 0;
  for (const auto& [n, c] : terms) {
    auto it = a.find(n);
    if (it != a.end()) v += c * it->second;
  }
  return v;
}

Instance tiny_instance(int n, std::uint64_t seed, int chargers = 0, double einit = 1.0) {
  GenParams p;
  p.n_requests = n;
  p.seed = seed;
  ChargingConfig cfg;
  cfg.open = {static_cast<std::uint8_t>(chargers > 0 ? 1 : 0)};
  cfg.counts = {{chargers}};
  std::vector<VehicleType> types = {default_ev_type1(), default_gv()};
  types[0].e_init = types[0].e_max * einit;
  Instance inst = generate_instance(p, build_timetable(default_timetable_spec()), types,
                                    {{0, 0, 0, 1000.0, 4.11}}, {default_rapid_charger()}, cfg);
  inst.fleet_bounds = {2, 2};
  preprocess(inst);
  return inst;
}

}  // namespace

TEST_CASE("export is deterministic and named by equation family") {
  Instance inst = tiny_instance(2, 5, 1, 0.5);
  const std::string a = export_milp(inst, 0.0, std::nullopt, ModelFormat::Lp);
  const std::string b = export_milp(inst, 0.0, std::nullopt, ModelFormat::Lp);
  CHECK(a == b);
  for (const char* family : {"eq10a_0:", "eq10b_0:", "eq11_", "eq12_", "eq14_", "eq15_",
                             "eq16_", "eq17_", "eq19_", "eq20_", "eq22_", "eq25_", "eq27_",
                             "eq29_", "eq30_", "eq31_", "eq32_", "eq37_", "eq38_"})
    CHECK(a.find(family) != std::string::npos);
  // No emission row without a cap; present with one.
  CHECK(a.find("eq9:") == std::string::npos);
  const std::string c = export_milp(inst, 0.5, 100.0, ModelFormat::Lp);
  CHECK(c.find("eq9:") != std::string::npos);
  CHECK_THROWS_AS(export_milp(inst, 0.5, std::nullopt, ModelFormat::Lp), std::invalid_argument);

  const std::string mps = export_milp(inst, 0.0, std::nullopt, ModelFormat::Mps);
  for (const char* sec : {"NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"})
    CHECK(mps.find(sec) != std::string::npos);
}

TEST_CASE("oracle optimum satisfies the exported model text exactly") {
  for (std::uint64_t seed : {3ull, 4ull, 5ull}) {
    Instance inst = tiny_instance(2, seed);
    OracleResult exact = exact_solve(inst, 0.0, std::nullopt);
    REQUIRE(exact.solved);
    const LpText lp = LpText::parse(export_milp(inst, 0.0, std::nullopt, ModelFormat::Lp));
    const auto assignment = solution_assignment(exact.best, inst);

    double obj = 0;
    for (const auto& [name, c] : lp.obj) {
      auto it = assignment.find(name);
      if (it != assignment.end()) obj += c * it->second;
    }
    CHECK(obj == doctest::Approx(exact.cost).epsilon(1e-9));

    int violated = 0;
    for (const auto& row : lp.rows) {
      const double lhs = eval_terms(row.terms, assignment);
      const bool ok = row.sense == 'L'   ? lhs <= row.rhs + 1e-6
                      : row.sense == 'G' ? lhs >= row.rhs - 1e-6
                                         : std::abs(lhs - row.rhs) <= 1e-6;
      if (!ok) ++violated;
    }
    CHECK(violated == 0);

    for (const auto& [name, lohi] : lp.bounds) {
      auto it = assignment.find(name);
      const double v = it == assignment.end() ? 0.0 : it->second;
      CHECK(v >= lohi.first - 1e-6);
      CHECK(v <= lohi.second + 1e-6);
    }
    for (const std::string& name : lp.binaries) {
      auto it = assignment.find(name);
      const double v = it == assignment.end() ? 0.0 : it->second;
      CHECK((std::abs(v) < 1e-9 || std::abs(v - 1) < 1e-9));
    }
  }
}

TEST_CASE("electric oracle optimum with charging passes the exported model") {
  ManualSetup setup;
  ManualRequest r;
  r.x_km = 20.0;
  r.dir = Direction::Outbound;
  r.tw_open = 0;
  r.tw_close = 20 * kHour;
  setup.requests = {r};
  setup.fleet_ev = 1;
  setup.fleet_gv = 1;
  setup.sites = {{0, 10000, 0, 1000.0, 4.11}};
  setup.config.open = {1};
  setup.config.counts = {{1}};
  Instance inst = build_manual(setup);
  Vertex& d = inst.vertices[inst.dropoff_of(0)];
  d.x = 35000;
  d.transit_station = true;
  d.tw_open = 0;
  d.tw_close = 20 * kHour;
  inst.rebuild_matrices();
  inst.requests[0].max_ride = 10 * kHour;
  VehicleType& ev = inst.vehicle_types[inst.electric_type()];
  ev.e_init = 0.5 * ev.e_max;
  // Make gasoline unavailable so the optimum must charge.
  inst.fleet_bounds = {1, 0};
  preprocess(inst);

  OracleResult exact = exact_solve(inst, 0.0, std::nullopt);
  REQUIRE(exact.solved);
  const LpText lp = LpText::parse(export_milp(inst, 0.0, std::nullopt, ModelFormat::Lp));
  const auto assignment = solution_assignment(exact.best, inst);
  double obj = 0;
  for (const auto& [name, c] : lp.obj) {
    auto it = assignment.find(name);
    if (it != assignment.end()) obj += c * it->second;
  }
  CHECK(obj == doctest::Approx(exact.cost).epsilon(1e-9));
  for (const auto& row : lp.rows) {
    const double lhs = eval_terms(row.terms, assignment);
    const bool ok = row.sense == 'L'   ? lhs <= row.rhs + 1e-6
                    : row.sense == 'G' ? lhs >= row.rhs - 1e-6
                                       : std::abs(lhs - row.rhs) <= 1e-6;
    CHECK_MESSAGE(ok, row.name);
  }
}

TEST_CASE("valid inequalities never cut the optimum") {
  for (std::uint64_t seed : {6ull, 7ull}) {
    Instance inst = tiny_instance(3, seed);
    OracleResult exact = exact_solve(inst, 0.0, std::nullopt);
    REQUIRE(exact.solved);
    const std::string with = export_milp(inst, 0.0, std::nullopt, ModelFormat::Lp, true);
    const std::string without = export_milp(inst, 0.0, std::nullopt, ModelFormat::Lp, false);
    CHECK(without.find("eq37_") == std::string::npos);
    CHECK(without.find("eq38_") == std::string::npos);
    const LpText lp = LpText::parse(with);
    const auto assignment = solution_assignment(exact.best, inst);
    for (const auto& row : lp.rows) {
      if (row.name.rfind("eq37", 0) != 0 && row.name.rfind("eq38", 0) != 0 &&
          row.name.rfind("eq39", 0) != 0)
        continue;
      const double lhs = eval_terms(row.terms, assignment);
      const bool ok = row.sense == 'L' ? lhs <= row.rhs + 1e-6 : lhs >= row.rhs - 1e-6;
      CHECK_MESSAGE(ok, row.name);
    }
  }
}

TEST_CASE("solver output has zero residuals") {
  Instance inst = tiny_instance(3, 9);
  SearchParams params;
  params.init_samples = 60;
  params.iter_max = 1500;
  Instance gv_only = inst;
  gv_only.fleet_bounds = {0, 2};
  SolveResult res = solve_fs_mfrp(gv_only, std::numeric_limits<double>::infinity(), params, 3);
  REQUIRE(res.feasible);
  ResidualReport rep = validate_solution(res.best, gv_only, 0.0, std::nullopt);
  CHECK(rep.feasible(1e-6));
}

TEST_CASE("targeted corruption is flagged by the right family") {
  Instance inst = tiny_instance(3, 10);
  SearchParams params;
  params.init_samples = 60;
  params.iter_max = 800;
  SolveResult res = solve_fs_mfrp(inst, std::numeric_limits<double>::infinity(), params, 4);
  REQUIRE(res.feasible);
  REQUIRE(res.best.routes.size() >= 1);

  SUBCASE("duplicated pickup visit trips eq11") {
    Solution bad = res.best;
    Route extra = make_route(bad.routes[0].vtype, inst);
    extra.seq.insert(extra.seq.begin() + 1, inst.pickup_of(0));
    extra.seq.insert(extra.seq.begin() + 2, inst.dropoff_of(0));
    extra.charge_tau.assign(extra.seq.size(), 0);
    extra.charge_wait.assign(extra.seq.size(), 0);
    reschedule(extra, inst);
    bad.routes.push_back(extra);
    recompute_caches(bad, inst);
    ResidualReport rep = validate_solution(bad, inst, 0.0, std::nullopt);
    CHECK(rep.family("eq11") >= 1.0);
  }

  SUBCASE("dangling pickup trips eq14/eq15") {
    Solution bad = res.best;
    Route& r = bad.routes[0];
    for (int i = r.size() - 1; i >= 0; --i) {
      if (inst.vx(r.seq[i]).kind == VertexKind::Dropoff) {
        r.seq.erase(r.seq.begin() + i);
        r.charge_tau.erase(r.charge_tau.begin() + i);
        r.charge_wait.erase(r.charge_wait.begin() + i);
        break;
      }
    }
    ResidualReport rep = validate_solution(bad, inst, 0.0, std::nullopt);
    CHECK(rep.family("eq14") + rep.family("eq15") >= 1.0);
  }

  SUBCASE("overlapping charger intervals trip eq31") {
    Instance ci = tiny_instance(1, 4, 1, 1.0);
    const auto dummies = ci.dummies_of(0);
    REQUIRE(dummies.size() >= 2);
    Solution bad;
    for (int k = 0; k < 2; ++k) {
      Route r = make_route(ci.electric_type(), ci);
      r.seq.insert(r.seq.begin() + 1, dummies[k]);
      r.charge_tau.assign(r.seq.size(), 0);
      r.charge_wait.assign(r.seq.size(), 0);
      r.charge_tau[1] = 600;
      reschedule(r, ci);
      bad.routes.push_back(r);
    }
    recompute_caches(bad, ci);
    ResidualReport rep = validate_solution(bad, ci, 0.0, std::nullopt);
    CHECK(rep.family("eq31") > 0.0);
  }

  SUBCASE("emission above the cap trips eq9") {
    ResidualReport rep = validate_solution(res.best, inst, 0.9, res.best.co2_kg);
    if (res.best.co2_kg > 0) CHECK(rep.family("eq9") > 0.0);
  }
}

TEST_CASE("random corruptions agree with a direct recheck") {
  Rng rng(2712);
  Instance inst = tiny_instance(3, 11);
  SearchParams params;
  params.init_samples = 40;
  params.iter_max = 500;
  SolveResult res = solve_fs_mfrp(inst, std::numeric_limits<double>::infinity(), params, 5);
  REQUIRE(res.feasible);
  for (int it = 0; it < 60; ++it) {
    Solution bad = res.best;
    if (bad.routes.empty()) break;
    Route& r = bad.routes[rng.index(bad.routes.size())];
    if (r.size() <= 3) continue;
    // Swap two interior visits without rescheduling bookkeeping.
    const int i = 1 + static_cast<int>(rng.index(r.size() - 2));
    const int j = 1 + static_cast<int>(rng.index(r.size() - 2));
    std::swap(r.seq[i], r.seq[j]);
    reschedule(r, inst);
    recompute_caches(bad, inst);
    ResidualReport rep = validate_solution(bad, inst, 0.0, std::nullopt);

    // Direct recheck: schedule/load feasibility of every route and the
    // visit-once counts decide feasibility.
    bool ok = true;
    std::vector<int> seen(inst.n_vertices(), 0);
    for (const Route& rr : bad.routes) {
      if (!evaluate_route(rr, inst).feasible) ok = false;
      for (int v : rr.seq)
        if (inst.vx(v).kind == VertexKind::Pickup) ++seen[v];
    }
    for (const Request& rq : inst.requests)
      if (seen[rq.pickup] != 1) ok = false;
    if (static_cast<int>(bad.unserved.size()) > 0) ok = false;
    CHECK(rep.feasible(1e-6) == ok);
  }
}
