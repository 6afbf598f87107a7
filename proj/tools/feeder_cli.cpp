// Command-line front end: instance/scenario generation, the annealing
// solver, the bi-level configuration sweep, MILP export, solution
// validation and the sequential parameter-tuning harness.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "feeder/bilevel.hpp"
#include "feeder/charging.hpp"
#include "feeder/instancegen.hpp"
#include "feeder/milpexport.hpp"
#include "feeder/oracle.hpp"
#include "feeder/preprocess.hpp"
#include "feeder/search.hpp"

namespace fs = std::filesystem;
using namespace feeder;

namespace {

constexpr const char* kVersion = "feederplan 0.1.0";
constexpr double kInf = std::numeric_limits<double>::infinity();

struct CommonGen {
  std::string mode = "grid";
  int requests = 100;
  int scenarios = 1;
  std::uint64_t seed = 1;
  double side_km = 4.0;
  double diameter_km = 17.8;
  double spacing_km = 1.0;
  int chargers = 2;
  std::string charger_type = "rapid";
  std::string vehicle = "type1";
  double pi = 0.0;
  double soc = 1.0;
  int dummies = 4;
  std::string out = "instance.json";
};

ChargerType charger_by_name(const std::string& name) {
  if (name == "rapid") return default_rapid_charger();
  if (name == "superfast") return default_superfast_charger();
  throw CLI::ValidationError("--charger-type", "must be rapid or superfast");
}

VehicleType ev_by_name(const std::string& name) {
  if (name == "type1") return default_ev_type1();
  if (name == "type2") return default_ev_type2();
  throw CLI::ValidationError("--vehicle", "must be type1 or type2");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
}

void write_manifest(const fs::path& dir, const std::string& command, int argc, char** argv,
                    std::uint64_t seed) {
  nlohmann::json j;
  j["tool"] = kVersion;
  j["command"] = command;
  j["seed"] = seed;
  std::vector<std::string> args;
  for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
  j["argv"] = args;
  std::ofstream f(dir / ("manifest_" + command + ".json"));
  f << j.dump(2) << "\n";
}

Instance make_instance(const CommonGen& g, std::uint64_t seed) {
  GenParams p;
  p.geometry = g.mode == "case-study" ? Geometry::Disc : Geometry::Square;
  p.side_km = g.side_km;
  p.diameter_km = g.diameter_km;
  p.stop_spacing_km = g.spacing_km;
  p.station_exclusion_km = g.mode == "case-study" ? 1.0 : 0.0;
  p.n_requests = g.requests;
  p.dummies_per_charger = g.dummies;
  p.seed = seed;
  ChargerType ct = charger_by_name(g.charger_type);
  ct.id = 0;
  VehicleType ev = ev_by_name(g.vehicle);
  ev.e_init = ev.e_max * g.soc;
  std::vector<SiteCandidate> sites = {{0, 0, 0, 10000.0, default_opening_cost(ct)}};
  ChargingConfig cfg;
  cfg.open = {static_cast<std::uint8_t>(g.chargers > 0 ? 1 : 0)};
  cfg.counts = {{g.chargers}};
  Instance inst = generate_instance(p, build_timetable(default_timetable_spec()),
                                    {ev, default_gv()}, sites, {ct}, cfg);
  inst.pi = g.pi;
  return inst;
}

int cmd_gen(const CommonGen& g, int argc, char** argv) {
  if (g.scenarios <= 1 && g.mode != "case-study") {
    Instance inst = make_instance(g, g.seed);
    auto findings = validate_instance(inst);
    if (!findings.empty()) {
      for (const auto& f : findings) std::cerr << "invalid instance: " << f << "\n";
      return 2;
    }
    write_instance(inst, g.out);
    std::cout << "wrote " << g.out << " (" << inst.n_requests() << " requests)\n";
    return 0;
  }
  fs::path dir(g.out);
  fs::create_directories(dir);
  const int n = std::max(1, g.scenarios);
  for (int k = 0; k < n; ++k) {
    CommonGen gk = g;
    Instance inst = make_instance(gk, Rng::substream(g.seed, static_cast<std::uint64_t>(k)).next());
    auto findings = validate_instance(inst);
    if (!findings.empty()) {
      for (const auto& f : findings) std::cerr << "invalid instance: " << f << "\n";
      return 2;
    }
    std::ostringstream name;
    name << "scenario_" << (k < 10 ? "0" : "") << k << ".json";
    write_instance(inst, (dir / name.str()).string());
  }
  write_manifest(dir, "gen", argc, argv, g.seed);
  std::cout << "wrote " << n << " scenario files to " << dir.string() << "\n";
  return 0;
}

std::vector<Scenario> load_scenarios(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json" &&
        e.path().filename().string().rfind("scenario_", 0) == 0)
      files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no scenario_*.json files in " + dir);
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < files.size(); ++i) {
    Scenario sc;
    sc.id = static_cast<int>(i);
    sc.probability = 1.0 / static_cast<double>(files.size());
    sc.instance = read_instance(files[i]);
    out.push_back(std::move(sc));
  }
  return out;
}

int cmd_solve(const std::string& instance_path, double pi, double gamma_flag, int runs,
              std::uint64_t seed, const std::string& params_path, const std::string& out_dir,
              int argc, char** argv) {
  Instance inst = read_instance(instance_path);
  auto findings = validate_instance(inst);
  if (!findings.empty()) {
    for (const auto& f : findings) std::cerr << "invalid instance: " << f << "\n";
    return 2;
  }
  SearchParams params;
  if (!params_path.empty()) params = load_params(params_path);
  preprocess(inst);
  inst.pi = pi;

  fs::path dir(out_dir);
  fs::create_directories(dir);

  double gamma = gamma_flag;
  if (pi > 0 && gamma <= 0) {
    if (inst.gamma_ref) {
      gamma = *inst.gamma_ref;
    } else {
      gamma = reference_emission(inst, params, Rng::substream(seed, 0xFEED).next());
      std::cout << "reference emission = " << gamma << " kg\n";
    }
  }
  if (pi > 0) inst.gamma_ref = gamma;
  const double cap = pi > 0 ? (1.0 - pi) * gamma : kInf;

  std::ostringstream csv;
  csv << "run,seed,cost,co2_kg,vehicles,ev,gv,unserved,charging_min,cpu_s,feasible\n";
  SolveResult best;
  bool have = false;
  for (int r = 0; r < std::max(1, runs); ++r) {
    const std::uint64_t s = Rng::substream(seed, static_cast<std::uint64_t>(r)).next();
    SolveResult res = solve_fs_mfrp(inst, cap, params, s);
    int ev = 0, gv = 0;
    double charging_min = 0;
    for (const Route& rt : res.best.routes) {
      if (rt.served == 0) continue;
      if (inst.vehicle_types[rt.vtype].kind == PowerKind::Electric)
        ++ev;
      else
        ++gv;
      for (const ChargingOp& op : charging_ops(rt, inst))
        charging_min += static_cast<double>(op.tau) / 60.0;
    }
    csv << r << "," << s << "," << res.best.cost() << "," << res.best.co2_kg << ","
        << res.best.n_vehicles << "," << ev << "," << gv << "," << res.best.n_unserved() << ","
        << charging_min << "," << res.trace.wall_s << "," << (res.feasible ? 1 : 0) << "\n";
    if (!have || (res.feasible && !best.feasible) ||
        (res.feasible == best.feasible && res.best.cost() < best.best.cost())) {
      best = std::move(res);
      have = true;
    }
  }
  write_text((dir / "runs.csv").string(), csv.str());
  write_text((dir / "best_solution.json").string(), solution_to_json(best.best, inst));
  if (pi == 0) std::cout << "gamma (gasoline-only emission) = " << best.best.co2_kg << " kg\n";
  write_manifest(dir, "solve", argc, argv, seed);
  std::cout << "best cost " << best.best.cost() << " EUR, co2 " << best.best.co2_kg
            << " kg, feasible " << (best.feasible ? "yes" : "no") << "\n";
  return best.feasible ? 0 : 3;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const int v = std::stoi(text);
    return {v, v};
  }
  return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

int cmd_plan(const std::string& scenarios_dir, double pi, const std::string& chargers,
             const std::string& charger_type, double coverage, int runs, std::uint64_t seed,
             int workers, bool no_early_stop, const std::string& out_dir, int argc,
             char** argv) {
  auto scenarios = load_scenarios(scenarios_dir);
  auto [lo, hi] = parse_range(chargers);
  (void)lo;
  ChargerType ct = charger_by_name(charger_type);
  ct.id = 0;
  std::vector<SiteCandidate> sites = scenarios.front().instance.sites;
  for (SiteCandidate& s : sites) s.opening_cost = default_opening_cost(ct);
  // Scenario instances are re-materialized per configuration with this
  // charger type only.
  for (Scenario& sc : scenarios) {
    sc.instance.charger_types = {ct};
    sc.instance.config.open.assign(sites.size(), 0);
    sc.instance.config.counts.assign(sites.size(), {0});
    sc.instance.sites = sites;
    sc.instance = with_config(sc.instance, sc.instance.config);
    sc.instance.pi = pi;
  }
  SearchParams params;
  PlanOptions opt;
  opt.pi = pi;
  opt.coverage = coverage;
  opt.repetitions = runs;
  opt.early_stop = !no_early_stop;
  opt.workers = workers;
  opt.seed = seed;
  PlanResult res = plan(sites, {ct}, hi, scenarios, params, opt);
  fs::path dir(out_dir);
  fs::create_directories(dir);
  write_text((dir / "plan.csv").string(), plan_report_csv(res, sites, {ct}));
  write_manifest(dir, "plan", argc, argv, seed);
  if (res.best_index < 0) {
    std::cerr << "no configuration evaluated\n";
    return 3;
  }
  const ConfigEvaluation& best = res.evaluated[res.best_index];
  std::cout << "best configuration: " << best.n_chargers << " " << ct.name
            << " charger(s), Z_U " << best.z_u << " EUR, fleet " << best.fleet_ev << " EV + "
            << best.fleet_gv << " GV\n";
  return 0;
}

int cmd_export(const std::string& instance_path, double pi, double gamma_flag, bool auto_gamma,
               const std::string& format, const std::string& out, bool no_cuts) {
  Instance inst = read_instance(instance_path);
  auto findings = validate_instance(inst);
  if (!findings.empty()) {
    for (const auto& f : findings) std::cerr << "invalid instance: " << f << "\n";
    return 2;
  }
  preprocess(inst);
  std::optional<double> gamma;
  if (gamma_flag > 0) gamma = gamma_flag;
  if (!gamma && inst.gamma_ref) gamma = inst.gamma_ref;
  if (pi > 0 && !gamma && auto_gamma) {
    SearchParams params;
    gamma = reference_emission(inst, params, 0xFEED);
    std::cout << "reference emission = " << *gamma << " kg\n";
  }
  if (pi > 0 && !gamma) {
    std::cerr << "pi > 0 requires --gamma or --auto-gamma\n";
    return 2;
  }
  const ModelFormat fmt = format == "mps" ? ModelFormat::Mps : ModelFormat::Lp;
  write_text(out, export_milp(inst, pi, gamma, fmt, !no_cuts));
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_validate(const std::string& instance_path, const std::string& solution_path, double pi,
                 double gamma_flag) {
  Instance inst = read_instance(instance_path);
  preprocess(inst);
  std::ifstream f(solution_path);
  if (!f) {
    std::cerr << "cannot open " << solution_path << "\n";
    return 2;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  Solution sol = solution_from_json(ss.str(), inst);
  std::optional<double> gamma;
  if (gamma_flag > 0) gamma = gamma_flag;
  if (!gamma && inst.gamma_ref) gamma = inst.gamma_ref;
  ResidualReport rep = validate_solution(sol, inst, pi, gamma);
  for (const auto& [family, viol] : rep.families)
    std::cout << family << " " << viol << "\n";
  std::cout << "max residual " << rep.max_residual() << "\n";
  return rep.feasible(1e-6) ? 0 : 3;
}

int cmd_tune(const std::string& instances_dir, const std::string& param,
             const std::string& values_csv, int runs, std::uint64_t seed,
             const std::string& out, int argc, char** argv) {
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(instances_dir))
    if (e.path().extension() == ".json" && e.path().filename().string().rfind("manifest", 0) != 0)
      files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no instance files in " << instances_dir << "\n";
    return 2;
  }
  std::vector<double> values;
  std::istringstream vs(values_csv);
  std::string tok;
  while (std::getline(vs, tok, ',')) values.push_back(std::stod(tok));
  if (values.empty()) {
    std::cerr << "--values is empty\n";
    return 2;
  }

  auto apply = [&](SearchParams& p, double v) {
    if (param == "rho1") p.rho1 = v;
    else if (param == "rho2") p.rho2 = v;
    else if (param == "rho3") p.rho3 = v;
    else if (param == "rho4") p.rho4 = v;
    else if (param == "n_remove") p.n_remove = static_cast<int>(v);
    else if (param == "n_stagnant") p.n_stagnant = static_cast<int>(v);
    else if (param == "iter_max") p.iter_max = static_cast<long>(v);
    else if (param == "n_imp") p.n_imp = static_cast<int>(v);
    else if (param == "T_red") p.T_red = v;
    else if (param == "t_max") p.t_max = v;
    else throw std::runtime_error("unknown tuning parameter " + param);
  };

  std::ostringstream csv;
  csv << "param,value,avg_obj\n";
  for (double v : values) {
    double total = 0;
    long count = 0;
    for (std::size_t fi = 0; fi < files.size(); ++fi) {
      Instance inst = read_instance(files[fi]);
      preprocess(inst);
      SearchParams params;
      apply(params, v);
      double gamma = 0;
      double cap = kInf;
      if (inst.pi > 0) {
        gamma = inst.gamma_ref ? *inst.gamma_ref
                               : reference_emission(inst, params,
                                                    Rng::substream(seed, 0xFEED + fi).next());
        cap = (1.0 - inst.pi) * gamma;
        Instance capped = inst;
        capped.gamma_ref = gamma;
        inst = capped;
      }
      for (int r = 0; r < std::max(1, runs); ++r) {
        const std::uint64_t s =
            Rng::substream(seed, (fi << 8) ^ static_cast<std::uint64_t>(r)).next();
        SolveResult res = solve_fs_mfrp(inst, cap, params, s);
        total += res.best.cost();
        ++count;
      }
    }
    csv << param << "," << v << "," << total / static_cast<double>(count) << "\n";
    std::cout << param << " = " << v << ": avg " << total / static_cast<double>(count) << "\n";
  }
  write_text(out, csv.str());
  fs::path dir = fs::path(out).parent_path();
  if (dir.empty()) dir = ".";
  write_manifest(dir, "tune", argc, argv, seed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) +
               " - fleet and charging infrastructure planning for feeder services"};
  app.require_subcommand(1);

  // gen
  CommonGen g;
  auto* gen = app.add_subcommand("gen", "generate instances or demand scenarios");
  gen->add_option("--mode", g.mode, "grid or case-study")->check(CLI::IsMember({"grid", "case-study"}));
  gen->add_option("--requests", g.requests);
  gen->add_option("--scenarios", g.scenarios, "number of scenario files");
  gen->add_option("--seed", g.seed);
  gen->add_option("--side-km", g.side_km);
  gen->add_option("--diameter-km", g.diameter_km);
  gen->add_option("--spacing-km", g.spacing_km);
  gen->add_option("--chargers", g.chargers, "chargers at the station site");
  gen->add_option("--charger-type", g.charger_type)->check(CLI::IsMember({"rapid", "superfast"}));
  gen->add_option("--vehicle", g.vehicle)->check(CLI::IsMember({"type1", "type2"}));
  gen->add_option("--pi", g.pi, "CO2 reduction target");
  gen->add_option("--soc", g.soc, "initial battery fraction");
  gen->add_option("--dummies", g.dummies, "dummy vertices per charger");
  gen->add_option("--out", g.out, "output file (grid) or directory (scenarios)");

  // solve
  std::string instance_path, params_path, out_dir = "solve_out";
  double pi = 0.0, gamma_flag = 0.0;
  int runs = 5;
  std::uint64_t seed = 1;
  auto* solve = app.add_subcommand("solve", "run the annealing solver on one instance");
  solve->add_option("--instance", instance_path)->required();
  solve->add_option("--pi", pi);
  solve->add_option("--gamma", gamma_flag, "reference emission (computed if absent)");
  solve->add_option("--runs", runs);
  solve->add_option("--seed", seed);
  solve->add_option("--params", params_path, "parameter file");
  solve->add_option("--out", out_dir);

  // plan
  std::string scenarios_dir, chargers_range = "0..6", charger_type = "rapid",
              plan_out = "plan_out";
  double coverage = 0.9;
  int workers = 1;
  bool no_early_stop = false;
  auto* planc = app.add_subcommand("plan", "sweep charger configurations over scenarios");
  planc->add_option("--scenarios", scenarios_dir)->required();
  planc->add_option("--pi", pi);
  planc->add_option("--chargers", chargers_range, "count range, e.g. 0..6");
  planc->add_option("--charger-type", charger_type)->check(CLI::IsMember({"rapid", "superfast"}));
  planc->add_option("--coverage", coverage);
  planc->add_option("--runs", runs, "solver repetitions per (config, scenario)");
  planc->add_option("--seed", seed);
  planc->add_option("--workers", workers);
  planc->add_flag("--no-early-stop", no_early_stop, "evaluate every configuration");
  planc->add_option("--out", plan_out);

  // export
  std::string format = "lp", export_out = "model.lp";
  bool auto_gamma = false, no_cuts = false;
  auto* exp = app.add_subcommand("export", "write the exact MILP in LP or MPS form");
  exp->add_option("--instance", instance_path)->required();
  exp->add_option("--pi", pi);
  exp->add_option("--gamma", gamma_flag);
  exp->add_flag("--auto-gamma", auto_gamma, "solve the gasoline-only reference for gamma");
  exp->add_option("--format", format)->check(CLI::IsMember({"lp", "mps"}));
  exp->add_flag("--no-cuts", no_cuts, "omit the valid inequalities");
  exp->add_option("--out", export_out);

  // validate
  std::string solution_path;
  auto* val = app.add_subcommand("validate", "check a solution against every constraint family");
  val->add_option("--instance", instance_path)->required();
  val->add_option("--solution", solution_path)->required();
  val->add_option("--pi", pi);
  val->add_option("--gamma", gamma_flag);

  // tune
  std::string tune_dir, tune_param = "rho1", tune_values = "20,40,60,80,100",
              tune_out = "tuning.csv";
  auto* tune = app.add_subcommand("tune", "sequential one-parameter sweep");
  tune->add_option("--instances", tune_dir, "directory of instance files")->required();
  tune->add_option("--param", tune_param);
  tune->add_option("--values", tune_values);
  tune->add_option("--runs", runs);
  tune->add_option("--seed", seed);
  tune->add_option("--out", tune_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(g, argc, argv);
    if (solve->parsed())
      return cmd_solve(instance_path, pi, gamma_flag, runs, seed, params_path, out_dir, argc,
                       argv);
    if (planc->parsed())
      return cmd_plan(scenarios_dir, pi, chargers_range, charger_type, coverage, runs, seed,
                      workers, no_early_stop, plan_out, argc, argv);
    if (exp->parsed())
      return cmd_export(instance_path, pi, gamma_flag, auto_gamma, format, export_out, no_cuts);
    if (val->parsed()) return cmd_validate(instance_path, solution_path, pi, gamma_flag);
    if (tune->parsed())
      return cmd_tune(tune_dir, tune_param, tune_values, runs, seed, tune_out, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
