// siftshadow: command line front end for the sifting / shadowing library.
//
// Exit status: 0 success, 1 compare found differences, 2 invalid input or
// configuration, 3 solver failure.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "siftshadow/siftshadow.hpp"

namespace ss = siftshadow;
using ss::json;

namespace {

struct Params {
  std::string map = "doubling";
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "json";
  int power = 1;

  // strings
  std::vector<double> values;
  double H = 0.0;
  double gamma = 0.5;
  double gamma_prime = 0.25;
  std::size_t horizon = 10000;

  // shadowing
  double lambda = 0.5;
  double epsilon = 0.01;
  std::vector<double> points;
  std::vector<std::size_t> lengths;
  int restarts = 0;
  double noise = 0.25;  // perturbation, in units of delta / (K + 1)

  // repellers
  std::vector<double> gammas{0.6, 0.5, 0.4};
  std::size_t max_repellers = 20;
  std::size_t tau_min = 3;
  std::size_t tau_max = 0;
  double max_offset_ratio = 0.5;
  double period_growth = 2.0;

  // verify-abnormal
  double point = 0.0;
  int period = 1;
  std::vector<int> itinerary;
  double gamma_double_prime = 0.8;

  // expansion-fit
  std::size_t k_max = 20;
  std::string sample = "grid";
  std::size_t sample_size = 64;

  // kingman
  std::size_t t1 = 1;
  std::size_t levels = 6;
  std::size_t blocks = 512;

  // compare
  std::string report_a, report_b;
  double tol = 1e-9;
  std::vector<std::string> field_tol;
};

[[noreturn]] void fail_validation(const std::string& msg) { throw ss::BadParameters(msg); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_validation("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const Params& p, const std::string& text) {
  if (p.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(p.output, std::ios::binary);
  if (!out) fail_validation("cannot write '" + p.output + "'");
  out << text;
}

ss::CircleMap circle_map(const Params& p) {
  auto f = ss::make_circle_map(p.map);
  return ss::power_map(f, p.power);
}

// shared by every report: the map and seed plus the command's own fields
json echo(const Params& p, json extra) {
  extra["map"] = p.map;
  extra["seed"] = p.seed;
  extra["power"] = p.power;
  return extra;
}

void emit(const Params& p, const std::string& command, const json& config, const json& result) {
  if (p.format != "json") fail_validation("format '" + p.format + "' is not available for " + command);
  write_output(p, ss::canonical_dump(ss::make_report(command, echo(p, config), result)));
}

// ---------------------------------------------------------------------------
// commands

int run_sift(const Params& p) {
  std::vector<double> values = p.values;
  double H = p.H;
  json cfg = {{"gamma", p.gamma}, {"gamma_prime", p.gamma_prime}};
  if (values.empty()) {
    auto f = circle_map(p);
    ss::Rng rng(p.seed);
    const auto orbit = ss::generic_orbit(f, p.horizon, rng);
    values = ss::orbit_string_from_points(f, std::span<const double>(orbit)).increments;
    if (H <= 0.0) H = std::log(f.lipschitz_bound());
    cfg["horizon"] = p.horizon;
  } else {
    cfg["values"] = values;
    if (H <= 0.0) fail_validation("--H is required with --values");
  }
  cfg["H"] = H;
  const ss::RealString s(values, H);
  emit(p, "sift", cfg, ss::to_json(ss::pliss_sift(s, p.gamma, p.gamma_prime)));
  return 0;
}

json plan_echo(const Params& p) { return {{"lambda", p.lambda}, {"epsilon", p.epsilon}}; }

int run_shadow(const Params& p) {
  auto f = circle_map(p);
  const auto cfg = ss::plan_shadowing(f, p.lambda, p.epsilon);
  std::vector<double> pts = p.points;
  json c = plan_echo(p);
  if (pts.empty()) {
    ss::Rng rng(p.seed);
    const auto orbit = ss::generic_orbit(f, p.horizon, rng);
    const double amp = p.noise * cfg.delta / (f.lipschitz_bound() + 1.0);
    pts.assign(orbit.begin(), orbit.end() - 1);
    for (auto& x : pts) x = ss::frac(x + ss::uniform(rng, -amp, amp));
    c["horizon"] = p.horizon;
    c["noise"] = p.noise;
  } else {
    c["points"] = pts;
  }
  const auto chain = ss::chain_from_points(f, pts, false);
  const auto res = ss::shadow_finite(f, chain, cfg);
  emit(p, "shadow", c, ss::to_json(res, cfg));
  return 0;
}

int run_close(const Params& p) {
  auto f = circle_map(p);
  if (p.points.empty()) fail_validation("--points is required");
  const auto cfg = ss::plan_shadowing(f, p.lambda, p.epsilon);
  json c = plan_echo(p);
  c["points"] = p.points;
  ss::PseudoOrbitChain chain;
  if (p.lengths.empty()) {
    chain = ss::chain_from_points(f, p.points, true);
  } else {
    chain = ss::chain_from_segments(f, p.points, p.lengths, true);
    c["lengths"] = p.lengths;
  }
  const auto res = ss::close_periodic(f, chain, cfg);
  json out = ss::to_json(res, cfg);
  if (p.restarts > 0) {
    c["restarts"] = p.restarts;
    out["uniqueness_spread"] = ss::uniqueness_spread(f, chain, cfg, p.restarts);
  }
  emit(p, "close", c, out);
  return 0;
}

ss::RepellerSearchReport repeller_search(const Params& p, const ss::CircleMap& f, json& c) {
  if (p.gammas.size() != 3) fail_validation("--gammas takes three values");
  const ss::SiftGammas g{p.gammas[0], p.gammas[1], p.gammas[2]};
  g.validate();
  ss::RepellerOptions opt;
  opt.power = p.power;
  opt.tau_min = p.tau_min;
  opt.tau_max = p.tau_max;
  opt.max_offset_ratio = p.max_offset_ratio;
  opt.period_growth = p.period_growth;
  ss::Rng rng(p.seed);
  const auto orbit = ss::generic_orbit(f, p.horizon, rng);
  // with power 0 the power is chosen inside, so plan for the chosen one
  int kappa = p.power;
  if (kappa == 0) {
    const auto s = ss::orbit_string_from_points(f, std::span<const double>(orbit));
    kappa = ss::detail::auto_power(s.increments, g.gamma);
    opt.power = kappa;
  }
  const auto g_k = ss::power_map(f, kappa);
  const auto cfg = ss::plan_shadowing(g_k, g.gamma_prime * kappa, p.epsilon);
  c["gammas"] = p.gammas;
  c["horizon"] = p.horizon;
  c["epsilon"] = p.epsilon;
  c["max_repellers"] = p.max_repellers;
  c["tau_min"] = p.tau_min;
  c["tau_max"] = p.tau_max;
  c["max_offset_ratio"] = p.max_offset_ratio;
  c["period_growth"] = p.period_growth;
  return ss::find_repellers(f, orbit, g, cfg, p.max_repellers, opt);
}

int run_repellers(const Params& p) {
  const auto f = ss::make_circle_map(p.map);
  json c;
  const auto rep = repeller_search(p, f, c);
  if (p.format == "csv") {
    write_output(p, ss::repellers_csv(rep));
    return 0;
  }
  emit(p, "repellers", c, ss::to_json(rep));
  return 0;
}

int run_verify_abnormal(const Params& p) {
  auto f = circle_map(p);
  json c = {{"gamma_prime", p.gamma_prime}, {"gamma_double_prime", p.gamma_double_prime}};
  ss::AbnormalVerdict v;
  if (!p.itinerary.empty()) {
    for (int s : p.itinerary)
      if (s < 0 || s >= f.degree()) fail_validation("itinerary symbol out of range");
    const auto orbit = ss::periodic_orbit_from_itinerary(f, p.itinerary);
    v = ss::verify_abnormal_orbit(f, orbit, p.gamma_prime, p.gamma_double_prime);
    c["itinerary"] = p.itinerary;
  } else {
    v = ss::verify_abnormal(f, p.point, p.period, p.gamma_prime, p.gamma_double_prime);
    c["point"] = p.point;
    c["period"] = p.period;
  }
  emit(p, "verify-abnormal", c, ss::to_json(v));
  return 0;
}

int run_expansion_fit(const Params& p) {
  json c = {{"k_max", p.k_max}};
  auto sys = ss::make_system(p.map);
  if (auto* cocycle = std::get_if<ss::MatrixCocycle>(&sys)) {
    if (p.power != 1) fail_validation("--power is only available for circle maps");
    ss::Rng rng(p.seed);
    std::vector<ss::ShiftPoint> pts;
    for (std::size_t i = 0; i < p.sample_size; ++i) pts.push_back(ss::random_shift_point(p.k_max, rng));
    c["sample"] = "random_words";
    c["sample_size"] = p.sample_size;
    emit(p, "expansion-fit", c,
         ss::to_json(ss::estimate_expansion_constants(*cocycle, std::span<const ss::ShiftPoint>(pts), p.k_max)));
    return 0;
  }
  auto f = circle_map(p);
  std::vector<double> pts = p.points;
  if (!pts.empty()) {
    c["points"] = pts;
  } else if (p.sample == "grid") {
    for (std::size_t i = 0; i < p.sample_size; ++i) pts.push_back(static_cast<double>(i) / p.sample_size);
    c["sample"] = "grid";
    c["sample_size"] = p.sample_size;
  } else if (p.sample == "repellers") {
    Params q = p;
    q.power = 1;
    json rc;
    const auto rep = repeller_search(q, f, rc);
    for (const auto& r : rep.repellers) pts.insert(pts.end(), r.result.orbit.begin(), r.result.orbit.end());
    if (pts.empty()) throw ss::NoRecurrence("the repeller search found no repellers");
    c["sample"] = "repellers";
    c["repeller_search"] = rc;
  } else {
    fail_validation("--sample must be grid or repellers");
  }
  emit(p, "expansion-fit", c,
       ss::to_json(ss::estimate_expansion_constants(f, std::span<const double>(pts), p.k_max)));
  return 0;
}

int run_kingman(const Params& p) {
  json c = {{"t1", p.t1}, {"levels", p.levels}, {"blocks", p.blocks}};
  auto sys = ss::make_system(p.map);
  std::vector<ss::ExponentEstimate> est;
  ss::Rng rng(p.seed);
  const std::size_t span = p.blocks * p.t1 * (std::size_t{1} << (p.levels > 0 ? p.levels - 1 : 0));
  if (auto* cocycle = std::get_if<ss::MatrixCocycle>(&sys)) {
    if (p.power != 1) fail_validation("--power is only available for circle maps");
    est = ss::kingman_doubling_average(*cocycle, ss::random_shift_point(span, rng), p.t1, p.levels, p.blocks);
  } else {
    auto f = circle_map(p);
    const auto orbit = ss::generic_orbit(f, span, rng);
    est = ss::kingman_doubling_average_along(f, std::span<const double>(orbit), p.t1, p.levels, p.blocks);
  }
  json arr = json::array();
  for (const auto& e : est) arr.push_back(ss::to_json(e));
  emit(p, "kingman", c, {{"levels", arr}});
  return 0;
}

int run_compare(const Params& p) {
  ss::CompareTolerances tol;
  tol.default_tol = p.tol;
  for (const auto& ft : p.field_tol) {
    const auto eq = ft.find('=');
    if (eq == std::string::npos) fail_validation("--field-tol takes key=value");
    try {
      tol.per_field[ft.substr(0, eq)] = std::stod(ft.substr(eq + 1));
    } catch (const std::exception&) {
      fail_validation("bad tolerance in '" + ft + "'");
    }
  }
  auto load = [](const std::string& path) {
    try {
      return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw ss::BadParameters("'" + path + "' is not valid JSON: " + e.what());
    }
  };
  const auto diffs = ss::compare_reports(load(p.report_a), load(p.report_b), tol);
  for (const auto& d : diffs) std::cout << d.path << ": " << d.a << " != " << d.b << "\n";
  return diffs.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// config files: one "key = value" per line, keys named like the long
// flags; '#' starts a comment. Flags on the command line win.

struct ConfigFile {
  std::string command;
  std::vector<std::string> tokens;
};

ConfigFile read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_validation("cannot read config file '" + path + "'");
  ConfigFile cf;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail_validation(path + ":" + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail_validation(path + ":" + std::to_string(lineno) + ": empty key");
    if (key == "command")
      cf.command = value;
    else
      cf.tokens.push_back("--" + key + "=" + value);
  }
  return cf;
}

// keys are checked against the command the config (or argv) selects
void check_config_keys(const std::string& path, const CLI::App& sub,
                       const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) {
    const std::string key = t.substr(2, t.find('=') - 2);
    if (sub.get_option_no_throw("--" + key) == nullptr &&
        (sub.get_parent() == nullptr || sub.get_parent()->get_option_no_throw("--" + key) == nullptr))
      fail_validation(path + ": unknown key '" + key + "' for command '" + sub.get_name() + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  Params p;
  CLI::App app{"Pliss sifting, pseudo-orbit shadowing and periodic repellers for circle maps"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ss::kVersion));
  std::string config_path;
  app.add_option("--config", config_path, "key = value file; command line flags override it");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--map", p.map, "map system, e.g. doubling, pl_tent(3,1.5)");
    sub->add_option("--seed", p.seed, "random seed");
    sub->add_option("-o,--output", p.output, "output file (stdout if omitted)");
    sub->add_option("--format", p.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--power", p.power, "run on f^power");
  };

  auto* sift = app.add_subcommand("sift", "Pliss sift of a string or of an orbit string");
  add_common(sift);
  sift->add_option("--values", p.values, "string values")->delimiter(',');
  sift->add_option("--H", p.H, "bound on |a_i|");
  sift->add_option("--gamma", p.gamma);
  sift->add_option("--gamma-prime", p.gamma_prime);
  sift->add_option("--horizon", p.horizon, "orbit length when --values is absent");

  auto* shadow = app.add_subcommand("shadow", "shadow a finite noisy pseudo-orbit");
  add_common(shadow);
  shadow->add_option("--lambda", p.lambda);
  shadow->add_option("--epsilon", p.epsilon);
  shadow->add_option("--points", p.points, "pseudo-orbit points")->delimiter(',');
  shadow->add_option("--horizon", p.horizon, "length of the generated pseudo-orbit");
  shadow->add_option("--noise", p.noise, "noise amplitude in units of delta / (K + 1)");

  auto* close = app.add_subcommand("close", "close a cyclic pseudo-orbit to a periodic orbit");
  add_common(close);
  close->add_option("--lambda", p.lambda);
  close->add_option("--epsilon", p.epsilon);
  close->add_option("--points", p.points, "cyclic pseudo-orbit points")->delimiter(',');
  close->add_option("--lengths", p.lengths, "orbit string lengths (default all 1)")->delimiter(',');
  close->add_option("--restarts", p.restarts, "extra initial guesses for the uniqueness check");

  auto* reps = app.add_subcommand("repellers", "periodic repellers along a generic orbit");
  add_common(reps);
  reps->add_option("--horizon", p.horizon);
  reps->add_option("--gammas", p.gammas, "gamma,gamma',gamma''")->delimiter(',');
  reps->add_option("--epsilon", p.epsilon);
  reps->add_option("--max-repellers", p.max_repellers);
  reps->add_option("--tau-min", p.tau_min);
  reps->add_option("--tau-max", p.tau_max, "longest return time; 0 for no limit");
  reps->add_option("--max-offset-ratio", p.max_offset_ratio, "bound on n'/(n''-n'); <= 0 disables");
  reps->add_option("--period-growth", p.period_growth);

  auto* abn = app.add_subcommand("verify-abnormal", "check the abnormal inequalities on a periodic orbit");
  add_common(abn);
  abn->add_option("--point", p.point);
  abn->add_option("--period", p.period);
  abn->add_option("--itinerary", p.itinerary, "branch symbols of the periodic orbit")->delimiter(',');
  abn->add_option("--gamma-prime", p.gamma_prime);
  abn->add_option("--gamma-double-prime", p.gamma_double_prime);

  auto* fit = app.add_subcommand("expansion-fit", "fit uniform expansion constants (C, lambda)");
  add_common(fit);
  fit->add_option("--k-max", p.k_max);
  fit->add_option("--points", p.points)->delimiter(',');
  fit->add_option("--sample", p.sample, "grid or repellers")->check(CLI::IsMember({"grid", "repellers"}));
  fit->add_option("--sample-size", p.sample_size);
  fit->add_option("--horizon", p.horizon, "orbit length for --sample repellers");
  fit->add_option("--gammas", p.gammas, "sift gammas for --sample repellers")->delimiter(',');
  fit->add_option("--epsilon", p.epsilon);
  fit->add_option("--max-repellers", p.max_repellers);
  fit->add_option("--tau-min", p.tau_min);
  fit->add_option("--tau-max", p.tau_max);
  fit->add_option("--max-offset-ratio", p.max_offset_ratio);
  fit->add_option("--period-growth", p.period_growth);

  auto* king = app.add_subcommand("kingman", "doubling time scale averages of log co-norm");
  add_common(king);
  king->add_option("--t1", p.t1);
  king->add_option("--levels", p.levels);
  king->add_option("--blocks", p.blocks);

  auto* cmp = app.add_subcommand("compare", "field by field comparison of two reports");
  cmp->add_option("report_a", p.report_a)->required();
  cmp->add_option("report_b", p.report_b)->required();
  cmp->add_option("--tol", p.tol, "default absolute tolerance");
  cmp->add_option("--field-tol", p.field_tol, "per field tolerance key=value")->delimiter(',');

  const std::map<std::string, int (*)(const Params&)> runners = {
      {"sift", run_sift},           {"shadow", run_shadow},
      {"close", run_close},         {"repellers", run_repellers},
      {"verify-abnormal", run_verify_abnormal}, {"expansion-fit", run_expansion_fit},
      {"kingman", run_kingman},     {"compare", run_compare}};

  try {
    // pull --config out of argv and splice the file's entries in front of
    // the remaining flags so the flags take precedence
    std::vector<std::string> args(argv + 1, argv + argc);
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        config_path = args[++i];
      } else if (args[i].rfind("--config=", 0) == 0) {
        config_path = args[i].substr(9);
      } else {
        rest.push_back(args[i]);
      }
    }
    std::vector<std::string> tokens;
    if (!config_path.empty()) {
      const auto cf = read_config(config_path);
      std::string command;
      for (const auto& a : rest)
        if (runners.count(a)) {
          command = a;
          break;
        }
      if (command.empty()) command = cf.command;
      if (command.empty()) fail_validation(config_path + ": no command given on the command line or in the file");
      if (!runners.count(command)) fail_validation(config_path + ": unknown command '" + command + "'");
      check_config_keys(config_path, *app.get_subcommand(command), cf.tokens);
      std::vector<std::string> merged;
      bool placed = false;
      for (const auto& a : rest) {
        merged.push_back(a);
        if (!placed && a == command) {
          merged.insert(merged.end(), cf.tokens.begin(), cf.tokens.end());
          placed = true;
        }
      }
      if (!placed) {
        merged.insert(merged.begin(), cf.tokens.begin(), cf.tokens.end());
        merged.insert(merged.begin(), command);
      }
      tokens = std::move(merged);
    } else {
      tokens = std::move(rest);
    }
    std::reverse(tokens.begin(), tokens.end());
    try {
      app.parse(tokens);
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? 0 : 2;
    }
    for (auto* sub : app.get_subcommands()) return runners.at(sub->get_name())(p);
    return 2;
  } catch (const ss::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ss::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
