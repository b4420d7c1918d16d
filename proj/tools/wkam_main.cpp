// Command-line front end: config-driven orchestration of the solver pipeline.
// Subcommands: solve, sets, transit, figure2, flow, validate.
// Exit codes: 0 success, 1 configuration/usage error, 2 computation verdict
// failure (not converged, inclusion violation, transit not found, ...).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "contact_wkam/wkam.hpp"

using json = nlohmann::json;
using namespace wkam;

namespace {

struct Cli {
  std::string config_path;
  std::string out_dir;
  int threads = 0;  // 0 = all available
};

RunConfig load(const Cli& cli) {
  RunConfig rc = cli.config_path.empty()
                     ? RunConfig::from_config(KeyValueConfig{})
                     : RunConfig::from_config(KeyValueConfig::parse_file(cli.config_path));
  if (!cli.out_dir.empty()) rc.output_dir = cli.out_dir;
  return rc;
}

KeyValueConfig raw_config(const Cli& cli) {
  return cli.config_path.empty() ? KeyValueConfig{}
                                 : KeyValueConfig::parse_file(cli.config_path);
}

std::string path_in(const RunConfig& rc, const std::string& name) {
  return rc.output_dir + "/" + name;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

PhaseState parse_state(const std::string& s) {
  PhaseState q{};
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &q.x, &q.p, &q.u) != 3)
    throw ConfigError("expected a comma-separated triple x,p,u, got: " + s);
  return q;
}

SetScanParams scan_params(const KeyValueConfig& kv, const RunConfig& rc) {
  SetScanParams p;
  p.dt = kv.get_double("sets.dt", 0.05);
  p.t_max = kv.get_double("sets.t_max", 15.0);
  p.tol_mane = kv.get_double("sets.tol_mane", 1e-2);
  p.tol_ss = kv.get_double("sets.tol_ss", 5e-4);
  p.v_max = rc.v_max;
  p.coarse_stride = kv.get_int("sets.coarse_stride", 16);
  p.coarse_dt = kv.get_double("sets.coarse_dt", 0.05);
  p.coarse_t_max = kv.get_double("sets.coarse_t_max", 15.0);
  p.coarse_threshold = kv.get_double("sets.coarse_threshold", 5e-3);
  p.recur_horizon = kv.get_double("sets.recur_horizon", 20.0);
  p.recur_eps = kv.get_double("sets.recur_eps", 5e-3);
  p.recur_t_min = kv.get_double("sets.recur_t_min", 2.0);
  return p;
}

int cmd_solve(const Cli& cli) {
  const RunConfig rc = load(cli);
  const auto back = solve_backward(rc.model, make_seed(rc.domain, "zero"), rc.dt, rc.t_max,
                                   rc.tol_fix, rc.v_max);
  write_grid_csv(path_in(rc, "u_minus.csv"), back.result, rc.config_hash, "u_minus");
  json summary;
  summary["lambda"] = rc.model.lambda;
  summary["n_points"] = rc.domain.n_points;
  summary["dt"] = rc.dt;
  summary["config_hash"] = rc.config_hash;
  summary["backward"] = {{"converged", back.converged},
                         {"iterations", back.iterations},
                         {"residual", back.residual},
                         {"sup_norm", back.result.sup_norm()}};
  bool all_converged = back.converged;
  summary["forward"] = json::array();
  for (const std::string& seed : rc.seeds) {
    const auto fwd = solve_forward(rc.model, make_seed(rc.domain, seed, 7), rc.dt, rc.t_max,
                                   rc.tol_fix, rc.v_max);
    all_converged = all_converged && fwd.converged;
    std::string tag = seed;
    for (char& c : tag)
      if (c == '-' || c == ' ') c = '_';
    write_grid_csv(path_in(rc, "u_plus_" + tag + ".csv"), fwd.result, rc.config_hash,
                   "u_plus");
    summary["forward"].push_back({{"seed", seed},
                                  {"converged", fwd.converged},
                                  {"iterations", fwd.iterations},
                                  {"residual", fwd.residual},
                                  {"sup_norm", fwd.result.sup_norm()}});
  }
  write_json(path_in(rc, "solve_summary.json"), summary);
  if (!all_converged) {
    std::cerr << "solve: an iteration did not converge within t_max\n";
    return 2;
  }
  return 0;
}

int cmd_sets(const Cli& cli) {
  const RunConfig rc = load(cli);
  const KeyValueConfig kv = raw_config(cli);
  const GridFunction u_minus =
      solve_backward(rc.model, make_seed(rc.domain, "zero"), rc.dt, rc.t_max, rc.tol_fix,
                     rc.v_max)
          .result;
  const GridFunction u_plus_max =
      solve_forward(rc.model, make_seed(rc.domain, "zero"), rc.dt, rc.t_max, rc.tol_fix,
                    rc.v_max)
          .result;
  const SetReport rep = build_set_report(rc.model, u_minus, u_plus_max, scan_params(kv, rc));
  write_set_report_csv(path_in(rc, "sets.csv"), rep, rc.config_hash);
  const InclusionReport inc = inclusion_report(rc.model, rep);
  json j;
  j["config_hash"] = rc.config_hash;
  j["counts"] = {{"mane", inc.n_mane},
                 {"aubry", inc.n_aubry},
                 {"strongly_static", inc.n_strongly_static},
                 {"mather", inc.n_mather}};
  j["violations"] = json::array();
  for (const auto& v : inc.violations)
    j["violations"].push_back({{"grid_index", v.grid_index}, {"chain_link", v.chain_link}});
  j["ok"] = inc.ok();
  write_json(path_in(rc, "inclusion.json"), j);
  if (!inc.ok()) {
    std::cerr << "sets: inclusion chain violated (" << inc.violations.size()
              << " violations)\n";
    return 2;
  }
  return 0;
}

int cmd_transit(const Cli& cli, const std::string& x1s, const std::string& x2s) {
  const RunConfig rc = load(cli);
  const KeyValueConfig kv = raw_config(cli);
  const PhaseState X1 = parse_state(x1s), X2 = parse_state(x2s);
  const double eps = kv.get_double("transit.eps", 0.05);
  const DiamondVerdict d = check_diamond(rc.model, rc.domain, X1, X2, rc.t_max, rc.dt,
                                         rc.tol_diamond, rc.v_max);
  json j;
  j["config_hash"] = rc.config_hash;
  j["x1"] = {X1.x, X1.p, X1.u};
  j["x2"] = {X2.x, X2.p, X2.u};
  j["holds"] = d.holds;
  j["conclusive"] = d.conclusive;
  j["gap_forward"] = d.gap_forward;
  j["gap_backward"] = d.gap_backward;
  TransitOrbitResult orbit;
  if (d.holds) {
    orbit = build_transitive_orbit(rc.model, rc.domain, X1, X2,
                                   {2.0, 5.0, 8.0, 12.0}, rc.dt, eps, rc.v_max);
    j["orbit_found"] = orbit.found;
    if (orbit.found) {
      j["orbit_horizon"] = orbit.t_used;
      j["orbit_start_gap"] = orbit.start_gap;
      j["orbit_target_gap"] = orbit.target_gap;
      write_trajectory_csv(path_in(rc, "transit_orbit.csv"), rc.model, orbit.orbit,
                           rc.config_hash);
    }
  } else {
    j["orbit_found"] = false;
  }
  write_json(path_in(rc, "diamond.json"), j);
  if (!d.holds || !orbit.found) {
    std::cerr << "transit: criterion " << (d.holds ? "holds but no orbit extracted"
                                                   : "does not hold")
              << "\n";
    return 2;
  }
  return 0;
}

int cmd_figure2(const Cli& cli) {
  const RunConfig rc = load(cli);
  if (!(rc.model.lambda < 1.0)) {
    std::cerr << "figure2: requires discount < 1 (the regime with a saddle at 0 and a "
                 "sink at pi; got lambda="
              << rc.model.lambda << ")\n";
    return 1;
  }
  const GridFunction u_minus =
      solve_backward(rc.model, make_seed(rc.domain, "zero"), rc.dt, rc.t_max, rc.tol_fix,
                     rc.v_max)
          .result;
  const GridFunction u_plus_max =
      solve_forward(rc.model, make_seed(rc.domain, "zero"), rc.dt, rc.t_max, rc.tol_fix,
                    rc.v_max)
          .result;
  // the strictly negative forward solution anchored at the saddle: backward
  // limsup seeded on the graph of u_minus at the slope midpoint pi/2
  const int mid = rc.domain.nearest_index(0.25 * rc.domain.circumference);
  const GridFunction w_plus =
      minimal_forward_solution(rc.model, u_minus, mid, rc.t_max, rc.dt, rc.v_max);
  write_columns_csv(path_in(rc, "figure2.csv"), rc.domain,
                    {"u_minus", "u_plus_max", "w_plus"}, {&u_minus, &u_plus_max, &w_plus},
                    rc.config_hash);
  return 0;
}

int cmd_flow(const Cli& cli, const std::string& start, double duration) {
  const RunConfig rc = load(cli);
  const PhaseState s0 = parse_state(start);
  const Trajectory traj = integrate(rc.model, s0, duration, rc.dt);
  write_trajectory_csv(path_in(rc, "flow.csv"), rc.model, traj, rc.config_hash);
  return 0;
}

int cmd_validate(const Cli& cli) {
  const RunConfig rc = load(cli);
  const ValidationReport rep = validate_model(rc.model, rc.domain);
  json j;
  j["config_hash"] = rc.config_hash;
  j["h1_convexity"] = rep.h1_convexity;
  j["h2_superlinearity"] = rep.h2_superlinearity;
  j["h3_monotone"] = rep.h3_monotone;
  j["h3_strict"] = rep.h3_strict;
  j["worst_hu_low"] = rep.worst_hu_low;
  j["worst_hu_high"] = rep.worst_hu_high;
  j["ok"] = rep.ok();
  write_json(path_in(rc, "validate.json"), j);
  if (!rep.ok()) {
    std::cerr << "validate: model fails the structural hypotheses\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak KAM toolkit for contact Hamiltonian systems on the circle"};
  app.require_subcommand(1);
  Cli cli;
  app.add_option("--config", cli.config_path, "key=value configuration file");
  app.add_option("--out", cli.out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", cli.threads,
                 "worker threads (advisory; kernels are currently sequential)");
  if (const char* env = std::getenv("CONTACT_WKAM_THREADS")) cli.threads = std::atoi(env);

  auto* solve = app.add_subcommand("solve", "backward and forward fixed points");
  auto* sets = app.add_subcommand("sets", "invariant-set classification report");
  auto* transit = app.add_subcommand("transit", "two-point transitive-orbit criterion");
  std::string x1s = "1.5707963,0,0", x2s = "3.1415926,0,0";
  transit->add_option("--x1", x1s, "start phase point x,p,u")->required();
  transit->add_option("--x2", x2s, "target phase point x,p,u")->required();
  auto* figure2 = app.add_subcommand("figure2", "solution family data for the two-regime plot");
  auto* flow = app.add_subcommand("flow", "integrate one trajectory of the flow");
  std::string start = "0,0,0";
  double duration = 10.0;
  flow->add_option("--start", start, "initial phase point x,p,u")->required();
  flow->add_option("--duration", duration, "integration time");
  auto* validate = app.add_subcommand("validate", "check the structural hypotheses");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(cli);
    if (sets->parsed()) return cmd_sets(cli);
    if (transit->parsed()) return cmd_transit(cli, x1s, x2s);
    if (figure2->parsed()) return cmd_figure2(cli);
    if (flow->parsed()) return cmd_flow(cli, start, duration);
    if (validate->parsed()) return cmd_validate(cli);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
