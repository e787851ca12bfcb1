#include "pdde/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "pdde/config.hpp"
#include "pdde/csvio.hpp"
#include "pdde/errors.hpp"
#include "pdde/existence.hpp"
#include "pdde/green_operator.hpp"
#include "pdde/history.hpp"
#include "pdde/scenarios.hpp"
#include "pdde/simulate.hpp"
#include "pdde/stability.hpp"
#include "pdde/svg.hpp"
#include "pdde/system.hpp"

namespace pdde {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct TargetArgs {
  std::string target;
  double lambda = 0.0;
  bool has_lambda = false;
  std::string tau;
  int set = 0;
};

/// Shared positional/flags for commands that act on one system.
void add_target_options(CLI::App* cmd, TargetArgs& t) {
  cmd->add_option("target", t.target,
                  "scenario id or path to a JSON config file")
      ->required();
  cmd->add_option("--lambda", t.lambda, "override the drive strength");
  cmd->add_option("--tau", t.tau, "override the delay (expression over t)");
  cmd->add_option("--set", t.set,
                  "parameter set (1-based) for scenarios that have a table");
}

SystemConfig resolve_target(const TargetArgs& t) {
  if (fs::exists(t.target)) {
    SystemConfig c = load_config(t.target);
    if (t.set != 0)
      throw ValidationError("--set applies to named scenarios, not config files");
    if (t.has_lambda) c.lambda = t.lambda;
    if (!t.tau.empty()) c.tau = t.tau;
    // Overrides can break what load_config guaranteed; revalidate.
    return parse_config(config_to_json(c));
  }
  ScenarioOverrides o;
  if (t.has_lambda) o.lambda = t.lambda;
  if (!t.tau.empty()) o.tau = t.tau;
  if (t.set != 0) o.parameter_set = t.set;
  return scenario_config(t.target, o);
}

std::string target_stem(const std::string& target) {
  if (fs::exists(target)) return fs::path(target).stem().string();
  return target;
}

std::string pick_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PDDE_OUT_DIR"))
    if (*env) return env;
  return "out";
}

std::vector<double> parse_history_values(const std::string& text, int n) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("history entry '" + item + "' is not a number");
    }
  }
  if (int(vals.size()) != n)
    throw ValidationError("history '" + text + "' needs " + std::to_string(n) +
                          " comma-separated values");
  return vals;
}

std::vector<std::vector<double>> pick_histories(
    const std::vector<std::string>& flags, const SystemConfig& cfg) {
  std::vector<std::vector<double>> out;
  for (const auto& f : flags) out.push_back(parse_history_values(f, cfg.n));
  if (out.empty()) out = cfg.histories;
  if (out.empty()) out.push_back(std::vector<double>(size_t(cfg.n), 1.0));
  return out;
}

PeriodicTrajectory resample(const PeriodicTrajectory& x, int m) {
  if (x.m == m) return x;
  PeriodicTrajectory y;
  y.n = x.n;
  y.omega = x.omega;
  y.m = m;
  y.values.assign(size_t(m + 1) * size_t(x.n), 0.0);
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i < x.n; ++i)
      y.value(j, i) = x.at(x.omega * j / m, i);
  return y;
}

struct SolveSettings {
  double tol = 1e-6;
  int max_iters = 200;
  int grid = 256;
  double damping = 0.0;  // 0 picks the ladder automatically
};

struct SolveOutcome {
  FixedPointResult result;
  std::string strategy;
};

/// Damped Picard from a constant start, walking down a damping ladder;
/// when every ladder rung misses, integrates forward in time and restarts
/// the iteration from the settled orbit. Keeps the closest pass overall.
SolveOutcome robust_solve(const DelaySystemSpec& sys, const SystemConfig& cfg,
                          const SolveSettings& s) {
  std::vector<double> start0 = cfg.histories.empty()
                                   ? std::vector<double>(size_t(sys.n), 1.0)
                                   : cfg.histories.front();
  for (double& v : start0) v = std::max(v, 1e-6);
  const std::vector<double> ones(size_t(sys.n), 1.0);

  std::vector<std::pair<std::vector<double>, double>> ladder;
  if (s.damping > 0.0) {
    ladder = {{start0, s.damping}};
  } else {
    ladder = {{start0, 1.0}, {start0, 0.5}, {start0, 0.3},
              {ones, 0.5},   {ones, 0.3}};
  }

  SolveOutcome best;
  best.result.residual_operator = std::numeric_limits<double>::infinity();
  auto keep = [&](FixedPointResult r, const std::string& how) {
    if (r.residual_operator < best.result.residual_operator)
      best = {std::move(r), how};
  };

  for (const auto& [start, d] : ladder) {
    auto x0 = PeriodicTrajectory::constant(sys.n, sys.omega, s.grid, start);
    try {
      FixedPointResult r =
          solve_fixed_point(sys, x0, s.tol, s.max_iters, d);
      const bool ok = r.converged;
      keep(std::move(r), "picard from constant start, damping " + fmt17(d));
      if (ok) return best;
    } catch (const NumericalError&) {
      // iterate left the representable range; try the next rung
    }
  }

  try {
    HistoryFn phi = constant_history(sys.n, start0, max_delay(sys));
    SimulationRun run =
        simulate(sys, phi, 60.0 * sys.omega, default_step(sys));
    if (!run.blew_up) {
      PeriodicityReport rep = detect_periodic(run, sys.omega, 1e-3);
      const double d = s.damping > 0.0 ? s.damping : 1.0;
      FixedPointResult r = solve_fixed_point(
          sys, resample(rep.orbit, s.grid), s.tol, s.max_iters, d);
      const bool ok = r.converged;
      keep(std::move(r), "picard restarted from the settled simulator orbit");
      if (ok) return best;
    }
  } catch (const std::exception&) {
    // fall through with the best direct attempt
  }
  return best;
}

json fp_json(const SolveOutcome& o, const std::string& csv_path) {
  json j;
  j["converged"] = o.result.converged;
  j["iterations"] = o.result.iterations;
  j["residual_operator"] = o.result.residual_operator;
  j["residual_ode"] = o.result.residual_ode;
  j["cone_ok"] = o.result.cone_ok;
  j["norm"] = o.result.solution.norm();
  j["strategy"] = o.strategy;
  if (!csv_path.empty()) j["csv"] = csv_path;
  return j;
}

void plot_runs(const std::string& path, const std::string& title,
               const std::vector<SimulationRun>& runs, int max_points = 1200) {
  std::vector<PlotSeries> series;
  for (size_t r = 0; r < runs.size(); ++r) {
    const SimulationRun& run = runs[r];
    const size_t stride = std::max<size_t>(1, run.times.size() / max_points);
    for (int i = 0; i < run.n; ++i) {
      PlotSeries s;
      s.label = "x" + std::to_string(i + 1);
      if (runs.size() > 1) s.label += " start " + std::to_string(r + 1);
      for (size_t k = 0; k < run.times.size(); k += stride) {
        s.x.push_back(run.times[k]);
        s.y.push_back(run.state(int(k), i));
      }
      s.x.push_back(run.times.back());
      s.y.push_back(run.state(int(run.times.size()) - 1, i));
      series.push_back(std::move(s));
    }
  }
  atomic_write(path, render_line_plot(title, series));
}

std::string write_run_csv(const std::string& path, const SimulationRun& run,
                          size_t row_cap = 0) {
  const int ds =
      row_cap ? int(std::max<size_t>(1, run.times.size() / row_cap)) : 1;
  std::ostringstream buf;
  run.to_csv(buf, ds);
  atomic_write(path, buf.str());
  return path;
}


// ---------------------------------------------------------------- classify

int run_classify(const TargetArgs& t, std::ostream& out) {
  DelaySystemSpec sys = build_system(resolve_target(t));
  Thresholds th = compute_thresholds(sys);
  ExistenceReport rep = classify(sys, th);
  out << to_json(rep) << "\n";
  return 0;
}

// ------------------------------------------------------------------- solve

int run_solve(const TargetArgs& t, const SolveSettings& s,
              const std::string& dir_flag, std::ostream& out,
              std::ostream& err) {
  SystemConfig cfg = resolve_target(t);
  DelaySystemSpec sys = build_system(cfg);
  SolveOutcome o = robust_solve(sys, cfg, s);
  std::string csv;
  if (o.result.solution.values.size() > 0) {
    csv = (fs::path(pick_out_dir(dir_flag)) /
           (target_stem(t.target) + "-solution.csv"))
              .string();
    atomic_write(csv, o.result.solution.to_csv());
  }
  out << fp_json(o, csv).dump(2) << "\n";
  if (!o.result.converged) {
    err << "fixed-point iteration did not reach tol " << fmt17(s.tol)
        << "; closest pass residual " << fmt17(o.result.residual_operator)
        << "\n";
    return 3;
  }
  return 0;
}

// --------------------------------------------------------------- stability

int run_stability(const TargetArgs& t, double kl, bool estimate_kl,
                  bool about_orbit, double ball, std::ostream& out,
                  std::ostream& err) {
  SystemConfig cfg = resolve_target(t);
  DelaySystemSpec sys = build_system(cfg);
  if (kl > 0.0)
    sys.F.declared_lipschitz = [kl](double) { return kl; };
  else if (estimate_kl)
    sys.F.declared_lipschitz.reset();

  std::optional<PeriodicTrajectory> orbit;
  if (about_orbit) {
    SolveOutcome o = robust_solve(sys, cfg, SolveSettings{});
    if (!o.result.converged) {
      err << "cannot certify about the periodic solution: the fixed-point "
             "search stalled at residual "
          << fmt17(o.result.residual_operator) << "\n";
      return 3;
    }
    orbit = std::move(o.result.solution);
  }
  StabilityCertificate cert = certify(sys, orbit, ball);
  out << to_json(cert) << "\n";
  return 0;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const TargetArgs& t, const std::vector<std::string>& history_flags,
                 double t_end_flag, double dt_flag, const std::string& dir_flag,
                 std::ostream& out, std::ostream& err) {
  SystemConfig cfg = resolve_target(t);
  DelaySystemSpec sys = build_system(cfg);
  const auto histories = pick_histories(history_flags, cfg);
  const double t_end =
      t_end_flag > 0 ? t_end_flag : cfg.t_end.value_or(40.0 * sys.omega);
  const double dt = dt_flag > 0 ? dt_flag : cfg.dt.value_or(default_step(sys));
  const double r = max_delay(sys);
  const std::string dir = pick_out_dir(dir_flag);
  const std::string stem = target_stem(t.target);

  json j;
  j["runs"] = json::array();
  bool any_blowup = false;
  for (size_t k = 0; k < histories.size(); ++k) {
    SimulationRun run =
        simulate(sys, constant_history(sys.n, histories[k], r), t_end, dt);
    const std::string csv =
        (fs::path(dir) / (stem + "-run" + std::to_string(k + 1) + ".csv"))
            .string();
    write_run_csv(csv, run);
    json rj;
    rj["csv"] = csv;
    rj["blew_up"] = run.blew_up;
    rj["t_final"] = run.t_end();
    if (run.blew_up) {
      rj["blowup_time"] = run.blowup_time;
      any_blowup = true;
    }
    j["runs"].push_back(rj);
  }
  out << j.dump(2) << "\n";
  if (any_blowup) {
    err << "at least one trajectory left the representable range\n";
    return 3;
  }
  return 0;
}

// --------------------------------------------------------------- reproduce

struct Panel {
  std::string name;  // file stem, e.g. "fig4.2a"
  std::string title;
  std::string scenario;
  ScenarioOverrides overrides;
  std::vector<std::vector<double>> histories;  // empty: scenario default first
  double t_end = 40.0;
};

std::vector<Panel> figure_panels(const std::string& tag) {
  auto over = [](double lambda, const char* tau) {
    ScenarioOverrides o;
    o.lambda = lambda;
    o.tau = tau;
    return o;
  };
  auto set = [](int k) {
    ScenarioOverrides o;
    o.parameter_set = k;
    return o;
  };
  if (tag == "4.1")
    return {{"fig4.1a", "negative-feedback, set 1: periodic attractor",
             "negative-feedback", set(1), {}, 40.0},
            {"fig4.1b", "negative-feedback, set 2: periodic attractor",
             "negative-feedback", set(2), {}, 40.0}};
  if (tag == "4.2")
    return {{"fig4.2a", "negative-feedback, set 1: nearby starts merge",
             "negative-feedback", set(1),
             {{0.02, 0.08}, {0.07, 0.03}}, 40.0},
            {"fig4.2b", "negative-feedback, set 1: distant starts merge",
             "negative-feedback", set(1), {{0.1, 0.9}, {0.8, 0.2}}, 40.0}};
  if (tag == "4.3")
    return {{"fig4.3a", "positive-feedback, set 1: nearby starts merge",
             "positive-feedback", set(1),
             {{0.07, 0.05}, {0.01, 0.09}}, 40.0},
            {"fig4.3b", "positive-feedback, set 1: distant starts merge",
             "positive-feedback", set(1), {{0.1, 0.9}, {0.8, 0.2}}, 40.0}};
  if (tag == "4.4")
    return {{"fig4.4a", "negative-feedback, set 3: strong drive still settles",
             "negative-feedback", set(3), {{0.5, 4.5}, {3.0, 1.5}}, 40.0},
            {"fig4.4b", "positive-feedback, set 3: strong drive still settles",
             "positive-feedback", set(3), {{0.5, 4.5}, {3.0, 1.5}}, 40.0}};
  if (tag == "5.1")
    return {{"fig5.1a", "delayed-exp, lambda 0.1, tau 0.1",
             "delayed-exp", over(0.1, "0.1"), {}, 40.0},
            {"fig5.1b", "delayed-exp, lambda 401, tau 0.1",
             "delayed-exp", over(401.0, "0.1"), {{1.0, 4.0}}, 40.0}};
  if (tag == "5.2")
    return {{"fig5.2", "delayed-exp, lambda 0.1: two starts merge",
             "delayed-exp", over(0.1, "0.1"),
             {{0.02, 0.08}, {0.07, 0.01}}, 40.0}};
  if (tag == "5.3")
    return {{"fig5.3", "delayed-exp, lambda 401: two starts merge",
             "delayed-exp", over(401.0, "0.1"), {{1.0, 4.0}, {3.0, 2.0}},
             60.0}};
  if (tag == "5.4")
    return {{"fig5.4a", "delayed-exp, lambda 0.1, tau 5", "delayed-exp",
             over(0.1, "5"), {}, 40.0},
            {"fig5.4b", "delayed-exp, lambda 0.1, tau 10", "delayed-exp",
             over(0.1, "10"), {}, 40.0},
            {"fig5.4c", "delayed-exp, lambda 401, tau 5", "delayed-exp",
             over(401.0, "5"), {{1.0, 4.0}}, 200.0},
            {"fig5.4d", "delayed-exp, lambda 401, tau 10", "delayed-exp",
             over(401.0, "10"), {{1.0, 4.0}}, 200.0}};
  throw ValidationError(
      "unknown figure '" + tag +
      "'; known: 4.1 4.2 4.3 4.4 5.1 5.2 5.3 5.4");
}

int run_reproduce(const std::string& tag, const std::string& dir_flag,
                  std::ostream& out) {
  const auto panels = figure_panels(tag);
  const fs::path dir(pick_out_dir(dir_flag));
  json j;
  j["figure"] = tag;
  j["files"] = json::array();
  for (const auto& p : panels) {
    SystemConfig cfg = scenario_config(p.scenario, p.overrides);
    DelaySystemSpec sys = build_system(cfg);
    auto histories = p.histories;
    if (histories.empty()) histories = {cfg.histories.front()};
    const double r = max_delay(sys);
    const double dt = default_step(sys);
    std::vector<SimulationRun> runs;
    for (size_t k = 0; k < histories.size(); ++k) {
      runs.push_back(simulate(sys, constant_history(sys.n, histories[k], r),
                              p.t_end, dt));
      const std::string csv =
          (dir / (p.name + "-run" + std::to_string(k + 1) + ".csv")).string();
      write_run_csv(csv, runs.back(), 4000);
      j["files"].push_back(csv);
    }
    const std::string svg = (dir / (p.name + ".svg")).string();
    plot_runs(svg, p.title, runs);
    j["files"].push_back(svg);
  }
  out << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"periodic solutions of delayed feedback systems"};
  app.require_subcommand(1);

  int code = 0;

  TargetArgs t_classify;
  auto* classify_cmd = app.add_subcommand(
      "classify", "count positive periodic solutions across drive strengths");
  add_target_options(classify_cmd, t_classify);
  classify_cmd->callback([&] {
    t_classify.has_lambda = classify_cmd->count("--lambda") > 0;
    code = run_classify(t_classify, out);
  });

  TargetArgs t_solve;
  SolveSettings solve_settings;
  std::string solve_dir;
  auto* solve_cmd = app.add_subcommand(
      "solve", "compute the periodic solution by fixed-point iteration");
  add_target_options(solve_cmd, t_solve);
  solve_cmd->add_option("--tol", solve_settings.tol,
                        "operator residual target (default 1e-6)");
  solve_cmd->add_option("--grid", solve_settings.grid,
                        "grid points per period (default 256)")
      ->check(CLI::Range(16, 16384));
  solve_cmd->add_option("--max-iters", solve_settings.max_iters,
                        "iteration cap per attempt (default 200)")
      ->check(CLI::Range(1, 100000));
  solve_cmd->add_option("--damping", solve_settings.damping,
                        "fixed damping instead of the automatic ladder")
      ->check(CLI::Range(1e-3, 1.0));
  solve_cmd->add_option("--out", solve_dir, "output directory");
  solve_cmd->callback([&] {
    t_solve.has_lambda = solve_cmd->count("--lambda") > 0;
    code = run_solve(t_solve, solve_settings, solve_dir, out, err);
  });

  TargetArgs t_stab;
  double kl = 0.0, ball = 0.0;
  bool estimate_kl = false, about_orbit = false;
  auto* stab_cmd = app.add_subcommand(
      "stability", "certify decay of perturbations around zero or the orbit");
  add_target_options(stab_cmd, t_stab);
  auto* kl_opt = stab_cmd->add_option(
      "--kl", kl, "declared Lipschitz bound for the forcing term");
  stab_cmd->add_flag("--estimate-kl", estimate_kl,
                     "sample difference quotients instead of any declared bound")
      ->excludes(kl_opt);
  stab_cmd->add_flag("--about-orbit", about_orbit,
                     "certify the periodic solution instead of zero");
  stab_cmd->add_option("--ball", ball,
                       "perturbation ball radius (default picks one)");
  stab_cmd->callback([&] {
    t_stab.has_lambda = stab_cmd->count("--lambda") > 0;
    code = run_stability(t_stab, kl, estimate_kl, about_orbit, ball, out, err);
  });

  TargetArgs t_sim;
  std::vector<std::string> history_flags;
  double t_end_flag = 0.0, dt_flag = 0.0;
  std::string sim_dir;
  auto* sim_cmd =
      app.add_subcommand("simulate", "integrate forward from given histories");
  add_target_options(sim_cmd, t_sim);
  sim_cmd->add_option("--history", history_flags,
                      "constant history 'v1,v2,...' (repeatable)");
  sim_cmd->add_option("--t-end", t_end_flag, "integration horizon");
  sim_cmd->add_option("--dt", dt_flag, "step size");
  sim_cmd->add_option("--out", sim_dir, "output directory");
  sim_cmd->callback([&] {
    t_sim.has_lambda = sim_cmd->count("--lambda") > 0;
    code = run_simulate(t_sim, history_flags, t_end_flag, dt_flag, sim_dir,
                        out, err);
  });

  std::string figure, rep_dir;
  auto* rep_cmd = app.add_subcommand(
      "reproduce", "regenerate the data and plot behind one figure");
  rep_cmd->add_option("--figure", figure, "figure tag, e.g. 5.2")->required();
  rep_cmd->add_option("--out", rep_dir, "output directory");
  rep_cmd->callback([&] { code = run_reproduce(figure, rep_dir, out); });

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("pdde");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return code;
}

}  // namespace pdde
