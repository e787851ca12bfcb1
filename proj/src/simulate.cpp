#include "pdde/simulate.hpp"

#include <algorithm>
#include <future>

#include "pdde/csvio.hpp"
#include "pdde/errors.hpp"

namespace pdde {

namespace {

double hermite(double y0, double d0, double y1, double d1, double h, double th) {
  const double th2 = th * th;
  const double th3 = th2 * th;
  return y0 * (2 * th3 - 3 * th2 + 1) + h * d0 * (th3 - 2 * th2 + th) +
         y1 * (-2 * th3 + 3 * th2) + h * d1 * (th3 - th2);
}

struct TauProfile {
  bool constant = false;
  double value = 0.0;  // meaningful when constant
  double max = 0.0;
};

TauProfile profile_delay(const DelaySystemSpec& sys) {
  TauProfile p;
  double lo = sys.tau(0.0), hi = lo;
  for (int j = 1; j <= 512; ++j) {
    const double v = sys.tau(sys.omega * j / 512.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo < -1e-12) throw ValidationError("delays must be nonnegative");
  p.constant = (hi - lo) <= 1e-12 * (1.0 + std::abs(hi));
  p.value = hi;
  p.max = hi;
  return p;
}

}  // namespace

double SimulationRun::at(double t, int i) const {
  if (t <= 0.0 && !history.components.empty()) {
    return history(i, std::max(t, -r));
  }
  const double tc = std::max(t, 0.0);  // historyless records clamp to the grid
  if (times.size() < 2) return state(0, i);
  const int segs = int(times.size()) - 1;
  int j = int(tc / dt);
  if (j >= segs) j = segs - 1;  // past the end: extrapolate the last segment
  const double th = (tc - times[size_t(j)]) / dt;
  return hermite(state(j, i), deriv(j, i), state(j + 1, i), deriv(j + 1, i), dt, th);
}

void SimulationRun::eval(double t, std::span<double> out) const {
  for (int i = 0; i < n; ++i) out[size_t(i)] = at(t, i);
}

void SimulationRun::to_csv(std::ostream& out, int downsample) const {
  if (downsample < 1) throw ValidationError("downsample factor must be >= 1");
  out << "t";
  for (int i = 0; i < n; ++i) out << ",x" << (i + 1);
  out << "\n";
  const int last = int(times.size()) - 1;
  for (int k = 0; k <= last; k += downsample) {
    out << fmt17(times[size_t(k)]);
    for (int i = 0; i < n; ++i) out << "," << fmt17(state(k, i));
    out << "\n";
  }
  if (last >= 0 && last % downsample != 0) {
    out << fmt17(times[size_t(last)]);
    for (int i = 0; i < n; ++i) out << "," << fmt17(state(last, i));
    out << "\n";
  }
}

SimulationRun simulate(const DelaySystemSpec& sys, const HistoryFn& history,
                       double t_end, double dt) {
  if (sys.n < 1) throw ValidationError("simulation needs at least one component");
  if (int(sys.a.size()) != sys.n || int(sys.b.size()) != sys.n) {
    throw ValidationError("coefficient count does not match dimension");
  }
  if (history.n != sys.n) {
    throw ValidationError("history dimension does not match system");
  }
  if (!(dt > 0.0)) throw ValidationError("step size must be positive");
  if (!(t_end > 0.0)) throw ValidationError("end time must be positive");

  const TauProfile tau = profile_delay(sys);
  const double r = max_delay(sys);
  if (history.r + 1e-9 < r) {
    throw ValidationError(
        "history window " + std::to_string(history.r) +
        " cannot feed delayed lookups reaching back " + std::to_string(r));
  }
  const bool ode_mode = tau.constant && tau.value <= 1e-12;
  if (tau.constant && !ode_mode) {
    const double ratio = tau.value / dt;
    const double k = std::round(ratio);
    if (std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio)) {
      throw ValidationError("step must divide the constant delay exactly");
    }
    if (k < 10.0) {
      throw ValidationError("need at least 10 steps per delay, got " +
                            std::to_string(int(k)));
    }
  }

  SimulationRun run;
  run.n = sys.n;
  run.dt = dt;
  run.r = r;
  run.history = history;

  const int K = int(std::ceil(t_end / dt - 1e-9));
  run.times.reserve(size_t(K) + 1);
  run.states.reserve((size_t(K) + 1) * size_t(sys.n));
  run.derivs.reserve((size_t(K) + 1) * size_t(sys.n));

  const int n = sys.n;
  std::vector<double> lagged(static_cast<size_t>(n));
  auto rhs = [&](double t, std::span<const double> x, std::span<double> out) {
    std::span<const double> arg;
    if (ode_mode) {
      arg = x;
    } else {
      const double tq = t - sys.tau(t);
      if (tq < -r - 1e-9) {
        throw ValidationError("delayed lookup at t=" + std::to_string(t) +
                              " reaches before the history window");
      }
      run.eval(tq, lagged);
      arg = lagged;
    }
    for (int i = 0; i < n; ++i) {
      out[size_t(i)] =
          -sys.a[size_t(i)](t) * x[size_t(i)] + sys.lambda * sys.b[size_t(i)](t) * sys.F(i, arg);
    }
  };

  std::vector<double> x(static_cast<size_t>(n)), d0(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) x[size_t(i)] = history(i, 0.0);
  run.times.push_back(0.0);
  run.states.insert(run.states.end(), x.begin(), x.end());
  rhs(0.0, x, d0);
  run.derivs.insert(run.derivs.end(), d0.begin(), d0.end());

  std::vector<double> k1(static_cast<size_t>(n)), k2(static_cast<size_t>(n)), k3(static_cast<size_t>(n)), k4(static_cast<size_t>(n)),
      stage(static_cast<size_t>(n)), next(static_cast<size_t>(n));
  for (int step = 0; step < K; ++step) {
    const double t = step * dt;
    // node derivative doubles as the first stage
    for (int i = 0; i < n; ++i) k1[size_t(i)] = run.deriv(step, i);
    for (int i = 0; i < n; ++i) stage[size_t(i)] = x[size_t(i)] + 0.5 * dt * k1[size_t(i)];
    rhs(t + 0.5 * dt, stage, k2);
    for (int i = 0; i < n; ++i) stage[size_t(i)] = x[size_t(i)] + 0.5 * dt * k2[size_t(i)];
    rhs(t + 0.5 * dt, stage, k3);
    for (int i = 0; i < n; ++i) stage[size_t(i)] = x[size_t(i)] + dt * k3[size_t(i)];
    rhs(t + dt, stage, k4);
    bool bad = false;
    for (int i = 0; i < n; ++i) {
      next[size_t(i)] = x[size_t(i)] + dt / 6.0 *
                                           (k1[size_t(i)] + 2 * k2[size_t(i)] +
                                            2 * k3[size_t(i)] + k4[size_t(i)]);
      if (!std::isfinite(next[size_t(i)]) || std::abs(next[size_t(i)]) > 1e12) bad = true;
    }
    if (bad) {
      run.blew_up = true;
      run.blowup_time = t + dt;
      break;
    }
    x = next;
    run.times.push_back((step + 1) * dt);
    run.states.insert(run.states.end(), x.begin(), x.end());
    rhs((step + 1) * dt, x, d0);
    run.derivs.insert(run.derivs.end(), d0.begin(), d0.end());
  }
  return run;
}

double default_step(const DelaySystemSpec& sys) {
  const TauProfile tau = profile_delay(sys);
  if (tau.constant && tau.value > 1e-12) {
    const double raw = std::min(tau.value, sys.omega) / 100.0;
    const int k = std::max(10, int(std::ceil(tau.value / raw - 1e-9)));
    return tau.value / k;
  }
  if (!tau.constant) return std::min(tau.max, sys.omega) / 100.0;
  return sys.omega / 100.0;
}

SimulationRun simulate(const DelaySystemSpec& sys, const HistoryFn& history) {
  return simulate(sys, history, 40.0 * sys.omega, default_step(sys));
}

PeriodicityReport detect_periodic(const SimulationRun& run, double omega, double tol) {
  if (!(omega > 0.0)) throw ValidationError("period must be positive");
  const int periods = int(std::floor(run.t_end() / omega + 1e-9));
  if (periods < 5) {
    throw ValidationError("periodicity check needs at least 5 periods, run covers " +
                          std::to_string(periods));
  }
  PeriodicityReport rep;
  const int last = int(run.times.size()) - 1;
  for (int k = 1; k < periods; ++k) {
    const double lo = k * omega;
    const double hi = (k + 1) * omega;
    double d = 0.0;
    const int j0 = std::max(0, int(std::ceil(lo / run.dt - 1e-9)));
    const int j1 = std::min(last, int(std::floor(hi / run.dt + 1e-9)));
    for (int j = j0; j <= j1; ++j) {
      const double t = run.times[size_t(j)];
      for (int i = 0; i < run.n; ++i) {
        d = std::max(d, std::abs(run.state(j, i) - run.at(t - omega, i)));
      }
    }
    rep.distances.push_back(d);
  }
  rep.converged = !rep.distances.empty() && rep.distances.back() < tol;

  const int m = 256;
  rep.orbit.n = run.n;
  rep.orbit.omega = omega;
  rep.orbit.m = m;
  rep.orbit.interpolation = Interp::CubicHermite;
  rep.orbit.values.assign(size_t(m + 1) * size_t(run.n), 0.0);
  const double start = (periods - 1) * omega;
  for (int j = 0; j < m; ++j) {
    const double t = start + omega * j / m;
    for (int i = 0; i < run.n; ++i) rep.orbit.value(j, i) = run.at(t, i);
  }
  for (int i = 0; i < run.n; ++i) rep.orbit.value(m, i) = rep.orbit.value(0, i);
  return rep;
}

MergeReport trajectories_merge(const DelaySystemSpec& sys,
                               const std::vector<HistoryFn>& histories,
                               double t_end, double dt, double tol) {
  if (histories.size() < 2) {
    throw ValidationError("merging needs at least two histories");
  }
  if (!(tol > 0.0)) throw ValidationError("merge tolerance must be positive");

  std::vector<std::future<SimulationRun>> jobs;
  jobs.reserve(histories.size());
  for (const auto& h : histories) {
    jobs.push_back(std::async(std::launch::async, [&sys, &h, t_end, dt] {
      return simulate(sys, h, t_end, dt);
    }));
  }
  std::vector<SimulationRun> runs;
  runs.reserve(jobs.size());
  for (auto& j : jobs) runs.push_back(j.get());

  MergeReport rep;
  for (size_t q = 0; q < runs.size(); ++q) {
    if (runs[q].blew_up) {
      rep.merged = false;
      rep.diagnosis = "run " + std::to_string(q) + " blew up at t=" +
                      std::to_string(runs[q].blowup_time);
      return rep;
    }
  }

  const int nodes = int(runs[0].times.size());
  std::vector<double> worst(size_t(nodes), 0.0);
  for (size_t a = 0; a < runs.size(); ++a) {
    for (size_t b = a + 1; b < runs.size(); ++b) {
      for (int j = 0; j < nodes; ++j) {
        for (int i = 0; i < runs[0].n; ++i) {
          worst[size_t(j)] = std::max(
              worst[size_t(j)], std::abs(runs[a].state(j, i) - runs[b].state(j, i)));
        }
      }
    }
  }

  const double window_lo = runs[0].t_end() - sys.omega;
  double final_d = 0.0;
  for (int j = 0; j < nodes; ++j) {
    if (runs[0].times[size_t(j)] >= window_lo - 1e-12) {
      final_d = std::max(final_d, worst[size_t(j)]);
    }
  }
  rep.final_distance = final_d;
  rep.merged = final_d < tol;
  if (rep.merged) {
    int first_bad = -1;
    for (int j = nodes - 1; j >= 0; --j) {
      if (worst[size_t(j)] >= tol) {
        first_bad = j;
        break;
      }
    }
    rep.merge_time = first_bad + 1 < nodes ? runs[0].times[size_t(first_bad + 1)]
                                           : runs[0].t_end();
  } else {
    rep.diagnosis = "final-period distance " + std::to_string(final_d) +
                    " stays above tolerance";
  }
  return rep;
}

namespace {

// circular: wrap-around products, exact for a periodically tiled signal
// (every full-period lag scores exactly 1 per component). Linear windows
// instead use the same product count at every lag, so no lag picks up a
// partial-window bias; their peaks carry drift noise, hence the looser
// tie tolerance.
OrbitMeasure autocorr_measure(const std::vector<std::vector<double>>& comps,
                              double dt, bool circular) {
  OrbitMeasure out;
  out.resolution = dt;
  const int N = int(comps[0].size());

  std::vector<std::vector<double>> centered;
  for (const auto& c : comps) {
    double mx = c[0], mn = c[0], mean = 0.0;
    for (double v : c) {
      mx = std::max(mx, v);
      mn = std::min(mn, v);
      mean += v;
    }
    mean /= N;
    out.amplitude.push_back(mx - mn);
    if (mx - mn > 1e-12 * (1.0 + std::abs(mean))) {
      auto s = c;
      for (double& v : s) v -= mean;
      centered.push_back(std::move(s));
    }
  }
  if (centered.empty()) return out;  // flat: period undefined

  const int lmax = N / 2;
  if (lmax < 4) return out;
  const int count = circular ? N : N - lmax;

  std::vector<double> var;
  for (const auto& s : centered) {
    double v = 0.0;
    for (int j = 0; j < count; ++j) v += s[size_t(j)] * s[size_t(j)];
    var.push_back(v / count);
  }

  std::vector<double> corr(size_t(lmax) + 1, 0.0);
  for (int l = 0; l <= lmax; ++l) {
    double total = 0.0;
    for (size_t c = 0; c < centered.size(); ++c) {
      const auto& s = centered[c];
      double acc = 0.0;
      if (circular) {
        for (int j = 0; j < N; ++j) {
          int q = j + l;
          if (q >= N) q -= N;
          acc += s[size_t(j)] * s[size_t(q)];
        }
      } else {
        for (int j = 0; j < count; ++j) acc += s[size_t(j)] * s[size_t(j + l)];
      }
      total += acc / (count * var[c]);
    }
    corr[size_t(l)] = total;
  }

  // skip the smooth-signal decorrelation shoulder: search after the first
  // local minimum
  int dip = -1;
  for (int l = 1; l < lmax; ++l) {
    if (corr[size_t(l)] <= corr[size_t(l - 1)] && corr[size_t(l)] <= corr[size_t(l + 1)]) {
      dip = l;
      break;
    }
  }
  if (dip < 0) return out;

  double best = -1e300;
  for (int l = dip + 1; l <= lmax; ++l) best = std::max(best, corr[size_t(l)]);
  const double slack = (circular ? 1e-9 : 1e-4) * (1.0 + std::abs(best));
  for (int l = dip + 1; l <= lmax; ++l) {
    if (corr[size_t(l)] >= best - slack) {
      out.period = l * dt;
      break;
    }
  }
  return out;
}

}  // namespace

OrbitMeasure measure_orbit(const PeriodicTrajectory& orbit, int tile_periods) {
  if (tile_periods < 2) throw ValidationError("orbit tiling needs >= 2 periods");
  const int m = orbit.m;
  std::vector<std::vector<double>> comps(static_cast<size_t>(orbit.n));
  for (int i = 0; i < orbit.n; ++i) {
    auto& c = comps[size_t(i)];
    c.reserve(size_t(m) * size_t(tile_periods));
    for (int p = 0; p < tile_periods; ++p) {
      for (int j = 0; j < m; ++j) c.push_back(orbit.value(j, i));
    }
  }
  return autocorr_measure(comps, orbit.omega / m, true);
}

OrbitMeasure measure_window(const SimulationRun& run, double t_lo, double t_hi) {
  if (!(t_lo >= 0.0) || !(t_hi > t_lo) || t_hi > run.t_end() + 1e-9) {
    throw ValidationError("measurement window must sit inside the run");
  }
  const int j0 = int(std::ceil(t_lo / run.dt - 1e-9));
  const int j1 = std::min(int(run.times.size()) - 1,
                          int(std::floor(t_hi / run.dt + 1e-9)));
  if (j1 - j0 + 1 < 32) {
    throw ValidationError("measurement window too short for autocorrelation");
  }
  std::vector<std::vector<double>> comps(static_cast<size_t>(run.n));
  for (int i = 0; i < run.n; ++i) {
    auto& c = comps[size_t(i)];
    c.reserve(size_t(j1 - j0 + 1));
    for (int j = j0; j <= j1; ++j) c.push_back(run.state(j, i));
  }
  return autocorr_measure(comps, run.dt, false);
}

}  // namespace pdde
