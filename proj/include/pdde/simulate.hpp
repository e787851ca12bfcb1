#pragma once
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pdde/history.hpp"
#include "pdde/system.hpp"
#include "pdde/trajectory.hpp"

namespace pdde {

/// Fixed-step integration record on the uniform grid t_k = k*dt, with the
/// node derivatives kept for cubic Hermite dense output. A blow-up
/// truncates the record at the offending node and raises the flag instead
/// of throwing: a diverging run is a finding, not a failure.
struct SimulationRun {
  int n = 1;
  double dt = 0.0;
  double r = 0.0;  // history window; lookups before t=0 go to the history
  std::vector<double> times;
  std::vector<double> states;  // times.size() rows of n
  std::vector<double> derivs;  // same shape
  HistoryFn history;
  bool blew_up = false;
  double blowup_time = std::numeric_limits<double>::quiet_NaN();

  double t_end() const { return times.empty() ? 0.0 : times.back(); }
  double state(int k, int i) const { return states[size_t(k) * n + i]; }
  double deriv(int k, int i) const { return derivs[size_t(k) * n + i]; }

  /// Dense evaluation: Hermite cubic between nodes, history for t <= 0,
  /// end-segment extrapolation past the last node (time-varying delays
  /// may peek a fraction of a step ahead).
  double at(double t, int i) const;
  void eval(double t, std::span<double> out) const;

  /// Rows `t,x1,...,xn`; every `downsample`-th node plus the final one.
  void to_csv(std::ostream& out, int downsample = 1) const;
};

/// Classical RK4 by the method of steps. A constant positive delay must
/// be an exact multiple of dt (at least 10 steps per delay) so that the
/// delayed argument always falls on completed segments; a zero delay
/// integrates as a plain ODE reading the stage state. Time-varying delays
/// interpolate the stored trajectory without breaking-point alignment.
SimulationRun simulate(const DelaySystemSpec& sys, const HistoryFn& history,
                       double t_end, double dt);

/// dt = min(tau, omega)/100 rounded so dt divides a constant delay,
/// t_end = 40*omega.
SimulationRun simulate(const DelaySystemSpec& sys, const HistoryFn& history);

/// The step the parameterless overload would pick.
double default_step(const DelaySystemSpec& sys);

struct PeriodicityReport {
  std::vector<double> distances;  // d_k, successive-period sup gaps
  bool converged = false;
  PeriodicTrajectory orbit;  // final period resampled to the 256 grid
};

/// d_k = sup over the (k+1)-th period window of max_i |x(t) - x(t-omega)|,
/// sampled at the run's own nodes. Converged iff the last gap < tol; the
/// orbit is the final period with closure forced onto the first sample.
PeriodicityReport detect_periodic(const SimulationRun& run, double omega,
                                  double tol = 1e-6);

struct MergeReport {
  bool merged = false;
  double merge_time = std::numeric_limits<double>::quiet_NaN();
  double final_distance = std::numeric_limits<double>::quiet_NaN();
  std::string diagnosis;
};

/// Runs one simulation per history (concurrently, nothing shared) and
/// compares them pairwise: merged iff every pair stays within tol over the
/// final period; merge_time is the first node after which the worst
/// pairwise gap never rises back above tol.
MergeReport trajectories_merge(const DelaySystemSpec& sys,
                               const std::vector<HistoryFn>& histories,
                               double t_end, double dt, double tol);

struct OrbitMeasure {
  std::vector<double> amplitude;   // max - min per component
  std::optional<double> period;    // empty when the signal is flat
  double resolution = 0.0;         // lag grid spacing the period is quantized to
};

/// Amplitude per component and the dominant period from the autocorrelation
/// of the mean-removed signal: first local maximum past the initial
/// decorrelation dip, ties resolved toward the smallest lag. The orbit is
/// tiled over several periods so subharmonic structure can surface.
OrbitMeasure measure_orbit(const PeriodicTrajectory& orbit, int tile_periods = 8);

/// Same measurement on a raw run window [t_lo, t_hi]: the route for orbits
/// whose true period need not match the coefficient period.
OrbitMeasure measure_window(const SimulationRun& run, double t_lo, double t_hi);

}  // namespace pdde
