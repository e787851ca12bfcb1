#include "pdde/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "pdde/csvio.hpp"
#include "pdde/errors.hpp"

namespace pdde {

PeriodicTrajectory PeriodicTrajectory::constant(int n, double omega, int m,
                                                std::span<const double> x0,
                                                Interp interp) {
  if (n < 1 || m < 2 || !(omega > 0.0))
    throw ValidationError("trajectory: need n >= 1, m >= 2, omega > 0");
  if (static_cast<int>(x0.size()) != n)
    throw ValidationError("trajectory: initial value size must equal n");
  PeriodicTrajectory x;
  x.n = n;
  x.omega = omega;
  x.m = m;
  x.interpolation = interp;
  x.values.resize(size_t(m + 1) * n);
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i < n; ++i) x.value(j, i) = x0[i];
  return x;
}

double PeriodicTrajectory::at(double t, int i) const {
  double h = omega / m;
  double u = t - omega * std::floor(t / omega);
  if (u >= omega) u -= omega;
  int j = static_cast<int>(u / h);
  if (j >= m) j = m - 1;
  double th = (u - j * h) / h;
  double v0 = value(j, i), v1 = value(j + 1, i);
  if (interpolation == Interp::Linear) return v0 + th * (v1 - v0);
  // centered periodic slopes; grid index m is an alias of 0
  int jm = (j - 1 + m) % m;
  int jp = (j + 2) % m;
  double d0 = (v1 - value(jm, i)) / (2 * h);
  double d1 = (value(jp, i) - v0) / (2 * h);
  double t2 = th * th, t3 = t2 * th;
  return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + th) * h * d0 +
         (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * h * d1;
}

void PeriodicTrajectory::eval(double t, std::span<double> out) const {
  for (int i = 0; i < n; ++i) out[i] = at(t, i);
}

double PeriodicTrajectory::component_sup(int i) const {
  double s = 0.0;
  for (int j = 0; j <= m; ++j) s = std::max(s, std::abs(value(j, i)));
  return s;
}

double PeriodicTrajectory::norm() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += component_sup(i);
  return s;
}

double PeriodicTrajectory::sup_norm() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

void PeriodicTrajectory::enforce_closure(double tol) {
  for (int i = 0; i < n; ++i) {
    double gap = std::abs(value(0, i) - value(m, i));
    if (!(gap <= tol))
      throw NumericalError("periodic closure violated: component " +
                           std::to_string(i + 1) + " gap " + fmt17(gap));
    value(m, i) = value(0, i);
  }
}

std::string PeriodicTrajectory::to_csv() const {
  std::vector<std::string> header{"t"};
  for (int i = 0; i < n; ++i) header.push_back("x" + std::to_string(i + 1));
  std::vector<std::vector<double>> rows;
  rows.reserve(m + 1);
  for (int j = 0; j <= m; ++j) {
    std::vector<double> row{omega * j / m};
    for (int i = 0; i < n; ++i) row.push_back(value(j, i));
    rows.push_back(std::move(row));
  }
  return csv_table(header, rows);
}

double sup_distance(const PeriodicTrajectory& x, const PeriodicTrajectory& y) {
  if (x.n != y.n || x.m != y.m)
    throw ValidationError("sup_distance: trajectories must share the grid");
  double d = 0.0;
  for (size_t k = 0; k < x.values.size(); ++k)
    d = std::max(d, std::abs(x.values[k] - y.values[k]));
  return d;
}

}  // namespace pdde
