#pragma once
#include <span>
#include <string>
#include <vector>

namespace pdde {

enum class Interp { Linear, CubicHermite };

/// Candidate periodic solution sampled on the uniform closed grid
/// t_j = j*omega/m, j = 0..m, stored row-major with n values per grid
/// point. Row m duplicates row 0 (periodic closure). Evaluation at
/// arbitrary t reduces the argument into [0, omega) first; Hermite slopes
/// come from centered periodic differences.
struct PeriodicTrajectory {
  int n = 1;
  double omega = 1.0;
  int m = 256;
  std::vector<double> values;  // (m+1) rows of n
  Interp interpolation = Interp::CubicHermite;

  static PeriodicTrajectory constant(int n, double omega, int m,
                                     std::span<const double> x0,
                                     Interp interp = Interp::CubicHermite);

  double value(int j, int i) const { return values[size_t(j) * n + i]; }
  double& value(int j, int i) { return values[size_t(j) * n + i]; }

  double at(double t, int i) const;
  void eval(double t, std::span<double> out) const;

  /// sup_t |x_i(t)| on the grid.
  double component_sup(int i) const;
  /// sum_i sup_t |x_i(t)|: the norm the solution theory measures radii in.
  double norm() const;
  /// max over grid points and components of |x_i(t)|.
  double sup_norm() const;

  /// Verifies |row 0 - row m| <= tol per component, then snaps row m onto
  /// row 0. Throws NumericalError beyond tol.
  void enforce_closure(double tol = 1e-12);

  std::string to_csv() const;
};

/// Largest pointwise gap max_{j,i} |x(t_j) - y(t_j)| on the shared grid.
double sup_distance(const PeriodicTrajectory& x, const PeriodicTrajectory& y);

}  // namespace pdde
