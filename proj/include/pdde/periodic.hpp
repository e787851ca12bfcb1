#pragma once
#include <functional>
#include <string>
#include <vector>

namespace pdde {

/// A scalar coefficient with known period, evaluated through a closure.
/// The closure must be defined for every real t and repeat with the stated
/// period; periodicity is the caller's contract and is spot-checked by tests.
struct PeriodicFn {
  std::function<double(double)> eval;
  double period = 1.0;
  std::string label;

  double operator()(double t) const { return eval(t); }
};

PeriodicFn constant_fn(double value, double period, std::string label = "");

enum class QuadratureKind { CompositeSimpson, GaussLegendrePanels };

/// panels >= 1 always; points_per_panel only meaningful for Gauss-Legendre.
struct QuadratureRule {
  QuadratureKind kind = QuadratureKind::CompositeSimpson;
  int panels = 256;
  int points_per_panel = 5;

  static QuadratureRule simpson(int panels);
  static QuadratureRule gauss(int panels, int points_per_panel = 5);
};

/// Integrates f over [lo, hi] (lo <= hi required). Throws NumericalError,
/// naming the offending node, if f evaluates non-finite anywhere.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureRule& rule = {});

/// Mean value of f over one period.
double average(const PeriodicFn& f, const QuadratureRule& rule = {});

/// Signed integral of a from t to s. Antisymmetric under swapping t and s
/// exactly: both orders integrate over [min, max] and flip the sign.
double exponent_integral(const PeriodicFn& a, double t, double s,
                         const QuadratureRule& rule = {});

/// Tabulated antiderivative A(u) = integral of a over [0, u], valid for all
/// real u through A(u + k*period) = A(u) + k*A(period). Per-cell Gauss
/// accumulation plus Hermite interpolation keeps the table accurate to
/// roundoff relative to the tolerances used elsewhere.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  explicit CumulativeIntegral(const PeriodicFn& a, int cells = 2048);

  double at(double u) const;
  double over(double t, double s) const { return at(s) - at(t); }
  double full_period() const { return full_; }
  double mean() const { return full_ / omega_; }
  double period() const { return omega_; }

 private:
  double omega_ = 1.0;
  double h_ = 0.0;
  double full_ = 0.0;
  std::vector<double> acc_;    // A at the cell boundaries
  std::vector<double> deriv_;  // a at the cell boundaries
};

}  // namespace pdde
