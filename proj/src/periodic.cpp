#include "pdde/periodic.hpp"

#include <cmath>
#include <cstdio>

#include "pdde/errors.hpp"

namespace pdde {
namespace {

std::string fmt(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

double checked(const std::function<double(double)>& f, double t) {
  double v = f(t);
  if (!std::isfinite(v))
    throw NumericalError("non-finite integrand value at t=" + fmt(t));
  return v;
}

/// Nodes and weights of the q-point Gauss-Legendre rule on [-1, 1],
/// by Newton iteration on the Legendre recurrence.
void legendre_rule(int q, std::vector<double>& xs, std::vector<double>& ws) {
  xs.assign(q, 0.0);
  ws.assign(q, 0.0);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    xs[i] = x;
    ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

double simpson(const std::function<double(double)>& f, double lo, double hi,
               int panels) {
  const int n = 2 * panels;  // node count n+1, always odd
  const double h = (hi - lo) / n;
  double sum = checked(f, lo) + checked(f, hi);
  for (int k = 1; k < n; ++k) {
    double w = (k % 2 == 1) ? 4.0 : 2.0;
    sum += w * checked(f, lo + k * h);
  }
  return sum * h / 3.0;
}

double gauss_panels(const std::function<double(double)>& f, double lo,
                    double hi, int panels, int q) {
  std::vector<double> xs, ws;
  legendre_rule(q, xs, ws);
  const double h = (hi - lo) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    double a = lo + p * h;
    double mid = a + 0.5 * h;
    double half = 0.5 * h;
    double local = 0.0;
    for (int j = 0; j < q; ++j) local += ws[j] * checked(f, mid + half * xs[j]);
    sum += local * half;
  }
  return sum;
}

}  // namespace

PeriodicFn constant_fn(double value, double period, std::string label) {
  return PeriodicFn{[value](double) { return value; }, period,
                    std::move(label)};
}

QuadratureRule QuadratureRule::simpson(int panels) {
  return QuadratureRule{QuadratureKind::CompositeSimpson, panels, 5};
}

QuadratureRule QuadratureRule::gauss(int panels, int points_per_panel) {
  return QuadratureRule{QuadratureKind::GaussLegendrePanels, panels,
                        points_per_panel};
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureRule& rule) {
  if (!(lo <= hi))
    throw ValidationError("integrate: lo=" + fmt(lo) + " exceeds hi=" +
                          fmt(hi));
  if (rule.panels < 1) throw ValidationError("quadrature rule needs panels >= 1");
  if (lo == hi) return 0.0;
  switch (rule.kind) {
    case QuadratureKind::CompositeSimpson:
      return simpson(f, lo, hi, rule.panels);
    case QuadratureKind::GaussLegendrePanels:
      if (rule.points_per_panel < 1 || rule.points_per_panel > 64)
        throw ValidationError("gauss rule needs 1..64 points per panel");
      return gauss_panels(f, lo, hi, rule.panels, rule.points_per_panel);
  }
  throw ValidationError("unknown quadrature kind");
}

double average(const PeriodicFn& f, const QuadratureRule& rule) {
  if (!(f.period > 0.0))
    throw ValidationError("average: period must be positive" +
                          (f.label.empty() ? "" : " (" + f.label + ")"));
  return integrate(f.eval, 0.0, f.period, rule) / f.period;
}

double exponent_integral(const PeriodicFn& a, double t, double s,
                         const QuadratureRule& rule) {
  if (t == s) return 0.0;
  if (t < s) return integrate(a.eval, t, s, rule);
  return -integrate(a.eval, s, t, rule);
}

CumulativeIntegral::CumulativeIntegral(const PeriodicFn& a, int cells) {
  if (!(a.period > 0.0))
    throw ValidationError("cumulative integral: period must be positive");
  if (cells < 16) cells = 16;
  omega_ = a.period;
  h_ = omega_ / cells;
  acc_.resize(cells + 1);
  deriv_.resize(cells + 1);
  std::vector<double> xs, ws;
  legendre_rule(5, xs, ws);
  acc_[0] = 0.0;
  deriv_[0] = checked(a.eval, 0.0);
  for (int c = 0; c < cells; ++c) {
    double lo = c * h_;
    double mid = lo + 0.5 * h_;
    double half = 0.5 * h_;
    double local = 0.0;
    for (int j = 0; j < 5; ++j) local += ws[j] * checked(a.eval, mid + half * xs[j]);
    acc_[c + 1] = acc_[c] + local * half;
    deriv_[c + 1] = checked(a.eval, (c + 1) * h_);
  }
  full_ = acc_[cells];
}

double CumulativeIntegral::at(double u) const {
  if (acc_.empty()) throw ValidationError("cumulative integral not built");
  double k = std::floor(u / omega_);
  double frac = u - k * omega_;
  if (frac >= omega_) {  // guard against floor roundoff at period boundaries
    frac -= omega_;
    k += 1.0;
  }
  if (frac < 0.0) frac = 0.0;
  int cells = static_cast<int>(acc_.size()) - 1;
  int j = static_cast<int>(frac / h_);
  if (j >= cells) j = cells - 1;
  double th = (frac - j * h_) / h_;
  double th2 = th * th, th3 = th2 * th;
  double h00 = 2 * th3 - 3 * th2 + 1;
  double h10 = th3 - 2 * th2 + th;
  double h01 = -2 * th3 + 3 * th2;
  double h11 = th3 - th2;
  double val = h00 * acc_[j] + h10 * h_ * deriv_[j] + h01 * acc_[j + 1] +
               h11 * h_ * deriv_[j + 1];
  return val + k * full_;
}

}  // namespace pdde
