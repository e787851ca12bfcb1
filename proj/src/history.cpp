#include "pdde/history.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "pdde/errors.hpp"

namespace pdde {

namespace {
constexpr double kDomainSlack = 1e-9;
}

double HistoryFn::operator()(int i, double s) const {
  if (i < 0 || i >= n) throw ValidationError("history component out of range");
  if (s < -r - kDomainSlack || s > kDomainSlack) {
    char buf[96];
    std::snprintf(buf, sizeof(buf),
                  "history evaluated at s=%.6g outside [-%.6g, 0]", s, r);
    throw ValidationError(buf);
  }
  const double clamped = std::min(0.0, std::max(-r, s));
  return components[size_t(i)](clamped);
}

void HistoryFn::eval(double s, std::span<double> out) const {
  for (int i = 0; i < n; ++i) out[size_t(i)] = (*this)(i, s);
}

double HistoryFn::norm() const {
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double sup = std::abs((*this)(i, 0.0));
    for (int j = 1; j <= 256; ++j) {
      sup = std::max(sup, std::abs((*this)(i, -r * j / 256.0)));
    }
    total += sup;
  }
  return total;
}

HistoryFn constant_history(int n, std::span<const double> values, double r) {
  if (n < 1 || int(values.size()) != n) {
    throw ValidationError("constant history needs one value per component");
  }
  if (!(r >= 0.0)) throw ValidationError("history window must be nonnegative");
  HistoryFn h;
  h.n = n;
  h.r = r;
  h.kind = HistoryKind::Constant;
  for (int i = 0; i < n; ++i) {
    const double v = values[size_t(i)];
    h.components.push_back([v](double) { return v; });
  }
  return h;
}

HistoryFn history_from_function(int n, double r,
                                std::function<double(int, double)> g) {
  if (n < 1) throw ValidationError("history dimension must be positive");
  if (!(r >= 0.0)) throw ValidationError("history window must be nonnegative");
  HistoryFn h;
  h.n = n;
  h.r = r;
  h.kind = HistoryKind::ClosedForm;
  for (int i = 0; i < n; ++i) {
    h.components.push_back([g, i](double s) { return g(i, s); });
  }
  return h;
}

HistoryFn history_from_trajectory(const PeriodicTrajectory& x, double r) {
  if (!(r >= 0.0)) throw ValidationError("history window must be nonnegative");
  HistoryFn h;
  h.n = x.n;
  h.r = r;
  h.kind = HistoryKind::Sampled;
  for (int i = 0; i < x.n; ++i) {
    h.components.push_back([x, i](double s) { return x.at(s, i); });
  }
  return h;
}

double HistoryFunctional::operator()(int i, const HistoryFn& phi,
                                     double t) const {
  if (i < 0 || i >= n) throw ValidationError("functional component out of range");
  if (phi.n != n) throw ValidationError("history dimension does not match functional");
  return components[size_t(i)](phi, t);
}

HistoryFunctional delayed_pointwise(const Nonlinearity& f, const PeriodicFn& tau,
                                    double r) {
  HistoryFunctional g;
  g.n = f.n;
  g.r = r;
  g.omega = tau.period;
  for (int i = 0; i < f.n; ++i) {
    auto fi = f.components[size_t(i)];
    auto tfn = tau;
    g.components.push_back([fi, tfn, n = f.n](const HistoryFn& phi, double t) {
      std::vector<double> arg(static_cast<size_t>(n));
      phi.eval(-tfn(t), arg);
      return fi(arg);
    });
  }
  if (f.declared_lipschitz) g.declared_lipschitz = f.declared_lipschitz;
  return g;
}

HistoryFunctional shifted_functional(const Nonlinearity& f, const PeriodicFn& tau,
                                     double r, PeriodicTrajectory x_star) {
  if (x_star.n != f.n) {
    throw ValidationError("reference solution dimension does not match nonlinearity");
  }
  HistoryFunctional g;
  g.n = f.n;
  g.r = r;
  g.omega = x_star.omega;
  for (int i = 0; i < f.n; ++i) {
    auto fi = f.components[size_t(i)];
    auto tfn = tau;
    g.components.push_back(
        [fi, tfn, x_star, n = f.n](const HistoryFn& phi, double t) {
          const double lag = t - tfn(t);
          std::vector<double> ref(static_cast<size_t>(n)), arg(static_cast<size_t>(n));
          x_star.eval(lag, ref);
          phi.eval(-tfn(t), arg);
          for (int k = 0; k < n; ++k) arg[size_t(k)] += ref[size_t(k)];
          return fi(arg) - fi(ref);
        });
  }
  if (f.declared_lipschitz) g.declared_lipschitz = f.declared_lipschitz;
  return g;
}

}  // namespace pdde
