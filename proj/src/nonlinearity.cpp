#include "pdde/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pdde/errors.hpp"

namespace pdde {
namespace {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

}  // namespace

LimitValue limit_max(const LimitValue& a, const LimitValue& b) {
  if (a.is_infinite() || b.is_infinite()) return LimitValue::infinite();
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return LimitValue::finite(std::max(a.value, b.value));
}

LimitValue limit_min(const LimitValue& a, const LimitValue& b) {
  if (a.is_zero() || b.is_zero()) return LimitValue::zero();
  if (a.is_infinite()) return b;
  if (b.is_infinite()) return a;
  return LimitValue::finite(std::min(a.value, b.value));
}

std::string to_string(const LimitValue& v) {
  switch (v.kind) {
    case LimitKind::Zero: return "zero";
    case LimitKind::Infinite: return "infinite";
    case LimitKind::Finite: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "finite(%.17g)", v.value);
      return buf;
    }
  }
  return "?";
}

std::vector<std::vector<double>> simplex_directions(int n, int count) {
  if (n < 1) throw ValidationError("simplex_directions: n >= 1 required");
  std::vector<std::vector<double>> dirs;
  if (n == 1) {
    dirs.push_back({1.0});
    return dirs;
  }
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(n, 0.0);
    v[i] = 1.0;
    dirs.push_back(std::move(v));
  }
  dirs.push_back(std::vector<double>(n, 1.0 / n));
  if (n == 2) {
    int fill = std::max(0, count - static_cast<int>(dirs.size()));
    for (int j = 1; j <= fill; ++j) {
      double u = double(j) / (fill + 1);
      dirs.push_back({u, 1.0 - u});
    }
    return dirs;
  }
  // sorted-spacings map sends low-discrepancy cube points onto the simplex
  int fill = std::max(0, count - static_cast<int>(dirs.size()));
  std::vector<double> u(n - 1);
  for (int j = 1; j <= fill; ++j) {
    for (int d = 0; d < n - 1; ++d) u[d] = halton(j, kPrimes[d % 10]);
    std::sort(u.begin(), u.end());
    std::vector<double> v(n);
    double prev = 0.0;
    for (int d = 0; d < n - 1; ++d) {
      v[d] = u[d] - prev;
      prev = u[d];
    }
    v[n - 1] = 1.0 - prev;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

void spot_check_positivity(const Nonlinearity& f, int samples) {
  if (f.n < 1 || static_cast<int>(f.components.size()) != f.n)
    throw ValidationError("nonlinearity: component count must equal n");
  auto dirs = simplex_directions(f.n, 8);
  // radii capped where exp-type decay still stays above double underflow
  const double radii[] = {1e-3, 1e-1, 1.0, 10.0, 100.0};
  std::vector<double> x(f.n);
  int done = 0;
  for (double r : radii) {
    for (const auto& d : dirs) {
      if (done >= samples) return;
      bool interior = true;
      for (int i = 0; i < f.n; ++i) {
        x[i] = r * (0.9 * d[i] + 0.1 / f.n);  // pull off the axes
        if (x[i] <= 0.0) interior = false;
      }
      if (!interior) continue;
      for (int i = 0; i < f.n; ++i) {
        double v = f(i, x);
        if (!(v > 0.0)) {
          char buf[160];
          std::snprintf(buf, sizeof buf,
                        "nonlinearity component %d is not positive at an "
                        "interior point of norm %.3g (value %.3g)",
                        i + 1, r, v);
          throw ValidationError(buf);
        }
      }
      ++done;
    }
  }
}

}  // namespace pdde
