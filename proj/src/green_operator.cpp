#include "pdde/green_operator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "pdde/errors.hpp"
#include "pdde/existence.hpp"

namespace pdde {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

// b_i(s) * f_i(x(s - tau(s))), guarded: values must be finite and the
// product nonnegative or the operator loses its cone mapping property.
double weighted_feedback(const DelaySystemSpec& sys, const PeriodicTrajectory& x,
                         std::vector<double>& scratch, int i, double s) {
  const double lag = s - sys.tau(s);
  x.eval(lag, scratch);
  const double fv = sys.F(i, scratch);
  const double bv = sys.b[i](s);
  if (!std::isfinite(fv) || !std::isfinite(bv)) {
    throw NumericalError("non-finite integrand for component " +
                         std::to_string(i + 1) + " at s=" + fmt("%.17g", s));
  }
  const double w = bv * fv;
  if (w < 0.0) {
    throw ValidationError("integrand b*f of component " + std::to_string(i + 1) +
                          " is negative at s=" + fmt("%.17g", s) +
                          "; the operator needs nonnegative feedback");
  }
  return w;
}

}  // namespace

KernelContext::KernelContext(const DelaySystemSpec& sys) {
  validate_for_existence(sys);
  acc_.reserve(sys.n);
  for (int i = 0; i < sys.n; ++i) acc_.emplace_back(sys.a[i]);
  sigma_.resize(sys.n);
  lower_.resize(sys.n);
  upper_.resize(sys.n);
  for (int i = 0; i < sys.n; ++i) {
    // sigma defined through the same table the kernel exponents use, so
    // G_i(t, t + omega) = sigma_i^{-1} * G_i(t, t) holds to rounding.
    sigma_[i] = std::exp(-acc_[i].full_period());
    const double denom = 1.0 / sigma_[i] - 1.0;
    if (!(denom > 0.0)) {
      throw ValidationError("component " + std::to_string(i + 1) +
                            " has no positive decay over one period");
    }
    lower_[i] = 1.0 / denom;
    upper_[i] = (1.0 / sigma_[i]) / denom;
  }
}

double KernelContext::exponent(int i, double t, double s) const {
  return acc_[i].over(t, s);
}

double KernelContext::green(int i, double t, double s) const {
  const double denom = 1.0 / sigma_[i] - 1.0;
  return std::exp(acc_[i].over(t, s)) / denom;
}

double green_kernel(const DelaySystemSpec& sys, int i, double t, double s) {
  if (i < 0 || i >= sys.n) throw ValidationError("kernel component out of range");
  KernelContext ctx(sys);
  return ctx.green(i, t, s);
}

double apply_T_at(const DelaySystemSpec& sys, const KernelContext& ctx,
                  const PeriodicTrajectory& x, int i, double t) {
  std::vector<double> scratch(size_t(sys.n));
  auto integrand = [&](double s) {
    return ctx.green(i, t, s) * weighted_feedback(sys, x, scratch, i, s);
  };
  return sys.lambda *
         integrate(integrand, t, t + sys.omega, sys.quadrature);
}

PeriodicTrajectory apply_T(const DelaySystemSpec& sys, const KernelContext& ctx,
                           const PeriodicTrajectory& x) {
  if (x.n != sys.n) throw ValidationError("trajectory dimension does not match system");
  if (std::abs(x.omega - sys.omega) > 1e-12 * std::max(1.0, sys.omega)) {
    throw ValidationError("trajectory period does not match system");
  }
  if (x.m < 2) throw ValidationError("trajectory grid too coarse");
  if (!(sys.lambda >= 0.0)) throw ValidationError("lambda must be nonnegative");

  PeriodicTrajectory out = x;
  const int m = x.m;
  const double omega = sys.omega;
  std::vector<double> scratch(size_t(sys.n));

  const int L = 2 * sys.quadrature.panels;  // Simpson nodes per period, minus one
  const bool aligned =
      sys.quadrature.kind == QuadratureKind::CompositeSimpson && L % m == 0;

  if (aligned) {
    // Every grid point's integration nodes fall on the lattice u_q = q*h,
    // h = omega/L. Kernel and feedback values are shared: the integrand at
    // s = u_q + k*omega equals the lattice value times sigma^{-k}, because
    // the antiderivative grows by exactly one period integral per wrap.
    const double h = omega / L;
    const int stride = L / m;
    for (int i = 0; i < sys.n; ++i) {
      std::vector<double> lattice(static_cast<size_t>(L));
      for (int q = 0; q < L; ++q) {
        const double u = q * h;
        lattice[size_t(q)] = std::exp(ctx.antiderivative(i).at(u)) *
                             weighted_feedback(sys, x, scratch, i, u);
      }
      const double inv_sigma = 1.0 / ctx.sigma(i);
      const double denom = inv_sigma - 1.0;
      for (int j = 0; j < m; ++j) {
        const int base = j * stride;
        double sum = 0.0;
        for (int l = 0; l <= L; ++l) {
          const double w = (l == 0 || l == L) ? 1.0 : (l % 2 == 1 ? 4.0 : 2.0);
          const int q = base + l;
          const double v = q < L ? lattice[size_t(q)]
                                 : lattice[size_t(q - L)] * inv_sigma;
          sum += w * v;
        }
        sum *= h / 3.0;
        const double pref =
            std::exp(-ctx.antiderivative(i).at(j * omega / m)) / denom;
        out.value(j, i) = sys.lambda * pref * sum;
      }
    }
  } else {
    for (int i = 0; i < sys.n; ++i) {
      for (int j = 0; j < m; ++j) {
        const double t = j * omega / m;
        auto integrand = [&](double s) {
          return ctx.green(i, t, s) * weighted_feedback(sys, x, scratch, i, s);
        };
        out.value(j, i) =
            sys.lambda * integrate(integrand, t, t + omega, sys.quadrature);
      }
    }
  }
  // The operator output is omega-periodic by construction.
  for (int i = 0; i < sys.n; ++i) out.value(m, i) = out.value(0, i);
  return out;
}

PeriodicTrajectory apply_T(const DelaySystemSpec& sys,
                           const PeriodicTrajectory& x) {
  KernelContext ctx(sys);
  return apply_T(sys, ctx, x);
}

ConeCheck cone_membership(const PeriodicTrajectory& x,
                          std::span<const double> sigma_i, double tol) {
  if (int(sigma_i.size()) != x.n) {
    throw ValidationError("cone check needs one sigma per component");
  }
  ConeCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.n; ++i) {
    double sup = 0.0, min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < x.m; ++j) {
      sup = std::max(sup, std::abs(x.value(j, i)));
      min = std::min(min, x.value(j, i));
    }
    out.worst_margin = std::min(out.worst_margin, min - sigma_i[i] * sup);
  }
  out.ok = out.worst_margin >= -tol;
  return out;
}

FixedPointResult solve_fixed_point(const DelaySystemSpec& sys,
                                   const PeriodicTrajectory& x0, double tol,
                                   int max_iter, double damping) {
  if (!(tol > 0.0)) throw ValidationError("fixed-point tolerance must be positive");
  if (max_iter < 1) throw ValidationError("fixed-point iteration budget must be at least 1");
  if (!(damping > 0.0) || damping > 1.0) {
    throw ValidationError("fixed-point damping must lie in (0, 1]");
  }
  KernelContext ctx(sys);

  FixedPointResult out;
  PeriodicTrajectory x = x0;
  PeriodicTrajectory best = x0;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    PeriodicTrajectory tx = apply_T(sys, ctx, x);
    const double res = sup_distance(tx, x);
    out.iterations = it;
    if (!std::isfinite(res)) {
      throw NumericalError("fixed-point iterate became non-finite after " +
                           std::to_string(it) + " steps");
    }
    if (res < best_res) {
      best_res = res;
      best = x;
    }
    if (res <= tol) break;
    if (tx.norm() > 1e12) break;  // runaway growth; keep the best iterate
    for (size_t k = 0; k < x.values.size(); ++k) {
      x.values[k] = (1.0 - damping) * x.values[k] + damping * tx.values[k];
    }
  }
  // The iteration is not a contraction for every system, so the iterate
  // with the smallest measured residual is the one worth returning.
  out.solution = std::move(best);
  out.residual_operator = best_res;
  out.converged = best_res <= tol;
  out.cone_ok = cone_membership(out.solution, ctx.sigma_all()).ok;
  out.residual_ode = ode_residual(sys, out.solution);
  return out;
}

double ode_residual(const DelaySystemSpec& sys, const PeriodicTrajectory& x) {
  if (x.n != sys.n) throw ValidationError("trajectory dimension does not match system");
  if (x.m < 5) throw ValidationError("residual check needs at least 5 grid points");
  const int m = x.m;
  const double h = x.omega / m;
  std::vector<double> scratch(size_t(sys.n));
  double worst = 0.0;
  for (int j = 0; j < m; ++j) {
    const double t = j * x.omega / m;
    const int jm2 = (j - 2 + m) % m, jm1 = (j - 1 + m) % m;
    const int jp1 = (j + 1) % m, jp2 = (j + 2) % m;
    const double lag = t - sys.tau(t);
    x.eval(lag, scratch);
    for (int i = 0; i < sys.n; ++i) {
      const double deriv = (x.value(jm2, i) - 8.0 * x.value(jm1, i) +
                            8.0 * x.value(jp1, i) - x.value(jp2, i)) /
                           (12.0 * h);
      const double defect = deriv + sys.a[i](t) * x.value(j, i) -
                            sys.lambda * sys.b[i](t) * sys.F(i, scratch);
      worst = std::max(worst, std::abs(defect));
    }
  }
  return worst;
}

std::vector<PeriodicTrajectory> sample_cone_elements(const DelaySystemSpec& sys,
                                                     double r, int count,
                                                     std::uint64_t seed) {
  if (!(r > 0.0)) throw ValidationError("cone sample radius must be positive");
  if (count < 1) throw ValidationError("cone sample count must be positive");
  KernelContext ctx(sys);

  const int m = 128;
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * std::ldexp(double(rng()), -64);
  };

  std::vector<PeriodicTrajectory> out;
  out.reserve(size_t(count));
  for (int e = 0; e < count; ++e) {
    PeriodicTrajectory traj;
    traj.n = sys.n;
    traj.omega = sys.omega;
    traj.m = m;
    traj.values.assign(size_t(m + 1) * sys.n, 0.0);

    std::vector<double> weights(size_t(sys.n));
    double wsum = 0.0;
    for (int i = 0; i < sys.n; ++i) {
      weights[size_t(i)] = uniform(0.2, 1.0);
      wsum += weights[size_t(i)];
    }

    for (int i = 0; i < sys.n; ++i) {
      const double phi1 = uniform(0.0, sys.omega);
      const double phi2 = uniform(0.0, sys.omega);
      const double c1 = uniform(0.3, 1.0);
      const double c2 = uniform(0.0, 0.7);
      constexpr double pi = std::numbers::pi;
      std::vector<double> shape(static_cast<size_t>(m));
      double peak = 0.0;
      for (int j = 0; j < m; ++j) {
        const double t = j * sys.omega / m;
        const double u1 = 0.5 - 0.5 * std::cos(2.0 * pi * (t - phi1) / sys.omega);
        const double u2 = 0.5 - 0.5 * std::cos(4.0 * pi * (t - phi2) / sys.omega);
        shape[size_t(j)] = c1 * u1 + c2 * u2;
        peak = std::max(peak, shape[size_t(j)]);
      }
      // Floor strictly above sigma_i keeps the element inside the cone
      // with positive margin; grid max is exactly 1 after rescaling.
      const double base = ctx.sigma(i) + uniform(0.0, 0.9) * (1.0 - ctx.sigma(i));
      const double amp = r * weights[size_t(i)] / wsum;
      for (int j = 0; j < m; ++j) {
        const double unit = base + (1.0 - base) * (shape[size_t(j)] / peak);
        traj.value(j, i) = amp * unit;
      }
      traj.value(m, i) = traj.value(0, i);
    }
    out.push_back(std::move(traj));
  }
  return out;
}

BoundCheckReport operator_bound_checks(const DelaySystemSpec& sys, double r,
                                       int count, double tol) {
  if (!(tol >= 0.0)) throw ValidationError("bound check tolerance must be nonnegative");
  KernelContext ctx(sys);
  const auto [sigma_i, sigma] = compute_sigma(sys);
  const auto [gamma, chi] = compute_gamma_chi(sys);
  const MmEstimate mm = estimate_M_m(sys.F, r, sigma);

  BoundCheckReport rep;
  rep.radius = r;
  rep.lower = sys.lambda * gamma * mm.m;
  rep.upper = sys.lambda * chi * mm.M;
  rep.worst_lower_slack = std::numeric_limits<double>::infinity();
  rep.worst_upper_slack = std::numeric_limits<double>::infinity();

  const auto elements = sample_cone_elements(sys, r, count);
  rep.elements = int(elements.size());
  int index = 0;
  for (const auto& x : elements) {
    const PeriodicTrajectory tx = apply_T(sys, ctx, x);
    const double v = tx.norm();
    const double lo_slack = v - rep.lower;
    const double hi_slack = rep.upper - v;
    rep.worst_lower_slack = std::min(rep.worst_lower_slack, lo_slack);
    rep.worst_upper_slack = std::min(rep.worst_upper_slack, hi_slack);
    if (lo_slack < -tol || hi_slack < -tol) {
      ++rep.violations;
      if (rep.witness.empty()) {
        rep.witness = "element " + std::to_string(index) + ": |Tx| = " +
                      fmt("%.12g", v) + " outside [" + fmt("%.12g", rep.lower) +
                      ", " + fmt("%.12g", rep.upper) + "]";
      }
    }
    ++index;
  }
  rep.ok = rep.violations == 0;
  return rep;
}

}  // namespace pdde
