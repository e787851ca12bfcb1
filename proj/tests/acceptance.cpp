#include <doctest.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pdde/existence.hpp"
#include "pdde/green_operator.hpp"
#include "pdde/history.hpp"
#include "pdde/periodic.hpp"
#include "pdde/simulate.hpp"
#include "pdde/stability.hpp"
#include "pdde/system.hpp"
#include "pdde/trajectory.hpp"
#include "synthetic_systems.hpp"

using namespace pdde;
using fixtures::exp_pair;
using fixtures::table_battery;

namespace {

// Collects sub-checks for one acceptance criterion and prints exactly one
// [PASS]/[FAIL] summary line. Every sub-check is also a doctest assertion
// so a red line comes with the failing condition spelled out. A criterion
// that blows its wall-clock budget fails even if every value checks out.
class Criterion {
 public:
  Criterion(int id, std::string label, double budget_s = 0.0)
      : id_(id),
        label_(std::move(label)),
        budget_(budget_s),
        start_(std::chrono::steady_clock::now()) {}

  void require(bool cond, const std::string& what) {
    if (!cond) failures_.push_back(what);
    CHECK_MESSAGE(cond, "criterion " << id_ << ": " << what);
  }

  void close(double a, double b, double rel, const std::string& what) {
    require(std::abs(a - b) <= rel * std::abs(b),
            what + " (got " + std::to_string(a) + ", want " +
                std::to_string(b) + ")");
  }

  void finish() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    bool ok = failures_.empty();
    if (budget_ > 0.0 && secs >= budget_) {
      ok = false;
      failures_.push_back("exceeded the " + std::to_string(budget_) +
                          " s budget");
    }
    std::printf("[%s] criterion %d: %s (%.3f s)\n", ok ? "PASS" : "FAIL", id_,
                label_.c_str(), secs);
    for (const auto& f : failures_) std::printf("       - %s\n", f.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(ok, "criterion " << id_ << " summary");
  }

 private:
  int id_;
  std::string label_;
  double budget_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> failures_;
};

int limit_class(const LimitValue& v) {
  if (v.is_zero()) return 0;
  if (v.is_finite()) return 1;
  return 2;
}

PeriodicTrajectory small_start() {
  const std::array<double, 2> x0 = {0.05, 0.05};
  return PeriodicTrajectory::constant(2, 1.0, 256, x0);
}

HistoryFn pair_history(double v1, double v2, double r) {
  const std::array<double, 2> vals = {v1, v2};
  return constant_history(2, vals, r);
}

}  // namespace

TEST_CASE("1: closed-form thresholds of the exponential-coupling pair") {
  Criterion c(1, "closed-form thresholds of the exponential-coupling pair",
              1.0);
  auto sys = exp_pair(0.1, 0.1);
  auto th = compute_thresholds(sys);
  const double e5 = std::exp(5.0);
  const double rel = 1e-9;

  c.require(th.sigma_i.size() == 2, "two per-component decay factors");
  for (double s : th.sigma_i) c.close(s, std::exp(-5.0), rel, "sigma_i");
  c.close(th.sigma, std::exp(-5.0), rel, "sigma");
  c.close(th.gamma, 1.0 / (e5 - 1.0), rel, "gamma");
  c.close(th.chi, 2.0 * e5 / (e5 - 1.0), rel, "chi");
  c.close(th.M1, 1.0, rel, "M(1)");
  c.close(th.m1, std::exp(-1.0), rel, "m(1)");

  auto rep = classify(sys, th);
  std::vector<double> cuts;
  for (const auto& iv : rep.intervals) {
    for (double v : {iv.lo, iv.hi})
      if (v > 0.0 && std::isfinite(v)) cuts.push_back(v);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  c.require(cuts.size() == 2, "exactly two lambda cutoffs, got " +
                                  std::to_string(cuts.size()));
  if (cuts.size() == 2) {
    c.close(cuts[0], (e5 - 1.0) / (2.0 * e5), rel, "lower lambda cutoff");
    c.close(cuts[1], std::exp(1.0) * (e5 - 1.0), rel, "upper lambda cutoff");
  }
  c.require(rep.verdict == SolutionCount::One, "one solution at lambda 0.1");
  c.require(verdict_for_lambda(rep, 401.0) == SolutionCount::One,
            "one solution at lambda 401");
  c.finish();
}

TEST_CASE("2: solution counts across the nine growth profiles") {
  Criterion c(2, "solution counts across the nine growth profiles", 10.0);
  auto cases = table_battery();
  c.require(cases.size() == 9, "nine profiles");
  std::set<std::pair<int, int>> rows;
  for (const auto& cs : cases) {
    auto th = compute_thresholds(cs.sys);
    rows.insert({limit_class(th.F0), limit_class(th.Finf)});
    auto rep = classify(cs.sys, th);
    for (const auto& [lam, want] : cs.probes) {
      c.require(verdict_for_lambda(rep, lam) == want,
                cs.name + " at lambda " + std::to_string(lam));
    }
  }
  c.require(rows.size() == 9, "all nine limit-class rows realized, got " +
                                  std::to_string(rows.size()));
  c.finish();
}

TEST_CASE("3: integral-operator properties on sampled cone elements") {
  Criterion c(3, "integral-operator properties on sampled cone elements",
              30.0);
  auto sys = exp_pair(0.1, 0.1);
  KernelContext ctx(sys);
  const double tol = 1e-8;

  int kernel_bad = 0;
  for (int i = 0; i < sys.n; ++i) {
    const double lo = ctx.lower_bound(i), hi = ctx.upper_bound(i);
    for (int jt = 0; jt < 48; ++jt) {
      const double t = jt * sys.omega / 48.0;
      for (int js = 0; js <= 64; ++js) {
        const double g = ctx.green(i, t, t + js * sys.omega / 64.0);
        if (g < lo - tol || g > hi + tol) ++kernel_bad;
      }
    }
  }
  c.require(kernel_bad == 0, "kernel stays inside its two-sided bounds, " +
                                 std::to_string(kernel_bad) + " violations");

  auto elems = sample_cone_elements(sys, 1.0, 100);
  c.require(elems.size() == 100, "a hundred sampled cone elements");
  int not_positive = 0, not_closed = 0, left_cone = 0;
  for (const auto& x : elems) {
    auto y = apply_T(sys, ctx, x);
    double mn = y.values.empty() ? 0.0 : y.values[0];
    for (double v : y.values) mn = std::min(mn, v);
    if (!(mn > 0.0)) ++not_positive;
    for (int i = 0; i < y.n; ++i)
      if (std::abs(y.value(0, i) - y.value(y.m, i)) > tol) ++not_closed;
    if (!cone_membership(y, ctx.sigma_all(), tol).ok) ++left_cone;
  }
  c.require(not_positive == 0, "operator output strictly positive, " +
                                   std::to_string(not_positive) + " failures");
  c.require(not_closed == 0, "operator output closes the period, " +
                                 std::to_string(not_closed) + " failures");
  c.require(left_cone == 0, "operator output stays in the cone, " +
                                std::to_string(left_cone) + " failures");

  int not_periodic = 0;
  for (size_t k = 0; k < 10; ++k) {
    for (int i = 0; i < sys.n; ++i) {
      for (double t : {0.13, 0.57, 0.91}) {
        const double u = apply_T_at(sys, ctx, elems[k], i, t);
        const double w = apply_T_at(sys, ctx, elems[k], i, t + sys.omega);
        if (std::abs(u - w) > tol) ++not_periodic;
      }
    }
  }
  c.require(not_periodic == 0, "operator values repeat after one period, " +
                                   std::to_string(not_periodic) + " failures");

  for (double r : {0.3, 1.0, 3.0}) {
    auto rep = operator_bound_checks(sys, r, 100, tol);
    c.require(rep.ok && rep.violations == 0,
              "norm sandwich at radius " + std::to_string(r) + ", " +
                  std::to_string(rep.violations) + " violations " +
                  rep.witness);
  }
  c.finish();
}

TEST_CASE("4: operator fixed point solves the delay equation") {
  Criterion c(4, "operator fixed point solves the delay equation", 60.0);
  auto sys = exp_pair(0.1, 0.1);
  auto fp = solve_fixed_point(sys, small_start(), 1e-10, 400, 0.5);
  c.require(fp.converged, "Picard iteration converged");
  c.require(fp.cone_ok, "fixed point sits in the cone");
  c.require(fp.residual_ode < 1e-4, "differential defect below 1e-4, got " +
                                        std::to_string(fp.residual_ode));

  auto run = simulate(sys, pair_history(0.02, 0.08, 0.1), 40.0, 1e-3);
  c.require(!run.blew_up, "simulation stays bounded");
  auto pr = detect_periodic(run, sys.omega, 1e-6);
  c.require(pr.converged, "simulated trajectory settles onto a period");
  const double gap = sup_distance(fp.solution, pr.orbit);
  c.require(gap < 1e-3, "orbit matches the fixed point, sup gap " +
                            std::to_string(gap));
  c.finish();
}

TEST_CASE("5: contraction certificate splits weak and strong drive") {
  Criterion c(5, "contraction certificate splits weak and strong drive",
              10.0);
  auto weak = exp_pair(0.1, 0.1);
  auto fp = solve_fixed_point(weak, small_start(), 1e-10, 400, 0.5);
  c.require(fp.converged, "periodic solution available at weak drive");
  auto about_orbit = certify(weak, fp.solution);
  c.require(about_orbit.K_L == 2.0 && !about_orbit.K_L_estimated,
            "declared Lipschitz constant 2 in force");
  c.require(about_orbit.shifted, "certificate speaks about the orbit");
  c.require(about_orbit.alpha < 1.0, "alpha below one at weak drive, got " +
                                         std::to_string(about_orbit.alpha));
  c.require(about_orbit.verdict == StabilityVerdict::AsymptoticallyStable,
            "weak drive certified asymptotically stable");

  auto strong = certify(exp_pair(401.0, 0.1), std::nullopt);
  c.require(strong.alpha > 1.0, "alpha above one at strong drive, got " +
                                    std::to_string(strong.alpha));
  c.require(strong.verdict == StabilityVerdict::CriteriaInconclusive,
            "strong drive leaves the criteria inconclusive");
  c.finish();
}

TEST_CASE("6: separated histories merge onto one periodic orbit") {
  Criterion c(6, "separated histories merge onto one periodic orbit", 120.0);

  auto weak = exp_pair(0.1, 0.1);
  std::vector<HistoryFn> hw;
  hw.push_back(pair_history(0.02, 0.08, 0.1));
  hw.push_back(pair_history(0.07, 0.01, 0.1));
  auto mw = trajectories_merge(weak, hw, 40.0, 1e-3, 1e-4);
  c.require(mw.merged, "weak-drive pair merges: " + mw.diagnosis);
  c.require(mw.final_distance < 1e-4,
            "weak-drive final gap " + std::to_string(mw.final_distance));

  auto strong = exp_pair(401.0, 0.1);
  std::vector<HistoryFn> hs;
  hs.push_back(pair_history(1.0, 4.0, 0.1));
  hs.push_back(pair_history(3.0, 2.0, 0.1));
  auto ms = trajectories_merge(strong, hs, 60.0, 1e-3, 1e-4);
  c.require(ms.merged, "strong-drive pair merges: " + ms.diagnosis);
  c.require(ms.final_distance < 1e-4,
            "strong-drive final gap " + std::to_string(ms.final_distance));
  c.finish();
}

TEST_CASE("7: delay reshapes the orbit only at strong drive") {
  Criterion c(7, "delay reshapes the orbit only at strong drive", 180.0);
  const double dt = 0.01;

  std::vector<double> periods;
  std::vector<std::array<double, 2>> amps;
  for (double tau : {0.1, 5.0, 10.0}) {
    auto sys = exp_pair(0.1, tau);
    auto run = simulate(sys, pair_history(0.02, 0.08, tau), 80.0, dt);
    c.require(!run.blew_up, "weak drive bounded at tau " + std::to_string(tau));
    auto pr = detect_periodic(run, sys.omega, 1e-6);
    c.require(pr.converged, "periodic at tau " + std::to_string(tau));
    auto om = measure_orbit(pr.orbit);
    c.require(om.period.has_value(),
              "measurable period at tau " + std::to_string(tau));
    if (om.period) {
      periods.push_back(*om.period);
      amps.push_back({om.amplitude[0], om.amplitude[1]});
    }
  }
  c.require(periods.size() == 3, "three measured weak-drive orbits");
  if (periods.size() == 3) {
    auto [pmin, pmax] = std::minmax_element(periods.begin(), periods.end());
    c.require(*pmax - *pmin <= dt,
              "weak-drive periods agree within one step, spread " +
                  std::to_string(*pmax - *pmin));
    for (double p : periods)
      c.require(std::abs(p - 1.0) <= dt,
                "weak-drive period pinned to the coefficient period, got " +
                    std::to_string(p));
    for (int i = 0; i < 2; ++i) {
      double lo = amps[0][i], hi = amps[0][i];
      for (const auto& a : amps) {
        lo = std::min(lo, a[i]);
        hi = std::max(hi, a[i]);
      }
      c.require((hi - lo) / hi <= 0.02,
                "component " + std::to_string(i + 1) +
                    " amplitude spread within 2%, got " +
                    std::to_string(100.0 * (hi - lo) / hi) + "%");
    }
  }

  auto strong = exp_pair(401.0, 5.0);
  auto run = simulate(strong, pair_history(1.0, 4.0, 5.0), 200.0, dt);
  c.require(!run.blew_up, "strong drive bounded at tau 5");
  auto om = measure_window(run, 100.0, 200.0);
  c.require(om.period.has_value(), "measurable strong-drive period");
  if (om.period)
    c.require(std::abs(*om.period - 1.0) > 3.0 * dt,
              "strong-drive period departs from the coefficient period, got " +
                  std::to_string(*om.period));
  c.finish();
}

TEST_CASE("8: fourth-order numerics and bit-identical reruns") {
  Criterion c(8, "fourth-order numerics and bit-identical reruns", 60.0);

  const double exact = (std::exp(5.0) - 1.0) / 5.0;
  double prev = 0.0;
  for (int panels : {8, 16, 32, 64}) {
    const double err = std::abs(
        integrate([](double t) { return std::exp(5.0 * t); }, 0.0, 1.0,
                  QuadratureRule::simpson(panels)) -
        exact);
    if (panels > 8) {
      const double order = std::log2(prev / err);
      c.require(std::abs(order - 4.0) <= 0.3,
                "quadrature order 4 at " + std::to_string(panels) +
                    " panels, got " + std::to_string(order));
    }
    prev = err;
  }

  DelaySystemSpec lin;
  lin.n = 1;
  lin.a = {constant_fn(2.0, 1.0)};
  lin.b = {constant_fn(1.0, 1.0)};
  lin.tau = constant_fn(0.0, 1.0);
  lin.omega = 1.0;
  lin.lambda = 1.0;
  lin.F.n = 1;
  lin.F.components = {[](std::span<const double> x) { return x[0]; }};
  const std::array<double, 1> one = {1.0};
  auto h = constant_history(1, one, 0.0);
  prev = 0.0;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    auto run = simulate(lin, h, 1.0, dt);
    const double err =
        std::abs(run.state(int(run.times.size()) - 1, 0) - std::exp(-1.0));
    if (prev > 0.0) {
      const double order = std::log2(prev / err);
      c.require(std::abs(order - 4.0) <= 0.3,
                "integrator order 4 at dt " + std::to_string(dt) + ", got " +
                    std::to_string(order));
    }
    prev = err;
  }

  auto sys = exp_pair(0.1, 0.1);
  std::string csv[2], json[2];
  for (int k = 0; k < 2; ++k) {
    auto run = simulate(sys, pair_history(0.02, 0.08, 0.1), 5.0, 1e-3);
    std::ostringstream os;
    run.to_csv(os);
    csv[k] = os.str();
    json[k] = to_json(classify(sys, compute_thresholds(sys)));
  }
  c.require(!csv[0].empty() && csv[0] == csv[1],
            "rerun trajectory tables byte-identical");
  c.require(!json[0].empty() && json[0] == json[1],
            "rerun classification reports byte-identical");

  auto e1 = sample_cone_elements(sys, 1.0, 5);
  auto e2 = sample_cone_elements(sys, 1.0, 5);
  bool same = e1.size() == e2.size();
  for (size_t k = 0; same && k < e1.size(); ++k)
    same = e1[k].values == e2[k].values;
  c.require(same, "rerun cone samples byte-identical");
  c.finish();
}
