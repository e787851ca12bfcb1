#pragma once
// Shared test fixtures: scalar systems with hand-chosen growth profiles and
// the two-component exponential-coupling system used across the test suite.
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pdde/existence.hpp"
#include "pdde/system.hpp"

namespace fixtures {

inline const double kPi = 3.14159265358979323846;

/// Scalar base system: a = ln 2, b = 1, omega = 1, no delay. Gives
/// sigma = 1/2, gamma = 1, chi = 2, so every classification threshold
/// lands on an easy rational point.
inline pdde::DelaySystemSpec scalar_base(
    std::function<double(double)> f, pdde::ComponentLimits limits,
    std::optional<double> c1, std::optional<double> c2, double lambda) {
  pdde::DelaySystemSpec sys;
  sys.n = 1;
  sys.omega = 1.0;
  sys.lambda = lambda;
  sys.a = {pdde::constant_fn(std::log(2.0), 1.0, "ln2")};
  sys.b = {pdde::constant_fn(1.0, 1.0, "one")};
  sys.tau = pdde::constant_fn(0.0, 1.0, "tau");
  sys.F.n = 1;
  sys.F.components = {[f](std::span<const double> x) { return f(x[0]); }};
  sys.F.declared_limits = std::vector<pdde::ComponentLimits>{limits};
  sys.F.c1 = c1;
  sys.F.c2 = c2;
  return sys;
}

struct TableCase {
  std::string name;
  pdde::DelaySystemSpec sys;
  // probe lambda -> expected count
  std::vector<std::pair<double, pdde::SolutionCount>> probes;
};

/// Nine scalar growth profiles covering every row of the solution-count
/// table: both mixed rows, both double rows, both single-zero rows, both
/// single-infinity rows, and the finite-window row.
inline std::vector<TableCase> table_battery() {
  using pdde::ComponentLimits;
  using pdde::LimitValue;
  using SC = pdde::SolutionCount;
  std::vector<TableCase> cases;

  cases.push_back(
      {"decaying-exponential",
       scalar_base([](double x) { return std::exp(-x); },
                   {LimitValue::infinite(), LimitValue::zero()}, std::nullopt,
                   std::nullopt, 1.0),
       {{0.1, SC::One}, {1.0, SC::One}, {100.0, SC::One}}});

  cases.push_back({"pure-square",
                   scalar_base([](double x) { return x * x; },
                               {LimitValue::zero(), LimitValue::infinite()},
                               std::nullopt, std::nullopt, 1.0),
                   {{0.1, SC::One}, {1.0, SC::One}, {100.0, SC::One}}});

  // f <= x/2 globally, both ratio limits zero
  cases.push_back({"saturating-square",
                   scalar_base([](double x) { return x * x / (1.0 + x * x); },
                               {LimitValue::zero(), LimitValue::zero()},
                               std::nullopt, 0.5, 1.0),
                   {{0.5, SC::Zero}, {3.0, SC::Unknown}, {6.0, SC::Two}}});

  // f >= x globally, both ratio limits infinite
  cases.push_back(
      {"root-plus-square",
       scalar_base([](double x) { return std::sqrt(x) + x * x; },
                   {LimitValue::infinite(), LimitValue::infinite()}, 1.0,
                   std::nullopt, 1.0),
       {{0.1, SC::Two}, {1.0, SC::Unknown}, {3.0, SC::Zero}}});

  cases.push_back(
      {"michaelis-menten",
       scalar_base([](double x) { return x / (1.0 + x); },
                   {LimitValue::finite(1.0), LimitValue::zero()}, std::nullopt,
                   1.0, 1.0),
       {{0.2, SC::Zero}, {1.0, SC::Unknown}, {4.0, SC::One}}});

  cases.push_back(
      {"square-over-linear",
       scalar_base([](double x) { return x * x / (1.0 + x); },
                   {LimitValue::zero(), LimitValue::finite(1.0)}, std::nullopt,
                   1.0, 1.0),
       {{0.2, SC::Zero}, {1.0, SC::Unknown}, {7.0, SC::One}}});

  cases.push_back(
      {"root-plus-linear",
       scalar_base([](double x) { return std::sqrt(x) + x; },
                   {LimitValue::infinite(), LimitValue::finite(1.0)}, 1.0,
                   std::nullopt, 1.0),
       {{0.1, SC::One}, {1.0, SC::Unknown}, {3.0, SC::Zero}}});

  cases.push_back(
      {"linear-plus-square",
       scalar_base([](double x) { return x + x * x; },
                   {LimitValue::finite(1.0), LimitValue::infinite()}, 1.0,
                   std::nullopt, 1.0),
       {{0.1, SC::One}, {1.0, SC::Unknown}, {3.0, SC::Zero}}});

  // ratio falls from 9 to 1: finite limits at both ends, window (2/9, 1/2)
  cases.push_back(
      {"rational-shoulder",
       scalar_base([](double x) { return x * (9.0 + x) / (1.0 + x); },
                   {LimitValue::finite(9.0), LimitValue::finite(1.0)}, 1.0,
                   9.0, 1.0),
       {{0.05, SC::Zero},
        {0.1, SC::Unknown},
        {0.3, SC::One},
        {1.0, SC::Unknown},
        {3.0, SC::Zero}}});

  return cases;
}

/// Two-component system with sinusoidally modulated decay and release rates
/// and shared exponential coupling exp(-(x1+x2)) in both components.
inline pdde::DelaySystemSpec exp_pair(double lambda, double tau,
                                      bool declare_extremes = false) {
  pdde::DelaySystemSpec sys;
  sys.n = 2;
  sys.omega = 1.0;
  sys.lambda = lambda;
  sys.a = {
      {[](double t) { return 5.0 + std::sin(2 * kPi * t); }, 1.0, "a1"},
      {[](double t) { return 5.0 + std::cos(2 * kPi * t); }, 1.0, "a2"},
  };
  sys.b = {
      {[](double t) { return 1.0 + 0.6 * std::cos(2 * kPi * t); }, 1.0, "b1"},
      {[](double t) { return 1.0 + 0.5 * std::sin(2 * kPi * t); }, 1.0, "b2"},
  };
  sys.tau = pdde::constant_fn(tau, 1.0, "tau");
  sys.F.n = 2;
  auto decay = [](std::span<const double> x) { return std::exp(-(x[0] + x[1])); };
  sys.F.components = {decay, decay};
  sys.F.declared_limits = std::vector<pdde::ComponentLimits>{
      {pdde::LimitValue::infinite(), pdde::LimitValue::zero()},
      {pdde::LimitValue::infinite(), pdde::LimitValue::zero()},
  };
  sys.F.declared_lipschitz = [](double) { return 2.0; };
  if (declare_extremes) {
    sys.F.declared_M = [](double) { return 1.0; };
    sys.F.declared_m = [](double r) { return std::exp(-r); };
  }
  return sys;
}

/// Two-species feedback model: prey released at rate a gated by f(y),
/// predator fed at rate c through a shared crowding exponential, decaying
/// at the seasonal rate h(t) = 1 + 0.6 sin(2 pi t). No delay in the base
/// model; gate width theta.
inline pdde::DelaySystemSpec feedback_pair(double a, double b, double c,
                                           double theta) {
  pdde::DelaySystemSpec sys;
  sys.n = 2;
  sys.omega = 1.0;
  sys.lambda = 1.0;
  sys.a = {pdde::constant_fn(b, 1.0, "b"),
           {[](double t) { return 1.0 + 0.6 * std::sin(2 * kPi * t); }, 1.0, "h"}};
  sys.b = {pdde::constant_fn(a, 1.0, "a"), pdde::constant_fn(c, 1.0, "c")};
  sys.tau = pdde::constant_fn(0.0, 1.0, "tau");
  sys.F.n = 2;
  const double th2 = theta * theta;
  sys.F.components = {
      [th2](std::span<const double> x) { return th2 / (th2 + x[1] * x[1]); },
      [](std::span<const double> x) { return std::exp(-(x[0] + x[1])); },
  };
  return sys;
}

}  // namespace fixtures
