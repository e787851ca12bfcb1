#include "pdde/scenarios.hpp"

#include <cmath>

#include "pdde/csvio.hpp"
#include "pdde/errors.hpp"

namespace pdde {
namespace {

std::vector<ComponentLimits> uniform_limits(int n, LimitValue at_zero,
                                            LimitValue at_inf) {
  std::vector<ComponentLimits> lims;
  for (int i = 0; i < n; ++i) lims.push_back({at_zero, at_inf});
  return lims;
}

Nonlinearity exp_sum_decay(int n) {
  Nonlinearity F;
  F.n = n;
  for (int i = 0; i < n; ++i) {
    F.components.push_back([](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v;
      return std::exp(-s);
    });
  }
  // Each component is bounded by 1 and positive, so the ratio against |x|
  // runs from infinity down to zero.
  F.declared_limits =
      uniform_limits(n, LimitValue::infinite(), LimitValue::zero());
  if (n == 2) F.declared_lipschitz = [](double) { return 2.0; };
  return F;
}

Nonlinearity gate_pair(bool negative, double theta) {
  Nonlinearity F;
  F.n = 2;
  const double th2 = theta * theta;
  if (negative) {
    F.components.push_back([th2](std::span<const double> x) {
      return th2 / (th2 + x[1] * x[1]);
    });
  } else {
    F.components.push_back([th2](std::span<const double> x) {
      return x[1] * x[1] / (th2 + x[1] * x[1]);
    });
  }
  F.components.push_back([](std::span<const double> x) {
    return std::exp(-(x[0] + x[1]));
  });
  F.declared_limits = std::vector<ComponentLimits>{
      negative
          ? ComponentLimits{LimitValue::infinite(), LimitValue::zero()}
          : ComponentLimits{LimitValue::zero(), LimitValue::zero()},
      {LimitValue::infinite(), LimitValue::zero()},
  };
  return F;
}

SystemConfig make_delayed_exp(const ScenarioOverrides& o) {
  if (o.parameter_set)
    throw ValidationError("delayed-exp has no parameter sets; drop --set");
  SystemConfig c;
  c.n = 2;
  c.omega = 1.0;
  c.lambda = o.lambda.value_or(0.1);
  c.a = {"5+sin(2*pi*t)", "5+cos(2*pi*t)"};
  c.b = {"1+0.6*cos(2*pi*t)", "1+0.5*sin(2*pi*t)"};
  c.tau = o.tau.value_or("0.1");
  c.F.name = "exp-sum-decay";
  // Weak drive settles near the origin, strong drive far from it; start
  // each regime at states of matching size.
  if (c.lambda < 1.0)
    c.histories = {{0.02, 0.08}, {0.07, 0.01}};
  else
    c.histories = {{1.0, 4.0}, {3.0, 2.0}};
  return c;
}

SystemConfig make_feedback(const ScenarioOverrides& o, bool negative) {
  const auto& sets = find_scenario(negative ? "negative-feedback"
                                            : "positive-feedback")
                         .parameter_sets;
  const int set = o.parameter_set.value_or(1);
  if (set < 1 || set > int(sets.size()))
    throw ValidationError("parameter set must be between 1 and " +
                          std::to_string(sets.size()));
  const auto [ga, gb, gc, th] = sets[size_t(set - 1)];
  SystemConfig c;
  c.n = 2;
  c.omega = 1.0;
  c.lambda = o.lambda.value_or(1.0);
  // Release gated by the partner state sits in the forcing term; the decay
  // rates are the constant b and the seasonal rate on the second species.
  c.a = {fmt17(gb), "1+0.6*sin(2*pi*t)"};
  c.b = {fmt17(ga), fmt17(gc)};
  c.tau = o.tau.value_or("0");
  c.F.name = negative ? "negative-gate" : "positive-gate";
  c.F.theta = th;
  if (set == 3)
    c.histories = {{0.5, 4.5}, {3.0, 1.5}};
  else if (negative)
    c.histories = {{0.02, 0.08}, {0.07, 0.03}};
  else
    c.histories = {{0.07, 0.05}, {0.01, 0.09}};
  return c;
}

SystemConfig make_negative_feedback(const ScenarioOverrides& o) {
  return make_feedback(o, true);
}
SystemConfig make_positive_feedback(const ScenarioOverrides& o) {
  return make_feedback(o, false);
}

}  // namespace

Nonlinearity make_named_nonlinearity(const std::string& name, int n,
                                     std::optional<double> theta) {
  if (name == "exp-sum-decay") {
    if (n < 1) throw ValidationError("exp-sum-decay needs n >= 1");
    return exp_sum_decay(n);
  }
  if (name == "negative-gate" || name == "positive-gate") {
    if (n != 2)
      throw ValidationError(name + " expects a two-component system");
    if (!theta)
      throw ValidationError(name + " needs the gate width theta");
    if (!(*theta > 0.0))
      throw ValidationError(name + ": theta must be positive");
    return gate_pair(name == "negative-gate", *theta);
  }
  std::string msg = "unknown nonlinearity '" + name + "'; known:";
  for (const auto& known : nonlinearity_names()) msg += " " + known;
  throw ValidationError(msg);
}

const std::vector<std::string>& nonlinearity_names() {
  static const std::vector<std::string> names = {
      "exp-sum-decay", "negative-gate", "positive-gate"};
  return names;
}

const std::vector<ScenarioDef>& scenario_registry() {
  static const std::vector<ScenarioDef> defs = [] {
    std::vector<ScenarioDef> v;

    ScenarioDef de;
    de.id = "delayed-exp";
    de.summary =
        "two-component system with sinusoidal rates and shared exponential "
        "coupling, delayed by tau";
    de.default_lambda = 0.1;
    de.default_tau = "0.1";
    de.lambda_choices = {0.1, 401.0};
    de.tau_choices = {"0.1", "5", "10"};
    de.figures = {"5.1", "5.2", "5.3", "5.4"};
    de.make = make_delayed_exp;
    v.push_back(de);

    ScenarioDef nf;
    nf.id = "negative-feedback";
    nf.summary =
        "two-species model where release of the first species falls off as "
        "the second grows";
    nf.default_lambda = 1.0;
    nf.default_tau = "0";
    nf.parameter_sets = {{0.2, 2.0, 0.02, 0.02},
                         {5.0, 4.0, 1.2, 0.5},
                         {20.0, 4.0, 8.0, 0.5}};
    nf.figures = {"4.1", "4.2", "4.4"};
    nf.make = make_negative_feedback;
    v.push_back(nf);

    ScenarioDef pf = nf;
    pf.id = "positive-feedback";
    pf.summary =
        "two-species model where release of the first species grows with "
        "the second";
    pf.figures = {"4.3", "4.4"};
    pf.make = make_positive_feedback;
    v.push_back(pf);

    return v;
  }();
  return defs;
}

const ScenarioDef& find_scenario(const std::string& id) {
  for (const auto& def : scenario_registry())
    if (def.id == id) return def;
  std::string msg = "unknown scenario '" + id + "'; known:";
  for (const auto& def : scenario_registry()) msg += " " + def.id;
  throw ValidationError(msg);
}

SystemConfig scenario_config(const std::string& id,
                             const ScenarioOverrides& o) {
  return find_scenario(id).make(o);
}

}  // namespace pdde
