#pragma once
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pdde/nonlinearity.hpp"
#include "pdde/periodic.hpp"
#include "pdde/trajectory.hpp"

namespace pdde {

enum class HistoryKind { Constant, ClosedForm, Sampled };

/// Initial data on [-r, 0]: one evaluator per component. Evaluation a hair
/// outside the domain (1e-9 slack) clamps to the boundary; further out it
/// throws, because a delayed lookup that far back means the window r was
/// computed wrong.
struct HistoryFn {
  int n = 1;
  double r = 0.0;
  HistoryKind kind = HistoryKind::Constant;
  std::vector<std::function<double(double)>> components;

  double operator()(int i, double s) const;
  void eval(double s, std::span<double> out) const;

  /// sum_i sup_s |phi_i(s)|, sampled on a 256-point grid per component.
  double norm() const;
};

HistoryFn constant_history(int n, std::span<const double> values, double r);

/// Wraps an evaluator defined for all s <= 0 (closed form).
HistoryFn history_from_function(int n, double r,
                                std::function<double(int, double)> g);

/// Periodic trajectory read backwards: phi(s) = x(s) for s in [-r, 0].
HistoryFn history_from_trajectory(const PeriodicTrajectory& x, double r);

/// Time-dependent functional on histories, the form the stability
/// hypotheses are stated in. Component i at time t reads the history and
/// produces one real; omega is the period of the time dependence.
struct HistoryFunctional {
  int n = 1;
  double r = 0.0;
  double omega = 1.0;
  std::vector<std::function<double(const HistoryFn&, double)>> components;
  std::optional<std::function<double(double)>> declared_lipschitz;

  double operator()(int i, const HistoryFn& phi, double t) const;
};

/// Lifts a pointwise nonlinearity to histories: component i at time t is
/// f_i(phi(-tau(t))). Carries over a declared Lipschitz bound.
HistoryFunctional delayed_pointwise(const Nonlinearity& f, const PeriodicFn& tau,
                                    double r);

/// The functional recentred on a periodic solution:
///   G_i(phi, t) = f_i(phi(-tau(t)) + x*(t-tau(t))) - f_i(x*(t-tau(t)))
/// so G(0) = 0 exactly and stability of x* becomes stability of zero.
/// A declared Lipschitz bound on f is kept: it is the modeler's assertion
/// about difference quotients, which translation does not change.
HistoryFunctional shifted_functional(const Nonlinearity& f, const PeriodicFn& tau,
                                     double r, PeriodicTrajectory x_star);

}  // namespace pdde
