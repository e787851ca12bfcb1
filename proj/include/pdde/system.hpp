#pragma once
#include <vector>

#include "pdde/nonlinearity.hpp"
#include "pdde/periodic.hpp"

namespace pdde {

/// One delay system x'(t) = -A(t) x(t) + lambda B(t) F(x(t - tau(t))) with
/// A = diag(a_i), B = diag(b_i), all coefficients omega-periodic.
struct DelaySystemSpec {
  int n = 1;
  std::vector<PeriodicFn> a;
  std::vector<PeriodicFn> b;
  Nonlinearity F;
  PeriodicFn tau;
  double omega = 1.0;
  double lambda = 1.0;
  QuadratureRule quadrature;
};

/// Coefficient sanity needed by the periodic-solution theory: positive
/// averages of every a_i and b_i, shared period. Throws ValidationError
/// listing every violated field. Positivity of F is spot-checked separately.
void validate_for_existence(const DelaySystemSpec& sys);

/// Largest delay over one period (dense sampling).
double max_delay(const DelaySystemSpec& sys);

}  // namespace pdde
