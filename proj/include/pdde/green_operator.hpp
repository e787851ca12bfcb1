#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "pdde/system.hpp"
#include "pdde/trajectory.hpp"

namespace pdde {

/// Per-system tables: the antiderivative of each a_i and the derived decay
/// factors. Shared by kernel evaluation, the integral operator and the
/// stability integrals.
class KernelContext {
 public:
  explicit KernelContext(const DelaySystemSpec& sys);

  /// Integral of a_i from t to s.
  double exponent(int i, double t, double s) const;
  /// G_i(t, s) = exp(int_t^s a_i) / (1/sigma_i - 1), for t <= s <= t+omega.
  double green(int i, double t, double s) const;

  double sigma(int i) const { return sigma_[i]; }
  const std::vector<double>& sigma_all() const { return sigma_; }
  double lower_bound(int i) const { return lower_[i]; }
  double upper_bound(int i) const { return upper_[i]; }
  const CumulativeIntegral& antiderivative(int i) const { return acc_[i]; }

 private:
  std::vector<CumulativeIntegral> acc_;
  std::vector<double> sigma_, lower_, upper_;
};

/// Kernel value without a prebuilt context.
double green_kernel(const DelaySystemSpec& sys, int i, double t, double s);

/// One application of the periodic-solution integral operator
///   (T x)_i(t) = lambda * int_t^{t+omega} G_i(t,s) b_i(s) f_i(x(s - tau(s))) ds
/// evaluated on the trajectory grid. When the quadrature lattice aligns
/// with the grid the kernel and b_i * f_i values are shared across grid
/// points; otherwise every grid point integrates independently. Negative
/// integrand components are rejected.
PeriodicTrajectory apply_T(const DelaySystemSpec& sys, const KernelContext& ctx,
                           const PeriodicTrajectory& x);
PeriodicTrajectory apply_T(const DelaySystemSpec& sys,
                           const PeriodicTrajectory& x);

/// Single-component operator value at an arbitrary time point.
double apply_T_at(const DelaySystemSpec& sys, const KernelContext& ctx,
                  const PeriodicTrajectory& x, int i, double t);

struct ConeCheck {
  bool ok = false;
  /// min over i,t of x_i(t) - sigma_i * sup x_i; negative means outside.
  double worst_margin = 0.0;
};

/// Membership in the cone {x : x_i(t) >= sigma_i * sup |x_i|}, with slack
/// tol for grid rounding.
ConeCheck cone_membership(const PeriodicTrajectory& x,
                          std::span<const double> sigma_i, double tol = 1e-10);

struct FixedPointResult {
  PeriodicTrajectory solution;
  double residual_operator = 0.0;  // sup |T x - x|
  double residual_ode = 0.0;       // sup of the differential-equation defect
  int iterations = 0;
  bool converged = false;
  bool cone_ok = false;
};

/// Damped Picard iteration x <- (1-d) x + d T x, stopping when the
/// undamped residual sup|Tx - x| drops to tol. Returns the iterate with
/// the smallest measured residual, so a run that approaches a repelling
/// fixed point and escapes still hands back its closest pass. Norm
/// overflow past 1e12 stops the loop; non-finite iterates raise
/// NumericalError.
FixedPointResult solve_fixed_point(const DelaySystemSpec& sys,
                                   const PeriodicTrajectory& x0,
                                   double tol = 1e-10, int max_iter = 400,
                                   double damping = 0.5);

/// Defect sup_j |x'(t_j) + a_i x_i - lambda b_i f_i(x(. - tau))| measured
/// with fourth-order centered differences on the grid.
double ode_residual(const DelaySystemSpec& sys, const PeriodicTrajectory& x);

/// Deterministic cone elements of prescribed norm r: per component a
/// Fourier-bump shape rescaled into [sigma_i, 1] times a random positive
/// weight; weights normalized so the norms of the components sum to r.
std::vector<PeriodicTrajectory> sample_cone_elements(const DelaySystemSpec& sys,
                                                     double r, int count,
                                                     std::uint64_t seed = 2026);

struct BoundCheckReport {
  int elements = 0;
  double radius = 0.0;
  double lower = 0.0;          // lambda * gamma * m(r)
  double upper = 0.0;          // lambda * chi * M(r)
  double worst_lower_slack = 0.0;  // min over elements of |Tx| - lower
  double worst_upper_slack = 0.0;  // min over elements of upper - |Tx|
  int violations = 0;
  bool ok = false;
  std::string witness;  // first failing element, if any
};

/// Sandwich check lambda*gamma*m(r) <= |T x| <= lambda*chi*M(r) over
/// sampled cone elements of norm r. Slack below -tol counts as violation.
BoundCheckReport operator_bound_checks(const DelaySystemSpec& sys, double r,
                                       int count = 50, double tol = 1e-8);

}  // namespace pdde
