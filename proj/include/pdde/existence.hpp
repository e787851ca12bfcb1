#pragma once
#include <optional>
#include <string>
#include <vector>

#include "pdde/system.hpp"

namespace pdde {

/// All scalar quantities the solution-count classification consumes.
/// sigma_i = exp(-mean(a_i) * omega); gamma and chi are the kernel-bound
/// aggregates min_i b_i_mean*omega/(1/sigma_i - 1) and
/// sum_i b_i_mean*omega*(1/sigma_i)/(1/sigma_i - 1).
struct Thresholds {
  std::vector<double> sigma_i;
  double sigma = 0.0;
  double gamma = 0.0;
  double chi = 0.0;
  double M1 = 0.0;  // max of components over the unit l1 ball
  double m1 = 0.0;  // min of components over the annulus sigma <= |x| <= 1
  LimitValue F0;
  LimitValue Finf;
  int i0 = 0;    // zeros among {F0, Finf}
  int iinf = 0;  // infinities among {F0, Finf}
  bool Mm_sampled = false;
  bool limits_estimated = false;
};

std::pair<std::vector<double>, double> compute_sigma(const DelaySystemSpec& sys);
std::pair<double, double> compute_gamma_chi(const DelaySystemSpec& sys);

struct MmEstimate {
  double M = 0.0;
  double m = 0.0;
  bool sampled = false;
};

/// Extremes of the components over the l1 ball of radius r (for M) and the
/// annulus sigma*r <= |x| <= r (for m). Declared analytic forms win;
/// otherwise a deterministic radius-by-direction grid including all
/// endpoints and simplex vertices, about `samples` points per component.
MmEstimate estimate_M_m(const Nonlinearity& f, double r, double sigma,
                        int samples = 4096);

struct LimitEstimate {
  /// One entry per component; nullopt marks an inconclusive trend the
  /// caller must resolve by declaring the limit.
  std::vector<std::optional<LimitValue>> at_zero;
  std::vector<std::optional<LimitValue>> at_infinity;
  bool estimated = true;
};

inline const std::vector<double>& default_limit_radii() {
  static const std::vector<double> radii = {1e-9, 1e-8, 1e-7, 1e5, 1e6, 1e7};
  return radii;
}

/// Ratio-trend classification of f_i(x)/|x| at 0 and at infinity from
/// direction-averaged samples. Radii must contain at least three values
/// <= 1e-3 and three values >= 1e3. Decision rule at each end, applied to
/// the three extreme radii: finite when the ratios agree within 5%
/// relative; zero when all are below 1e-4 trending down toward the end;
/// infinite when all are above 1e4 trending up toward the end.
LimitEstimate estimate_limits(const Nonlinearity& f, int directions = 16,
                              const std::vector<double>& radii = default_limit_radii());

/// Assembles every threshold. Declared limits are used verbatim; estimated
/// ones that stay inconclusive raise ValidationError naming the components
/// that must be declared.
Thresholds compute_thresholds(const DelaySystemSpec& sys, int samples = 4096);

enum class SolutionCount { Zero = 0, One = 1, Two = 2, Unknown = -1 };

/// Open interval of lambda values with a known positive-solution count.
/// hi may be +infinity. Source names the classification rule that decided
/// the interval; "none" marks uncovered gaps.
struct LambdaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = true;
  bool hi_open = true;
  SolutionCount count = SolutionCount::Unknown;
  std::string source;
};

struct ExistenceReport {
  Thresholds thresholds;
  std::vector<LambdaInterval> intervals;
  double lambda = 0.0;
  SolutionCount verdict = SolutionCount::Unknown;
};

/// Decomposes (0, inf) into maximal intervals of known solution count,
/// with unknown gaps kept explicit, and evaluates the verdict at
/// sys.lambda. Exact interval endpoints classify as unknown.
ExistenceReport classify(const DelaySystemSpec& sys, const Thresholds& th);

/// Count at one lambda; Unknown at endpoints and uncovered gaps.
SolutionCount verdict_for_lambda(const ExistenceReport& report, double lambda);

std::string to_json(const ExistenceReport& report);

}  // namespace pdde
