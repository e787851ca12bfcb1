#pragma once
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdde {

enum class LimitKind { Zero, Finite, Infinite };

/// Classified value of f(x)/|x| as |x| tends to 0 or infinity.
struct LimitValue {
  LimitKind kind = LimitKind::Finite;
  double value = 0.0;

  static LimitValue zero() { return {LimitKind::Zero, 0.0}; }
  static LimitValue finite(double v) { return {LimitKind::Finite, v}; }
  static LimitValue infinite() { return {LimitKind::Infinite, 0.0}; }
  bool is_zero() const { return kind == LimitKind::Zero; }
  bool is_finite() const { return kind == LimitKind::Finite; }
  bool is_infinite() const { return kind == LimitKind::Infinite; }
};

/// Larger/smaller in the ordering zero < finite(v) < finite(w>v) < infinite.
LimitValue limit_max(const LimitValue& a, const LimitValue& b);
LimitValue limit_min(const LimitValue& a, const LimitValue& b);
std::string to_string(const LimitValue& v);

struct ComponentLimits {
  LimitValue at_zero;
  LimitValue at_infinity;
};

/// Forcing term F: componentwise maps from the nonnegative orthant to
/// nonnegative reals. Norms on the argument are l1 throughout. Optional
/// analytic declarations take precedence over sampling-based estimation:
///  - declared_limits: ratio classes of each component at 0 and infinity
///  - declared_lipschitz: ball radius L -> Lipschitz constant K_L
///  - declared_M / declared_m: r -> extreme values over ball / annulus
///  - c1, c2: global bounds c1*|x| <= f_i(x) <= c2*|x| (never estimated)
struct Nonlinearity {
  int n = 1;
  std::vector<std::function<double(std::span<const double>)>> components;
  std::optional<std::vector<ComponentLimits>> declared_limits;
  std::optional<std::function<double(double)>> declared_lipschitz;
  std::optional<std::function<double(double)>> declared_M;
  std::optional<std::function<double(double)>> declared_m;
  std::optional<double> c1;
  std::optional<double> c2;

  double operator()(int i, std::span<const double> x) const {
    return components[i](x);
  }
};

/// Deterministic interior samples across scales; throws ValidationError if a
/// component evaluates non-positive at a strictly positive point. Axis
/// boundaries are deliberately not sampled.
void spot_check_positivity(const Nonlinearity& f, int samples = 256);

/// Deterministic direction set on the unit l1 simplex: vertices, centroid,
/// then a low-discrepancy fill. Always returns at least n+1 directions.
std::vector<std::vector<double>> simplex_directions(int n, int count);

}  // namespace pdde
