#include "pdde/existence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "pdde/errors.hpp"

namespace pdde {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double checked_component(const Nonlinearity& f, int i,
                         std::span<const double> x, double radius) {
  double v = f(i, x);
  if (!std::isfinite(v)) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "nonlinearity component %d non-finite at sample of norm %.6g",
                  i + 1, radius);
    throw NumericalError(buf);
  }
  return v;
}

/// v123 ordered by ascending radius. Classifies the ratio trend at one end.
std::optional<LimitValue> classify_trend(double v1, double v2, double v3,
                                         bool zero_end) {
  double mx = std::max({v1, v2, v3});
  double mn = std::min({v1, v2, v3});
  if (mx == 0.0) return LimitValue::zero();
  if (mn > 0.0 && mx / mn <= 1.05)
    return LimitValue::finite((v1 + v2 + v3) / 3.0);
  bool up = v1 < v2 && v2 < v3;    // grows with radius
  bool down = v1 > v2 && v2 > v3;  // shrinks with radius
  if (zero_end) {
    if (mx < 1e-4 && up) return LimitValue::zero();
    if (mn > 1e4 && down) return LimitValue::infinite();
  } else {
    if (mx < 1e-4 && down) return LimitValue::zero();
    if (mn > 1e4 && up) return LimitValue::infinite();
  }
  return std::nullopt;
}

struct Row {
  double lo, hi;
  SolutionCount count;
  const char* source;
};

}  // namespace

std::pair<std::vector<double>, double> compute_sigma(const DelaySystemSpec& sys) {
  validate_for_existence(sys);
  std::vector<double> sigma_i(sys.n);
  double sigma = kInf;
  for (int i = 0; i < sys.n; ++i) {
    sigma_i[i] = std::exp(-average(sys.a[i], sys.quadrature) * sys.omega);
    sigma = std::min(sigma, sigma_i[i]);
  }
  return {sigma_i, sigma};
}

std::pair<double, double> compute_gamma_chi(const DelaySystemSpec& sys) {
  auto [sigma_i, sigma] = compute_sigma(sys);
  double gamma = kInf, chi = 0.0;
  for (int i = 0; i < sys.n; ++i) {
    double bbar = average(sys.b[i], sys.quadrature);
    double inv = 1.0 / sigma_i[i];
    gamma = std::min(gamma, bbar * sys.omega / (inv - 1.0));
    chi += bbar * sys.omega * inv / (inv - 1.0);
  }
  return {gamma, chi};
}

MmEstimate estimate_M_m(const Nonlinearity& f, double r, double sigma,
                        int samples) {
  if (!(r > 0.0)) throw ValidationError("estimate_M_m: r must be positive");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw ValidationError("estimate_M_m: sigma must lie in (0, 1)");
  if (f.declared_M && f.declared_m)
    return {(*f.declared_M)(r), (*f.declared_m)(r), false};

  const int nr = 64;
  const int nd = std::max(2, samples / nr);
  auto dirs = simplex_directions(f.n, nd);
  std::vector<double> x(f.n);

  double M = -kInf;
  for (int k = 0; k < nr; ++k) {
    double rad = r * k / (nr - 1);  // ball radii include 0 and r
    for (const auto& d : dirs) {
      for (int i = 0; i < f.n; ++i) x[i] = rad * d[i];
      for (int i = 0; i < f.n; ++i)
        M = std::max(M, checked_component(f, i, x, rad));
    }
  }
  double m = kInf;
  for (int k = 0; k < nr; ++k) {
    double rad = sigma * r + (r - sigma * r) * k / (nr - 1);
    for (const auto& d : dirs) {
      for (int i = 0; i < f.n; ++i) x[i] = rad * d[i];
      for (int i = 0; i < f.n; ++i)
        m = std::min(m, checked_component(f, i, x, rad));
    }
  }
  return {M, m, true};
}

LimitEstimate estimate_limits(const Nonlinearity& f, int directions,
                              const std::vector<double>& radii) {
  std::vector<double> sorted(radii);
  std::sort(sorted.begin(), sorted.end());
  int small = 0, large = 0;
  for (double r : sorted) {
    if (!(r > 0.0)) throw ValidationError("estimate_limits: radii must be positive");
    if (r <= 1e-3) ++small;
    if (r >= 1e3) ++large;
  }
  if (small < 3 || large < 3)
    throw ValidationError(
        "estimate_limits: need at least three radii <= 1e-3 and three >= 1e3");

  auto dirs = simplex_directions(f.n, directions);
  std::vector<double> x(f.n);
  auto ratio = [&](int i, double rad) {
    double acc = 0.0;
    for (const auto& d : dirs) {
      for (int j = 0; j < f.n; ++j) x[j] = rad * d[j];
      acc += checked_component(f, i, x, rad) / rad;
    }
    return acc / dirs.size();
  };

  LimitEstimate out;
  out.at_zero.resize(f.n);
  out.at_infinity.resize(f.n);
  size_t last = sorted.size() - 1;
  for (int i = 0; i < f.n; ++i) {
    out.at_zero[i] = classify_trend(ratio(i, sorted[0]), ratio(i, sorted[1]),
                                    ratio(i, sorted[2]), true);
    out.at_infinity[i] =
        classify_trend(ratio(i, sorted[last - 2]), ratio(i, sorted[last - 1]),
                       ratio(i, sorted[last]), false);
  }
  return out;
}

Thresholds compute_thresholds(const DelaySystemSpec& sys, int samples) {
  validate_for_existence(sys);
  spot_check_positivity(sys.F);

  Thresholds th;
  std::tie(th.sigma_i, th.sigma) = compute_sigma(sys);
  std::tie(th.gamma, th.chi) = compute_gamma_chi(sys);

  MmEstimate mm = estimate_M_m(sys.F, 1.0, th.sigma, samples);
  th.M1 = mm.M;
  th.m1 = mm.m;
  th.Mm_sampled = mm.sampled;

  std::vector<LimitValue> at_zero(sys.n), at_inf(sys.n);
  if (sys.F.declared_limits) {
    if (static_cast<int>(sys.F.declared_limits->size()) != sys.n)
      throw ValidationError("declared limits must cover every component");
    for (int i = 0; i < sys.n; ++i) {
      at_zero[i] = (*sys.F.declared_limits)[i].at_zero;
      at_inf[i] = (*sys.F.declared_limits)[i].at_infinity;
    }
    th.limits_estimated = false;
  } else {
    LimitEstimate est = estimate_limits(sys.F);
    std::string missing;
    for (int i = 0; i < sys.n; ++i) {
      if (!est.at_zero[i] || !est.at_infinity[i]) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%scomponent %d at %s",
                      missing.empty() ? "" : ", ", i + 1,
                      !est.at_zero[i] ? "zero" : "infinity");
        missing += buf;
      }
    }
    if (!missing.empty())
      throw ValidationError(
          "limit trend inconclusive; declare limits for: " + missing);
    for (int i = 0; i < sys.n; ++i) {
      at_zero[i] = *est.at_zero[i];
      at_inf[i] = *est.at_infinity[i];
    }
    th.limits_estimated = true;
  }

  th.F0 = at_zero[0];
  th.Finf = at_inf[0];
  for (int i = 1; i < sys.n; ++i) {
    th.F0 = limit_max(th.F0, at_zero[i]);
    th.Finf = limit_max(th.Finf, at_inf[i]);
  }
  th.i0 = (th.F0.is_zero() ? 1 : 0) + (th.Finf.is_zero() ? 1 : 0);
  th.iinf = (th.F0.is_infinite() ? 1 : 0) + (th.Finf.is_infinite() ? 1 : 0);
  return th;
}

ExistenceReport classify(const DelaySystemSpec& sys, const Thresholds& th) {
  std::vector<Row> rows;
  if (th.i0 >= 1 && th.m1 > 0.0 && th.gamma > 0.0)
    rows.push_back({1.0 / (th.m1 * th.gamma), kInf,
                    th.i0 == 1 ? SolutionCount::One : SolutionCount::Two,
                    "large-lambda-multiplicity"});
  if (th.iinf >= 1 && th.M1 > 0.0 && th.chi > 0.0)
    rows.push_back({0.0, 1.0 / (th.M1 * th.chi),
                    th.iinf == 1 ? SolutionCount::One : SolutionCount::Two,
                    "small-lambda-multiplicity"});
  if (th.i0 == 1 && th.iinf == 1)
    rows.push_back({0.0, kInf, SolutionCount::One, "all-lambda-existence"});
  if (sys.F.c1) {
    if (!(*sys.F.c1 > 0.0))
      throw ValidationError("declared c1 must be positive");
    rows.push_back({1.0 / (th.sigma * th.gamma * *sys.F.c1), kInf,
                    SolutionCount::Zero, "linear-lower-bound"});
  }
  if (sys.F.c2) {
    if (!(*sys.F.c2 > 0.0))
      throw ValidationError("declared c2 must be positive");
    rows.push_back({0.0, 1.0 / (*sys.F.c2 * th.chi), SolutionCount::Zero,
                    "linear-upper-bound"});
  }
  if (th.i0 == 0 && th.iinf == 0) {
    if (!th.F0.is_finite() || !th.Finf.is_finite())
      throw ValidationError(
          "classification requires finite limit values when no limit is zero "
          "or infinite; declare F0 and Finf");
    double mx = std::max(th.F0.value, th.Finf.value);
    double mn = std::min(th.F0.value, th.Finf.value);
    double lo = 1.0 / (th.sigma * th.gamma * mx);
    double hi = 1.0 / (th.chi * mn);
    if (lo < hi)
      rows.push_back({lo, hi, SolutionCount::One, "finite-limit-window"});
  }

  // elementary decomposition of (0, inf) at every stated threshold
  std::vector<double> cuts{0.0};
  for (const auto& row : rows) {
    if (row.lo > 0.0 && std::isfinite(row.lo)) cuts.push_back(row.lo);
    if (std::isfinite(row.hi)) cuts.push_back(row.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) {
                           return std::abs(x - y) <= 1e-12 * std::max(x, y);
                         }),
             cuts.end());
  cuts.push_back(kInf);

  ExistenceReport report;
  report.thresholds = th;
  report.lambda = sys.lambda;

  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    double lo = cuts[k], hi = cuts[k + 1];
    double probe = std::isfinite(hi) ? 0.5 * (lo + hi) : (lo > 0 ? 2 * lo + 1 : 1.0);
    SolutionCount count = SolutionCount::Unknown;
    std::string sources;
    for (const auto& row : rows) {
      if (!(row.lo < probe && probe < row.hi)) continue;
      if (count == SolutionCount::Unknown) {
        count = row.count;
      } else if (count != row.count) {
        throw ValidationError(
            std::string("inconsistent classification: rules '") + row.source +
            "' and '" + sources + "' disagree on a lambda range");
      }
      if (!sources.empty()) sources += ";";
      sources += row.source;
    }
    if (sources.empty()) sources = "none";
    LambdaInterval iv{lo, hi, true, true, count, sources};
    if (!report.intervals.empty() &&
        report.intervals.back().count == iv.count &&
        report.intervals.back().source == iv.source) {
      report.intervals.back().hi = iv.hi;  // merge equal neighbours
    } else {
      report.intervals.push_back(iv);
    }
  }

  report.verdict = verdict_for_lambda(report, sys.lambda);
  return report;
}

SolutionCount verdict_for_lambda(const ExistenceReport& report, double lambda) {
  if (!(lambda > 0.0))
    throw ValidationError("verdict_for_lambda: lambda must be positive");
  for (const auto& iv : report.intervals) {
    if (iv.lo < lambda && lambda < iv.hi) return iv.count;
  }
  return SolutionCount::Unknown;  // sits exactly on a threshold
}

std::string to_json(const ExistenceReport& report) {
  nlohmann::json j;
  const Thresholds& th = report.thresholds;
  auto limit_json = [](const LimitValue& v) {
    nlohmann::json lj;
    switch (v.kind) {
      case LimitKind::Zero: lj["class"] = "zero"; break;
      case LimitKind::Infinite: lj["class"] = "infinite"; break;
      case LimitKind::Finite:
        lj["class"] = "finite";
        lj["value"] = v.value;
        break;
    }
    return lj;
  };
  j["thresholds"] = {
      {"sigma_i", th.sigma_i},
      {"sigma", th.sigma},
      {"gamma", th.gamma},
      {"chi", th.chi},
      {"M1", th.M1},
      {"m1", th.m1},
      {"F0", limit_json(th.F0)},
      {"Finf", limit_json(th.Finf)},
      {"i0", th.i0},
      {"iinf", th.iinf},
      {"Mm_source", th.Mm_sampled ? "sampled" : "declared"},
      {"limits_source", th.limits_estimated ? "estimated" : "declared"},
  };
  j["intervals"] = nlohmann::json::array();
  for (const auto& iv : report.intervals) {
    nlohmann::json ij;
    ij["lo"] = iv.lo;
    ij["hi"] = std::isfinite(iv.hi) ? nlohmann::json(iv.hi) : nlohmann::json();
    ij["lo_open"] = iv.lo_open;
    ij["hi_open"] = iv.hi_open;
    ij["count"] = iv.count == SolutionCount::Unknown
                      ? nlohmann::json("unknown")
                      : nlohmann::json(static_cast<int>(iv.count));
    ij["source"] = iv.source;
    j["intervals"].push_back(ij);
  }
  j["lambda"] = report.lambda;
  j["verdict"] = report.verdict == SolutionCount::Unknown
                     ? nlohmann::json("unknown")
                     : nlohmann::json(static_cast<int>(report.verdict));
  return j.dump(2);
}

}  // namespace pdde
