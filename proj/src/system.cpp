#include "pdde/system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pdde/errors.hpp"

namespace pdde {

void validate_for_existence(const DelaySystemSpec& sys) {
  std::string problems;
  auto add = [&problems](const std::string& p) {
    if (!problems.empty()) problems += "; ";
    problems += p;
  };
  if (sys.n < 1) add("n must be >= 1");
  if (!(sys.omega > 0.0)) add("omega must be positive");
  if (static_cast<int>(sys.a.size()) != sys.n) add("a must have n entries");
  if (static_cast<int>(sys.b.size()) != sys.n) add("b must have n entries");
  if (sys.F.n != sys.n) add("nonlinearity dimension must equal n");
  if (static_cast<int>(sys.F.components.size()) != sys.F.n)
    add("nonlinearity component count must equal n");
  if (!problems.empty()) throw ValidationError("system spec: " + problems);

  char buf[96];
  for (int i = 0; i < sys.n; ++i) {
    if (sys.a[i].period != sys.omega) {
      std::snprintf(buf, sizeof buf, "a[%d] period differs from omega", i + 1);
      add(buf);
    }
    if (sys.b[i].period != sys.omega) {
      std::snprintf(buf, sizeof buf, "b[%d] period differs from omega", i + 1);
      add(buf);
    }
    double abar = average(sys.a[i], sys.quadrature);
    if (!(abar > 0.0)) {
      std::snprintf(buf, sizeof buf, "mean of a[%d] is %.6g, must be positive",
                    i + 1, abar);
      add(buf);
    }
    double bbar = average(sys.b[i], sys.quadrature);
    if (!(bbar > 0.0)) {
      std::snprintf(buf, sizeof buf, "mean of b[%d] is %.6g, must be positive",
                    i + 1, bbar);
      add(buf);
    }
  }
  if (sys.tau.period != sys.omega) add("tau period differs from omega");
  if (!problems.empty()) throw ValidationError("system spec: " + problems);
}

double max_delay(const DelaySystemSpec& sys) {
  const int samples = 1024;
  double r = 0.0;
  for (int k = 0; k <= samples; ++k) {
    double t = sys.omega * k / samples;
    r = std::max(r, sys.tau(t));
  }
  return r;
}

}  // namespace pdde
