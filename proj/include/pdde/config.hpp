#pragma once
#include <optional>
#include <string>
#include <vector>

#include "pdde/system.hpp"

namespace pdde {

/// Forcing-term description: either a named library entry (which carries
/// its analytic declarations) or one expression per component over the
/// state variables x1..xn.
struct NonlinearityConfig {
  std::string name;
  std::optional<double> theta;
  std::vector<std::string> components;
  std::optional<double> lipschitz;
};

/// Serializable description of one system plus optional run settings.
/// Coefficients and the delay are expressions over t; see parse_expression
/// for the grammar. All expressions must repeat with period omega.
struct SystemConfig {
  int n = 1;
  double omega = 1.0;
  double lambda = 1.0;
  std::vector<std::string> a;
  std::vector<std::string> b;
  std::string tau = "0";
  NonlinearityConfig F;
  std::vector<std::vector<double>> histories;
  std::optional<double> t_end;
  std::optional<double> dt;
};

/// Parses and validates a JSON config document. Structural problems are
/// collected and reported together, one line per offending field; the
/// coefficient-positivity requirements are checked on the built system.
SystemConfig parse_config(const std::string& json_text);

/// parse_config on the contents of a file.
SystemConfig load_config(const std::string& path);

/// Canonical JSON form; parse_config(config_to_json(c)) reproduces c.
std::string config_to_json(const SystemConfig& c);

/// Compiles the expressions into a runnable system description.
DelaySystemSpec build_system(const SystemConfig& c);

}  // namespace pdde
