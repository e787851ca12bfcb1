#pragma once
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pdde/config.hpp"
#include "pdde/nonlinearity.hpp"

namespace pdde {

/// Forcing terms configs may reference by name. Each carries its analytic
/// declarations (ratio limits at 0 and infinity, Lipschitz bound where
/// known), so a config using the name classifies exactly like the built-in
/// scenario that uses it. Throws when the name is unknown, the dimension
/// does not fit, or a required parameter is missing.
Nonlinearity make_named_nonlinearity(const std::string& name, int n,
                                     std::optional<double> theta);
const std::vector<std::string>& nonlinearity_names();

/// Knobs a caller may turn on a scenario. parameter_set is a 1-based row
/// into ScenarioDef::parameter_sets.
struct ScenarioOverrides {
  std::optional<double> lambda;
  std::optional<std::string> tau;
  std::optional<int> parameter_set;
};

struct ScenarioDef {
  std::string id;
  std::string summary;
  double default_lambda = 1.0;
  std::string default_tau = "0";
  /// Rows of (a, b, c, theta) for the two-species feedback families;
  /// empty for scenarios without such a table.
  std::vector<std::array<double, 4>> parameter_sets;
  /// Interesting drive strengths / delays worth reproducing.
  std::vector<double> lambda_choices;
  std::vector<std::string> tau_choices;
  /// Figure tags (see `reproduce --figure`) this scenario appears in.
  std::vector<std::string> figures;
  SystemConfig (*make)(const ScenarioOverrides&) = nullptr;
};

const std::vector<ScenarioDef>& scenario_registry();

/// Lookup by id; unknown ids raise ValidationError listing all known ids.
const ScenarioDef& find_scenario(const std::string& id);

SystemConfig scenario_config(const std::string& id,
                             const ScenarioOverrides& o = {});

}  // namespace pdde
