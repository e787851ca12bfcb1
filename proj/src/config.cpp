#include "pdde/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pdde/errors.hpp"
#include "pdde/expr.hpp"
#include "pdde/scenarios.hpp"

namespace pdde {
namespace {

using nlohmann::json;

struct ErrorList {
  std::vector<std::string> items;

  void add(const std::string& field, const std::string& msg) {
    items.push_back(field + ": " + msg);
  }
  void raise_if_any() const {
    if (items.empty()) return;
    std::string out = "invalid config:";
    for (const auto& it : items) out += "\n  " + it;
    throw ValidationError(out);
  }
};

const char* type_name(const json& v) {
  if (v.is_string()) return "a string";
  if (v.is_number()) return "a number";
  if (v.is_boolean()) return "a boolean";
  if (v.is_array()) return "an array";
  if (v.is_object()) return "an object";
  return "null";
}

std::optional<double> take_positive(const json& j, const char* key,
                                    ErrorList& errs) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j.at(key);
  if (!v.is_number()) {
    errs.add(key, std::string("expected a number, got ") + type_name(v));
    return std::nullopt;
  }
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) {
    errs.add(key, "must be a positive finite number");
    return std::nullopt;
  }
  return x;
}

/// Parses one coefficient expression and checks it only uses t and repeats
/// with the stated period. Returns nullopt (after recording the reason)
/// when the string is unusable.
std::optional<Expr> check_time_expr(const std::string& src, double omega,
                                    const std::string& field, ErrorList& errs) {
  Expr e;
  try {
    e = parse_expression(src);
  } catch (const ValidationError& ex) {
    errs.add(field, ex.what());
    return std::nullopt;
  }
  if (e.max_state_index() > 0) {
    errs.add(field, "coefficient expressions may only depend on t");
    return std::nullopt;
  }
  if (omega > 0.0) {
    for (int k = 0; k < 17; ++k) {
      const double t = omega * (k + 0.31) / 17.0;
      const double here = e(t);
      const double wrapped = e(t + omega);
      if (!std::isfinite(here) || !std::isfinite(wrapped)) {
        errs.add(field, "evaluates non-finite at t = " + std::to_string(t));
        return std::nullopt;
      }
      if (std::abs(wrapped - here) > 1e-8 * (1.0 + std::abs(here))) {
        errs.add(field, "does not repeat with period " + std::to_string(omega));
        return std::nullopt;
      }
    }
  }
  return e;
}

void check_expr_list(const json& v, int n, double omega,
                     const std::string& field, ErrorList& errs,
                     std::vector<std::string>& out) {
  if (!v.is_array()) {
    errs.add(field, std::string("expected an array of ") + std::to_string(n) +
                        " expressions, got " + type_name(v));
    return;
  }
  if (int(v.size()) != n) {
    errs.add(field, "expected " + std::to_string(n) + " entries, got " +
                        std::to_string(v.size()));
    return;
  }
  for (int i = 0; i < n; ++i) {
    const std::string sub = field + "[" + std::to_string(i) + "]";
    if (!v[size_t(i)].is_string()) {
      errs.add(sub, std::string("expected a string, got ") +
                        type_name(v[size_t(i)]));
      continue;
    }
    const std::string src = v[size_t(i)].get<std::string>();
    if (check_time_expr(src, omega, sub, errs)) out.push_back(src);
  }
}

void check_nonlinearity(const json& v, int n, NonlinearityConfig& F,
                        ErrorList& errs) {
  if (!v.is_object()) {
    errs.add("nonlinearity", std::string("expected an object, got ") +
                                 type_name(v));
    return;
  }
  for (const auto& [key, val] : v.items()) {
    if (key != "name" && key != "theta" && key != "components" &&
        key != "lipschitz")
      errs.add("nonlinearity." + key, "unknown key");
  }
  const bool has_name = v.contains("name");
  const bool has_comps = v.contains("components");
  if (has_name == has_comps) {
    errs.add("nonlinearity",
             "give exactly one of 'name' or 'components'");
    return;
  }
  if (v.contains("theta")) {
    if (auto th = take_positive(v, "theta", errs)) F.theta = th;
  }
  if (v.contains("lipschitz")) {
    if (auto lip = take_positive(v, "lipschitz", errs)) F.lipschitz = lip;
  }
  if (has_name) {
    if (!v.at("name").is_string()) {
      errs.add("nonlinearity.name", "expected a string");
      return;
    }
    F.name = v.at("name").get<std::string>();
    try {
      make_named_nonlinearity(F.name, n, F.theta);
    } catch (const ValidationError& ex) {
      errs.add("nonlinearity", ex.what());
    }
    return;
  }
  const json& comps = v.at("components");
  if (!comps.is_array() || int(comps.size()) != n) {
    errs.add("nonlinearity.components",
             "expected an array of " + std::to_string(n) + " expressions");
    return;
  }
  for (int i = 0; i < n; ++i) {
    const std::string sub = "nonlinearity.components[" + std::to_string(i) + "]";
    if (!comps[size_t(i)].is_string()) {
      errs.add(sub, "expected a string");
      continue;
    }
    const std::string src = comps[size_t(i)].get<std::string>();
    try {
      Expr e = parse_expression(src);
      if (e.max_state_index() > n) {
        errs.add(sub, "references x" + std::to_string(e.max_state_index()) +
                          " but the system has " + std::to_string(n) +
                          " components");
        continue;
      }
      F.components.push_back(src);
    } catch (const ValidationError& ex) {
      errs.add(sub, ex.what());
    }
  }
}

}  // namespace

SystemConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw ValidationError(std::string("config is not valid JSON: ") + ex.what());
  }
  if (!j.is_object())
    throw ValidationError("config root must be a JSON object");

  ErrorList errs;
  for (const auto& [key, val] : j.items()) {
    static const char* known[] = {"n",   "omega",     "lambda", "a",
                                  "b",   "tau",       "nonlinearity",
                                  "histories", "t_end", "dt"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) errs.add(key, "unknown key");
  }

  SystemConfig c;
  if (!j.contains("n")) {
    errs.add("n", "required");
  } else if (!j.at("n").is_number_integer()) {
    errs.add("n", std::string("expected an integer, got ") + type_name(j.at("n")));
  } else {
    const long n = j.at("n").get<long>();
    if (n < 1 || n > 64)
      errs.add("n", "must be between 1 and 64");
    else
      c.n = int(n);
  }
  if (auto om = take_positive(j, "omega", errs)) c.omega = *om;
  if (auto la = take_positive(j, "lambda", errs)) c.lambda = *la;
  if (auto te = take_positive(j, "t_end", errs)) c.t_end = te;
  if (auto dt = take_positive(j, "dt", errs)) c.dt = dt;

  const double omega_for_checks = c.omega;
  if (!j.contains("a"))
    errs.add("a", "required");
  else
    check_expr_list(j.at("a"), c.n, omega_for_checks, "a", errs, c.a);
  if (!j.contains("b"))
    errs.add("b", "required");
  else
    check_expr_list(j.at("b"), c.n, omega_for_checks, "b", errs, c.b);

  if (j.contains("tau")) {
    if (!j.at("tau").is_string()) {
      errs.add("tau", std::string("expected an expression string, got ") +
                          type_name(j.at("tau")));
    } else {
      const std::string src = j.at("tau").get<std::string>();
      if (auto e = check_time_expr(src, omega_for_checks, "tau", errs)) {
        c.tau = src;
        double lo = 0.0;
        for (int k = 0; k <= 512; ++k) {
          lo = std::min(lo, (*e)(c.omega * k / 512.0));
        }
        if (lo < -1e-12)
          errs.add("tau", "delay must be nonnegative over the period");
      }
    }
  }

  if (!j.contains("nonlinearity"))
    errs.add("nonlinearity", "required");
  else
    check_nonlinearity(j.at("nonlinearity"), c.n, c.F, errs);

  if (j.contains("histories")) {
    const json& hs = j.at("histories");
    if (!hs.is_array()) {
      errs.add("histories", "expected an array of state vectors");
    } else {
      for (size_t k = 0; k < hs.size(); ++k) {
        const std::string sub = "histories[" + std::to_string(k) + "]";
        const json& h = hs[k];
        if (!h.is_array() || int(h.size()) != c.n) {
          errs.add(sub, "expected " + std::to_string(c.n) + " numbers");
          continue;
        }
        std::vector<double> row;
        bool ok = true;
        for (const auto& v : h) {
          if (!v.is_number() || !std::isfinite(v.get<double>())) {
            errs.add(sub, "entries must be finite numbers");
            ok = false;
            break;
          }
          row.push_back(v.get<double>());
        }
        if (ok) c.histories.push_back(std::move(row));
      }
    }
  }

  errs.raise_if_any();

  // Structure is sound; the positivity hypotheses need the built system.
  DelaySystemSpec sys = build_system(c);
  try {
    validate_for_existence(sys);
  } catch (const ValidationError& ex) {
    errs.add("coefficients", ex.what());
  }
  try {
    spot_check_positivity(sys.F, 64);
  } catch (const ValidationError& ex) {
    errs.add("nonlinearity", ex.what());
  }
  errs.raise_if_any();
  return c;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open config file " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const SystemConfig& c) {
  json j;
  j["n"] = c.n;
  j["omega"] = c.omega;
  j["lambda"] = c.lambda;
  j["a"] = c.a;
  j["b"] = c.b;
  j["tau"] = c.tau;
  json F;
  if (!c.F.name.empty()) {
    F["name"] = c.F.name;
  } else {
    F["components"] = c.F.components;
  }
  if (c.F.theta) F["theta"] = *c.F.theta;
  if (c.F.lipschitz) F["lipschitz"] = *c.F.lipschitz;
  j["nonlinearity"] = F;
  if (!c.histories.empty()) j["histories"] = c.histories;
  if (c.t_end) j["t_end"] = *c.t_end;
  if (c.dt) j["dt"] = *c.dt;
  return j.dump(2) + "\n";
}

DelaySystemSpec build_system(const SystemConfig& c) {
  DelaySystemSpec sys;
  sys.n = c.n;
  sys.omega = c.omega;
  sys.lambda = c.lambda;
  for (const auto& src : c.a)
    sys.a.push_back(periodic_from_expression(src, c.omega));
  for (const auto& src : c.b)
    sys.b.push_back(periodic_from_expression(src, c.omega));
  sys.tau = periodic_from_expression(c.tau, c.omega);
  if (!c.F.name.empty()) {
    sys.F = make_named_nonlinearity(c.F.name, c.n, c.F.theta);
  } else {
    sys.F.n = c.n;
    for (const auto& src : c.F.components) {
      Expr e = parse_expression(src);
      sys.F.components.push_back(
          [e](std::span<const double> x) { return e(0.0, x); });
    }
  }
  if (c.F.lipschitz) {
    const double k = *c.F.lipschitz;
    sys.F.declared_lipschitz = [k](double) { return k; };
  }
  return sys;
}

}  // namespace pdde
