#pragma once
#include <span>
#include <string>
#include <vector>

#include "pdde/periodic.hpp"

namespace pdde {

/// Compiled arithmetic expression over the time variable t and the state
/// variables x1, x2, ... Grammar: +, -, *, /, unary minus, parentheses,
/// sin, cos, exp, numeric literals, and the constant pi. Parse failures
/// carry the 1-based character position of the offending token.
class Expr {
 public:
  Expr() = default;

  double operator()(double t, std::span<const double> x) const;
  /// Evaluation without state; throws if the expression uses any x_i.
  double operator()(double t) const;

  /// Highest state index referenced (x3 -> 3); 0 for pure functions of t.
  int max_state_index() const { return max_x_; }
  const std::string& source() const { return src_; }

  /// One stack-machine step; built by the parser, consumed by eval.
  struct Instr {
    int op = 0;
    double value = 0.0;
    int index = 0;
  };

 private:
  friend Expr parse_expression(const std::string& src);

  std::vector<Instr> prog_;
  int max_x_ = 0;
  std::string src_;
};

Expr parse_expression(const std::string& src);

/// Wraps an expression of t alone as a coefficient with the stated period.
/// The source text is kept as the label so configs round-trip verbatim.
/// Throws if the expression references state variables.
PeriodicFn periodic_from_expression(const std::string& src, double period);

}  // namespace pdde
