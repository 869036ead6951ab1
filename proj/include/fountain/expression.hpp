#pragma once

#include "fountain/potential.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fountain {

class ExpressionError : public std::invalid_argument {
 public:
  ExpressionError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Arithmetic over t, u1..uN (u for u1), r = |u|, T and pi with + - * / ^,
/// unary minus and abs sqrt exp log sin cos tan. Compiled once to a stack
/// program.
class Expression {
 public:
  static Expression parse(const std::string& text, int dim);

  double eval(double t, std::span<const double> u, double period) const;
  /// Constant expressions only (pi and numbers).
  double eval() const;

  const std::string& text() const { return text_; }
  bool uses_time() const { return uses_time_; }
  bool uses_state() const { return uses_state_; }

  enum class Op : unsigned char {
    number, time, state, radius, period, add, sub, mul, div, pow, neg,
    abs, sqrt, exp, log, sin, cos, tan
  };
  struct Instr {
    Op op;
    double value = 0.0;
    int index = 0;
  };

 private:
  std::string text_;
  int dim_ = 0;
  std::vector<Instr> program_;
  bool uses_time_ = false;
  bool uses_state_ = false;
};

/// Evaluates a number that may be written as a constant expression ("2*pi").
double parse_number(const std::string& text);

/// W from an expression. With `gradient` empty the gradient is by central
/// differences; otherwise it needs one expression per component.
Potential expression_potential(const std::string& w, const std::vector<std::string>& gradient, int dim,
                               double period, bool even);

}  // namespace fountain
