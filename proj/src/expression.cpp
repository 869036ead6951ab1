#include "fountain/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>

namespace fountain {

namespace {

using Op = Expression::Op;
using Instr = Expression::Instr;

const std::map<std::string, Op>& functions() {
  static const std::map<std::string, Op> f{{"abs", Op::abs}, {"sqrt", Op::sqrt}, {"exp", Op::exp},
                                           {"log", Op::log}, {"sin", Op::sin},   {"cos", Op::cos},
                                           {"tan", Op::tan}};
  return f;
}

class Parser {
 public:
  Parser(const std::string& s, int dim) : s_(s), dim_(dim) {}

  std::vector<Instr> run() {
    expr();
    skip();
    if (pos_ != s_.size()) throw ExpressionError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
    return std::move(out_);
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void emit(Op op, double v = 0.0, int i = 0) { out_.push_back({op, v, i}); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::add);
      } else if (accept('-')) {
        term();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }
  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Op::mul);
      } else if (accept('/')) {
        unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }
  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }
  void power() {
    primary();
    if (accept('^')) {
      unary();
      emit(Op::pow);
    }
  }
  void primary() {
    skip();
    if (pos_ >= s_.size()) throw ExpressionError("unexpected end of expression", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      if (!accept(')')) throw ExpressionError("expected ')'", pos_);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      identifier();
      return;
    }
    throw ExpressionError("unexpected '" + std::string(1, c) + "'", pos_);
  }
  void number() {
    const std::size_t start = pos_;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) throw ExpressionError("malformed number", start);
    pos_ = static_cast<std::size_t>(end - s_.data());
    emit(Op::number, v);
  }
  void identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (const auto f = functions().find(name); f != functions().end()) {
      if (!accept('(')) throw ExpressionError("expected '(' after " + name, pos_);
      expr();
      if (!accept(')')) throw ExpressionError("expected ')'", pos_);
      emit(f->second);
      return;
    }
    if (name == "pi") return emit(Op::number, std::numbers::pi);
    if (name == "t") return emit(Op::time);
    if (name == "T") return emit(Op::period);
    if (name == "r") return emit(Op::radius);
    if (name == "u" && dim_ == 1) return emit(Op::state, 0.0, 0);
    if (name.size() > 1 && name[0] == 'u') {
      int i = 0;
      const auto [end, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), i);
      if (ec == std::errc() && end == name.data() + name.size() && i >= 1 && i <= dim_)
        return emit(Op::state, 0.0, i - 1);
    }
    throw ExpressionError("unknown name '" + name + "'", start);
  }

  const std::string& s_;
  int dim_;
  std::size_t pos_ = 0;
  std::vector<Instr> out_;
};

}  // namespace

Expression Expression::parse(const std::string& text, int dim) {
  if (dim < 0) throw std::invalid_argument("expression: negative dimension");
  Expression e;
  e.text_ = text;
  e.dim_ = dim;
  e.program_ = Parser(text, dim).run();
  for (const auto& in : e.program_) {
    e.uses_time_ = e.uses_time_ || in.op == Op::time;
    e.uses_state_ = e.uses_state_ || in.op == Op::state || in.op == Op::radius;
  }
  return e;
}

double Expression::eval(double t, std::span<const double> u, double period) const {
  double stack[64] = {};
  int top = 0;
  std::vector<double> big;
  const bool small = program_.size() <= 64;
  if (!small) big.resize(program_.size());
  double* st = small ? stack : big.data();
  for (const auto& in : program_) {
    switch (in.op) {
      case Op::number: st[top++] = in.value; break;
      case Op::time: st[top++] = t; break;
      case Op::period: st[top++] = period; break;
      case Op::state: st[top++] = u[in.index]; break;
      case Op::radius: {
        double s = 0.0;
        for (double x : u) s += x * x;
        st[top++] = std::sqrt(s);
        break;
      }
      case Op::add: --top; st[top - 1] += st[top]; break;
      case Op::sub: --top; st[top - 1] -= st[top]; break;
      case Op::mul: --top; st[top - 1] *= st[top]; break;
      case Op::div: --top; st[top - 1] /= st[top]; break;
      case Op::pow: --top; st[top - 1] = std::pow(st[top - 1], st[top]); break;
      case Op::neg: st[top - 1] = -st[top - 1]; break;
      case Op::abs: st[top - 1] = std::abs(st[top - 1]); break;
      case Op::sqrt: st[top - 1] = std::sqrt(st[top - 1]); break;
      case Op::exp: st[top - 1] = std::exp(st[top - 1]); break;
      case Op::log: st[top - 1] = std::log(st[top - 1]); break;
      case Op::sin: st[top - 1] = std::sin(st[top - 1]); break;
      case Op::cos: st[top - 1] = std::cos(st[top - 1]); break;
      case Op::tan: st[top - 1] = std::tan(st[top - 1]); break;
    }
  }
  return st[0];
}

double Expression::eval() const {
  if (uses_time_ || uses_state_) throw std::invalid_argument("expression '" + text_ + "' is not constant");
  for (const auto& in : program_)
    if (in.op == Op::period) throw std::invalid_argument("expression '" + text_ + "' is not constant");
  return eval(0.0, {}, 0.0);
}

double parse_number(const std::string& text) { return Expression::parse(text, 0).eval(); }

Potential expression_potential(const std::string& w, const std::vector<std::string>& gradient, int dim,
                               double period, bool even) {
  if (dim < 1) throw std::invalid_argument("expression potential: dimension must be positive");
  if (!gradient.empty() && static_cast<int>(gradient.size()) != dim)
    throw std::invalid_argument("expression potential: gradW needs " + std::to_string(dim) + " components, got " +
                                std::to_string(gradient.size()));
  const auto W = std::make_shared<Expression>(Expression::parse(w, dim));
  Potential p;
  p.name = "expression: " + w;
  p.dim = dim;
  p.even = even;
  p.autonomous = !W->uses_time();
  p.value = [W, period](double t, std::span<const double> u) { return W->eval(t, u, period); };
  if (gradient.empty()) {
    p.gradient = finite_difference_gradient(p.value, dim);
  } else {
    std::vector<Expression> g;
    for (const auto& s : gradient) {
      g.push_back(Expression::parse(s, dim));
      p.autonomous = p.autonomous && !g.back().uses_time();
    }
    p.gradient = [g = std::move(g), period](double t, std::span<const double> u, std::span<double> out) {
      for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i].eval(t, u, period);
    };
  }
  return p;
}

}  // namespace fountain
