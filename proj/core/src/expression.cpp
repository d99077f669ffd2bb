#include "thermoform/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "thermoform/error.hpp"

namespace thermoform {

namespace detail {

enum class Op { number, variable, parameter, add, sub, mul, div, pow, neg, exp, log, sqrt, abs, sin, cos, tanh };

struct ExprNode {
  Op op = Op::number;
  double number = 0.0;
  int index = 0;
  std::shared_ptr<const ExprNode> lhs, rhs;
};

}  // namespace detail

namespace {

using detail::ExprNode;
using detail::Op;
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(const std::string& src, int nvars, std::vector<std::string>& names, const std::map<std::string, double>& params)
      : src_(src), nvars_(nvars), names_(names), params_(params) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::InvalidInput, "expression '" + src_ + "' at offset " + std::to_string(pos_) + ": " + msg);
  }
  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (eat('+')) lhs = make(Op::add, lhs, term());
      else if (eat('-')) lhs = make(Op::sub, lhs, term());
      else return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (eat('*')) lhs = make(Op::mul, lhs, unary());
      else if (eat('/')) lhs = make(Op::div, lhs, unary());
      else return lhs;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make(Op::neg, unary());
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return make(Op::pow, base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<ExprNode>();
      n->number = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string word = src_.substr(start, pos_ - start);
      static const std::map<std::string, Op> functions = {{"exp", Op::exp},   {"log", Op::log}, {"sqrt", Op::sqrt},
                                                          {"abs", Op::abs},   {"sin", Op::sin}, {"cos", Op::cos},
                                                          {"tanh", Op::tanh}};
      if (auto f = functions.find(word); f != functions.end()) {
        if (!eat('(')) fail("expected '(' after " + word);
        NodePtr arg = expr();
        if (!eat(')')) fail("expected ')'");
        return make(f->second, arg);
      }
      if (word.size() > 1 && word[0] == 'z' &&
          std::all_of(word.begin() + 1, word.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        const int idx = std::atoi(word.c_str() + 1);
        if (idx >= nvars_) fail("variable " + word + " out of range");
        auto n = std::make_shared<ExprNode>();
        n->op = Op::variable;
        n->index = idx;
        return n;
      }
      if (params_.count(word)) {
        auto it = std::find(names_.begin(), names_.end(), word);
        if (it == names_.end()) {
          names_.push_back(word);
          it = names_.end() - 1;
        }
        auto n = std::make_shared<ExprNode>();
        n->op = Op::parameter;
        n->index = static_cast<int>(it - names_.begin());
        return n;
      }
      fail("unknown identifier '" + word + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& src_;
  int nvars_;
  std::vector<std::string>& names_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;
};

// Forward-mode evaluation; grad has n entries.
double eval(const ExprNode& node, const double* vars, const std::vector<double>& params, int n, double* grad) {
  auto zero = [&] { std::fill(grad, grad + n, 0.0); };
  switch (node.op) {
    case Op::number: zero(); return node.number;
    case Op::parameter: zero(); return params[node.index];
    case Op::variable: zero(); grad[node.index] = 1.0; return vars[node.index];
    default: break;
  }
  std::vector<double> ga(n), gb;
  const double a = eval(*node.lhs, vars, params, n, ga.data());
  double b = 0.0;
  if (node.rhs) {
    gb.resize(n);
    b = eval(*node.rhs, vars, params, n, gb.data());
  }
  double value = 0.0, da = 0.0, db = 0.0;
  switch (node.op) {
    case Op::add: value = a + b; da = 1.0; db = 1.0; break;
    case Op::sub: value = a - b; da = 1.0; db = -1.0; break;
    case Op::mul: value = a * b; da = b; db = a; break;
    case Op::div: value = a / b; da = 1.0 / b; db = -a / (b * b); break;
    case Op::pow:
      value = std::pow(a, b);
      da = b == 0.0 ? 0.0 : b * std::pow(a, b - 1.0);
      db = a > 0.0 ? value * std::log(a) : 0.0;
      break;
    case Op::neg: value = -a; da = -1.0; break;
    case Op::exp: value = std::exp(a); da = value; break;
    case Op::log: value = std::log(a); da = 1.0 / a; break;
    case Op::sqrt: value = std::sqrt(a); da = 0.5 / value; break;
    case Op::abs: value = std::abs(a); da = a < 0.0 ? -1.0 : 1.0; break;
    case Op::sin: value = std::sin(a); da = std::cos(a); break;
    case Op::cos: value = std::cos(a); da = -std::sin(a); break;
    case Op::tanh: value = std::tanh(a); da = 1.0 - value * value; break;
    default: break;
  }
  for (int i = 0; i < n; ++i) grad[i] = da * ga[i] + (node.rhs ? db * gb[i] : 0.0);
  return value;
}

double eval_value(const ExprNode& node, const double* vars, const std::vector<double>& params) {
  switch (node.op) {
    case Op::number: return node.number;
    case Op::parameter: return params[node.index];
    case Op::variable: return vars[node.index];
    default: break;
  }
  const double a = eval_value(*node.lhs, vars, params);
  const double b = node.rhs ? eval_value(*node.rhs, vars, params) : 0.0;
  switch (node.op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div: return a / b;
    case Op::pow: return std::pow(a, b);
    case Op::neg: return -a;
    case Op::exp: return std::exp(a);
    case Op::log: return std::log(a);
    case Op::sqrt: return std::sqrt(a);
    case Op::abs: return std::abs(a);
    case Op::sin: return std::sin(a);
    case Op::cos: return std::cos(a);
    case Op::tanh: return std::tanh(a);
    default: return 0.0;
  }
}

std::vector<double> param_values(const std::vector<std::string>& names, const std::map<std::string, double>& params) {
  std::vector<double> v;
  v.reserve(names.size());
  for (const auto& n : names) v.push_back(params.at(n));
  return v;
}

}  // namespace

Expression::Expression(const std::string& source, int variable_count, const std::map<std::string, double>& params)
    : source_(source), variable_count_(variable_count), params_(params) {
  Parser parser(source_, variable_count_, used_params_, params_);
  root_ = parser.parse();
}

bool Expression::uses_parameter(const std::string& name) const {
  return std::find(used_params_.begin(), used_params_.end(), name) != used_params_.end();
}

void Expression::set_parameter(const std::string& name, double value) {
  if (!params_.count(name)) throw Error(ErrorKind::InvalidInput, "expression has no parameter '" + name + "'");
  params_[name] = value;
}

double Expression::value(const double* vars) const {
  return eval_value(*root_, vars, param_values(used_params_, params_));
}

double Expression::gradient(const double* vars, double* grad) const {
  return eval(*root_, vars, param_values(used_params_, params_), variable_count_, grad);
}

}  // namespace thermoform
