#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace thermoform {

namespace detail {
struct ExprNode;
}

// Arithmetic expression over variables z0..z<n-1> and named parameters.
// Grammar: + - * / ^ (right associative), unary minus, parentheses, numbers,
// and the functions exp log sqrt abs sin cos tanh. Parse errors throw
// InvalidInput.
class Expression {
 public:
  Expression() = default;
  Expression(const std::string& source, int variable_count, const std::map<std::string, double>& params);

  const std::string& source() const { return source_; }
  int variable_count() const { return variable_count_; }
  bool uses_parameter(const std::string& name) const;
  void set_parameter(const std::string& name, double value);
  const std::map<std::string, double>& parameters() const { return params_; }

  double value(const double* vars) const;
  // Value and exact gradient with respect to the variables (forward mode).
  double gradient(const double* vars, double* grad) const;

 private:
  std::string source_;
  int variable_count_ = 0;
  std::map<std::string, double> params_;
  std::vector<std::string> used_params_;
  std::shared_ptr<const detail::ExprNode> root_;
};

}  // namespace thermoform
