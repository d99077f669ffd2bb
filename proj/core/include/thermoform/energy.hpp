#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thermoform/expression.hpp"
#include "thermoform/shift_model.hpp"

namespace thermoform {

enum class EnergyKind { linear, quadratic, power, polynomial, fully_nonlinear };

std::string_view to_string(EnergyKind kind) noexcept;

// Value and first derivatives of G(h; z).
struct EnergyJet {
  double value = 0.0;
  double d_h = 1.0;  // partial derivative in the entropy slot
  Vec d_z;
};

// G(h; z). For every kind except fully_nonlinear, G = h + F(z) with
//   linear      F = beta * direction . z
//   quadratic   F = beta |z|^2 / 2
//   power       F = -beta (-z)^alpha        (d = 1, z <= 0)
//   polynomial  F = beta * sum_i c_i z^i    (d = 1)
// A fully_nonlinear G is an Expression in z0 (the entropy) and z1..zd.
class NonlinearEnergy {
 public:
  static NonlinearEnergy linear(double beta, Vec direction = {});
  static NonlinearEnergy quadratic(double beta);
  static NonlinearEnergy power(double beta, double alpha);
  static NonlinearEnergy polynomial(std::vector<double> coeffs, double beta = 1.0);
  static NonlinearEnergy fully_nonlinear(const std::string& expr, int dim, std::map<std::string, double> params = {},
                                         std::vector<std::pair<double, double>> domain = {});

  EnergyKind kind() const { return kind_; }
  double beta() const { return beta_; }
  double alpha() const { return alpha_; }
  const Vec& direction() const { return direction_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const Expression& expression() const { return expr_; }
  const std::vector<std::pair<double, double>>& domain() const { return domain_; }
  bool potential_form() const { return kind_ != EnergyKind::fully_nonlinear; }

  // Same family member at another inverse temperature. fully_nonlinear
  // energies need a parameter named beta.
  NonlinearEnergy with_beta(double beta) const;

  // G'(h; z') = G(h; map(z')), used on reduced models.
  NonlinearEnergy composed(const AffineMap& map) const;
  bool is_composed() const { return lift_.has_value(); }

  // Dimension of the z argument (after composition).
  int input_dim(int model_dim) const;

  double value(double h, const Vec& z) const;
  EnergyJet jet(double h, const Vec& z) const;
  // F(z) = G(0; z) for potential-form energies; throws InadmissibleEnergy
  // otherwise.
  double potential_value(const Vec& z) const;

  // Structural checks against a model (dimensions, power-law domain) and, for
  // fully_nonlinear, d_h G > 0 sampled at 1024 points over [0, h_top] x hull.
  // Throws InadmissibleEnergy or BadDimensions.
  void check_admissible(const ShiftModel& model) const;

  std::string describe() const;

 private:
  EnergyJet raw_jet(double h, const Vec& z) const;

  EnergyKind kind_ = EnergyKind::quadratic;
  double beta_ = 1.0;
  double alpha_ = 1.0;
  Vec direction_;
  std::vector<double> coeffs_;
  Expression expr_;
  std::vector<std::pair<double, double>> domain_;
  std::optional<AffineMap> lift_;
};

}  // namespace thermoform
