#include "thermoform/energy.hpp"

#include <cmath>
#include <cstdio>

#include "thermoform/error.hpp"

namespace thermoform {

std::string_view to_string(EnergyKind kind) noexcept {
  switch (kind) {
    case EnergyKind::linear: return "linear";
    case EnergyKind::quadratic: return "quadratic";
    case EnergyKind::power: return "power";
    case EnergyKind::polynomial: return "polynomial";
    case EnergyKind::fully_nonlinear: return "fully_nonlinear";
  }
  return "unknown";
}

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, std::string(what) + " must be finite");
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

}  // namespace

NonlinearEnergy NonlinearEnergy::linear(double beta, Vec direction) {
  require_finite(beta, "beta");
  if (direction.size() > 0 && !direction.allFinite())
    throw Error(ErrorKind::InvalidInput, "linear direction must be finite");
  NonlinearEnergy e;
  e.kind_ = EnergyKind::linear;
  e.beta_ = beta;
  e.direction_ = std::move(direction);
  return e;
}

NonlinearEnergy NonlinearEnergy::quadratic(double beta) {
  require_finite(beta, "beta");
  NonlinearEnergy e;
  e.kind_ = EnergyKind::quadratic;
  e.beta_ = beta;
  return e;
}

NonlinearEnergy NonlinearEnergy::power(double beta, double alpha) {
  require_finite(beta, "beta");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InadmissibleEnergy, "power exponent must lie in (0, 1]");
  NonlinearEnergy e;
  e.kind_ = EnergyKind::power;
  e.beta_ = beta;
  e.alpha_ = alpha;
  return e;
}

NonlinearEnergy NonlinearEnergy::polynomial(std::vector<double> coeffs, double beta) {
  require_finite(beta, "beta");
  if (coeffs.empty()) throw Error(ErrorKind::InvalidInput, "polynomial needs at least one coefficient");
  for (double c : coeffs) require_finite(c, "polynomial coefficients");
  NonlinearEnergy e;
  e.kind_ = EnergyKind::polynomial;
  e.beta_ = beta;
  e.coeffs_ = std::move(coeffs);
  return e;
}

NonlinearEnergy NonlinearEnergy::fully_nonlinear(const std::string& expr, int dim, std::map<std::string, double> params,
                                                 std::vector<std::pair<double, double>> domain) {
  if (dim < 1) throw Error(ErrorKind::BadDimensions, "fully nonlinear energy needs at least one potential");
  for (const auto& [name, v] : params) require_finite(v, ("parameter " + name).c_str());
  if (!domain.empty() && static_cast<int>(domain.size()) != dim)
    throw Error(ErrorKind::BadDimensions, "domain box must have one interval per potential");
  NonlinearEnergy e;
  e.kind_ = EnergyKind::fully_nonlinear;
  e.expr_ = Expression(expr, dim + 1, params);
  e.domain_ = std::move(domain);
  if (auto it = params.find("beta"); it != params.end()) e.beta_ = it->second;
  return e;
}

NonlinearEnergy NonlinearEnergy::with_beta(double beta) const {
  require_finite(beta, "beta");
  NonlinearEnergy e = *this;
  e.beta_ = beta;
  if (kind_ == EnergyKind::fully_nonlinear) {
    if (!expr_.parameters().count("beta"))
      throw Error(ErrorKind::InvalidInput, "fully nonlinear energy has no parameter named beta");
    e.expr_.set_parameter("beta", beta);
  }
  return e;
}

NonlinearEnergy NonlinearEnergy::composed(const AffineMap& map) const {
  NonlinearEnergy e = *this;
  if (lift_) {
    e.lift_ = AffineMap{lift_->linear * map.linear, lift_->linear * map.offset + lift_->offset};
  } else {
    e.lift_ = map;
  }
  return e;
}

int NonlinearEnergy::input_dim(int model_dim) const { return lift_ ? static_cast<int>(lift_->linear.cols()) : model_dim; }

EnergyJet NonlinearEnergy::raw_jet(double h, const Vec& z) const {
  EnergyJet j;
  j.d_h = 1.0;
  const Eigen::Index d = z.size();
  switch (kind_) {
    case EnergyKind::linear: {
      const Vec dir = direction_.size() ? direction_ : Vec::Ones(d);
      if (dir.size() != d) throw Error(ErrorKind::BadDimensions, "linear direction does not match the potentials");
      j.value = h + beta_ * dir.dot(z);
      j.d_z = beta_ * dir;
      break;
    }
    case EnergyKind::quadratic:
      j.value = h + 0.5 * beta_ * z.squaredNorm();
      j.d_z = beta_ * z;
      break;
    case EnergyKind::power: {
      if (d != 1) throw Error(ErrorKind::BadDimensions, "power energy needs exactly one potential");
      const double u = std::max(0.0, -z(0));
      j.value = h - beta_ * std::pow(u, alpha_);
      j.d_z = Vec::Constant(1, u > 0.0 ? beta_ * alpha_ * std::pow(u, alpha_ - 1.0)
                                       : (alpha_ < 1.0 ? std::numeric_limits<double>::infinity() * (beta_ >= 0 ? 1 : -1)
                                                       : beta_));
      break;
    }
    case EnergyKind::polynomial: {
      if (d != 1) throw Error(ErrorKind::BadDimensions, "polynomial energy needs exactly one potential");
      double v = 0.0, dv = 0.0;
      for (auto c = coeffs_.rbegin(); c != coeffs_.rend(); ++c) {
        dv = dv * z(0) + v;
        v = v * z(0) + *c;
      }
      j.value = h + beta_ * v;
      j.d_z = Vec::Constant(1, beta_ * dv);
      break;
    }
    case EnergyKind::fully_nonlinear: {
      if (d + 1 != expr_.variable_count())
        throw Error(ErrorKind::BadDimensions, "energy expression does not match the potentials");
      std::vector<double> vars(d + 1), grad(d + 1);
      vars[0] = h;
      for (Eigen::Index i = 0; i < d; ++i) vars[i + 1] = z(i);
      j.value = expr_.gradient(vars.data(), grad.data());
      j.d_h = grad[0];
      j.d_z.resize(d);
      for (Eigen::Index i = 0; i < d; ++i) j.d_z(i) = grad[i + 1];
      break;
    }
  }
  return j;
}

EnergyJet NonlinearEnergy::jet(double h, const Vec& z) const {
  if (!lift_) return raw_jet(h, z);
  EnergyJet j = raw_jet(h, lift_->apply(z));
  j.d_z = lift_->linear.transpose() * j.d_z;
  return j;
}

double NonlinearEnergy::value(double h, const Vec& z) const {
  if (kind_ == EnergyKind::fully_nonlinear) {
    const Vec full = lift_ ? lift_->apply(z) : z;
    std::vector<double> vars(full.size() + 1);
    vars[0] = h;
    for (Eigen::Index i = 0; i < full.size(); ++i) vars[i + 1] = full(i);
    return expr_.value(vars.data());
  }
  return jet(h, z).value;
}

double NonlinearEnergy::potential_value(const Vec& z) const {
  if (!potential_form())
    throw Error(ErrorKind::InadmissibleEnergy, "energy is not of potential form F(z)");
  return jet(0.0, z).value;
}

void NonlinearEnergy::check_admissible(const ShiftModel& model) const {
  const int d = input_dim(model.dim());
  if (d != model.dim()) throw Error(ErrorKind::BadDimensions, "energy and model dimensions differ");
  const int full_dim = lift_ ? static_cast<int>(lift_->linear.rows()) : d;
  const RotationSet& rot = model.rotation();
  switch (kind_) {
    case EnergyKind::linear:
      if (direction_.size() && direction_.size() != full_dim)
        throw Error(ErrorKind::BadDimensions, "linear direction does not match the potentials");
      return;
    case EnergyKind::quadratic: return;
    case EnergyKind::polynomial:
      if (full_dim != 1) throw Error(ErrorKind::BadDimensions, "polynomial energy needs exactly one potential");
      return;
    case EnergyKind::power: {
      if (full_dim != 1) throw Error(ErrorKind::BadDimensions, "power energy needs exactly one potential");
      double hi = -std::numeric_limits<double>::infinity();
      for (const auto& p : rot.extreme_points) hi = std::max(hi, lift_ ? lift_->apply(p)(0) : p(0));
      if (hi > 1e-12)
        throw Error(ErrorKind::InadmissibleEnergy, "power energy needs a rotation set inside (-inf, 0]");
      return;
    }
    case EnergyKind::fully_nonlinear: break;
  }
  if (expr_.variable_count() != full_dim + 1)
    throw Error(ErrorKind::BadDimensions, "energy expression has " + std::to_string(expr_.variable_count() - 1) +
                                              " potentials, model has " + std::to_string(full_dim));

  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (d + 1 > static_cast<int>(std::size(primes)))
    throw Error(ErrorKind::DimensionTooHigh, "too many potentials for the admissibility sampler");
  const double h_top = model.topological_entropy();
  for (int i = 1; i <= 1024; ++i) {
    const double h = h_top * halton(i, primes[0]);
    Vec z(d);
    for (int j = 0; j < d; ++j) {
      const auto [lo, hi] = rot.bounding_box[j];
      z(j) = lo + (hi - lo) * halton(i, primes[j + 1]);
    }
    z = nearest_in_hull(rot.extreme_points, z);
    const EnergyJet g = jet(h, z);
    if (!(g.d_h > 0.0) || !std::isfinite(g.value)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g at h = %.6g", g.d_h, h);
      throw Error(ErrorKind::InadmissibleEnergy, std::string("partial derivative in h is ") + buf);
    }
  }
}

std::string NonlinearEnergy::describe() const {
  char buf[128];
  switch (kind_) {
    case EnergyKind::linear: std::snprintf(buf, sizeof buf, "linear(beta=%.17g)", beta_); return buf;
    case EnergyKind::quadratic: std::snprintf(buf, sizeof buf, "quadratic(beta=%.17g)", beta_); return buf;
    case EnergyKind::power:
      std::snprintf(buf, sizeof buf, "power(beta=%.17g, alpha=%.17g)", beta_, alpha_);
      return buf;
    case EnergyKind::polynomial: {
      std::string s = "polynomial(";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.17g", i ? ", " : "", coeffs_[i]);
        s += buf;
      }
      std::snprintf(buf, sizeof buf, "; beta=%.17g)", beta_);
      return s + buf;
    }
    case EnergyKind::fully_nonlinear: return "fully_nonlinear(" + expr_.source() + ")";
  }
  return "unknown";
}

}  // namespace thermoform
