#include <doctest.h>

#include <cmath>

#include "thermoform/energy.hpp"
#include "thermoform/error.hpp"
#include "thermoform/expression.hpp"

using namespace thermoform;

TEST_CASE("expression parsing and evaluation") {
  const Expression e("z0 + 0.5*b*(z1^2) - exp(-z1)/2", 2, {{"b", 2.0}});
  const double v[2] = {0.3, 1.5};
  CHECK(e.value(v) == doctest::Approx(0.3 + 1.5 * 1.5 - std::exp(-1.5) / 2).epsilon(1e-15));
  CHECK(e.uses_parameter("b"));
  CHECK_FALSE(e.uses_parameter("c"));

  // 2^3^2 = 2^9 and unary minus binds looser than ^.
  const Expression pow("2^3^2 + -z0^2", 1, {});
  const double x = 3.0;
  CHECK(pow.value(&x) == doctest::Approx(512.0 - 9.0));
}

TEST_CASE("expression gradient agrees with central differences") {
  const Expression e("log(1 + z0^2) * tanh(z1) + sqrt(abs(z0*z1)) + sin(z0)*cos(z1) + z1/(1+z0^2)", 2, {});
  const double p[2] = {0.7, -1.3};
  double g[2];
  e.gradient(p, g);
  for (int i = 0; i < 2; ++i) {
    double hi[2] = {p[0], p[1]}, lo[2] = {p[0], p[1]};
    hi[i] += 1e-6;
    lo[i] -= 1e-6;
    CHECK(g[i] == doctest::Approx((e.value(hi) - e.value(lo)) / 2e-6).epsilon(1e-7));
  }
}

TEST_CASE("expression errors") {
  CHECK_THROWS_AS(Expression("z0 +", 1, {}), Error);
  CHECK_THROWS_AS(Expression("z3", 2, {}), Error);
  CHECK_THROWS_AS(Expression("foo(z0)", 1, {}), Error);
  CHECK_THROWS_AS(Expression("q * z0", 1, {}), Error);
  CHECK_THROWS_AS(Expression("(z0", 1, {}), Error);
}

TEST_CASE("potential-form energies") {
  const Vec z = Vec::Constant(2, 0.5);
  CHECK(NonlinearEnergy::quadratic(2.0).potential_value(z) == doctest::Approx(0.5));
  CHECK(NonlinearEnergy::quadratic(2.0).value(0.25, z) == doctest::Approx(0.75));
  CHECK(NonlinearEnergy::linear(3.0).potential_value(z) == doctest::Approx(3.0));
  Vec dir(2);
  dir << 1.0, -2.0;
  CHECK(NonlinearEnergy::linear(1.0, dir).potential_value(z) == doctest::Approx(-0.5));

  const Vec neg = Vec::Constant(1, -0.25);
  CHECK(NonlinearEnergy::power(2.0, 0.5).potential_value(neg) == doctest::Approx(-1.0));
  CHECK(NonlinearEnergy::polynomial({1.0, 2.0, 3.0}, 2.0).potential_value(neg) ==
        doctest::Approx(2.0 * (1.0 - 0.5 + 3.0 / 16.0)));

  CHECK(NonlinearEnergy::quadratic(1.0).with_beta(4.0).beta() == 4.0);
  CHECK(NonlinearEnergy::power(1.0, 0.5).with_beta(3.0).potential_value(neg) == doctest::Approx(-1.5));
  CHECK_THROWS_AS(NonlinearEnergy::power(1.0, 1.5), Error);
  CHECK_THROWS_AS(NonlinearEnergy::power(1.0, 0.0), Error);
}

TEST_CASE("energy jets") {
  const NonlinearEnergy q = NonlinearEnergy::quadratic(3.0);
  Vec z(2);
  z << 0.2, -0.4;
  const EnergyJet j = q.jet(0.1, z);
  CHECK(j.d_h == 1.0);
  CHECK(j.d_z(0) == doctest::Approx(0.6));
  CHECK(j.d_z(1) == doctest::Approx(-1.2));

  const NonlinearEnergy g = NonlinearEnergy::fully_nonlinear("z0 + z0^2 + b*z1*z2", 2, {{"b", 2.0}});
  const EnergyJet jg = g.jet(0.5, z);
  CHECK(jg.value == doctest::Approx(0.5 + 0.25 + 2.0 * 0.2 * -0.4));
  CHECK(jg.d_h == doctest::Approx(2.0));
  CHECK(jg.d_z(0) == doctest::Approx(-0.8));
  CHECK(jg.d_z(1) == doctest::Approx(0.4));
  CHECK_THROWS_AS(g.potential_value(z), Error);
}

TEST_CASE("with_beta on fully nonlinear energies needs a beta parameter") {
  const NonlinearEnergy g = NonlinearEnergy::fully_nonlinear("z0 + beta*z1^2", 1, {{"beta", 1.0}});
  const Vec z = Vec::Constant(1, 0.5);
  CHECK(g.with_beta(4.0).value(0.0, z) == doctest::Approx(1.0));
  const NonlinearEnergy nb = NonlinearEnergy::fully_nonlinear("z0 + z1^2", 1);
  CHECK_THROWS_AS(nb.with_beta(2.0), Error);
}

TEST_CASE("admissibility checks against models") {
  const ShiftModel cw = builtin_model("curie_weiss");
  const ShiftModel fz = builtin_model("freezing");
  auto kind = [](const NonlinearEnergy& e, const ShiftModel& m) {
    try {
      e.check_admissible(m);
    } catch (const Error& err) {
      return err.kind();
    }
    return ErrorKind::PerronFailure;  // marker for "no throw"
  };
  CHECK(kind(NonlinearEnergy::power(1.0, 0.5), cw) == ErrorKind::InadmissibleEnergy);
  CHECK(kind(NonlinearEnergy::power(1.0, 0.5), fz) == ErrorKind::PerronFailure);
  CHECK(kind(NonlinearEnergy::fully_nonlinear("-z0 + z1", 1), cw) == ErrorKind::InadmissibleEnergy);
  CHECK(kind(NonlinearEnergy::fully_nonlinear("exp(z0) + z1", 1), cw) == ErrorKind::PerronFailure);
  CHECK(kind(NonlinearEnergy::quadratic(1.0), cw) == ErrorKind::PerronFailure);
  CHECK(kind(NonlinearEnergy::polynomial({0, 1}), builtin_model("potts:3")) == ErrorKind::BadDimensions);
}
