#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "thermoform/convex.hpp"
#include "thermoform/error.hpp"
#include "thermoform/geometry.hpp"
#include "thermoform/shift_model.hpp"

using namespace thermoform;

namespace {

RawModel two_letter(std::vector<std::vector<double>> adjacency, std::vector<std::vector<double>> potentials) {
  return RawModel{{"a", "b"}, std::move(adjacency), std::move(potentials)};
}

ErrorKind kind_of(const RawModel& raw) {
  try {
    validate_model(raw);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected validate_model to throw");
  return ErrorKind::InvalidInput;
}

Vec vec1(double x) { return Vec::Constant(1, x); }

}  // namespace

TEST_CASE("validate_model accepts the standard examples") {
  const ShiftModel cw = validate_model(two_letter({{1, 1}, {1, 1}}, {{-1}, {1}}));
  CHECK(cw.alphabet_size() == 2);
  CHECK(cw.dim() == 1);
  CHECK(cw.is_full_shift());

  const ShiftModel golden = validate_model(two_letter({{1, 1}, {1, 0}}, {{0.3}, {-0.7}}));
  CHECK_FALSE(golden.is_full_shift());
}

TEST_CASE("validate_model rejects malformed input") {
  CHECK(kind_of(two_letter({{1, 0}, {0, 1}}, {{0}, {1}})) == ErrorKind::ReducibleAdjacency);
  CHECK(kind_of(two_letter({{1, 2}, {1, 1}}, {{0}, {1}})) == ErrorKind::NonBinaryAdjacency);
  CHECK(kind_of(two_letter({{1, 1}, {1, 1}}, {{0}, {NAN}})) == ErrorKind::NonFinitePotential);
  CHECK(kind_of(two_letter({{1, 1}, {1, 1}}, {{0}, {1, 2}})) == ErrorKind::BadDimensions);
  CHECK(kind_of(RawModel{{"a"}, {{1}}, {{0}}}) == ErrorKind::BadDimensions);
  CHECK(kind_of(two_letter({{0, 1}, {1, 0}}, {{0}, {1}})) == ErrorKind::ZeroEntropy);
}

TEST_CASE("linear pressure of the two-letter full shift is log(2 cosh y)") {
  const ShiftModel cw = builtin_model("curie_weiss");
  for (int i = -3; i <= 3; ++i) {
    const double y = i;
    const PerronData d = linear_pressure(cw, vec1(y));
    CHECK(d.pressure == doctest::Approx(std::log(2.0 * std::cosh(y))).epsilon(1e-13));
    CHECK(d.z(0) == doctest::Approx(std::tanh(y)).epsilon(1e-12));
  }
  const PerronData zero = linear_pressure(cw, vec1(0.0));
  CHECK(zero.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(std::abs(zero.z(0)) < 1e-14);
}

TEST_CASE("golden-mean shift has the golden ratio as Perron root") {
  // Characteristic polynomial of [[1,1],[1,0]]: x^2 - x - 1.
  const double root = 0.5 * (1.0 + std::sqrt(5.0));
  const ShiftModel golden = validate_model(two_letter({{1, 1}, {1, 0}}, {{1.5}, {-0.25}}));
  CHECK(golden.topological_entropy() == doctest::Approx(std::log(root)).epsilon(1e-13));
  CHECK(linear_pressure(golden, vec1(0.0)).pressure == doctest::Approx(std::log(root)).epsilon(1e-13));
}

TEST_CASE("Perron data invariants hold on random models") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uy(-3.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + trial % 3;
    const int d = 1 + trial % 2;
    const ShiftModel m = validate_model(oracle::random_model(rng, k, d, trial % 4 >= 2));
    Vec y(d);
    for (int j = 0; j < d; ++j) y(j) = uy(rng);
    const PerronData p = linear_pressure(m, y);
    CHECK(p.entropy >= -1e-12);
    CHECK(p.entropy <= std::log(k) + 1e-12);
    CHECK(std::abs(p.entropy + y.dot(p.z) - p.pressure) < 1e-9);
    CHECK((p.stationary.transpose() * p.transitions - p.stationary.transpose()).norm() < 1e-10);
    CHECK(std::abs(p.stationary.sum() - 1.0) < 1e-12);
    for (int a = 0; a < k; ++a) CHECK(std::abs(p.transitions.row(a).sum() - 1.0) < 1e-12);
    CHECK((p.z - m.potentials().transpose() * p.stationary).norm() < 1e-12);
    CHECK(m.rotation().contains(p.z, 1e-8));

    // Gradient identity by central differences.
    const double eps = 1e-5;
    for (int j = 0; j < d; ++j) {
      Vec e = Vec::Zero(d);
      e(j) = eps;
      const double fd = (linear_pressure(m, y + e).pressure - linear_pressure(m, y - e).pressure) / (2 * eps);
      CHECK(std::abs(fd - p.z(j)) < 1e-5);
    }

    // Midpoint convexity.
    Vec y2(d);
    for (int j = 0; j < d; ++j) y2(j) = uy(rng);
    const double mid = linear_pressure(m, 0.5 * (y + y2)).pressure;
    CHECK(mid <= 0.5 * (p.pressure + linear_pressure(m, y2).pressure) + 1e-10);
  }
}

TEST_CASE("periodic adjacency still converges") {
  // Bipartite graph with period 2 and positive entropy.
  RawModel raw{{"a", "b", "c", "d"},
               {{0, 0, 1, 1}, {0, 0, 1, 1}, {1, 1, 0, 0}, {1, 1, 0, 0}},
               {{0.5}, {-1.0}, {2.0}, {0.0}}};
  const ShiftModel m = validate_model(raw);
  CHECK(m.period() == 2);
  CHECK(m.topological_entropy() == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  // Two-step words alternate between the halves: P(y) = (log(e^{0.5y}+e^{-y}) + log(e^{2y}+1)) / 2.
  const double y = 0.8;
  const double expected = 0.5 * (std::log(std::exp(0.5 * y) + std::exp(-y)) + std::log(std::exp(2 * y) + 1.0));
  CHECK(linear_pressure(m, vec1(y)).pressure == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rotation set extreme points") {
  const RotationSet cw = builtin_model("curie_weiss").rotation();
  REQUIRE(cw.extreme_points.size() == 2);
  CHECK(cw.effective_dim == 1);
  CHECK(cw.bounding_box[0].first == -1.0);
  CHECK(cw.bounding_box[0].second == 1.0);

  const RotationSet asym = builtin_model("asymmetric_cw").rotation();
  CHECK(asym.extreme_points.size() == 2);
  CHECK(asym.bounding_box[0].first == -2.0);
  CHECK(asym.bounding_box[0].second == 3.0);

  const RotationSet potts = builtin_model("potts:3").rotation();
  CHECK(potts.extreme_points.size() == 3);
  CHECK(potts.effective_dim == 2);
  for (const Vec& p : potts.extreme_points) {
    CHECK(p.sum() == doctest::Approx(1.0));
    CHECK(p.maxCoeff() == doctest::Approx(1.0));
  }
  CHECK(potts.contains(Vec::Constant(3, 1.0 / 3.0)));
  CHECK_FALSE(potts.contains(Vec::Constant(3, 0.5)));
}

TEST_CASE("rotation set of a subshift comes from its cycles") {
  // Golden mean: cycles a (1.0) and ab (0.5); bb is forbidden.
  const ShiftModel golden = validate_model(two_letter({{1, 1}, {1, 0}}, {{1.0}, {0.0}}));
  const RotationSet r = golden.rotation();
  CHECK(r.bounding_box[0].first == doctest::Approx(0.5));
  CHECK(r.bounding_box[0].second == doctest::Approx(1.0));
  CHECK_FALSE(r.approximate);
}

TEST_CASE("reduce_potentials on Potts indicators") {
  const ShiftModel potts = builtin_model("potts:3");
  const PotentialReduction& red = potts.reduction();
  CHECK_FALSE(red.identity);
  REQUIRE(red.reduced_dim() == 2);
  const Vec zr = Vec::Constant(2, 0.2);
  const Vec z = red.lift.apply(zr);
  CHECK(z.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(red.project(z).isApprox(zr));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const Vec y = Vec::NullaryExpr(2, [&](Eigen::Index) { return u(rng); });
    const double reduced = linear_pressure(red.model, y).pressure;
    const double full = linear_pressure(potts, red.embed_dual(y)).pressure;
    CHECK(std::abs(reduced - full) < 1e-9);
  }
}

TEST_CASE("reduce_potentials drops duplicate columns and keeps full rank") {
  const ShiftModel dup = validate_model(RawModel{{"a", "b", "c"}, {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}},
                                                 {{0.5, 0.5}, {-1.0, -1.0}, {2.0, 2.0}}});
  const PotentialReduction& red = dup.reduction();
  REQUIRE(red.reduced_dim() == 1);
  const Vec z = red.lift.apply(Vec::Constant(1, 0.3));
  CHECK(z(0) == doctest::Approx(0.3));
  CHECK(z(1) == doctest::Approx(0.3));

  const ShiftModel cw = builtin_model("curie_weiss");
  CHECK(cw.reduction().identity);
}

TEST_CASE("builtins and unknown identifiers") {
  CHECK(builtin_model("freezing").potentials()(1, 0) == -1.0);
  CHECK(builtin_model("asymmetric_cw").alphabet_size() == 3);
  CHECK(builtin_model("potts:5").dim() == 5);
  CHECK_THROWS_AS(builtin_model("nope"), Error);
  CHECK_THROWS_AS(builtin_model("potts:1"), Error);
}

TEST_CASE("reduction keeps the potential with the larger spread") {
  // Two letters: the rotation set is a segment; the first potential barely
  // moves along it.
  const RawModel raw{{"a", "b"}, {{1, 1}, {1, 0}}, {{-0.6917, -1.2250}, {-0.6872, 1.9585}}};
  const ShiftModel m = validate_model(raw);
  const PotentialReduction& red = m.reduction();
  REQUIRE_FALSE(red.identity);
  REQUIRE(red.kept == std::vector<int>{1});
  Vec y(2);
  y << -0.86, 1.24;
  const PerronData p = linear_pressure(m, y);
  const Vec yr = Vec::Constant(1, 1.7);
  CHECK(std::abs(linear_pressure(red.model, yr).pressure - linear_pressure(m, red.embed_dual(yr)).pressure) < 1e-12);
  // The reduced dual of an ordinary point stays well inside the clipping ball.
  const EntropyEvaluation e = entropy_at(m, p.z);
  CHECK(e.status == EntropyStatus::interior);
  CHECK(std::abs(e.h - p.entropy) < 1e-9);
}
