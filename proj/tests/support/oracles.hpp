#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's solvers; closed forms and brute force only.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "thermoform/shift_model.hpp"

namespace oracle {

// Root of f on [lo, hi] (f(lo), f(hi) of opposite sign) by plain bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Binary entropy of a coin with bias p.
inline double coin_entropy(double p) { return -xlogx(p) - xlogx(1.0 - p); }

// Curie-Weiss: two letters with potentials -1, +1 on the full shift.
inline double cw_entropy(double z) { return coin_entropy(0.5 * (1.0 + z)); }

// Positive root of z = tanh(beta z), beta > 1.
inline double cw_magnetization(double beta) {
  return bisect([beta](double z) { return z - std::tanh(beta * z); }, 1e-9, 1.0);
}

// Asymmetric model: letters with potentials -2, -2, 3 on the full shift.
inline double asym_entropy(double z) {
  // p: mass on the two letters at -2, q: mass on the letter at 3.
  const double p = (3.0 - z) / 5.0, q = (2.0 + z) / 5.0;
  return -xlogx(p) + p * std::log(2.0) - xlogx(q);
}

// Freezing model: potentials 0, -1; z = -(frequency of the second letter).
inline double freezing_entropy(double z) { return coin_entropy(-z); }

// max over a uniform grid of n points on [lo, hi] of f.
inline double grid_max(const std::function<double(double)>& f, double lo, double hi, int n) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) best = std::max(best, f(lo + (hi - lo) * i / (n - 1)));
  return best;
}

// Golden-section maximization of a unimodal f on [a, b].
inline double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 300 && b - a > 1e-16; ++i) {
    if (fc > fd) {
      b = d, d = c, fd = fc, c = b - r * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd, d = a + r * (b - a), fd = f(d);
    }
  }
  return std::max(fc, fd);
}

// log of sum over all admissible n-words w of exp(n F(mean potential of w)),
// by explicit depth-first enumeration of the words.
inline double brute_log_zeta(const Eigen::MatrixXd& adjacency, const Eigen::MatrixXd& potentials, int n,
                             const std::function<double(const Eigen::VectorXd&)>& f) {
  const int k = static_cast<int>(adjacency.rows());
  const int d = static_cast<int>(potentials.cols());
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd mean(d);
  // Running log-sum-exp with a moving shift; Neumaier-compensated so that
  // hundreds of millions of terms keep full precision.
  double top = -std::numeric_limits<double>::infinity();
  double acc = 0.0, comp = 0.0;
  auto add = [&](double x) {
    const double t = acc + x;
    comp += std::abs(acc) >= std::abs(x) ? (acc - t) + x : (x - t) + acc;
    acc = t;
  };
  std::function<void(int, int)> walk = [&](int depth, int last) {
    if (depth == n) {
      mean = sum / n;
      const double e = n * f(mean);
      if (e > top) {
        const double scale = std::exp(top - e);
        acc *= scale;
        comp *= scale;
        top = e;
        add(1.0);
      } else {
        add(std::exp(e - top));
      }
      return;
    }
    for (int a = 0; a < k; ++a) {
      if (depth > 0 && adjacency(last, a) == 0.0) continue;
      sum += potentials.row(a).transpose();
      walk(depth + 1, a);
      sum -= potentials.row(a).transpose();
    }
  };
  walk(0, -1);
  return top + std::log(acc + comp);
}

// Random model: k letters, d potentials uniform in [-2, 2], full shift or a
// golden-mean style adjacency (last letter may not follow itself).
inline thermoform::RawModel random_model(std::mt19937_64& rng, int k, int d, bool golden) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  thermoform::RawModel raw;
  for (int a = 0; a < k; ++a) raw.alphabet.push_back(std::string(1, static_cast<char>('a' + a)));
  raw.adjacency.assign(k, std::vector<double>(k, 1.0));
  if (golden) raw.adjacency[k - 1][k - 1] = 0.0;
  raw.potentials.assign(k, std::vector<double>(d));
  for (auto& row : raw.potentials)
    for (auto& x : row) x = u(rng);
  return raw;
}

}  // namespace oracle
