#pragma once

// Test-only oracles and generators. Nothing here calls into the library's
// numerical code, so comparisons against it are independent.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "zakline/gauge.hpp"
#include "zakline/types.hpp"

namespace zltest {

using zakline::Complex;
using zakline::Matrix;

// Composite Simpson on [a, b], halving the step until successive estimates
// agree to `tol` (relative to the magnitude of the result).
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double tol = 1e-14) {
  long n = 16;
  auto rule = [&](long intervals) {
    const double h = (b - a) / static_cast<double>(intervals);
    double sum = f(a) + f(b);
    for (long i = 1; i < intervals; ++i) {
      sum += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    }
    return sum * h / 3.0;
  };
  double previous = rule(n);
  for (int level = 0; level < 22; ++level) {
    n *= 2;
    const double current = rule(n);
    if (std::abs(current - previous) <= tol * std::max(1.0, std::abs(current))) return current;
    previous = current;
  }
  return previous;
}

// K(nu) = int_0^{pi/2} dk / sqrt(1 - nu sin^2 k)
inline double simpson_k(double nu) {
  return simpson([nu](double k) { return 1.0 / std::sqrt(1.0 - nu * std::sin(k) * std::sin(k)); },
                 0.0, 0.5 * zakline::kPi);
}

// Pi(mu, nu) = int_0^{pi/2} dk / ((1 - mu sin^2 k) sqrt(1 - nu sin^2 k))
inline double simpson_pi(double mu, double nu) {
  return simpson(
      [mu, nu](double k) {
        const double s2 = std::sin(k) * std::sin(k);
        return 1.0 / ((1.0 - mu * s2) * std::sqrt(1.0 - nu * s2));
      },
      0.0, 0.5 * zakline::kPi);
}

inline Matrix random_matrix(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Matrix H(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) H(i, j) = Complex(g(rng), g(rng));
  }
  return H;
}

inline Matrix random_hermitian(std::mt19937_64& rng, int dim) {
  const Matrix A = random_matrix(rng, dim);
  return A + A.adjoint();
}

// chi -> chi e^{-i a_j}, phi -> phi e^{+i a_j} with an independent random
// a_j for every band and every grid point.
inline zakline::SmoothedBundle regauge(zakline::SmoothedBundle bundle, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-zakline::kPi, zakline::kPi);
  for (auto& track : bundle.tracks) {
    for (auto& pair : track.pairs) {
      const Complex u = std::polar(1.0, angle(rng));
      pair.left /= u;
      pair.right *= u;
    }
  }
  return bundle;
}

// Distance with the real part compared modulo 2 pi.
inline double phase_gap(Complex a, Complex b) {
  double d = std::remainder(a.real() - b.real(), zakline::kTwoPi);
  return std::hypot(d, a.imag() - b.imag());
}

}  // namespace zltest
