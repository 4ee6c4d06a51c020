#include "zakline/analytic.hpp"

#include <cmath>
#include <string>

#include "zakline/error.hpp"

namespace zakline::analytic {

namespace {

void require_parameter(double nu) {
  if (!(nu >= 0.0 && nu < 1.0)) {
    fail(ErrorCode::DomainError,
         "elliptic parameter nu must lie in [0, 1), got " + std::to_string(nu));
  }
}

}  // namespace

double elliptic_k(double nu) {
  require_parameter(nu);
  // K = pi / (2 AGM(1, sqrt(1 - nu)))
  double a = 1.0;
  double b = std::sqrt(1.0 - nu);
  for (int it = 0; it < 64 && a != b; ++it) {
    const double mean = 0.5 * (a + b);
    b = std::sqrt(a * b);
    if (std::abs(mean - a) <= 1e-17 * mean) {
      a = mean;
      break;
    }
    a = mean;
  }
  return kPi / (2.0 * a);
}

double elliptic_pi(double mu, double nu) {
  require_parameter(nu);
  if (!(mu < 1.0) || !std::isfinite(mu)) {
    fail(ErrorCode::DomainError,
         "elliptic characteristic mu must be below 1, got " + std::to_string(mu));
  }
  if (mu == 0.0) return elliptic_k(nu);
  return std::comp_ellint_3(std::sqrt(nu), mu);
}

Inputs inputs(double q, double eta) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    fail(ErrorCode::DomainError, "hopping ratio q must be positive");
  }
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    fail(ErrorCode::DomainError, "eta must be non-negative");
  }
  const double s = (q + 1.0) * (q + 1.0);
  return {q, eta, 4.0 * q / (s - eta * eta), 4.0 * q / s};
}

ZakPair zak(double q, double eta) {
  const Inputs in = inputs(q, eta);
  if (std::abs(q - 1.0) <= 1e-12) {
    fail(ErrorCode::DegenerateRatio, "q = 1: the gap closes and the Zak phase is undefined");
  }
  if (eta >= std::abs(q - 1.0)) {
    fail(ErrorCode::BrokenRegime, "eta >= |q - 1|: PT symmetry is broken");
  }
  const double real = q > 1.0 ? kPi : 0.0;
  const double imag = 0.5 * eta * std::sqrt(in.nu / q) *
                      (elliptic_k(in.nu) + (q - 1.0) / (q + 1.0) * elliptic_pi(in.mu, in.nu));
  return {{real, -imag}, {real, imag}};
}

ZakPair from_ssh(const SshParams& p) {
  p.validate();
  const auto amp = hopping_amplitudes(p);
  if (!(amp.minus > 0.0)) {
    fail(ErrorCode::DomainError, "t- vanishes: ratio q is undefined");
  }
  return zak(amp.plus / amp.minus, p.gamma / (2.0 * amp.minus));
}

}  // namespace zakline::analytic
