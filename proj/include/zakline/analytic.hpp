#pragma once

#include "zakline/models.hpp"
#include "zakline/types.hpp"

namespace zakline::analytic {

/// Complete elliptic integral of the first kind, parameter convention:
/// K(nu) = int_0^{pi/2} dk / sqrt(1 - nu sin^2 k), 0 <= nu < 1.
double elliptic_k(double nu);

/// Complete elliptic integral of the third kind:
/// Pi(mu, nu) = int_0^{pi/2} dk / ((1 - mu sin^2 k) sqrt(1 - nu sin^2 k)),
/// 0 <= nu < 1, mu < 1.
double elliptic_pi(double mu, double nu);

struct Inputs {
  double q;    // t+ / t-
  double eta;  // gamma / (2 t-)
  double nu;   // 4q / ((q + 1)^2 - eta^2)
  double mu;   // 4q / (q + 1)^2
};

Inputs inputs(double q, double eta);

/// Closed-form complex Zak phases of the gain/loss SSH chain in the
/// PT-unbroken regime, ordered by band (lower energy first):
///   lower = pi Theta(q - 1) - i (eta/2) sqrt(nu/q) (K(nu) + (q-1)/(q+1) Pi(mu, nu))
///   upper = pi Theta(q - 1) + i (...)
struct ZakPair {
  Complex lower;
  Complex upper;
};

/// Throws DegenerateRatio for q = 1, BrokenRegime for eta >= |q - 1|.
ZakPair zak(double q, double eta);

ZakPair from_ssh(const SshParams& p);

}  // namespace zakline::analytic
