#pragma once

#include <array>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "zakline/gauge.hpp"
#include "zakline/models.hpp"

namespace zakline {

enum class Method { Derivative, Wilson };

/// Which routes a run evaluates.
enum class MethodSelection { Derivative, Wilson, Both };

/// Finite-difference stencil for <chi|d phi>. The smoothed bundle is periodic,
/// so every stencil wraps around the loop; FivePoint is fourth order.
enum class Difference { FivePoint, Central, Forward };

/// Link variable of the Wilson loop. Symmetric links L / sqrt(L R), with
/// L = <chi_j|phi_{j+1}> and R = <chi_{j+1}|phi_j>, drop the O(dk^2) modulus
/// bias of plain links; both are gauge invariant.
enum class WilsonLinks { Symmetric, Plain };

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ZakResult {
  int band = 0;
  Complex gamma;
  Method method = Method::Derivative;
  int grid_points = 0;
  double quant_residual = kNaN;
  double oracle_gap = kNaN;
  std::optional<PtClassification> pt;

  /// Re gamma reduced to (-pi, pi].
  double reduced_real() const;
};

/// x modulo 2 pi in (-pi, pi]; the quotient rounds half to even.
double reduce_angle(double x);

struct Quantization {
  bool quantized = false;
  double residual = 0.0;  // circular distance of Re gamma from {0, pi}
  double value = 0.0;     // 0 or pi
};

Quantization quantization_check(Complex gamma, double tol);

/// gamma_n = i sum_j <chi_j| D phi_j> on a smoothed bundle, with D the
/// chosen difference stencil (times dk).
ZakResult zak_derivative(const SmoothedBundle& bundle, int band,
                         Difference difference = Difference::FivePoint,
                         double tol_closure = 1e-8);

/// gamma_n = i sum_j Ln(link_j) around the distinct grid points, wrapping
/// the last link back to the basepoint. Needs per-point biorthonormal pairs
/// only; any phase convention gives the same result modulo 2 pi.
ZakResult zak_wilson(const SmoothedBundle& bundle, int band,
                     WilsonLinks links = WilsonLinks::Symmetric, double tol_overlap = 1e-8);

struct RunOptions {
  int grid_points = 1001;
  MethodSelection methods = MethodSelection::Both;
  Difference difference = Difference::FivePoint;
  WilsonLinks links = WilsonLinks::Symmetric;
  bool emit_analytic = true;
  double tol_pt = 1e-9;
  double tol_quant = 1e-6;
  GaugeOptions gauge;
  int workers = 0;  // 0: hardware concurrency
};

/// Both routes for every band of one model, plus PT classification.
struct BandReport {
  int band = 0;
  std::optional<ZakResult> derivative;
  std::optional<ZakResult> wilson;
  std::optional<Winding> winding;

  /// Derivative result when computed, otherwise Wilson.
  const ZakResult& primary() const;
  /// Quantization verdict, from Wilson whenever it was computed.
  Quantization quantization(double tol) const;
};

struct ZakReport {
  PtClassification pt;
  std::vector<BandReport> bands;
};

ZakReport compute_zak(const BlochModel& model, const RunOptions& options);

struct SweepRow {
  double theta = 0.0;
  bool pt_broken = false;
  std::array<Complex, 2> gamma{Complex(kNaN, kNaN), Complex(kNaN, kNaN)};
  std::array<std::optional<Complex>, 2> analytic;
  std::array<double, 2> quant_residual{kNaN, kNaN};
  std::array<double, 2> oracle_gap{kNaN, kNaN};
  std::array<std::optional<Complex>, 2> derivative;
  std::array<std::optional<Complex>, 2> wilson;
  std::array<std::optional<Winding>, 2> winding;
  std::optional<std::string> error;  // numerical failure, "Name: message"
};

/// theta_i = min + i (max - min) / steps, i = 0..steps-1.
std::vector<double> theta_grid(double theta_min, double theta_max, int steps);

/// One row per theta for the two-band gain/loss SSH chain. Rows run
/// concurrently and come back in input order; failures stay in their row.
std::vector<SweepRow> sweep(const SshParams& base, std::span<const double> thetas,
                            const RunOptions& options);

struct ConvergenceRow {
  int grid_points = 0;
  Complex gamma{kNaN, kNaN};
  double delta_prev = kNaN;
  std::optional<std::string> error;  // numerical failure at this M, "Name: message"
};

/// One row per grid size; a numerical failure at one size is recorded in its
/// row (NaN phase) and does not stop the study.

std::vector<ConvergenceRow> convergence_study(const BlochModel& model, int band,
                                              std::span<const int> grid_sizes, Method method,
                                              const RunOptions& options = {});

/// CSV header line (no newline).
std::string csv_header();

/// One CSV line (no newline). Floats use 17 significant digits; real parts
/// of gamma are written in (-pi/2, 3pi/2] so 0 and pi sit away from the cut.
std::string csv_row(const SweepRow& row);

void write_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace zakline
