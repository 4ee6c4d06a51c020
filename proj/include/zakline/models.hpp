#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "zakline/eigsolver.hpp"
#include "zakline/grid.hpp"
#include "zakline/types.hpp"

namespace zakline {

/// Dimerized chain with alternating gain and loss. Lattice constant is 1.
struct SshParams {
  double t = 1.0;      // mean hopping
  double delta = 0.0;  // dimerization strength, [0, 1)
  double theta = 0.0;  // control angle (radians)
  double gamma = 0.0;  // gain/loss strength, >= 0

  /// Throws ValidationError on t <= 0, delta outside [0, 1), gamma < 0.
  void validate() const;
};

struct HoppingAmplitudes {
  double plus;
  double minus;
};

/// t_pm = t (1 +- delta cos theta).
HoppingAmplitudes hopping_amplitudes(const SshParams& p);

/// [[-i G/2, t- + t+ e^{ik}], [t- + t+ e^{-ik}, i G/2]]
Matrix ssh_bloch(double k, const SshParams& p);
Matrix ssh_bloch(double k, double t_plus, double t_minus, double gamma);

struct SshModel {
  SshParams params;

  Index dim() const { return 2; }
  Matrix operator()(double k) const { return ssh_bloch(k, params); }
};

/// H(k)_ij = sum_m c_m e^{i m k}, finite harmonic lists per entry.
class FourierModel {
 public:
  explicit FourierModel(Index dim);

  /// Accumulates coefficient c onto harmonic m of entry (i, j), 0-based.
  void add(Index i, Index j, int harmonic, Complex coefficient);

  Index dim() const { return dim_; }
  bool empty() const { return terms_.empty(); }
  Matrix operator()(double k) const;

 private:
  Index dim_;
  std::map<std::tuple<Index, Index, int>, Complex> terms_;
};

using BlochModel = std::variant<SshModel, FourierModel>;

Matrix evaluate(const BlochModel& model, double k);
Index model_dim(const BlochModel& model);
std::string describe(const BlochModel& model);

/// H = n0 sigma_0 + n . sigma for a 2x2 matrix.
struct PauliCoeffs {
  Complex n0;
  std::array<Complex, 3> n;

  Matrix reconstruct() const;
};

/// sigma_0 .. sigma_3.
Matrix pauli(int index);

PauliCoeffs pauli_decompose(const Matrix& H);

struct PauliEnergies {
  Complex plus;
  Complex minus;
};

/// E_pm = n0 +- sqrt(n . n), bilinear dot product, principal root.
PauliEnergies energies(const PauliCoeffs& c);

struct PtClassification {
  bool broken = false;
  double max_imag_gap = 0.0;
  std::vector<double> critical_points;  // loop coordinates entering the broken region
};

PtClassification pt_classify(const BlochModel& model, const LoopGrid& grid,
                             double tol_pt = 1e-9);

/// Best constant chiral axis for a 2x2 model: the unit a minimizing
/// sum_k |a . n(k)|^2, with the root-mean-square residual at the minimum.
struct ChiralResidual {
  std::array<double, 3> axis;
  double residual;
};

ChiralResidual chiral_residual(const BlochModel& model, const LoopGrid& grid);

/// Parses a decimal literal with round-to-nearest. With `allow_pi_suffix`, a
/// trailing "pi" multiplies by pi ("0.3pi", "pi", "-2pi").
double parse_real(std::string_view text, bool allow_pi_suffix);

/// Flat key=value model config; see README for the format.
BlochModel load_model(std::string_view config_text);

}  // namespace zakline
