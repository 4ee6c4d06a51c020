#pragma once

#include <optional>
#include <span>
#include <vector>

#include "zakline/eigsolver.hpp"
#include "zakline/grid.hpp"
#include "zakline/models.hpp"

namespace zakline {

struct GaugeTolerances {
  /// Minimum |<chi_j|phi_{j-1}>| before tracing gives up on the grid.
  double overlap = 1e-8;
  /// Allowed componentwise endpoint mismatch after smoothing.
  double closure = 1e-8;
  /// Component p must exceed this fraction of the largest modulus everywhere.
  double component = 1e-6;
  /// Band tracking is ambiguous when a competing overlap exceeds this
  /// fraction of the matched one.
  double crossing = 0.5;
};

struct GaugeOptions {
  EigTolerances eig;
  GaugeTolerances gauge;
};

/// Result of following one component's argument around the loop:
/// delta_phase = arg_M - arg_1 + 2 pi crossings.
struct Winding {
  double delta_phase = 0.0;
  int crossings = 0;
  Index component = 0;
};

/// One band followed around the loop, one pair per grid point (M pairs; the
/// last point is the first one shifted by a period).
struct BandTrack {
  int band = 0;
  std::vector<BiorthPair> pairs;
  bool traced = false;
  bool smoothed = false;
  std::optional<Winding> winding;

  int size() const { return static_cast<int>(pairs.size()); }
};

struct SmoothedBundle {
  LoopGrid grid;
  std::vector<BandTrack> tracks;

  bool smoothed() const;
  const BandTrack& track(int band) const;
};

/// Diagonalizes every grid point and follows the bands by overlap with the
/// previous point. Pairs are biorthonormal per point; phases are arbitrary.
SmoothedBundle solve_along_loop(const BlochModel& model, const LoopGrid& grid,
                                const GaugeOptions& options = {});

/// Lowest component index whose left-vector modulus stays above
/// tol_component * (max modulus) at every grid point.
Index usable_component(const BandTrack& track, double tol_component);

/// Stage one. Fixes the basepoint phase (component p of chi on the negative
/// imaginary axis), then walks j = 2..M removing the phases of
/// <chi_j|phi_{j-1}> and <chi_{j-1}|phi_j> and renormalizing.
BandTrack trace_phases(BandTrack track, const GaugeTolerances& tol = {});

/// Unwraps a sequence of stored args in [-pi, pi). A jump from the -pi side
/// to the +pi side counts as crossings -= 1, the opposite as += 1.
Winding winding_from_args(std::span<const double> args);

/// Winding of component p of the traced left vectors.
Winding phase_winding(const BandTrack& track, double tol_component);

/// f(x) = delta_phase * x on [0, 1].
double smoothing_function(double delta_phase, double x);

/// Stage two. chi_j *= exp(-i f(x_j)), phi_j *= exp(+i f(x_j)) with
/// x_j = (j - 1)/(M - 1). Throws ClosureFailure if the endpoints still differ.
BandTrack apply_smoothing(BandTrack track, const GaugeTolerances& tol = {});

/// Largest componentwise endpoint mismatch of left and right vectors.
double closure_defect(const BandTrack& track);

/// trace_phases -> phase_winding -> apply_smoothing for every band.
SmoothedBundle smooth_bundle(SmoothedBundle bundle, const GaugeTolerances& tol = {});

SmoothedBundle smooth_gauge(const BlochModel& model, const LoopGrid& grid,
                            const GaugeOptions& options = {});

}  // namespace zakline
