#include "zakline/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zakline/error.hpp"

namespace zakline {

namespace {

// Stored args live in [-pi, pi).
double standard_arg(Complex z) {
  const double a = std::arg(z);
  return a >= kPi ? a - kTwoPi : a;
}

// Reorders `current` so that current[n] continues previous[n].
std::vector<BiorthPair> follow_bands(const std::vector<BiorthPair>& previous,
                                     std::vector<BiorthPair> current, double crossing,
                                     double coordinate) {
  const std::size_t n = previous.size();
  Eigen::MatrixXd overlap(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t p = 0; p < n; ++p) {
      overlap(static_cast<Index>(m), static_cast<Index>(p)) =
          std::abs(pairing(current[m].left, previous[p].right));
    }
  }

  std::vector<long> match(n, -1);  // previous band -> current index
  Eigen::MatrixXd work = overlap;
  for (std::size_t step = 0; step < n; ++step) {
    Index row = 0, col = 0;
    const double best = work.maxCoeff(&row, &col);
    if (!(best > 0.0)) break;
    for (Index p = 0; p < static_cast<Index>(n); ++p) {
      if (p != col && overlap(row, p) > crossing * best) {
        fail(ErrorCode::BandCrossing, "band tracking is ambiguous near k = " +
                                          std::to_string(coordinate) +
                                          "; refine the grid or check for a band crossing");
      }
    }
    for (Index m = 0; m < static_cast<Index>(n); ++m) {
      if (m != row && overlap(m, col) > crossing * best) {
        fail(ErrorCode::BandCrossing, "band tracking is ambiguous near k = " +
                                          std::to_string(coordinate) +
                                          "; refine the grid or check for a band crossing");
      }
    }
    match[static_cast<std::size_t>(col)] = static_cast<long>(row);
    work.row(row).setConstant(-1.0);
    work.col(col).setConstant(-1.0);
  }
  if (std::find(match.begin(), match.end(), -1L) != match.end()) {
    fail(ErrorCode::BandCrossing,
         "band tracking failed near k = " + std::to_string(coordinate));
  }

  std::vector<BiorthPair> ordered;
  ordered.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    ordered.push_back(std::move(current[static_cast<std::size_t>(match[p])]));
    ordered.back().band = previous[p].band;
  }
  return ordered;
}

}  // namespace

bool SmoothedBundle::smoothed() const {
  return !tracks.empty() &&
         std::all_of(tracks.begin(), tracks.end(), [](const BandTrack& t) { return t.smoothed; });
}

const BandTrack& SmoothedBundle::track(int band) const {
  if (band < 1 || band > static_cast<int>(tracks.size())) {
    fail(ErrorCode::InvalidArgument, "band index " + std::to_string(band) + " out of range");
  }
  return tracks[static_cast<std::size_t>(band - 1)];
}

SmoothedBundle solve_along_loop(const BlochModel& model, const LoopGrid& grid,
                                const GaugeOptions& options) {
  const Index dim = model_dim(model);
  std::vector<BandTrack> tracks(static_cast<std::size_t>(dim));
  for (Index n = 0; n < dim; ++n) {
    tracks[static_cast<std::size_t>(n)].band = static_cast<int>(n) + 1;
    tracks[static_cast<std::size_t>(n)].pairs.reserve(static_cast<std::size_t>(grid.size()));
  }

  std::vector<BiorthPair> previous;
  for (int j = 0; j < grid.size(); ++j) {
    const Matrix H = evaluate(model, grid[j]);
    auto set = eigensystem(H, options.eig, previous);
    std::vector<BiorthPair> pairs = std::move(set.pairs);
    if (!previous.empty()) {
      pairs = follow_bands(previous, std::move(pairs), options.gauge.crossing, grid[j]);
    }
    for (std::size_t n = 0; n < pairs.size(); ++n) tracks[n].pairs.push_back(pairs[n]);
    previous = std::move(pairs);
  }
  return {grid, std::move(tracks)};
}

Index usable_component(const BandTrack& track, double tol_component) {
  if (track.pairs.empty()) fail(ErrorCode::InvalidArgument, "empty band track");
  double largest = 0.0;
  for (const auto& p : track.pairs) largest = std::max(largest, p.left.cwiseAbs().maxCoeff());
  const Index dim = track.pairs.front().left.size();
  for (Index c = 0; c < dim; ++c) {
    const bool usable = std::all_of(track.pairs.begin(), track.pairs.end(), [&](const auto& p) {
      return std::abs(p.left(c)) > tol_component * largest;
    });
    if (usable) return c;
  }
  fail(ErrorCode::NoUsableComponent, "band " + std::to_string(track.band) +
                                         ": every left-vector component vanishes somewhere "
                                         "on the loop");
}

BandTrack trace_phases(BandTrack track, const GaugeTolerances& tol) {
  const Index p = usable_component(track, tol.component);
  auto& pairs = track.pairs;

  // Basepoint: chi_1[p] on the negative imaginary axis. Keeps stored args of
  // quantized holonomies (0 or pi) at +-pi/2, away from the branch cut.
  const Complex base = std::polar(1.0, -std::arg(pairs[0].left(p)) - 0.5 * kPi);
  pairs[0].left *= base;
  pairs[0].right /= base;

  for (std::size_t j = 1; j < pairs.size(); ++j) {
    const Complex forward = pairing(pairs[j].left, pairs[j - 1].right);
    const Complex backward = pairing(pairs[j - 1].left, pairs[j].right);
    if (std::abs(forward) < tol.overlap || std::abs(backward) < tol.overlap) {
      fail(ErrorCode::VanishingOverlap,
           "band " + std::to_string(track.band) + ": consecutive states are orthogonal at "
           "grid point " + std::to_string(j + 1) + "; refine the grid");
    }
    pairs[j].left *= std::polar(1.0, -std::arg(forward));
    pairs[j].right *= std::polar(1.0, -std::arg(backward));
    const Complex root = std::sqrt(pairs[j].self_overlap());
    pairs[j].left /= root;
    pairs[j].right /= root;
  }
  track.traced = true;
  track.smoothed = false;
  track.winding.reset();
  return track;
}

Winding winding_from_args(std::span<const double> args) {
  Winding w;
  if (args.empty()) return w;
  for (std::size_t j = 1; j < args.size(); ++j) {
    const double step = args[j] - args[j - 1];
    if (step > kPi) {
      --w.crossings;  // -pi side -> +pi side
    } else if (step < -kPi) {
      ++w.crossings;
    }
  }
  w.delta_phase = args.back() - args.front() + kTwoPi * w.crossings;
  return w;
}

Winding phase_winding(const BandTrack& track, double tol_component) {
  if (!track.traced) {
    fail(ErrorCode::InvalidArgument, "phase winding needs a traced band track");
  }
  const Index p = usable_component(track, tol_component);
  std::vector<double> args;
  args.reserve(track.pairs.size());
  for (const auto& pair : track.pairs) args.push_back(standard_arg(pair.left(p)));
  Winding w = winding_from_args(args);
  w.component = p;
  return w;
}

double smoothing_function(double delta_phase, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "smoothing argument must lie in [0, 1]");
  }
  return delta_phase * x;
}

double closure_defect(const BandTrack& track) {
  if (track.pairs.empty()) return 0.0;
  const auto& first = track.pairs.front();
  const auto& last = track.pairs.back();
  return std::max((last.left - first.left).cwiseAbs().maxCoeff(),
                  (last.right - first.right).cwiseAbs().maxCoeff());
}

BandTrack apply_smoothing(BandTrack track, const GaugeTolerances& tol) {
  if (!track.winding) {
    fail(ErrorCode::InvalidArgument, "apply_smoothing needs winding data");
  }
  const double delta = track.winding->delta_phase;
  const int last = track.size() - 1;
  for (int j = 0; j <= last; ++j) {
    const double f = smoothing_function(delta, static_cast<double>(j) / last);
    auto& pair = track.pairs[static_cast<std::size_t>(j)];
    pair.left *= std::polar(1.0, -f);
    pair.right *= std::polar(1.0, f);
  }
  const double defect = closure_defect(track);
  if (!(defect <= tol.closure)) {
    fail(ErrorCode::ClosureFailure,
         "band " + std::to_string(track.band) + ": endpoints differ by " +
             std::to_string(defect) + " after smoothing");
  }
  track.smoothed = true;
  return track;
}

SmoothedBundle smooth_bundle(SmoothedBundle bundle, const GaugeTolerances& tol) {
  for (auto& track : bundle.tracks) {
    track = trace_phases(std::move(track), tol);
    track.winding = phase_winding(track, tol.component);
    track = apply_smoothing(std::move(track), tol);
  }
  return bundle;
}

SmoothedBundle smooth_gauge(const BlochModel& model, const LoopGrid& grid,
                            const GaugeOptions& options) {
  return smooth_bundle(solve_along_loop(model, grid, options), options.gauge);
}

}  // namespace zakline
