#include "zakline/berry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

#include "zakline/analytic.hpp"
#include "zakline/error.hpp"

namespace zakline {

namespace {

// Distance between two complex phases with the real part taken mod 2 pi.
double phase_distance(Complex a, Complex b) {
  return std::hypot(reduce_angle(a.real() - b.real()), a.imag() - b.imag());
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

double plotting_real(double x) { return reduce_angle(x - 0.5 * kPi) + 0.5 * kPi; }

}  // namespace

double reduce_angle(double x) {
  double r = std::remainder(x, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double ZakResult::reduced_real() const { return reduce_angle(gamma.real()); }

Quantization quantization_check(Complex gamma, double tol) {
  const double r = std::abs(reduce_angle(gamma.real()));
  const double to_zero = r;
  const double to_pi = kPi - r;
  Quantization q;
  q.value = to_pi < to_zero ? kPi : 0.0;
  q.residual = std::min(to_zero, to_pi);
  q.quantized = q.residual <= tol;
  return q;
}

ZakResult zak_derivative(const SmoothedBundle& bundle, int band, Difference difference,
                         double tol_closure) {
  const BandTrack& track = bundle.track(band);
  if (!track.smoothed || !(closure_defect(track) <= tol_closure)) {
    fail(ErrorCode::NotSmoothed,
         "band " + std::to_string(band) + " is not gauge smoothed and single valued");
  }
  const auto& pairs = track.pairs;
  const auto distinct = static_cast<long>(pairs.size() - 1);
  // Periodic index over the distinct points.
  auto phi = [&](long j) -> const Vector& {
    return pairs[static_cast<std::size_t>(((j % distinct) + distinct) % distinct)].right;
  };
  Complex sum = 0.0;
  for (long j = 0; j < distinct; ++j) {
    const RowVector& chi = pairs[static_cast<std::size_t>(j)].left;
    switch (difference) {
      case Difference::FivePoint:
        sum += pairing(chi, (8.0 * (phi(j + 1) - phi(j - 1)) - (phi(j + 2) - phi(j - 2))) / 12.0);
        break;
      case Difference::Central:
        sum += 0.5 * pairing(chi, phi(j + 1) - phi(j - 1));
        break;
      case Difference::Forward:
        sum += pairing(chi, phi(j + 1) - phi(j));
        break;
    }
  }
  ZakResult out;
  out.band = band;
  out.gamma = kI * sum;
  out.method = Method::Derivative;
  out.grid_points = static_cast<int>(pairs.size());
  out.quant_residual = quantization_check(out.gamma, 0.0).residual;
  return out;
}

ZakResult zak_wilson(const SmoothedBundle& bundle, int band, WilsonLinks links,
                     double tol_overlap) {
  const BandTrack& track = bundle.track(band);
  const auto& pairs = track.pairs;
  const std::size_t distinct = pairs.size() - 1;
  Complex sum = 0.0;
  for (std::size_t j = 0; j < distinct; ++j) {
    const std::size_t next = (j + 1) % distinct;
    const Complex forward = pairing(pairs[j].left, pairs[next].right);
    const Complex backward = pairing(pairs[next].left, pairs[j].right);
    if (std::abs(forward) < tol_overlap || std::abs(backward) < tol_overlap) {
      fail(ErrorCode::VanishingOverlap, "band " + std::to_string(band) +
                                            ": vanishing link at grid point " +
                                            std::to_string(j + 1) + "; refine the grid");
    }
    const Complex link =
        links == WilsonLinks::Symmetric ? forward / std::sqrt(forward * backward) : forward;
    sum += std::log(link);
  }
  ZakResult out;
  out.band = band;
  out.gamma = kI * sum;
  out.method = Method::Wilson;
  out.grid_points = static_cast<int>(pairs.size());
  out.quant_residual = quantization_check(out.gamma, 0.0).residual;
  return out;
}

const ZakResult& BandReport::primary() const {
  if (derivative) return *derivative;
  if (wilson) return *wilson;
  fail(ErrorCode::InvalidArgument, "band report holds no result");
}

Quantization BandReport::quantization(double tol) const {
  return quantization_check(wilson ? wilson->gamma : primary().gamma, tol);
}

ZakReport compute_zak(const BlochModel& model, const RunOptions& options) {
  const LoopGrid grid = LoopGrid::brillouin_zone(options.grid_points);
  ZakReport report;
  report.pt = pt_classify(model, grid, options.tol_pt);

  const SmoothedBundle raw = solve_along_loop(model, grid, options.gauge);
  const bool want_wilson = options.methods != MethodSelection::Derivative;
  const bool want_derivative = options.methods != MethodSelection::Wilson;

  std::optional<SmoothedBundle> smoothed;
  if (want_derivative) smoothed = smooth_bundle(raw, options.gauge.gauge);

  for (int band = 1; band <= static_cast<int>(raw.tracks.size()); ++band) {
    BandReport b;
    b.band = band;
    if (want_wilson) {
      b.wilson = zak_wilson(raw, band, options.links, options.gauge.gauge.overlap);
      b.wilson->pt = report.pt;
    }
    if (want_derivative) {
      b.derivative = zak_derivative(*smoothed, band, options.difference,
                                    options.gauge.gauge.closure);
      b.derivative->pt = report.pt;
      b.winding = smoothed->track(band).winding;
    }
    if (b.wilson && b.derivative) {
      const double gap = phase_distance(b.derivative->gamma, b.wilson->gamma);
      b.derivative->oracle_gap = gap;
      b.wilson->oracle_gap = gap;
    }
    report.bands.push_back(std::move(b));
  }
  return report;
}

std::vector<double> theta_grid(double theta_min, double theta_max, int steps) {
  if (steps < 1) fail(ErrorCode::InvalidArgument, "theta steps must be at least 1");
  if (!std::isfinite(theta_min) || !std::isfinite(theta_max)) {
    fail(ErrorCode::InvalidArgument, "theta range must be finite");
  }
  std::vector<double> out(static_cast<std::size_t>(steps));
  const double step = (theta_max - theta_min) / steps;
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = theta_min + step * i;
  return out;
}

namespace {

SweepRow sweep_row(const SshParams& base, double theta, const RunOptions& options) {
  SweepRow row;
  row.theta = theta;
  SshParams p = base;
  p.theta = theta;
  const BlochModel model = SshModel{p};
  try {
    const ZakReport report = compute_zak(model, options);
    row.pt_broken = report.pt.broken;
    for (std::size_t n = 0; n < 2 && n < report.bands.size(); ++n) {
      const auto& b = report.bands[n];
      row.gamma[n] = b.primary().gamma;
      row.quant_residual[n] = b.quantization(options.tol_quant).residual;
      if (b.derivative) {
        row.derivative[n] = b.derivative->gamma;
        row.oracle_gap[n] = b.derivative->oracle_gap;
      }
      if (b.wilson) row.wilson[n] = b.wilson->gamma;
      row.winding[n] = b.winding;
    }
  } catch (const Error& e) {
    row.error = std::string(error_name(e.code())) + ": " + e.what();
    // Still classify so broken rows are flagged even when the pipeline fails.
    try {
      row.pt_broken = pt_classify(model, LoopGrid::brillouin_zone(options.grid_points),
                                  options.tol_pt)
                          .broken;
    } catch (const Error&) {
    }
  }
  if (options.emit_analytic && !row.pt_broken) {
    try {
      const auto exact = analytic::from_ssh(p);
      row.analytic = {exact.lower, exact.upper};
    } catch (const Error&) {
    }
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep(const SshParams& base, std::span<const double> thetas,
                            const RunOptions& options) {
  base.validate();
  LoopGrid::brillouin_zone(options.grid_points);  // validates M up front

  std::vector<SweepRow> rows(thetas.size());
  unsigned workers = options.workers > 0 ? static_cast<unsigned>(options.workers)
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, rows.size())));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      rows[i] = sweep_row(base, thetas[i], options);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_study(const BlochModel& model, int band,
                                              std::span<const int> grid_sizes, Method method,
                                              const RunOptions& options) {
  for (std::size_t i = 1; i < grid_sizes.size(); ++i) {
    if (grid_sizes[i] <= grid_sizes[i - 1]) {
      fail(ErrorCode::InvalidArgument, "grid sizes must be increasing");
    }
  }
  std::vector<ConvergenceRow> out;
  for (const int M : grid_sizes) {
    const LoopGrid grid = LoopGrid::brillouin_zone(M);
    ConvergenceRow row;
    row.grid_points = M;
    try {
      const SmoothedBundle raw = solve_along_loop(model, grid, options.gauge);
      row.gamma = method == Method::Wilson
                      ? zak_wilson(raw, band, options.links, options.gauge.gauge.overlap).gamma
                      : zak_derivative(smooth_bundle(raw, options.gauge.gauge), band,
                                       options.difference, options.gauge.gauge.closure)
                            .gamma;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidArgument) throw;
      row.error = std::string(error_name(e.code())) + ": " + e.what();
    }
    if (!out.empty()) row.delta_prev = phase_distance(row.gamma, out.back().gamma);
    out.push_back(std::move(row));
  }
  return out;
}

std::string csv_header() {
  return "theta,re_g1,im_g1,re_g2,im_g2,re_g1_analytic,im_g1_analytic,re_g2_analytic,"
         "im_g2_analytic,pt_broken,quant_res_1,quant_res_2,oracle_gap_1,oracle_gap_2";
}

std::string csv_row(const SweepRow& row) {
  std::string line = format_double(row.theta);
  auto cell = [&line](const std::string& s) {
    line += ',';
    line += s;
  };
  for (const Complex g : row.gamma) {
    cell(format_double(std::isnan(g.real()) ? g.real() : plotting_real(g.real())));
    cell(format_double(g.imag()));
  }
  for (const auto& a : row.analytic) {
    cell(a ? format_double(plotting_real(a->real())) : "");
    cell(a ? format_double(a->imag()) : "");
  }
  cell(row.pt_broken ? "1" : "0");
  for (const double q : row.quant_residual) cell(format_double(q));
  for (std::size_t n = 0; n < 2; ++n) {
    const bool computed = row.error || (row.derivative[n] && row.wilson[n]);
    cell(computed ? format_double(row.oracle_gap[n]) : "");
  }
  return line;
}

void write_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << csv_header() << '\n';
  for (const auto& row : rows) out << csv_row(row) << '\n';
}

}  // namespace zakline
