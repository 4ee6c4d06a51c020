// zakline: complex Zak phases of non-Hermitian Bloch Hamiltonians.
//
//   zakline single --t 1 --delta 0.5 --gamma 1 --theta 0.3pi --M 1001
//   zakline sweep  --gamma 1 --theta-steps 64 --output sweep.csv
//   zakline check  --model chain.cfg --M-list 251,501,1001

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zakline/zakline.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitPartial = 4;

// Config problems map to exit 2, everything numerical to exit 3.
struct Failure {
  int exit_code;
  std::string message;
};

bool is_config_error(zl_status s) {
  return s == ZL_ERR_INVALID_ARGUMENT || s == ZL_ERR_PARSE || s == ZL_ERR_VALIDATION ||
         s == ZL_ERR_IO;
}

void check(zl_status s) {
  if (s == ZL_OK) return;
  throw Failure{is_config_error(s) ? kExitUsage : kExitNumeric,
                std::string(zl_status_name(s)) + ": " + zl_last_error()};
}

struct ModelDeleter {
  void operator()(zl_model* m) const { zl_model_free(m); }
};
struct ResultDeleter {
  void operator()(zl_result* r) const { zl_result_free(r); }
};
struct SweepDeleter {
  void operator()(zl_sweep* s) const { zl_sweep_free(s); }
};
using ModelPtr = std::unique_ptr<zl_model, ModelDeleter>;
using ResultPtr = std::unique_ptr<zl_result, ResultDeleter>;
using SweepPtr = std::unique_ptr<zl_sweep, SweepDeleter>;

std::string fmt(double x, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Real part shown in (-pi/2, 3pi/2] so 0 and pi print without sign flips.
std::string fmt(zl_complex z) {
  double re = std::remainder(z.re - 0.5 * std::numbers::pi, 2.0 * std::numbers::pi);
  if (re <= -std::numbers::pi) re += 2.0 * std::numbers::pi;
  re += 0.5 * std::numbers::pi;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%+.12f %+.12fi", re, z.im);
  return buf;
}

struct Settings {
  std::string t = "1", delta = "0", gamma = "0", theta = "0";
  std::string theta_min = "0", theta_max = "2pi";
  int theta_steps = 64;
  int M = 1001;
  std::string method = "both";
  std::string difference = "five-point";
  std::string model_path;
  std::string output;
  std::optional<int> workers;
  bool emit_analytic = true;
  std::vector<int> m_list{251, 501, 1001};
  std::optional<double> tol_resid, tol_ortho, tol_pair, tol_selforth, tol_degeneracy,
      tol_overlap, tol_closure, tol_component, tol_pt, tol_quant;
};

double parse_field(const std::string& text, const char* field, bool allow_pi) {
  double v = 0.0;
  if (zl_parse_real(text.c_str(), allow_pi ? 1 : 0, &v) != ZL_OK) {
    throw Failure{kExitUsage, std::string("field '") + field + "': " + zl_last_error()};
  }
  return v;
}

int grid_points(int M) {
  if (M < 3) throw Failure{kExitUsage, "grid too coarse: --M must be at least 3"};
  if (M % 2 == 0) {
    std::cerr << "warning: --M " << M << " is even; using " << M + 1 << "\n";
    return M + 1;
  }
  return M;
}

int worker_count(const Settings& s) {
  if (s.workers) {
    if (*s.workers < 0) throw Failure{kExitUsage, "--workers must be non-negative"};
    return *s.workers;
  }
  if (const char* env = std::getenv("ZAKLINE_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 0) {
      throw Failure{kExitUsage, "ZAKLINE_WORKERS must be a non-negative integer"};
    }
    return static_cast<int>(n);
  }
  return 0;
}

zl_run_options run_options(const Settings& s) {
  zl_run_options o = zl_default_run_options();
  o.grid_points = grid_points(s.M);
  if (s.method == "derivative") {
    o.methods = ZL_METHODS_DERIVATIVE;
  } else if (s.method == "wilson") {
    o.methods = ZL_METHODS_WILSON;
  } else {
    o.methods = ZL_METHODS_BOTH;
  }
  if (s.difference == "central") {
    o.difference = ZL_DIFFERENCE_CENTRAL;
  } else if (s.difference == "forward") {
    o.difference = ZL_DIFFERENCE_FORWARD;
  } else {
    o.difference = ZL_DIFFERENCE_FIVE_POINT;
  }
  o.emit_analytic = s.emit_analytic ? 1 : 0;
  o.workers = worker_count(s);
  auto apply = [](const std::optional<double>& v, double& slot, const char* name) {
    if (!v) return;
    if (!(*v > 0.0)) throw Failure{kExitUsage, std::string("--") + name + " must be positive"};
    slot = *v;
  };
  apply(s.tol_resid, o.tol.resid, "tol-resid");
  apply(s.tol_ortho, o.tol.ortho, "tol-ortho");
  apply(s.tol_pair, o.tol.pair, "tol-pair");
  apply(s.tol_selforth, o.tol.selforth, "tol-selforth");
  apply(s.tol_degeneracy, o.tol.degeneracy, "tol-degeneracy");
  apply(s.tol_overlap, o.tol.overlap, "tol-overlap");
  apply(s.tol_closure, o.tol.closure, "tol-closure");
  apply(s.tol_component, o.tol.component, "tol-component");
  apply(s.tol_pt, o.tol.pt, "tol-pt");
  apply(s.tol_quant, o.tol.quant, "tol-quant");
  return o;
}

zl_ssh_params flag_params(const Settings& s) {
  return {parse_field(s.t, "t", false), parse_field(s.delta, "delta", false),
          parse_field(s.theta, "theta", true), parse_field(s.gamma, "gamma", false)};
}

ModelPtr make_model(const Settings& s) {
  zl_model* raw = nullptr;
  if (!s.model_path.empty()) {
    check(zl_model_load_file(s.model_path.c_str(), &raw));
  } else {
    const zl_ssh_params p = flag_params(s);
    check(zl_model_create_ssh(&p, &raw));
  }
  return ModelPtr(raw);
}

// Opened before any computation so a bad path fails fast with exit 2.
std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kExitUsage, "cannot write output file '" + path + "'"};
  return out;
}

std::string sweep_csv(const zl_sweep* sweep) {
  size_t needed = 0;
  check(zl_sweep_csv(sweep, nullptr, 0, &needed));
  std::string text(needed, '\0');
  check(zl_sweep_csv(sweep, text.data(), text.size(), &needed));
  text.resize(needed - 1);
  return text;
}

bool hermitian(const zl_model* model) {
  const int dim = zl_model_dim(model);
  std::vector<zl_complex> h(static_cast<size_t>(dim * dim));
  for (int s = 0; s < 16; ++s) {
    const double k = -std::numbers::pi + 2.0 * std::numbers::pi * s / 16.0;
    check(zl_model_evaluate(model, k, h.data(), h.size()));
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        const zl_complex a = h[static_cast<size_t>(i * dim + j)];
        const zl_complex b = h[static_cast<size_t>(j * dim + i)];
        if (std::hypot(a.re - b.re, a.im + b.im) > 1e-14) return false;
      }
    }
  }
  return true;
}

std::string quant_value_name(double v) { return v > 1.0 ? "pi" : "0"; }

int cmd_single(const Settings& s) {
  const zl_run_options opts = run_options(s);
  std::ofstream out;
  if (!s.output.empty()) out = open_output(s.output);
  const ModelPtr model = make_model(s);

  zl_result* raw = nullptr;
  check(zl_compute(model.get(), &opts, &raw));
  const ResultPtr result(raw);

  zl_pt_info pt{};
  check(zl_result_pt(result.get(), &pt));
  std::cout << "grid points: " << opts.grid_points << "\n";
  std::cout << "PT symmetry: " << (pt.broken ? "broken" : "unbroken")
            << " (max |Im E| gap " << fmt(pt.max_imag_gap, 3) << ")\n";

  for (size_t i = 0; i < zl_result_band_count(result.get()); ++i) {
    zl_band_result b{};
    check(zl_result_band(result.get(), i, &b));
    std::cout << "band " << b.band << "\n";
    if (b.has_derivative) std::cout << "  derivative  gamma = " << fmt(b.gamma_derivative) << "\n";
    if (b.has_wilson) std::cout << "  wilson      gamma = " << fmt(b.gamma_wilson) << "\n";
    if (b.has_analytic) std::cout << "  analytic    gamma = " << fmt(b.gamma_analytic) << "\n";
    if (!std::isnan(b.oracle_gap)) std::cout << "  |derivative - wilson| = " << fmt(b.oracle_gap, 3) << "\n";
    if (b.has_winding) {
      std::cout << "  winding X = " << b.crossings << " (component " << b.component + 1
                << ", delta phase " << fmt(b.delta_phase, 6) << ")\n";
    }
    std::cout << "  Re gamma " << (b.quantized ? "quantized to " : "not quantized, nearest ")
              << quant_value_name(b.quant_value) << " (residual " << fmt(b.quant_residual, 3)
              << ")\n";
  }
  if (hermitian(model.get())) {
    std::cout << "note: H(k) is Hermitian; Im gamma vanishes up to discretization and roundoff\n";
  }

  if (out.is_open()) {
    zl_ssh_params p{};
    if (!zl_model_ssh_params(model.get(), &p)) {
      throw Failure{kExitUsage, "--output needs an ssh model"};
    }
    zl_sweep* sraw = nullptr;
    check(zl_sweep_run(&p, p.theta, p.theta, 1, &opts, &sraw));
    const SweepPtr sweep(sraw);
    out << sweep_csv(sweep.get());
    if (!out.flush()) throw Failure{kExitUsage, "write to '" + s.output + "' failed"};
  }
  return kExitOk;
}

int cmd_sweep(const Settings& s) {
  const zl_run_options opts = run_options(s);
  if (s.theta_steps < 1) throw Failure{kExitUsage, "--theta-steps must be at least 1"};
  const double tmin = parse_field(s.theta_min, "theta-min", true);
  const double tmax = parse_field(s.theta_max, "theta-max", true);
  std::ofstream out;
  if (!s.output.empty()) out = open_output(s.output);

  zl_ssh_params base{};
  if (!s.model_path.empty()) {
    const ModelPtr model = make_model(s);
    if (!zl_model_ssh_params(model.get(), &base)) {
      throw Failure{kExitUsage, "sweep needs an ssh model"};
    }
  } else {
    base = flag_params(s);
  }

  zl_sweep* raw = nullptr;
  check(zl_sweep_run(&base, tmin, tmax, s.theta_steps, &opts, &raw));
  const SweepPtr sweep(raw);

  const std::string csv = sweep_csv(sweep.get());
  if (out.is_open()) {
    out << csv;
    if (!out.flush()) throw Failure{kExitUsage, "write to '" + s.output + "' failed"};
  } else {
    std::cout << csv;
  }

  size_t failed_unbroken = 0, failed_broken = 0, broken = 0;
  const size_t rows = zl_sweep_row_count(sweep.get());
  for (size_t i = 0; i < rows; ++i) {
    zl_sweep_row row{};
    check(zl_sweep_get_row(sweep.get(), i, &row));
    broken += row.pt_broken ? 1 : 0;
    if (!row.failed) continue;
    if (row.pt_broken) {
      ++failed_broken;
    } else {
      ++failed_unbroken;
      std::cerr << "row " << i << " (theta " << fmt(row.theta) << "): "
                << zl_sweep_row_error(sweep.get(), i) << "\n";
    }
  }
  std::cerr << rows << " rows, " << broken << " PT-broken";
  if (failed_broken) std::cerr << ", " << failed_broken << " broken rows without a phase";
  if (failed_unbroken) std::cerr << ", " << failed_unbroken << " unbroken rows failed";
  std::cerr << "\n";
  return failed_unbroken ? kExitPartial : kExitOk;
}

std::string axis_name(const double axis[3]) {
  static const char* names[3] = {"sigma1", "sigma2", "sigma3"};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(axis[i]) > 1.0 - 1e-9) return names[i];
  }
  return "n.sigma with n = (" + fmt(axis[0], 6) + ", " + fmt(axis[1], 6) + ", " +
         fmt(axis[2], 6) + ")";
}

int cmd_check(const Settings& s) {
  const zl_run_options opts = run_options(s);
  const ModelPtr model = make_model(s);
  const int dim = zl_model_dim(model.get());

  zl_pt_info pt{};
  std::vector<double> critical(16);
  check(zl_pt_classify(model.get(), opts.grid_points, opts.tol.pt, &pt, critical.data(),
                       critical.size()));
  std::cout << "PT classification (M = " << opts.grid_points << "): "
            << (pt.broken ? "PT-broken" : "PT-unbroken") << ", max |Im E| gap "
            << fmt(pt.max_imag_gap, 3) << "\n";
  if (pt.critical_count) {
    std::cout << "  gap closings near k =";
    for (size_t i = 0; i < pt.critical_count && i < critical.size(); ++i) {
      std::cout << " " << fmt(critical[i], 6);
    }
    if (pt.critical_count > critical.size()) std::cout << " ...";
    std::cout << "\n";
  }

  if (dim == 2) {
    double axis[3] = {0, 0, 0}, residual = 0.0;
    check(zl_chiral_residual(model.get(), opts.grid_points, axis, &residual));
    if (residual < 1e-12) {
      std::cout << "chiral symmetry present (" << axis_name(axis) << "), residual < 1e-12\n";
    } else {
      std::cout << "no chiral symmetry: best axis " << axis_name(axis) << ", residual "
                << fmt(residual, 3) << "\n";
    }
  }

  std::vector<int> sizes;
  for (const int M : s.m_list) sizes.push_back(grid_points(M));
  std::cout << "convergence (band, method, M, gamma, |change|):\n";
  bool failed = false;
  for (int band = 1; band <= dim; ++band) {
    for (const zl_methods m : {ZL_METHODS_DERIVATIVE, ZL_METHODS_WILSON}) {
      std::vector<zl_convergence_row> rows(sizes.size());
      const char* name = m == ZL_METHODS_WILSON ? "wilson" : "derivative";
      check(zl_convergence_study(model.get(), band, sizes.data(), sizes.size(), m, &opts,
                                 rows.data()));
      bool monotone = true, exact = rows.size() >= 2;
      for (size_t i = 0; i < rows.size(); ++i) {
        std::cout << "  " << band << "  " << name << "  " << rows[i].grid_points << "  ";
        if (rows[i].failed) {
          std::cout << "failed: " << rows[i].error << "\n";
          failed = true;
          exact = monotone = false;
          continue;
        }
        if (i >= 1 && !(rows[i].delta_prev < 1e-12)) exact = false;
        std::cout << fmt(rows[i].gamma) << "  "
                  << (std::isnan(rows[i].delta_prev) ? "-" : fmt(rows[i].delta_prev, 3)) << "\n";
        if (i >= 2 && !(rows[i].delta_prev < rows[i - 1].delta_prev)) monotone = false;
      }
      if (exact) {
        std::cout << "    converged to roundoff\n";
      } else if (!failed && rows.size() >= 3) {
        std::cout << "    " << (monotone ? "monotone" : "not monotone") << "\n";
      }
    }
  }
  // Near exceptional points the broken phase has no smooth bands; that is a
  // verdict, not a failure.
  if (failed && !pt.broken) {
    std::cerr << "error: convergence study failed for a PT-unbroken model\n";
    return kExitNumeric;
  }
  return kExitOk;
}

void add_model_flags(CLI::App* cmd, Settings& s, bool single_theta) {
  cmd->add_option("--t", s.t, "mean hopping t > 0")->capture_default_str();
  cmd->add_option("--delta", s.delta, "dimerization strength in [0, 1)")->capture_default_str();
  cmd->add_option("--gamma", s.gamma, "gain/loss strength >= 0")->capture_default_str();
  if (single_theta) {
    cmd->add_option("--theta", s.theta, "dimerization angle (accepts a pi suffix)")
        ->capture_default_str();
  }
  cmd->add_option("--model", s.model_path, "model config file (replaces the inline flags)");
}

void add_run_flags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--M", s.M, "grid points on the Brillouin zone, odd, >= 3")
      ->capture_default_str();
  cmd->add_option("--method", s.method, "derivative, wilson or both")
      ->check(CLI::IsMember({"derivative", "wilson", "both"}))
      ->capture_default_str();
  cmd->add_option("--difference", s.difference, "derivative stencil: five-point, central or forward")
      ->check(CLI::IsMember({"five-point", "central", "forward"}))
      ->capture_default_str();
  cmd->add_option("--workers", s.workers, "worker threads (default $ZAKLINE_WORKERS or all cores)");
  cmd->add_flag("--emit-analytic,!--no-emit-analytic", s.emit_analytic,
                "attach closed-form values for unbroken ssh models");
  cmd->add_option("--tol-resid", s.tol_resid);
  cmd->add_option("--tol-ortho", s.tol_ortho);
  cmd->add_option("--tol-pair", s.tol_pair);
  cmd->add_option("--tol-selforth", s.tol_selforth);
  cmd->add_option("--tol-degeneracy", s.tol_degeneracy);
  cmd->add_option("--tol-overlap", s.tol_overlap);
  cmd->add_option("--tol-closure", s.tol_closure);
  cmd->add_option("--tol-component", s.tol_component);
  cmd->add_option("--tol-pt", s.tol_pt);
  cmd->add_option("--tol-quant", s.tol_quant);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complex Zak phases of non-Hermitian Bloch Hamiltonians", "zakline"};
  app.set_version_flag("--version", zl_version());
  app.require_subcommand(1);
  Settings s;

  auto* single = app.add_subcommand("single", "phase of every band at one parameter point");
  add_model_flags(single, s, true);
  add_run_flags(single, s);
  single->add_option("--output", s.output, "also write the point as a one-row CSV");

  auto* sweep = app.add_subcommand("sweep", "CSV of both band phases over a theta range");
  add_model_flags(sweep, s, false);
  add_run_flags(sweep, s);
  sweep->add_option("--theta-min", s.theta_min)->capture_default_str();
  sweep->add_option("--theta-max", s.theta_max, "excluded from the grid")->capture_default_str();
  sweep->add_option("--theta-steps", s.theta_steps)->capture_default_str();
  sweep->add_option("--output", s.output, "CSV path (default stdout)");

  auto* diag = app.add_subcommand("check", "PT status, chiral symmetry and grid convergence");
  add_model_flags(diag, s, true);
  add_run_flags(diag, s);
  diag->add_option("--M-list", s.m_list, "increasing grid sizes for the convergence table")
      ->delimiter(',')
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (single->parsed()) return cmd_single(s);
    if (sweep->parsed()) return cmd_sweep(s);
    return cmd_check(s);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  }
}
