#include "zakline/zakline.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "zakline/analytic.hpp"
#include "zakline/berry.hpp"
#include "zakline/error.hpp"
#include "zakline/models.hpp"

struct zl_model {
  zakline::BlochModel model;
};

struct zl_result {
  zakline::ZakReport report;
  std::vector<zl_band_result> bands;
};

struct zl_sweep {
  std::vector<zakline::SweepRow> rows;
};

namespace {

thread_local std::string last_error;

zl_status status_of(zakline::ErrorCode code) {
  using zakline::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return ZL_ERR_INVALID_ARGUMENT;
    case ErrorCode::ParseError: return ZL_ERR_PARSE;
    case ErrorCode::ValidationError: return ZL_ERR_VALIDATION;
    case ErrorCode::DefectiveMatrix: return ZL_ERR_DEFECTIVE_MATRIX;
    case ErrorCode::NoConvergence: return ZL_ERR_NO_CONVERGENCE;
    case ErrorCode::PairingAmbiguous: return ZL_ERR_PAIRING_AMBIGUOUS;
    case ErrorCode::SelfOrthogonal: return ZL_ERR_SELF_ORTHOGONAL;
    case ErrorCode::SubspaceCollapse: return ZL_ERR_SUBSPACE_COLLAPSE;
    case ErrorCode::BandCrossing: return ZL_ERR_BAND_CROSSING;
    case ErrorCode::VanishingOverlap: return ZL_ERR_VANISHING_OVERLAP;
    case ErrorCode::NoUsableComponent: return ZL_ERR_NO_USABLE_COMPONENT;
    case ErrorCode::ClosureFailure: return ZL_ERR_CLOSURE_FAILURE;
    case ErrorCode::NotSmoothed: return ZL_ERR_NOT_SMOOTHED;
    case ErrorCode::DomainError: return ZL_ERR_DOMAIN;
    case ErrorCode::BrokenRegime: return ZL_ERR_BROKEN_REGIME;
    case ErrorCode::DegenerateRatio: return ZL_ERR_DEGENERATE_RATIO;
  }
  return ZL_ERR_INTERNAL;
}

zl_status set_error(zl_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
zl_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return ZL_OK;
  } catch (const zakline::Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ZL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ZL_ERR_INTERNAL, e.what());
  }
}

void require(bool condition, const char* message) {
  if (!condition) zakline::fail(zakline::ErrorCode::InvalidArgument, message);
}

zl_complex to_c(zakline::Complex z) { return {z.real(), z.imag()}; }

zakline::SshParams from_c(const zl_ssh_params& p) { return {p.t, p.delta, p.theta, p.gamma}; }

zakline::RunOptions run_options(const zl_run_options* in) {
  const zl_run_options opts = in ? *in : zl_default_run_options();
  zakline::RunOptions out;
  out.grid_points = opts.grid_points;
  switch (opts.methods) {
    case ZL_METHODS_DERIVATIVE: out.methods = zakline::MethodSelection::Derivative; break;
    case ZL_METHODS_WILSON: out.methods = zakline::MethodSelection::Wilson; break;
    case ZL_METHODS_BOTH: out.methods = zakline::MethodSelection::Both; break;
    default: require(false, "unknown method selection");
  }
  switch (opts.difference) {
    case ZL_DIFFERENCE_FIVE_POINT: out.difference = zakline::Difference::FivePoint; break;
    case ZL_DIFFERENCE_CENTRAL: out.difference = zakline::Difference::Central; break;
    case ZL_DIFFERENCE_FORWARD: out.difference = zakline::Difference::Forward; break;
    default: require(false, "unknown difference stencil");
  }
  out.emit_analytic = opts.emit_analytic != 0;
  out.workers = opts.workers;
  const auto& t = opts.tol;
  for (double v : {t.resid, t.ortho, t.pair, t.selforth, t.degeneracy, t.overlap, t.closure,
                   t.component, t.pt, t.quant}) {
    require(v > 0.0, "tolerances must be positive");
  }
  out.gauge.eig = {t.resid, t.ortho, t.pair, t.selforth, t.degeneracy};
  out.gauge.gauge.overlap = t.overlap;
  out.gauge.gauge.closure = t.closure;
  out.gauge.gauge.component = t.component;
  out.tol_pt = t.pt;
  out.tol_quant = t.quant;
  return out;
}

zl_band_result band_result(const zakline::BandReport& b, double tol_quant) {
  zl_band_result out{};
  out.band = b.band;
  out.oracle_gap = zakline::kNaN;
  if (b.derivative) {
    out.has_derivative = 1;
    out.gamma_derivative = to_c(b.derivative->gamma);
    out.oracle_gap = b.derivative->oracle_gap;
  }
  if (b.wilson) {
    out.has_wilson = 1;
    out.gamma_wilson = to_c(b.wilson->gamma);
  }
  const auto q = b.quantization(tol_quant);
  out.quant_residual = q.residual;
  out.quant_value = q.value;
  out.quantized = q.quantized ? 1 : 0;
  if (b.winding) {
    out.has_winding = 1;
    out.crossings = b.winding->crossings;
    out.delta_phase = b.winding->delta_phase;
    out.component = static_cast<int>(b.winding->component);
  }
  return out;
}

}  // namespace

extern "C" {

const char* zl_version(void) { return "0.1.0"; }

const char* zl_status_name(zl_status status) {
  switch (status) {
    case ZL_OK: return "Ok";
    case ZL_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case ZL_ERR_PARSE: return "ParseError";
    case ZL_ERR_VALIDATION: return "ValidationError";
    case ZL_ERR_DEFECTIVE_MATRIX: return "DefectiveMatrix";
    case ZL_ERR_NO_CONVERGENCE: return "NoConvergence";
    case ZL_ERR_PAIRING_AMBIGUOUS: return "PairingAmbiguous";
    case ZL_ERR_SELF_ORTHOGONAL: return "SelfOrthogonal";
    case ZL_ERR_SUBSPACE_COLLAPSE: return "SubspaceCollapse";
    case ZL_ERR_BAND_CROSSING: return "BandCrossing";
    case ZL_ERR_VANISHING_OVERLAP: return "VanishingOverlap";
    case ZL_ERR_NO_USABLE_COMPONENT: return "NoUsableComponent";
    case ZL_ERR_CLOSURE_FAILURE: return "ClosureFailure";
    case ZL_ERR_NOT_SMOOTHED: return "NotSmoothed";
    case ZL_ERR_DOMAIN: return "DomainError";
    case ZL_ERR_BROKEN_REGIME: return "BrokenRegime";
    case ZL_ERR_DEGENERATE_RATIO: return "DegenerateRatio";
    case ZL_ERR_IO: return "IoError";
    case ZL_ERR_INTERNAL: return "InternalError";
  }
  return "Unknown";
}

const char* zl_last_error(void) { return last_error.c_str(); }

zl_tolerances zl_default_tolerances(void) {
  const zakline::EigTolerances eig;
  const zakline::GaugeTolerances gauge;
  const zakline::RunOptions run;
  return {eig.resid,     eig.ortho,     eig.pair,        eig.selforth,
          eig.degeneracy, gauge.overlap, gauge.closure, gauge.component,
          run.tol_pt,    run.tol_quant};
}

zl_run_options zl_default_run_options(void) {
  const zakline::RunOptions run;
  return {run.grid_points, ZL_METHODS_BOTH, ZL_DIFFERENCE_FIVE_POINT, 1, 0, zl_default_tolerances()};
}

zl_status zl_parse_real(const char* text, int allow_pi, double* out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = zakline::parse_real(text, allow_pi != 0);
  });
}

zl_status zl_model_create_ssh(const zl_ssh_params* params, zl_model** out) {
  return guarded([&] {
    require(params && out, "null argument");
    *out = nullptr;
    const auto p = from_c(*params);
    p.validate();
    *out = new zl_model{zakline::SshModel{p}};
  });
}

zl_status zl_model_load(const char* config_text, zl_model** out) {
  return guarded([&] {
    require(config_text && out, "null argument");
    *out = nullptr;
    *out = new zl_model{zakline::load_model(config_text)};
  });
}

zl_status zl_model_load_file(const char* path, zl_model** out) {
  if (!path || !out) return set_error(ZL_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  std::ifstream in(path);
  if (!in) return set_error(ZL_ERR_IO, std::string("cannot open model file '") + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const std::string content = text.str();
  return zl_model_load(content.c_str(), out);
}

void zl_model_free(zl_model* model) { delete model; }

int zl_model_dim(const zl_model* model) {
  return model ? static_cast<int>(zakline::model_dim(model->model)) : 0;
}

int zl_model_ssh_params(const zl_model* model, zl_ssh_params* out) {
  if (!model) return 0;
  const auto* ssh = std::get_if<zakline::SshModel>(&model->model);
  if (!ssh) return 0;
  if (out) *out = {ssh->params.t, ssh->params.delta, ssh->params.theta, ssh->params.gamma};
  return 1;
}

zl_status zl_model_evaluate(const zl_model* model, double k, zl_complex* out, size_t capacity) {
  return guarded([&] {
    require(model && out, "null argument");
    const auto H = zakline::evaluate(model->model, k);
    require(capacity >= static_cast<size_t>(H.size()), "output buffer too small");
    for (zakline::Index i = 0; i < H.rows(); ++i) {
      for (zakline::Index j = 0; j < H.cols(); ++j) out[i * H.cols() + j] = to_c(H(i, j));
    }
  });
}

zl_status zl_compute(const zl_model* model, const zl_run_options* options, zl_result** out) {
  return guarded([&] {
    require(model && out, "null argument");
    *out = nullptr;
    const auto run = run_options(options);
    auto result = std::make_unique<zl_result>();
    result->report = zakline::compute_zak(model->model, run);
    std::optional<zakline::analytic::ZakPair> exact;
    if (run.emit_analytic && !result->report.pt.broken) {
      if (const auto* ssh = std::get_if<zakline::SshModel>(&model->model)) {
        try {
          exact = zakline::analytic::from_ssh(ssh->params);
        } catch (const zakline::Error&) {
        }
      }
    }
    for (const auto& b : result->report.bands) {
      auto c = band_result(b, run.tol_quant);
      if (exact && (b.band == 1 || b.band == 2)) {
        c.has_analytic = 1;
        c.gamma_analytic = to_c(b.band == 1 ? exact->lower : exact->upper);
      }
      result->bands.push_back(c);
    }
    *out = result.release();
  });
}

void zl_result_free(zl_result* result) { delete result; }

size_t zl_result_band_count(const zl_result* result) {
  return result ? result->bands.size() : 0;
}

zl_status zl_result_band(const zl_result* result, size_t index, zl_band_result* out) {
  return guarded([&] {
    require(result && out, "null argument");
    require(index < result->bands.size(), "band index out of range");
    *out = result->bands[index];
  });
}

zl_status zl_result_pt(const zl_result* result, zl_pt_info* out) {
  return guarded([&] {
    require(result && out, "null argument");
    const auto& pt = result->report.pt;
    *out = {pt.broken ? 1 : 0, pt.max_imag_gap, pt.critical_points.size()};
  });
}

zl_status zl_pt_classify(const zl_model* model, int grid_points, double tol_pt,
                         zl_pt_info* info, double* critical, size_t capacity) {
  return guarded([&] {
    require(model && info, "null argument");
    const auto pt = zakline::pt_classify(
        model->model, zakline::LoopGrid::brillouin_zone(grid_points), tol_pt);
    *info = {pt.broken ? 1 : 0, pt.max_imag_gap, pt.critical_points.size()};
    for (size_t i = 0; critical && i < capacity && i < pt.critical_points.size(); ++i) {
      critical[i] = pt.critical_points[i];
    }
  });
}

zl_status zl_chiral_residual(const zl_model* model, int grid_points, double axis[3],
                             double* residual) {
  return guarded([&] {
    require(model && axis && residual, "null argument");
    const auto r = zakline::chiral_residual(model->model,
                                            zakline::LoopGrid::brillouin_zone(grid_points));
    for (int i = 0; i < 3; ++i) axis[i] = r.axis[static_cast<size_t>(i)];
    *residual = r.residual;
  });
}

zl_status zl_convergence_study(const zl_model* model, int band, const int* grid_points,
                               size_t count, zl_methods method, const zl_run_options* options,
                               zl_convergence_row* rows) {
  return guarded([&] {
    require(model && grid_points && rows, "null argument");
    require(method == ZL_METHODS_DERIVATIVE || method == ZL_METHODS_WILSON,
            "convergence study takes a single method");
    const auto study = zakline::convergence_study(
        model->model, band, std::span(grid_points, count),
        method == ZL_METHODS_WILSON ? zakline::Method::Wilson : zakline::Method::Derivative,
        run_options(options));
    for (size_t i = 0; i < study.size(); ++i) {
      zl_convergence_row r{};
      r.grid_points = study[i].grid_points;
      r.gamma = to_c(study[i].gamma);
      r.delta_prev = study[i].delta_prev;
      r.failed = study[i].error ? 1 : 0;
      if (study[i].error) {
        std::snprintf(r.error, sizeof r.error, "%s", study[i].error->c_str());
      }
      rows[i] = r;
    }
  });
}

zl_status zl_sweep_run(const zl_ssh_params* base, double theta_min, double theta_max,
                       int steps, const zl_run_options* options, zl_sweep** out) {
  return guarded([&] {
    require(base && out, "null argument");
    *out = nullptr;
    const auto thetas = zakline::theta_grid(theta_min, theta_max, steps);
    auto sweep = std::make_unique<zl_sweep>();
    sweep->rows = zakline::sweep(from_c(*base), thetas, run_options(options));
    *out = sweep.release();
  });
}

void zl_sweep_free(zl_sweep* sweep) { delete sweep; }

size_t zl_sweep_row_count(const zl_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

zl_status zl_sweep_get_row(const zl_sweep* sweep, size_t index, zl_sweep_row* out) {
  return guarded([&] {
    require(sweep && out, "null argument");
    require(index < sweep->rows.size(), "row index out of range");
    const auto& row = sweep->rows[index];
    zl_sweep_row r{};
    r.theta = row.theta;
    r.pt_broken = row.pt_broken ? 1 : 0;
    r.failed = row.error ? 1 : 0;
    for (size_t n = 0; n < 2; ++n) {
      r.gamma[n] = to_c(row.gamma[n]);
      r.has_analytic[n] = row.analytic[n] ? 1 : 0;
      if (row.analytic[n]) r.analytic[n] = to_c(*row.analytic[n]);
      r.quant_residual[n] = row.quant_residual[n];
      r.oracle_gap[n] = row.oracle_gap[n];
      r.crossings[n] = row.winding[n] ? row.winding[n]->crossings : 0;
    }
    *out = r;
  });
}

const char* zl_sweep_row_error(const zl_sweep* sweep, size_t index) {
  if (!sweep || index >= sweep->rows.size() || !sweep->rows[index].error) return "";
  return sweep->rows[index].error->c_str();
}

zl_status zl_sweep_write_csv(const zl_sweep* sweep, const char* path) {
  if (!sweep || !path) return set_error(ZL_ERR_INVALID_ARGUMENT, "null argument");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return set_error(ZL_ERR_IO, std::string("cannot write '") + path + "'");
  zakline::write_csv(out, sweep->rows);
  out.flush();
  if (!out) return set_error(ZL_ERR_IO, std::string("write to '") + path + "' failed");
  last_error.clear();
  return ZL_OK;
}

zl_status zl_sweep_csv(const zl_sweep* sweep, char* buffer, size_t capacity, size_t* needed) {
  return guarded([&] {
    require(sweep && needed, "null argument");
    std::ostringstream out;
    zakline::write_csv(out, sweep->rows);
    const std::string text = out.str();
    *needed = text.size() + 1;
    if (!buffer) return;
    require(capacity >= *needed, "buffer too small for CSV text");
    std::memcpy(buffer, text.c_str(), *needed);
  });
}

}  // extern "C"
