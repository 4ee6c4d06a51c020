#include "zakline/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "zakline/error.hpp"

namespace zakline {

void SshParams::validate() const {
  if (!std::isfinite(t) || !(t > 0.0)) {
    fail(ErrorCode::ValidationError, "t must be positive");
  }
  if (!std::isfinite(delta) || delta < 0.0 || delta >= 1.0) {
    fail(ErrorCode::ValidationError, "delta must lie in [0, 1)");
  }
  if (!std::isfinite(gamma) || gamma < 0.0) {
    fail(ErrorCode::ValidationError, "gamma must be non-negative");
  }
  if (!std::isfinite(theta)) {
    fail(ErrorCode::ValidationError, "theta must be finite");
  }
}

HoppingAmplitudes hopping_amplitudes(const SshParams& p) {
  const double c = p.delta * std::cos(p.theta);
  return {p.t * (1.0 + c), p.t * (1.0 - c)};
}

Matrix ssh_bloch(double k, double t_plus, double t_minus, double gamma) {
  const Complex phase = std::polar(1.0, k);
  Matrix H(2, 2);
  H << Complex(0.0, -0.5 * gamma), t_minus + t_plus * phase,
      t_minus + t_plus * std::conj(phase), Complex(0.0, 0.5 * gamma);
  return H;
}

Matrix ssh_bloch(double k, const SshParams& p) {
  const auto amp = hopping_amplitudes(p);
  return ssh_bloch(k, amp.plus, amp.minus, p.gamma);
}

FourierModel::FourierModel(Index dim) : dim_(dim) {
  if (dim < 2) fail(ErrorCode::ValidationError, "model dimension must be at least 2");
}

void FourierModel::add(Index i, Index j, int harmonic, Complex coefficient) {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_) {
    fail(ErrorCode::ValidationError, "matrix entry (" + std::to_string(i) + "," +
                                         std::to_string(j) + ") outside dimension " +
                                         std::to_string(dim_));
  }
  terms_[{i, j, harmonic}] += coefficient;
}

Matrix FourierModel::operator()(double k) const {
  Matrix H = Matrix::Zero(dim_, dim_);
  for (const auto& [key, c] : terms_) {
    const auto& [i, j, m] = key;
    H(i, j) += c * std::polar(1.0, m * k);
  }
  return H;
}

Matrix evaluate(const BlochModel& model, double k) {
  return std::visit([k](const auto& m) { return m(k); }, model);
}

Index model_dim(const BlochModel& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

std::string describe(const BlochModel& model) {
  std::ostringstream out;
  if (const auto* ssh = std::get_if<SshModel>(&model)) {
    const auto& p = ssh->params;
    out << "ssh(t=" << p.t << ", delta=" << p.delta << ", gamma=" << p.gamma
        << ", theta=" << p.theta << ")";
  } else {
    out << "fourier(dim=" << model_dim(model) << ")";
  }
  return out.str();
}

Matrix pauli(int index) {
  Matrix s = Matrix::Zero(2, 2);
  switch (index) {
    case 0: s << 1.0, 0.0, 0.0, 1.0; break;
    case 1: s << 0.0, 1.0, 1.0, 0.0; break;
    case 2: s << 0.0, -kI, kI, 0.0; break;
    case 3: s << 1.0, 0.0, 0.0, -1.0; break;
    default: fail(ErrorCode::InvalidArgument, "Pauli index must be 0..3");
  }
  return s;
}

Matrix PauliCoeffs::reconstruct() const {
  Matrix H = n0 * pauli(0);
  for (int i = 0; i < 3; ++i) H += n[static_cast<std::size_t>(i)] * pauli(i + 1);
  return H;
}

PauliCoeffs pauli_decompose(const Matrix& H) {
  if (H.rows() != 2 || H.cols() != 2) {
    fail(ErrorCode::InvalidArgument, "Pauli decomposition needs a 2x2 matrix");
  }
  // tr(sigma_i H)/2 written out entrywise.
  PauliCoeffs c;
  c.n0 = 0.5 * (H(0, 0) + H(1, 1));
  c.n[0] = 0.5 * (H(0, 1) + H(1, 0));
  c.n[1] = 0.5 * kI * (H(0, 1) - H(1, 0));
  c.n[2] = 0.5 * (H(0, 0) - H(1, 1));
  return c;
}

PauliEnergies energies(const PauliCoeffs& c) {
  const Complex root = std::sqrt(c.n[0] * c.n[0] + c.n[1] * c.n[1] + c.n[2] * c.n[2]);
  return {c.n0 + root, c.n0 - root};
}

PtClassification pt_classify(const BlochModel& model, const LoopGrid& grid, double tol_pt) {
  if (!(tol_pt > 0.0)) fail(ErrorCode::InvalidArgument, "tol_pt must be positive");
  PtClassification out;
  bool previous = false;
  for (int j = 0; j < grid.size(); ++j) {
    double worst = 0.0;
    for (const Complex e : eigenvalues(evaluate(model, grid[j]))) {
      worst = std::max(worst, std::abs(e.imag()));
    }
    out.max_imag_gap = std::max(out.max_imag_gap, worst);
    const bool here = worst > tol_pt;
    if (here && !previous) out.critical_points.push_back(grid[j]);
    previous = here;
  }
  out.broken = out.max_imag_gap > tol_pt;
  return out;
}

ChiralResidual chiral_residual(const BlochModel& model, const LoopGrid& grid) {
  if (model_dim(model) != 2) {
    fail(ErrorCode::InvalidArgument, "chiral residual is defined for 2x2 models only");
  }
  // |a . n|^2 = (a . Re n)^2 + (a . Im n)^2 for real a.
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  const int distinct = grid.size() - 1;
  for (int j = 0; j < distinct; ++j) {
    const auto c = pauli_decompose(evaluate(model, grid[j]));
    Eigen::Vector3d re, im;
    for (int i = 0; i < 3; ++i) {
      re(i) = c.n[static_cast<std::size_t>(i)].real();
      im(i) = c.n[static_cast<std::size_t>(i)].imag();
    }
    gram += re * re.transpose() + im * im.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(gram);
  Eigen::Vector3d axis = solver.eigenvectors().col(0);
  Index largest = 0;
  axis.cwiseAbs().maxCoeff(&largest);
  if (axis(largest) < 0.0) axis = -axis;
  const double lowest = std::max(0.0, solver.eigenvalues()(0));
  return {{axis(0), axis(1), axis(2)}, std::sqrt(lowest / distinct)};
}

double parse_real(std::string_view text, bool allow_pi_suffix) {
  std::string_view number = text;
  bool times_pi = false;
  if (allow_pi_suffix && number.size() >= 2 && number.substr(number.size() - 2) == "pi") {
    times_pi = true;
    number.remove_suffix(2);
    if (number.empty() || number == "+") return kPi;
    if (number == "-") return -kPi;
  }
  if (!number.empty() && number.front() == '+') number.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
  if (ec != std::errc() || end != number.data() + number.size() || number.empty() ||
      !std::isfinite(value)) {
    fail(ErrorCode::ParseError, "invalid number '" + std::string(text) + "'");
  }
  return times_pi ? value * kPi : value;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(int line, std::string_view field, const std::string& what) {
  fail(ErrorCode::ParseError,
       "line " + std::to_string(line) + ": field '" + std::string(field) + "': " + what);
}

double field_real(int line, std::string_view key, std::string_view value, bool allow_pi) {
  try {
    return parse_real(value, allow_pi);
  } catch (const Error& e) {
    parse_fail(line, key, e.what());
  }
}

long field_integer(int line, std::string_view key, std::string_view value) {
  long out = 0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size() || value.empty()) {
    parse_fail(line, key, "invalid integer '" + std::string(value) + "'");
  }
  return out;
}

struct FourierEntry {
  int line;
  long i, j, m;
  Complex c;
};

}  // namespace

BlochModel load_model(std::string_view config_text) {
  std::string kind;
  std::map<std::string, double, std::less<>> scalars;
  std::vector<FourierEntry> entries;
  std::set<std::string, std::less<>> seen;
  long dim = 0;

  auto handle = [&](int line_no, std::string_view line) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      parse_fail(line_no, line, "expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key != "entry" && !seen.emplace(key).second) {
      parse_fail(line_no, key, "duplicate key");
    }

    if (key == "model") {
      if (value != "ssh" && value != "fourier") {
        parse_fail(line_no, key, "unknown model '" + std::string(value) + "'");
      }
      kind = value;
    } else if (key == "t" || key == "delta" || key == "gamma") {
      scalars.emplace(std::string(key), field_real(line_no, key, value, false));
    } else if (key == "theta") {
      scalars.emplace(std::string(key), field_real(line_no, key, value, true));
    } else if (key == "dim") {
      dim = field_integer(line_no, key, value);
    } else if (key == "entry") {
      std::vector<std::string_view> parts;
      std::size_t from = 0;
      while (true) {
        const auto comma = value.find(',', from);
        parts.push_back(trim(value.substr(from, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - from)));
        if (comma == std::string_view::npos) break;
        from = comma + 1;
      }
      if (parts.size() != 5) {
        parse_fail(line_no, key, "expected i,j,m,re,im");
      }
      entries.push_back({line_no, field_integer(line_no, key, parts[0]),
                         field_integer(line_no, key, parts[1]),
                         field_integer(line_no, key, parts[2]),
                         {field_real(line_no, key, parts[3], false),
                          field_real(line_no, key, parts[4], false)}});
    } else {
      parse_fail(line_no, key, "unknown key");
    }
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= config_text.size()) {
    const auto next = config_text.find('\n', pos);
    std::string_view line = config_text.substr(
        pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    pos = next == std::string_view::npos ? config_text.size() + 1 : next + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    // One pair per line, or several whitespace-separated pairs.
    std::vector<std::string_view> pairs;
    if (std::count(line.begin(), line.end(), '=') <= 1) {
      pairs.push_back(line);
    } else {
      std::size_t from = 0;
      while (from < line.size()) {
        const auto stop = line.find_first_of(" \t", from);
        const auto token = line.substr(from, stop == std::string_view::npos ? stop : stop - from);
        if (!token.empty()) pairs.push_back(token);
        if (stop == std::string_view::npos) break;
        from = stop + 1;
      }
    }
    for (const auto pair : pairs) handle(line_no, pair);
  }

  if (kind.empty()) fail(ErrorCode::ValidationError, "config lacks a model= line");

  if (kind == "ssh") {
    if (!entries.empty() || dim != 0) {
      fail(ErrorCode::ValidationError, "ssh model does not take dim or entry lines");
    }
    SshParams p;
    for (const char* required : {"t", "delta", "gamma"}) {
      if (!scalars.contains(required)) {
        fail(ErrorCode::ValidationError, std::string("ssh model requires '") + required + "'");
      }
    }
    p.t = scalars.at("t");
    p.delta = scalars.at("delta");
    p.gamma = scalars.at("gamma");
    if (const auto it = scalars.find("theta"); it != scalars.end()) p.theta = it->second;
    p.validate();
    return SshModel{p};
  }

  if (!scalars.empty()) {
    fail(ErrorCode::ValidationError, "fourier model takes only dim and entry lines");
  }
  if (dim < 2) fail(ErrorCode::ValidationError, "fourier model needs dim >= 2");
  if (entries.empty()) fail(ErrorCode::ValidationError, "fourier model has no entries");
  FourierModel model(static_cast<Index>(dim));
  for (const auto& e : entries) {
    if (e.i < 0 || e.j < 0 || e.i >= dim || e.j >= dim) {
      fail(ErrorCode::ValidationError,
           "line " + std::to_string(e.line) + ": entry index outside dim");
    }
    model.add(static_cast<Index>(e.i), static_cast<Index>(e.j), static_cast<int>(e.m), e.c);
  }
  return model;
}

}  // namespace zakline
