#include <random>

#include "doctest.h"
#include "support.hpp"
#include "zakline/error.hpp"
#include "zakline/grid.hpp"
#include "zakline/models.hpp"

using namespace zakline;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

double max_abs(const Matrix& A) { return A.cwiseAbs().maxCoeff(); }

// Adds c e^{imk} sigma_axis to a Fourier model (axis 0 is the identity).
void add_pauli(FourierModel& model, int axis, int m, Complex c) {
  const Matrix s = axis == 0 ? Matrix::Identity(2, 2) : pauli(axis);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      if (s(i, j) != 0.0) model.add(i, j, m, c * s(i, j));
    }
  }
}

}  // namespace

TEST_CASE("hopping amplitudes") {
  SshParams p{1.0, 0.5, 0.0, 0.0};
  auto a = hopping_amplitudes(p);
  CHECK(a.plus == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(a.minus == doctest::Approx(0.5).epsilon(1e-15));
  p.theta = kPi / 2;
  a = hopping_amplitudes(p);
  CHECK(a.plus == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.minus == doctest::Approx(1.0).epsilon(1e-15));
  p.theta = kPi;
  a = hopping_amplitudes(p);
  CHECK(a.plus == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.minus == doctest::Approx(1.5).epsilon(1e-15));
  p.theta = 0.3 * kPi;
  a = hopping_amplitudes(p);
  CHECK(a.plus == doctest::Approx(1.2939).epsilon(1e-4));
  CHECK(a.minus == doctest::Approx(0.7061).epsilon(1e-4));
}

TEST_CASE("Bloch matrix of the gain/loss chain") {
  Matrix expected(2, 2);
  expected << Complex(0, -0.5), 2.0, 2.0, Complex(0, 0.5);
  CHECK(max_abs(ssh_bloch(0.0, 1.5, 0.5, 1.0) - expected) < 1e-15);

  expected << 0.0, -1.0, -1.0, 0.0;
  CHECK(max_abs(ssh_bloch(kPi, 1.5, 0.5, 0.0) - expected) < 1e-15);
}

TEST_CASE("parameter validation") {
  CHECK(code_of([] { SshParams{0.0, 0.5, 0.0, 1.0}.validate(); }) == ErrorCode::ValidationError);
  CHECK(code_of([] { SshParams{1.0, 1.0, 0.0, 1.0}.validate(); }) == ErrorCode::ValidationError);
  CHECK(code_of([] { SshParams{1.0, -0.1, 0.0, 1.0}.validate(); }) == ErrorCode::ValidationError);
  CHECK(code_of([] { SshParams{1.0, 0.5, 0.0, -1.0}.validate(); }) == ErrorCode::ValidationError);
  CHECK_NOTHROW(SshParams{1.0, 0.0, 0.0, 0.0}.validate());
}

TEST_CASE("Pauli decomposition") {
  auto c = pauli_decompose(pauli(1));
  CHECK(std::abs(c.n0) < 1e-15);
  CHECK(std::abs(c.n[0] - 1.0) < 1e-15);
  CHECK(std::abs(c.n[1]) < 1e-15);
  CHECK(std::abs(c.n[2]) < 1e-15);

  c = pauli_decompose(ssh_bloch(kPi / 2, 1.5, 0.5, 1.0));
  CHECK(std::abs(c.n[0] - 0.5) < 1e-15);
  CHECK(std::abs(c.n[1] - (-1.5)) < 1e-15);
  CHECK(std::abs(c.n[2] - Complex(0, -0.5)) < 1e-15);

  c = pauli_decompose(Matrix::Identity(2, 2));
  CHECK(std::abs(c.n0 - 1.0) < 1e-15);
  for (const auto& n : c.n) CHECK(std::abs(n) < 1e-15);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix H = zltest::random_matrix(rng, 2);
    CHECK(max_abs(pauli_decompose(H).reconstruct() - H) <= 1e-14);
  }
}

TEST_CASE("Pauli energies") {
  PauliCoeffs c{0.0, {1.0, 0.0, 0.0}};
  auto e = energies(c);
  CHECK(std::abs(e.plus - 1.0) < 1e-15);
  CHECK(std::abs(e.minus + 1.0) < 1e-15);

  c = {0.0, {0.5, -1.5, Complex(0, -0.5)}};
  e = energies(c);
  CHECK(std::abs(e.plus - 1.5) < 1e-14);
  CHECK(std::abs(e.minus + 1.5) < 1e-14);

  c = {0.0, {0.0, 0.0, Complex(0, -0.5)}};
  e = energies(c);
  CHECK(std::abs(std::abs(e.plus) - 0.5) < 1e-15);
  CHECK(std::abs(e.plus.real()) < 1e-15);
  CHECK(std::abs(e.plus + e.minus) < 1e-15);
}

TEST_CASE("PT classification") {
  const auto grid = LoopGrid::brillouin_zone(1001);
  CHECK_FALSE(pt_classify(SshModel{{1.0, 0.5, 0.0, 1.0}}, grid).broken);
  const auto broken = pt_classify(SshModel{{1.0, 0.5, kPi / 2, 1.0}}, grid);
  CHECK(broken.broken);
  CHECK(broken.max_imag_gap > 0.1);
  CHECK_FALSE(broken.critical_points.empty());
  for (const double theta : {0.0, 0.4, kPi / 2, 2.0, kPi}) {
    CHECK_FALSE(pt_classify(SshModel{{1.0, 0.5, theta, 0.0}}, grid).broken);
  }
}

TEST_CASE("chiral residual") {
  const auto grid = LoopGrid::brillouin_zone(401);
  const auto hermitian = chiral_residual(SshModel{{1.0, 0.5, 0.0, 0.0}}, grid);
  CHECK(hermitian.residual <= 1e-12);
  CHECK(std::abs(hermitian.axis[2] - 1.0) < 1e-12);

  const auto lossy = chiral_residual(SshModel{{1.0, 0.5, 0.0, 1.0}}, grid);
  CHECK(lossy.residual > 0.1);

  // n(k) = cos k e3 + sin k (e1 - e2)/sqrt2 stays in the plane with normal (1,1,0)/sqrt2.
  FourierModel planar(2);
  const double r = 1.0 / std::sqrt(2.0);
  add_pauli(planar, 3, 1, 0.5);
  add_pauli(planar, 3, -1, 0.5);
  add_pauli(planar, 1, 1, Complex(0, -0.5 * r));
  add_pauli(planar, 1, -1, Complex(0, 0.5 * r));
  add_pauli(planar, 2, 1, Complex(0, 0.5 * r));
  add_pauli(planar, 2, -1, Complex(0, -0.5 * r));
  add_pauli(planar, 0, 0, 0.3);
  const auto plane = chiral_residual(planar, grid);
  CHECK(plane.residual <= 1e-12);
  CHECK(std::abs(plane.axis[0] - r) < 1e-12);
  CHECK(std::abs(plane.axis[1] - r) < 1e-12);
  CHECK(std::abs(plane.axis[2]) < 1e-12);

  CHECK(code_of([&] { chiral_residual(FourierModel(3), grid); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("chain symmetries") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> k(-kPi, kPi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Matrix P = pauli(1);
  for (int trial = 0; trial < 200; ++trial) {
    const SshParams p{0.2 + 2.0 * unit(rng), 0.99 * unit(rng), 2.0 * kPi * unit(rng),
                      3.0 * unit(rng)};
    const double kk = k(rng);
    const Matrix H = ssh_bloch(kk, p);
    // (PT) H (PT)^-1 with P = sigma1 and T complex conjugation.
    CHECK(max_abs(P * H.conjugate() * P - H) <= 1e-14);
    CHECK(max_abs(H.transpose() - ssh_bloch(-kk, p)) <= 1e-14);
  }
}

TEST_CASE("Fourier model reproduces the chain") {
  const SshParams p{1.0, 0.5, 0.3 * kPi, 1.0};
  const auto amp = hopping_amplitudes(p);
  FourierModel f(2);
  f.add(0, 0, 0, Complex(0, -0.5 * p.gamma));
  f.add(1, 1, 0, Complex(0, 0.5 * p.gamma));
  f.add(0, 1, 0, amp.minus);
  f.add(0, 1, 1, amp.plus);
  f.add(1, 0, 0, amp.minus);
  f.add(1, 0, -1, amp.plus);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> k(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const double kk = k(rng);
    CHECK(max_abs(f(kk) - ssh_bloch(kk, p)) <= 1e-14);
  }

  CHECK(code_of([] { FourierModel(1); }) == ErrorCode::ValidationError);
  CHECK(code_of([&] { f.add(2, 0, 0, 1.0); }) == ErrorCode::ValidationError);
}

TEST_CASE("number parsing") {
  CHECK(parse_real("0.5", false) == 0.5);
  CHECK(parse_real("-2", false) == -2.0);
  CHECK(parse_real("pi", true) == kPi);
  CHECK(parse_real("-pi", true) == -kPi);
  CHECK(parse_real("0.3pi", true) == 0.3 * kPi);
  CHECK(parse_real("1e-3", true) == 1e-3);
  CHECK(code_of([] { parse_real("0.3pi", false); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_real("two", false); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_real("", false); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_real("1.5x", false); }) == ErrorCode::ParseError);
}

TEST_CASE("model config") {
  SUBCASE("single-line chain config") {
    const auto model = load_model("model=ssh t=1 delta=0.5 gamma=1 theta=0.3pi");
    const auto& ssh = std::get<SshModel>(model);
    CHECK(ssh.params.t == 1.0);
    CHECK(ssh.params.delta == 0.5);
    CHECK(ssh.params.gamma == 1.0);
    CHECK(ssh.params.theta == 0.3 * kPi);
  }
  SUBCASE("one key per line with comments") {
    const auto model = load_model("# chain\nmodel = ssh\nt = 1\ndelta = 0.5  # strong\ngamma = 1\n");
    const auto& ssh = std::get<SshModel>(model);
    CHECK(ssh.params.theta == 0.0);
    CHECK(ssh.params.delta == 0.5);
  }
  SUBCASE("fourier config agrees with the chain") {
    const auto model = load_model(
        "model=fourier\ndim=2\n"
        "entry=0,0,0,0,-0.5\nentry=1,1,0,0,0.5\n"
        "entry=0,1,0,0.5,0\nentry=0,1,1,1.5,0\n"
        "entry=1,0,0,0.5,0\nentry=1,0,-1,1.5,0\n");
    CHECK(model_dim(model) == 2);
    for (const double k : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
      CHECK(max_abs(evaluate(model, k) - ssh_bloch(k, 1.5, 0.5, 1.0)) <= 1e-15);
    }
  }
  SUBCASE("errors") {
    CHECK(code_of([] { load_model("model=ssh\nt=1\ndelta=two\ngamma=1"); }) ==
          ErrorCode::ParseError);
    try {
      load_model("model=ssh\nt=1\ndelta=two\ngamma=1");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
      CHECK(std::string(e.what()).find("delta") != std::string::npos);
    }
    CHECK(code_of([] { load_model("model=ssh\nt=1\nt=2\ndelta=0\ngamma=0"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { load_model("model=ssh\nt=1\ncolor=red"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { load_model("model=ising"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { load_model("t=1"); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { load_model("model=ssh\nt=1\ndelta=0.5"); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { load_model("model=ssh t=1 delta=1.5 gamma=0"); }) ==
          ErrorCode::ValidationError);
    CHECK(code_of([] { load_model("model=fourier\ndim=2"); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { load_model("model=fourier\ndim=2\nentry=0,2,0,1,0"); }) ==
          ErrorCode::ValidationError);
    CHECK(code_of([] { load_model("model=fourier\ndim=2\nentry=0,1,0,1"); }) ==
          ErrorCode::ParseError);
  }
}

TEST_CASE("Brillouin-zone grid") {
  const auto grid = LoopGrid::brillouin_zone(5);
  CHECK(grid.size() == 5);
  CHECK(grid[0] == -kPi);
  CHECK(grid[4] == kPi);
  CHECK(grid[2] == doctest::Approx(0.0));
  CHECK(grid.period() == kTwoPi);
  CHECK(code_of([] { LoopGrid::brillouin_zone(2); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { LoopGrid({0.0, 2.0, 1.0}, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { LoopGrid({0.0, 0.5, 1.5}, 1.0); }) == ErrorCode::InvalidArgument);
}
