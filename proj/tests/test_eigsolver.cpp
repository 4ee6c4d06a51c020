#include <algorithm>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "zakline/eigsolver.hpp"
#include "zakline/error.hpp"
#include "zakline/models.hpp"

using namespace zakline;

namespace {

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix H(2, 2);
  H << a, b, c, d;
  return H;
}

// |<u|v>| / (|u||v|) with the Hermitian inner product: 1 for parallel vectors.
double parallel(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  return std::abs(u.dot(v)) / (u.norm() * v.norm());
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("pauli x eigenpairs") {
  const Matrix s1 = mat2(0, 1, 1, 0);
  const auto rights = eig_right(s1);
  REQUIRE(rights.size() == 2);
  CHECK(std::abs(rights[0].value - Complex(-1.0)) < 1e-15);
  CHECK(std::abs(rights[1].value - Complex(1.0)) < 1e-15);
  Eigen::VectorXcd minus(2), plus(2);
  minus << 1, -1;
  plus << 1, 1;
  CHECK(parallel(rights[0].vector, minus) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(parallel(rights[1].vector, plus) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gain/loss chain at k = pi/2 has energies +-1.5") {
  const auto values = eigenvalues(ssh_bloch(kPi / 2, 1.5, 0.5, 1.0));
  REQUIRE(values.size() == 2);
  CHECK(std::abs(values[0] - Complex(-1.5)) < 1e-14);
  CHECK(std::abs(values[1] - Complex(1.5)) < 1e-14);
}

TEST_CASE("Jordan block is defective") {
  const Matrix J = mat2(0, 1, 0, 0);
  CHECK(code_of([&] { eig_right(J); }) == ErrorCode::DefectiveMatrix);
  CHECK(code_of([&] { eigensystem(J); }) == ErrorCode::DefectiveMatrix);

  Matrix J3 = Matrix::Zero(3, 3);
  J3(0, 1) = 1.0;
  J3(2, 2) = 2.0;
  CHECK(code_of([&] { eigensystem(J3); }) == ErrorCode::DefectiveMatrix);
}

TEST_CASE("diagonal matrix has standard basis left vectors") {
  const auto lefts = eig_left(mat2(Complex(2, 1), 0, 0, Complex(-1, 0.5)));
  REQUIRE(lefts.size() == 2);
  CHECK(lefts[0].value == Complex(-1, 0.5));
  CHECK(std::abs(lefts[0].vector(0)) < 1e-15);
  CHECK(std::abs(lefts[0].vector(1)) == doctest::Approx(1.0));
  CHECK(std::abs(lefts[1].vector(0)) == doctest::Approx(1.0));
  CHECK(std::abs(lefts[1].vector(1)) < 1e-15);
}

TEST_CASE("upper triangular left vectors") {
  const Matrix H = mat2(1, 1, 0, 2);
  const auto lefts = eig_left(H);
  REQUIRE(lefts.size() == 2);
  Eigen::VectorXcd a(2), b(2);
  a << 1, -1;
  b << 0, 1;
  CHECK(std::abs(lefts[0].value - 1.0) < 1e-15);
  CHECK(parallel(lefts[0].vector.transpose(), a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(parallel(lefts[1].vector.transpose(), b) == doctest::Approx(1.0).epsilon(1e-14));
  // Brute-force left-eigen check on the raw vectors.
  for (const auto& l : lefts) CHECK((l.vector * H - l.value * l.vector).norm() < 1e-14);
}

TEST_CASE("pairing normalizes with the principal root") {
  SUBCASE("real overlap") {
    RowVector chi(2);
    chi << 2, 0;
    Vector phi(2);
    phi << 2, 0;
    const LeftEigenpair l{1.0, chi};
    const RightEigenpair r{1.0, phi};
    const auto set = pair_and_biorthonormalize(std::span(&l, 1), std::span(&r, 1));
    CHECK(std::abs(set[0].left(0) - 1.0) < 1e-15);
    CHECK(std::abs(set[0].right(0) - 1.0) < 1e-15);
  }
  SUBCASE("imaginary components") {
    RowVector chi(2);
    chi << kI, 0;
    Vector phi(2);
    phi << kI, 0;
    const LeftEigenpair l{1.0, chi};
    const RightEigenpair r{1.0, phi};
    const auto set = pair_and_biorthonormalize(std::span(&l, 1), std::span(&r, 1));
    CHECK(std::abs(set[0].left(0) - 1.0) < 1e-15);
    CHECK(std::abs(set[0].right(0) - 1.0) < 1e-15);
  }
}

TEST_CASE("self-orthogonal pair at an exceptional point") {
  RowVector chi(2);
  chi << 1, kI;
  Vector phi(2);
  phi << 1, kI;
  const LeftEigenpair l{0.0, chi};
  const RightEigenpair r{0.0, phi};
  CHECK(code_of([&] { pair_and_biorthonormalize(std::span(&l, 1), std::span(&r, 1)); }) ==
        ErrorCode::SelfOrthogonal);
}

TEST_CASE("nearly equal eigenvalues make pairing ambiguous") {
  RowVector e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  const std::vector<LeftEigenpair> lefts{{1.0, e1}, {1.0 + 5e-9, e2}};
  const std::vector<RightEigenpair> rights{{1.0, e1.transpose()}, {1.0 + 5e-9, e2.transpose()}};
  CHECK(code_of([&] { pair_and_biorthonormalize(lefts, rights); }) ==
        ErrorCode::PairingAmbiguous);
}

TEST_CASE("Gram-Schmidt") {
  RowVector x1(2), x2(2);
  x1 << 1, 0;
  x2 << 0, 1;
  const std::vector<BiorthPair> reference{{1, 1.0, x1, x1.transpose()},
                                          {2, 1.0, x2, x2.transpose()}};

  SUBCASE("biorthonormal input is returned unchanged") {
    std::mt19937_64 rng(7);
    const Matrix S = zltest::random_matrix(rng, 2);
    const Matrix Si = S.inverse();
    std::vector<BiorthPair> subspace;
    for (int m = 0; m < 2; ++m) {
      subspace.push_back({m + 1, 1.0, Si.row(m), S.col(m)});
    }
    const auto out = biorthogonal_gram_schmidt(subspace);
    REQUIRE(out.size() == 2);
    for (std::size_t m = 0; m < 2; ++m) {
      for (std::size_t n = 0; n < 2; ++n) {
        CHECK(std::abs(pairing(out[m].left, out[n].right) - (m == n ? 1.0 : 0.0)) < 1e-12);
      }
    }
    for (std::size_t m = 0; m < 2; ++m) {
      CHECK((out[m].left - subspace[m].left).norm() < 1e-12);
      CHECK((out[m].right - subspace[m].right).norm() < 1e-12);
    }
  }

  SUBCASE("mixed degenerate block realigns with the reference") {
    Matrix A(2, 2);
    A << Complex(0.8, 0.3), Complex(-0.4, 1.1), Complex(0.2, -0.7), Complex(1.3, 0.1);
    const Matrix Ai = A.inverse();
    std::vector<BiorthPair> subspace;
    for (int m = 0; m < 2; ++m) subspace.push_back({m + 1, 1.0, Ai.row(m), A.col(m)});
    const auto out = biorthogonal_gram_schmidt(subspace, reference);
    REQUIRE(out.size() == 2);
    for (std::size_t m = 0; m < 2; ++m) {
      CHECK((out[m].left - reference[m].left).norm() < 1e-12);
      CHECK((out[m].right - reference[m].right).norm() < 1e-12);
    }
  }

  SUBCASE("rank-one span collapses") {
    Vector v(2);
    v << 1, 2;
    const std::vector<BiorthPair> subspace{{1, 1.0, v.transpose(), v}, {2, 1.0, 2.0 * v.transpose(), 2.0 * v}};
    CHECK(code_of([&] { biorthogonal_gram_schmidt(subspace); }) == ErrorCode::SubspaceCollapse);
  }
}

TEST_CASE("degenerate diagonalizable matrices") {
  SUBCASE("multiple of the identity") {
    const auto set = eigensystem(Complex(0.5, -2.0) * Matrix::Identity(2, 2));
    REQUIRE(set.size() == 2);
    CHECK(biorthonormality_defect(set) < 1e-14);
  }
  SUBCASE("3x3 with a two-fold eigenvalue") {
    std::mt19937_64 rng(11);
    const Matrix S = zltest::random_matrix(rng, 3);
    Matrix D = Matrix::Zero(3, 3);
    D(0, 0) = D(1, 1) = Complex(1.0, 0.5);
    D(2, 2) = -2.0;
    const Matrix H = S * D * S.inverse();
    const auto set = eigensystem(H);
    REQUIRE(set.size() == 3);
    CHECK(biorthonormality_defect(set) < 1e-10);
    for (std::size_t n = 0; n < 3; ++n) {
      CHECK((H * set[n].right - set[n].energy * set[n].right).norm() < 1e-10 * H.norm());
    }
  }
}

TEST_CASE("input validation") {
  CHECK(code_of([] { validate_matrix(Matrix(2, 3)); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { validate_matrix(Matrix::Identity(1, 1)); }) == ErrorCode::InvalidArgument);
  Matrix H = Matrix::Identity(2, 2);
  H(0, 1) = std::numeric_limits<double>::infinity();
  CHECK(code_of([&] { eigenvalues(H); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("eigenvalue order is by real part then imaginary part") {
  std::vector<Complex> v{{1, 2}, {-1, 0}, {1, -2}, {0, 5}};
  sort_eigenvalues(v, 1e-12);
  CHECK(v[0] == Complex(-1, 0));
  CHECK(v[1] == Complex(0, 5));
  CHECK(v[2] == Complex(1, -2));
  CHECK(v[3] == Complex(1, 2));
}

// The eigensolver contract on random inputs.
TEST_CASE("random matrices satisfy the eigensolver contract") {
  std::mt19937_64 rng(20240531);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 2 + trial % 5;
    const bool hermitian = trial % 4 == 3;
    const Matrix H = hermitian ? zltest::random_hermitian(rng, dim) : zltest::random_matrix(rng, dim);
    CAPTURE(trial);
    CAPTURE(dim);
    const double scale = H.norm();

    const auto set = eigensystem(H);
    REQUIRE(set.size() == static_cast<std::size_t>(dim));
    for (std::size_t n = 0; n < set.size(); ++n) {
      const auto& p = set[n];
      CHECK((H * p.right - p.energy * p.right).norm() <= 1e-12 * scale);
      CHECK((p.left * H - p.energy * p.left).norm() <= 1e-12 * scale);
      CHECK(std::abs(p.self_overlap() - 1.0) <= 1e-10);
    }
    for (std::size_t m = 0; m < set.size(); ++m) {
      for (std::size_t n = 0; n < set.size(); ++n) {
        if (m != n) CHECK(std::abs(pairing(set[m].left, set[n].right)) <= 1e-10);
      }
    }

    // Left and right spectra agree.
    const auto rights = eig_right(H);
    const auto lefts = eig_left(H);
    for (std::size_t n = 0; n < rights.size(); ++n) {
      double nearest = 1e300;
      for (const auto& l : lefts) nearest = std::min(nearest, std::abs(l.value - rights[n].value));
      CHECK(nearest <= 1e-12 * scale);
    }

    if (hermitian) {
      for (std::size_t n = 0; n < set.size(); ++n) {
        const Eigen::RowVectorXcd dagger = set[n].right.adjoint();
        // chi = u * phi^dagger for a unit-modulus u.
        const Complex u = (set[n].left * dagger.adjoint())(0, 0) / dagger.squaredNorm();
        CHECK(std::abs(std::abs(u) - 1.0) <= 1e-10);
        CHECK((set[n].left - u * dagger).norm() <= 1e-10);
        CHECK(std::abs(set[n].energy.imag()) <= 1e-12 * scale);
      }
    }
  }
}
