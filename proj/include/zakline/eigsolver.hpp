#pragma once

#include <span>
#include <vector>

#include "zakline/types.hpp"

namespace zakline {

/// Tolerances for the dense biorthogonal eigensolver. Residual, degeneracy
/// and pairing thresholds are relative to max(1, ||H||_F).
struct EigTolerances {
  double resid = 1e-12;
  double ortho = 1e-10;
  double pair = 1e-8;
  double selforth = 1e-10;
  double degeneracy = 1e-9;
};

struct RightEigenpair {
  Complex value;
  Vector vector;
};

struct LeftEigenpair {
  Complex value;
  RowVector vector;
};

/// One band at one grid point: eigenvalue plus matched left (row) and right
/// (column) eigenvectors. After normalization <left|right> = 1.
struct BiorthPair {
  int band = 0;
  Complex energy;
  RowVector left;
  Vector right;

  Complex self_overlap() const { return pairing(left, right); }
};

/// Complete biorthonormal eigenbasis at one point, ordered by band.
struct EigenSet {
  std::vector<BiorthPair> pairs;

  std::size_t size() const { return pairs.size(); }
  const BiorthPair& operator[](std::size_t n) const { return pairs[n]; }
  BiorthPair& operator[](std::size_t n) { return pairs[n]; }
};

/// Throws InvalidArgument unless H is square, dim >= 2 and finite.
void validate_matrix(const Matrix& H);

/// Max(1, Frobenius norm): the scale all relative tolerances refer to.
double matrix_scale(const Matrix& H);

/// Ordering used everywhere for band indices: ascending real part; real
/// parts equal within `tie` are ordered by imaginary part.
void sort_eigenvalues(std::vector<Complex>& values, double tie);

/// Eigenvalues only, sorted. Never reports defectiveness.
std::vector<Complex> eigenvalues(const Matrix& H, const EigTolerances& tol = {});

/// Right eigenpairs H phi = E phi, unit 2-norm vectors, sorted.
/// 2x2 inputs use the closed-form quadratic; larger ones a dense QR solver.
std::vector<RightEigenpair> eig_right(const Matrix& H, const EigTolerances& tol = {});

/// Left eigenpairs chi H = E chi, computed as right eigenvectors of H^T and
/// returned as rows so that <chi|phi> needs no conjugation.
std::vector<LeftEigenpair> eig_left(const Matrix& H, const EigTolerances& tol = {});

/// Matches left and right pairs by eigenvalue and biorthonormalizes each
/// match, dividing both vectors by the principal square root of <chi|phi>.
EigenSet pair_and_biorthonormalize(std::span<const LeftEigenpair> lefts,
                                   std::span<const RightEigenpair> rights,
                                   const EigTolerances& tol = {});

/// Biorthogonal Gram-Schmidt on a (near-)degenerate subspace. With a
/// reference (the neighbouring grid point) the left combinations are chosen
/// so that <chi_m|phi_n(ref)> = delta_mn, then the rights are completed to a
/// biorthonormal set.
std::vector<BiorthPair> biorthogonal_gram_schmidt(std::span<const BiorthPair> subspace,
                                                  std::span<const BiorthPair> reference = {},
                                                  const EigTolerances& tol = {});

/// Full biorthonormal eigenbasis of H. Degenerate clusters go through
/// biorthogonal_gram_schmidt, aligned against `reference` when given.
EigenSet eigensystem(const Matrix& H, const EigTolerances& tol = {},
                     std::span<const BiorthPair> reference = {});

/// Largest |<chi_m|phi_n> - delta_mn| over the set.
double biorthonormality_defect(const EigenSet& set);

}  // namespace zakline
