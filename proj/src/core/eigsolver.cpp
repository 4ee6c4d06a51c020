#include "zakline/eigsolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "zakline/error.hpp"

namespace zakline {

namespace {

// Vectors whose normalized overlap exceeds this are treated as coalesced.
constexpr double kParallelTol = 1e-12;
// Relative singular-value floor below which a set of vectors is rank deficient.
constexpr double kRankTol = 1e-8;

std::vector<std::size_t> sorted_order(const std::vector<Complex>& values, double tie) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a].real() < values[b].real();
  });
  // Runs of (numerically) equal real parts are ordered by imaginary part.
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    while (end < order.size() &&
           values[order[end]].real() - values[order[end - 1]].real() <= tie) {
      ++end;
    }
    std::stable_sort(order.begin() + begin, order.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                       return values[a].imag() < values[b].imag();
                     });
    begin = end;
  }
  return order;
}

// Groups indices 0..n-1 of an already sorted value list into clusters whose
// members are within `radius` of another member (single linkage).
std::vector<std::vector<std::size_t>> clusters_of(const std::vector<Complex>& values,
                                                  double radius) {
  const std::size_t n = values.size();
  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(values[i] - values[j]) <= radius) {
        root[find(j)] = find(i);
      }
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

double relative_min_singular(const Matrix& vectors) {
  Eigen::JacobiSVD<Matrix> svd(vectors);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

// Closed form for [[a, b], [c, d]]: E = n0 +- sqrt(h^2 + bc), h = (a - d)/2.
std::vector<RightEigenpair> closed_form_2x2(const Matrix& H, const EigTolerances& tol) {
  const Complex a = H(0, 0), b = H(0, 1), c = H(1, 0), d = H(1, 1);
  const double scale = matrix_scale(H);
  const Complex n0 = 0.5 * (a + d);
  const Complex h = 0.5 * (a - d);
  const Complex root = std::sqrt(h * h + b * c);

  if (std::abs(root) <= tol.degeneracy * scale) {
    const double off = std::max({std::abs(h), std::abs(b), std::abs(c)});
    if (off > tol.degeneracy * scale) {
      fail(ErrorCode::DefectiveMatrix,
           "2x2 matrix has a coalesced eigenvalue with a single eigenvector "
           "(exceptional point)");
    }
    Vector e1 = Vector::Zero(2), e2 = Vector::Zero(2);
    e1(0) = 1.0;
    e2(1) = 1.0;
    return {{n0, e1}, {n0, e2}};
  }

  std::vector<RightEigenpair> out;
  for (const Complex value : {n0 - root, n0 + root}) {
    Vector v1(2), v2(2);
    v1 << b, value - a;
    v2 << value - d, c;
    Vector v = v1.norm() >= v2.norm() ? v1 : v2;
    v /= v.norm();
    out.push_back({value, std::move(v)});
  }
  return out;
}

std::vector<RightEigenpair> dense_general(const Matrix& H, const EigTolerances& tol) {
  Eigen::ComplexEigenSolver<Matrix> solver(H, true);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::NoConvergence, "dense eigensolver did not converge");
  }
  const double scale = matrix_scale(H);
  std::vector<Complex> values(solver.eigenvalues().data(),
                              solver.eigenvalues().data() + solver.eigenvalues().size());
  std::vector<RightEigenpair> out;
  out.reserve(values.size());
  for (Index i = 0; i < H.rows(); ++i) {
    Vector v = solver.eigenvectors().col(i);
    v /= v.norm();
    out.push_back({values[static_cast<std::size_t>(i)], std::move(v)});
  }

  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (std::abs(out[i].vector.dot(out[j].vector)) > 1.0 - kParallelTol) {
        fail(ErrorCode::DefectiveMatrix, "eigenvectors " + std::to_string(i) + " and " +
                                             std::to_string(j) +
                                             " coincide (exceptional point)");
      }
    }
  }
  for (const auto& group : clusters_of(values, tol.degeneracy * scale)) {
    if (group.size() < 2) continue;
    Matrix span(H.rows(), static_cast<Index>(group.size()));
    for (std::size_t m = 0; m < group.size(); ++m) {
      span.col(static_cast<Index>(m)) = out[group[m]].vector;
    }
    if (relative_min_singular(span) < kRankTol) {
      fail(ErrorCode::DefectiveMatrix,
           "degenerate eigenvalue lacks a full set of eigenvectors");
    }
  }
  return out;
}

}  // namespace

void validate_matrix(const Matrix& H) {
  if (H.rows() != H.cols()) {
    fail(ErrorCode::InvalidArgument, "matrix is not square");
  }
  if (H.rows() < 2) {
    fail(ErrorCode::InvalidArgument, "matrix dimension must be at least 2");
  }
  if (!H.allFinite()) {
    fail(ErrorCode::InvalidArgument, "matrix has non-finite entries");
  }
}

double matrix_scale(const Matrix& H) { return std::max(1.0, H.norm()); }

void sort_eigenvalues(std::vector<Complex>& values, double tie) {
  const auto order = sorted_order(values, tie);
  std::vector<Complex> sorted;
  sorted.reserve(values.size());
  for (auto i : order) sorted.push_back(values[i]);
  values = std::move(sorted);
}

std::vector<Complex> eigenvalues(const Matrix& H, const EigTolerances& tol) {
  validate_matrix(H);
  std::vector<Complex> values;
  if (H.rows() == 2) {
    const Complex n0 = 0.5 * (H(0, 0) + H(1, 1));
    const Complex h = 0.5 * (H(0, 0) - H(1, 1));
    const Complex root = std::sqrt(h * h + H(0, 1) * H(1, 0));
    values = {n0 - root, n0 + root};
  } else {
    Eigen::ComplexEigenSolver<Matrix> solver(H, false);
    if (solver.info() != Eigen::Success) {
      fail(ErrorCode::NoConvergence, "dense eigensolver did not converge");
    }
    values.assign(solver.eigenvalues().data(),
                  solver.eigenvalues().data() + solver.eigenvalues().size());
  }
  sort_eigenvalues(values, tol.degeneracy * matrix_scale(H));
  return values;
}

std::vector<RightEigenpair> eig_right(const Matrix& H, const EigTolerances& tol) {
  validate_matrix(H);
  auto pairs = H.rows() == 2 ? closed_form_2x2(H, tol) : dense_general(H, tol);

  std::vector<Complex> values;
  for (const auto& p : pairs) values.push_back(p.value);
  const auto order = sorted_order(values, tol.degeneracy * matrix_scale(H));
  std::vector<RightEigenpair> sorted;
  sorted.reserve(pairs.size());
  for (auto i : order) sorted.push_back(std::move(pairs[i]));
  return sorted;
}

std::vector<LeftEigenpair> eig_left(const Matrix& H, const EigTolerances& tol) {
  const Matrix transposed = H.transpose();
  auto rights = eig_right(transposed, tol);
  std::vector<LeftEigenpair> out;
  out.reserve(rights.size());
  for (auto& r : rights) out.push_back({r.value, r.vector.transpose()});
  return out;
}

EigenSet pair_and_biorthonormalize(std::span<const LeftEigenpair> lefts,
                                   std::span<const RightEigenpair> rights,
                                   const EigTolerances& tol) {
  if (lefts.size() != rights.size()) {
    fail(ErrorCode::InvalidArgument, "left and right eigenpair counts differ");
  }
  const std::size_t n = rights.size();
  std::vector<bool> used(n, false);
  EigenSet set;
  set.pairs.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const Complex target = rights[i].value;
    const double radius = tol.pair * std::max(1.0, std::abs(target));
    std::size_t best = n;
    double best_dist = 0.0;
    int within = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double dist = std::abs(lefts[j].value - target);
      if (dist <= radius) ++within;
      if (!used[j] && (best == n || dist < best_dist)) {
        best = j;
        best_dist = dist;
      }
    }
    if (within > 1) {
      fail(ErrorCode::PairingAmbiguous,
           "more than one left eigenvalue within pairing tolerance of (" +
               std::to_string(target.real()) + ", " + std::to_string(target.imag()) + ")");
    }
    if (best == n || best_dist > radius) {
      fail(ErrorCode::InvalidArgument, "left and right eigenvalue lists do not match");
    }
    used[best] = true;

    BiorthPair pair{static_cast<int>(i) + 1, target, lefts[best].vector, rights[i].vector};
    const Complex overlap = pair.self_overlap();
    if (std::abs(overlap) < tol.selforth) {
      fail(ErrorCode::SelfOrthogonal,
           "left and right eigenvectors are self-orthogonal (exceptional point)");
    }
    const Complex root = std::sqrt(overlap);
    pair.left /= root;
    pair.right /= root;
    set.pairs.push_back(std::move(pair));
  }
  return set;
}

std::vector<BiorthPair> biorthogonal_gram_schmidt(std::span<const BiorthPair> subspace,
                                                  std::span<const BiorthPair> reference,
                                                  const EigTolerances& tol) {
  const auto k = static_cast<Index>(subspace.size());
  if (k == 0) return {};
  const Index dim = subspace.front().right.size();

  Matrix lefts(k, dim), rights(dim, k);
  Complex mean_energy = 0.0;
  for (Index a = 0; a < k; ++a) {
    lefts.row(a) = subspace[static_cast<std::size_t>(a)].left;
    rights.col(a) = subspace[static_cast<std::size_t>(a)].right;
    mean_energy += subspace[static_cast<std::size_t>(a)].energy;
  }
  mean_energy /= static_cast<double>(k);

  if (relative_min_singular(lefts) < kRankTol || relative_min_singular(rights) < kRankTol) {
    fail(ErrorCode::SubspaceCollapse, "degenerate subspace is numerically rank deficient");
  }

  std::vector<BiorthPair> out;
  out.reserve(subspace.size());

  if (!reference.empty()) {
    if (static_cast<Index>(reference.size()) != k) {
      fail(ErrorCode::InvalidArgument, "reference size differs from subspace size");
    }
    Matrix ref_rights(dim, k);
    for (Index n = 0; n < k; ++n) ref_rights.col(n) = reference[static_cast<std::size_t>(n)].right;
    const Matrix overlap = lefts * ref_rights;
    if (relative_min_singular(overlap) >= kRankTol) {
      // Left combinations reproducing <chi_m|phi_n(ref)> = delta_mn, then
      // rights completing the biorthonormal set.
      const Matrix new_lefts = overlap.partialPivLu().solve(lefts);
      const Matrix gram = new_lefts * rights;
      if (relative_min_singular(gram) < kRankTol) {
        fail(ErrorCode::SubspaceCollapse, "left and right degenerate spans are not dual");
      }
      const Matrix new_rights = rights * gram.partialPivLu().inverse();
      for (Index m = 0; m < k; ++m) {
        out.push_back({reference[static_cast<std::size_t>(m)].band, mean_energy,
                       new_lefts.row(m), new_rights.col(m)});
      }
      return out;
    }
    // Reference does not see this subspace: fall through to plain GS.
  }

  std::vector<bool> taken(static_cast<std::size_t>(k), false);
  for (Index m = 0; m < k; ++m) {
    // Partial pivoting over the remaining left candidates guards against
    // breakdown when some l_a is orthogonal to r_m.
    Index pick = -1;
    RowVector best_chi;
    Vector best_phi;
    Complex best_s = 0.0;
    for (Index a = 0; a < k; ++a) {
      if (taken[static_cast<std::size_t>(a)]) continue;
      RowVector chi = lefts.row(a);
      for (const auto& prev : out) chi -= pairing(chi, prev.right) * prev.left;
      Vector phi = rights.col(m);
      for (const auto& prev : out) phi -= pairing(prev.left, phi) * prev.right;
      const Complex s = pairing(chi, phi);
      if (pick < 0 || std::abs(s) > std::abs(best_s)) {
        pick = a;
        best_s = s;
        best_chi = std::move(chi);
        best_phi = std::move(phi);
      }
    }
    if (std::abs(best_s) < tol.selforth) {
      fail(ErrorCode::SubspaceCollapse,
           "biorthogonal Gram-Schmidt broke down: subspace collapsed");
    }
    taken[static_cast<std::size_t>(pick)] = true;
    const Complex root = std::sqrt(best_s);
    out.push_back({subspace[static_cast<std::size_t>(m)].band, mean_energy, best_chi / root,
                   best_phi / root});
  }
  return out;
}

EigenSet eigensystem(const Matrix& H, const EigTolerances& tol,
                     std::span<const BiorthPair> reference) {
  const auto rights = eig_right(H, tol);
  const auto lefts = eig_left(H, tol);
  const double radius = tol.degeneracy * matrix_scale(H);

  std::vector<Complex> right_values, left_values;
  for (const auto& r : rights) right_values.push_back(r.value);
  for (const auto& l : lefts) left_values.push_back(l.value);
  const auto right_groups = clusters_of(right_values, radius);
  const auto left_groups = clusters_of(left_values, radius);
  if (right_groups.size() != left_groups.size()) {
    fail(ErrorCode::PairingAmbiguous, "left and right spectra cluster differently");
  }

  // Each right cluster is matched to the nearest left cluster of equal size.
  std::vector<bool> left_used(left_groups.size(), false);
  EigenSet set;
  for (const auto& rg : right_groups) {
    const Complex value = rights[rg.front()].value;
    std::size_t best = left_groups.size();
    double best_dist = 0.0;
    for (std::size_t g = 0; g < left_groups.size(); ++g) {
      if (left_used[g] || left_groups[g].size() != rg.size()) continue;
      const double dist = std::abs(lefts[left_groups[g].front()].value - value);
      if (best == left_groups.size() || dist < best_dist) {
        best = g;
        best_dist = dist;
      }
    }
    if (best == left_groups.size() || best_dist > tol.pair * std::max(1.0, std::abs(value))) {
      fail(ErrorCode::PairingAmbiguous, "no left eigenvalue cluster matches a right one");
    }
    left_used[best] = true;
    const auto& lg = left_groups[best];

    if (rg.size() == 1) {
      const auto single = pair_and_biorthonormalize(std::span(&lefts[lg.front()], 1),
                                                    std::span(&rights[rg.front()], 1), tol);
      set.pairs.push_back(single.pairs.front());
      continue;
    }

    std::vector<BiorthPair> subspace;
    for (std::size_t m = 0; m < rg.size(); ++m) {
      subspace.push_back({0, rights[rg[m]].value, lefts[lg[m]].vector, rights[rg[m]].vector});
    }
    std::vector<BiorthPair> ref;
    if (reference.size() >= rg.size()) {
      std::vector<std::size_t> idx(reference.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(reference[x].energy - value) < std::abs(reference[y].energy - value);
      });
      for (std::size_t m = 0; m < rg.size(); ++m) ref.push_back(reference[idx[m]]);
      std::stable_sort(ref.begin(), ref.end(),
                       [](const BiorthPair& x, const BiorthPair& y) { return x.band < y.band; });
    }
    for (auto& p : biorthogonal_gram_schmidt(subspace, ref, tol)) {
      set.pairs.push_back(std::move(p));
    }
  }
  for (std::size_t n = 0; n < set.pairs.size(); ++n) {
    set.pairs[n].band = static_cast<int>(n) + 1;
  }
  return set;
}

double biorthonormality_defect(const EigenSet& set) {
  double worst = 0.0;
  for (std::size_t m = 0; m < set.size(); ++m) {
    for (std::size_t n = 0; n < set.size(); ++n) {
      const Complex expected = m == n ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(pairing(set[m].left, set[n].right) - expected));
    }
  }
  return worst;
}

}  // namespace zakline
