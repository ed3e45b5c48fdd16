#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tdfs/errors.hpp"

namespace tdfs {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Returns the kets as the columns of a matrix. All kets must share one
/// dimension.
ComplexMatrix as_columns(std::span<const Ket> kets);
std::vector<Ket> columns_of(const ComplexMatrix& m);

/// |a><b|
ComplexMatrix outer(const Ket& a, const Ket& b);

/// Frobenius norm of A - A^dagger.
double hermiticity_deviation(const ComplexMatrix& a);

/// Multiplies the ket by a unit phase so that its largest-magnitude
/// component is real and positive. Ties go to the lowest index.
void fix_phase(Ket& v);

/// Modified Gram-Schmidt with one re-orthogonalization pass.
///
/// A vector whose residual norm drops below tol * (largest input norm) makes
/// the set rank deficient and raises DegenerateSet.
std::vector<Ket> gram_schmidt(std::span<const Ket> vectors, double tol = 1e-10);

/// Extends an orthonormal set to a basis of the whole space. Canonical unit
/// vectors are projected out of the current span and the one with the
/// largest residual is taken at each step, so the result is deterministic.
std::vector<Ket> complete_basis(std::span<const Ket> orthonormal, std::size_t dim);

/// exp(A) by scaling and squaring around a [13/13] Pade approximant.
ComplexMatrix matrix_exponential(const ComplexMatrix& a);

/// Orthonormal basis of {v : ||A v|| <= tol}, read off the right singular
/// vectors of A. The basis is returned in canonical form (see
/// canonical_basis).
std::vector<Ket> null_space(const ComplexMatrix& a, double tol);

/// Deterministic orthonormal basis for span(q): reduced column-echelon form
/// with pivots taken in increasing component order, then Gram-Schmidt and
/// the phase convention of fix_phase. Two orthonormal bases of the same
/// subspace map to the same output, and a smoothly moving subspace yields a
/// smoothly moving basis as long as the pivot pattern does not change.
std::vector<Ket> canonical_basis(const ComplexMatrix& q, double pivot_tol = 1e-8);

struct JointEigenspace {
  std::vector<Complex> eigenvalues;  // one per operator
  std::vector<Ket> basis;
};

/// Subspace of common eigenvectors of ops with the given eigenvalue tuple,
/// i.e. the null space of the stacked matrix [(F_1 - c_1); ...; (F_K - c_K)].
/// Every returned v satisfies ||F_k v - c_k v|| <= tol.
std::vector<Ket> joint_eigenspace(std::span<const ComplexMatrix> ops,
                                  std::span<const Complex> eigenvalues,
                                  double tol = 1e-9);

/// All joint eigenspaces of a family of square operators.
///
/// The first operator is eigendecomposed; each eigenspace is then refined by
/// the eigenvalues of the next operator compressed onto it, and so on.
/// Candidate eigenvalues closer than tol are merged. Spaces are orthogonal to
/// each other whenever the operators are normal.
std::vector<JointEigenspace> joint_eigenspaces(std::span<const ComplexMatrix> ops,
                                               double tol = 1e-9);

/// Eigenvalues of a Hermitian matrix in ascending order.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& a);

}  // namespace tdfs
