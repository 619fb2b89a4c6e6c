#pragma once

#include "ivafuse/types.hpp"

namespace ivafuse::linalg {

/// Eigen-decomposition of a real symmetric matrix.
/// `values` are sorted in descending algebraic order and column j of
/// `vectors` is the unit eigenvector belonging to values(j).
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

/// Dense symmetric eigensolver: Householder tridiagonalization followed by
/// the implicit-shift QL iteration. Only the lower triangle is read.
/// Throws Error if the input is not square, has non-finite entries, or the
/// QL sweep fails to converge within 64 iterations per eigenvalue.
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Eigenvalues only, descending. Same algorithm as symmetric_eigen.
Vector symmetric_eigenvalues(const Matrix& a);

/// Flips each eigenvector so that its entry of largest magnitude is
/// positive (first such entry on ties).
void canonicalize_signs(Matrix& vectors);

/// Sample covariance of the columns of `x` (rows are variables), 1/(N-1).
Matrix sample_covariance(const Matrix& x);

}  // namespace ivafuse::linalg
