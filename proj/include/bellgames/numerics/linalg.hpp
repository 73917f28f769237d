#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "bellgames/numerics/rng.hpp"

namespace bellgames {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSymmetryTolerance = 1e-12;

/// Throws SymmetryError when max |M - M^T| exceeds `tol`, DimensionError when
/// M is not square or empty, ValidationError on non-finite entries.
void require_symmetric(const Matrix& m, double tol = kSymmetryTolerance);

/// Returns (M + M^T) / 2. Used after accumulating sums that should be symmetric.
Matrix symmetrized(const Matrix& m);

/// Ascending eigenvalues of a symmetric matrix.
Vector eigenvalues_sym(const Matrix& m);
double largest_eigenvalue_sym(const Matrix& m);
double smallest_eigenvalue_sym(const Matrix& m);

/// Operator norm, computed as sqrt(largest_eigenvalue_sym) of the smaller Gram matrix.
double largest_singular_value(const Matrix& m);

/// `dim` i.i.d. standard normal entries drawn from `stream`.
Vector gaussian_vector(std::size_t dim, RngStream& stream);
/// Column-major fill: column j is drawn after column j-1.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& stream);

/// Orthogonal matrix from the QR factorisation of a Gaussian matrix, with the
/// column signs fixed so that R has a positive diagonal.
Matrix random_orthogonal(std::size_t dim, RngStream& stream);

}  // namespace bellgames
