#include "bellgames/numerics/linalg.hpp"

#include <cmath>
#include <string>

#include "bellgames/errors.hpp"

namespace bellgames {

void require_symmetric(const Matrix& m, double tol) {
  if (m.rows() == 0 || m.rows() != m.cols())
    throw DimensionError("expected a non-empty square matrix, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  if (!m.allFinite()) throw ValidationError("matrix has non-finite entries");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol) throw SymmetryError("matrix is not symmetric: max |M - M^T| = " + std::to_string(asym));
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Vector eigenvalues_sym(const Matrix& m) {
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ValidationError("symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

double largest_eigenvalue_sym(const Matrix& m) { return eigenvalues_sym(m).maxCoeff(); }

double smallest_eigenvalue_sym(const Matrix& m) { return eigenvalues_sym(m).minCoeff(); }

double largest_singular_value(const Matrix& m) {
  if (m.size() == 0) throw DimensionError("largest_singular_value of an empty matrix");
  if (!m.allFinite()) throw ValidationError("matrix has non-finite entries");
  Matrix gram = m.rows() <= m.cols() ? Matrix(m * m.transpose()) : Matrix(m.transpose() * m);
  const double top = largest_eigenvalue_sym(symmetrized(gram));
  return std::sqrt(std::max(0.0, top));
}

Vector gaussian_vector(std::size_t dim, RngStream& stream) {
  if (dim == 0) throw DomainError("gaussian_vector: dimension must be positive");
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = stream.gaussian();
  return v;
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngStream& stream) {
  if (rows == 0 || cols == 0) throw DomainError("gaussian_matrix: dimensions must be positive");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = stream.gaussian();
  return m;
}

Matrix random_orthogonal(std::size_t dim, RngStream& stream) {
  const Matrix g = gaussian_matrix(dim, dim, stream);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace bellgames
