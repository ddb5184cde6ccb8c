#include "rmp/matrix.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace rmp {

bool all_finite(const Eigen::MatrixXd& m) {
  return m.allFinite();
}

SquareMatrix::SquareMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw DomainError("matrix must be square and non-empty");
  }
  if (!all_finite(m_)) {
    throw DomainError("matrix has non-finite entries");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m_);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > kInvertibilityThreshold * s(0))) {
    throw SingularInput("matrix is singular within tolerance");
  }
}

SquareMatrix SquareMatrix::identity(int dim) {
  return SquareMatrix(Eigen::MatrixXd::Identity(dim, dim), Unchecked{});
}

SquareMatrix SquareMatrix::diagonal(const Eigen::VectorXd& d) {
  return SquareMatrix(Eigen::MatrixXd(d.asDiagonal()));
}

SquareMatrix SquareMatrix::unchecked(Eigen::MatrixXd m) {
  if (!all_finite(m)) {
    throw DomainError("matrix has non-finite entries");
  }
  return SquareMatrix(std::move(m), Unchecked{});
}

SquareMatrix SquareMatrix::inverse() const {
  return unchecked(m_.inverse());
}

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DomainError("dimension mismatch in matrix product");
  }
  return SquareMatrix::unchecked(a.m_ * b.m_);
}

SquareMatrix random_scale_mix_matrix(RngStream& rng, int dim_min,
                                     int dim_max) {
  if (dim_min < 1 || dim_max < dim_min) {
    throw DomainError("random_scale_mix_matrix: bad dimension range");
  }
  while (true) {
    const int d = dim_min + static_cast<int>(rng.uniform_below(
                                static_cast<std::uint64_t>(dim_max - dim_min + 1)));
    const int style = static_cast<int>(rng.uniform_below(3));
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        m(i, j) = rng.gaussian();
      }
    }
    if (style == 1) {
      m *= std::pow(10.0, -3.0 + 6.0 * rng.uniform01());
    } else if (style == 2) {
      for (int j = 0; j < d; ++j) {
        m.col(j) *= std::pow(10.0, -2.0 + 4.0 * rng.uniform01());
      }
    }
    try {
      return SquareMatrix(std::move(m));
    } catch (const SingularInput&) {
      // redraw
    }
  }
}

}  // namespace rmp
