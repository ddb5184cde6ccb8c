#pragma once

/*
 * Dense square invertible real matrices: the increments and running
 * products of the walks.
 */

#include <Eigen/Dense>

#include "rmp/error.hpp"
#include "rmp/rng.hpp"

namespace rmp {

/// Relative invertibility threshold: the smallest singular value must
/// exceed this times the largest.
inline constexpr double kInvertibilityThreshold = 1e-12;

class SquareMatrix {
 public:
  /// Validates: all entries finite, matrix square and invertible within
  /// the relative threshold. Throws SingularInput / DomainError.
  explicit SquareMatrix(Eigen::MatrixXd m);

  static SquareMatrix identity(int dim);
  static SquareMatrix diagonal(const Eigen::VectorXd& d);

  /// Wraps a matrix known to be valid (e.g. a product of valid matrices).
  /// Only finiteness is re-checked.
  static SquareMatrix unchecked(Eigen::MatrixXd m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  SquareMatrix transposed() const { return unchecked(m_.transpose()); }
  SquareMatrix inverse() const;

  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);

 private:
  struct Unchecked {};
  SquareMatrix(Eigen::MatrixXd m, Unchecked) : m_(std::move(m)) {}

  Eigen::MatrixXd m_;
};

/// True when every entry is finite.
bool all_finite(const Eigen::MatrixXd& m);

/// Random invertible matrix with dimension uniform in [dim_min, dim_max]
/// and entries drawn from a rotating mix of scales (plain Gaussian,
/// globally rescaled, per-column rescaled). Singular draws are rejected.
SquareMatrix random_scale_mix_matrix(RngStream& rng, int dim_min,
                                     int dim_max);

}  // namespace rmp
