#pragma once

/*
 * KAK (singular value) decomposition g = k diag(a) u with k, u orthogonal
 * and a_1 >= ... >= a_d > 0, plus the objects read off from it: the
 * attracting point v+ = k[e1], the repelling hyperplane H- with normal
 * u^T e1, and the Cartan vector (log a_1, ..., log a_d).
 *
 * k and u are not unique; we fix the choice produced by Eigen's Jacobi
 * SVD followed by sign canonicalization (first significant entry of each
 * column of k made positive, the matching row of u flipped to preserve
 * the product), so runs are reproducible.
 */

#include <Eigen/Dense>
#include <vector>

#include "rmp/matrix.hpp"
#include "rmp/projective.hpp"

namespace rmp {

/// Ratio a2/a1 above which the top singular direction is treated as tied.
inline constexpr double kDegenerateGapRatio = 1.0 - 1e-9;

struct KakDecomposition {
  Eigen::MatrixXd k;  // orthogonal
  Eigen::VectorXd a;  // singular values, non-increasing, positive
  Eigen::MatrixXd u;  // orthogonal

  /// a2/a1 (0 when d == 1).
  double gap_ratio() const {
    return a.size() < 2 ? 0.0 : a(1) / a(0);
  }

  /// True when the top singular value is tied within tolerance; the
  /// attracting/repelling data is then choice-dependent.
  bool degenerate() const { return gap_ratio() > kDegenerateGapRatio; }

  Eigen::MatrixXd reassemble() const {
    return k * a.asDiagonal() * u;
  }
};

/// Log singular values in non-increasing order (natural log).
struct CartanVector {
  std::vector<double> values;
};

KakDecomposition kak(const SquareMatrix& g);

/// Internal entry point used by the walk engine on raw renormalized
/// representatives. Throws SingularInput below the relative threshold.
KakDecomposition kak(const Eigen::MatrixXd& g);

ProjPoint attracting_point(const SquareMatrix& g);
ProjHyperplane repelling_hyperplane(const SquareMatrix& g);

ProjPoint attracting_point(const KakDecomposition& kd);
ProjHyperplane repelling_hyperplane(const KakDecomposition& kd);

CartanVector cartan(const SquareMatrix& g);

}  // namespace rmp
