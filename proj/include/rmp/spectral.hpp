#pragma once

/*
 * Eigenvalue moduli of real (possibly non-symmetric) matrices. Only the
 * moduli are exposed: eigenvalues of real inputs may be complex, but the
 * Jordan vector (log rho_1 >= ... >= log rho_d) only needs their absolute
 * values.
 */

#include <Eigen/Dense>
#include <vector>

#include "rmp/matrix.hpp"

namespace rmp {

/// Log eigenvalue moduli in non-increasing order (natural log).
struct JordanVector {
  std::vector<double> values;
};

/// Eigenvalue moduli in non-increasing order.
Eigen::VectorXd eigen_moduli_raw(const Eigen::MatrixXd& g);

JordanVector eigen_moduli(const SquareMatrix& g);

double spectral_radius(const SquareMatrix& g);
double spectral_radius(const Eigen::MatrixXd& g);

/// Operator (spectral) 2-norm: the largest singular value.
double operator_norm(const Eigen::MatrixXd& g);

}  // namespace rmp
