#include "rmp/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace rmp {

Eigen::VectorXd eigen_moduli_raw(const Eigen::MatrixXd& g) {
  if (g.rows() == 1) {
    Eigen::VectorXd m(1);
    m(0) = std::abs(g(0, 0));
    return m;
  }
  if (g.rows() == 2) {
    // Closed form, stable: the smaller modulus comes from |det|/|l_max|
    // rather than the cancelling root.
    const double q = 0.5 * (g(0, 0) + g(1, 1));
    const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    const double disc = q * q - det;
    Eigen::VectorXd m(2);
    if (disc >= 0.0) {
      const double big = std::abs(q) + std::sqrt(disc);
      m(0) = big;
      m(1) = big > 0.0 ? std::abs(det) / big : 0.0;
    } else {
      m(0) = m(1) = std::sqrt(det);  // complex pair; det > 0 here
    }
    return m;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(g, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("eigenvalue iteration did not converge");
  }
  Eigen::VectorXd moduli = solver.eigenvalues().cwiseAbs();
  std::sort(moduli.data(), moduli.data() + moduli.size(),
            std::greater<double>());
  return moduli;
}

JordanVector eigen_moduli(const SquareMatrix& g) {
  const Eigen::VectorXd moduli = eigen_moduli_raw(g.mat());
  JordanVector j;
  j.values.reserve(moduli.size());
  for (Eigen::Index i = 0; i < moduli.size(); ++i) {
    j.values.push_back(std::log(moduli(i)));
  }
  return j;
}

double spectral_radius(const Eigen::MatrixXd& g) {
  return eigen_moduli_raw(g)(0);
}

double spectral_radius(const SquareMatrix& g) {
  return spectral_radius(g.mat());
}

double operator_norm(const Eigen::MatrixXd& g) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(g).singularValues()(0);
}

}  // namespace rmp
