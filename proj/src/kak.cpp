#include "rmp/kak.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace rmp {

KakDecomposition kak(const Eigen::MatrixXd& g) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  KakDecomposition kd;
  kd.k = svd.matrixU();
  kd.a = svd.singularValues();
  kd.u = svd.matrixV().transpose();

  const int d = static_cast<int>(kd.a.size());
  if (!(kd.a(d - 1) > kInvertibilityThreshold * kd.a(0))) {
    throw SingularInput("kak: singular value below machine-scaled tolerance");
  }

  // Privileged choice: make the first significant entry of each column of
  // k positive; flip the matching row of u so k * diag(a) * u is unchanged.
  for (int j = 0; j < d; ++j) {
    const double scale = kd.k.col(j).cwiseAbs().maxCoeff();
    for (int i = 0; i < d; ++i) {
      if (std::abs(kd.k(i, j)) > 1e-12 * scale) {
        if (kd.k(i, j) < 0) {
          kd.k.col(j) = -kd.k.col(j);
          kd.u.row(j) = -kd.u.row(j);
        }
        break;
      }
    }
  }
  return kd;
}

KakDecomposition kak(const SquareMatrix& g) {
  return kak(g.mat());
}

ProjPoint attracting_point(const KakDecomposition& kd) {
  return ProjPoint(kd.k.col(0));
}

ProjHyperplane repelling_hyperplane(const KakDecomposition& kd) {
  // H- = (R u^-1 e1)^perp; u orthogonal, so u^-1 e1 is the first row of u.
  return ProjHyperplane(kd.u.row(0).transpose());
}

ProjPoint attracting_point(const SquareMatrix& g) {
  return attracting_point(kak(g));
}

ProjHyperplane repelling_hyperplane(const SquareMatrix& g) {
  return repelling_hyperplane(kak(g));
}

CartanVector cartan(const SquareMatrix& g) {
  const KakDecomposition kd = kak(g);
  CartanVector c;
  c.values.reserve(kd.a.size());
  for (Eigen::Index i = 0; i < kd.a.size(); ++i) {
    c.values.push_back(std::log(kd.a(i)));
  }
  return c;
}

}  // namespace rmp
