#include "rmp/projective.hpp"

#include <algorithm>
#include <cmath>

namespace rmp {

Eigen::VectorXd canonical_sign(Eigen::VectorXd v) {
  const double scale = v.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * scale;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol) {
      if (v(i) < 0) v = -v;
      break;
    }
  }
  return v;
}

namespace {

Eigen::VectorXd unitize(const Eigen::VectorXd& v, const char* what) {
  if (v.size() < 1 || !v.allFinite()) {
    throw DomainError(std::string(what) + ": non-finite or empty vector");
  }
  const double n = v.norm();
  if (!(n > 0)) {
    throw DomainError(std::string(what) + ": zero vector");
  }
  return canonical_sign(v / n);
}

}  // namespace

ProjPoint::ProjPoint(const Eigen::VectorXd& v)
    : v_(unitize(v, "ProjPoint")) {}

ProjPoint ProjPoint::axis(int dim, int i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v(i) = 1.0;
  return ProjPoint(v);
}

ProjHyperplane::ProjHyperplane(const Eigen::VectorXd& normal)
    : n_(unitize(normal, "ProjHyperplane")) {}

ProjHyperplane ProjHyperplane::axis_normal(int dim, int i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v(i) = 1.0;
  return ProjHyperplane(v);
}

double wedge_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    for (Eigen::Index j = i + 1; j < v.size(); ++j) {
      const double m = v(i) * w(j) - v(j) * w(i);
      sq += m * m;
    }
  }
  return std::sqrt(sq);
}

double delta_points(const ProjPoint& x, const ProjPoint& y) {
  return std::clamp(wedge_norm(x.vec(), y.vec()), 0.0, 1.0);
}

double delta_point_hyperplane(const ProjPoint& x, const ProjHyperplane& h) {
  return std::clamp(std::abs(h.normal().dot(x.vec())), 0.0, 1.0);
}

double delta_hyperplanes(const ProjHyperplane& h1, const ProjHyperplane& h2) {
  return std::clamp(wedge_norm(h1.normal(), h2.normal()), 0.0, 1.0);
}

ProjPoint projective_action(const SquareMatrix& g, const ProjPoint& x) {
  return ProjPoint(g.mat() * x.vec());
}

ProjHyperplane dual_action(const SquareMatrix& g, const ProjHyperplane& h) {
  // <g^-T n, g v> = <n, v>, so the image hyperplane of ker(n) has normal
  // g^-T n. Solve g^T m = n instead of forming the inverse.
  Eigen::VectorXd m = g.mat().transpose().partialPivLu().solve(h.normal());
  return ProjHyperplane(m);
}

}  // namespace rmp
