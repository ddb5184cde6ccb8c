#pragma once

/*
 * Projective points, projective hyperplanes and the sine metric
 *
 *   delta([v],[w]) = ||v ^ w|| / (||v|| ||w||),
 *
 * the sine of the angle between the two lines. Points and hyperplane
 * normals are stored as unit vectors with a canonical sign (first
 * coordinate of magnitude above tolerance is positive), so equal
 * projective objects compare equal componentwise. All comparisons in
 * numerical code should nevertheless go through the sign-invariant
 * delta functions.
 */

#include <Eigen/Dense>

#include "rmp/matrix.hpp"

namespace rmp {

/// Flips the sign so the first coordinate with |x_i| > 1e-12 * max|x|
/// is positive. Input must be nonzero.
Eigen::VectorXd canonical_sign(Eigen::VectorXd v);

/// A point of P(V): unit representative, canonical sign.
class ProjPoint {
 public:
  /// Default: the unique point of P(R^1).
  ProjPoint() : v_(Eigen::VectorXd::Ones(1)) {}
  explicit ProjPoint(const Eigen::VectorXd& v);

  static ProjPoint axis(int dim, int i);

  const Eigen::VectorXd& vec() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }

 private:
  Eigen::VectorXd v_;
};

/// A projective hyperplane, stored by its unit normal (a point of P(V*)).
class ProjHyperplane {
 public:
  explicit ProjHyperplane(const Eigen::VectorXd& normal);

  static ProjHyperplane axis_normal(int dim, int i);

  const Eigen::VectorXd& normal() const { return n_; }
  int dim() const { return static_cast<int>(n_.size()); }

 private:
  Eigen::VectorXd n_;
};

/// ||v ^ w|| for unit v, w: sqrt of the sum of squared 2x2 minors.
/// Numerically accurate down to tiny angles, unlike sqrt(1 - <v,w>^2).
double wedge_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w);

/// Sine metric between projective points, in [0,1].
double delta_points(const ProjPoint& x, const ProjPoint& y);

/// Sine distance from a point to a hyperplane: |<normal, vec>|.
double delta_point_hyperplane(const ProjPoint& x, const ProjHyperplane& h);

/// Sine metric between hyperplanes = sine metric between their normals.
double delta_hyperplanes(const ProjHyperplane& h1, const ProjHyperplane& h2);

/// g . x : normalize(g v), canonical sign.
ProjPoint projective_action(const SquareMatrix& g, const ProjPoint& x);

/// Action on hyperplanes: normal -> normalize(g^-T normal), so that
/// x in H  iff  g.x in dual_action(g, H).
ProjHyperplane dual_action(const SquareMatrix& g, const ProjHyperplane& h);

}  // namespace rmp
