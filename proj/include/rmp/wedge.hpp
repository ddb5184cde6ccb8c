#pragma once

/*
 * Exterior (compound) powers: wedge_power(g, p) is the C(d,p) x C(d,p)
 * matrix of p x p minors of g in the lexicographic basis
 * (e_{i1} ^ ... ^ e_{ip}), i1 < ... < ip. Its operator norm is
 * a_1(g)...a_p(g) and its spectral radius is rho_1(g)...rho_p(g), which
 * is what the walk engine uses to read off singular-value and
 * eigenvalue tails without precision loss.
 */

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rmp/matrix.hpp"

namespace rmp {

/// C(d,p).
std::int64_t binomial(int d, int p);

/// All p-element subsets of {0,...,d-1} in lexicographic order.
std::vector<std::vector<int>> lex_subsets(int d, int p);

SquareMatrix wedge_power(const SquareMatrix& g, int p);

/// Raw variant for the walk engine's companion products.
Eigen::MatrixXd wedge_power(const Eigen::MatrixXd& g, int p);

}  // namespace rmp
