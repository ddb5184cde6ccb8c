#include "rmp/wedge.hpp"

#include <Eigen/LU>

namespace rmp {

std::int64_t binomial(int d, int p) {
  if (p < 0 || p > d) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < p; ++i) {
    r = r * (d - i) / (i + 1);
  }
  return r;
}

std::vector<std::vector<int>> lex_subsets(int d, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(p);
  for (int i = 0; i < p; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = p - 1;
    while (i >= 0 && cur[i] == d - p + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < p; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

Eigen::MatrixXd wedge_power(const Eigen::MatrixXd& g, int p) {
  const int d = static_cast<int>(g.rows());
  if (p < 1 || p > d) {
    throw DomainError("wedge_power: p out of range [1, d]");
  }
  if (p == 1) return g;

  const auto subsets = lex_subsets(d, p);
  const int m = static_cast<int>(subsets.size());
  Eigen::MatrixXd w(m, m);
  Eigen::MatrixXd sub(p, p);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          sub(i, j) = g(subsets[r][i], subsets[c][j]);
        }
      }
      w(r, c) = sub.determinant();
    }
  }
  return w;
}

SquareMatrix wedge_power(const SquareMatrix& g, int p) {
  return SquareMatrix::unchecked(wedge_power(g.mat(), p));
}

}  // namespace rmp
