#include "rmp/measure.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "rmp/kak.hpp"
#include "rmp/wedge.hpp"

namespace rmp {

Weight Weight::rational(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num <= 0) {
    throw DomainError("rational weight must be positive");
  }
  const std::int64_t g = std::gcd(num, den);
  num /= g;
  den /= g;
  return Weight{static_cast<double>(num) / static_cast<double>(den),
                std::make_pair(num, den)};
}

namespace {

// Exact sum of rationals; returns nullopt on overflow of the common
// denominator (falls back to the double check).
std::optional<std::pair<std::int64_t, std::int64_t>> exact_sum(
    const std::vector<Atom>& atoms) {
  std::int64_t num = 0, den = 1;
  for (const auto& a : atoms) {
    if (!a.weight.exact) return std::nullopt;
    auto [n2, d2] = *a.weight.exact;
    const std::int64_t g = std::gcd(den, d2);
    const std::int64_t scale = d2 / g;
    if (den > (std::int64_t{1} << 56) / scale) return std::nullopt;
    num = num * scale + n2 * (den / g);
    den *= scale;
    const std::int64_t r = std::gcd(num, den);
    num /= r;
    den /= r;
  }
  return std::make_pair(num, den);
}

// Vose's alias method; O(1) per draw at 10^7-draw scale.
void build_alias(const std::vector<Atom>& atoms, std::vector<double>& prob,
                 std::vector<std::size_t>& alias) {
  const std::size_t k = atoms.size();
  prob.assign(k, 0.0);
  alias.assign(k, 0);
  std::vector<double> scaled(k);
  for (std::size_t i = 0; i < k; ++i) {
    scaled[i] = atoms[i].weight.value * static_cast<double>(k);
  }
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < k; ++i) {
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    large.pop_back();
    prob[s] = scaled[s];
    alias[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::size_t i : large) prob[i] = 1.0;
  for (std::size_t i : small) prob[i] = 1.0;
}

bool atoms_are_sl(const std::vector<Atom>& atoms) {
  for (const auto& a : atoms) {
    if (std::abs(std::abs(a.matrix.mat().determinant()) - 1.0) > 1e-9) {
      return false;
    }
  }
  return true;
}

}  // namespace

MatrixMeasure MatrixMeasure::finite(std::vector<Atom> atoms,
                                    MeasureFlags flags, std::string name) {
  if (atoms.empty()) {
    throw DomainError("finite measure needs at least one atom");
  }
  const int d = atoms.front().matrix.dim();
  double total = 0.0;
  for (const auto& a : atoms) {
    if (a.matrix.dim() != d) {
      throw DomainError("all atoms must share the measure dimension");
    }
    if (!(a.weight.value > 0.0)) {
      throw DomainError("atom weights must be positive");
    }
    total += a.weight.value;
  }
  if (auto exact = exact_sum(atoms)) {
    if (exact->first != exact->second) {
      throw DomainError("rational atom weights do not sum to 1");
    }
  } else if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("atom weights must sum to 1 within 1e-12");
  }
  if (flags.proximality_index &&
      (*flags.proximality_index < 1 || *flags.proximality_index > d)) {
    throw DomainError("proximality index hint must lie in [1, d]");
  }

  MatrixMeasure mu;
  mu.kind_ = Kind::Finite;
  mu.dim_ = d;
  mu.flags_ = flags;
  mu.name_ = std::move(name);
  mu.is_sl_ = atoms_are_sl(atoms);
  mu.atoms_ = std::move(atoms);
  build_alias(mu.atoms_, mu.alias_prob_, mu.alias_idx_);
  return mu;
}

MatrixMeasure MatrixMeasure::gaussian_sl(int dim) {
  if (dim < 1) throw DomainError("gaussian_sl: dim must be >= 1");
  MatrixMeasure mu;
  mu.kind_ = Kind::Sampler;
  mu.dim_ = dim;
  mu.flags_ = MeasureFlags{true, true, true, 1};
  mu.name_ = "gaussian_sl";
  mu.is_sl_ = true;
  mu.family_ = SamplerFamily::GaussianSl;
  return mu;
}

const std::vector<Atom>& MatrixMeasure::atoms() const {
  if (kind_ != Kind::Finite) {
    throw UnsupportedForSampler("sampler measure has no atom list");
  }
  return atoms_;
}

std::size_t MatrixMeasure::sample_index(RngStream& rng) const {
  if (kind_ != Kind::Finite) {
    throw UnsupportedForSampler("sample_index requires a finite measure");
  }
  const std::size_t i = rng.uniform_below(atoms_.size());
  return rng.uniform01() < alias_prob_[i] ? i : alias_idx_[i];
}

SquareMatrix MatrixMeasure::sample(RngStream& rng) const {
  if (kind_ == Kind::Finite) {
    return atoms_[sample_index(rng)].matrix;
  }
  // GaussianSl: redraw until comfortably invertible, then rescale to
  // |det| = 1.
  while (true) {
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        m(i, j) = rng.gaussian();
      }
    }
    const double det = m.determinant();
    if (std::abs(det) < 1e-8) continue;
    m /= std::pow(std::abs(det), 1.0 / dim_);
    return SquareMatrix::unchecked(std::move(m));
  }
}

std::string MatrixMeasure::description() const {
  if (!name_.empty()) {
    return name_ + "(d=" + std::to_string(dim_) + ")";
  }
  return "finite(d=" + std::to_string(dim_) +
         ", atoms=" + std::to_string(atoms_.size()) + ")";
}

double moment_kernel(const SquareMatrix& g) {
  const Eigen::VectorXd s =
      Eigen::JacobiSVD<Eigen::MatrixXd>(g.mat()).singularValues();
  const double ln_norm = std::log(s(0));
  const double ln_inv_norm = -std::log(s(s.size() - 1));
  return std::max({ln_norm, ln_inv_norm, 0.0});
}

MomentReport moment(const MatrixMeasure& mu, int order) {
  if (order < 1) throw DomainError("moment order must be >= 1");
  if (mu.kind() != MatrixMeasure::Kind::Finite) {
    throw UnsupportedForSampler(
        "exact moments are only defined for finite measures; use "
        "moment_estimate");
  }
  double v = 0.0;
  for (const auto& a : mu.atoms()) {
    v += a.weight.value * std::pow(moment_kernel(a.matrix), order);
  }
  return MomentReport{order, v, std::nullopt, std::nullopt};
}

MomentReport moment_estimate(const MatrixMeasure& mu, int order,
                             std::int64_t draws, RngStream rng) {
  if (order < 1) throw DomainError("moment order must be >= 1");
  if (draws < 2) throw DomainError("moment_estimate needs >= 2 draws");
  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t i = 0; i < draws; ++i) {
    const double x = std::pow(moment_kernel(mu.sample(rng)), order);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / static_cast<double>(draws);
  const double var =
      std::max(0.0, sumsq / static_cast<double>(draws) - mean * mean);
  const double se = std::sqrt(var / static_cast<double>(draws - 1));
  return MomentReport{order, mean, se, draws};
}

MatrixMeasure transpose_measure(const MatrixMeasure& mu) {
  if (mu.kind() == MatrixMeasure::Kind::Sampler) {
    // The Gaussian-entry law is invariant under transposition.
    return mu;
  }
  std::vector<Atom> atoms;
  atoms.reserve(mu.atoms().size());
  for (const auto& a : mu.atoms()) {
    atoms.push_back(Atom{a.matrix.transposed(), a.weight});
  }
  return MatrixMeasure::finite(std::move(atoms), mu.flags(),
                               mu.name().empty() ? "" : mu.name() + "_t");
}

MatrixMeasure wedge_measure(const MatrixMeasure& mu, int p) {
  if (p < 1 || p > mu.dim()) {
    throw DomainError("wedge_measure: p out of range [1, d]");
  }
  if (p == 1) return mu;
  if (mu.kind() == MatrixMeasure::Kind::Sampler) {
    throw UnsupportedForSampler("wedge pushforward of a sampler measure");
  }
  std::vector<Atom> atoms;
  atoms.reserve(mu.atoms().size());
  for (const auto& a : mu.atoms()) {
    atoms.push_back(Atom{wedge_power(a.matrix, p), a.weight});
  }
  return MatrixMeasure::finite(std::move(atoms), MeasureFlags{});
}

MatrixMeasure notconv_measure(double lambda, double theta) {
  if (!(lambda > 1.0)) {
    throw DomainError("notconv: lambda must be > 1");
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("notconv: theta must be in (0, 1)");
  }
  Eigen::MatrixXd sigma(2, 2), a(2, 2);
  sigma << 0, -1, 1, 0;
  a << lambda, 0, 0, 1.0 / lambda;
  std::vector<Atom> atoms;
  atoms.push_back(Atom{SquareMatrix(sigma), Weight::of(1.0 - theta)});
  atoms.push_back(Atom{SquareMatrix(sigma * a), Weight::of(theta)});
  MeasureFlags flags;
  flags.strongly_irreducible = false;  // the coordinate-axis pair is invariant
  flags.proximal = true;               // even products are diagonal stretches
  flags.zariski_dense = false;
  return MatrixMeasure::finite(std::move(atoms), flags, "notconv");
}

MatrixMeasure positive_pair_measure() {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 2, 1, 1, 1;
  b << 1, 1, 1, 2;
  std::vector<Atom> atoms;
  atoms.push_back(Atom{SquareMatrix(a), Weight::rational(1, 2)});
  atoms.push_back(Atom{SquareMatrix(b), Weight::rational(1, 2)});
  return MatrixMeasure::finite(std::move(atoms),
                               MeasureFlags{true, true, true, 1},
                               "positive_pair");
}

MatrixMeasure shear_cycle_measure(int dim) {
  if (dim < 2) throw DomainError("shear_cycle: dim must be >= 2");
  std::vector<Atom> atoms;
  for (int i = 0; i < dim; ++i) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(dim, dim);
    m(i, (i + 1) % dim) = 1.0;
    atoms.push_back(
        Atom{SquareMatrix(std::move(m)), Weight::rational(1, dim)});
  }
  return MatrixMeasure::finite(std::move(atoms),
                               MeasureFlags{true, true, true, 1},
                               "shear_cycle");
}

}  // namespace rmp
