#pragma once

/*
 * The driving probability measure mu on GL_d(R): finite-support atom
 * lists (sampled with an alias table) or parametric samplers, the
 * moment kernel l(g) = max{ln+ ||g||, ln+ ||g^-1||}, transpose and
 * wedge pushforwards, and the built-in named ensembles used by the
 * experiment suites.
 *
 * Algebraic hypotheses (strong irreducibility, proximality, Zariski
 * density) are not decidable by sampling; they are caller-asserted
 * flags that the statistics layer consults to decide which estimators
 * apply.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmp/matrix.hpp"
#include "rmp/rng.hpp"

namespace rmp {

struct MeasureFlags {
  bool strongly_irreducible = false;
  bool proximal = false;
  bool zariski_dense = false;
  std::optional<int> proximality_index;  // hint, in [1, d] when present

  bool operator==(const MeasureFlags&) const = default;
};

/// Weight of a finite-support atom. When the config supplied the weight
/// as a rational string ("1/3"), the exact pair is kept so normalization
/// can be checked without rounding.
struct Weight {
  double value = 0.0;
  std::optional<std::pair<std::int64_t, std::int64_t>> exact;

  static Weight of(double v) { return Weight{v, std::nullopt}; }
  static Weight rational(std::int64_t num, std::int64_t den);
};

struct Atom {
  SquareMatrix matrix;
  Weight weight;
};

class MatrixMeasure {
 public:
  enum class Kind { Finite, Sampler };
  enum class SamplerFamily { GaussianSl };

  static MatrixMeasure finite(std::vector<Atom> atoms, MeasureFlags flags,
                              std::string name = "");

  /// i.i.d. N(0,1) entries rescaled by |det|^{-1/d} to det +-1. Has all
  /// polynomial moments; serves as a continuous-measure smoke test.
  static MatrixMeasure gaussian_sl(int dim);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const MeasureFlags& flags() const { return flags_; }
  const std::string& name() const { return name_; }
  const std::vector<Atom>& atoms() const;

  /// True when every atom has |det| = 1 within 1e-9 (samplers: by
  /// construction).
  bool is_sl() const { return is_sl_; }

  /// Index of the next atom under the alias table. Finite kind only.
  std::size_t sample_index(RngStream& rng) const;

  SquareMatrix sample(RngStream& rng) const;

  std::string description() const;

 private:
  MatrixMeasure() = default;

  Kind kind_ = Kind::Finite;
  int dim_ = 0;
  MeasureFlags flags_;
  std::string name_;
  bool is_sl_ = false;

  std::vector<Atom> atoms_;
  std::vector<double> alias_prob_;
  std::vector<std::size_t> alias_idx_;

  SamplerFamily family_ = SamplerFamily::GaussianSl;
};

/// l(g) = max{ln+ ||g||, ln+ ||g^-1||} with operator norms, i.e.
/// max{ln+ a_1(g), ln+ 1/a_d(g)}.
double moment_kernel(const SquareMatrix& g);

struct MomentReport {
  int order = 1;
  double value = 0.0;
  std::optional<double> std_error;        // present for sampler estimates
  std::optional<std::int64_t> draws_used; // present for sampler estimates
};

/// Exact weighted sum for finite measures. Throws UnsupportedForSampler
/// for sampler kinds.
MomentReport moment(const MatrixMeasure& mu, int order);

/// Monte Carlo estimate with standard error, for sampler measures (works
/// for finite ones too).
MomentReport moment_estimate(const MatrixMeasure& mu, int order,
                             std::int64_t draws, RngStream rng);

/// Pushforward by g -> g^T. Involution; flags are preserved.
MatrixMeasure transpose_measure(const MatrixMeasure& mu);

/// Pushforward by g -> wedge_power(g, p). Flags are preserved only for
/// p == 1 (the wedge image of an irreducible action need not be
/// irreducible).
MatrixMeasure wedge_measure(const MatrixMeasure& mu, int p);

/// The two-atom rotation/stretch ensemble {sigma, sigma a} with
/// mu(sigma a) = theta: irreducible but not strongly irreducible, with a
/// vanishing top Lyapunov exponent. Requires lambda > 1, theta in (0,1).
MatrixMeasure notconv_measure(double lambda, double theta);

/// Uniform on {[[2,1],[1,1]], [[1,1],[1,2]]}: a strongly irreducible,
/// proximal, Zariski-dense SL_2 default ensemble.
MatrixMeasure positive_pair_measure();

/// Uniform on the d cyclic elementary shears I + e_{i,i+1 mod d}:
/// det-1 integer atoms in any dimension d >= 2.
MatrixMeasure shear_cycle_measure(int dim);

}  // namespace rmp
