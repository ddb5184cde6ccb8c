#pragma once

/*
 * Numerically stable walk simulation.
 *
 * The running product L_n = X_n ... X_1 (or R_n = X_1 ... X_n) is stored
 * as rep * 2^pow2: after every step the representative is divided by the
 * power of two nearest to its Frobenius norm. Dividing by a power of two
 * is exact in floating point, so the ledger identity
 *
 *     true product = 2^pow2 * rep
 *
 * holds bit-for-bit (not just approximately) as long as no entry
 * overflows, and every log observable is recovered by adding
 * pow2 * ln 2 (or the companion's ledger for wedge quantities).
 *
 * For large n the representative collapses toward rank one and the
 * trailing singular values / eigenvalue moduli of rep lose all relative
 * accuracy. Full Cartan/Jordan vectors are therefore read off wedge
 * companion products, each renormalized independently:
 *
 *     ln a_i(L)   = ln ||^i L||   - ln ||^(i-1) L||
 *     ln rho_i(L) = ln rho(^i L)  - ln rho(^(i-1) L).
 */

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rmp/kak.hpp"
#include "rmp/matrix.hpp"
#include "rmp/measure.hpp"
#include "rmp/projective.hpp"
#include "rmp/rng.hpp"
#include "rmp/spectral.hpp"

namespace rmp {

enum class Side { Left, Right };

struct WalkSample {
  std::int64_t n = 0;
  double log_norm = 0.0;     // ln ||L_n||
  double log_specrad = 0.0;  // ln rho(L_n)
  CartanVector cartan;       // ln a_i(L_n)
  JordanVector jordan;       // ln rho_i(L_n)
  double delta_n = 1.0;      // delta(v+, H-) of L_n
  ProjPoint v_plus;
  ProjHyperplane h_minus;
  bool degenerate = false;   // top singular value tied within tolerance
};

class WalkState {
 public:
  /// Identity product at n = 0. When full_spectrum is set, wedge
  /// companions for p = 2..dim are carried so observe() can produce
  /// accurate Cartan/Jordan tails.
  WalkState(int dim, Side side, bool full_spectrum = true);

  int dim() const { return static_cast<int>(rep_.rows()); }
  Side side() const { return side_; }
  std::int64_t n() const { return n_; }
  bool full_spectrum() const { return full_spectrum_; }

  const Eigen::MatrixXd& rep() const { return rep_; }
  std::int64_t pow2() const { return pow2_; }
  double log_scale() const { return static_cast<double>(pow2_) * kLn2; }

  /// Multiplies the next increment on the walk's side and renormalizes.
  /// Computes wedge powers of x on the fly when carrying companions.
  void advance(const SquareMatrix& x);

  /// Same, with precomputed wedge powers of x (x_wedges[p-2] = ^p x),
  /// as cached per atom by the trial runner.
  void advance(const Eigen::MatrixXd& x,
               std::span<const Eigen::MatrixXd> x_wedges);

  WalkSample observe() const;

 private:
  static constexpr double kLn2 = 0.6931471805599453;

  void renormalize(Eigen::MatrixXd& m, std::int64_t& pow2) const;

  Eigen::MatrixXd rep_;
  std::int64_t pow2_ = 0;
  std::int64_t n_ = 0;
  Side side_;
  bool full_spectrum_;
  std::vector<Eigen::MatrixXd> wrep_;   // companions, p = 2..dim
  std::vector<std::int64_t> wpow2_;
};

/// Pure-function form of a single step.
WalkState step(const WalkState& state, const SquareMatrix& x);
WalkSample observe(const WalkState& state);
inline WalkState init_state(int dim, Side side, bool full_spectrum = true) {
  return WalkState(dim, side, full_spectrum);
}

struct SampleSet {
  // config echo (thread count deliberately excluded: it never affects
  // output)
  int dim = 0;
  Side side = Side::Left;
  std::int64_t n = 0;
  std::vector<std::int64_t> checkpoints;
  std::int64_t trials = 0;
  std::uint64_t master_seed = 0;
  std::string measure_desc;
  MeasureFlags flags;
  bool measure_is_sl = false;

  /// samples[trial][checkpoint index]
  std::vector<std::vector<WalkSample>> samples;
};

/// One walk of length n observed at the given checkpoints (sorted,
/// within [1, n]). Draws from mu are consumed in step order.
std::vector<WalkSample> run_trial(const MatrixMeasure& mu, Side side,
                                  std::int64_t n,
                                  std::span<const std::int64_t> checkpoints,
                                  RngStream rng,
                                  bool full_spectrum = true);

/// Embarrassingly parallel trials. Trial t always uses the stream
/// (master_seed, t) and lands in slot t, so the result is byte-identical
/// for every worker count.
SampleSet run_monte_carlo(const MatrixMeasure& mu, Side side, std::int64_t n,
                          std::span<const std::int64_t> checkpoints,
                          std::int64_t trials, std::uint64_t master_seed,
                          int threads = 0, bool full_spectrum = true);

/// R_n . x0 for the right walk: one approximate draw from the stationary
/// measure when mu is asserted strongly irreducible and proximal.
ProjPoint stationary_sample(const MatrixMeasure& mu, const ProjPoint& x0,
                            std::int64_t n, RngStream rng);

/// Runs fn(t) for t in [0, trials) on the requested number of workers.
/// Exceptions are captured and rethrown (lowest trial first) as
/// TrialFailure.
void parallel_for_trials(std::int64_t trials, int threads,
                         const std::function<void(std::int64_t)>& fn);

}  // namespace rmp
