#pragma once

/*
 * Estimators and distribution checks over Monte Carlo sample sets:
 * Lyapunov spectra, scalar and vector CLT summaries, ratio and delta
 * tail curves, stationary-measure regularity profiles, projective decay
 * curves, and the rotation/stretch counterexample report.
 *
 * KS numbers reported here are plain sup-distances between empirical
 * (or reference) distribution functions, not calibrated p-values:
 * samples are frequently dependent across checkpoints.
 */

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmp/measure.hpp"
#include "rmp/projective.hpp"
#include "rmp/walk.hpp"

namespace rmp {

// ---------------------------------------------------------------------------
// Empirical distribution utilities

/// One-sample Kolmogorov-Smirnov distance sup |F_hat - F|.
double ks_statistic(std::vector<double> values,
                    const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance sup |F_hat_a - F_hat_b|.
double two_sample_ks(std::vector<double> a, std::vector<double> b);

/// Standard normal CDF.
double normal_cdf(double x, double sigma = 1.0);

/// CDF of |N(0, sigma^2)|.
double half_normal_cdf(double x, double sigma = 1.0);

/// Wilson 95% confidence half-width for a binomial proportion.
double wilson_halfwidth(double p_hat, std::int64_t n);

// ---------------------------------------------------------------------------
// Lyapunov spectrum

struct LyapunovEstimate {
  std::vector<double> lambdas;       // per-step, natural-log units
  std::vector<double> std_errors;    // sd of per-trial values / sqrt(trials)
  std::vector<double> trial_sd;      // sd of the per-trial values themselves
  std::int64_t n_used = 0;
  std::int64_t trials_used = 0;
};

/// lambda_i = mean over trials of cartan_i / n at the final checkpoint.
/// Requires >= 30 trials.
LyapunovEstimate lyapunov_estimate(const SampleSet& samples);

// ---------------------------------------------------------------------------
// Scalar CLT

enum class Observable { LogNorm, LogSpecrad };

/// Per-step drifts used to center the normalized samples. Values usually
/// come from an independent, larger-n pilot run; when absent the
/// in-sample mean drift is used.
struct CltCentering {
  std::optional<double> log_norm;
  std::optional<double> log_specrad;
};

struct CltReport {
  Observable observable = Observable::LogSpecrad;
  double lambda_hat = 0.0;  // centering used for the chosen observable
  double sigma_hat = 0.0;   // std of the chosen normalized observable
  std::vector<double> normalized_samples;
  double ks_vs_gaussian = 1.0;      // distance to N(0, sigma_hat)
  double ks_norm_vs_specrad = 1.0;  // two-sample KS between the channels
  double sigma_hat_norm = 0.0;      // per-channel stds
  double sigma_hat_specrad = 0.0;
  std::int64_t n_used = 0;
  std::int64_t trials_used = 0;
};

/// Normalizes (obs - n lambda)/sqrt(n) at the final checkpoint. Requires
/// the strong-irreducibility flag and >= 1000 trials; throws
/// DegenerateVariance when the spread collapses although the flags
/// promise an unbounded image.
CltReport clt_report(const SampleSet& samples, Observable observable,
                     const CltCentering& centering = {});

// ---------------------------------------------------------------------------
// Tail curves

struct TailCurve {
  std::vector<double> epsilons;
  std::vector<double> probs;
  std::vector<double> wilson;  // 95% half-widths
  std::int64_t n = 0;
  std::int64_t trials = 0;
};

/// P(rho(L_n)/||L_n|| <= eps) per eps, at checkpoint at_n (-1 = final).
TailCurve ratio_tail(const SampleSet& samples,
                     const std::vector<double>& eps_grid,
                     std::int64_t at_n = -1);

/// P(delta_n <= eps) per eps.
TailCurve delta_tail(const SampleSet& samples,
                     const std::vector<double>& eps_grid,
                     std::int64_t at_n = -1);

// ---------------------------------------------------------------------------
// Stationary-measure regularity

struct RegularityProfile {
  std::vector<double> t_grid;
  std::vector<double> sup_probs;  // max over candidate hyperplanes
  std::int64_t hyperplanes_sampled = 0;
  std::int64_t points_used = 0;
};

/// Empirical sup over hyperplanes of nu{x : delta(x, H) <= t}. The
/// supremum over all hyperplanes is not computable; candidates are
/// `hyperplane_seeds` uniform random unit normals (stream
/// (master_seed, hyperplane domain)) plus the eigenvector frame of the
/// point cloud's second-moment matrix, whose minor directions are the
/// natural worst cases. Requires >= 1000 points.
RegularityProfile regularity_profile(const std::vector<ProjPoint>& points,
                                     const std::vector<double>& t_grid,
                                     std::int64_t hyperplane_seeds,
                                     std::uint64_t master_seed);

// ---------------------------------------------------------------------------
// Eigenvalue-vector CLT

struct CovarianceReport {
  std::vector<double> mean_vector;          // mean of (jordan - n lambda)/sqrt(n)
  Eigen::MatrixXd k_hat;                    // empirical covariance
  double null_direction_variance = 0.0;     // Var of (sum_i jordan_i)/sqrt(n)
  std::int64_t trials_used = 0;
  std::int64_t n_used = 0;
};

/// Requires an SL_d measure flagged Zariski-dense.
CovarianceReport eigen_clt_covariance(const SampleSet& samples);

// ---------------------------------------------------------------------------
// Rotation/stretch counterexample

struct CounterexampleReport {
  double lambda = 2.0;
  double theta = 0.5;
  std::int64_t n = 0;
  std::int64_t trials = 0;

  double max_abs_odd_log_specrad = 0.0;  // (a): exact class, ~0
  std::int64_t s_mismatches = 0;         // (b): recovered S vs direct walk
  std::int64_t s_comparisons = 0;
  double ks_abs_gaussian = 1.0;          // (c): vs |N(0, 2 theta (1-theta))|
  std::int64_t ks_k = 0;                 // the k used in (c)
  double y_variance_empirical = 0.0;     // Var of Y_i = eps_{2i-1} - eps_{2i}
  double y_variance_expected = 0.0;      // 2 theta (1 - theta)
};

/// Runs the two-atom ensemble to time n over `trials` paths, asserts the
/// odd-time spectral radius is 1, reconstructs the integer difference
/// walk from even-time spectral radii and compares it with a direct
/// simulation driven by the same stream, and KS-tests the rescaled
/// even-time values against |N(0, 2 theta(1-theta))| (10^5 reference
/// draws).
CounterexampleReport counterexample_report(double lambda, double theta,
                                           std::int64_t n,
                                           std::int64_t trials,
                                           std::uint64_t seed,
                                           int threads = 0);

// ---------------------------------------------------------------------------
// Projective decay suite

struct DecayCurve {
  std::string label;
  std::vector<std::int64_t> n_values;
  std::vector<double> thresholds;  // exp(-c n) (or exp(-eps n) for item 1)
  std::vector<double> probs;
  std::vector<double> wilson;
  double fitted_rate = 0.0;  // least-squares slope of -ln p over n
  double rate_c = 0.0;       // probe rate actually used
  std::int64_t trials = 0;
};

struct DecayOptions {
  std::optional<double> rate_c;  // default: 0.5 (lambda1 - lambda2) from pilot
  std::int64_t far_n = 0;        // items 4/5 reference time; 0 = 2 * max(n)
  int threads = 0;
  std::int64_t pilot_trials = 200;
  int probe_vectors = 6;  // deterministic grid size for items 1-4
};

/// Items 1-5 of the slow-decay estimates:
///   1: sup_v P(||L_n v|| / ||L_n|| <= exp(-c n)) over a fixed unit grid
///   2: worst pair P(delta(L_n.x, L_n.y) >= exp(-c n))
///   3: sup_x P(delta(R_n.x, v+_{R_n}) >= exp(-c n))
///   4: coupling proxy P(delta(R_n.x, R_N.x) >= exp(-c n)), N >> n
///   5: item 4 under the transpose measure (the dual walk on normals)
/// Returns the sup/worst curve first, then the per-probe curves.
std::vector<DecayCurve> decay_suite(const MatrixMeasure& mu, int item,
                                    const std::vector<std::int64_t>& n_grid,
                                    std::int64_t trials, std::uint64_t seed,
                                    const DecayOptions& opts = {});

}  // namespace rmp
