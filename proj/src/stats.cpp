#include "rmp/stats.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "rmp/proximality.hpp"
#include "rmp/wedge.hpp"

namespace rmp {

// ---------------------------------------------------------------------------
// Empirical distribution utilities

double ks_statistic(std::vector<double> values,
                    const std::function<double(double)>& cdf) {
  if (values.empty()) throw EmptyInput("ks_statistic: no values");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw EmptyInput("two_sample_ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double normal_cdf(double x, double sigma) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

double half_normal_cdf(double x, double sigma) {
  if (x <= 0.0) return 0.0;
  return std::erf(x / (sigma * std::sqrt(2.0)));
}

double wilson_halfwidth(double p_hat, std::int64_t n) {
  if (n <= 0) return 1.0;
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double z2n = z * z / nn;
  return z *
         std::sqrt(p_hat * (1.0 - p_hat) / nn + z2n / (4.0 * nn)) /
         (1.0 + z2n);
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

const std::vector<WalkSample>& final_column_check(const SampleSet& s) {
  if (s.samples.empty() || s.checkpoints.empty()) {
    throw InsufficientSamples("sample set has no checkpoints");
  }
  return s.samples.front();
}

std::size_t checkpoint_index(const SampleSet& s, std::int64_t at_n) {
  if (at_n < 0) return s.checkpoints.size() - 1;
  const auto it =
      std::find(s.checkpoints.begin(), s.checkpoints.end(), at_n);
  if (it == s.checkpoints.end()) {
    throw DomainError("requested n is not a checkpoint of the sample set");
  }
  return static_cast<std::size_t>(it - s.checkpoints.begin());
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (const double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

void require_sorted_positive(const std::vector<double>& grid,
                             const char* what) {
  if (grid.empty()) throw DomainError(std::string(what) + ": empty grid");
  double prev = 0.0;
  for (const double g : grid) {
    if (!(g > prev)) {
      throw DomainError(std::string(what) +
                        ": grid must be positive and strictly increasing");
    }
    prev = g;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Lyapunov spectrum

LyapunovEstimate lyapunov_estimate(const SampleSet& samples) {
  final_column_check(samples);
  const std::int64_t trials = samples.trials;
  if (trials < 30) {
    throw InsufficientSamples("lyapunov_estimate needs >= 30 trials");
  }
  const std::size_t cp = samples.checkpoints.size() - 1;
  const std::int64_t n = samples.checkpoints[cp];
  const int d = samples.dim;

  LyapunovEstimate est;
  est.n_used = n;
  est.trials_used = trials;
  est.lambdas.resize(d);
  est.std_errors.resize(d);
  est.trial_sd.resize(d);

  std::vector<double> column(trials);
  for (int i = 0; i < d; ++i) {
    for (std::int64_t t = 0; t < trials; ++t) {
      column[t] = samples.samples[t][cp].cartan.values[i] /
                  static_cast<double>(n);
    }
    est.lambdas[i] = mean_of(column);
    est.trial_sd[i] = sample_sd(column, est.lambdas[i]);
    est.std_errors[i] =
        est.trial_sd[i] / std::sqrt(static_cast<double>(trials));
  }
  return est;
}

// ---------------------------------------------------------------------------
// Scalar CLT

CltReport clt_report(const SampleSet& samples, Observable observable,
                     const CltCentering& centering) {
  if (!samples.flags.strongly_irreducible) {
    throw FlagViolation(
        "clt_report requires a measure asserted strongly irreducible");
  }
  final_column_check(samples);
  const std::int64_t trials = samples.trials;
  if (trials < 1000) {
    throw InsufficientSamples("clt_report needs >= 1000 trials");
  }
  const std::size_t cp = samples.checkpoints.size() - 1;
  const double n = static_cast<double>(samples.checkpoints[cp]);
  const double sqrt_n = std::sqrt(n);

  std::vector<double> raw_norm(trials), raw_rho(trials);
  for (std::int64_t t = 0; t < trials; ++t) {
    raw_norm[t] = samples.samples[t][cp].log_norm;
    raw_rho[t] = samples.samples[t][cp].log_specrad;
  }
  const double c_norm = centering.log_norm.value_or(mean_of(raw_norm) / n);
  const double c_rho = centering.log_specrad.value_or(mean_of(raw_rho) / n);

  std::vector<double> norm_n(trials), norm_rho(trials);
  for (std::int64_t t = 0; t < trials; ++t) {
    norm_n[t] = (raw_norm[t] - n * c_norm) / sqrt_n;
    norm_rho[t] = (raw_rho[t] - n * c_rho) / sqrt_n;
  }

  CltReport rep;
  rep.observable = observable;
  rep.n_used = samples.checkpoints[cp];
  rep.trials_used = trials;
  rep.sigma_hat_norm = sample_sd(norm_n, mean_of(norm_n));
  rep.sigma_hat_specrad = sample_sd(norm_rho, mean_of(norm_rho));

  const bool use_rho = observable == Observable::LogSpecrad;
  rep.lambda_hat = use_rho ? c_rho : c_norm;
  rep.sigma_hat = use_rho ? rep.sigma_hat_specrad : rep.sigma_hat_norm;
  rep.normalized_samples = use_rho ? norm_rho : norm_n;

  if (rep.sigma_hat < 1e-6) {
    throw DegenerateVariance(
        "normalized spread collapsed although the measure is flagged "
        "strongly irreducible with unbounded image");
  }

  const double sigma = rep.sigma_hat;
  rep.ks_vs_gaussian = ks_statistic(
      rep.normalized_samples,
      [sigma](double x) { return normal_cdf(x, sigma); });
  rep.ks_norm_vs_specrad = two_sample_ks(norm_n, norm_rho);
  return rep;
}

// ---------------------------------------------------------------------------
// Tail curves

namespace {

TailCurve tail_curve_impl(const SampleSet& samples,
                          const std::vector<double>& eps_grid,
                          std::int64_t at_n, bool ratio) {
  require_sorted_positive(eps_grid, ratio ? "ratio_tail" : "delta_tail");
  final_column_check(samples);
  const std::size_t cp = checkpoint_index(samples, at_n);

  TailCurve curve;
  curve.epsilons = eps_grid;
  curve.n = samples.checkpoints[cp];
  curve.trials = samples.trials;
  curve.probs.resize(eps_grid.size());
  curve.wilson.resize(eps_grid.size());

  for (std::size_t e = 0; e < eps_grid.size(); ++e) {
    const double eps = eps_grid[e];
    const double log_eps = std::log(eps);
    std::int64_t count = 0;
    for (std::int64_t t = 0; t < samples.trials; ++t) {
      const WalkSample& ws = samples.samples[t][cp];
      bool hit;
      if (ratio) {
        // rho <= ||L|| always; eps >= 1 therefore always counts.
        hit = eps >= 1.0 || (ws.log_specrad - ws.log_norm) <= log_eps;
      } else {
        hit = ws.delta_n <= eps;
      }
      if (hit) ++count;
    }
    const double p = static_cast<double>(count) /
                     static_cast<double>(samples.trials);
    curve.probs[e] = p;
    curve.wilson[e] = wilson_halfwidth(p, samples.trials);
  }
  return curve;
}

}  // namespace

TailCurve ratio_tail(const SampleSet& samples,
                     const std::vector<double>& eps_grid, std::int64_t at_n) {
  return tail_curve_impl(samples, eps_grid, at_n, /*ratio=*/true);
}

TailCurve delta_tail(const SampleSet& samples,
                     const std::vector<double>& eps_grid, std::int64_t at_n) {
  return tail_curve_impl(samples, eps_grid, at_n, /*ratio=*/false);
}

// ---------------------------------------------------------------------------
// Stationary-measure regularity

RegularityProfile regularity_profile(const std::vector<ProjPoint>& points,
                                     const std::vector<double>& t_grid,
                                     std::int64_t hyperplane_seeds,
                                     std::uint64_t master_seed) {
  if (points.size() < 1000) {
    throw InsufficientSamples("regularity_profile needs >= 1000 points");
  }
  require_sorted_positive(t_grid, "regularity_profile");
  const int d = points.front().dim();

  std::vector<Eigen::VectorXd> normals;
  normals.reserve(hyperplane_seeds + d);
  RngStream rng(master_seed, kStreamDomainHyperplane);
  for (std::int64_t i = 0; i < hyperplane_seeds; ++i) {
    Eigen::VectorXd v(d);
    do {
      for (int k = 0; k < d; ++k) v(k) = rng.gaussian();
    } while (v.norm() < 1e-6);
    normals.push_back(v.normalized());
  }
  // Data-adaptive candidates: the eigenvector frame of the second-moment
  // matrix. Its minor directions carry the least point mass and are the
  // natural worst slabs.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (const auto& p : points) m += p.vec() * p.vec().transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  for (int k = 0; k < d; ++k) {
    normals.push_back(es.eigenvectors().col(k));
  }

  RegularityProfile prof;
  prof.t_grid = t_grid;
  prof.sup_probs.assign(t_grid.size(), 0.0);
  prof.hyperplanes_sampled = static_cast<std::int64_t>(normals.size());
  prof.points_used = static_cast<std::int64_t>(points.size());

  std::vector<std::int64_t> counts(t_grid.size());
  for (const auto& nrm : normals) {
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& p : points) {
      const double a = std::abs(nrm.dot(p.vec()));
      const auto it = std::lower_bound(t_grid.begin(), t_grid.end(), a);
      if (it != t_grid.end()) {
        ++counts[static_cast<std::size_t>(it - t_grid.begin())];
      }
    }
    // suffix -> cumulative: counts[k] currently holds #"first grid point
    // >= a is k"; mass at <= t_k is the prefix sum.
    std::int64_t acc = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      acc += counts[k];
      const double p = static_cast<double>(acc) /
                       static_cast<double>(points.size());
      prof.sup_probs[k] = std::max(prof.sup_probs[k], p);
    }
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Eigenvalue-vector CLT

CovarianceReport eigen_clt_covariance(const SampleSet& samples) {
  if (!samples.measure_is_sl || !samples.flags.zariski_dense) {
    throw FlagViolation(
        "eigen_clt_covariance requires an SL_d measure flagged "
        "Zariski-dense");
  }
  final_column_check(samples);
  const std::int64_t trials = samples.trials;
  if (trials < 30) {
    throw InsufficientSamples("eigen_clt_covariance needs >= 30 trials");
  }
  const std::size_t cp = samples.checkpoints.size() - 1;
  const double n = static_cast<double>(samples.checkpoints[cp]);
  const double sqrt_n = std::sqrt(n);
  const int d = samples.dim;

  // Covariance is invariant to the centering constant; the in-sample
  // Lyapunov vector keeps the mean_vector diagnostic near zero.
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(d);
  for (std::int64_t t = 0; t < trials; ++t) {
    for (int i = 0; i < d; ++i) {
      lambda(i) += samples.samples[t][cp].jordan.values[i];
    }
  }
  lambda /= n * static_cast<double>(trials);

  Eigen::MatrixXd y(trials, d);
  std::vector<double> sums(trials);
  for (std::int64_t t = 0; t < trials; ++t) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      const double j = samples.samples[t][cp].jordan.values[i];
      y(t, i) = (j - n * lambda(i)) / sqrt_n;
      s += j;
    }
    sums[t] = s / sqrt_n;
  }

  CovarianceReport rep;
  rep.trials_used = trials;
  rep.n_used = samples.checkpoints[cp];
  const Eigen::VectorXd mean = y.colwise().mean();
  rep.mean_vector.assign(mean.data(), mean.data() + d);
  const Eigen::MatrixXd centered = y.rowwise() - mean.transpose();
  rep.k_hat = centered.transpose() * centered /
              static_cast<double>(trials - 1);
  const double sum_mean = mean_of(sums);
  const double sum_sd = sample_sd(sums, sum_mean);
  rep.null_direction_variance = sum_sd * sum_sd;
  return rep;
}

// ---------------------------------------------------------------------------
// Rotation/stretch counterexample

CounterexampleReport counterexample_report(double lambda, double theta,
                                           std::int64_t n,
                                           std::int64_t trials,
                                           std::uint64_t seed, int threads) {
  if (n < 2) throw DomainError("counterexample_report: n must be >= 2");
  if (trials < 1) throw DomainError("counterexample_report: trials >= 1");
  const MatrixMeasure mu = notconv_measure(lambda, theta);
  // atom 0 = sigma (eps = 0), atom 1 = sigma a (eps = 1)
  const Eigen::MatrixXd m0 = mu.atoms()[0].matrix.mat();
  const Eigen::MatrixXd m1 = mu.atoms()[1].matrix.mat();
  const double log_lambda = std::log(lambda);
  const std::int64_t k_star = n / 2;

  std::vector<double> odd_max(trials, 0.0);
  std::vector<std::int64_t> mism(trials, 0);
  std::vector<double> value_k(trials, 0.0);
  std::vector<double> sum_y(trials, 0.0), sum_y2(trials, 0.0);

  parallel_for_trials(trials, threads, [&](std::int64_t t) {
    RngStream rng(seed, kStreamDomainTrial + t);
    WalkState state(2, Side::Left, /*full_spectrum=*/false);
    std::int64_t s_direct = 0;
    int prev_eps = 0;
    double local_max = 0.0;
    std::int64_t local_mism = 0;
    for (std::int64_t i = 1; i <= n; ++i) {
      const std::size_t idx = mu.sample_index(rng);
      state.advance(idx == 0 ? m0 : m1, {});
      const int eps = idx == 1 ? 1 : 0;
      const double log_rho =
          std::log(spectral_radius(state.rep())) + state.log_scale();
      if (i % 2 == 1) {
        prev_eps = eps;
        local_max = std::max(local_max, std::abs(log_rho));
      } else {
        const int y = prev_eps - eps;
        s_direct += y;
        sum_y[t] += y;
        sum_y2[t] += y * y;
        // rho(L_{2k}) = lambda^{|S_k|}, so the recovered integer is |S_k|.
        const double s_hat = log_rho / log_lambda;
        if (std::llround(s_hat) != std::llabs(s_direct)) {
          ++local_mism;
        }
        if (i == 2 * k_star) {
          value_k[t] =
              log_rho / (log_lambda * std::sqrt(static_cast<double>(k_star)));
        }
      }
    }
    odd_max[t] = local_max;
    mism[t] = local_mism;
  });

  CounterexampleReport rep;
  rep.lambda = lambda;
  rep.theta = theta;
  rep.n = n;
  rep.trials = trials;
  rep.ks_k = k_star;
  rep.y_variance_expected = 2.0 * theta * (1.0 - theta);

  double total_y = 0.0, total_y2 = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    rep.max_abs_odd_log_specrad =
        std::max(rep.max_abs_odd_log_specrad, odd_max[t]);
    rep.s_mismatches += mism[t];
    total_y += sum_y[t];
    total_y2 += sum_y2[t];
  }
  rep.s_comparisons = trials * k_star;
  const double ny = static_cast<double>(trials * k_star);
  const double mean_y = total_y / ny;
  rep.y_variance_empirical = total_y2 / ny - mean_y * mean_y;

  // Reference draws from |N(0, 2 theta (1 - theta))| (sigma in std units).
  const double sigma = std::sqrt(rep.y_variance_expected);
  RngStream ref(seed, kStreamDomainReference);
  std::vector<double> reference(100000);
  for (double& x : reference) x = std::abs(sigma * ref.gaussian());
  rep.ks_abs_gaussian = two_sample_ks(value_k, reference);
  return rep;
}

// ---------------------------------------------------------------------------
// Projective decay suite

namespace {

std::vector<Eigen::VectorXd> probe_grid(int dim, int count,
                                        std::uint64_t seed) {
  std::vector<Eigen::VectorXd> grid;
  for (int i = 0; i < dim && static_cast<int>(grid.size()) < count; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(i) = 1.0;
    grid.push_back(v);
  }
  if (static_cast<int>(grid.size()) < count) {
    grid.push_back(Eigen::VectorXd::Ones(dim).normalized());
  }
  RngStream rng(seed, kStreamDomainProbe);
  while (static_cast<int>(grid.size()) < count) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) v(k) = rng.gaussian();
    if (v.norm() < 1e-6) continue;
    grid.push_back(v.normalized());
  }
  return grid;
}

double fit_decay_rate(const std::vector<std::int64_t>& n_values,
                      const std::vector<double>& probs) {
  // least-squares slope of ln p over n, reported as a positive rate
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    const double x = static_cast<double>(n_values[i]);
    const double y = std::log(probs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -(m * sxy - sx * sy) / denom;
}

double sine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  return std::clamp(wedge_norm(a / na, b / nb), 0.0, 1.0);
}

}  // namespace

std::vector<DecayCurve> decay_suite(const MatrixMeasure& mu, int item,
                                    const std::vector<std::int64_t>& n_grid,
                                    std::int64_t trials, std::uint64_t seed,
                                    const DecayOptions& opts) {
  if (item < 1 || item > 5) {
    throw DomainError("decay_suite: item must be in 1..5");
  }
  if (!mu.flags().strongly_irreducible || !mu.flags().proximal) {
    throw FlagViolation(
        "decay_suite requires a measure asserted strongly irreducible and "
        "proximal");
  }
  if (mu.dim() < 2) throw DomainError("decay_suite: dim must be >= 2");
  if (n_grid.empty()) throw DomainError("decay_suite: empty n grid");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw DomainError("decay_suite: n grid must be increasing and >= 1");
    }
  }
  if (trials < 1) throw DomainError("decay_suite: trials must be >= 1");

  if (item == 5) {
    // Dual walk on normals == item 4 under the transpose measure.
    auto curves = decay_suite(transpose_measure(mu), 4, n_grid, trials, seed,
                              opts);
    for (auto& c : curves) c.label = "item5." + c.label.substr(6);
    return curves;
  }

  const std::int64_t n_max = n_grid.back();

  double c;
  if (opts.rate_c) {
    c = *opts.rate_c;
  } else {
    // Probe rate c = (lambda1 - lambda2)/2 from a small pilot run on a
    // derived master seed (so pilot streams never collide with trial
    // streams).
    const std::int64_t pt = std::max<std::int64_t>(opts.pilot_trials, 30);
    const std::array<std::int64_t, 1> cps{n_max};
    const SampleSet pilot =
        run_monte_carlo(mu, Side::Left, n_max, cps, pt,
                        seed ^ 0xDECA1DECA1DECA1Dull, opts.threads);
    const LyapunovEstimate le = lyapunov_estimate(pilot);
    c = 0.5 * (le.lambdas[0] - le.lambdas[1]);
  }
  if (!(c > 0.0)) {
    throw DomainError(
        "decay_suite: probe rate is not positive; supply rate_c");
  }

  const int n_probe = std::max(opts.probe_vectors, 2);
  const auto probes = probe_grid(mu.dim(), n_probe, seed);

  std::vector<std::pair<int, int>> pairs;  // item 2
  for (int i = 0; i < n_probe; ++i) {
    for (int j = i + 1; j < n_probe; ++j) pairs.emplace_back(i, j);
  }

  const std::size_t n_series =
      item == 2 ? pairs.size() : probes.size();
  const std::size_t n_cp = n_grid.size();
  std::vector<std::atomic<std::int64_t>> counts(n_series * n_cp);
  for (auto& a : counts) a.store(0);

  const std::int64_t far_n =
      item == 4 ? (opts.far_n > 0 ? opts.far_n : 2 * n_max) : n_max;
  if (item == 4 && far_n <= n_max) {
    throw DomainError("decay_suite: far_n must exceed max(n_grid)");
  }
  const Side side = item <= 2 ? Side::Left : Side::Right;

  parallel_for_trials(trials, opts.threads, [&](std::int64_t t) {
    RngStream rng(seed, kStreamDomainTrial + t);
    WalkState state(mu.dim(), side, /*full_spectrum=*/false);
    std::size_t cp = 0;
    // item 4: projective images of each probe at every checkpoint
    std::vector<std::vector<Eigen::VectorXd>> snapshots(
        item == 4 ? probes.size() : 0);

    for (std::int64_t i = 1; i <= far_n; ++i) {
      state.advance(mu.sample(rng));
      if (cp < n_cp && i == n_grid[cp]) {
        const double threshold = std::exp(-c * static_cast<double>(i));
        switch (item) {
          case 1: {
            const double a1 = operator_norm(state.rep());
            for (std::size_t v = 0; v < probes.size(); ++v) {
              const double r = (state.rep() * probes[v]).norm() / a1;
              if (r <= threshold) ++counts[v * n_cp + cp];
            }
            break;
          }
          case 2: {
            std::vector<Eigen::VectorXd> images(probes.size());
            for (std::size_t v = 0; v < probes.size(); ++v) {
              images[v] = state.rep() * probes[v];
            }
            for (std::size_t q = 0; q < pairs.size(); ++q) {
              const double dist =
                  sine_distance(images[pairs[q].first],
                                images[pairs[q].second]);
              if (dist >= threshold) ++counts[q * n_cp + cp];
            }
            break;
          }
          case 3: {
            const Eigen::VectorXd vplus =
                attracting_point(kak(state.rep())).vec();
            for (std::size_t v = 0; v < probes.size(); ++v) {
              const double dist =
                  sine_distance(state.rep() * probes[v], vplus);
              if (dist >= threshold) ++counts[v * n_cp + cp];
            }
            break;
          }
          case 4: {
            for (std::size_t v = 0; v < probes.size(); ++v) {
              snapshots[v].push_back(state.rep() * probes[v]);
            }
            break;
          }
        }
        ++cp;
      }
      if (cp == n_cp && item != 4) break;
    }

    if (item == 4) {
      for (std::size_t v = 0; v < probes.size(); ++v) {
        const Eigen::VectorXd far_image = state.rep() * probes[v];
        for (std::size_t j = 0; j < n_cp; ++j) {
          const double threshold =
              std::exp(-c * static_cast<double>(n_grid[j]));
          if (sine_distance(snapshots[v][j], far_image) >= threshold) {
            ++counts[v * n_cp + j];
          }
        }
      }
    }
  });

  std::vector<DecayCurve> curves;
  DecayCurve sup;
  sup.label = "item" + std::to_string(item) + ".sup";
  sup.n_values = n_grid;
  sup.rate_c = c;
  sup.trials = trials;
  sup.probs.assign(n_cp, 0.0);
  for (std::size_t j = 0; j < n_cp; ++j) {
    sup.thresholds.push_back(std::exp(-c * static_cast<double>(n_grid[j])));
  }

  for (std::size_t s = 0; s < n_series; ++s) {
    DecayCurve cur;
    cur.label = "item" + std::to_string(item) + "." +
                (item == 2 ? "pair_" + std::to_string(pairs[s].first) + "_" +
                                 std::to_string(pairs[s].second)
                           : "probe_" + std::to_string(s));
    cur.n_values = n_grid;
    cur.thresholds = sup.thresholds;
    cur.rate_c = c;
    cur.trials = trials;
    for (std::size_t j = 0; j < n_cp; ++j) {
      const double p = static_cast<double>(counts[s * n_cp + j].load()) /
                       static_cast<double>(trials);
      cur.probs.push_back(p);
      cur.wilson.push_back(wilson_halfwidth(p, trials));
      sup.probs[j] = std::max(sup.probs[j], p);
    }
    cur.fitted_rate = fit_decay_rate(n_grid, cur.probs);
    curves.push_back(std::move(cur));
  }
  for (std::size_t j = 0; j < n_cp; ++j) {
    sup.wilson.push_back(wilson_halfwidth(sup.probs[j], trials));
  }
  sup.fitted_rate = fit_decay_rate(n_grid, sup.probs);
  curves.insert(curves.begin(), std::move(sup));
  return curves;
}

}  // namespace rmp
