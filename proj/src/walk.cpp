#include "rmp/walk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "rmp/wedge.hpp"

namespace rmp {

WalkState::WalkState(int dim, Side side, bool full_spectrum)
    : rep_(Eigen::MatrixXd::Identity(dim, dim)),
      side_(side),
      full_spectrum_(full_spectrum && dim >= 2) {
  if (dim < 1) throw DomainError("walk dimension must be >= 1");
  if (full_spectrum_) {
    wrep_.reserve(dim - 1);
    wpow2_.assign(dim - 1, 0);
    for (int p = 2; p <= dim; ++p) {
      const auto b = binomial(dim, p);
      wrep_.push_back(Eigen::MatrixXd::Identity(b, b));
    }
  }
}

void WalkState::renormalize(Eigen::MatrixXd& m, std::int64_t& pow2) const {
  if (!m.allFinite()) {
    throw OverflowError("walk step produced non-finite entries");
  }
  const double f = m.norm();  // Frobenius
  const std::int64_t k = std::llround(std::log2(f));
  if (k != 0) {
    m *= std::exp2(static_cast<double>(-k));  // exact power-of-two scaling
    pow2 += k;
  }
}

void WalkState::advance(const Eigen::MatrixXd& x,
                        std::span<const Eigen::MatrixXd> x_wedges) {
  if (x.rows() != rep_.rows()) {
    throw DomainError("walk step dimension mismatch");
  }
  if (side_ == Side::Left) {
    rep_ = x * rep_;  // L_{n+1} = X_{n+1} L_n
  } else {
    rep_ = rep_ * x;  // R_{n+1} = R_n X_{n+1}
  }
  renormalize(rep_, pow2_);
  if (full_spectrum_) {
    for (std::size_t i = 0; i < wrep_.size(); ++i) {
      if (side_ == Side::Left) {
        wrep_[i] = x_wedges[i] * wrep_[i];
      } else {
        wrep_[i] = wrep_[i] * x_wedges[i];
      }
      renormalize(wrep_[i], wpow2_[i]);
    }
  }
  ++n_;
}

void WalkState::advance(const SquareMatrix& x) {
  std::vector<Eigen::MatrixXd> wedges;
  if (full_spectrum_) {
    wedges.reserve(wrep_.size());
    for (int p = 2; p <= dim(); ++p) {
      wedges.push_back(wedge_power(x.mat(), p));
    }
  }
  advance(x.mat(), wedges);
}

WalkSample WalkState::observe() const {
  const int d = dim();
  const KakDecomposition kd = kak(rep_);
  const double scale = log_scale();

  WalkSample out;
  out.n = n_;
  out.log_norm = std::log(kd.a(0)) + scale;
  out.degenerate = kd.degenerate();
  out.v_plus = attracting_point(kd);
  out.h_minus = repelling_hyperplane(kd);
  out.delta_n = delta_point_hyperplane(out.v_plus, out.h_minus);

  const Eigen::VectorXd moduli = eigen_moduli_raw(rep_);
  out.log_specrad = std::log(moduli(0)) + scale;

  out.cartan.values.resize(d);
  out.jordan.values.resize(d);
  out.cartan.values[0] = out.log_norm;
  out.jordan.values[0] = out.log_specrad;

  if (full_spectrum_ && d >= 2) {
    // ln ||^p L|| and ln rho(^p L) from the companions; entries are the
    // successive differences. Clamp the fp-noise-level monotonicity
    // violations that exact telescoping would not have.
    double prev_norm = out.log_norm;
    double prev_rho = out.log_specrad;
    for (int p = 2; p <= d; ++p) {
      const Eigen::MatrixXd& w = wrep_[p - 2];
      const double wscale = static_cast<double>(wpow2_[p - 2]) * kLn2;
      const double log_norm_p = std::log(operator_norm(w)) + wscale;
      const double log_rho_p = std::log(spectral_radius(w)) + wscale;
      out.cartan.values[p - 1] = log_norm_p - prev_norm;
      out.jordan.values[p - 1] = log_rho_p - prev_rho;
      prev_norm = log_norm_p;
      prev_rho = log_rho_p;
    }
    for (int i = 1; i < d; ++i) {
      out.cartan.values[i] =
          std::min(out.cartan.values[i], out.cartan.values[i - 1]);
      out.jordan.values[i] =
          std::min(out.jordan.values[i], out.jordan.values[i - 1]);
    }
  } else {
    for (int i = 1; i < d; ++i) {
      out.cartan.values[i] = std::log(kd.a(i)) + scale;
      out.jordan.values[i] = std::log(moduli(i)) + scale;
    }
  }
  return out;
}

WalkState step(const WalkState& state, const SquareMatrix& x) {
  WalkState next = state;
  next.advance(x);
  return next;
}

WalkSample observe(const WalkState& state) {
  return state.observe();
}

namespace {

// Per-atom wedge cache for finite measures.
struct WedgeCache {
  std::vector<std::vector<Eigen::MatrixXd>> per_atom;

  WedgeCache(const MatrixMeasure& mu, bool full_spectrum) {
    if (!full_spectrum || mu.kind() != MatrixMeasure::Kind::Finite ||
        mu.dim() < 2) {
      return;
    }
    per_atom.resize(mu.atoms().size());
    for (std::size_t i = 0; i < mu.atoms().size(); ++i) {
      for (int p = 2; p <= mu.dim(); ++p) {
        per_atom[i].push_back(wedge_power(mu.atoms()[i].matrix.mat(), p));
      }
    }
  }
};

void check_checkpoints(std::span<const std::int64_t> checkpoints,
                       std::int64_t n) {
  std::int64_t prev = 0;
  for (const std::int64_t c : checkpoints) {
    if (c <= prev || c > n) {
      throw DomainError(
          "checkpoints must be strictly increasing within [1, n]");
    }
    prev = c;
  }
}

}  // namespace

std::vector<WalkSample> run_trial(const MatrixMeasure& mu, Side side,
                                  std::int64_t n,
                                  std::span<const std::int64_t> checkpoints,
                                  RngStream rng, bool full_spectrum) {
  check_checkpoints(checkpoints, n);
  const WedgeCache cache(mu, full_spectrum);

  WalkState state(mu.dim(), side, full_spectrum);
  std::vector<WalkSample> out;
  out.reserve(checkpoints.size());
  std::size_t next_cp = 0;
  for (std::int64_t i = 1; i <= n && next_cp < checkpoints.size(); ++i) {
    if (!cache.per_atom.empty()) {
      const std::size_t idx = mu.sample_index(rng);
      state.advance(mu.atoms()[idx].matrix.mat(), cache.per_atom[idx]);
    } else {
      state.advance(mu.sample(rng));
    }
    if (i == checkpoints[next_cp]) {
      out.push_back(state.observe());
      ++next_cp;
    }
  }
  return out;
}

void parallel_for_trials(std::int64_t trials, int threads,
                         const std::function<void(std::int64_t)>& fn) {
  if (trials <= 0) return;
  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(
      std::min<std::int64_t>(workers, trials));

  if (workers == 1) {
    for (std::int64_t t = 0; t < trials; ++t) fn(t);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::mutex err_mutex;
  std::vector<std::pair<std::int64_t, std::string>> errors;

  auto body = [&] {
    while (true) {
      const std::int64_t t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= trials) break;
      try {
        fn(t);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        errors.emplace_back(t, e.what());
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();

  if (!errors.empty()) {
    auto first = *std::min_element(errors.begin(), errors.end());
    throw TrialFailure(static_cast<std::uint64_t>(first.first), first.second);
  }
}

SampleSet run_monte_carlo(const MatrixMeasure& mu, Side side, std::int64_t n,
                          std::span<const std::int64_t> checkpoints,
                          std::int64_t trials, std::uint64_t master_seed,
                          int threads, bool full_spectrum) {
  if (trials < 1) throw DomainError("trials must be >= 1");
  check_checkpoints(checkpoints, n);

  SampleSet set;
  set.dim = mu.dim();
  set.side = side;
  set.n = n;
  set.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  set.trials = trials;
  set.master_seed = master_seed;
  set.measure_desc = mu.description();
  set.flags = mu.flags();
  set.measure_is_sl = mu.is_sl();
  set.samples.resize(trials);

  parallel_for_trials(trials, threads, [&](std::int64_t t) {
    set.samples[t] =
        run_trial(mu, side, n, checkpoints,
                  RngStream(master_seed, kStreamDomainTrial + t),
                  full_spectrum);
  });
  return set;
}

ProjPoint stationary_sample(const MatrixMeasure& mu, const ProjPoint& x0,
                            std::int64_t n, RngStream rng) {
  if (x0.dim() != mu.dim()) {
    throw DomainError("stationary_sample: point dimension mismatch");
  }
  WalkState state(mu.dim(), Side::Right, /*full_spectrum=*/false);
  for (std::int64_t i = 0; i < n; ++i) {
    state.advance(mu.sample(rng));
  }
  return ProjPoint(state.rep() * x0.vec());
}

}  // namespace rmp
