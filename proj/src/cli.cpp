#include "rmp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rmp/io.hpp"
#include "rmp/proximality.hpp"
#include "rmp/stats.hpp"
#include "rmp/walk.hpp"

namespace rmp::cli {

using nlohmann::json;

namespace {

std::vector<std::int64_t> resolved_checkpoints(const ExperimentConfig& cfg) {
  if (!cfg.checkpoints.empty()) return cfg.checkpoints;
  return {cfg.n};
}

std::vector<double> resolved_eps_grid(const ExperimentConfig& cfg) {
  if (!cfg.eps_grid.empty()) return cfg.eps_grid;
  return {1e-4, 1e-3, 1e-2, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
}

std::vector<double> resolved_t_grid(const ExperimentConfig& cfg) {
  if (!cfg.t_grid.empty()) return cfg.t_grid;
  return {1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0};
}

Side side_of(const ExperimentConfig& cfg) {
  if (cfg.side == "left") return Side::Left;
  if (cfg.side == "right") return Side::Right;
  throw ConfigError("side must be \"left\" or \"right\"");
}

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    default: return "both";
  }
}

OutputFormat format_of(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "both") return OutputFormat::Both;
  throw ConfigError("format must be csv, json or both");
}

template <typename T>
void maybe(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

void apply_config_json(const json& j, ExperimentConfig& cfg) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  try {
    if (j.contains("measure")) cfg.measure_spec = j["measure"];
    maybe(j, "n", cfg.n);
    maybe(j, "checkpoints", cfg.checkpoints);
    maybe(j, "trials", cfg.trials);
    maybe(j, "seed", cfg.seed);
    maybe(j, "threads", cfg.threads);
    maybe(j, "eps_grid", cfg.eps_grid);
    maybe(j, "t_grid", cfg.t_grid);
    maybe(j, "side", cfg.side);
    if (j.contains("out")) {
      cfg.out_dir = j["out"].get<std::string>();
    }
    if (j.contains("format")) {
      cfg.format = format_of(j["format"].get<std::string>());
    }
    if (j.contains("clt")) {
      const json& c = j["clt"];
      maybe(c, "observable", cfg.observable);
      maybe(c, "centering", cfg.centering);
      maybe(c, "pilot_n", cfg.pilot_n);
      maybe(c, "pilot_trials", cfg.pilot_trials);
    }
    if (j.contains("regularity")) {
      const json& c = j["regularity"];
      maybe(c, "points", cfg.reg_points);
      maybe(c, "hyperplane_seeds", cfg.hyperplane_seeds);
      maybe(c, "walk_n", cfg.reg_walk_n);
    }
    if (j.contains("decay")) {
      const json& c = j["decay"];
      maybe(c, "item", cfg.decay_item);
      maybe(c, "n_grid", cfg.n_grid);
      if (c.contains("rate") && !c["rate"].is_null()) {
        cfg.decay_rate = c["rate"].get<double>();
      }
      maybe(c, "far_n", cfg.far_n);
    }
    if (j.contains("counterexample")) {
      const json& c = j["counterexample"];
      maybe(c, "lambda", cfg.ce_lambda);
      maybe(c, "theta", cfg.ce_theta);
    }
    if (j.contains("certify")) {
      const json& c = j["certify"];
      maybe(c, "matrix", cfg.matrix_file);
      maybe(c, "random", cfg.certify_random);
      maybe(c, "dim_min", cfg.certify_dim_min);
      maybe(c, "dim_max", cfg.certify_dim_max);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

MatrixMeasure build_measure(const ExperimentConfig& cfg) {
  if (cfg.measure_spec.is_null() || cfg.measure_spec.empty()) {
    return positive_pair_measure();
  }
  return measure_from_json(cfg.measure_spec);
}

json config_echo_json(const ExperimentConfig& cfg) {
  json j;
  j["measure"] = measure_to_json(build_measure(cfg));
  j["n"] = cfg.n;
  j["checkpoints"] = resolved_checkpoints(cfg);
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["eps_grid"] = resolved_eps_grid(cfg);
  j["t_grid"] = resolved_t_grid(cfg);
  j["out"] = cfg.out_dir.string();
  j["format"] = format_name(cfg.format);
  j["side"] = cfg.side;
  j["clt"] = {{"observable", cfg.observable},
              {"centering", cfg.centering},
              {"pilot_n", cfg.pilot_n},
              {"pilot_trials", cfg.pilot_trials}};
  j["regularity"] = {{"points", cfg.reg_points},
                     {"hyperplane_seeds", cfg.hyperplane_seeds},
                     {"walk_n", cfg.reg_walk_n}};
  j["decay"] = {{"item", cfg.decay_item},
                {"n_grid", cfg.n_grid},
                {"rate", cfg.decay_rate ? json(*cfg.decay_rate) : json()},
                {"far_n", cfg.far_n}};
  j["counterexample"] = {{"lambda", cfg.ce_lambda},
                         {"theta", cfg.ce_theta}};
  j["certify"] = {{"matrix", cfg.matrix_file},
                  {"random", cfg.certify_random},
                  {"dim_min", cfg.certify_dim_min},
                  {"dim_max", cfg.certify_dim_max}};
  return j;
}

namespace {

json artifact_root(const std::string& command, const ExperimentConfig& cfg) {
  json j;
  j["command"] = command;
  j["config"] = config_echo_json(cfg);
  j["config_hash"] = fnv1a64(j["config"].dump());
  j["seed_lineage"] = {
      {"master_seed", cfg.seed},
      {"stream_rule", "trial t draws from stream (master_seed, t)"}};
  return j;
}

void write_artifacts(const ExperimentConfig& cfg, const std::string& name,
                     const json& doc, const std::string* csv) {
  if (cfg.format != OutputFormat::Csv) {
    atomic_write_file(cfg.out_dir / (name + ".json"), doc.dump(2) + "\n");
  }
  if (csv != nullptr && cfg.format != OutputFormat::Json) {
    atomic_write_file(cfg.out_dir / (name + ".csv"), *csv);
  }
}

void check_out_dir(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) {
    throw ConfigError("output directory is not writable: " +
                      cfg.out_dir.string());
  }
}

// ---------------------------------------------------------------------------
// Commands

int cmd_certify(const ExperimentConfig& cfg, std::ostream& os) {
  json doc = artifact_root("certify", cfg);

  if (cfg.certify_random > 0) {
    const CertifyBatchResult r =
        certify_batch(cfg.certify_random, cfg.certify_dim_min,
                      cfg.certify_dim_max, cfg.seed, cfg.threads);
    doc["result"] = {{"total", r.total},
                     {"certified", r.certified},
                     {"bound_violations", r.bound_violations},
                     {"gap_violations", r.gap_violations},
                     {"worst_margin", r.worst_margin},
                     {"worst_rel_gap", r.worst_rel_gap}};
    write_artifacts(cfg, "certify", doc, nullptr);
    os << "certify batch: " << r.total << " matrices, " << r.certified
       << " certified, " << r.bound_violations << " bound violations, "
       << r.gap_violations << " gap violations\n"
       << "worst margin " << r.worst_margin << ", worst relative gap "
       << r.worst_rel_gap << "\n";
    return (r.bound_violations + r.gap_violations) > 0 ? 3 : 0;
  }

  if (cfg.matrix_file.empty()) {
    throw ConfigError("certify needs --matrix FILE or --random N");
  }
  std::ifstream in(cfg.matrix_file);
  if (!in) throw ConfigError("cannot read " + cfg.matrix_file);
  json mj;
  try {
    in >> mj;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("matrix file: ") + e.what());
  }
  SquareMatrix g = [&] {
    try {
      return SquareMatrix(matrix_from_json(mj));
    } catch (const SingularInput& e) {
      throw ConfigError(std::string("matrix file: ") + e.what());
    }
  }();

  const KakDecomposition kd = kak(g);
  const double delta_g = delta_point_hyperplane(attracting_point(kd),
                                                repelling_hyperplane(kd));
  const auto cert = proximality_certificate(kd);
  const double rho = spectral_radius(g);
  const double ratio = rho / kd.a(0);
  const bool verified = !cert || ratio >= cert->lower_bound - 1e-10;

  doc["result"] = {{"dim", g.dim()},
                   {"delta_g", delta_g},
                   {"gap_ratio", kd.gap_ratio()},
                   {"certificate", cert.has_value()},
                   {"lower_bound", cert ? json(cert->lower_bound) : json()},
                   {"rho_over_norm", ratio},
                   {"bound_verified", verified}};
  write_artifacts(cfg, "certify", doc, nullptr);

  os << "delta(v+, H-)      " << delta_g << "\n"
     << "a2/a1              " << kd.gap_ratio() << "\n"
     << "certificate        " << (cert ? "present" : "absent (singular gap too small)")
     << "\n"
     << "rho/||g||          " << ratio << "\n";
  if (cert) {
    os << "certified bound    " << cert->lower_bound << " ("
       << (verified ? "verified" : "VIOLATED") << ")\n";
  }
  return verified ? 0 : 3;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& os) {
  const MatrixMeasure mu = build_measure(cfg);
  const auto cps = resolved_checkpoints(cfg);
  const SampleSet set = run_monte_carlo(mu, side_of(cfg), cfg.n, cps,
                                        cfg.trials, cfg.seed, cfg.threads);
  json doc = artifact_root("simulate", cfg);
  doc["result"] = sample_set_to_json(set);
  const std::string csv = sample_set_to_csv(set);
  write_artifacts(cfg, "simulate", doc, &csv);

  const auto& last = set.samples.front().back();
  os << "simulate: " << set.trials << " trials to n=" << set.n << " ("
     << set.measure_desc << ")\n"
     << "trial 0 final: log_norm=" << last.log_norm
     << " log_specrad=" << last.log_specrad << " delta_n=" << last.delta_n
     << "\n";
  return 0;
}

int cmd_clt(const ExperimentConfig& cfg, std::ostream& os) {
  const MatrixMeasure mu = build_measure(cfg);
  const std::array<std::int64_t, 1> cps{cfg.n};
  const SampleSet set = run_monte_carlo(mu, side_of(cfg), cfg.n, cps,
                                        cfg.trials, cfg.seed, cfg.threads);

  CltCentering centering;
  if (cfg.centering == "pilot") {
    const std::int64_t pn = cfg.pilot_n > 0 ? cfg.pilot_n : 2 * cfg.n;
    const std::array<std::int64_t, 1> pcps{pn};
    const SampleSet pilot =
        run_monte_carlo(mu, side_of(cfg), pn, pcps, cfg.pilot_trials,
                        cfg.seed ^ 0x9E3779B97F4A7C15ull, cfg.threads);
    double mean_norm = 0.0, mean_rho = 0.0;
    for (const auto& t : pilot.samples) {
      mean_norm += t.back().log_norm;
      mean_rho += t.back().log_specrad;
    }
    const double denom =
        static_cast<double>(pilot.trials) * static_cast<double>(pn);
    centering.log_norm = mean_norm / denom;
    centering.log_specrad = mean_rho / denom;
  } else if (cfg.centering != "in_sample") {
    throw ConfigError("clt centering must be \"pilot\" or \"in_sample\"");
  }

  const Observable obs = cfg.observable == "log_norm"
                             ? Observable::LogNorm
                             : Observable::LogSpecrad;
  const CltReport rep = clt_report(set, obs, centering);

  json doc = artifact_root("clt", cfg);
  doc["result"] = clt_report_to_json(rep);
  std::string csv = "normalized_" + cfg.observable + "\n";
  for (const double x : rep.normalized_samples) {
    csv += format_double(x);
    csv += '\n';
  }
  write_artifacts(cfg, "clt", doc, &csv);

  os << "clt (" << cfg.observable << ", n=" << rep.n_used
     << ", trials=" << rep.trials_used << ")\n"
     << "lambda_hat          " << rep.lambda_hat << "\n"
     << "sigma_hat           " << rep.sigma_hat << "\n"
     << "ks_vs_gaussian      " << rep.ks_vs_gaussian << "\n"
     << "ks_norm_vs_specrad  " << rep.ks_norm_vs_specrad << "\n";
  return 0;
}

int cmd_tail(const ExperimentConfig& cfg, std::ostream& os, bool ratio) {
  const MatrixMeasure mu = build_measure(cfg);
  const auto cps = resolved_checkpoints(cfg);
  const SampleSet set = run_monte_carlo(mu, side_of(cfg), cfg.n, cps,
                                        cfg.trials, cfg.seed, cfg.threads,
                                        /*full_spectrum=*/false);
  const auto grid = resolved_eps_grid(cfg);
  const char* name = ratio ? "ratio" : "delta";

  json doc = artifact_root(name, cfg);
  json curves = json::array();
  std::string csv = "eps,prob,wilson_halfwidth,n,trials\n";
  for (const std::int64_t cp : cps) {
    const TailCurve curve = ratio ? ratio_tail(set, grid, cp)
                                  : delta_tail(set, grid, cp);
    curves.push_back(tail_curve_to_json(curve));
    const std::string rows = tail_curve_to_csv(curve);
    csv += rows.substr(rows.find('\n') + 1);  // drop the per-curve header
  }
  doc["result"] = std::move(curves);
  write_artifacts(cfg, name, doc, &csv);

  os << name << " tail at n=" << cps.back() << " (" << set.measure_desc
     << ", trials=" << set.trials << ")\n";
  const TailCurve final_curve = ratio ? ratio_tail(set, grid, -1)
                                      : delta_tail(set, grid, -1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << "  eps=" << format_double(grid[i])
       << "  p=" << format_double(final_curve.probs[i]) << "\n";
  }
  return 0;
}

int cmd_lyapunov(const ExperimentConfig& cfg, std::ostream& os) {
  const MatrixMeasure mu = build_measure(cfg);
  const auto cps = resolved_checkpoints(cfg);
  const SampleSet set = run_monte_carlo(mu, side_of(cfg), cfg.n, cps,
                                        cfg.trials, cfg.seed, cfg.threads);
  const LyapunovEstimate est = lyapunov_estimate(set);

  json doc = artifact_root("lyapunov", cfg);
  doc["result"] = lyapunov_to_json(est);
  std::string csv = "i,lambda,std_error,trial_sd\n";
  for (std::size_t i = 0; i < est.lambdas.size(); ++i) {
    csv += std::to_string(i + 1);
    csv += ',' + format_double(est.lambdas[i]);
    csv += ',' + format_double(est.std_errors[i]);
    csv += ',' + format_double(est.trial_sd[i]);
    csv += '\n';
  }
  write_artifacts(cfg, "lyapunov", doc, &csv);

  os << "lyapunov spectrum (n=" << est.n_used
     << ", trials=" << est.trials_used << ")\n";
  for (std::size_t i = 0; i < est.lambdas.size(); ++i) {
    os << "  lambda_" << i + 1 << " = " << est.lambdas[i] << " +- "
       << est.std_errors[i] << "\n";
  }
  return 0;
}

int cmd_eigen_clt(const ExperimentConfig& cfg, std::ostream& os) {
  const MatrixMeasure mu = build_measure(cfg);
  const std::array<std::int64_t, 1> cps{cfg.n};
  const SampleSet set = run_monte_carlo(mu, side_of(cfg), cfg.n, cps,
                                        cfg.trials, cfg.seed, cfg.threads);
  const CovarianceReport rep = eigen_clt_covariance(set);

  json doc = artifact_root("eigen_clt", cfg);
  doc["result"] = covariance_to_json(rep);
  std::string csv = "i,j,k_hat\n";
  for (Eigen::Index i = 0; i < rep.k_hat.rows(); ++i) {
    for (Eigen::Index j = 0; j < rep.k_hat.cols(); ++j) {
      csv += std::to_string(i + 1) + ',' + std::to_string(j + 1) + ',' +
             format_double(rep.k_hat(i, j)) + '\n';
    }
  }
  write_artifacts(cfg, "eigen_clt", doc, &csv);

  os << "eigenvalue-vector clt (n=" << rep.n_used
     << ", trials=" << rep.trials_used << ")\n"
     << "null_direction_variance " << rep.null_direction_variance << "\n";

  // Exact class: the log-moduli of a det-+-1 product sum to zero.
  if (set.measure_is_sl && rep.null_direction_variance > 1e-12) {
    os << "HARD INVARIANT FAILED: null direction variance exceeds 1e-12\n";
    return 4;
  }
  return 0;
}

int cmd_regularity(const ExperimentConfig& cfg, std::ostream& os) {
  const MatrixMeasure mu = build_measure(cfg);
  const int d = mu.dim();
  const ProjPoint x0(Eigen::VectorXd::Ones(d));
  std::vector<ProjPoint> points(cfg.reg_points, x0);
  parallel_for_trials(cfg.reg_points, cfg.threads, [&](std::int64_t t) {
    points[t] = stationary_sample(
        mu, x0, cfg.reg_walk_n, RngStream(cfg.seed, kStreamDomainTrial + t));
  });
  const RegularityProfile prof = regularity_profile(
      points, resolved_t_grid(cfg), cfg.hyperplane_seeds, cfg.seed);

  json doc = artifact_root("regularity", cfg);
  doc["result"] = regularity_to_json(prof);
  const std::string csv = regularity_to_csv(prof);
  write_artifacts(cfg, "regularity", doc, &csv);

  os << "regularity profile (" << prof.points_used << " points, "
     << prof.hyperplanes_sampled << " hyperplanes)\n";
  for (std::size_t i = 0; i < prof.t_grid.size(); ++i) {
    os << "  t=" << format_double(prof.t_grid[i])
       << "  sup_prob=" << format_double(prof.sup_probs[i]) << "\n";
  }
  return 0;
}

int cmd_decay(const ExperimentConfig& cfg, std::ostream& os) {
  const MatrixMeasure mu = build_measure(cfg);
  std::vector<std::int64_t> grid = cfg.n_grid;
  if (grid.empty()) grid = {25, 50, 100, 200};
  DecayOptions opts;
  opts.rate_c = cfg.decay_rate;
  opts.far_n = cfg.far_n;
  opts.threads = cfg.threads;
  const auto curves =
      decay_suite(mu, cfg.decay_item, grid, cfg.trials, cfg.seed, opts);

  json doc = artifact_root("decay", cfg);
  doc["result"] = decay_curves_to_json(curves);
  const std::string csv = decay_curves_to_csv(curves);
  write_artifacts(cfg, "decay", doc, &csv);

  os << "decay item " << cfg.decay_item << " (" << mu.description()
     << ", trials=" << cfg.trials << ", c=" << curves.front().rate_c
     << ")\n";
  const auto& sup = curves.front();
  for (std::size_t i = 0; i < sup.n_values.size(); ++i) {
    os << "  n=" << sup.n_values[i] << "  p=" << format_double(sup.probs[i])
       << "\n";
  }
  return 0;
}

int cmd_counterexample(const ExperimentConfig& cfg, std::ostream& os) {
  const CounterexampleReport rep = counterexample_report(
      cfg.ce_lambda, cfg.ce_theta, cfg.n, cfg.trials, cfg.seed, cfg.threads);

  json doc = artifact_root("counterexample", cfg);
  doc["result"] = counterexample_to_json(rep);
  std::string csv =
      "max_abs_odd_log_specrad,s_mismatches,s_comparisons,ks_abs_gaussian,"
      "y_variance_empirical,y_variance_expected\n";
  csv += format_double(rep.max_abs_odd_log_specrad);
  csv += ',' + std::to_string(rep.s_mismatches);
  csv += ',' + std::to_string(rep.s_comparisons);
  csv += ',' + format_double(rep.ks_abs_gaussian);
  csv += ',' + format_double(rep.y_variance_empirical);
  csv += ',' + format_double(rep.y_variance_expected);
  csv += '\n';
  write_artifacts(cfg, "counterexample", doc, &csv);

  os << "counterexample (lambda=" << rep.lambda << ", theta=" << rep.theta
     << ", n=" << rep.n << ", trials=" << rep.trials << ")\n"
     << "max |ln rho| at odd n   " << rep.max_abs_odd_log_specrad << "\n"
     << "S mismatches            " << rep.s_mismatches << " / "
     << rep.s_comparisons << "\n"
     << "KS vs |N(0, 2th(1-th))| " << rep.ks_abs_gaussian << " (k="
     << rep.ks_k << ")\n"
     << "Var(Y) empirical        " << rep.y_variance_empirical
     << " (expected " << rep.y_variance_expected << ")\n";

  // Exact class: odd spectral radii are 1, recovered integers match.
  if (rep.max_abs_odd_log_specrad > 1e-9 || rep.s_mismatches > 0) {
    os << "HARD INVARIANT FAILED: exact counterexample structure broken\n";
    return 4;
  }
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{"random matrix product laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "master seed (U64)");
  app.add_option("--threads", threads, "worker threads (0 = auto)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "artifact format: csv|json|both");

  std::optional<std::int64_t> n, trials, pilot_n, pilot_trials, points,
      hyperplanes, walk_n, far_n, certify_random;
  std::optional<std::vector<std::int64_t>> checkpoints, n_grid;
  std::optional<std::vector<double>> eps, t_grid;
  std::optional<std::string> side, observable, centering, matrix_file;
  std::optional<double> ce_lambda, ce_theta, rate;
  std::optional<int> item, dim_min, dim_max;

  auto add_run_opts = [&](CLI::App* sub) {
    sub->add_option("--n", n, "walk length");
    sub->add_option("--trials", trials, "Monte Carlo trials");
  };

  CLI::App* c_certify = app.add_subcommand(
      "certify", "proximality certificate for a matrix (or a random batch)");
  c_certify->add_option("--matrix", matrix_file, "JSON matrix file");
  c_certify->add_option("--random", certify_random, "batch size");
  c_certify->add_option("--dim-min", dim_min, "batch minimum dimension");
  c_certify->add_option("--dim-max", dim_max, "batch maximum dimension");

  CLI::App* c_simulate =
      app.add_subcommand("simulate", "raw walk samples at checkpoints");
  add_run_opts(c_simulate);
  c_simulate->add_option("--checkpoints", checkpoints, "observation times")
      ->delimiter(',');
  c_simulate->add_option("--side", side, "left|right");

  CLI::App* c_clt = app.add_subcommand("clt", "scalar CLT report");
  add_run_opts(c_clt);
  c_clt->add_option("--observable", observable, "log_specrad|log_norm");
  c_clt->add_option("--centering", centering, "pilot|in_sample");
  c_clt->add_option("--pilot-n", pilot_n, "pilot walk length (0 = 2n)");
  c_clt->add_option("--pilot-trials", pilot_trials, "pilot trials");

  CLI::App* c_ratio =
      app.add_subcommand("ratio", "tail of rho(L_n)/||L_n||");
  add_run_opts(c_ratio);
  c_ratio->add_option("--checkpoints", checkpoints, "observation times")
      ->delimiter(',');
  c_ratio->add_option("--eps", eps, "epsilon grid")->delimiter(',');

  CLI::App* c_delta =
      app.add_subcommand("delta", "tail of delta(v+, H-)");
  add_run_opts(c_delta);
  c_delta->add_option("--checkpoints", checkpoints, "observation times")
      ->delimiter(',');
  c_delta->add_option("--eps", eps, "epsilon grid")->delimiter(',');

  CLI::App* c_lyap =
      app.add_subcommand("lyapunov", "Lyapunov spectrum estimate");
  add_run_opts(c_lyap);

  CLI::App* c_eclt =
      app.add_subcommand("eigen-clt", "eigenvalue-vector CLT covariance");
  add_run_opts(c_eclt);

  CLI::App* c_reg =
      app.add_subcommand("regularity", "stationary-measure regularity profile");
  c_reg->add_option("--points", points, "stationary samples");
  c_reg->add_option("--hyperplanes", hyperplanes, "random hyperplane count");
  c_reg->add_option("--walk-n", walk_n, "right-walk length per point");
  c_reg->add_option("--t", t_grid, "t grid")->delimiter(',');

  CLI::App* c_decay = app.add_subcommand("decay", "projective decay curves");
  c_decay->add_option("--trials", trials, "Monte Carlo trials");
  c_decay->add_option("--item", item, "estimate 1..5");
  c_decay->add_option("--n-grid", n_grid, "checkpoint grid")->delimiter(',');
  c_decay->add_option("--rate", rate, "probe rate c (default pilot)");
  c_decay->add_option("--far-n", far_n, "far reference time (items 4-5)");

  CLI::App* c_ce = app.add_subcommand(
      "counterexample", "exact two-atom rotation/stretch ensemble report");
  add_run_opts(c_ce);
  c_ce->add_option("--lambda", ce_lambda, "stretch parameter (> 1)");
  c_ce->add_option("--theta", ce_theta, "weight of sigma*a in (0,1)");

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  std::string prog = "rmp";
  argv.push_back(prog.data());
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config: " + config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
      apply_config_json(j, cfg);
    }
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (out_dir) cfg.out_dir = *out_dir;
    if (format) cfg.format = format_of(*format);
    if (n) cfg.n = *n;
    if (trials) cfg.trials = *trials;
    if (checkpoints) cfg.checkpoints = *checkpoints;
    if (eps) cfg.eps_grid = *eps;
    if (t_grid) cfg.t_grid = *t_grid;
    if (side) cfg.side = *side;
    if (observable) cfg.observable = *observable;
    if (centering) cfg.centering = *centering;
    if (pilot_n) cfg.pilot_n = *pilot_n;
    if (pilot_trials) cfg.pilot_trials = *pilot_trials;
    if (points) cfg.reg_points = *points;
    if (hyperplanes) cfg.hyperplane_seeds = *hyperplanes;
    if (walk_n) cfg.reg_walk_n = *walk_n;
    if (item) cfg.decay_item = *item;
    if (n_grid) cfg.n_grid = *n_grid;
    if (rate) cfg.decay_rate = *rate;
    if (far_n) cfg.far_n = *far_n;
    if (ce_lambda) cfg.ce_lambda = *ce_lambda;
    if (ce_theta) cfg.ce_theta = *ce_theta;
    if (matrix_file) cfg.matrix_file = *matrix_file;
    if (certify_random) cfg.certify_random = *certify_random;
    if (dim_min) cfg.certify_dim_min = *dim_min;
    if (dim_max) cfg.certify_dim_max = *dim_max;

    check_out_dir(cfg);

    if (app.got_subcommand(c_certify)) return cmd_certify(cfg, out);
    if (app.got_subcommand(c_simulate)) return cmd_simulate(cfg, out);
    if (app.got_subcommand(c_clt)) return cmd_clt(cfg, out);
    if (app.got_subcommand(c_ratio)) return cmd_tail(cfg, out, true);
    if (app.got_subcommand(c_delta)) return cmd_tail(cfg, out, false);
    if (app.got_subcommand(c_lyap)) return cmd_lyapunov(cfg, out);
    if (app.got_subcommand(c_eclt)) return cmd_eigen_clt(cfg, out);
    if (app.got_subcommand(c_reg)) return cmd_regularity(cfg, out);
    if (app.got_subcommand(c_decay)) return cmd_decay(cfg, out);
    if (app.got_subcommand(c_ce)) return cmd_counterexample(cfg, out);
    err << "no subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const FlagViolation& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientSamples& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedForSampler& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateVariance& e) {
    err << "hard invariant failed: " << e.what() << "\n";
    return 4;
  } catch (const TrialFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 5;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 5;
  }
}

}  // namespace rmp::cli
