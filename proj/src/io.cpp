#include "rmp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace rmp {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError("matrix must be a non-empty array of rows");
  }
  const std::size_t d = j.size();
  Eigen::MatrixXd m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!j[i].is_array() || j[i].size() != d) {
      throw ConfigError("matrix rows must all have the matrix dimension");
    }
    for (std::size_t k = 0; k < d; ++k) {
      if (!j[i][k].is_number()) {
        throw ConfigError("matrix entries must be numbers");
      }
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

json flags_to_json(const MeasureFlags& flags) {
  json j;
  j["strongly_irreducible"] = flags.strongly_irreducible;
  j["proximal"] = flags.proximal;
  j["zariski_dense"] = flags.zariski_dense;
  if (flags.proximality_index) {
    j["proximality_index"] = *flags.proximality_index;
  }
  return j;
}

MeasureFlags flags_from_json(const json& j) {
  MeasureFlags f;
  f.strongly_irreducible = j.value("strongly_irreducible", false);
  f.proximal = j.value("proximal", false);
  f.zariski_dense = j.value("zariski_dense", false);
  if (j.contains("proximality_index")) {
    f.proximality_index = j["proximality_index"].get<int>();
  }
  return f;
}

namespace {

Weight weight_from_json(const json& j) {
  if (j.is_number()) {
    return Weight::of(j.get<double>());
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
      throw ConfigError("string weights must be rationals like \"1/3\"");
    }
    std::int64_t num = 0, den = 0;
    const auto r1 =
        std::from_chars(s.data(), s.data() + slash, num);
    const auto r2 =
        std::from_chars(s.data() + slash + 1, s.data() + s.size(), den);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} ||
        r1.ptr != s.data() + slash || r2.ptr != s.data() + s.size()) {
      throw ConfigError("malformed rational weight: " + s);
    }
    return Weight::rational(num, den);
  }
  throw ConfigError("weight must be a number or a rational string");
}

}  // namespace

MatrixMeasure measure_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("measure spec must be an object");
  try {
    if (j.contains("ensemble")) {
      const std::string name = j["ensemble"].get<std::string>();
      if (name == "notconv") {
        return notconv_measure(j.value("lambda", 2.0), j.value("theta", 0.5));
      }
      if (name == "positive_pair") return positive_pair_measure();
      if (name == "shear_cycle") {
        return shear_cycle_measure(j.value("dim", 2));
      }
      if (name == "gaussian_sl") {
        return MatrixMeasure::gaussian_sl(j.value("dim", 2));
      }
      throw ConfigError("unknown ensemble: " + name);
    }
    if (!j.contains("atoms")) {
      throw ConfigError("measure spec needs \"atoms\" or \"ensemble\"");
    }
    std::vector<Atom> atoms;
    for (const auto& aj : j["atoms"]) {
      atoms.push_back(Atom{SquareMatrix(matrix_from_json(aj.at("matrix"))),
                           weight_from_json(aj.at("weight"))});
    }
    MeasureFlags flags;
    if (j.contains("flags")) flags = flags_from_json(j["flags"]);
    auto mu = MatrixMeasure::finite(std::move(atoms), flags);
    if (j.contains("dim") && j["dim"].get<int>() != mu.dim()) {
      throw ConfigError("declared dim does not match the atom dimension");
    }
    return mu;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("measure spec: ") + e.what());
  } catch (const Error&) {
    throw;
  }
}

json measure_to_json(const MatrixMeasure& mu) {
  json j;
  j["dim"] = mu.dim();
  if (mu.kind() == MatrixMeasure::Kind::Sampler) {
    j["ensemble"] = mu.name();
    return j;
  }
  if (!mu.name().empty()) j["name"] = mu.name();
  json atoms = json::array();
  for (const auto& a : mu.atoms()) {
    json aj;
    aj["matrix"] = matrix_to_json(a.matrix.mat());
    if (a.weight.exact) {
      aj["weight"] = std::to_string(a.weight.exact->first) + "/" +
                     std::to_string(a.weight.exact->second);
    } else {
      aj["weight"] = a.weight.value;
    }
    atoms.push_back(std::move(aj));
  }
  j["atoms"] = std::move(atoms);
  j["flags"] = flags_to_json(mu.flags());
  return j;
}

namespace {

json vector_to_json(const std::vector<double>& v) {
  json out = json::array();
  for (const double x : v) {
    if (std::isnan(x)) {
      out.push_back(nullptr);
    } else {
      out.push_back(x);
    }
  }
  return out;
}

json eigen_vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json sample_to_json(const WalkSample& ws) {
  json j;
  j["n"] = ws.n;
  j["log_norm"] = ws.log_norm;
  j["log_specrad"] = ws.log_specrad;
  j["delta_n"] = ws.delta_n;
  j["cartan"] = vector_to_json(ws.cartan.values);
  j["jordan"] = vector_to_json(ws.jordan.values);
  j["v_plus"] = eigen_vector_to_json(ws.v_plus.vec());
  j["h_minus"] = eigen_vector_to_json(ws.h_minus.normal());
  j["degenerate"] = ws.degenerate;
  return j;
}

json config_echo(const SampleSet& set) {
  json j;
  j["dim"] = set.dim;
  j["side"] = set.side == Side::Left ? "left" : "right";
  j["n"] = set.n;
  j["checkpoints"] = set.checkpoints;
  j["trials"] = set.trials;
  j["measure"] = set.measure_desc;
  j["flags"] = flags_to_json(set.flags);
  j["is_sl"] = set.measure_is_sl;
  return j;
}

json seed_lineage(const SampleSet& set) {
  json j;
  j["master_seed"] = set.master_seed;
  j["stream_rule"] = "trial t draws from stream (master_seed, t)";
  return j;
}

}  // namespace

json sample_set_to_json(const SampleSet& set) {
  json j;
  j["config"] = config_echo(set);
  j["seed_lineage"] = seed_lineage(set);
  j["config_hash"] = fnv1a64(j["config"].dump());
  json trials = json::array();
  for (const auto& trial : set.samples) {
    json row = json::array();
    for (const auto& ws : trial) row.push_back(sample_to_json(ws));
    trials.push_back(std::move(row));
  }
  j["samples"] = std::move(trials);
  return j;
}

std::string sample_set_to_csv(const SampleSet& set) {
  std::string out = "trial,n,log_norm,log_specrad,delta_n";
  for (int i = 1; i <= set.dim; ++i) out += ",cartan_" + std::to_string(i);
  for (int i = 1; i <= set.dim; ++i) out += ",jordan_" + std::to_string(i);
  out += ",degenerate\n";
  for (std::size_t t = 0; t < set.samples.size(); ++t) {
    for (const auto& ws : set.samples[t]) {
      out += std::to_string(t);
      out += ',' + std::to_string(ws.n);
      out += ',' + format_double(ws.log_norm);
      out += ',' + format_double(ws.log_specrad);
      out += ',' + format_double(ws.delta_n);
      for (const double c : ws.cartan.values) out += ',' + format_double(c);
      for (const double c : ws.jordan.values) out += ',' + format_double(c);
      out += ',';
      out += ws.degenerate ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

json lyapunov_to_json(const LyapunovEstimate& est) {
  json j;
  j["lambdas"] = vector_to_json(est.lambdas);
  j["std_errors"] = vector_to_json(est.std_errors);
  j["trial_sd"] = vector_to_json(est.trial_sd);
  j["n_used"] = est.n_used;
  j["trials_used"] = est.trials_used;
  return j;
}

json clt_report_to_json(const CltReport& rep) {
  json j;
  j["observable"] =
      rep.observable == Observable::LogSpecrad ? "log_specrad" : "log_norm";
  j["lambda_hat"] = rep.lambda_hat;
  j["sigma_hat"] = rep.sigma_hat;
  j["sigma_hat_norm"] = rep.sigma_hat_norm;
  j["sigma_hat_specrad"] = rep.sigma_hat_specrad;
  j["ks_vs_gaussian"] = rep.ks_vs_gaussian;
  j["ks_norm_vs_specrad"] = rep.ks_norm_vs_specrad;
  j["n_used"] = rep.n_used;
  j["trials_used"] = rep.trials_used;
  j["normalized_samples"] = vector_to_json(rep.normalized_samples);
  return j;
}

json tail_curve_to_json(const TailCurve& curve) {
  json j;
  j["epsilons"] = vector_to_json(curve.epsilons);
  j["probs"] = vector_to_json(curve.probs);
  j["wilson_halfwidth"] = vector_to_json(curve.wilson);
  j["n"] = curve.n;
  j["trials"] = curve.trials;
  return j;
}

std::string tail_curve_to_csv(const TailCurve& curve) {
  std::string out = "eps,prob,wilson_halfwidth,n,trials\n";
  for (std::size_t i = 0; i < curve.epsilons.size(); ++i) {
    out += format_double(curve.epsilons[i]);
    out += ',' + format_double(curve.probs[i]);
    out += ',' + format_double(curve.wilson[i]);
    out += ',' + std::to_string(curve.n);
    out += ',' + std::to_string(curve.trials);
    out += '\n';
  }
  return out;
}

json regularity_to_json(const RegularityProfile& prof) {
  json j;
  j["t_grid"] = vector_to_json(prof.t_grid);
  j["sup_probs"] = vector_to_json(prof.sup_probs);
  j["hyperplanes_sampled"] = prof.hyperplanes_sampled;
  j["points_used"] = prof.points_used;
  return j;
}

std::string regularity_to_csv(const RegularityProfile& prof) {
  std::string out = "t,sup_prob\n";
  for (std::size_t i = 0; i < prof.t_grid.size(); ++i) {
    out += format_double(prof.t_grid[i]);
    out += ',' + format_double(prof.sup_probs[i]);
    out += '\n';
  }
  return out;
}

json covariance_to_json(const CovarianceReport& rep) {
  json j;
  j["mean_vector"] = vector_to_json(rep.mean_vector);
  j["k_hat"] = matrix_to_json(rep.k_hat);
  j["null_direction_variance"] = rep.null_direction_variance;
  j["trials_used"] = rep.trials_used;
  j["n_used"] = rep.n_used;
  return j;
}

json counterexample_to_json(const CounterexampleReport& rep) {
  json j;
  j["lambda"] = rep.lambda;
  j["theta"] = rep.theta;
  j["n"] = rep.n;
  j["trials"] = rep.trials;
  j["max_abs_odd_log_specrad"] = rep.max_abs_odd_log_specrad;
  j["s_mismatches"] = rep.s_mismatches;
  j["s_comparisons"] = rep.s_comparisons;
  j["ks_abs_gaussian"] = rep.ks_abs_gaussian;
  j["ks_k"] = rep.ks_k;
  j["y_variance_empirical"] = rep.y_variance_empirical;
  j["y_variance_expected"] = rep.y_variance_expected;
  return j;
}

json decay_curves_to_json(const std::vector<DecayCurve>& curves) {
  json arr = json::array();
  for (const auto& c : curves) {
    json j;
    j["label"] = c.label;
    j["n_values"] = c.n_values;
    j["thresholds"] = vector_to_json(c.thresholds);
    j["probs"] = vector_to_json(c.probs);
    j["wilson_halfwidth"] = vector_to_json(c.wilson);
    if (std::isnan(c.fitted_rate)) {
      j["fitted_rate"] = nullptr;
    } else {
      j["fitted_rate"] = c.fitted_rate;
    }
    j["rate_c"] = c.rate_c;
    j["trials"] = c.trials;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string decay_curves_to_csv(const std::vector<DecayCurve>& curves) {
  std::string out = "label,n,threshold,prob,wilson_halfwidth\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.n_values.size(); ++i) {
      out += c.label;
      out += ',' + std::to_string(c.n_values[i]);
      out += ',' + format_double(c.thresholds[i]);
      out += ',' + format_double(c.probs[i]);
      out += ',' + format_double(c.wilson[i]);
      out += '\n';
    }
  }
  return out;
}

void atomic_write_file(const std::filesystem::path& path,
                       const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ConfigError("cannot open for writing: " + tmp.string());
    }
    out.write(contents.data(),
              static_cast<std::streamsize>(contents.size()));
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ConfigError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("rename failed for: " + path.string());
  }
}

}  // namespace rmp
