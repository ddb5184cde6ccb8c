#pragma once

/*
 * Artifact serialization. CSV floats use the shortest round-trip
 * representation (std::to_chars), locale-independent with '.' as the
 * decimal separator, so artifacts diff bit-exactly in CI. JSON artifacts
 * embed the config echo and seed lineage. Writes go to a temp file in
 * the target directory followed by an atomic rename; a failed run leaves
 * no partial artifact behind.
 */

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rmp/matrix.hpp"
#include "rmp/measure.hpp"
#include "rmp/stats.hpp"
#include "rmp/walk.hpp"

namespace rmp {

using json = nlohmann::json;

/// Shortest representation that round-trips the exact double.
std::string format_double(double x);

/// FNV-1a 64-bit hash; used for config hashes embedded in artifacts.
std::uint64_t fnv1a64(std::string_view s);

// Matrices serialize as JSON arrays of rows; dimension is inferred.
json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);

json flags_to_json(const MeasureFlags& flags);
MeasureFlags flags_from_json(const json& j);

/// Measure from the config schema: {"dim", "atoms": [{"matrix", "weight"}],
/// "flags"} or {"ensemble": ..., ...}. Weights may be numbers or rational
/// strings like "1/3".
MatrixMeasure measure_from_json(const json& j);
json measure_to_json(const MatrixMeasure& mu);

json sample_set_to_json(const SampleSet& set);
std::string sample_set_to_csv(const SampleSet& set);

json lyapunov_to_json(const LyapunovEstimate& est);
json clt_report_to_json(const CltReport& rep);
json tail_curve_to_json(const TailCurve& curve);
std::string tail_curve_to_csv(const TailCurve& curve);
json regularity_to_json(const RegularityProfile& prof);
std::string regularity_to_csv(const RegularityProfile& prof);
json covariance_to_json(const CovarianceReport& rep);
json counterexample_to_json(const CounterexampleReport& rep);
json decay_curves_to_json(const std::vector<DecayCurve>& curves);
std::string decay_curves_to_csv(const std::vector<DecayCurve>& curves);

/// Write-to-temp + rename. Creates parent directories.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& contents);

}  // namespace rmp
