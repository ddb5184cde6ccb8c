#include "rmp/proximality.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "rmp/spectral.hpp"
#include "rmp/walk.hpp"

namespace rmp {

std::optional<ProximalityCertificate> proximality_certificate(
    const KakDecomposition& kd) {
  if (kd.a.size() < 2) {
    // d == 1: every element is trivially proximal, rho == ||g||.
    return ProximalityCertificate{1.0, 0.0, 0.5};
  }
  const double gap = kd.gap_ratio();
  const double delta_g =
      delta_point_hyperplane(attracting_point(kd), repelling_hyperplane(kd));
  if (!(delta_g > 2.0 * std::sqrt(gap))) {
    return std::nullopt;
  }
  return ProximalityCertificate{delta_g, gap, delta_g / 2.0};
}

std::optional<ProximalityCertificate> proximality_certificate(
    const SquareMatrix& g) {
  return proximality_certificate(kak(g));
}

ContractionData contraction_data(const SquareMatrix& g, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw DomainError("contraction_data: eps must be in (0, 1]");
  }
  const double gap = kak(g).gap_ratio();
  return ContractionData{gap / (eps * eps), gap / eps};
}

CertifyBatchResult certify_batch(std::int64_t count, int dim_min,
                                 int dim_max, std::uint64_t seed,
                                 int threads) {
  if (count < 1) throw DomainError("certify_batch: count must be >= 1");
  if (dim_min < 2) throw DomainError("certify_batch: dim_min must be >= 2");

  // Chunked so each worker owns a contiguous block of stream ids; the
  // merge below is order-independent (mins and integer sums).
  const std::int64_t chunk = 1024;
  const std::int64_t chunks = (count + chunk - 1) / chunk;
  std::vector<CertifyBatchResult> partial(chunks);

  parallel_for_trials(chunks, threads, [&](std::int64_t c) {
    CertifyBatchResult r;
    RngStream rng(seed, kStreamDomainTrial + c);
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(count, lo + chunk);
    for (std::int64_t i = lo; i < hi; ++i) {
      const SquareMatrix g = random_scale_mix_matrix(rng, dim_min, dim_max);
      ++r.total;
      const KakDecomposition kd = kak(g);
      const auto cert = proximality_certificate(kd);
      if (!cert) continue;
      ++r.certified;
      const Eigen::VectorXd moduli = eigen_moduli_raw(g.mat());
      const double ratio = moduli(0) / kd.a(0);
      const double margin = ratio - cert->lower_bound;
      r.worst_margin = std::min(r.worst_margin, margin);
      if (margin < -1e-10) ++r.bound_violations;
      const double rel_gap = 1.0 - moduli(1) / moduli(0);
      r.worst_rel_gap = std::min(r.worst_rel_gap, rel_gap);
      if (!(rel_gap > 1e-8)) ++r.gap_violations;
    }
    partial[c] = r;
  });

  CertifyBatchResult out;
  for (const auto& r : partial) {
    out.total += r.total;
    out.certified += r.certified;
    out.bound_violations += r.bound_violations;
    out.gap_violations += r.gap_violations;
    out.worst_margin = std::min(out.worst_margin, r.worst_margin);
    out.worst_rel_gap = std::min(out.worst_rel_gap, r.worst_rel_gap);
  }
  return out;
}

}  // namespace rmp
