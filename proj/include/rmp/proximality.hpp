#pragma once

/*
 * Sufficient proximality certificate. Writing delta_g for the sine
 * distance between the attracting point and the repelling hyperplane of
 * g, if
 *
 *     delta_g > 2 sqrt(a2(g)/a1(g))
 *
 * then g is proximal (unique eigenvalue of maximal modulus) and
 *
 *     rho(g)/||g|| >= delta_g / 2.
 *
 * The converse is false: absence of the certificate says nothing about
 * g. contraction_data exposes the quantitative bounds on the projective
 * action of g away from the repelling hyperplane that make the argument
 * work; the tests exercise them directly.
 */

#include <cstdint>
#include <optional>

#include "rmp/kak.hpp"
#include "rmp/matrix.hpp"

namespace rmp {

struct ProximalityCertificate {
  double delta_g;      // sine distance delta(v+, H-), in (0,1]
  double gap_ratio;    // a2/a1
  double lower_bound;  // delta_g / 2, a certified bound on rho/||g||
};

struct ContractionData {
  double lipschitz_bound;  // (a2/a1) / eps^2, Lipschitz constant on U_eps
  double image_radius;     // (a2/a1) / eps, radius of g.U_eps around v+
};

/// Returns the certificate iff delta_g > 2 sqrt(a2/a1).
std::optional<ProximalityCertificate> proximality_certificate(
    const SquareMatrix& g);

std::optional<ProximalityCertificate> proximality_certificate(
    const KakDecomposition& kd);

/// Quantitative contraction bounds on U_eps = {x : delta(x, H-) > eps}.
/// Requires 0 < eps <= 1.
ContractionData contraction_data(const SquareMatrix& g, double eps);

/// Brute-force sweep over random invertible matrices: for every matrix
/// whose certificate exists, checks rho/||g|| >= delta_g/2 - 1e-10 and
/// that the top eigenvalue modulus is simple (relative gap > 1e-8).
struct CertifyBatchResult {
  std::int64_t total = 0;
  std::int64_t certified = 0;
  std::int64_t bound_violations = 0;
  std::int64_t gap_violations = 0;
  double worst_margin = 1.0;   // min over certified of rho/||g|| - delta/2
  double worst_rel_gap = 1.0;  // min over certified of 1 - rho2/rho1
};

CertifyBatchResult certify_batch(std::int64_t count, int dim_min,
                                 int dim_max, std::uint64_t seed,
                                 int threads = 0);

}  // namespace rmp
