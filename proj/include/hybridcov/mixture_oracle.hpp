#pragma once

// Direct numerical evaluation of piecewise scale mixtures
//
//   phi(h) = sum_i w_i int_{lo_i}^{hi_i} k_i(h; u) g_i(u) du,
//
// independent of the closed forms in kernels.hpp. The integrals are taken in
// the mixing variable u, never through the incomplete-gamma identities, so
// the oracle shares no code path with the closed forms beyond the
// quadrature driver and the mixing densities themselves.

#include <functional>
#include <limits>
#include <vector>

#include "hybridcov/kernels.hpp"
#include "hybridcov/quadrature.hpp"

namespace hybridcov {

using MixingDensity = std::function<double(double u)>;
using BaseKernel = std::function<double(double h, double u)>;

/// exp(-u h^2)
double gaussian_kernel(double h, double u);

struct MixtureSegment {
  double u_lo = 0.0;
  double u_hi = std::numeric_limits<double>::infinity();
  double weight = 1.0;
  MixingDensity mixing;
  BaseKernel base_kernel = gaussian_kernel;

  /// Throws std::invalid_argument unless u_lo < u_hi, weight > 0 and the
  /// callables are set.
  void validate() const;
};

/// Quadrature defaults for the oracle: tighter budget than the closed forms
/// since endpoint singularities of the Cauchy density are resolved by
/// bisection alone.
QuadratureSettings oracle_settings();

double eval_mixture(const std::vector<MixtureSegment>& segments, double h,
                    const QuadratureSettings& settings = oracle_settings(),
                    QuadratureScheme scheme = QuadratureScheme::gauss_kronrod);

/// Segment lists matching the closed-form families.
std::vector<MixtureSegment> matern_segments(const MaternParams& p, double weight = 1.0);
std::vector<MixtureSegment> cauchy_segments(const CauchyParams& p, double weight = 1.0);
std::vector<MixtureSegment> hybrid_cm_segments(const HybridCMParams& p);
std::vector<MixtureSegment> hybrid_hm_segments(const HybridHMParams& p);

/// Overlapping split (xi1 >= xi2): both marginal densities are active on
/// [xi2, xi1).
double superposition_mixture(const HybridCMParams& p, double h,
                             const QuadratureSettings& settings = oracle_settings(),
                             QuadratureScheme scheme = QuadratureScheme::gauss_kronrod);

}  // namespace hybridcov
