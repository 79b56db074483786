#include "hybridcov/mixture_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace hybridcov {

double gaussian_kernel(double h, double u) { return std::exp(-u * h * h); }

void MixtureSegment::validate() const {
  if (!(u_lo >= 0.0) || !(u_lo < u_hi)) throw std::invalid_argument("MixtureSegment: need 0 <= u_lo < u_hi");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("MixtureSegment: weight must be positive");
  if (!mixing || !base_kernel) throw std::invalid_argument("MixtureSegment: mixing density and base kernel required");
}

namespace {

// [lo, lo + 1] directly, the rest through u = pivot + (1 - s)/s. Wide finite
// segments take the same map, so mass near the pivot is not lost between the
// nodes of one long panel.
template <class F>
double integrate_segment(F& f, double lo, double hi, const QuadratureSettings& settings, QuadratureScheme scheme) {
  const double pivot = lo + 1.0;
  if (hi <= pivot) return integrate(f, lo, hi, settings, scheme).value;
  const double head = integrate(f, lo, pivot, settings, scheme).value;
  auto mapped = [&f, pivot](double s) {
    if (s <= 0.0) return 0.0;
    const double u = pivot + (1.0 - s) / s;
    if (std::isinf(u)) return 0.0;
    const double v = f(u);
    return v == 0.0 ? 0.0 : v / (s * s);
  };
  const double s_lo = std::isinf(hi) ? 0.0 : 1.0 / (1.0 + (hi - pivot));
  return head + integrate(mapped, s_lo, 1.0, settings, scheme).value;
}

}  // namespace

QuadratureSettings oracle_settings() {
  QuadratureSettings s;
  s.rel_tol = 1e-11;
  s.abs_tol = 1e-15;
  s.max_subdivisions = 4000;
  return s;
}

double eval_mixture(const std::vector<MixtureSegment>& segments, double h, const QuadratureSettings& settings,
                    QuadratureScheme scheme) {
  if (!(h >= 0.0)) throw std::domain_error("eval_mixture: lag must be nonnegative");
  double total = 0.0;
  for (const auto& seg : segments) {
    seg.validate();
    auto integrand = [&seg, h](double u) {
      const double g = seg.mixing(u);
      return g == 0.0 ? 0.0 : seg.base_kernel(h, u) * g;
    };
    total += seg.weight * integrate_segment(integrand, seg.u_lo, seg.u_hi, settings, scheme);
  }
  return total;
}

std::vector<MixtureSegment> matern_segments(const MaternParams& p, double weight) {
  kernels::validate(p);
  MixtureSegment s;
  s.weight = weight;
  s.mixing = [p](double u) { return kernels::mixing_matern(u, p); };
  return {s};
}

std::vector<MixtureSegment> cauchy_segments(const CauchyParams& p, double weight) {
  kernels::validate(p);
  MixtureSegment s;
  s.weight = weight;
  s.mixing = [p](double u) { return kernels::mixing_cauchy(u, p); };
  return {s};
}

std::vector<MixtureSegment> hybrid_cm_segments(const HybridCMParams& p) {
  kernels::validate(p);
  MixtureSegment low;
  low.u_lo = 0.0;
  low.u_hi = p.xi1;
  low.weight = p.omega1;
  low.mixing = [c = p.lambda1](double u) { return kernels::mixing_cauchy(u, c); };

  MixtureSegment high;
  high.u_lo = p.xi2;
  high.weight = p.omega2;
  high.mixing = [m = p.lambda2](double u) { return kernels::mixing_matern(u, m); };
  return {low, high};
}

std::vector<MixtureSegment> hybrid_hm_segments(const HybridHMParams& p) {
  kernels::validate(p);
  MixtureSegment low;
  low.u_lo = 0.0;
  low.u_hi = p.xi1;
  low.weight = p.omega1;
  low.mixing = [m = p.lambda1](double u) { return kernels::mixing_matern(u, m); };
  low.base_kernel = [tau = p.tau, eta = p.eta](double h, double u) {
    return tau * std::exp(-u * eta * h * h) - std::exp(-u * h * h);
  };

  MixtureSegment high;
  high.u_lo = p.xi2;
  high.weight = p.omega2;
  high.mixing = [m = p.lambda2](double u) { return kernels::mixing_matern(u, m); };
  return {low, high};
}

double superposition_mixture(const HybridCMParams& p, double h, const QuadratureSettings& settings,
                             QuadratureScheme scheme) {
  if (!(p.xi1 >= p.xi2)) throw std::invalid_argument("superposition_mixture: requires xi1 >= xi2");
  return eval_mixture(hybrid_cm_segments(p), h, settings, scheme);
}

}  // namespace hybridcov
