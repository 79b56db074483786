#pragma once

// Adaptive quadrature on finite and semi-infinite intervals.
//
// Two independent schemes are provided:
//  * a global adaptive 21-point Gauss-Kronrod rule (QUADPACK style error
//    estimate, the worst panel is bisected first), used in production code;
//  * a 10-point Gauss-Legendre rule whose panel error is the gap between the
//    rule on the panel and on its two halves; the worst panel is split into
//    thirds. Used to cross-check the first scheme.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hybridcov {

struct QuadratureSettings {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 200;

  /// Throws std::invalid_argument unless all fields are strictly positive.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  int evaluations = 0;
};

/// Raised when the requested tolerance could not be met. Carries the best
/// estimate and its error bound so callers can decide whether to accept it.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_estimate)
      : std::runtime_error(what), estimate_(estimate), error_estimate_(error_estimate) {}

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

enum class QuadratureScheme { gauss_kronrod, gauss_legendre };

namespace detail {

// Nonnegative half of the symmetric rules, node 0 is the centre.
struct KronrodTable {
  std::array<double, 11> nodes{};
  std::array<double, 11> kronrod_weights{};
  std::array<double, 11> gauss_weights{};  // zero at Kronrod-only nodes
};
const KronrodTable& gauss_kronrod21();

struct LegendreTable {
  std::array<double, 5> nodes{};
  std::array<double, 5> weights{};
};
const LegendreTable& gauss_legendre10();

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
};

template <class F>
Panel kronrod_panel(F& f, double lo, double hi) {
  const auto& t = gauss_kronrod21();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();

  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double abs_half = std::fabs(half);

  std::array<double, 11> f_lo{};
  std::array<double, 11> f_hi{};
  const double fc = f(centre);
  double res_k = t.kronrod_weights[0] * fc;
  double res_g = t.gauss_weights[0] * fc;
  double res_abs = std::fabs(res_k);
  for (std::size_t j = 1; j < t.nodes.size(); ++j) {
    const double dx = half * t.nodes[j];
    f_lo[j] = f(centre - dx);
    f_hi[j] = f(centre + dx);
    const double sum = f_lo[j] + f_hi[j];
    res_k += t.kronrod_weights[j] * sum;
    res_g += t.gauss_weights[j] * sum;
    res_abs += t.kronrod_weights[j] * (std::fabs(f_lo[j]) + std::fabs(f_hi[j]));
  }
  const double mean = 0.5 * res_k;
  double res_asc = t.kronrod_weights[0] * std::fabs(fc - mean);
  for (std::size_t j = 1; j < t.nodes.size(); ++j) {
    res_asc += t.kronrod_weights[j] * (std::fabs(f_lo[j] - mean) + std::fabs(f_hi[j] - mean));
  }
  res_abs *= abs_half;
  res_asc *= abs_half;

  double err = std::fabs((res_k - res_g) * half);
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  if (res_abs > tiny / (50.0 * eps)) {
    err = std::max(50.0 * eps * res_abs, err);
  }
  return Panel{lo, hi, res_k * half, err};
}

template <class F>
double legendre_panel(F& f, double lo, double hi) {
  const auto& t = gauss_legendre10();
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t j = 0; j < t.nodes.size(); ++j) {
    const double dx = half * t.nodes[j];
    sum += t.weights[j] * (f(centre - dx) + f(centre + dx));
  }
  return sum * half;
}

inline bool splittable(double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  return mid > lo && mid < hi &&
         (hi - lo) > 128.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(lo), std::fabs(hi));
}

template <class F>
QuadratureResult integrate_kronrod(F& f, double lo, double hi, const QuadratureSettings& s) {
  std::vector<Panel> heap;
  heap.reserve(static_cast<std::size_t>(s.max_subdivisions) + 2);
  const auto by_error = [](const Panel& a, const Panel& b) { return a.error < b.error; };

  heap.push_back(kronrod_panel(f, lo, hi));
  QuadratureResult out;
  out.evaluations = 21;
  double total = heap.front().value;
  double total_err = heap.front().error;

  while (true) {
    if (!std::isfinite(total) || !std::isfinite(total_err)) {
      throw QuadratureError("adaptive quadrature: non-finite integrand values", total, total_err);
    }
    const double target = std::max(s.abs_tol, s.rel_tol * std::fabs(total));
    if (total_err <= target) break;
    if (out.subdivisions >= s.max_subdivisions) {
      throw QuadratureError("adaptive quadrature: subdivision limit reached", total, total_err);
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();
    if (!splittable(worst.lo, worst.hi)) {
      throw QuadratureError("adaptive quadrature: panel cannot be bisected further", total, total_err);
    }
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = kronrod_panel(f, worst.lo, mid);
    const Panel right = kronrod_panel(f, mid, worst.hi);
    out.evaluations += 42;
    ++out.subdivisions;

    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }

  // Re-sum to shed the drift accumulated by the running updates.
  double value = 0.0;
  double err = 0.0;
  for (const auto& p : heap) {
    value += p.value;
    err += p.error;
  }
  out.value = value;
  out.abs_error = err;
  return out;
}

template <class F>
Panel legendre_refined_panel(F& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double coarse = legendre_panel(f, lo, hi);
  const double fine = legendre_panel(f, lo, mid) + legendre_panel(f, mid, hi);
  return Panel{lo, hi, fine, std::fabs(fine - coarse)};
}

// Global adaptive scheme on the Gauss-Legendre family; the worst panel is
// split into thirds, so its panel boundaries never coincide with the
// Kronrod driver's dyadic ones.
template <class F>
QuadratureResult integrate_legendre(F& f, double lo, double hi, const QuadratureSettings& s) {
  std::vector<Panel> heap;
  const auto by_error = [](const Panel& a, const Panel& b) { return a.error < b.error; };
  // Start from panels graded geometrically towards both endpoints, so that
  // mass concentrated near an endpoint cannot hide between the nodes.
  std::vector<double> cuts{lo};
  const double width = hi - lo;
  constexpr int kGrades = 12;
  for (int k = kGrades; k >= 1; --k) cuts.push_back(lo + 0.5 * width * std::pow(3.0, -k));
  cuts.push_back(lo + 0.5 * width);
  for (int k = 1; k <= kGrades; ++k) cuts.push_back(hi - 0.5 * width * std::pow(3.0, -k));
  cuts.push_back(hi);
  QuadratureResult out;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const Panel p = legendre_refined_panel(f, cuts[i], cuts[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push_back(p);
    std::push_heap(heap.begin(), heap.end(), by_error);
    out.evaluations += 30;
  }
  const int max_splits = s.max_subdivisions;

  while (true) {
    if (!std::isfinite(total) || !std::isfinite(total_err)) {
      throw QuadratureError("adaptive quadrature: non-finite integrand values", total, total_err);
    }
    const double target = std::max(s.abs_tol, s.rel_tol * std::fabs(total));
    if (total_err <= target) break;
    if (out.subdivisions >= max_splits) {
      throw QuadratureError("adaptive quadrature: subdivision limit reached", total, total_err);
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();
    const double third = (worst.hi - worst.lo) / 3.0;
    const double a = worst.lo + third;
    const double b = worst.hi - third;
    if (!(a > worst.lo && b > a && worst.hi > b) || !splittable(worst.lo, worst.hi)) {
      throw QuadratureError("adaptive quadrature: panel cannot be split further", total, total_err);
    }
    const Panel parts[] = {legendre_refined_panel(f, worst.lo, a), legendre_refined_panel(f, a, b),
                           legendre_refined_panel(f, b, worst.hi)};
    out.evaluations += 90;
    ++out.subdivisions;
    total -= worst.value;
    total_err -= worst.error;
    for (const auto& p : parts) {
      total += p.value;
      total_err += p.error;
      heap.push_back(p);
      std::push_heap(heap.begin(), heap.end(), by_error);
    }
  }

  double value = 0.0;
  double err = 0.0;
  for (const auto& p : heap) {
    value += p.value;
    err += p.error;
  }
  out.value = value;
  out.abs_error = err;
  return out;
}

}  // namespace detail

/// Integrates f over the finite interval [lo, hi].
template <class F>
QuadratureResult integrate(F&& f, double lo, double hi, const QuadratureSettings& settings = {},
                           QuadratureScheme scheme = QuadratureScheme::gauss_kronrod) {
  settings.validate();
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("integrate: need finite lo <= hi");
  }
  if (lo == hi) return {};
  if (scheme == QuadratureScheme::gauss_kronrod) return detail::integrate_kronrod(f, lo, hi, settings);
  return detail::integrate_legendre(f, lo, hi, settings);
}

/// Integrates f over [lo, inf) through the map t = lo + scale * (1 - s) / s.
/// Infinity sits at s = 0, where bisection keeps full floating-point
/// resolution, so algebraically decaying integrands stay tractable.
template <class F>
QuadratureResult integrate_to_infinity(F&& f, double lo, const QuadratureSettings& settings = {},
                                       QuadratureScheme scheme = QuadratureScheme::gauss_kronrod,
                                       double scale = 1.0) {
  auto mapped = [&f, lo, scale](double s) {
    if (s <= 0.0) return 0.0;
    const double t = lo + scale * (1.0 - s) / s;
    if (std::isinf(t)) return 0.0;
    const double v = f(t);
    return v == 0.0 ? 0.0 : v * scale / (s * s);
  };
  return integrate(mapped, 0.0, 1.0, settings, scheme);
}

}  // namespace hybridcov
