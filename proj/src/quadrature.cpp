#include "hybridcov/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hybridcov {

void QuadratureSettings::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 1) {
    throw std::invalid_argument("QuadratureSettings: rel_tol, abs_tol and max_subdivisions must be positive");
  }
}

namespace detail {

namespace {

KronrodTable build_kronrod() {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  const auto& x = gauss_kronrod<double, 21>::abscissa();
  const auto& w = gauss_kronrod<double, 21>::weights();
  const auto& gx = gauss<double, 10>::abscissa();
  const auto& gw = gauss<double, 10>::weights();

  KronrodTable t;
  if (x.size() != t.nodes.size() || gx.size() != 5) {
    throw std::logic_error("unexpected Gauss-Kronrod table layout");
  }
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    t.nodes[i] = x[i];
    t.kronrod_weights[i] = w[i];
  }
  // Gauss nodes interleave with the Kronrod extension: odd positions.
  for (std::size_t i = 0; i < gx.size(); ++i) {
    const std::size_t k = 2 * i + 1;
    if (std::fabs(t.nodes[k] - gx[i]) > 1e-15) {
      throw std::logic_error("Gauss nodes are not embedded in the Kronrod rule");
    }
    t.gauss_weights[k] = gw[i];
  }
  return t;
}

LegendreTable build_legendre() {
  const auto& gx = boost::math::quadrature::gauss<double, 10>::abscissa();
  const auto& gw = boost::math::quadrature::gauss<double, 10>::weights();
  LegendreTable t;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    t.nodes[i] = gx[i];
    t.weights[i] = gw[i];
  }
  return t;
}

}  // namespace

const KronrodTable& gauss_kronrod21() {
  static const KronrodTable table = build_kronrod();
  return table;
}

const LegendreTable& gauss_legendre10() {
  static const LegendreTable table = build_legendre();
  return table;
}

}  // namespace detail
}  // namespace hybridcov
