#include "hybridcov/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace hybridcov {

namespace {

double diameter(const std::vector<Eigen::VectorXd>& v) {
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, (v[i] - v[j]).norm());
  }
  return d;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const NelderMeadOptions& options) {
  if (x0.size() == 0) throw std::invalid_argument("nelder_mead: empty starting point");
  if (!(options.xtol > 0.0) || options.max_iterations < 1 || !(options.initial_step > 0.0)) {
    throw std::invalid_argument("nelder_mead: invalid options");
  }
  const Eigen::Index n = x0.size();
  NelderMeadResult out;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> simplex{x0};
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = x0;
    v(i) += options.initial_step;
    simplex.push_back(v);
  }
  std::vector<double> values;
  for (const auto& v : simplex) values.push_back(eval(v));
  std::vector<std::size_t> order(simplex.size());

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    // Stable sort keeps ties in vertex order for reproducibility.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> s;
    std::vector<double> fv;
    for (auto k : order) {
      s.push_back(simplex[k]);
      fv.push_back(values[k]);
    }
    simplex.swap(s);
    values.swap(fv);

    out.simplex_size = diameter(simplex);
    if (out.simplex_size < options.xtol) {
      out.converged = true;
      break;
    }
    if (out.iterations >= options.max_iterations) break;
    ++out.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += simplex[static_cast<std::size_t>(i)];
    centroid /= static_cast<double>(n);
    const std::size_t worst = simplex.size() - 1;

    const Eigen::VectorXd xr = centroid + (centroid - simplex[worst]);
    const double fr = eval(xr);
    if (fr < values[0]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[worst - 1]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd xc =
        outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid)) : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k < simplex.size(); ++k) {
      simplex[k] = simplex[0] + 0.5 * (simplex[k] - simplex[0]);
      values[k] = eval(simplex[k]);
    }
  }
  out.x = simplex[0];
  out.value = values[0];
  return out;
}

Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("numerical_hessian: step must be positive");
  const Eigen::Index n = x.size();
  Eigen::MatrixXd h(n, n);
  const double f0 = f(x);
  auto shifted = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    Eigen::VectorXd y = x;
    y(i) += si;
    y(j) += sj;
    return f(y);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = (shifted(i, step, i, 0.0) - 2.0 * f0 + shifted(i, -step, i, 0.0)) / (step * step);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (shifted(i, step, j, step) - shifted(i, step, j, -step) - shifted(i, -step, j, step) +
                        shifted(i, -step, j, -step)) /
                       (4.0 * step * step);
      h(i, j) = h(j, i) = v;
    }
  }
  return h;
}

}  // namespace hybridcov
