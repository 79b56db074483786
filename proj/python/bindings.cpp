#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hybridcov/inference.hpp"
#include "hybridcov/kernel_spec.hpp"
#include "hybridcov/predict.hpp"
#include "hybridcov/randfield.hpp"

namespace py = pybind11;
using namespace hybridcov;

namespace {

Kernel make_kernel(const std::string& family, const ParamMap& params, int dim) {
  return Kernel(KernelSpec{family_from_name(family), params, dim});
}

FieldSample make_sample(const Eigen::MatrixXd& points, const Eigen::VectorXd& values) {
  FieldSample s;
  s.locations.points = points;
  s.values = values;
  s.validate();
  return s;
}

Locations make_locations(const Eigen::MatrixXd& points) {
  Locations loc;
  loc.points = points;
  loc.validate();
  return loc;
}

py::dict scores_dict(const CVScores& s) {
  py::dict d;
  d["mse"] = s.mse;
  d["mae"] = s.mae;
  d["lscore"] = s.lscore;
  d["crps"] = s.crps;
  d["n"] = s.n;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hybrid Cauchy-Matern and hole-effect covariance models";

  py::register_exception<FactorizationError>(m, "FactorizationError", PyExc_RuntimeError);

  py::class_<Kernel>(m, "Kernel")
      .def(py::init(&make_kernel), py::arg("family"), py::arg("params"), py::arg("dim") = 2)
      .def("__call__", [](const Kernel& k, double h) { return k(h); }, py::arg("h"))
      .def("__call__", [](const Kernel& k, const Eigen::ArrayXd& h) { return h.unaryExpr([&](double x) { return k(x); }).eval(); },
           py::arg("h"))
      .def_property_readonly("variance", &Kernel::variance)
      .def_property_readonly("dim", &Kernel::dim)
      .def_property_readonly("family", [](const Kernel& k) { return family_name(k.spec().family); })
      .def_property_readonly("params", [](const Kernel& k) { return k.spec().params; })
      .def("to_json", [](const Kernel& k) { return to_json(k.spec()); })
      .def("__repr__", [](const Kernel& k) { return "Kernel(" + to_json(k.spec()) + ")"; });

  m.def("tail_exponent", &tail_exponent, py::arg("kernel"), py::arg("h_lo"), py::arg("h_hi"));

  m.def(
      "uniform_locations",
      [](int n, const std::vector<double>& lo, const std::vector<double>& hi, std::uint64_t seed) {
        return sample_uniform_locations(n, lo, hi, seed).points;
      },
      py::arg("n"), py::arg("lo"), py::arg("hi"), py::arg("seed") = 0);

  m.def(
      "covariance_matrix",
      [](const Kernel& k, const Eigen::MatrixXd& points) { return covariance_matrix(k, make_locations(points)); },
      py::arg("kernel"), py::arg("points"));

  m.def(
      "simulate",
      [](const Kernel& k, const Eigen::MatrixXd& points, std::uint64_t seed, int replicates) {
        SimulationConfig cfg;
        cfg.seed = seed;
        cfg.n_replicates = replicates;
        const auto r = simulate(k, make_locations(points), cfg);
        Eigen::MatrixXd out(replicates, points.rows());
        for (int i = 0; i < replicates; ++i) out.row(i) = r.replicates[i].values.transpose();
        return out;
      },
      py::arg("kernel"), py::arg("points"), py::arg("seed") = 0, py::arg("replicates") = 1,
      "One row per replicate.");

  m.def(
      "neg_log_likelihood",
      [](const Kernel& k, const Eigen::MatrixXd& points, const Eigen::VectorXd& values) {
        return neg_log_likelihood(k, make_sample(points, values)).value;
      },
      py::arg("kernel"), py::arg("points"), py::arg("values"));

  m.def(
      "fit",
      [](const std::string& family, const Eigen::MatrixXd& points, const Eigen::VectorXd& values, const ParamMap& init,
         const ParamMap& fixed, int starts, std::uint64_t seed, bool std_errors) {
        ParamMask mask;
        for (const auto& [name, v] : init) mask.free.insert(name);
        mask.fixed = fixed;
        FitOptions fo;
        fo.n_starts = starts;
        fo.seed = seed;
        fo.std_errors = std_errors;
        const auto sample = make_sample(points, values);
        const FitResult f = fit_mle(family_from_name(family), static_cast<int>(points.cols()), mask, sample, init, fo);
        py::dict d;
        d["family"] = family_name(f.family);
        d["estimates"] = f.estimates;
        d["std_errors"] = f.std_errors;
        d["k"] = static_cast<int>(f.mask.free.size());
        d["loglik"] = f.loglik;
        d["aic"] = f.aic;
        d["converged"] = f.converged;
        d["diagnostic"] = f.diagnostic;
        return d;
      },
      py::arg("family"), py::arg("points"), py::arg("values"), py::arg("init"), py::arg("fixed") = ParamMap{},
      py::arg("starts") = 3, py::arg("seed") = 0, py::arg("std_errors") = true);

  m.def("aic", py::overload_cast<int, double>(&aic), py::arg("k"), py::arg("loglik"));

  m.def(
      "krige",
      [](const Kernel& k, const Eigen::MatrixXd& points, const Eigen::VectorXd& values, const Eigen::MatrixXd& targets) {
        const auto p = simple_krige(k, make_sample(points, values), make_locations(targets));
        return py::make_tuple(p.means, p.variances);
      },
      py::arg("kernel"), py::arg("points"), py::arg("values"), py::arg("targets"), "Returns (means, variances).");

  m.def(
      "loo_cv",
      [](const Kernel& k, const Eigen::MatrixXd& points, const Eigen::VectorXd& values) {
        const auto r = loo_cv(k, make_sample(points, values));
        py::dict d = scores_dict(r.scores);
        d["means"] = r.means;
        d["variances"] = r.variances;
        return d;
      },
      py::arg("kernel"), py::arg("points"), py::arg("values"));

  m.def(
      "gaussian_scores",
      [](double mean, double variance, double actual) {
        const auto s = gaussian_scores(mean, variance, actual);
        py::dict d;
        d["se"] = s.se;
        d["ae"] = s.ae;
        d["lscore"] = s.lscore;
        d["crps"] = s.crps;
        return d;
      },
      py::arg("mean"), py::arg("variance"), py::arg("actual"));
}
