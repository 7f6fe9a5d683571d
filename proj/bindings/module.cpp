// module.cpp
// pybind11 bindings: numpy in, numpy out. Matrices are 2-D float64 arrays;
// images are (height, width) arrays scaled to [0, 1].
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "penmf/experiment.hpp"

namespace py = pybind11;
using namespace penmf;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_matrix(const Array& a, const char* what) {
  if (a.ndim() != 2) {
    throw ParameterError(std::string(what) + ": expected a 2-D array, got " +
                         std::to_string(a.ndim()) + "-D");
  }
  DenseMatrix m(static_cast<Index>(a.shape(0)), static_cast<Index>(a.shape(1)));
  std::memcpy(m.eigen().data(), a.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  require_finite(m, what);
  return m;
}

py::array from_matrix(const DenseMatrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::memcpy(out.mutable_data(), m.eigen().data(),
              sizeof(double) * static_cast<std::size_t>(m.size()));
  return out;
}

GrayImage to_image(const Array& a) {
  if (a.ndim() != 2) throw ParameterError("image: expected a 2-D array");
  GrayImage img;
  img.height = static_cast<int>(a.shape(0));
  img.width = static_cast<int>(a.shape(1));
  img.intensities.assign(a.data(), a.data() + a.size());
  return img;
}

py::array from_image(const GrayImage& img) {
  py::array_t<double> out({static_cast<py::ssize_t>(img.height),
                           static_cast<py::ssize_t>(img.width)});
  std::memcpy(out.mutable_data(), img.intensities.data(),
              sizeof(double) * img.intensities.size());
  return out;
}

SolverConfig make_solver(int max_iters, double tol, double eps, int check_every,
                         std::uint64_t seed) {
  SolverConfig solver;
  solver.max_iters = max_iters;
  solver.rel_tol = tol;
  solver.eps = eps;
  solver.check_every = check_every;
  solver.seed = seed;
  return solver;
}

PenaltyConfig make_config(const std::string& algorithm, double alpha, double beta, double rho,
                          double nu, const std::string& toeplitz_kind,
                          const std::optional<double>& g, bool g_preset, Index n, Index p) {
  switch (algorithm_family(parse_algorithm(algorithm))) {
    case PenaltyFamily::None:
      return PenaltyConfig::none();
    case PenaltyFamily::Frobenius:
      return PenaltyConfig::frobenius(alpha, beta);
    case PenaltyFamily::Zellner: {
      double gv;
      if (g_preset) {
        gv = zellner_g_preset(n, p);
      } else if (g.has_value()) {
        gv = *g;
      } else {
        throw ParameterError("znmf requires g= or g_preset=True");
      }
      return PenaltyConfig::zellner(alpha, beta, gv);
    }
    case PenaltyFamily::Toeplitz:
      return PenaltyConfig::toeplitz(alpha, beta, parse_toeplitz_kind(toeplitz_kind), rho, nu, n,
                                     p);
  }
  return PenaltyConfig::none();
}

py::dict record_to_dict(const ResultRecord& r) {
  py::dict d;
  d["dataset"] = r.dataset;
  d["algorithm"] = r.algorithm;
  d["k"] = r.k;
  d["alpha"] = r.alpha;
  d["beta"] = r.beta;
  d["rho"] = r.rho ? py::object(py::float_(*r.rho)) : py::object(py::none());
  d["g"] = r.g ? py::object(py::float_(*r.g)) : py::object(py::none());
  d["replication"] = r.replication;
  d["seed"] = r.seed;
  d["accuracy"] = r.accuracy;
  d["final_cost"] = r.final_cost;
  d["iterations"] = r.iterations;
  d["clamp_warnings"] = r.clamp_warnings;
  d["wall_time_s"] = r.wall_time_s;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Penalized nonnegative matrix factorization (multiplicative updates with "
            "frobenius, zellner and toeplitz penalty families)";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<InputDomainError>(m, "InputDomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "factorize",
      [](const Array& x, int k, const std::string& algorithm, double alpha, double beta,
         double rho, double nu, const std::string& toeplitz_kind, std::optional<double> g,
         bool g_preset, int max_iters, double tol, double eps, int check_every,
         std::uint64_t seed) {
        const DenseMatrix xm = to_matrix(x, "factorize: x");
        const PenaltyConfig config = make_config(algorithm, alpha, beta, rho, nu, toeplitz_kind,
                                                 g, g_preset, xm.rows(), xm.cols());
        const SolverConfig solver = make_solver(max_iters, tol, eps, check_every, seed);
        FactorizationModel model;
        {
          py::gil_scoped_release release;
          model = run(xm, k, config, solver);
        }
        py::dict out;
        out["w"] = from_matrix(model.w);
        out["h"] = from_matrix(model.h);
        out["cost_history"] = model.cost_history;
        out["iterations"] = model.iterations_run;
        out["clamp_warnings"] = model.clamp_count;
        return out;
      },
      py::arg("x"), py::arg("k"), py::arg("algorithm") = "nmf", py::arg("alpha") = 0.0,
      py::arg("beta") = 0.0, py::arg("rho") = 0.0, py::arg("nu") = 1.0,
      py::arg("toeplitz_kind") = "geometric", py::arg("g") = py::none(),
      py::arg("g_preset") = false, py::arg("max_iters") = 500, py::arg("tol") = 1e-6,
      py::arg("eps") = 1e-12, py::arg("check_every") = 10, py::arg("seed") = 0,
      "Factor a nonnegative matrix as W @ H; returns w, h, cost_history, iterations and "
      "clamp_warnings.");

  m.def(
      "project",
      [](const Array& w, const Array& x_test, int max_iters, double tol, double eps,
         int check_every, std::uint64_t seed) {
        const DenseMatrix wm = to_matrix(w, "project: w");
        const DenseMatrix xm = to_matrix(x_test, "project: x_test");
        const SolverConfig solver = make_solver(max_iters, tol, eps, check_every, seed);
        DenseMatrix h(0, 0);
        {
          py::gil_scoped_release release;
          h = project(wm, xm, solver);
        }
        return from_matrix(h);
      },
      py::arg("w"), py::arg("x_test"), py::arg("max_iters") = 500, py::arg("tol") = 1e-6,
      py::arg("eps") = 1e-12, py::arg("check_every") = 10, py::arg("seed") = 0,
      "Nonnegative coefficients of test columns against a frozen basis.");

  m.def(
      "classify",
      [](const Array& h_test, const Array& h_train, const std::vector<std::string>& labels,
         const std::string& metric) {
        return classify(to_matrix(h_test, "classify: h_test"),
                        to_matrix(h_train, "classify: h_train"), labels, parse_metric(metric));
      },
      py::arg("h_test"), py::arg("h_train"), py::arg("labels"), py::arg("metric") = "cosine",
      "Nearest-neighbor label per test column.");

  m.def(
      "accuracy",
      [](const std::vector<std::string>& predicted, const std::vector<std::string>& actual) {
        return accuracy(predicted, actual);
      },
      py::arg("predicted"), py::arg("actual"));

  m.def(
      "toeplitz_dense",
      [](double rho, Index dim, const std::string& kind, double nu) {
        return from_matrix(build_dense(ToeplitzSpec{parse_toeplitz_kind(kind), rho, nu, dim}));
      },
      py::arg("rho"), py::arg("dim"), py::arg("kind") = "geometric", py::arg("nu") = 1.0,
      "Dense symmetric Toeplitz structure with unit diagonal.");

  m.def(
      "toeplitz_matmul",
      [](const Array& x, double rho, const std::string& kind, double nu) {
        const DenseMatrix xm = to_matrix(x, "toeplitz_matmul: x");
        return from_matrix(
            toeplitz_matmul(ToeplitzSpec{parse_toeplitz_kind(kind), rho, nu, xm.rows()}, xm));
      },
      py::arg("x"), py::arg("rho"), py::arg("kind") = "geometric", py::arg("nu") = 1.0,
      "Apply the Toeplitz structure to a matrix without densifying it.");

  m.def(
      "synthetic_parts",
      [](int n_parts, int part_size, int subjects, int images_per_subject, double noise,
         std::uint64_t seed) {
        const ImageDataset ds = generate_synthetic_parts(n_parts, part_size, subjects,
                                                         images_per_subject, noise, seed);
        py::array_t<double> images({static_cast<py::ssize_t>(ds.size()),
                                    static_cast<py::ssize_t>(ds.height()),
                                    static_cast<py::ssize_t>(ds.width())});
        double* out = images.mutable_data();
        for (const auto& img : ds.images) {
          std::memcpy(out, img.intensities.data(), sizeof(double) * img.intensities.size());
          out += img.intensities.size();
        }
        return py::make_tuple(images, ds.labels);
      },
      py::arg("n_parts"), py::arg("part_size"), py::arg("subjects"),
      py::arg("images_per_subject"), py::arg("noise"), py::arg("seed") = 0,
      "Synthetic parts dataset as (images[count, height, width], labels).");

  m.def(
      "parse_pgm",
      [](const py::bytes& data) {
        const std::string_view view = data;
        return from_image(parse_pgm(
            {reinterpret_cast<const unsigned char*>(view.data()), view.size()}));
      },
      py::arg("data"), "Decode a P2/P5 PGM byte string to a (height, width) array in [0, 1].");

  m.def(
      "write_pgm",
      [](const Array& image, const std::string& format, int maxval) {
        const auto bytes = write_pgm(to_image(image),
                                     format == "P2" ? PgmFormat::P2 : PgmFormat::P5, maxval);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("image"), py::arg("format") = "P5", py::arg("maxval") = 255);

  m.def(
      "downsample",
      [](const Array& image, int target_w, int target_h) {
        return from_image(downsample(to_image(image), target_w, target_h));
      },
      py::arg("image"), py::arg("target_w"), py::arg("target_h"));

  m.def(
      "run_grid",
      [](const std::string& plan_path, std::optional<int> jobs, std::optional<int> replications) {
        ExperimentPlan plan = parse_plan(plan_path);
        if (jobs) plan.jobs = *jobs;
        if (replications) plan.replications = *replications;
        GridOutcome outcome;
        {
          py::gil_scoped_release release;
          outcome = run_grid(plan);
        }
        py::list records;
        for (const auto& r : outcome.records) records.append(record_to_dict(r));
        py::list failures;
        for (const auto& f : outcome.failures) failures.append(f);
        py::dict out;
        out["records"] = records;
        out["failures"] = failures;
        return out;
      },
      py::arg("plan_path"), py::arg("jobs") = py::none(), py::arg("replications") = py::none(),
      "Run a sweep from a plan file; returns dict(records=[...], failures=[...]).");
}
