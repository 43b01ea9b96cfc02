#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "semithermo/errors.hpp"
#include "semithermo/io.hpp"
#include "semithermo/measures.hpp"
#include "semithermo/potential.hpp"
#include "semithermo/semigroup.hpp"
#include "semithermo/transfer.hpp"

namespace py = pybind11;
using namespace semithermo;

namespace {

// The point at infinity crosses the boundary as complex(inf, inf).
std::complex<double> to_py(const ExtComplex& z) {
  if (z.is_infinity()) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  return z.value();
}

Potential potential_from(const std::string& psi_json, const GeneratorSet& g) {
  if (psi_json.empty()) return Potential::constant(0.0, g.count());
  return Potential::from_json_string(psi_json, g.count());
}

PressureMode mode_from(const std::string& mode) {
  if (mode == "exact") return PressureMode::kExact;
  if (mode == "montecarlo") return PressureMode::kMonteCarlo;
  throw ConfigError("mode must be 'exact' or 'montecarlo'");
}

}  // namespace

PYBIND11_MODULE(semithermo, m) {
  m.doc() = "thermodynamic formalism toolkit for rational semigroups";
  m.attr("__version__") = version_string();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
  py::register_exception<ResidualError>(m, "ResidualError", PyExc_RuntimeError);

  py::class_<GeneratorSet>(m, "GeneratorSet")
      .def_static("from_json", &GeneratorSet::from_json_string, py::arg("text"))
      .def("to_json", &GeneratorSet::to_json_string)
      .def_property_readonly("count", &GeneratorSet::count)
      .def_property_readonly("degree_sum", &GeneratorSet::degree_sum);

  m.def(
      "julia_sample",
      [](const GeneratorSet& g, std::complex<double> seed_point, std::size_t count, int burn_in,
         std::uint64_t seed) {
        const JuliaCloud cloud =
            julia_backward_sample(g, ExtComplex(seed_point), count, burn_in, seed);
        std::vector<std::complex<double>> pts;
        pts.reserve(cloud.points.size());
        for (const ExtComplex& p : cloud.points) pts.push_back(to_py(p));
        return pts;
      },
      py::arg("generators"), py::arg("seed_point") = std::complex<double>(0.5, 0.5),
      py::arg("count") = 10000, py::arg("burn_in") = 100, py::arg("seed") = 1,
      "Backward-iteration sample of the Julia set as a list of complex points.");

  m.def(
      "pressure",
      [](const GeneratorSet& g, const std::string& psi_json, std::complex<double> z, int n_max,
         const std::string& mode, std::size_t mc_paths, std::uint64_t seed) {
        const Potential psi = potential_from(psi_json, g);
        const PressureEstimate pe = pressure_pointwise(g, psi, ExtComplex(z), n_max,
                                                       mode_from(mode), kDefaultNodeBudget,
                                                       mc_paths, seed);
        py::dict d;
        d["estimate"] = pe.estimate;
        d["dispersion"] = pe.dispersion;
        d["window"] = pe.window;
        d["a"] = pe.a;
        d["b"] = pe.b;
        d["method"] = pe.method;
        return d;
      },
      py::arg("generators"), py::arg("potential_json") = std::string(),
      py::arg("z") = std::complex<double>(0.5, 0.5), py::arg("n_max") = 12,
      py::arg("mode") = "exact", py::arg("mc_paths") = 20000, py::arg("seed") = 1,
      "Pointwise pressure estimate from iterates of the weighted preimage operator.");

  m.def(
      "spectrum",
      [](const GeneratorSet& g, const std::string& psi_json, std::complex<double> seed_point,
         std::size_t cloud_points, int burn_in, std::size_t cells, double tol,
         std::uint64_t seed) {
        const Potential psi = potential_from(psi_json, g);
        const JuliaCloud cloud =
            julia_backward_sample(g, ExtComplex(seed_point), cloud_points, burn_in, seed);
        const Grid grid = build_grid(cloud, cells);
        const UlamOperator op = build_ulam(g, psi, grid);
        const EigenTriple triple = leading_triple(op, tol, 100000, seed);
        py::dict d;
        d["lambda"] = triple.lambda;
        d["log_lambda"] = std::log(triple.lambda);
        d["leak"] = op.leak_fraction;
        d["residual_h"] = triple.residual_h;
        d["residual_m"] = triple.residual_m;
        std::vector<std::complex<double>> centers(grid.centers().begin(), grid.centers().end());
        d["centers"] = centers;
        d["h"] = triple.h;
        d["m"] = triple.m;
        d["mu"] = equilibrium_from(triple);
        return d;
      },
      py::arg("generators"), py::arg("potential_json") = std::string(),
      py::arg("seed_point") = std::complex<double>(0.5, 0.5), py::arg("cloud_points") = 20000,
      py::arg("burn_in") = 100, py::arg("cells") = 1024, py::arg("tol") = 1e-10,
      py::arg("seed") = 1,
      "Leading eigendata of the cell-discretized transfer operator.");
}
