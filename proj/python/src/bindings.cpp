#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gwlife/errors.hpp"
#include "gwlife/extinction.hpp"
#include "gwlife/model_io.hpp"
#include "gwlife/report_json.hpp"
#include "gwlife/simulator.hpp"
#include "gwlife/spectral.hpp"
#include "gwlife/truncation.hpp"

namespace py = pybind11;
using namespace gwlife;

namespace {

py::object to_python(const nlohmann::ordered_json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

RadiusMethod parse_method(const std::string& name) {
    if (name == "scalar_root") return RadiusMethod::ScalarRoot;
    if (name == "power_iteration") return RadiusMethod::PowerIteration;
    throw py::value_error("method must be 'scalar_root' or 'power_iteration'");
}

double extended(const ExtendedReal& x) { return x.to_double(); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Galton-Watson processes with random lifetimes";

    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<IndeterminateError>(m, "IndeterminateError", PyExc_ArithmeticError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<Model>(m, "Model")
        .def(py::init([](const std::string& text) { return build_model(parse_model_spec(std::string_view(text))); }),
             py::arg("spec_json"))
        .def_property_readonly("offspring_mean", [](const Model& x) { return x.offspring.mean(); })
        .def_property_readonly("lifetime_mean", [](const Model& x) { return x.lifetime.mean(); })
        .def("hazard", [](const Model& x, std::size_t k) { return x.lifetime.hazard(k); }, py::arg("k"))
        .def("survival", [](const Model& x, std::size_t k) { return x.lifetime.survival(k); }, py::arg("k"))
        .def("offspring_pgf", [](const Model& x, double s, int order) { return extended(x.offspring.pgf(s, order)); },
             py::arg("s"), py::arg("order") = 0)
        .def("lifetime_pgf", [](const Model& x, double s, int order) { return extended(x.lifetime.pgf(s, order).value); },
             py::arg("s"), py::arg("order") = 0);

    m.def("convergence_radius",
          [](const Model& x, double tol) { return to_python(to_json(convergence_radius(x.offspring, x.lifetime, tol))); },
          py::arg("model"), py::arg("tol") = 1e-12);
    m.def("classify", [](const Model& x) { return to_python(to_json(classify(x.offspring, x.lifetime))); },
          py::arg("model"));
    m.def("invariant_system",
          [](const Model& x, std::size_t K) { return to_python(to_json(invariant_system(x.offspring, x.lifetime, K))); },
          py::arg("model"), py::arg("K") = 200);
    m.def("growth_constant", [](const Model& x) { return growth_constant(x.offspring, x.lifetime); },
          py::arg("model"));
    m.def("extinction_probability",
          [](const Model& x, double tol) {
              return to_python(to_json(extinction_probability(x.offspring, x.lifetime, tol)));
          },
          py::arg("model"), py::arg("tol") = 1e-12);
    m.def("truncated_radius",
          [](const Model& x, std::size_t k, const std::string& method) {
              return truncated_radius(x.offspring, x.lifetime, k, parse_method(method));
          },
          py::arg("model"), py::arg("k"), py::arg("method") = "scalar_root");
    m.def("radius_sequence",
          [](const Model& x, std::size_t k_max, const std::string& method) {
              return radius_sequence(x.offspring, x.lifetime, k_max, parse_method(method)).rho;
          },
          py::arg("model"), py::arg("k_max"), py::arg("method") = "scalar_root");
    m.def("mean_vector", [](const Model& x, std::size_t n) { return mean_vector(x.offspring, x.lifetime, n); },
          py::arg("model"), py::arg("n"));
    m.def("mean_total", [](const Model& x, std::size_t n) { return mean_total(x.offspring, x.lifetime, n); },
          py::arg("model"), py::arg("n"));

    m.def("simulate",
          [](const Model& x, std::size_t replicates, std::size_t horizon, std::uint64_t seed, std::uint64_t cap,
             std::vector<std::size_t> generations, unsigned threads) {
              SimConfig cfg{replicates, horizon, seed, cap, threads};
              for (std::size_t g : generations) cfg.max_generations = std::max(cfg.max_generations, g);
              std::optional<double> rho;
              if (!generations.empty()) rho = convergence_radius(x.offspring, x.lifetime).rho;
              SimulationSummary s;
              {
                  py::gil_scoped_release release;
                  s = Simulator(x.offspring, x.lifetime, cfg).run(cfg.max_generations, generations, rho);
              }
              return to_python(to_json(s));
          },
          py::arg("model"), py::arg("replicates") = 1000, py::arg("horizon") = 100, py::arg("seed") = 1,
          py::arg("cap") = 1'000'000, py::arg("generations") = std::vector<std::size_t>{}, py::arg("threads") = 0);
}
