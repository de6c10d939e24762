#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nhmetro/cli.hpp"
#include "nhmetro/nhmetro.hpp"

namespace py = pybind11;
using nhmetro::ComplexMatrix;
using nhmetro::ComplexVector;
using nhmetro::cplx;

// numpy complex128 arrays <-> ComplexMatrix / ComplexVector
namespace pybind11::detail {

template <>
struct type_caster<ComplexMatrix> {
  PYBIND11_TYPE_CASTER(ComplexMatrix, const_name("numpy.ndarray[complex128[n, n]]"));

  bool load(handle src, bool convert) {
    if (!convert && !array_t<cplx>::check_(src)) return false;
    auto a = array_t<cplx, array::c_style | array::forcecast>::ensure(src);
    if (!a || a.ndim() != 2 || a.shape(0) != a.shape(1)) return false;
    const auto d = static_cast<std::size_t>(a.shape(0));
    value = ComplexMatrix(d, std::vector<cplx>(a.data(), a.data() + d * d));
    return true;
  }

  static handle cast(const ComplexMatrix& m, return_value_policy, handle) {
    const auto d = static_cast<py::ssize_t>(m.dim());
    const std::vector<py::ssize_t> shape{d, d};
    const std::vector<py::ssize_t> strides{d * static_cast<py::ssize_t>(sizeof(cplx)), sizeof(cplx)};
    return array_t<cplx>(shape, strides, m.entries().data()).release();
  }
};

template <>
struct type_caster<ComplexVector> {
  PYBIND11_TYPE_CASTER(ComplexVector, const_name("numpy.ndarray[complex128[n]]"));

  bool load(handle src, bool convert) {
    if (!convert && !array_t<cplx>::check_(src)) return false;
    auto a = array_t<cplx, array::c_style | array::forcecast>::ensure(src);
    if (!a || a.ndim() != 1) return false;
    value = ComplexVector(std::vector<cplx>(a.data(), a.data() + a.shape(0)));
    return true;
  }

  static handle cast(const ComplexVector& v, return_value_policy, handle) {
    const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(v.dim())};
    const std::vector<py::ssize_t> strides{static_cast<py::ssize_t>(sizeof(cplx))};
    return array_t<cplx>(shape, strides, v.amplitudes().data()).release();
  }
};

}  // namespace pybind11::detail

namespace {

using namespace nhmetro;

py::dict run_cli(const std::string& command, const std::string& config_json, std::optional<std::uint64_t> seed) {
  const cli::ExperimentConfig cfg = cli::parse_config(config_json);
  std::ostringstream csv, log;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run_command(command, cfg, cli::RunOptions{seed, "", false}, csv, log);
  }
  py::dict out;
  out["exit_code"] = code;
  out["csv"] = csv.str();
  out["log"] = log.str();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Generalized quantum Fisher information for non-Hermitian dynamics";

  // instances carry .kind, the stable name of the failure
  static py::handle error_type = py::exception<Error>(m, "NhmetroError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  // matcore
  m.def("mat_exp", &mat_exp);
  m.def("mat_inverse", &mat_inverse);
  m.def("kron", &kron, "Kronecker product, first factor slowest");
  m.def("eig", [](const ComplexMatrix& a) {
    const EigenDecomposition e = eig_decompose(a);
    return py::make_tuple(e.eigenvalues, e.right_eigenvectors, e.condition_number, e.defective);
  }, "Returns (eigenvalues, right eigenvectors, condition number, defective).");

  // models
  py::class_<HamiltonianModel>(m, "HamiltonianModel")
      .def_static("pt", &HamiltonianModel::pt, py::arg("s"), py::arg("alpha"), py::arg("estimate") = "s")
      .def_static("kappa", &HamiltonianModel::kappa, py::arg("kappa"))
      .def_static("ep_demo", &HamiltonianModel::ep_demo, py::arg("alpha"))
      .def_static("custom", &HamiltonianModel::custom, py::arg("h"), py::arg("dh"), py::arg("theta"),
                  py::arg("name") = "theta",
                  "h(theta) and dh(theta) return square complex arrays.")
      .def_property_readonly("family", [](const HamiltonianModel& mdl) { return std::string(to_string(mdl.family())); })
      .def_property_readonly("estimated_param", &HamiltonianModel::estimated_param)
      .def_property_readonly("params", &HamiltonianModel::params)
      .def_property_readonly("theta", &HamiltonianModel::theta)
      .def_property_readonly("dim", &HamiltonianModel::dim)
      .def("with_theta", &HamiltonianModel::with_theta)
      .def("__repr__", [](const HamiltonianModel& mdl) {
        std::ostringstream s;
        s << "HamiltonianModel(" << to_string(mdl.family());
        for (const auto& [k, v] : mdl.params()) s << ", " << k << "=" << v;
        s << ", estimate=" << mdl.estimated_param() << ")";
        return s.str();
      });
  m.def("hamiltonian", &hamiltonian);
  m.def("d_hamiltonian", &d_hamiltonian);
  m.def("closed_form_U", &closed_form_U);
  m.def("h_eigen_oracle", &h_eigen_oracle);

  // dynamics
  py::class_<EvolutionResult>(m, "EvolutionResult")
      .def_readonly("U", &EvolutionResult::U)
      .def_readonly("psi_out_raw", &EvolutionResult::psi_out_raw)
      .def_readonly("phi_out", &EvolutionResult::phi_out)
      .def_readonly("K", &EvolutionResult::K);
  m.def("evolve", &evolve, py::arg("model"), py::arg("theta"), py::arg("t"), py::arg("psi0"));
  m.def("survival_probability", &survival_probability);

  // fisher
  py::class_<QuadratureOptions>(m, "QuadratureOptions")
      .def(py::init<>())
      .def_readwrite("order", &QuadratureOptions::order)
      .def_readwrite("adaptive", &QuadratureOptions::adaptive)
      .def_readwrite("tol", &QuadratureOptions::tol)
      .def_readwrite("max_order", &QuadratureOptions::max_order);
  m.def("generator_quadrature",
        py::overload_cast<const HamiltonianModel&, double, double, const QuadratureOptions&>(&generator_quadrature),
        py::arg("model"), py::arg("theta"), py::arg("t"), py::arg("opts") = QuadratureOptions{});
  m.def("generator_fd", &generator_fd, py::arg("model"), py::arg("theta"), py::arg("t"), py::arg("step") = 0.0,
        py::arg("richardson") = false);
  m.def("qfi_generator", &qfi_generator, py::arg("h"), py::arg("phi"));
  m.def("qfi_state_derivative", &qfi_state_derivative, py::arg("model"), py::arg("theta"), py::arg("t"),
        py::arg("psi0"), py::arg("step") = 0.0);
  m.def("qfi_closed_form", &qfi_closed_form, py::arg("model"), py::arg("theta"), py::arg("t"),
        py::arg("probe") = ComplexVector{1.0, 0.0});
  py::class_<QFIRecord>(m, "QFIRecord")
      .def_readonly("theta", &QFIRecord::theta)
      .def_readonly("t", &QFIRecord::t)
      .def_readonly("h", &QFIRecord::h)
      .def_readonly("F", &QFIRecord::F)
      .def_readonly("K", &QFIRecord::K)
      .def_readonly("I", &QFIRecord::I)
      .def_readonly("gap", &QFIRecord::gap);
  m.def("qfi_record", &qfi_record, py::arg("model"), py::arg("theta"), py::arg("t"), py::arg("psi0"),
        py::arg("opts") = QuadratureOptions{});
  m.def("scaled_info", &scaled_info);
  m.def("gauge_invariance_check", &gauge_invariance_check, py::arg("model"), py::arg("theta"), py::arg("t"),
        py::arg("psi0"), py::arg("scalar"), py::arg("step") = 0.0);

  // measure
  py::class_<Observable>(m, "Observable")
      .def(py::init<ComplexMatrix, std::string>(), py::arg("a"), py::arg("label") = "A")
      .def_static("basis_projector", &Observable::basis_projector)
      .def_property_readonly("matrix", &Observable::matrix)
      .def_property_readonly("label", &Observable::label);
  m.def("error_propagation_precision", &error_propagation_precision, py::arg("model"), py::arg("theta"),
        py::arg("t"), py::arg("psi0"), py::arg("obs"), py::arg("step") = 0.0);
  py::class_<OptimalityReport>(m, "OptimalityReport")
      .def_readonly("residual", &OptimalityReport::residual)
      .def_readonly("c", &OptimalityReport::c)
      .def_readonly("c_imag_fraction", &OptimalityReport::c_imag_fraction)
      .def("optimal", &OptimalityReport::optimal, py::arg("tol") = 1e-6);
  m.def("optimality_residual",
        py::overload_cast<const HamiltonianModel&, double, double, const ComplexVector&, const Observable&>(
            &optimality_residual));
  m.def("sld_operator", &sld_operator, py::arg("model"), py::arg("theta"), py::arg("t"), py::arg("psi0"),
        py::arg("step") = 0.0);

  // estimate
  py::class_<Pcg32>(m, "Pcg32")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream"))
      .def("next_u32", &Pcg32::next_u32)
      .def("next_double", &Pcg32::next_double);
  m.def("outcome_probability", &outcome_probability);
  m.def("monotone_bracket", &monotone_bracket, py::arg("model"), py::arg("t"), py::arg("psi0"), py::arg("obs"),
        py::arg("theta_true"), py::arg("max_half_width"), py::arg("resolution") = 2000);
  py::class_<EstimationRun>(m, "EstimationRun")
      .def_readonly("trials", &EstimationRun::trials)
      .def_readonly("estimates", &EstimationRun::estimates)
      .def_readonly("failed_trials", &EstimationRun::failed_trials)
      .def_readonly("mean", &EstimationRun::mean)
      .def_readonly("sigma", &EstimationRun::sigma)
      .def_readonly("sigma_err", &EstimationRun::sigma_err)
      .def_readonly("precision", &EstimationRun::precision)
      .def_readonly("precision_err", &EstimationRun::precision_err)
      .def_readonly("p_true", &EstimationRun::p_true);
  // GIL released so worker threads can call back into custom Python models
  m.def(
      "run_trials",
      [](const HamiltonianModel& model, double theta_true, double t, const ComplexVector& psi0,
         const Observable& obs, std::pair<double, double> bracket, std::uint64_t n, std::size_t trials,
         std::uint64_t seed, unsigned threads) {
        TrialOptions o{n, trials, seed, threads};
        return run_trials(model, theta_true, t, psi0, obs, o, bracket);
      },
      py::arg("model"), py::arg("theta_true"), py::arg("t"), py::arg("psi0"), py::arg("obs"), py::arg("bracket"),
      py::arg("n") = 2000, py::arg("trials") = 1000, py::arg("seed") = 0, py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>());

  // dilation
  m.def("solve_eta", &solve_eta);
  py::class_<DilationSystem>(m, "DilationSystem")
      .def_readonly("H", &DilationSystem::H)
      .def_readonly("eta", &DilationSystem::eta)
      .def_readonly("c", &DilationSystem::c)
      .def_readonly("zeta", &DilationSystem::zeta)
      .def_readonly("H_s", &DilationSystem::H_s)
      .def_readonly("V", &DilationSystem::V)
      .def_readonly("H_tot", &DilationSystem::H_tot);
  m.def("build_dilation", &build_dilation, py::arg("H"), py::arg("eta") = std::nullopt);
  py::class_<DilatedState>(m, "DilatedState")
      .def_readonly("total", &DilatedState::total)
      .def_readonly("recovered", &DilatedState::recovered)
      .def_readonly("success_prob", &DilatedState::success_prob)
      .def_readonly("norm_squared", &DilatedState::norm_squared);
  m.def("evolve_dilated", &evolve_dilated);

  m.def("run_cli", &run_cli, py::arg("command"), py::arg("config_json"), py::arg("seed") = std::nullopt,
        "Runs a CLI subcommand on a JSON config string; returns exit_code, csv and log.");
}
