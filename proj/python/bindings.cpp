#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gapbound/bounds.hpp"
#include "gapbound/eigensolver.hpp"
#include "gapbound/errors.hpp"
#include "gapbound/experiment.hpp"
#include "gapbound/lattice_model.hpp"
#include "gapbound/localization.hpp"

namespace py = pybind11;
using namespace gapbound;

namespace {

// Solve entry point that takes the spec directly; the Python side has no use
// for a separate HermitianMatrix handle.
SpectrumResult solve(const ModelSpec& spec, double tol, double degeneracy_tol) {
  return lowest_two(HermitianMatrix(assemble(spec)), SolverOptions{tol, degeneracy_tol});
}

std::string spec_text(const ModelSpec& spec) {
  std::ostringstream out;
  write_model(out, spec);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral gap and localization bounds (C++ core)";

  static py::exception<Error> invariant_error(m, "InvariantError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const Error& e) {
      py::set_error(invariant_error, e.what());
    }
  });

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init([](int L, int n0, std::string label) {
             ModelSpec s;
             s.L = L;
             s.n0 = n0;
             s.label = std::move(label);
             return s;
           }),
           py::arg("L"), py::arg("n0") = 1, py::arg("label") = "")
      .def_readwrite("L", &ModelSpec::L)
      .def_readwrite("n0", &ModelSpec::n0)
      .def_readwrite("label", &ModelSpec::label)
      .def_property_readonly("dimension", &ModelSpec::dimension)
      .def("add_hopping",
           [](ModelSpec& s, int x, int x_prime, const Block& h) {
             s.hopping.push_back({x, x_prime, h});
           },
           py::arg("x"), py::arg("x_prime"), py::arg("block"))
      .def("add_onsite", [](ModelSpec& s, int x, const Block& v) { s.onsite.push_back({x, v}); },
           py::arg("x"), py::arg("block"))
      .def_property_readonly("hopping",
                             [](const ModelSpec& s) {
                               py::list out;
                               for (const auto& b : s.hopping) {
                                 out.append(py::make_tuple(b.x, b.x_prime, b.h));
                               }
                               return out;
                             })
      .def_property_readonly("onsite",
                             [](const ModelSpec& s) {
                               py::list out;
                               for (const auto& b : s.onsite) out.append(py::make_tuple(b.x, b.v));
                               return out;
                             })
      .def("validate", [](const ModelSpec& s) { validate(s); })
      .def("to_text", &spec_text)
      .def("__repr__", [](const ModelSpec& s) {
        return "<ModelSpec L=" + std::to_string(s.L) + " n0=" + std::to_string(s.n0) +
               " hopping=" + std::to_string(s.hopping.size()) + ">";
      });

  m.def("parse_model", [](const std::string& text) {
    std::istringstream in(text);
    return parse_model(in);
  }, py::arg("text"), "Parse model-file text.");
  m.def("impurity_model", &impurity_model, py::arg("L"), py::arg("h0"));
  m.def("assemble", &assemble, py::arg("spec"));
  m.def("fit_envelope",
        [](const ModelSpec& s, double mu) {
          const HoppingEnvelope e = fit_envelope(s, mu);
          return py::make_tuple(e.cv, e.mu);
        },
        py::arg("spec"), py::arg("mu"), "Smallest (cv, mu) envelope at the given mu.");
  m.def("check_nearest_neighbor", [](const ModelSpec& s) { return check_nearest_neighbor(s).v0; },
        py::arg("spec"), "V0 of a nearest-neighbour spec; ValueError otherwise.");

  py::class_<SpectrumResult>(m, "Spectrum")
      .def_readonly("e0", &SpectrumResult::e0)
      .def_readonly("e1", &SpectrumResult::e1)
      .def_readonly("gap", &SpectrumResult::gap)
      .def_readonly("psi0", &SpectrumResult::psi0)
      .def_readonly("residual0", &SpectrumResult::residual0)
      .def_readonly("residual1", &SpectrumResult::residual1)
      .def_readonly("eigenvalues", &SpectrumResult::eigenvalues);
  m.def("lowest_two", &solve, py::arg("spec"), py::arg("tol") = 1e-10,
        py::arg("degeneracy_tol") = 1e-8);

  py::class_<PositionStats>(m, "PositionStats")
      .def_readonly("mean", &PositionStats::mean)
      .def_readonly("variance", &PositionStats::variance)
      .def_property_readonly("std_dev", &PositionStats::std_dev);
  py::class_<DecayFit>(m, "DecayFit")
      .def_readonly("xi_fit", &DecayFit::xi_fit)
      .def_readonly("intercept", &DecayFit::intercept)
      .def_readonly("r_squared", &DecayFit::r_squared)
      .def_readonly("window_lo", &DecayFit::window_lo)
      .def_readonly("window_hi", &DecayFit::window_hi)
      .def_readonly("points", &DecayFit::points);

  m.def("density",
        [](const Eigen::VectorXcd& psi0, const ModelSpec& s) { return density(psi0, s).values(); },
        py::arg("psi0"), py::arg("spec"), "Per-supersite probabilities p_1..p_L.");
  m.def("position_stats",
        [](const std::vector<double>& p) { return position_stats(DensityProfile(p)); },
        py::arg("profile"));
  m.def("tail",
        [](const std::vector<double>& p, double mean, double R) {
          return tail(DensityProfile(p), mean, R);
        },
        py::arg("profile"), py::arg("mean"), py::arg("R"));
  m.def("fit_localization_length",
        [](const std::vector<double>& p, double center, double floor, int margin) {
          return fit_localization_length(DensityProfile(p), center, FitOptions{floor, margin});
        },
        py::arg("profile"), py::arg("center"), py::arg("floor") = 1e-13,
        py::arg("boundary_margin") = 10);

  py::class_<Theorem1Bound>(m, "Theorem1Bound")
      .def_readonly("s", &Theorem1Bound::s)
      .def_readonly("c1", &Theorem1Bound::c1)
      .def_readonly("mu", &Theorem1Bound::mu)
      .def_readonly("r1", &Theorem1Bound::r1)
      .def_readonly("xi1", &Theorem1Bound::xi1)
      .def_readonly("prefactor", &Theorem1Bound::prefactor)
      .def("__call__", [](const Theorem1Bound& b, double R) { return b.envelope()(R); });
  py::class_<Theorem2Bound>(m, "Theorem2Bound")
      .def_readonly("s", &Theorem2Bound::s)
      .def_readonly("v0", &Theorem2Bound::v0)
      .def_readonly("r1", &Theorem2Bound::r1)
      .def_readonly("xi2", &Theorem2Bound::xi2)
      .def_readonly("prefactor", &Theorem2Bound::prefactor)
      .def("__call__", [](const Theorem2Bound& b, double R) { return b.envelope()(R); });

  m.def("c1_constant", [](double cv, double mu) { return c1_constant({cv, mu}); },
        py::arg("cv"), py::arg("mu"));
  m.def("chebyshev_max_vx", [](double cv, double mu, int L) {
    return chebyshev_max_vx(HoppingEnvelope{cv, mu}, L);
  }, py::arg("cv"), py::arg("mu"), py::arg("L"));
  m.def("theorem1_bound",
        [](double cv, double mu, double gap, double s, double dx) {
          return theorem1_bound({cv, mu}, gap, s, dx);
        },
        py::arg("cv"), py::arg("mu"), py::arg("gap"), py::arg("s"), py::arg("delta_x"));
  m.def("theorem2_bound", &theorem2_bound, py::arg("v0"), py::arg("gap"), py::arg("s"),
        py::arg("delta_x"));

  py::class_<EnvelopeCheck>(m, "EnvelopeCheck")
      .def_readonly("radii", &EnvelopeCheck::radii)
      .def_readonly("bound_values", &EnvelopeCheck::bound_values)
      .def_readonly("tail_values", &EnvelopeCheck::tail_values)
      .def_readonly("violations", &EnvelopeCheck::violations)
      .def_property_readonly("passed", &EnvelopeCheck::passed);
  m.def("verify_envelope",
        [](const std::vector<double>& p, double mean, const Theorem1Bound& b, double step,
           double tol) { return verify_envelope(DensityProfile(p), mean, b, step, tol); },
        py::arg("profile"), py::arg("mean"), py::arg("bound"), py::arg("grid_step") = 0.5,
        py::arg("tolerance") = 1e-12);
  m.def("verify_envelope",
        [](const std::vector<double>& p, double mean, const Theorem2Bound& b, double step,
           double tol) { return verify_envelope(DensityProfile(p), mean, b, step, tol); },
        py::arg("profile"), py::arg("mean"), py::arg("bound"), py::arg("grid_step") = 0.5,
        py::arg("tolerance") = 1e-12);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("h0", &SweepRow::h0)
      .def_readonly("e0", &SweepRow::e0)
      .def_readonly("e1", &SweepRow::e1)
      .def_readonly("gap", &SweepRow::gap)
      .def_readonly("delta_x", &SweepRow::delta_x)
      .def_readonly("xi_fit", &SweepRow::xi_fit)
      .def_readonly("xi1", &SweepRow::xi1)
      .def_readonly("xi2", &SweepRow::xi2)
      .def_readonly("ratio1", &SweepRow::ratio1)
      .def_readonly("ratio2", &SweepRow::ratio2)
      .def_readonly("fit_r_squared", &SweepRow::fit_r_squared)
      .def_readonly("violations1", &SweepRow::violations1)
      .def_readonly("violations2", &SweepRow::violations2);
  m.def("log_spaced_h0", &log_spaced_h0, py::arg("points") = 100, py::arg("h0_min") = -1.0,
        py::arg("h0_max") = -0.01);
  m.def("run_sweep",
        [](int L, std::vector<double> h0_grid, double s, double mu, std::optional<double> cv,
           std::string output_path, int threads) {
          SweepConfig c;
          c.L = L;
          c.h0_grid = std::move(h0_grid);
          c.s = s;
          c.mu = mu;
          c.cv_override = cv;
          c.output_path = std::move(output_path);
          c.threads = threads;
          py::gil_scoped_release release;
          return run_sweep(c);
        },
        py::arg("L"), py::arg("h0_grid"), py::arg("s") = 0.5, py::arg("mu") = 1.0,
        py::arg("cv") = py::none(), py::arg("output_path") = "", py::arg("threads") = 0);

  py::class_<FuzzReport>(m, "FuzzReport")
      .def_readonly("trials_run", &FuzzReport::trials_run)
      .def_readonly("passed", &FuzzReport::passed)
      .def_readonly("degenerate_skipped", &FuzzReport::degenerate_skipped)
      .def_property_readonly("ok", &FuzzReport::ok)
      .def_property_readonly("failed_check",
                             [](const FuzzReport& r) -> std::optional<std::string> {
                               if (!r.failure) return std::nullopt;
                               return r.failure->check;
                             })
      .def("to_text", &FuzzReport::to_text);
  m.def("run_fuzz",
        [](std::uint64_t seed, int trials, const std::string& family, int min_L, int max_L,
           int min_n0, int max_n0) {
          FuzzConfig c;
          c.seed = seed;
          c.trials = trials;
          c.family = parse_fuzz_family(family);
          c.min_L = min_L;
          c.max_L = max_L;
          c.min_n0 = min_n0;
          c.max_n0 = max_n0;
          return run_fuzz(c);
        },
        py::arg("seed") = 42, py::arg("trials") = 100, py::arg("family") = "nearest-neighbor",
        py::arg("min_L") = 2, py::arg("max_L") = 40, py::arg("min_n0") = 1, py::arg("max_n0") = 3);
}
