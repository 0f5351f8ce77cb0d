#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "kswave/error.hpp"
#include "kswave/heteroclinic.hpp"
#include "kswave/pde.hpp"
#include "kswave/regions.hpp"
#include "kswave/spectra.hpp"

namespace py = pybind11;
using namespace kswave;

namespace {

py::array_t<double> array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict profile_dict(const TravelingWaveProfile& prof) {
  py::dict d;
  d["xi"] = array(prof.xi);
  d["U"] = array(prof.u);
  if (!prof.v.empty()) d["V"] = array(prof.v);
  if (!prof.y.empty()) d["Y"] = array(prof.y);
  d["W"] = array(prof.w);
  d["speed"] = prof.speed;
  d["shift"] = prof.shift;
  d["ordering_violations"] = prof.checks.ordering_violations;
  d["monotonicity_violations"] = prof.checks.monotonicity_violations;
  return d;
}

ModelParams make_params(double mu, double beta, double diff, const std::string& chi) {
  ModelParams p;
  p.mu = mu;
  p.beta = beta;
  p.diff = diff;
  p.chi = cli::parse_chi(chi, mu);
  return validate_params(p);
}

}  // namespace

PYBIND11_MODULE(_kswave, m) {
  m.doc() = "Traveling waves of the logistic Keller-Segel model";

  static py::exception<Error> error(m, "KsWaveError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init(&make_params), py::arg("mu") = 1.0, py::arg("beta") = 1.0, py::arg("D") = 0.0,
           py::arg("chi") = "const:0")
      .def_readonly("mu", &ModelParams::mu)
      .def_readonly("beta", &ModelParams::beta)
      .def_readonly("D", &ModelParams::diff)
      .def("chi", &ModelParams::chi_at, py::arg("v"))
      .def("to_json", [](const ModelParams& p) { return to_json(p).dump(); });

  m.def("min_wave_speed", [](const ModelParams& p) {
    const auto r = min_wave_speed(p);
    return py::make_tuple(r.c_star, std::string(to_string(r.binding)));
  });

  m.def("origin_spectrum", [](const ModelParams& p, double c) {
    const auto r = origin_spectrum(p, c);
    return py::make_tuple(r.eigenvalues, std::string(to_string(r.classification)));
  });

  m.def(
      "shoot",
      [](const ModelParams& p, double c, std::size_t points) {
        const auto outcome = shoot(p, c);
        py::dict d;
        d["kind"] = std::string(to_string(outcome.kind));
        d["xi_event"] = outcome.xi_event;
        if (outcome.face) d["face"] = std::string(to_string(*outcome.face));
        if (outcome.kind == OutcomeKind::ConvergedToOrigin) {
          ProfileOptions opts;
          opts.points = points;
          const auto prof = extract_profile(outcome, p, opts);
          d["profile"] = profile_dict(prof);
          d["residual"] = comoving_residual(prof, p);
        }
        return d;
      },
      py::arg("params"), py::arg("c"), py::arg("points") = 2048);

  m.def(
      "find_min_speed",
      [](const ModelParams& p, double c_lo, double c_hi, double tol) {
        const auto r = find_min_speed_empirical(p, c_lo, c_hi, tol);
        return py::make_tuple(r.speed, r.lower, r.upper);
      },
      py::arg("params"), py::arg("c_lo"), py::arg("c_hi"), py::arg("tol") = 1e-3);

  m.def(
      "face_margins",
      [](const ModelParams& p, double c, long samples) {
        const auto region = make_region(p, c);
        py::dict d;
        for (FaceId f : faces_of(region.kind)) {
          if (f == FaceId::Yslant && !region.rho) continue;
          d[py::str(std::string(to_string(f)))] = face_flux_check(p, c, f, samples).worst_margin;
        }
        return d;
      },
      py::arg("params"), py::arg("c"), py::arg("samples") = 10000);

  m.def(
      "verify_surface",
      [](const ModelParams& p, double c, double eta, int grid, int y_grid) {
        const auto s = verify_surface(p, c, SurfaceParam{eta}, grid, y_grid);
        return py::make_tuple(s.holds, s.worst_value);
      },
      py::arg("params"), py::arg("c"), py::arg("eta"), py::arg("grid") = 200, py::arg("y_grid") = 50);

  m.def(
      "front_speed",
      [](const ModelParams& p, double length, int n, double t_end, double t_a, double t_b) {
        const auto g = make_grid(length, n);
        const auto sol = simulate(p, g, step_front(g, 20.0, p.beta), t_end);
        const auto est = estimate_speed(sol.front_series, t_a, t_b);
        return py::make_tuple(est.speed, est.stderr_);
      },
      py::arg("params"), py::arg("L") = 300.0, py::arg("n") = 3000, py::arg("t_end") = 60.0, py::arg("t_a") = 30.0,
      py::arg("t_b") = 60.0);

  m.def("speed_json", [](const ModelParams& p) { return cli::speed_json(p).dump(2); });
}
