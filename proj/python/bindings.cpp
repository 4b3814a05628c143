#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "pemda/cli.hpp"
#include "pemda/errors.hpp"
#include "pemda/experiments.hpp"
#include "pemda/random.hpp"
#include "pemda/thresholds.hpp"
#include "pemda/verify.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace pemda;

namespace {

py::array_t<double> to_numpy(const SpectralField& f) {
  const Grid& g = f.grid();
  const PhysicalField p = transform_to_physical(f);
  py::array_t<double> out({g.nz(), g.ny(), g.nx()});
  std::copy(p.values.begin(), p.values.end(), out.mutable_data());
  return out;
}

SpectralField from_numpy(const Grid& g, py::array_t<double, py::array::c_style | py::array::forcecast> a,
                         Parity parity) {
  if (a.ndim() != 3 || a.shape(0) != g.nz() || a.shape(1) != g.ny() || a.shape(2) != g.nx())
    throw ValidationError("array shape must be (nz, ny, nx)");
  PhysicalField p(g, std::vector<double>(a.data(), a.data() + a.size()));
  return project_parity(transform_to_spectral(p, parity), parity);
}

py::dict as_dict(const NormReport& n) {
  return py::dict("l2_u"_a = n.l2_u, "l2_b"_a = n.l2_b, "l4_A"_a = n.l4_A, "l4_Astar"_a = n.l4_Astar,
                  "h1_u"_a = n.h1_u, "h1_b"_a = n.h1_b, "h2_u"_a = n.h2_u, "h2_b"_a = n.h2_b,
                  "dz_u_l2"_a = n.dz_u_l2, "dz_b_l2"_a = n.dz_b_l2, "grad_u_l2"_a = n.grad_u_l2,
                  "grad_b_l2"_a = n.grad_b_l2);
}

}  // namespace

PYBIND11_MODULE(_pemda, m) {
  m.doc() = "Nudging data assimilation for the primitive equations with magnetic field";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", error);
  py::register_exception<SolvabilityError>(m, "SolvabilityError", error);
  py::register_exception<AlignmentError>(m, "AlignmentError", error);
  py::register_exception<BlowUpError>(m, "BlowUpError", error);
  py::register_exception<IoError>(m, "IoError", error);

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int, int, double, double, double>(), "nx"_a, "ny"_a, "nz"_a, "L1"_a = 2 * M_PI,
           "L2"_a = 2 * M_PI, "dealias_fraction"_a = 2.0 / 3.0)
      .def_property_readonly("shape", [](const Grid& g) { return py::make_tuple(g.nz(), g.ny(), g.nx()); })
      .def_property_readonly("L1", &Grid::L1)
      .def_property_readonly("L2", &Grid::L2)
      .def_property_readonly("volume", &Grid::volume)
      .def("coordinates", [](const Grid& g) {
        std::vector<double> x(g.nx()), y(g.ny()), z(g.nz());
        for (int i = 0; i < g.nx(); ++i) x[i] = g.x(i);
        for (int i = 0; i < g.ny(); ++i) y[i] = g.y(i);
        for (int i = 0; i < g.nz(); ++i) z[i] = g.z(i);
        return py::make_tuple(x, y, z);
      });

  py::class_<PemParams>(m, "Params")
      .def(py::init([](double mu, double nu, double kappa, double sigma, double beta_u, double beta_b, double h,
                       double L1, double L2) {
             PemParams p{mu, nu, kappa, sigma, beta_u, beta_b, h, L1, L2};
             p.validate();
             return p;
           }),
           "mu"_a = 1.0, "nu"_a = 1.0, "kappa"_a = 1.0, "sigma"_a = 1.0, "beta_u"_a = 0.0, "beta_b"_a = 0.0,
           "h"_a = 1.0, "L1"_a = 2 * M_PI, "L2"_a = 2 * M_PI)
      .def_readwrite("mu", &PemParams::mu)
      .def_readwrite("nu", &PemParams::nu)
      .def_readwrite("kappa", &PemParams::kappa)
      .def_readwrite("sigma", &PemParams::sigma)
      .def_readwrite("beta_u", &PemParams::beta_u)
      .def_readwrite("beta_b", &PemParams::beta_b)
      .def_readwrite("h", &PemParams::h);

  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init([](double dt, double t_end, int stride) {
             IntegratorConfig c;
             c.dt = dt;
             c.t_end = t_end;
             c.checkpoint_stride = stride;
             return c;
           }),
           "dt"_a = 2e-3, "t_end"_a = 1.0, "checkpoint_stride"_a = 1)
      .def_readwrite("dt", &IntegratorConfig::dt)
      .def_readwrite("t_end", &IntegratorConfig::t_end)
      .def_property_readonly("steps", &IntegratorConfig::steps);

  py::class_<PemState>(m, "State")
      .def_readonly("time", &PemState::time)
      .def_property_readonly("grid", &PemState::grid)
      .def("u", [](const PemState& s) { return py::make_tuple(to_numpy(s.u.x), to_numpy(s.u.y)); })
      .def("b", [](const PemState& s) { return py::make_tuple(to_numpy(s.b.x), to_numpy(s.b.y)); })
      .def("norms", [](const PemState& s) { return as_dict(norms(s)); })
      .def("energy", [](const PemState& s) { return energy(s); })
      .def("is_admissible", [](const PemState& s) { return check_admissible(s).ok(); });

  m.def("random_state",
        [](const Grid& g, std::uint64_t seed, double norm_u, double norm_b) {
          InitSpec spec;
          spec.seed = seed;
          spec.norm_u = norm_u;
          spec.norm_b = norm_b;
          return random_state(g, spec);
        },
        "grid"_a, "seed"_a, "norm_u"_a = 1.0, "norm_b"_a = 1.0);
  m.def("state_from_arrays",
        [](const Grid& g, py::array_t<double> u1, py::array_t<double> u2, py::array_t<double> b1,
           py::array_t<double> b2) {
          PemState s{{from_numpy(g, u1, Parity::Even), from_numpy(g, u2, Parity::Even)},
                     {from_numpy(g, b1, Parity::Even), from_numpy(g, b2, Parity::Even)},
                     0.0};
          return make_admissible(s);
        },
        "grid"_a, "u1"_a, "u2"_a, "b1"_a, "b2"_a);

  py::enum_<InterpolantKind>(m, "InterpolantKind")
      .value("SpectralTruncation", InterpolantKind::SpectralTruncation)
      .value("BoxAverage", InterpolantKind::BoxAverage);
  py::class_<Interpolant>(m, "Interpolant")
      .def(py::init<InterpolantKind, double, Grid>(), "kind"_a, "h"_a, "grid"_a)
      .def(py::init([](const std::string& kind, double h, const Grid& g) {
             return Interpolant(parse_interpolant_kind(kind), h, g);
           }),
           "kind"_a, "h"_a, "grid"_a)
      .def_property_readonly("h", &Interpolant::h)
      .def_property_readonly("kind", &Interpolant::kind);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("t", &RunRecord::t)
      .def_readonly("dt", &RunRecord::dt)
      .def_readonly("err_l2", &RunRecord::err_l2)
      .def_readonly("budget_residual", &RunRecord::budget_residual)
      .def_readonly("baro_div_u", &RunRecord::baro_div_u)
      .def_readonly("baro_div_b", &RunRecord::baro_div_b)
      .def_property_readonly("norms", [](const RunRecord& r) { return as_dict(r.norms); })
      .def("to_json", &format_record)
      .def_static("from_json", &parse_record)
      .def(py::self == py::self);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("states", &Trajectory::states)
      .def_readonly("records", &Trajectory::records);

  m.def("run_reference", [](const PemState& init, const PemParams& p, const IntegratorConfig& cfg) {
    py::gil_scoped_release release;
    return run_reference(init, p, cfg);
  });
  m.def("run_cda",
        [](const PemState& truth, const PemState& guess, const PemParams& p, const Interpolant& I,
           const IntegratorConfig& cfg) {
          py::gil_scoped_release release;
          LockstepReference ref(truth, p, cfg);
          Trajectory tr = run_cda(ref, guess, p, I, cfg);
          tr.states.clear();
          return tr.records;
        },
        "truth"_a, "guess"_a, "params"_a, "interpolant"_a, "cfg"_a);
  m.def("sensitivity_study",
        [](const PemState& truth, const PemState& guess, const PemParams& p, const Interpolant& I,
           const IntegratorConfig& cfg, const std::vector<double>& mus, double central_eps) {
          ConvergenceReport r;
          {
            py::gil_scoped_release release;
            r = run_sensitivity_study(truth, guess, p, I, cfg, mus, central_eps);
          }
          return py::dict("mus"_a = r.mus, "errors"_a = r.errors, "ratios"_a = r.ratios,
                          "central_eps"_a = r.central_eps, "central_error"_a = r.central_error,
                          "sensitivity_size"_a = r.sensitivity_size);
        },
        "truth"_a, "guess"_a, "params"_a, "interpolant"_a, "cfg"_a, "mus"_a, "central_eps"_a = 0.0);

  m.def("fit_decay_rate", [](const std::vector<RunRecord>& recs, double t0, double t1) {
    const DecayFit f = fit_decay_rate(recs, t0, t1);
    return py::dict("rate"_a = f.rate, "r2"_a = f.r2, "points"_a = f.points);
  });
  m.def("summarize_cda", [](const std::vector<RunRecord>& recs) {
    const CdaSummary s = summarize_cda(recs);
    return py::dict("initial_error"_a = s.initial_error, "min_error"_a = s.min_error,
                    "final_error"_a = s.final_error, "orders"_a = s.orders, "window_found"_a = s.window.found,
                    "t_start"_a = s.window.t_start, "t_stop"_a = s.window.t_stop, "rate"_a = s.fit.rate,
                    "r2"_a = s.fit.r2);
  });

  m.def("compute_thresholds",
        [](const PemParams& p, double C, double k0, double Ch1) {
          const ParamThresholds t = compute_thresholds(p, C, k0, Ch1);
          return py::dict("R1"_a = t.R1, "R2"_a = t.R2, "R3"_a = t.R3, "beta_min"_a = t.beta_min,
                          "h_max"_a = t.h_max, "beta_ok"_a = t.beta_ok, "h_ok"_a = t.h_ok, "warning"_a = t.warning);
        },
        "params"_a, "C"_a = 1.0, "k0"_a = 1.0, "Ch1"_a = 1.0);

  m.def("read_records", &read_records);
  m.def("write_records", py::overload_cast<const std::filesystem::path&, const std::vector<RunRecord>&>(&write_records));
  m.def("empirical_k0", &empirical_k0);

  m.def("verify", [](const Grid& g, std::uint64_t seed) {
    py::list out;
    for (const CheckResult& c : run_verify_suite(g, seed))
      out.append(py::dict("name"_a = c.name, "value"_a = c.value, "tolerance"_a = c.tolerance, "passed"_a = c.passed));
    return out;
  }, "grid"_a, "seed"_a = 1);

  m.def("main", [](std::vector<std::string> args) {
    args.insert(args.begin(), "pemda");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
