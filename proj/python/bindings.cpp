#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli_app.hpp"
#include "rhlab/certifier.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/horseshoe.hpp"
#include "rhlab/io.hpp"
#include "rhlab/orbit.hpp"
#include "rhlab/pliss.hpp"

namespace py = pybind11;
using namespace rhlab;
using nlohmann::json;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::array_t<double> as_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

Arc arc_from(const std::pair<double, double>& p) { return Arc(p.first, p.second); }

py::dict orbit_dict(const Orbit& o) {
  py::dict d;
  d["x0"] = o.x0;
  d["points"] = as_array(o.points);
  d["noise"] = as_array(o.noise);
  d["log_deriv"] = as_array(o.log_deriv);
  d["S"] = as_array(o.S);
  d["deltas"] = o.deltas;
  py::list Z;
  for (const auto& z : o.Z) Z.append(as_array(z));
  d["Z"] = Z;
  d["singular_step"] = o.singular_step ? py::cast(*o.singular_step) : py::none();
  d["clamp_count"] = o.clamp_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Noisy circle maps: orbits, hyperbolic times, certificates and random horseshoes.";

  auto base = py::register_exception<Error>(m, "RhlabError", PyExc_RuntimeError);
  py::register_exception<PreconditionError>(m, "PreconditionError", base);
  py::register_exception<DegenerateRegion>(m, "DegenerateRegion", base);
  py::register_exception<NonIntegrable>(m, "NonIntegrable", base);
  py::register_exception<CoverFailed>(m, "CoverFailed", base);
  py::register_exception<BranchExplosion>(m, "BranchExplosion", base);
  py::register_exception<CylinderNotFound>(m, "CylinderNotFound", base);
  py::register_exception<VerificationFailed>(m, "VerificationFailed", base);
  py::register_exception<NotFound>(m, "NotFound", base);
  py::register_exception<SingularHit>(m, "SingularHit", base);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", base);
  py::register_exception<TimeoutError>(m, "SearchTimeout", base);

  py::class_<NoiseStream>(m, "NoiseStream")
      .def(py::init<double, std::uint64_t, std::uint64_t>(), py::arg("sigma"), py::arg("seed"),
           py::arg("offset") = 0)
      .def_property_readonly("sigma", &NoiseStream::sigma)
      .def_property_readonly("seed", &NoiseStream::seed)
      .def("__getitem__", &NoiseStream::operator[])
      .def("shifted", &NoiseStream::shifted)
      .def("split", &NoiseStream::split)
      .def("prefix", [](const NoiseStream& s, std::uint64_t n) { return as_array(s.prefix(n)); });

  py::class_<CircleMap>(m, "CircleMap")
      .def_static("sine", &CircleMap::sine, py::arg("L"), py::arg("a") = 0.0)
      .def_static("linear", &CircleMap::linear, py::arg("k"), py::arg("a") = 0.0)
      .def_static("from_spec", [](const py::object& spec) { return CircleMap::from_json(from_py(spec)); })
      .def("lift", py::overload_cast<double>(&CircleMap::lift, py::const_))
      .def("deriv", py::overload_cast<double>(&CircleMap::deriv, py::const_))
      .def_property_readonly("degree", &CircleMap::degree)
      .def_property_readonly("name", &CircleMap::name)
      .def_property_readonly("critical_set", &CircleMap::critical_set)
      .def_property_readonly("sup_abs_deriv", &CircleMap::sup_abs_deriv)
      .def("to_spec", [](const CircleMap& f) { return to_py(f.to_json()); });

  m.def(
      "iterate_orbit",
      [](const CircleMap& f, const NoiseStream& w, double x0, std::size_t n, std::vector<double> deltas) {
        Orbit o;
        {
          py::gil_scoped_release release;
          o = iterate_orbit(f, w, x0, n, deltas);
        }
        return orbit_dict(o);
      },
      py::arg("map"), py::arg("noise"), py::arg("x0"), py::arg("n"), py::arg("deltas") = std::vector<double>{});

  m.def(
      "lyapunov_estimate",
      [](const CircleMap& f, const NoiseStream& w, std::size_t trials, std::size_t n, double x0, int threads) {
        LyapunovEstimate e;
        {
          py::gil_scoped_release release;
          e = lyapunov_estimate(f, w, trials, n, x0, threads);
        }
        py::dict d = to_py(io::to_json(e));
        d["per_trial"] = as_array(e.per_trial);
        return d;
      },
      py::arg("map"), py::arg("noise"), py::arg("trials"), py::arg("n"), py::arg("x0") = 0.3,
      py::arg("threads") = 1);

  m.def(
      "pliss_select",
      [](const std::vector<double>& a, double c, double A) {
        const PlissSelection s = pliss_select(a, c, A);
        py::dict d;
        d["indices"] = s.indices;
        d["gamma"] = s.gamma;
        d["sum_condition"] = s.sum_condition;
        d["guaranteed"] = s.guaranteed;
        d["hypothesis_violated"] = s.hypothesis_violated;
        return d;
      },
      py::arg("a"), py::arg("c"), py::arg("A"));

  m.def(
      "frequency_bound",
      [](double lambda, double A, double b, std::optional<double> delta) {
        return to_py(io::to_json(make_frequency_bound(lambda, A, b, delta)));
      },
      py::arg("lam"), py::arg("A"), py::arg("b"), py::arg("delta") = py::none());

  m.def(
      "hyperbolic_times",
      [](const CircleMap& f, const NoiseStream& w, double x0, std::size_t n, double kappa1, double delta,
         double b) {
        const Orbit o = iterate_orbit(f, w, x0, n, {delta});
        return hyperbolic_times(o, kappa1, delta, b).times;
      },
      py::arg("map"), py::arg("noise"), py::arg("x0"), py::arg("n"), py::arg("kappa1"), py::arg("delta"),
      py::arg("b"));

  m.def(
      "certify",
      [](const CircleMap& f, double sigma, double R) {
        PredominanceReport r;
        {
          py::gil_scoped_release release;
          r = certify(f, sigma, R);
        }
        return to_py(io::to_json(r));
      },
      py::arg("map"), py::arg("sigma"), py::arg("R"));

  m.def(
      "certify_sine_family",
      [](double L, double sigma) { return to_py(io::to_json(certify_sine_family(L, sigma))); }, py::arg("L"),
      py::arg("sigma"));

  m.def("contracting_log_integral", &contracting_log_integral, py::arg("map"));
  m.def("c1_constant", &c1_constant);

  m.def(
      "full_branch_time",
      [](const CircleMap& f, const NoiseStream& w, std::pair<double, double> I, double kappa, int n_max,
         const std::string& policy) {
        FullBranchOptions o;
        o.n_max = n_max;
        o.policy = source_policy_from_string(policy);
        const FullBranchResult r = full_branch_time(f, w, arc_from(I), kappa, o);
        py::dict d;
        d["m"] = r.m;
        d["J"] = std::make_pair(r.J.lo, r.J.hi);
        d["min_log_deriv"] = r.min_log_deriv;
        return d;
      },
      py::arg("map"), py::arg("noise"), py::arg("I"), py::arg("kappa"), py::arg("n_max") = 200,
      py::arg("policy") = "witness");

  m.def(
      "horseshoe",
      [](const CircleMap& f, const NoiseStream& w, std::pair<double, double> I0, std::pair<double, double> I1,
         int returns, double kappa, std::vector<std::vector<int>> sequences) {
        py::dict d;
        HorseshoeRecord rec;
        std::vector<ShadowResult> shadows;
        {
          py::gil_scoped_release release;
          rec = horseshoe_returns(f, w, arc_from(I0), arc_from(I1), returns, kappa);
          for (const auto& s : sequences) shadows.push_back(shadow(f, rec, s, false));
        }
        d["returns"] = rec.returns;
        py::list cyl;
        for (const Cylinder& c : rec.cylinders) {
          py::dict e;
          e["k"] = c.k;
          e["i"] = c.i;
          e["j"] = c.j;
          e["J"] = std::make_pair(c.J.lo, c.J.hi);
          e["min_log_deriv"] = c.min_log_deriv;
          e["verified"] = c.e1 && c.e2;
          cyl.append(e);
        }
        d["cylinders"] = cyl;
        py::list sh;
        for (const auto& s : shadows) sh.append(to_py(io::to_json(s)));
        d["shadows"] = sh;
        return d;
      },
      py::arg("map"), py::arg("noise"), py::arg("I0"), py::arg("I1"), py::arg("returns"), py::arg("kappa"),
      py::arg("sequences") = std::vector<std::vector<int>>{});

  m.def(
      "density_from_returns",
      [](const std::vector<std::vector<int>>& returns, double tolerance) {
        return to_py(io::to_json(density_from_returns(returns, tolerance)));
      },
      py::arg("returns"), py::arg("tolerance") = 0.15);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "rhlab");
        py::gil_scoped_release release;
        return cli::run(args);
      },
      py::arg("args"), "Run the command-line tool in-process; returns its exit code.");
}
