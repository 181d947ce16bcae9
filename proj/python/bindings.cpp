#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "trf/automorphic.hpp"
#include "trf/cli.hpp"
#include "trf/qdiff.hpp"
#include "trf/schrodinger.hpp"
#include "trf/sturm_liouville.hpp"

namespace py = pybind11;
using namespace trf;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral determinants, scattering, the quantum dilogarithm and modular-group numerics";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def("parse_potential", [](const std::string& text) { return parse_potential(text).print(); },
        "Canonical text of a potential expression");
  m.def("eval_potential", [](const std::string& text, double x) { return parse_potential(text).eval(x); });

  // Sturm-Liouville on [0, pi]
  py::class_<sl::Problem>(m, "SturmLiouville")
      .def(py::init([](const std::string& v, int steps) { return std::make_unique<sl::Problem>(Potential::parse(v), steps); }),
           py::arg("potential"), py::arg("steps") = 2048)
      .def("d", &sl::Problem::d)
      .def("eigenvalues", [](const sl::Problem& p, int n) { return p.eigenvalues(n).values; }, py::arg("n_max"))
      .def("trace_resolvent",
           [](const sl::Problem& p, cplx lambda) {
             const auto t = p.trace_resolvent(lambda);
             return py::make_tuple(t.diagonal, t.log_derivative);
           })
      .def("regularized_determinant", [](const sl::Problem& p, int n) { return p.regularized_determinant(n).value; })
      .def("gelfand_levitan",
           [](const sl::Problem& p, int n) {
             const auto g = p.gelfand_levitan_check(n);
             return py::make_tuple(g.lhs, g.rhs);
           })
      .def_property_readonly("mean", &sl::Problem::mean);

  // scattering on the line
  py::class_<schrod::Scatterer>(m, "Scatterer")
      .def(py::init([](const std::string& v) { return std::make_unique<schrod::Scatterer>(Potential::parse(v)); }), py::arg("potential"))
      .def("a", &schrod::Scatterer::a)
      .def("coefficients",
           [](const schrod::Scatterer& s, double k) {
             const auto c = s.coefficients(k);
             return py::make_tuple(c.a, c.b);
           })
      .def("bound_states", &schrod::Scatterer::bound_states, py::arg("kappa_max"), py::arg("step") = 0.02)
      .def("trace_difference",
           [](const schrod::Scatterer& s, cplx lambda) {
             const auto t = s.trace_difference(lambda);
             return py::make_tuple(t.lhs, t.rhs);
           })
      .def("zf_identity", [](const schrod::Scatterer& s, int l) {
        const auto z = s.zf_identity(l);
        return py::make_tuple(z.lhs, z.rhs);
      });

  // functional-difference operator
  py::class_<qdiff::Dilog>(m, "Dilog")
      .def(py::init<double>(), py::arg("b"))
      .def("__call__", &qdiff::Dilog::operator())
      .def("log", &qdiff::Dilog::log)
      .def_property_readonly("b", &qdiff::Dilog::b)
      .def_property_readonly("c_b", &qdiff::Dilog::c_b);
  m.def("free_kernel", &qdiff::free_kernel, py::arg("b"), py::arg("k"), py::arg("x"));
  m.def("lambda_of_k", &qdiff::lambda_of_k);
  m.def("k_of_lambda", &qdiff::k_of_lambda);
  m.def("m_coefficient", [](double b, cplx k) { return qdiff::m_coefficient(qdiff::Dilog(b), k); });
  m.def(
      "mirror_spectrum",
      [](double b, double zeta, int n) {
        const auto s = qdiff::mirror_spectrum(b, qdiff::mirror_h_zeta(zeta), n, qdiff::weyl_constant_h_zeta(b));
        py::dict d;
        d["values"] = std::vector<double>(s.values.begin(), s.values.begin() + s.resolved);
        d["resolved"] = s.resolved;
        d["weyl_fit"] = s.weyl_fit;
        d["weyl_expected"] = s.weyl_expected;
        return d;
      },
      py::arg("b"), py::arg("zeta"), py::arg("n"), "Resolved eigenvalues of U + 1/U + V + zeta/V");

  // modular group
  m.def("point_pair_u", &autom::point_pair_u);
  m.def("free_kernel_phi", &autom::free_kernel_phi, py::arg("u"), py::arg("s"));
  m.def("reduce_point", [](cplx z) {
    const auto r = autom::reduce_point(z);
    return py::make_tuple(r.z, r.word_length);
  });
  m.def("reduced_forms", [](long d) {
    const auto set = autom::reduced_forms(d);
    std::vector<std::tuple<long, long, long>> forms;
    for (const auto& f : set.forms) forms.emplace_back(f.a, f.b, f.c);
    return py::make_tuple(forms, set.points, set.w);
  });
  m.def("eisenstein_fourier", [](cplx z, cplx s) { return autom::eisenstein_fourier(z, s).value; });
  m.def("eisenstein_lattice", [](cplx z, cplx s) { return autom::eisenstein_lattice(z, s).value; });
  m.def("dedekind_zeta", [](long d, cplx s) {
    const auto z = autom::dedekind_zeta(d, s);
    return py::make_tuple(z.via_heegner, z.via_factorization);
  });
  m.def("deuring_residual", [](long d, cplx s) { return autom::deuring_limit_check(d, s).residual; });
  m.def(
      "resolvent_series", [](cplx z, cplx zp, cplx s, double u_max) { return autom::automorphic_resolvent_series(z, zp, s, u_max).value; },
      py::arg("z"), py::arg("zp"), py::arg("s"), py::arg("u_max") = 200.0);
  m.def("linnik_discrepancy", [](long d) {
    return autom::linnik_statistic(d, autom::Box{-0.5, 0.5, 1.0, 2.0}).discrepancy;
  }, "Discrepancy on {|x| <= 1/2, 1 <= y <= 2}");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "trf");
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "Run the command-line front end; returns (exit code, stdout, stderr)");
}
