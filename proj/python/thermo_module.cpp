#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "thermo/corpus.hpp"
#include "thermo/harness.hpp"

namespace py = pybind11;
using namespace thermo;

namespace {

Rational to_rational(const py::object& a) {
  if (py::isinstance<py::str>(a)) return Rational::parse(a.cast<std::string>());
  if (py::isinstance<py::tuple>(a)) {
    auto t = a.cast<std::pair<std::int64_t, std::int64_t>>();
    return Rational{t.first, t.second};
  }
  throw InvalidArgument("alpha must be a string like '1/4' or a (num, den) tuple");
}

TuringProgram program_from(const std::string& name_or_text) {
  if (name_or_text.find('\n') == std::string::npos) return corpus_program(name_or_text);
  std::istringstream in(name_or_text);
  return parse_program(in);
}

py::dict verdict_dict(const Verdict& v) {
  py::dict d;
  d["verdict"] = to_string(v.kind);
  d["value"] = v.value;
  d["target"] = v.target;
  d["eps"] = v.eps;
  d["c"] = v.c;
  d["slack"] = v.slack;
  d["exit_code"] = exit_code(v.kind);
  return d;
}

}  // namespace

PYBIND11_MODULE(_thermo, m) {
  m.doc() = "Relaxation and thermalization of Turing-machine Hamiltonians";

  py::register_exception<Error>(m, "ThermoError");

  m.def("corpus", [] {
    std::vector<py::dict> out;
    for (const auto& e : corpus()) {
      py::dict d;
      d["id"] = e.id;
      d["halts"] = e.halts;
      d["input"] = e.input;
      d["text"] = e.text;
      out.push_back(d);
    }
    return out;
  });

  m.def(
      "orbit_summary",
      [](const std::string& program, const std::string& x, int N, const py::object& alpha, bool padded) {
        const TuringProgram p = program_from(program);
        const ReversibleTM tm = padded ? build_padded_machine(p) : build_composite_machine(p);
        const Orbit o = orbit(tm, initial_configuration(tm, x, N, to_rational(alpha)));
        py::dict d;
        d["kind"] = o.kind == OrbitKind::Path ? "path" : "cycle";
        d["T"] = o.T;
        d["T_h"] = o.T_h;
        d["local_dimension"] = local_dimension(tm);
        std::vector<int> a2;
        for (const auto& c : o.configs) a2.push_back(count_a2(tm, c));
        d["a2_counts"] = a2;
        return d;
      },
      py::arg("program"), py::arg("x") = "", py::arg("N") = 8, py::arg("alpha") = "1/4", py::arg("padded") = false,
      "Orbit of the composite (or padded) machine; `program` is a corpus id or .tm text.");

  m.def(
      "relax",
      [](const std::string& program, const std::optional<std::string>& x, int N, const py::object& alpha, bool padded,
         const std::string& method, std::uint64_t seed, int seeds, std::int64_t shots) {
        const TuringProgram p = program_from(program);
        const std::string in = x.value_or(program.find('\n') == std::string::npos ? corpus_entry(program).input : "");
        const auto inst = build_hardness_instance(p, in, N, to_rational(alpha), padded);
        QsimOptions q;
        q.seed = seed;
        q.seeds = seeds;
        q.shots = shots;
        const auto rep = decide_fsrelax(inst, parse_method(method), q);
        py::dict d = verdict_dict(rep.verdict);
        d["exact_value"] = rep.exact_value;
        d["T"] = inst.orbit.T;
        d["T_h"] = inst.orbit.T_h;
        d["method"] = to_string(rep.method);
        return d;
      },
      py::arg("program"), py::arg("x") = py::none(), py::arg("N") = 8, py::arg("alpha") = "1/4",
      py::arg("padded") = false, py::arg("method") = "exact", py::arg("seed") = 0, py::arg("seeds") = 1,
      py::arg("shots") = -1);

  m.def(
      "therm",
      [](const std::string& program, const std::optional<std::string>& x, int N, const py::object& alpha,
         const std::string& ensemble, std::optional<double> E, double w) {
        const TuringProgram p = program_from(program);
        const std::string in = x.value_or(program.find('\n') == std::string::npos ? corpus_entry(program).input : "");
        TunedOptions o;
        o.ensemble = ensemble == "gibbs" ? EnsembleKind::Gibbs : EnsembleKind::Microcanonical;
        o.E = E;
        o.w = w;
        const auto inst = build_tuned_instance(p, in, N, to_rational(alpha), o);
        const auto rep = decide_fstherm(inst, Method::Exact);
        py::dict d = verdict_dict(rep.verdict);
        d["beta"] = rep.beta;
        d["p"] = inst.tuning.p;
        d["q"] = inst.tuning.q;
        d["prime_site"] = rep.ensemble.prime_site;
        return d;
      },
      py::arg("program"), py::arg("x") = py::none(), py::arg("N") = 8, py::arg("alpha") = "1/4",
      py::arg("ensemble") = "mc", py::arg("E") = py::none(), py::arg("w") = 1.0);

  m.def("path_spectrum", [](int T) { return eigensystem_path(T).eigenvalues; }, py::arg("T"));
  m.def("cycle_spectrum", [](int T) { return eigensystem_cycle(T).eigenvalues; }, py::arg("T"));
  m.def("min_gap_path", [](int T) { return min_gap_path(T).min_gap; }, py::arg("T"));
  m.def(
      "closed_form_halting",
      [](const py::object& alpha, int T_h, int N) { return closed_form_halting(to_rational(alpha), T_h, N); },
      py::arg("alpha"), py::arg("T_h"), py::arg("N"));

  m.def("microcanonical_weights", [](const Eigen::VectorXd& eigs, double E, double w) {
    return microcanonical_weights(eigs, {E, w}).weights;
  });
  m.def("gibbs_weights", [](const Eigen::VectorXd& eigs, double beta) { return gibbs_weights(eigs, {beta}).weights; });
  m.def("solve_beta", [](const Eigen::VectorXd& eigs, double E) { return solve_beta(eigs, E); });
  m.def(
      "tune_p",
      [](double A_hat, const py::object& alpha, double delta) {
        const auto r = tune_p(A_hat, to_rational(alpha), delta);
        return py::make_tuple(r.p, r.q, r.residual);
      },
      py::arg("A_hat"), py::arg("alpha"), py::arg("delta") = 0.0);

  py::class_<CertifiedPolynomial>(m, "Polynomial")
      .def_readonly("chebyshev", &CertifiedPolynomial::cheb)
      .def_readonly("target", &CertifiedPolynomial::target)
      .def_readonly("eps", &CertifiedPolynomial::eps)
      .def_readonly("grid_error", &CertifiedPolynomial::grid_error)
      .def_readonly("scale", &CertifiedPolynomial::scale)
      .def_property_readonly("degree", &CertifiedPolynomial::degree)
      .def("__call__", [](const CertifiedPolynomial& p, double x) { return evaluate(p, x); })
      .def("rescale_half", [](const CertifiedPolynomial& p) { return rescale_half(p); });
  m.def("sqrt_poly", &sqrt_poly, py::arg("eps"));
  m.def("gaussian_poly", &gaussian_poly, py::arg("w_over_alpha"), py::arg("eps"));

  m.def(
      "prepare_microcanonical",
      [](const Eigen::MatrixXcd& H, double E, double w, double eps) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
        const double alpha = es.eigenvalues().cwiseAbs().maxCoeff() + std::abs(E);
        const auto r = prepare_microcanonical(H, E, w, make_prep_schedule(eps, alpha, w));
        py::dict d;
        d["rho"] = r.rho;
        d["trace_distance"] = r.trace_distance;
        d["success_prob"] = r.success_prob;
        d["floor"] = r.floor;
        d["degree"] = r.degree;
        return d;
      },
      py::arg("H"), py::arg("E"), py::arg("w"), py::arg("eps"));

  m.def(
      "estimate_long_time_average",
      [](const std::string& program, const std::optional<std::string>& x, int N, const py::object& alpha, double eps,
         std::int64_t shots, std::uint64_t seed) {
        const TuringProgram p = program_from(program);
        const std::string in = x.value_or(program.find('\n') == std::string::npos ? corpus_entry(program).input : "");
        const auto inst = build_hardness_instance(p, in, N, to_rational(alpha), false);
        LTAOptions o;
        o.eps = eps;
        o.d = inst.basis.d();
        o.N = N;
        o.promise_gap = inst.gap.min_gap;
        o.shots = shots;
        o.seed = seed;
        const auto r = estimate_long_time_average(inst.heff.matrix, inst.observable(), inst.initial_state(), o);
        return py::make_tuple(r.gamma, infinite_time_average_spectral(inst.sd, inst.observable()));
      },
      py::arg("program"), py::arg("x") = py::none(), py::arg("N") = 8, py::arg("alpha") = "1/2",
      py::arg("eps") = 0.0625, py::arg("shots") = -1, py::arg("seed") = 0,
      "Returns (estimate, exact relaxation value).");
}
