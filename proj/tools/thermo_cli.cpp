// Command line front end. Exit codes: 0 YES, 1 NO, 2 PROMISE_VIOLATED,
// 3 library error, 4 unexpected failure; CLI11 parse errors keep their own
// codes (all above 2).

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>

#include "thermo/corpus.hpp"
#include "thermo/harness.hpp"

using namespace thermo;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::int64_t shots = -1;
  double eps = -1.0;  // negative: default (1 - alpha)/8
  double c = 2.0;
  int seeds = 1;
  std::int64_t max_steps = 0;
  double prep_tries = 1e30;
  std::string out_dir = ".";
};

struct InstanceArgs {
  std::string program_file;
  std::string corpus_id;
  std::string input;
  bool input_set = false;
  int N = 8;
  std::string alpha = "1/4";
  bool padded = false;
};

void add_instance_flags(CLI::App* app, InstanceArgs& a) {
  auto* g = app->add_option_group("machine");
  g->add_option("--program", a.program_file, "Turing machine file (.tm)");
  g->add_option("--corpus", a.corpus_id, "built-in corpus entry");
  g->require_option(1);
  app->add_option("--input,-x", a.input, "input string")->each([&](const std::string&) { a.input_set = true; });
  app->add_option("--N", a.N, "ring length")->check(CLI::PositiveNumber);
  app->add_option("--alpha", a.alpha, "fraction of M cells, as p/q");
}

TuringProgram program_of(const InstanceArgs& a) {
  return a.program_file.empty() ? corpus_program(a.corpus_id) : load_program(a.program_file);
}

std::string input_of(const InstanceArgs& a) {
  if (a.input_set || a.corpus_id.empty()) return a.input;
  return corpus_entry(a.corpus_id).input;
}

InstanceOptions instance_options(const Globals& g) {
  InstanceOptions o;
  if (g.eps > 0) o.eps = g.eps;
  o.c = g.c;
  return o;
}

std::ofstream open_out(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  const fs::path p = fs::path(g.out_dir) / name;
  std::ofstream out(p);
  if (!out) throw InvalidArgument("cannot write " + p.string());
  return out;
}

void print_verdict(const Verdict& v) {
  std::cout << std::setprecision(12) << "verdict " << to_string(v.kind) << "\nvalue " << v.value << "\ntarget "
            << v.target << "\nmargin " << v.margin() << "\neps " << v.eps << "\nc " << v.c << "\nslack " << v.slack
            << "\n";
}

std::vector<double> grid(double from, double to, int points, bool log_spaced) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : double(i) / (points - 1);
    g.push_back(log_spaced ? from * std::pow(to / from, t) : from + (to - from) * t);
  }
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermalization and relaxation of Turing-machine Hamiltonians"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--shots", g.shots, "sampled shots (-1 schedule default, 0 exact probabilities)");
  app.add_option("--eps", g.eps, "promise tolerance eps (default (1-alpha)/8)");
  app.add_option("--c", g.c, "promise gap factor c > 1");
  app.add_option("--seeds", g.seeds, "seeds for QSIM votes (an odd count avoids ties)");
  app.add_option("--max-steps", g.max_steps, "orbit enumeration cap (0 derives from d^N)");
  app.add_option("--prep-tries", g.prep_tries, "worst-case postselection tries accepted");
  app.add_option("--out-dir", g.out_dir, "directory for exported files");

  InstanceArgs ia;
  std::string machine = "composite";
  std::string method = "EXACT";
  std::optional<double> target;

  auto* compile = app.add_subcommand("compile", "export the local Hamiltonian of a machine");
  add_instance_flags(compile, ia);
  compile->add_option("--machine", machine, "raw | composite | padded | tuned")
      ->check(CLI::IsMember({"raw", "composite", "padded", "tuned"}));

  auto* orb = app.add_subcommand("orbit", "enumerate the orbit of the initial configuration");
  add_instance_flags(orb, ia);
  orb->add_flag("--padded", ia.padded, "use the padded machine");

  auto* relax = app.add_subcommand("relax", "decide relaxation to the halting value");
  add_instance_flags(relax, ia);
  relax->add_flag("--padded", ia.padded, "use the padded machine");
  relax->add_option("--method", method, "EXACT | QSIM");
  relax->add_option("--target", target, "override the target value");

  std::string ensemble = "mc";
  std::optional<double> E;
  double w = 1.0;
  std::string source = "exact";
  auto* therm = app.add_subcommand("therm", "decide thermalization of the tuned construction");
  add_instance_flags(therm, ia);
  therm->add_option("--ensemble", ensemble, "mc | gibbs")->check(CLI::IsMember({"mc", "gibbs"}));
  therm->add_option("--E", E, "energy (default <psi0|H|psi0>)");
  therm->add_option("--w", w, "microcanonical width");
  therm->add_option("--source", source, "exact | sampled")->check(CLI::IsMember({"exact", "sampled"}));
  therm->add_option("--method", method, "EXACT | QSIM");

  auto* tune = app.add_subcommand("tune", "compute the tuned observable coefficients");
  add_instance_flags(tune, ia);
  tune->add_option("--E", E, "energy");
  tune->add_option("--w", w, "microcanonical width");
  tune->add_option("--source", source, "exact | sampled")->check(CLI::IsMember({"exact", "sampled"}));

  std::string kind = "sqrt";
  double peps = 1e-4, width = 1.0;
  bool rescale = false;
  auto* poly = app.add_subcommand("poly", "build and certify a polynomial approximation");
  poly->add_option("--kind", kind, "sqrt | gaussian")->check(CLI::IsMember({"sqrt", "gaussian"}));
  poly->add_option("--poly-eps", peps, "sup-norm accuracy");
  poly->add_option("--width", width, "w/alpha for the Gaussian");
  poly->add_flag("--rescale", rescale, "scale so that sup|p| <= 1/2");

  int qubits = 2;
  double w_frac = 0.5, qeps = 0.05, qE = 0.0;
  auto* qprep = app.add_subcommand("qprep", "microcanonical state preparation report on a random Hamiltonian");
  qprep->add_option("--qubits", qubits)->check(CLI::Range(1, 6));
  qprep->add_option("--w-frac", w_frac, "w as a fraction of ||H||");
  qprep->add_option("--prep-eps", qeps, "target trace distance");
  qprep->add_option("--E", qE, "window centre");

  std::string sweep_kind = "tau";
  double from = 10, to = 1e4;
  int points = 16;
  auto* sweep = app.add_subcommand("sweep", "grid sweeps written as CSV");
  add_instance_flags(sweep, ia);
  sweep->add_option("--kind", sweep_kind, "tau | w | E")->check(CLI::IsMember({"tau", "w", "E"}));
  sweep->add_option("--from", from);
  sweep->add_option("--to", to);
  sweep->add_option("--points", points)->check(CLI::PositiveNumber);
  sweep->add_flag("--padded", ia.padded, "use the padded machine (tau sweeps)");

  int qsim_seeds = 0;
  bool export_programs = false;
  auto* corp = app.add_subcommand("corpus", "run the built-in corpus");
  corp->add_option("--N", ia.N, "ring length");
  corp->add_option("--alpha", ia.alpha, "fraction of M cells");
  corp->add_flag("--padded", ia.padded, "use the padded machine");
  corp->add_option("--qsim-seeds", qsim_seeds, "seeds for the estimator (0 skips it)");
  corp->add_flag("--export", export_programs, "write every corpus program as <id>.tm and stop");

  CLI11_PARSE(app, argc, argv);

  try {
    const Rational alpha = Rational::parse(ia.alpha);
    if (*compile) {
      const TuringProgram prog = program_of(ia);
      LocalHamiltonian h;
      if (machine == "raw") {
        h = compile_hamiltonian(compile_program(prog), ia.N);
      } else {
        const ReversibleTM tm = machine == "composite" ? build_composite_machine(prog) : build_padded_machine(prog);
        h = compile_hamiltonian(tm, ia.N);
        if (machine == "tuned") h = build_tuned_hamiltonian(h).h;
      }
      auto out = open_out(g, prog.name + "_" + machine + ".ham");
      write_hamiltonian(h, out);
      std::cout << "machine " << machine << "\nN " << h.N << "\nd " << h.d << "\nbond_terms " << h.terms.size()
                << "\n";
      return 0;
    }
    if (*orb) {
      const TuringProgram prog = program_of(ia);
      const ReversibleTM tm = ia.padded ? build_padded_machine(prog) : build_composite_machine(prog);
      const Orbit o = orbit(tm, initial_configuration(tm, input_of(ia), ia.N, alpha), g.max_steps);
      auto out = open_out(g, prog.name + "_orbit.txt");
      dump_orbit(tm, o, out);
      std::cout << "kind " << (o.kind == OrbitKind::Path ? "PATH" : "CYCLE") << "\nT " << o.T << "\nT_h " << o.T_h
                << "\ninitial_index " << o.initial_index << "\n";
      return 0;
    }
    if (*relax) {
      FSRelaxInstance inst =
          build_hardness_instance(program_of(ia), input_of(ia), ia.N, alpha, ia.padded, instance_options(g));
      if (target) inst.A_star = *target;
      QsimOptions q{g.seed, g.shots, g.seeds};
      const RelaxReport rep = decide_fsrelax(inst, parse_method(method), q);
      print_verdict(rep.verdict);
      std::cout << "method " << to_string(rep.method) << "\nT " << inst.orbit.T << "\nmin_gap "
                << inst.gap.min_gap << "\n";
      auto out = open_out(g, inst.name + "_relax.csv");
      write_csv_header(out);
      write_csv_row({inst.name, AverageMethod::Spectral, 0.0, rep.exact_value, 0.0}, out);
      if (inst.orbit.kind == OrbitKind::Path && inst.orbit.initial_index == 0)
        write_csv_row({inst.name, AverageMethod::Structural, 0.0,
                       infinite_time_average_structural(inst.orbit, inst.observable()), 0.0},
                      out);
      write_csv_row({inst.name, AverageMethod::ClosedForm, 0.0, inst.A_star, 0.0}, out);
      return exit_code(rep.verdict.kind);
    }
    if (*therm || *tune) {
      TunedOptions to;
      to.instance = instance_options(g);
      to.ensemble = ensemble == "gibbs" ? EnsembleKind::Gibbs : EnsembleKind::Microcanonical;
      to.E = E;
      to.w = w;
      to.source = source == "sampled" ? EstimateSource::Sampled : EstimateSource::ExactTrace;
      to.seed = g.seed;
      to.prep_tries = g.prep_tries;
      const FSThermInstance inst = build_tuned_instance(program_of(ia), input_of(ia), ia.N, alpha, to);
      std::cout << std::setprecision(12) << "p " << inst.tuning.p << "\nq " << inst.tuning.q << "\nA_hat "
                << inst.tuning.A_hat << "\nresidual " << inst.tuning.residual << "\nsource " << source << "\n";
      if (*tune) return 0;
      const ThermReport rep = decide_fstherm(inst, parse_method(method), {g.seed, g.shots, g.seeds});
      print_verdict(rep.verdict);
      std::cout << "beta " << rep.beta << "\nprime_site " << rep.ensemble.prime_site << "\nidentity_gap "
                << rep.ensemble.identity_gap << "\n";
      return exit_code(rep.verdict.kind);
    }
    if (*poly) {
      CertifiedPolynomial p = kind == "sqrt" ? sqrt_poly(peps) : gaussian_poly(width, peps);
      if (rescale) p = rescale_half(p);
      auto out = open_out(g, kind + "_poly.txt");
      write_polynomial(p, out);
      std::cout << std::setprecision(6) << "degree " << p.degree() << "\neps " << p.eps << "\ngrid_error "
                << p.grid_error << "\nscale " << p.scale << "\n";
      return 0;
    }
    if (*qprep) {
      const Eigen::Index n = Eigen::Index{1} << qubits;
      std::mt19937_64 rng(g.seed);
      std::normal_distribution<double> nd;
      Eigen::MatrixXcd G(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) G(i, j) = {nd(rng), nd(rng)};
      const Eigen::MatrixXcd H = (G + G.adjoint()) / 2.0;
      const double norm = Eigen::JacobiSVD<Eigen::MatrixXcd>(H).singularValues()(0);
      const double ww = w_frac * norm;
      PrepOptions po;
      po.prep_tries = g.prep_tries;
      const PrepResult r =
          prepare_microcanonical(H, qE, ww, make_prep_schedule(qeps, norm + std::abs(qE), ww), po);
      std::cout << std::setprecision(8) << "dimension " << n << "\nnorm " << norm << "\nw " << ww << "\ndegree "
                << r.degree << "\ntrace_distance " << r.trace_distance << "\nbound " << r.bound
                << "\nsuccess_prob " << r.success_prob << "\nexpected_tries " << r.expected_tries << "\nfloor "
                << r.floor << "\neta " << r.schedule.eta << "\ndelta " << r.schedule.delta << "\n";
      return r.trace_distance <= qeps ? 0 : 1;
    }
    if (*sweep) {
      const TuringProgram prog = program_of(ia);
      auto out = open_out(g, prog.name + "_sweep_" + sweep_kind + ".csv");
      out << std::setprecision(12);
      if (sweep_kind == "tau") {
        const FSRelaxInstance inst =
            build_hardness_instance(prog, input_of(ia), ia.N, alpha, ia.padded, instance_options(g));
        write_csv_header(out);
        for (const auto& r : sweep_tau(inst, grid(from, to, points, true))) write_csv_row(r, out);
      } else {
        TunedOptions topt;
        topt.instance = instance_options(g);
        const FSThermInstance inst = build_tuned_instance(prog, input_of(ia), ia.N, alpha, topt);
        const auto rows = sweep_kind == "w" ? sweep_w(inst, grid(from, to, points, true))
                                            : sweep_E(inst, grid(from, to, points, false));
        out << "E,w,target,a2_site,prime_site\n";
        for (const auto& r : rows)
          out << r.E << ',' << r.w << ',' << r.target << ',' << r.a2_site << ',' << r.prime_site << '\n';
      }
      std::cout << "points " << points << "\n";
      return 0;
    }
    if (*corp) {
      if (export_programs) {
        for (const auto& e : corpus()) {
          auto out = open_out(g, e.id + ".tm");
          write_program(corpus_program(e.id), out);
        }
        return 0;
      }
      CorpusOptions co;
      co.N = ia.N;
      co.alpha = alpha;
      co.padded = ia.padded;
      co.qsim_seeds = qsim_seeds;
      co.seed = g.seed;
      co.shots = g.shots;
      co.instance = instance_options(g);
      const auto rows = run_corpus(co);
      auto out = open_out(g, "corpus.csv");
      write_corpus_csv(rows, out);
      write_corpus_csv(rows, std::cout);
      bool ok = true;
      for (const auto& r : rows)
        ok = ok && r.error.empty() && r.exact == (r.halts ? VerdictKind::Yes : VerdictKind::No);
      return ok ? 0 : 3;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << e.kind() << "] " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error " << e.what() << "\n";
    return 4;
  }
  return 4;
}
