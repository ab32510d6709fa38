#include "thermo/harness.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numbers>
#include <ostream>

#include "thermo/corpus.hpp"

namespace thermo {

std::string to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::Yes: return "YES";
    case VerdictKind::No: return "NO";
    case VerdictKind::PromiseViolated: return "PROMISE_VIOLATED";
  }
  return "?";
}

int exit_code(VerdictKind v) {
  switch (v) {
    case VerdictKind::Yes: return 0;
    case VerdictKind::No: return 1;
    case VerdictKind::PromiseViolated: return 2;
  }
  return 3;
}

std::string to_string(Method m) { return m == Method::Exact ? "EXACT" : "QSIM"; }

Method parse_method(const std::string& s) {
  if (s == "EXACT" || s == "exact") return Method::Exact;
  if (s == "QSIM" || s == "qsim") return Method::Qsim;
  throw InvalidArgument("unknown method " + s);
}

double Verdict::margin() const { return std::abs(value - target); }

Verdict classify(double value, double target, double eps, double c, double slack) {
  if (!(eps > 0) || !(c > 1)) throw InvalidArgument("need eps > 0 and c > 1");
  Verdict v;
  v.value = value;
  v.target = target;
  v.eps = eps;
  v.c = c;
  v.slack = slack;
  const double m = std::abs(value - target);
  if (m <= eps + slack)
    v.kind = VerdictKind::Yes;
  else if (m >= c * eps - slack)
    v.kind = VerdictKind::No;
  else
    v.kind = VerdictKind::PromiseViolated;
  return v;
}

Eigen::VectorXd FSRelaxInstance::initial_state() const {
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(orbit.T);
  psi(orbit.initial_index) = 1.0;
  return psi;
}

namespace {

GapReport orbit_gap(const Orbit& o, const SpectralDecomposition& sd) {
  if (o.kind == OrbitKind::Path && o.T >= 2) return min_gap_path(o.T);
  GapReport g;
  g.lower_bound = std::pow(std::numbers::pi, 2) / (4.0 * std::pow(o.T + 1.0, 2));
  g.min_gap = o.T >= 2 ? min_distinct_gap(sd.eigenvalues) : INFINITY;
  g.certified = g.min_gap >= g.lower_bound;
  return g;
}

}  // namespace

FSRelaxInstance build_hardness_instance(const TuringProgram& tm1, const std::string& x, int N,
                                        const Rational& alpha, bool padded, const InstanceOptions& opt) {
  FSRelaxInstance inst;
  inst.name = tm1.name;
  inst.program = tm1;
  inst.tm = padded ? build_padded_machine(tm1) : build_composite_machine(tm1);
  inst.basis = site_basis(inst.tm);
  inst.input = x;
  inst.N = N;
  inst.alpha = alpha;
  inst.padded = padded;
  inst.orbit = orbit(inst.tm, initial_configuration(inst.tm, x, N, alpha));
  inst.heff = effective_hamiltonian(inst.orbit);
  inst.sd = spectral_decomposition(inst.heff, inst.orbit.initial_index);
  inst.A_a2 = observable_in_orbit(a2_projector(inst.tm, inst.basis), orbit_values(inst.basis, inst.orbit));
  inst.eps = opt.eps.value_or((1.0 - alpha.value()) / 8.0);
  inst.c = opt.c;
  inst.gap = orbit_gap(inst.orbit, inst.sd);
  // Target: the halting closed form. A looping orbit has no halting time, so
  // it gets the T_h -> infinity limit of the same expression.
  const bool halts = inst.orbit.kind == OrbitKind::Path && inst.orbit.T_h >= 0;
  if (padded) {
    inst.A_star = halts ? closed_form_halting_padded(alpha, inst.orbit.T_h, N).value
                        : (1.0 - alpha.value()) * (1.0 - 1.0 / (N + 2.0));
  } else {
    inst.A_star = halts ? closed_form_halting(alpha, inst.orbit.T_h, N) : (1.0 - alpha.value()) / 2.0;
  }
  return inst;
}

namespace {

struct RelaxValues {
  double exact = 0.0;
  std::vector<double> estimates;  // one per seed in QSIM mode
  double slack = 0.0;
};

RelaxValues relax_values(const FSRelaxInstance& inst, Method method, const QsimOptions& q) {
  RelaxValues r;
  const Eigen::MatrixXd A = inst.observable();
  r.exact = infinite_time_average_spectral(inst.sd, A);
  if (method == Method::Exact) return r;
  if (!inst.gap.certified && !(inst.gap.min_gap > 0 && std::isfinite(inst.gap.min_gap)))
    throw PromiseUnknown("eigenvalue gap not certified");
  LTAOptions o;
  o.eps = (inst.c - 1.0) * inst.eps / 4.0;
  o.d = inst.basis.d();
  o.N = inst.N;
  o.promise_gap = std::isfinite(inst.gap.min_gap) ? inst.gap.min_gap : 1.0;
  o.shots = q.shots;
  r.slack = o.eps;
  const Eigen::MatrixXd H = inst.heff.matrix;
  const Eigen::VectorXd psi = inst.initial_state();
  for (int s = 0; s < std::max(1, q.seeds); ++s) {
    o.seed = q.seed + static_cast<std::uint64_t>(s);
    r.estimates.push_back(estimate_long_time_average(H, A, psi, o).gamma);
  }
  return r;
}

struct Decision {
  Verdict verdict;
  std::vector<VerdictKind> votes;
};

Decision decide_against(const FSRelaxInstance& inst, const RelaxValues& rv, Method method, double target) {
  Decision d;
  if (method == Method::Exact) {
    d.verdict = classify(rv.exact, target, inst.eps, inst.c);
    return d;
  }
  std::map<VerdictKind, int> count;
  for (double g : rv.estimates) {
    const VerdictKind k = classify(g, target, inst.eps, inst.c, rv.slack).kind;
    d.votes.push_back(k);
    ++count[k];
  }
  VerdictKind best = VerdictKind::PromiseViolated;
  int most = -1;
  for (const auto& [k, n] : count)
    if (n > most) {
      best = k;
      most = n;
    }
  if (best == VerdictKind::PromiseViolated)
    throw PromiseUnknown("estimate lies between eps + eps' and c eps - eps'");
  std::vector<double> sorted = rv.estimates;
  std::sort(sorted.begin(), sorted.end());
  d.verdict = classify(sorted[sorted.size() / 2], target, inst.eps, inst.c, rv.slack);
  d.verdict.kind = best;
  return d;
}

}  // namespace

RelaxReport decide_fsrelax(const FSRelaxInstance& inst, Method method, const QsimOptions& q) {
  const RelaxValues rv = relax_values(inst, method, q);
  const Decision d = decide_against(inst, rv, method, inst.A_star);
  RelaxReport rep;
  rep.verdict = d.verdict;
  rep.votes = d.votes;
  rep.method = method;
  rep.exact_value = rv.exact;
  return rep;
}

namespace {

EnsembleWeights ensemble_weights(const FSThermInstance& inst, double* beta) {
  if (inst.ensemble == EnsembleKind::Microcanonical) {
    if (!(inst.w > 0)) throw InvalidArgument("microcanonical width must be positive");
    return microcanonical_weights(inst.levels.eigenvalues, {inst.E, inst.w});
  }
  const double b = solve_beta(inst.levels.eigenvalues, inst.E);
  if (beta) *beta = b;
  return gibbs_weights(inst.levels.eigenvalues, {b});
}

}  // namespace

FSThermInstance build_tuned_instance(const TuringProgram& tm1, const std::string& x, int N,
                                     const Rational& alpha, const TunedOptions& opt) {
  FSThermInstance inst;
  inst.base = build_hardness_instance(tm1, x, N, alpha, true, opt.instance);
  inst.ensemble = opt.ensemble;
  inst.w = opt.w;
  const FSRelaxInstance& b = inst.base;
  inst.E = opt.E.value_or(b.heff.matrix(b.orbit.initial_index, b.orbit.initial_index));
  inst.levels = tuned_sector_levels(b.tm, N, alpha);
  const EnsembleWeights w = ensemble_weights(inst, nullptr);
  double a2_site = level_expectation(inst.levels, "a2_site0", w);
  if (opt.source == EstimateSource::Sampled) {
    if (inst.ensemble != EnsembleKind::Microcanonical)
      throw InvalidArgument("sampled estimates are available for the microcanonical ensemble only");
    PrepOptions po;
    po.prep_tries = opt.prep_tries;
    // tr(|a2><a2|_1 rho) enters the tuned target with weight p/2 < 1, so an
    // estimate to eps/4 keeps the halting branch inside eps.
    a2_site = estimate_mc_projector(inst.levels.eigenvalues, inst.levels.expectations.at("a2_site0"), inst.E,
                                    inst.w, b.eps / 4.0, opt.seed, po)
                  .estimate;
  }
  const bool halts = b.orbit.kind == OrbitKind::Path && b.orbit.T_h >= 0;
  const double delta = halts ? closed_form_halting_padded(alpha, b.orbit.T_h, N).exact_delta : 0.0;
  inst.tuning = tune_p(2.0 * a2_site, alpha, delta, opt.source);
  inst.base.p = inst.tuning.p;
  inst.base.q = inst.tuning.q;
  return inst;
}

ThermReport decide_fstherm(const FSThermInstance& inst, Method method, const QsimOptions& q) {
  ThermReport rep;
  const EnsembleWeights w = ensemble_weights(inst, &rep.beta);
  rep.ensemble = tuned_ensemble_expectation(inst.levels, inst.tuning.p, inst.tuning.q, w);
  // The initial state lives in the unprimed copy, where the primed density vanishes.
  const RelaxValues rv = relax_values(inst.base, method, q);
  rep.verdict = decide_against(inst.base, rv, method, rep.ensemble.value).verdict;
  return rep;
}

double ftfs_tau_threshold(const FSRelaxInstance& inst) {
  const double A_norm = coherence_weight(inst.sd, inst.observable());
  const double allowed = (inst.c - 1.0) * inst.eps / 2.0;
  // finite_time_bound(T, tau, A) = A 2 (T+1)^2 / (pi^2 tau)
  return A_norm * 2.0 * std::pow(inst.orbit.T + 1.0, 2) / (std::pow(std::numbers::pi, 2) * allowed);
}

FiniteTimeReport decide_ftfsrelax(const FSRelaxInstance& inst, double tau) {
  if (!(tau > 0)) throw InvalidArgument("tau must be positive");
  FiniteTimeReport r;
  r.tau = tau;
  r.tau_min = ftfs_tau_threshold(inst);
  const Eigen::MatrixXd A = inst.observable();
  const double A_norm = coherence_weight(inst.sd, A);
  r.bound = finite_time_bound(inst.orbit.T, tau, A_norm);
  if (!(r.bound < (inst.c - 1.0) * inst.eps / 2.0))
    throw TauTooSmall("tau = " + std::to_string(tau) + " is below " + std::to_string(r.tau_min));
  r.verdict = classify(finite_time_average(inst.sd, A, tau), inst.A_star, inst.eps, inst.c, r.bound);
  return r;
}

std::vector<CorpusRow> run_corpus(const CorpusOptions& opt) {
  std::vector<std::future<CorpusRow>> jobs;
  for (const CorpusEntry& e : corpus()) {
    jobs.push_back(std::async(std::launch::async, [e, opt]() {
      CorpusRow row;
      row.id = e.id;
      row.halts = e.halts;
      row.N = opt.N;
      row.alpha = opt.alpha;
      row.padded = opt.padded;
      try {
        const FSRelaxInstance inst =
            build_hardness_instance(corpus_program(e.id), e.input, opt.N, opt.alpha, opt.padded, opt.instance);
        row.T = inst.orbit.T;
        row.T_h = inst.orbit.T_h;
        row.A_star = inst.A_star;
        const RelaxReport ex = decide_fsrelax(inst, Method::Exact);
        row.value = ex.exact_value;
        row.exact = ex.verdict.kind;
        if (opt.qsim_seeds > 0) {
          QsimOptions q;
          q.seed = opt.seed;
          q.shots = opt.shots;
          q.seeds = opt.qsim_seeds;
          try {
            const RelaxReport qs = decide_fsrelax(inst, Method::Qsim, q);
            row.qsim = qs.verdict.kind;
            for (VerdictKind v : qs.votes) row.qsim_agree += v == row.exact ? 1 : 0;
            row.qsim_seeds = static_cast<int>(qs.votes.size());
          } catch (const PromiseUnknown& err) {
            row.error = err.what();
          }
        }
      } catch (const Error& err) {
        row.error = err.what();
      }
      return row;
    }));
  }
  std::vector<CorpusRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

void write_corpus_csv(const std::vector<CorpusRow>& rows, std::ostream& out) {
  out << "id,halts,N,alpha,padded,T,T_h,value,A_star,exact,qsim,qsim_agree,qsim_seeds,error\n";
  for (const auto& r : rows) {
    out << r.id << ',' << (r.halts ? 1 : 0) << ',' << r.N << ',' << r.alpha.str() << ',' << (r.padded ? 1 : 0)
        << ',' << r.T << ',' << r.T_h << ',' << r.value << ',' << r.A_star << ',' << to_string(r.exact) << ','
        << (r.qsim_seeds > 0 ? to_string(r.qsim) : std::string("-")) << ',' << r.qsim_agree << ','
        << r.qsim_seeds << ",\"" << r.error << "\"\n";
  }
}

std::vector<AverageReport> sweep_tau(const FSRelaxInstance& inst, const std::vector<double>& taus) {
  const Eigen::MatrixXd A = inst.observable();
  const double A_norm = coherence_weight(inst.sd, A);
  std::vector<AverageReport> out;
  for (double tau : taus) {
    AverageReport r;
    r.instance = inst.name;
    r.method = AverageMethod::FiniteTime;
    r.tau = tau;
    r.value = finite_time_average(inst.sd, A, tau);
    r.bound = finite_time_bound(inst.orbit.T, tau, A_norm);
    out.push_back(r);
  }
  return out;
}

namespace {

EnsembleSweepRow sweep_point(const FSThermInstance& inst, double E, double w) {
  const EnsembleWeights ew = microcanonical_weights(inst.levels.eigenvalues, {E, w});
  const TunedExpectation t = tuned_ensemble_expectation(inst.levels, inst.tuning.p, inst.tuning.q, ew);
  return {E, w, t.value, t.a2_site, t.prime_site};
}

}  // namespace

std::vector<EnsembleSweepRow> sweep_w(const FSThermInstance& inst, const std::vector<double>& ws) {
  std::vector<EnsembleSweepRow> out;
  for (double w : ws) out.push_back(sweep_point(inst, inst.E, w));
  return out;
}

std::vector<EnsembleSweepRow> sweep_E(const FSThermInstance& inst, const std::vector<double>& Es) {
  std::vector<EnsembleSweepRow> out;
  for (double E : Es) out.push_back(sweep_point(inst, E, inst.w));
  return out;
}

}  // namespace thermo
