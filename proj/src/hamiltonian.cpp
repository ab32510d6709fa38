#include "thermo/hamiltonian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace thermo {

namespace {

constexpr double kPi = std::numbers::pi;

std::int64_t checked_power(int d, int N, std::int64_t cap) {
  std::int64_t D = 1;
  for (int i = 0; i < N; ++i) {
    if (D > cap / std::max(d, 1)) return cap + 1;
    D *= d;
  }
  return D;
}

}  // namespace

int SiteBasis::of(const Site& s) const {
  auto it = index.find(s);
  if (it == index.end()) throw MalformedConfig("site value outside the local basis");
  return it->second;
}

SiteBasis site_basis(const ReversibleTM& tm) {
  SiteBasis b;
  auto add = [&](const Site& s) {
    if (b.index.emplace(s, static_cast<int>(b.values.size())).second) b.values.push_back(s);
  };
  for (std::size_t s = 0; s < tm.symbols.size(); ++s) add(Site{-1, static_cast<int>(s)});
  for (const Rule& r : tm.rules)
    for (int k = 0; k < r.width; ++k) {
      if (r.lhs[k].has_head()) add(r.lhs[k]);
      if (r.rhs[k].has_head()) add(r.rhs[k]);
    }
  if (tm.initial_state >= 0)
    for (std::size_t s = 0; s < tm.symbols.size(); ++s)
      if (tm.symbols[s].kind == CellKind::M && !tm.symbols[s].marked)
        add(Site{tm.initial_state, static_cast<int>(s)});
  return b;
}

Eigen::SparseMatrix<double> bond_operator(const ReversibleTM& tm, const SiteBasis& basis) {
  const int d = basis.d();
  std::vector<Eigen::Triplet<double>> trip;
  auto link = [&](int from, int to) {
    trip.emplace_back(to, from, 1.0);
    trip.emplace_back(from, to, 1.0);
  };
  for (const Rule& r : tm.rules) {
    if (r.width == 2) {
      link(basis.of(r.lhs[0]) * d + basis.of(r.lhs[1]), basis.of(r.rhs[0]) * d + basis.of(r.rhs[1]));
    } else {
      // A one-site rule acts on the left site of each bond; every site is the
      // left end of exactly one bond.
      const int a = basis.of(r.lhs[0]), c = basis.of(r.rhs[0]);
      for (int b = 0; b < d; ++b) link(a * d + b, c * d + b);
    }
  }
  Eigen::SparseMatrix<double> op(d * d, d * d);
  op.setFromTriplets(trip.begin(), trip.end());
  return op;
}

LocalHamiltonian compile_hamiltonian(const ReversibleTM& tm, const SiteBasis& basis, int N) {
  if (N < 2) throw InvalidArgument("ring needs at least two sites");
  auto diags = validate_reversibility(tm);
  if (has_errors(diags)) throw NotReversible(diags.front().message);
  LocalHamiltonian h;
  h.N = N;
  h.d = basis.d();
  for (const Site& s : basis.values) h.basis_names.push_back(tm.site_name(s));
  auto op = bond_operator(tm, basis);
  std::vector<TermEntry> entries;
  for (int k = 0; k < op.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op, k); it; ++it)
      entries.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
  for (int i = 0; i < N; ++i) h.terms.push_back({i, (i + 1) % N, entries});
  return h;
}

LocalHamiltonian compile_hamiltonian(const ReversibleTM& tm, int N) {
  return compile_hamiltonian(tm, site_basis(tm), N);
}

std::int64_t config_index(const SiteBasis& basis, const TMConfig& c) {
  std::int64_t idx = 0, mult = 1;
  for (int i = 0; i < c.N(); ++i) {
    idx += mult * basis.of(c.cells[i]);
    mult *= basis.d();
  }
  return idx;
}

Eigen::SparseMatrix<double> sparse_hamiltonian(const LocalHamiltonian& h) {
  constexpr std::int64_t kCap = 8'000'000;
  const std::int64_t D = checked_power(h.d, h.N, kCap);
  if (D > kCap) throw BudgetExceeded("d^N too large for a sparse assembly");
  std::vector<std::int64_t> pow(h.N + 1, 1);
  for (int i = 1; i <= h.N; ++i) pow[i] = pow[i - 1] * h.d;
  std::vector<Eigen::Triplet<double>> trip;
  for (const BondTerm& t : h.terms) {
    std::unordered_map<int, std::vector<std::pair<int, double>>> by_col;
    for (const auto& e : t.entries) by_col[e.col].push_back({e.row, e.value});
    for (std::int64_t x = 0; x < D; ++x) {
      const int a = static_cast<int>((x / pow[t.left]) % h.d);
      const int b = static_cast<int>((x / pow[t.right]) % h.d);
      auto it = by_col.find(a * h.d + b);
      if (it == by_col.end()) continue;
      const std::int64_t rest = x - a * pow[t.left] - b * pow[t.right];
      for (const auto& [row, v] : it->second) {
        const int a2 = row / h.d, b2 = row % h.d;
        trip.emplace_back(rest + a2 * pow[t.left] + b2 * pow[t.right], x, v);
      }
    }
  }
  Eigen::SparseMatrix<double> H(D, D);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

Eigen::MatrixXd dense_hamiltonian(const LocalHamiltonian& h, std::int64_t budget) {
  if (h.N < 2) throw InvalidArgument("ring needs at least two sites");
  const std::int64_t D = checked_power(h.d, h.N, budget);
  if (D > budget)
    throw BudgetExceeded("d^N exceeds the dense budget of " + std::to_string(budget));
  Eigen::MatrixXd H = Eigen::MatrixXd(sparse_hamiltonian(h));
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw SymmetryViolation("assembled Hamiltonian is not symmetric");
  return H;
}

std::vector<std::int64_t> cyclic_shift_permutation(int N, int d) {
  const std::int64_t D = checked_power(d, N, std::int64_t{1} << 40);
  std::vector<std::int64_t> perm(D);
  std::int64_t top = D / d;
  for (std::int64_t x = 0; x < D; ++x) {
    // Site i moves to site i+1; the last site wraps to site 0.
    const std::int64_t last = x / top;
    perm[x] = (x % top) * d + last;
  }
  return perm;
}

EffectiveHamiltonian effective_hamiltonian(OrbitKind kind, int T) {
  if (T < 1) throw InvalidArgument("orbit must be nonempty");
  EffectiveHamiltonian e;
  e.T = T;
  e.kind = kind;
  e.matrix = Eigen::MatrixXd::Zero(T, T);
  for (int k = 0; k + 1 < T; ++k) {
    e.matrix(k, k + 1) += 1.0;
    e.matrix(k + 1, k) += 1.0;
  }
  if (kind == OrbitKind::Cycle && T >= 2) {
    e.matrix(T - 1, 0) += 1.0;
    e.matrix(0, T - 1) += 1.0;
  }
  return e;
}

EffectiveHamiltonian effective_hamiltonian(const Orbit& o) { return effective_hamiltonian(o.kind, o.T); }

Eigen::MatrixXd restrict_to_orbit(const Eigen::SparseMatrix<double>& H, const SiteBasis& basis,
                                  const Orbit& o) {
  std::unordered_map<std::int64_t, int> pos;
  std::vector<std::int64_t> idx(o.T);
  for (int k = 0; k < o.T; ++k) {
    idx[k] = config_index(basis, o.configs[k]);
    pos[idx[k]] = k;
  }
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(o.T, o.T);
  for (int k = 0; k < o.T; ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(H, idx[k]); it; ++it) {
      auto p = pos.find(it.row());
      if (p == pos.end())
        throw SymmetryViolation("Hamiltonian leaks out of the orbit subspace");
      R(p->second, k) += it.value();
    }
  return R;
}

SpectralDecomposition eigensystem_path(int T, int init) {
  if (T < 1) throw InvalidArgument("T must be positive");
  if (init < 0 || init >= T) throw InvalidArgument("initial index outside the orbit");
  SpectralDecomposition sd;
  sd.eigenvalues.resize(T);
  sd.eigenvectors.resize(T, T);
  const double norm = std::sqrt(2.0 / (T + 1));
  for (int j = 0; j < T; ++j) {
    sd.eigenvalues(j) = 2.0 * std::cos((j + 1) * kPi / (T + 1));
    for (int k = 0; k < T; ++k)
      sd.eigenvectors(k, j) = norm * std::sin(double(j + 1) * (k + 1) * kPi / (T + 1));
  }
  sd.coefficients = sd.eigenvectors.row(init).transpose();
  return sd;
}

SpectralDecomposition eigensystem_cycle(int T, int init) {
  if (T < 3) throw InvalidArgument("cycle spectra need T >= 3");
  if (init < 0 || init >= T) throw InvalidArgument("initial index outside the orbit");
  SpectralDecomposition sd;
  sd.eigenvalues.resize(T);
  sd.eigenvectors.resize(T, T);
  const double c = std::sqrt(2.0 / T);
  for (int j = 0; j < T; ++j) {
    sd.eigenvalues(j) = 2.0 * std::cos(2.0 * kPi * j / T);
    for (int k = 0; k < T; ++k) {
      double v;
      if (j == 0) {
        v = 1.0 / std::sqrt(double(T));
      } else if (2 * j == T) {
        v = (k % 2 == 0 ? 1.0 : -1.0) / std::sqrt(double(T));
      } else if (2 * j < T) {
        v = c * std::cos(2.0 * kPi * double(j) * k / T);
      } else {
        // Mode T-j shares the eigenvalue of mode j; take the sine partner.
        v = c * std::sin(2.0 * kPi * double(T - j) * k / T);
      }
      sd.eigenvectors(k, j) = v;
    }
  }
  sd.coefficients = sd.eigenvectors.row(init).transpose();
  return sd;
}

SpectralDecomposition eigensystem_dense(const Eigen::MatrixXd& H, const Eigen::VectorXd& psi0) {
  if (H.rows() != H.cols() || H.rows() != psi0.size())
    throw DimensionMismatch("Hamiltonian and initial vector sizes differ");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw InvalidArgument("eigensolver failed");
  SpectralDecomposition sd;
  sd.eigenvalues = es.eigenvalues();
  sd.eigenvectors = es.eigenvectors();
  for (int j = 0; j < sd.eigenvectors.cols(); ++j) {
    for (int k = 0; k < sd.eigenvectors.rows(); ++k) {
      const double v = sd.eigenvectors(k, j);
      if (std::abs(v) > 1e-12) {
        if (v < 0) sd.eigenvectors.col(j) *= -1.0;
        break;
      }
    }
  }
  sd.coefficients = sd.eigenvectors.transpose() * psi0;
  return sd;
}

SpectralDecomposition spectral_decomposition(const EffectiveHamiltonian& heff, int init) {
  if (heff.kind == OrbitKind::Path) return eigensystem_path(heff.T, init);
  if (heff.T >= 3) return eigensystem_cycle(heff.T, init);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(heff.T);
  e(init) = 1.0;
  return eigensystem_dense(heff.matrix, e);
}

GapReport min_gap_path(int T) {
  if (T < 2) throw InvalidArgument("a gap needs T >= 2");
  GapReport g;
  const double a = kPi / (2.0 * (T + 1));
  const double s = std::sin(a);
  g.min_gap = INFINITY;
  for (int j = 0; j + 1 < T; ++j) {
    const double gap = 4.0 * s * std::sin((2 * j + 3) * a);
    if (gap < g.min_gap) {
      g.min_gap = gap;
      g.argmin = j;
    }
  }
  g.lower_bound = kPi * kPi / (4.0 * (T + 1.0) * (T + 1.0));
  g.certified = g.min_gap >= g.lower_bound;
  return g;
}

double min_gap_brute_force(const Eigen::VectorXd& eigenvalues) {
  std::vector<double> v(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  std::sort(v.begin(), v.end());
  double m = INFINITY;
  for (std::size_t i = 1; i < v.size(); ++i) m = std::min(m, v[i] - v[i - 1]);
  return m;
}

double min_distinct_gap(const Eigen::VectorXd& eigenvalues, double tol) {
  std::vector<double> v(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  std::sort(v.begin(), v.end());
  double m = INFINITY;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] > tol) m = std::min(m, v[i] - v[i - 1]);
  return m;
}

TunedHamiltonian build_tuned_hamiltonian(const LocalHamiltonian& h) {
  TunedHamiltonian th;
  th.base_d = h.d;
  const int d = h.d, D = 2 * h.d;
  th.h.N = h.N;
  th.h.d = D;
  th.h.translation_invariant = h.translation_invariant;
  th.h.basis_names = h.basis_names;
  for (const auto& n : h.basis_names) th.h.basis_names.push_back(n + "'");
  for (const BondTerm& t : h.terms) {
    BondTerm u{t.left, t.right, {}};
    for (const auto& e : t.entries) {
      const int ra = e.row / d, rb = e.row % d, ca = e.col / d, cb = e.col % d;
      u.entries.push_back({ra * D + rb, ca * D + cb, e.value});
      u.entries.push_back({(ra + d) * D + rb + d, (ca + d) * D + cb + d, e.value});
    }
    th.h.terms.push_back(std::move(u));
  }
  th.F_site.resize(D, D);
  std::vector<Eigen::Triplet<double>> f;
  for (int v = 0; v < d; ++v) {
    f.emplace_back(v + d, v, 1.0);
    f.emplace_back(v, v + d, 1.0);
  }
  th.F_site.setFromTriplets(f.begin(), f.end());

  auto flip = [&](int pair) {
    const int a = pair / D, b = pair % D;
    return ((a + d) % D) * D + (b + d) % D;
  };
  for (const BondTerm& t : th.h.terms) {
    std::map<std::pair<int, int>, double> orig, conj;
    for (const auto& e : t.entries) {
      orig[{e.row, e.col}] += e.value;
      conj[{flip(e.row), flip(e.col)}] += e.value;
    }
    double sq = 0.0;
    for (const auto& [k, v] : orig) {
      auto it = conj.find(k);
      const double w = it == conj.end() ? 0.0 : it->second;
      sq += (v - w) * (v - w);
    }
    for (const auto& [k, v] : conj)
      if (!orig.count(k)) sq += v * v;
    th.term_commutator_norm = std::max(th.term_commutator_norm, std::sqrt(sq));
  }
  return th;
}

Eigen::MatrixXd dense_flip(const TunedHamiltonian& th, std::int64_t budget) {
  const int D = th.h.d, d = th.base_d;
  const std::int64_t dim = checked_power(D, th.h.N, budget);
  if (dim > budget) throw BudgetExceeded("flip operator exceeds the dense budget");
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(dim, dim);
  for (std::int64_t x = 0; x < dim; ++x) {
    std::int64_t y = 0, mult = 1, rest = x;
    for (int i = 0; i < th.h.N; ++i) {
      const int v = static_cast<int>(rest % D);
      rest /= D;
      y += mult * ((v + d) % D);
      mult *= D;
    }
    F(y, x) = 1.0;
  }
  return F;
}

void write_hamiltonian(const LocalHamiltonian& h, std::ostream& out) {
  out << "hamiltonian " << h.N << ' ' << h.d << ' ' << (h.translation_invariant ? 1 : 0) << "\n";
  out << "basis";
  for (const auto& n : h.basis_names) out << ' ' << n;
  out << "\n";
  out << std::setprecision(17);
  for (const BondTerm& t : h.terms) {
    out << "term " << t.left << ' ' << t.right << ' ' << t.entries.size() << "\n";
    for (const auto& e : t.entries) out << e.row << ' ' << e.col << ' ' << e.value << " 0\n";
  }
}

LocalHamiltonian read_hamiltonian(std::istream& in) {
  LocalHamiltonian h;
  std::string tag;
  int ti = 0;
  if (!(in >> tag >> h.N >> h.d >> ti) || tag != "hamiltonian")
    throw ParseError("expected 'hamiltonian N d flag' header");
  h.translation_invariant = ti != 0;
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::istringstream bl(line);
  bl >> tag;
  if (tag != "basis") throw ParseError("expected basis line");
  std::string name;
  while (bl >> name) h.basis_names.push_back(name);
  while (in >> tag) {
    if (tag != "term") throw ParseError("expected 'term'");
    BondTerm t;
    std::size_t n = 0;
    if (!(in >> t.left >> t.right >> n)) throw ParseError("bad term header");
    for (std::size_t i = 0; i < n; ++i) {
      TermEntry e;
      double im = 0;
      if (!(in >> e.row >> e.col >> e.value >> im)) throw ParseError("bad term entry");
      if (im != 0.0) throw ParseError("complex entries are not supported");
      t.entries.push_back(e);
    }
    h.terms.push_back(std::move(t));
  }
  return h;
}

}  // namespace thermo
