#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "thermo/tm_model.hpp"

namespace thermo {

// Entry of a sparse two-site operator on the d*d pair space; the pair index
// of (left value a, right value b) is a*d + b.
struct TermEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Operator on sites (left, right) with right = left + 1 mod N.
struct BondTerm {
  int left = 0;
  int right = 1;
  std::vector<TermEntry> entries;
};

// The transition rules are real permutation-like maps, so every term is a
// real symmetric matrix and all Hamiltonians here are real.
struct LocalHamiltonian {
  int N = 0;
  int d = 0;
  std::vector<std::string> basis_names;  // one name per local basis value
  std::vector<BondTerm> terms;
  bool translation_invariant = true;
};

// Local basis of a compiled machine: plain symbols, every head value used by a
// rule, and every (initial state, M-symbol) pair.
struct SiteBasis {
  std::vector<Site> values;
  std::map<Site, int> index;
  int d() const { return static_cast<int>(values.size()); }
  int of(const Site& s) const;  // throws MalformedConfig for a value outside the basis
};

SiteBasis site_basis(const ReversibleTM& tm);

// One U + U^dagger pair per rule on every bond of the ring.
LocalHamiltonian compile_hamiltonian(const ReversibleTM& tm, int N);
LocalHamiltonian compile_hamiltonian(const ReversibleTM& tm, const SiteBasis& basis, int N);

// The single two-site term that every bond carries.
Eigen::SparseMatrix<double> bond_operator(const ReversibleTM& tm, const SiteBasis& basis);

// Index of a configuration in the d^N product basis (site 0 least significant).
std::int64_t config_index(const SiteBasis& basis, const TMConfig& c);

// Sparse full Hamiltonian; no size limit besides memory.
Eigen::SparseMatrix<double> sparse_hamiltonian(const LocalHamiltonian& h);

// Dense Hermitian matrix, refused above the dense budget.
Eigen::MatrixXd dense_hamiltonian(const LocalHamiltonian& h, std::int64_t budget = 20000);

// Maps each basis index to the index with every site shifted by one.
std::vector<std::int64_t> cyclic_shift_permutation(int N, int d);

struct EffectiveHamiltonian {
  int T = 0;
  OrbitKind kind = OrbitKind::Path;
  Eigen::MatrixXd matrix;
};

// Path or cycle adjacency. A two-configuration cycle is a double edge, so its
// off-diagonal entry is 2.
EffectiveHamiltonian effective_hamiltonian(const Orbit& o);
EffectiveHamiltonian effective_hamiltonian(OrbitKind kind, int T);

// P H P written in the orbit basis.
Eigen::MatrixXd restrict_to_orbit(const Eigen::SparseMatrix<double>& H, const SiteBasis& basis,
                                  const Orbit& o);

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // columns
  Eigen::VectorXd coefficients;  // overlaps with the initial vector
};

// Eigenvalues in formula order j = 0..T-1; coefficients for basis vector e_init.
SpectralDecomposition eigensystem_path(int T, int init = 0);
SpectralDecomposition eigensystem_cycle(int T, int init = 0);

// Ascending eigenvalues; each eigenvector's first nonzero entry is positive.
SpectralDecomposition eigensystem_dense(const Eigen::MatrixXd& H, const Eigen::VectorXd& psi0);

// Analytic decomposition when available, dense otherwise.
SpectralDecomposition spectral_decomposition(const EffectiveHamiltonian& heff, int init);

struct GapReport {
  double min_gap = 0.0;
  int argmin = 0;          // j with the smallest lambda_j - lambda_{j+1}
  double lower_bound = 0;  // pi^2 / (4 (T+1)^2)
  bool certified = false;
};

// Adjacent gaps lambda_j - lambda_{j+1} = 4 sin(pi/(2(T+1))) sin((2j+3) pi/(2(T+1))).
GapReport min_gap_path(int T);
double min_gap_brute_force(const Eigen::VectorXd& eigenvalues);
// Smallest gap between eigenvalues that differ by more than tol; cycles are
// doubly degenerate, so this is the promise gap that matters for them.
double min_distinct_gap(const Eigen::VectorXd& eigenvalues, double tol = 1e-9);

struct TunedHamiltonian {
  LocalHamiltonian h;  // local dimension 2d: value v -> v, primed v' -> v + d
  int base_d = 0;
  Eigen::SparseMatrix<double> F_site;  // swaps v and v'
  double term_commutator_norm = 0.0;   // max over bonds of ||(F x F) h (F x F) - h||
};

TunedHamiltonian build_tuned_hamiltonian(const LocalHamiltonian& h);

// Dense F on the full ring; refused above the budget.
Eigen::MatrixXd dense_flip(const TunedHamiltonian& th, std::int64_t budget = 20000);

// Round-trippable text export: header, then one block of triplets per bond.
void write_hamiltonian(const LocalHamiltonian& h, std::ostream& out);
LocalHamiltonian read_hamiltonian(std::istream& in);

}  // namespace thermo
