#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "thermo/common.hpp"

namespace thermo {

enum class CellKind { M, A };
enum class Dir { L, R };

// Tag recording which phase of the composite machine a rule belongs to.
enum class Substep { Write, Move, Glue, Sweep, Encounter, Buffer, Loop, Raw };

enum class StateRole {
  Plain,       // ordinary control state
  Initial,     // the start state of the forward computation
  Halting,     // forward computation stops here (glued into the sweep when composite)
  Sweep,       // the single flipping state r
  Reverse,     // a state of the reverse-running machine
  Buffer,      // first-buffer traversal states of the padded machine
  Traverse,    // place-marker seeking copies of reverse states
};

struct SymbolInfo {
  std::string name;
  CellKind kind = CellKind::M;
  int base = -1;        // index of the unmarked symbol this one stands for
  bool marked = false;  // place-marker or buffer copy
};

struct StateInfo {
  std::string name;
  StateRole role = StateRole::Plain;
};

// Content of one tape cell. The head sits on a cell: state >= 0 marks the
// head cell, state == -1 a plain cell.
struct Site {
  int state = -1;
  int symbol = 0;
  bool has_head() const { return state >= 0; }
  bool operator==(const Site& o) const { return state == o.state && symbol == o.symbol; }
  bool operator!=(const Site& o) const { return !(*this == o); }
  bool operator<(const Site& o) const {
    return state != o.state ? state < o.state : symbol < o.symbol;
  }
};

// A local rewrite. Width-1 rules rewrite the head cell; width-2 rules rewrite
// an adjacent (left, right) pair that contains the head.
struct Rule {
  int width = 2;
  std::array<Site, 2> lhs{};
  std::array<Site, 2> rhs{};
  Substep tag = Substep::Raw;
};

// Rule-level reversible machine on a ring of cells.
struct ReversibleTM {
  std::string name;
  std::vector<StateInfo> states;
  std::vector<SymbolInfo> symbols;
  std::vector<Rule> rules;
  int initial_state = -1;
  int blank = 0;
  int a1 = -1;
  int a2 = -1;

  int state_index(const std::string& n) const;
  int symbol_index(const std::string& n) const;
  int add_state(const std::string& n, StateRole role);
  int add_symbol(const std::string& n, CellKind kind, int base = -1, bool marked = false);
  std::vector<int> states_with_role(StateRole role) const;
  std::string site_name(const Site& s) const;
};

// One quintuple [p, s, t, d, q]: in state p reading s, write t, move d, enter q.
struct Quintuple {
  std::string from;
  std::string read;
  std::string write;
  Dir dir = Dir::R;
  std::string to;
};

// User-facing reversible Turing machine program (the forward machine).
struct TuringProgram {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> symbols;  // work alphabet, blank included
  std::string initial;
  std::vector<std::string> halting;
  std::string blank;
  std::vector<Quintuple> rules;
};

struct Diagnostic {
  enum class Kind { ForwardCollision, BackwardCollision, Malformed, Direction, Warning };
  Kind kind = Kind::Malformed;
  int rule_a = -1;
  int rule_b = -1;
  std::string message;
};
std::string to_string(Diagnostic::Kind k);

// Checks forward and backward determinism at the level of rule patterns,
// aligned on the head cell. Empty result means reversible.
std::vector<Diagnostic> validate_reversibility(const ReversibleTM& tm);

// Program-level checks: unknown names, duplicated (state, symbol) pairs,
// duplicated written symbols per target state, mixed directions per target.
std::vector<Diagnostic> validate_program(const TuringProgram& prog);
bool has_errors(const std::vector<Diagnostic>& diags);

struct TMConfig {
  std::vector<Site> cells;
  std::vector<CellKind> layout;

  int N() const { return static_cast<int>(cells.size()); }
  int head_position() const;  // -1 if no head
  int head_state() const;
  bool operator==(const TMConfig& o) const { return cells == o.cells; }
};

struct ConfigHash {
  std::size_t operator()(const TMConfig& c) const;
};

// Throws MalformedConfig unless the configuration has exactly one head and
// symbols consistent with the cell layout.
void check_config(const ReversibleTM& tm, const TMConfig& c);

// Pattern index used for repeated stepping.
class Stepper {
 public:
  explicit Stepper(const ReversibleTM& tm);
  std::optional<TMConfig> forward(const TMConfig& c) const;
  std::optional<TMConfig> backward(const TMConfig& c) const;
  const ReversibleTM& machine() const { return *tm_; }

 private:
  std::optional<TMConfig> apply(const TMConfig& c, bool fwd) const;
  const ReversibleTM* tm_;
  std::unordered_map<std::int64_t, int> one_[2];
  std::unordered_map<std::int64_t, int> left_[2];   // head on the left cell
  std::unordered_map<std::int64_t, int> right_[2];  // head on the right cell
  std::int64_t code(const Site& s) const;
};

// Single forward step; nullopt means HALTED.
std::optional<TMConfig> step(const ReversibleTM& tm, const TMConfig& c);

// Compile a program into its stand-alone substep machine (write then move).
// With include_a_cells the machine also skips over a1/a2 cells.
ReversibleTM compile_program(const TuringProgram& prog, bool include_a_cells = false);

// The glued forward / sweep / reverse machine.
ReversibleTM build_composite_machine(const TuringProgram& tm1);

// Composite machine with the ring-length buffers in the reverse phase.
ReversibleTM build_padded_machine(const TuringProgram& tm1);

// Input string: one character per work symbol when all names are single
// characters, otherwise whitespace separated names.
TMConfig initial_configuration(const ReversibleTM& tm, const std::string& x, int N,
                               const Rational& alpha);

enum class OrbitKind { Path, Cycle };

struct Orbit {
  std::vector<TMConfig> configs;
  OrbitKind kind = OrbitKind::Path;
  int T = 0;
  int T_h = -1;            // index of the first configuration in the sweep state
  int initial_index = 0;   // position of the starting configuration
};

// Enumerates the connected component of c0. max_steps <= 0 picks the default.
Orbit orbit(const ReversibleTM& tm, const TMConfig& c0, std::int64_t max_steps = 0);

std::int64_t default_max_steps(const ReversibleTM& tm, int N);

std::string format_config(const ReversibleTM& tm, const TMConfig& c);
void dump_orbit(const ReversibleTM& tm, const Orbit& o, std::ostream& out);

// Number of cells whose underlying symbol is a2.
int count_a2(const ReversibleTM& tm, const TMConfig& c);

// |states| + |symbols| of a rule-level machine.
int local_dimension(const ReversibleTM& tm);

// Closed-form dimension count 2(|Q_u|+|Q_rev|) + 1 + |Gamma_u| + 2, doubled
// `doublings` times.
int construction_dimension(int q_u, int q_rev, int gamma_u, int doublings = 0);

// File format (see docs/tm_format.md).
TuringProgram parse_program(std::istream& in);
TuringProgram load_program(const std::string& path);
void write_program(const TuringProgram& prog, std::ostream& out);

}  // namespace thermo
