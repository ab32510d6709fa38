#include "thermo/tm_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace thermo {

// ---------------------------------------------------------------------------
// ReversibleTM helpers

int ReversibleTM::state_index(const std::string& n) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].name == n) return static_cast<int>(i);
  return -1;
}

int ReversibleTM::symbol_index(const std::string& n) const {
  for (std::size_t i = 0; i < symbols.size(); ++i)
    if (symbols[i].name == n) return static_cast<int>(i);
  return -1;
}

int ReversibleTM::add_state(const std::string& n, StateRole role) {
  if (state_index(n) >= 0) throw InvalidArgument("duplicate state name " + n);
  states.push_back({n, role});
  return static_cast<int>(states.size()) - 1;
}

int ReversibleTM::add_symbol(const std::string& n, CellKind kind, int base, bool marked) {
  if (symbol_index(n) >= 0) throw InvalidArgument("duplicate symbol name " + n);
  int idx = static_cast<int>(symbols.size());
  symbols.push_back({n, kind, base < 0 ? idx : base, marked});
  return idx;
}

std::vector<int> ReversibleTM::states_with_role(StateRole role) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].role == role) out.push_back(static_cast<int>(i));
  return out;
}

std::string ReversibleTM::site_name(const Site& s) const {
  const std::string& sym = symbols.at(s.symbol).name;
  if (!s.has_head()) return sym;
  return "[" + states.at(s.state).name + ":" + sym + "]";
}

std::string to_string(Diagnostic::Kind k) {
  switch (k) {
    case Diagnostic::Kind::ForwardCollision: return "forward-collision";
    case Diagnostic::Kind::BackwardCollision: return "backward-collision";
    case Diagnostic::Kind::Malformed: return "malformed";
    case Diagnostic::Kind::Direction: return "direction";
    case Diagnostic::Kind::Warning: return "warning";
  }
  return "unknown";
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.kind != Diagnostic::Kind::Warning; });
}

// ---------------------------------------------------------------------------
// Validation

namespace {

enum class Side { One, Left, Right };

struct Pattern {
  Side side;
  Site head;
  Site neighbour;
  int rule;
};

std::optional<Pattern> pattern_of(const Rule& r, bool lhs, int idx) {
  const auto& p = lhs ? r.lhs : r.rhs;
  if (r.width == 1) {
    if (!p[0].has_head()) return std::nullopt;
    return Pattern{Side::One, p[0], Site{}, idx};
  }
  int heads = (p[0].has_head() ? 1 : 0) + (p[1].has_head() ? 1 : 0);
  if (heads != 1) return std::nullopt;
  if (p[0].has_head()) return Pattern{Side::Left, p[0], p[1], idx};
  return Pattern{Side::Right, p[1], p[0], idx};
}

bool patterns_collide(const Pattern& a, const Pattern& b) {
  if (a.head != b.head) return false;
  if (a.side == Side::One || b.side == Side::One) return true;
  if (a.side != b.side) return true;
  return a.neighbour == b.neighbour;
}

}  // namespace

std::vector<Diagnostic> validate_reversibility(const ReversibleTM& tm) {
  std::vector<Diagnostic> out;
  for (int pass = 0; pass < 2; ++pass) {
    bool lhs = pass == 0;
    std::map<Site, std::vector<Pattern>> groups;
    for (std::size_t i = 0; i < tm.rules.size(); ++i) {
      const Rule& r = tm.rules[i];
      auto p = pattern_of(r, lhs, static_cast<int>(i));
      if (!p) {
        out.push_back({Diagnostic::Kind::Malformed, static_cast<int>(i), -1,
                       std::string("rule ") + std::to_string(i) +
                           (lhs ? " left" : " right") + " side must hold exactly one head"});
        continue;
      }
      groups[p->head].push_back(*p);
    }
    for (const auto& [head, pats] : groups) {
      for (std::size_t a = 0; a < pats.size(); ++a)
        for (std::size_t b = a + 1; b < pats.size(); ++b)
          if (patterns_collide(pats[a], pats[b])) {
            std::ostringstream msg;
            msg << (lhs ? "rules share a left-hand pattern: " : "rules share a right-hand pattern: ")
                << pats[a].rule << " and " << pats[b].rule << " at head " << tm.site_name(head);
            out.push_back({lhs ? Diagnostic::Kind::ForwardCollision
                               : Diagnostic::Kind::BackwardCollision,
                           pats[a].rule, pats[b].rule, msg.str()});
          }
    }
  }
  for (std::size_t i = 0; i < tm.rules.size(); ++i) {
    const Rule& r = tm.rules[i];
    for (int k = 0; k < r.width; ++k) {
      for (const Site* s : {&r.lhs[k], &r.rhs[k]}) {
        bool bad = s->symbol < 0 || s->symbol >= static_cast<int>(tm.symbols.size()) ||
                   s->state >= static_cast<int>(tm.states.size());
        if (bad)
          out.push_back({Diagnostic::Kind::Malformed, static_cast<int>(i), -1,
                         "rule " + std::to_string(i) + " references an unknown state or symbol"});
      }
    }
  }
  return out;
}

std::vector<Diagnostic> validate_program(const TuringProgram& prog) {
  std::vector<Diagnostic> out;
  auto known_state = [&](const std::string& s) {
    return std::find(prog.states.begin(), prog.states.end(), s) != prog.states.end();
  };
  auto known_symbol = [&](const std::string& s) {
    return std::find(prog.symbols.begin(), prog.symbols.end(), s) != prog.symbols.end();
  };
  auto err = [&](Diagnostic::Kind k, int a, int b, const std::string& m) {
    out.push_back({k, a, b, m});
  };
  if (!known_state(prog.initial)) err(Diagnostic::Kind::Malformed, -1, -1, "unknown initial state");
  if (!known_symbol(prog.blank)) err(Diagnostic::Kind::Malformed, -1, -1, "unknown blank symbol");
  for (const auto& h : prog.halting)
    if (!known_state(h)) err(Diagnostic::Kind::Malformed, -1, -1, "unknown halting state " + h);
  std::map<std::pair<std::string, std::string>, int> lhs_seen;
  std::map<std::pair<std::string, std::string>, int> rhs_seen;
  std::map<std::string, std::pair<Dir, int>> dir_of;
  bool initial_entered = false;
  for (std::size_t i = 0; i < prog.rules.size(); ++i) {
    const auto& q = prog.rules[i];
    int idx = static_cast<int>(i);
    if (!known_state(q.from) || !known_state(q.to) || !known_symbol(q.read) ||
        !known_symbol(q.write)) {
      err(Diagnostic::Kind::Malformed, idx, -1, "rule " + std::to_string(i) + " uses unknown names");
      continue;
    }
    if (std::find(prog.halting.begin(), prog.halting.end(), q.from) != prog.halting.end())
      err(Diagnostic::Kind::Malformed, idx, -1, "rule leaves halting state " + q.from);
    auto [it, fresh] = lhs_seen.emplace(std::make_pair(q.from, q.read), idx);
    if (!fresh)
      err(Diagnostic::Kind::ForwardCollision, it->second, idx,
          "two rules read (" + q.from + ", " + q.read + ")");
    auto [jt, fresh2] = rhs_seen.emplace(std::make_pair(q.to, q.write), idx);
    if (!fresh2)
      err(Diagnostic::Kind::BackwardCollision, jt->second, idx,
          "two rules enter " + q.to + " writing " + q.write);
    auto [kt, fresh3] = dir_of.emplace(q.to, std::make_pair(q.dir, idx));
    if (!fresh3 && kt->second.first != q.dir)
      err(Diagnostic::Kind::Direction, kt->second.second, idx,
          "rules entering " + q.to + " move in different directions");
    if (q.to == prog.initial) initial_entered = true;
  }
  if (initial_entered && !prog.halting.empty())
    err(Diagnostic::Kind::Warning, -1, -1,
        "initial state has incoming rules; the reverse phase stops on its first re-entry");
  return out;
}

// ---------------------------------------------------------------------------
// Configurations and stepping

int TMConfig::head_position() const {
  int pos = -1;
  for (int i = 0; i < N(); ++i)
    if (cells[i].has_head()) {
      if (pos >= 0) return -2;
      pos = i;
    }
  return pos;
}

int TMConfig::head_state() const {
  int p = head_position();
  return p >= 0 ? cells[p].state : -1;
}

std::size_t ConfigHash::operator()(const TMConfig& c) const {
  std::size_t h = 1469598103934665603ull;
  for (const auto& s : c.cells) {
    h ^= static_cast<std::size_t>(s.state + 1) * 1000003u + static_cast<std::size_t>(s.symbol);
    h *= 1099511628211ull;
  }
  return h;
}

void check_config(const ReversibleTM& tm, const TMConfig& c) {
  if (c.N() < 2) throw MalformedConfig("ring needs at least two cells");
  int heads = 0;
  for (int i = 0; i < c.N(); ++i) {
    const Site& s = c.cells[i];
    if (s.symbol < 0 || s.symbol >= static_cast<int>(tm.symbols.size()))
      throw MalformedConfig("unknown symbol at cell " + std::to_string(i));
    if (s.has_head()) {
      ++heads;
      if (s.state >= static_cast<int>(tm.states.size()))
        throw MalformedConfig("unknown state at cell " + std::to_string(i));
    }
    if (!c.layout.empty() && tm.symbols[s.symbol].kind != c.layout[i])
      throw MalformedConfig("symbol " + tm.symbols[s.symbol].name + " does not fit cell " +
                            std::to_string(i));
  }
  if (heads != 1) throw MalformedConfig("expected exactly one head, found " + std::to_string(heads));
}

std::int64_t Stepper::code(const Site& s) const {
  return static_cast<std::int64_t>(s.state + 1) * static_cast<std::int64_t>(tm_->symbols.size()) +
         s.symbol;
}

Stepper::Stepper(const ReversibleTM& tm) : tm_(&tm) {
  const std::int64_t K =
      static_cast<std::int64_t>(tm.states.size() + 1) * static_cast<std::int64_t>(tm.symbols.size());
  for (std::size_t i = 0; i < tm.rules.size(); ++i) {
    const Rule& r = tm.rules[i];
    for (int d = 0; d < 2; ++d) {
      const auto& p = d == 0 ? r.lhs : r.rhs;
      if (r.width == 1) {
        one_[d][code(p[0])] = static_cast<int>(i);
      } else if (p[0].has_head()) {
        left_[d][code(p[0]) * K + code(p[1])] = static_cast<int>(i);
      } else {
        right_[d][code(p[0]) * K + code(p[1])] = static_cast<int>(i);
      }
    }
  }
}

std::optional<TMConfig> Stepper::apply(const TMConfig& c, bool fwd) const {
  const int N = c.N();
  const int h = c.head_position();
  if (h < 0) throw MalformedConfig(h == -1 ? "no head" : "two heads");
  const int d = fwd ? 0 : 1;
  const std::int64_t K = static_cast<std::int64_t>(tm_->states.size() + 1) *
                         static_cast<std::int64_t>(tm_->symbols.size());
  const int hr = (h + 1) % N;
  const int hl = (h + N - 1) % N;

  int matches = 0;
  int rule = -1;
  int pos = -1;
  if (auto it = one_[d].find(code(c.cells[h])); it != one_[d].end()) {
    ++matches;
    rule = it->second;
    pos = h;
  }
  if (auto it = left_[d].find(code(c.cells[h]) * K + code(c.cells[hr])); it != left_[d].end()) {
    ++matches;
    rule = it->second;
    pos = h;
  }
  if (auto it = right_[d].find(code(c.cells[hl]) * K + code(c.cells[h])); it != right_[d].end()) {
    ++matches;
    rule = it->second;
    pos = hl;
  }
  if (matches == 0) return std::nullopt;
  if (matches > 1) throw NotReversible("configuration matches several rules");
  const Rule& r = tm_->rules[rule];
  const auto& out = fwd ? r.rhs : r.lhs;
  TMConfig next = c;
  next.cells[pos] = out[0];
  if (r.width == 2) next.cells[(pos + 1) % N] = out[1];
  return next;
}

std::optional<TMConfig> Stepper::forward(const TMConfig& c) const { return apply(c, true); }
std::optional<TMConfig> Stepper::backward(const TMConfig& c) const { return apply(c, false); }

std::optional<TMConfig> step(const ReversibleTM& tm, const TMConfig& c) {
  check_config(tm, c);
  Stepper s(tm);
  return s.forward(c);
}

// ---------------------------------------------------------------------------
// Machine construction

namespace {

Rule one_site(Site l, Site r, Substep tag) {
  Rule rule;
  rule.width = 1;
  rule.lhs = {l, Site{}};
  rule.rhs = {r, Site{}};
  rule.tag = tag;
  return rule;
}

Rule two_site(Site l0, Site l1, Site r0, Site r1, Substep tag) {
  Rule rule;
  rule.width = 2;
  rule.lhs = {l0, l1};
  rule.rhs = {r0, r1};
  rule.tag = tag;
  return rule;
}

Site plain(int sym) { return Site{-1, sym}; }
Site head(int st, int sym) { return Site{st, sym}; }

struct ForwardLayout {
  std::vector<int> W, M;       // per program state
  std::vector<int> gamma_u;    // symbol indices of the work alphabet
  std::vector<int> a_syms;     // a1, a2 when present
  std::vector<int> all_syms;   // gamma_u + a_syms
};

int prog_state(const TuringProgram& p, const std::string& n) {
  auto it = std::find(p.states.begin(), p.states.end(), n);
  if (it == p.states.end()) throw InvalidArgument("unknown state " + n);
  return static_cast<int>(it - p.states.begin());
}

int prog_symbol(const TuringProgram& p, const std::string& n) {
  auto it = std::find(p.symbols.begin(), p.symbols.end(), n);
  if (it == p.symbols.end()) throw InvalidArgument("unknown symbol " + n);
  return static_cast<int>(it - p.symbols.begin());
}

// Write, move and A-cell skip substeps of the forward machine.
std::vector<Rule> forward_rules(const TuringProgram& prog, const ForwardLayout& L) {
  std::vector<Rule> out;
  std::map<int, Dir> dir_of;
  std::map<int, std::set<int>> written_into;
  for (const auto& q : prog.rules) {
    int p = prog_state(prog, q.from), t = prog_state(prog, q.to);
    int s = L.gamma_u[prog_symbol(prog, q.read)], w = L.gamma_u[prog_symbol(prog, q.write)];
    out.push_back(one_site(head(L.W[p], s), head(L.M[t], w), Substep::Write));
    dir_of[t] = q.dir;
    written_into[t].insert(w);
  }
  for (const auto& [q, dir] : dir_of) {
    for (int t : written_into[q])
      for (int x : L.all_syms) {
        if (dir == Dir::R)
          out.push_back(two_site(head(L.M[q], t), plain(x), plain(t), head(L.W[q], x), Substep::Move));
        else
          out.push_back(two_site(plain(x), head(L.M[q], t), head(L.W[q], x), plain(t), Substep::Move));
      }
    for (int a : L.a_syms)
      for (int x : L.all_syms) {
        if (dir == Dir::R)
          out.push_back(two_site(head(L.W[q], a), plain(x), plain(a), head(L.W[q], x), Substep::Move));
        else
          out.push_back(two_site(plain(x), head(L.W[q], a), head(L.W[q], x), plain(a), Substep::Move));
      }
  }
  return out;
}

void require_valid(const TuringProgram& prog) {
  auto diags = validate_program(prog);
  if (has_errors(diags)) {
    std::string msg;
    for (const auto& d : diags)
      if (d.kind != Diagnostic::Kind::Warning) msg += d.message + "; ";
    throw NotReversible(msg);
  }
}

ForwardLayout add_forward_states(ReversibleTM& tm, const TuringProgram& prog, bool with_a) {
  ForwardLayout L;
  for (const auto& s : prog.symbols) L.gamma_u.push_back(tm.add_symbol(s, CellKind::M));
  if (with_a) {
    tm.a1 = tm.add_symbol("a1", CellKind::A);
    tm.a2 = tm.add_symbol("a2", CellKind::A);
    L.a_syms = {tm.a1, tm.a2};
  }
  L.all_syms = L.gamma_u;
  L.all_syms.insert(L.all_syms.end(), L.a_syms.begin(), L.a_syms.end());
  tm.blank = L.gamma_u[prog_symbol(prog, prog.blank)];
  for (const auto& q : prog.states) {
    StateRole role = StateRole::Plain;
    if (q == prog.initial) role = StateRole::Initial;
    if (std::find(prog.halting.begin(), prog.halting.end(), q) != prog.halting.end())
      role = StateRole::Halting;
    L.W.push_back(tm.add_state("W." + q, role));
    L.M.push_back(tm.add_state("M." + q, role == StateRole::Halting ? StateRole::Halting
                                                                    : StateRole::Plain));
  }
  tm.initial_state = L.W[prog_state(prog, prog.initial)];
  return L;
}

struct CompositeParts {
  ForwardLayout L;
  std::vector<int> rW, rM;  // reverse copies
  int r = -1;
  int h = -1;  // program index of the halting state, -1 if none
  std::vector<Rule> reverse;  // reverse-phase rules, before any padding
};

CompositeParts build_composite_core(ReversibleTM& tm, const TuringProgram& tm1) {
  require_valid(tm1);
  if (tm1.halting.size() > 1)
    throw InvalidArgument("the composite machine supports at most one halting state");
  CompositeParts P;
  P.L = add_forward_states(tm, tm1, true);
  for (const auto& q : tm1.states) {
    P.rW.push_back(tm.add_state("rW." + q, StateRole::Reverse));
    P.rM.push_back(tm.add_state("rM." + q, StateRole::Reverse));
  }
  P.r = tm.add_state("r", StateRole::Sweep);
  P.h = tm1.halting.empty() ? -1 : prog_state(tm1, tm1.halting.front());

  auto fwd = forward_rules(tm1, P.L);
  tm.rules.insert(tm.rules.end(), fwd.begin(), fwd.end());

  const auto& gu = P.L.gamma_u;
  if (P.h >= 0) {
    // Leaving the halting state starts the sweep; the left neighbour of an
    // M-cell is always an A-cell, which still holds a1 at that moment.
    for (int s : gu)
      tm.rules.push_back(two_site(plain(tm.a1), head(P.L.W[P.h], s), plain(tm.a1), head(P.r, s),
                                  Substep::Glue));
    // The sweep moves right, flipping every A-cell it arrives on.
    std::vector<int> sweep_on = gu;
    sweep_on.push_back(tm.a2);
    for (int z : sweep_on) {
      tm.rules.push_back(
          two_site(head(P.r, z), plain(tm.a1), plain(z), head(P.r, tm.a2), Substep::Sweep));
      for (int m : gu)
        tm.rules.push_back(two_site(head(P.r, z), plain(m), plain(z), head(P.r, m), Substep::Sweep));
    }
  }

  // Reverse phase: every forward substep inverted, with barred states.
  auto bar = [&](Site s) {
    if (!s.has_head()) return s;
    for (std::size_t q = 0; q < tm1.states.size(); ++q) {
      if (s.state == P.L.W[q]) return head(P.rW[q], s.symbol);
      if (s.state == P.L.M[q]) return head(P.rM[q], s.symbol);
    }
    throw InvalidArgument("cannot bar state " + tm.states[s.state].name);
  };
  const int q0 = prog_state(tm1, tm1.initial);
  for (const Rule& f : fwd) {
    Rule r = f;
    r.lhs = {bar(f.rhs[0]), bar(f.rhs[1])};
    r.rhs = {bar(f.lhs[0]), bar(f.lhs[1])};
    bool enters_initial = false;
    for (int k = 0; k < r.width; ++k)
      if (r.rhs[k].state == P.rW[q0]) enters_initial = true;
    if (enters_initial) continue;  // the reverse machine stops instead
    P.reverse.push_back(r);
  }
  return P;
}

}  // namespace

ReversibleTM compile_program(const TuringProgram& prog, bool include_a_cells) {
  require_valid(prog);
  ReversibleTM tm;
  tm.name = prog.name;
  ForwardLayout L = add_forward_states(tm, prog, include_a_cells);
  tm.rules = forward_rules(prog, L);
  if (has_errors(validate_reversibility(tm)))
    throw NotReversible("compiled program is not reversible");
  return tm;
}

ReversibleTM build_composite_machine(const TuringProgram& tm1) {
  ReversibleTM tm;
  tm.name = tm1.name + "+composite";
  CompositeParts P = build_composite_core(tm, tm1);
  if (P.h >= 0) {
    for (int s : P.L.gamma_u)
      tm.rules.push_back(two_site(head(P.r, s), plain(tm.a2), head(P.rW[P.h], s), plain(tm.a2),
                                  Substep::Encounter));
  }
  tm.rules.insert(tm.rules.end(), P.reverse.begin(), P.reverse.end());
  auto diags = validate_reversibility(tm);
  if (has_errors(diags)) throw NotReversible(diags.front().message);
  return tm;
}

ReversibleTM build_padded_machine(const TuringProgram& tm1) {
  ReversibleTM tm;
  tm.name = tm1.name + "+padded";
  CompositeParts P = build_composite_core(tm, tm1);
  const auto& gu = P.L.gamma_u;

  // Place-marker copy of every symbol, then the two buffer symbols (both
  // stand for a flipped A-cell).
  std::vector<int> base = P.L.all_syms;
  std::map<int, int> mark;
  for (int s : base)
    mark[s] = tm.add_symbol(tm.symbols[s].name + "^", tm.symbols[s].kind, s, true);
  const int anchor = tm.add_symbol("a2#", CellKind::A, tm.a2, true);
  const int anchor_pushed = tm.add_symbol("a2#^", CellKind::A, tm.a2, true);

  const int B = tm.add_state("B", StateRole::Buffer);
  const int B2 = tm.add_state("B'", StateRole::Buffer);

  if (P.h >= 0) {
    for (int s : gu)
      tm.rules.push_back(two_site(head(P.r, s), plain(tm.a2), plain(s), head(B2, anchor_pushed),
                                  Substep::Encounter));
    std::vector<int> marked_or_anchor, base_or_anchor, any;
    for (int s : base) marked_or_anchor.push_back(mark[s]);
    marked_or_anchor.push_back(anchor_pushed);
    base_or_anchor = base;
    base_or_anchor.push_back(anchor);
    any = base;
    for (int s : base) any.push_back(mark[s]);
    any.push_back(anchor);
    any.push_back(anchor_pushed);
    // Leave the pusher cell.
    for (int z : marked_or_anchor)
      for (int u : base_or_anchor)
        tm.rules.push_back(two_site(head(B2, z), plain(u), plain(z), head(B, u), Substep::Buffer));
    // Travel right.
    for (int y : base_or_anchor)
      for (int z : any)
        tm.rules.push_back(two_site(head(B, y), plain(z), plain(y), head(B, z), Substep::Buffer));
    // Push the marker one cell further.
    for (int x : base)
      for (int z : base)
        tm.rules.push_back(
            two_site(head(B, mark[x]), plain(z), plain(x), head(B2, mark[z]), Substep::Buffer));
    for (int z : base)
      tm.rules.push_back(
          two_site(head(B, anchor_pushed), plain(z), plain(anchor), head(B2, mark[z]), Substep::Buffer));
    // Marker came back to the anchor: hand over to the reverse machine. The
    // hand-over is a reverse substep like any other, so it gets a traversal.
    for (int s : gu)
      P.reverse.push_back(two_site(head(B, mark[s]), plain(anchor), head(P.rW[P.h], s),
                                   plain(tm.a2), Substep::Buffer));
  }

  // Reverse phase: after every substep, mark the head cell and walk the head
  // once around the ring before resuming.
  std::map<int, int> loop_of;
  std::map<int, std::set<int>> loop_values;
  for (Rule r : P.reverse) {
    for (int k = 0; k < r.width; ++k) {
      if (!r.rhs[k].has_head()) continue;
      int S = r.rhs[k].state;
      if (!loop_of.count(S))
        loop_of[S] = tm.add_state("@" + tm.states[S].name, StateRole::Traverse);
      loop_values[S].insert(r.rhs[k].symbol);
      r.rhs[k] = head(loop_of[S], mark.at(r.rhs[k].symbol));
    }
    if (r.tag != Substep::Buffer) r.tag = Substep::Loop;
    tm.rules.push_back(r);
  }
  for (const auto& [S, Lp] : loop_of) {
    for (int v : loop_values[S])
      for (int y : base) {
        tm.rules.push_back(
            two_site(head(Lp, mark[v]), plain(y), plain(mark[v]), head(Lp, y), Substep::Loop));
        tm.rules.push_back(
            two_site(head(Lp, y), plain(mark[v]), plain(y), head(S, v), Substep::Loop));
      }
    for (int y : base)
      for (int z : base)
        tm.rules.push_back(two_site(head(Lp, y), plain(z), plain(y), head(Lp, z), Substep::Loop));
  }

  auto diags = validate_reversibility(tm);
  if (has_errors(diags)) throw NotReversible(diags.front().message);
  return tm;
}

// ---------------------------------------------------------------------------
// Initial configuration and orbits

namespace {

std::vector<int> parse_input(const ReversibleTM& tm, const std::string& x) {
  std::vector<int> out;
  bool single = std::all_of(tm.symbols.begin(), tm.symbols.end(), [](const SymbolInfo& s) {
    return s.kind != CellKind::M || s.marked || s.name.size() == 1;
  });
  if (single && x.find(' ') == std::string::npos) {
    for (char ch : x) {
      int idx = tm.symbol_index(std::string(1, ch));
      if (idx < 0) throw LayoutError(std::string("unknown input symbol '") + ch + "'");
      out.push_back(idx);
    }
  } else {
    std::istringstream in(x);
    std::string tok;
    while (in >> tok) {
      int idx = tm.symbol_index(tok);
      if (idx < 0) throw LayoutError("unknown input symbol '" + tok + "'");
      out.push_back(idx);
    }
  }
  for (int s : out)
    if (tm.symbols[s].kind != CellKind::M || tm.symbols[s].marked)
      throw LayoutError("input symbols must be work symbols");
  return out;
}

}  // namespace

TMConfig initial_configuration(const ReversibleTM& tm, const std::string& x, int N,
                               const Rational& alpha) {
  if (N < 2) throw LayoutError("ring needs at least two cells");
  if (alpha.num != 1 || alpha.den < 1)
    throw LayoutError("alpha must be 1/k so that every M-cell is followed by k-1 A-cells");
  const int k = static_cast<int>(alpha.den);
  if (N % k != 0) throw LayoutError("alpha*N must be an integer");
  if (k > 1 && tm.a1 < 0) throw LayoutError("machine has no A-cell symbols");
  auto input = parse_input(tm, x);
  const int m_cells = N / k;
  if (static_cast<int>(input.size()) > m_cells) throw LayoutError("input longer than the M-cells");
  TMConfig c;
  c.cells.resize(N);
  c.layout.resize(N);
  int m = 0;
  for (int i = 0; i < N; ++i) {
    if (i % k == 0) {
      c.layout[i] = CellKind::M;
      c.cells[i] = plain(m < static_cast<int>(input.size()) ? input[m] : tm.blank);
      ++m;
    } else {
      c.layout[i] = CellKind::A;
      c.cells[i] = plain(tm.a1);
    }
  }
  if (tm.initial_state < 0) throw LayoutError("machine has no initial state");
  c.cells[0].state = tm.initial_state;
  return c;
}

std::int64_t default_max_steps(const ReversibleTM& tm, int N) {
  const double d = static_cast<double>(tm.symbols.size() * (tm.states.size() + 1));
  const double bound = 10.0 * std::pow(d, N);
  return bound > 5e7 ? 50000000 : static_cast<std::int64_t>(bound);
}

Orbit orbit(const ReversibleTM& tm, const TMConfig& c0, std::int64_t max_steps) {
  check_config(tm, c0);
  if (max_steps <= 0) max_steps = default_max_steps(tm, c0.N());
  Stepper st(tm);
  Orbit o;
  std::unordered_set<TMConfig, ConfigHash> seen;
  seen.insert(c0);
  std::vector<TMConfig> fwd{c0};
  bool cycle = false;
  TMConfig cur = c0;
  for (std::int64_t n = 0;; ++n) {
    if (n >= max_steps) throw OrbitBudgetExceeded("more than " + std::to_string(max_steps) + " steps");
    auto next = st.forward(cur);
    if (!next) break;
    if (*next == c0) {
      cycle = true;
      break;
    }
    if (!seen.insert(*next).second)
      throw NotReversible("orbit revisits a configuration other than its start");
    fwd.push_back(*next);
    cur = std::move(*next);
  }
  std::vector<TMConfig> back;
  if (!cycle) {
    cur = c0;
    for (std::int64_t n = 0;; ++n) {
      if (n + static_cast<std::int64_t>(fwd.size()) >= max_steps)
        throw OrbitBudgetExceeded("more than " + std::to_string(max_steps) + " steps");
      auto prev = st.backward(cur);
      if (!prev) break;
      if (!seen.insert(*prev).second)
        throw NotReversible("backward walk revisits a configuration");
      back.push_back(*prev);
      cur = std::move(*prev);
    }
  }
  o.kind = cycle ? OrbitKind::Cycle : OrbitKind::Path;
  o.initial_index = static_cast<int>(back.size());
  o.configs.reserve(back.size() + fwd.size());
  for (auto it = back.rbegin(); it != back.rend(); ++it) o.configs.push_back(std::move(*it));
  for (auto& c : fwd) o.configs.push_back(std::move(c));
  o.T = static_cast<int>(o.configs.size());
  for (int k = 0; k < o.T; ++k) {
    int s = o.configs[k].head_state();
    if (s >= 0 && tm.states[s].role == StateRole::Sweep) {
      o.T_h = k;
      break;
    }
  }
  return o;
}

std::string format_config(const ReversibleTM& tm, const TMConfig& c) {
  std::string out;
  for (int i = 0; i < c.N(); ++i) {
    if (i) out += ' ';
    out += tm.site_name(c.cells[i]);
  }
  return out;
}

void dump_orbit(const ReversibleTM& tm, const Orbit& o, std::ostream& out) {
  out << "# orbit kind=" << (o.kind == OrbitKind::Path ? "PATH" : "CYCLE") << " T=" << o.T
      << " T_h=" << o.T_h << " initial_index=" << o.initial_index << "\n";
  for (int k = 0; k < o.T; ++k) out << k << ": " << format_config(tm, o.configs[k]) << "\n";
}

int count_a2(const ReversibleTM& tm, const TMConfig& c) {
  if (tm.a2 < 0) return 0;
  int n = 0;
  for (const auto& s : c.cells)
    if (tm.symbols[s.symbol].base == tm.a2) ++n;
  return n;
}

int local_dimension(const ReversibleTM& tm) {
  return static_cast<int>(tm.states.size() + tm.symbols.size());
}

int construction_dimension(int q_u, int q_rev, int gamma_u, int doublings) {
  int d = 2 * (q_u + q_rev) + 1 + gamma_u + 2;
  for (int i = 0; i < doublings; ++i) d *= 2;
  return d;
}

}  // namespace thermo
