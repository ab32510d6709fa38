#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "thermo/corpus.hpp"
#include "thermo/tm_model.hpp"

using namespace thermo;

namespace {

ReversibleTM two_rule_machine(bool colliding) {
  ReversibleTM tm;
  tm.name = "pair";
  const int q = tm.add_state("q", StateRole::Initial);
  const int p = tm.add_state("p", StateRole::Plain);
  const int r = tm.add_state("r", StateRole::Plain);
  const int a = tm.add_symbol("a", CellKind::M);
  const int b = tm.add_symbol("b", CellKind::M);
  const int c = tm.add_symbol("c", CellKind::M);
  tm.initial_state = q;
  Rule r1;
  r1.width = 1;
  r1.lhs[0] = {q, a};
  r1.rhs[0] = {r, b};
  tm.rules.push_back(r1);
  if (colliding) {
    Rule r2 = r1;
    r2.lhs[0] = {p, c};
    tm.rules.push_back(r2);
  }
  return tm;
}

}  // namespace

TEST(Validator, SingleRuleIsReversible) {
  EXPECT_TRUE(validate_reversibility(two_rule_machine(false)).empty());
}

TEST(Validator, SharedRightHandSideIsBackwardCollision) {
  const auto diags = validate_reversibility(two_rule_machine(true));
  ASSERT_FALSE(diags.empty());
  bool backward = false;
  for (const auto& d : diags) backward |= d.kind == Diagnostic::Kind::BackwardCollision;
  EXPECT_TRUE(backward);
  EXPECT_TRUE(has_errors(diags));
}

TEST(Validator, CompiledCorpusMachinesAreReversible) {
  for (const auto& e : corpus()) {
    const TuringProgram prog = corpus_program(e.id);
    EXPECT_FALSE(has_errors(validate_program(prog))) << e.id;
    EXPECT_TRUE(validate_reversibility(compile_program(prog)).empty()) << e.id;
    EXPECT_TRUE(validate_reversibility(build_composite_machine(prog)).empty()) << e.id;
    EXPECT_TRUE(validate_reversibility(build_padded_machine(prog)).empty()) << e.id;
  }
}

TEST(Validator, ProgramWithDuplicatedTransitionIsRejected) {
  TuringProgram prog = corpus_program("scan");
  prog.rules.push_back(prog.rules.front());
  EXPECT_TRUE(has_errors(validate_program(prog)));
}

TEST(Step, RightMoverAdvancesHead) {
  const ReversibleTM tm = compile_program(corpus_program("mover"));
  TMConfig c = initial_configuration(tm, "", 4, Rational{1, 1});
  // A move takes a write substep followed by a move substep.
  auto c1 = step(tm, c);
  ASSERT_TRUE(c1.has_value());
  auto c2 = step(tm, *c1);
  ASSERT_TRUE(c2.has_value());
  EXPECT_EQ(c2->head_position(), 1);
}

TEST(Step, ReverseHaltingStateIsTerminal) {
  const ReversibleTM tm = build_composite_machine(corpus_program("flip_once"));
  const TMConfig c0 = initial_configuration(tm, "1", 8, Rational{1, 2});
  const Orbit o = orbit(tm, c0);
  ASSERT_EQ(o.kind, OrbitKind::Path);
  EXPECT_FALSE(step(tm, o.configs.back()).has_value());
}

TEST(InitialConfiguration, EmptyInputLayout) {
  const ReversibleTM tm = build_composite_machine(corpus_program("scan"));
  const TMConfig c = initial_configuration(tm, "", 4, Rational{1, 2});
  int m_blank = 0, a_one = 0;
  for (int i = 0; i < c.N(); ++i) {
    if (c.layout[i] == CellKind::M && c.cells[i].symbol == tm.blank) ++m_blank;
    if (c.layout[i] == CellKind::A && c.cells[i].symbol == tm.a1) ++a_one;
  }
  EXPECT_EQ(m_blank, 2);
  EXPECT_EQ(a_one, 2);
  EXPECT_EQ(c.head_position(), 0);
}

TEST(InitialConfiguration, FullInputFillsEveryMCell) {
  const ReversibleTM tm = build_composite_machine(corpus_program("scan"));
  const TMConfig c = initial_configuration(tm, "1111", 8, Rational{1, 2});
  const int one = tm.symbol_index("1");
  for (int i = 0; i < c.N(); ++i) {
    if (c.layout[i] == CellKind::M) EXPECT_EQ(c.cells[i].symbol, one);
    else EXPECT_EQ(c.cells[i].symbol, tm.a1);
  }
}

TEST(InitialConfiguration, RejectsBadLayouts) {
  const ReversibleTM tm = build_composite_machine(corpus_program("scan"));
  EXPECT_THROW(initial_configuration(tm, "", 7, Rational{1, 2}), LayoutError);
  EXPECT_THROW(initial_configuration(tm, "", 8, Rational{2, 3}), LayoutError);
  EXPECT_THROW(initial_configuration(tm, "11111", 8, Rational{1, 2}), LayoutError);
}

TEST(Orbit, RightMoverRingIsCycleOfEightSubsteps) {
  const ReversibleTM tm = compile_program(corpus_program("mover"));
  const Orbit o = orbit(tm, initial_configuration(tm, "", 4, Rational{1, 1}));
  EXPECT_EQ(o.kind, OrbitKind::Cycle);
  EXPECT_EQ(o.T, 8);
}

TEST(Orbit, ConfigurationsArePairwiseDistinct) {
  for (const char* id : {"scan", "bounce", "flipper"}) {
    const ReversibleTM tm = build_composite_machine(corpus_program(id));
    const Orbit o = orbit(tm, initial_configuration(tm, corpus_entry(id).input, 8, Rational{1, 2}));
    std::set<std::vector<Site>> seen;
    for (const auto& c : o.configs) seen.insert(c.cells);
    EXPECT_EQ(seen.size(), o.configs.size()) << id;
  }
}

TEST(Orbit, CompositeHaltingFillsEveryACell) {
  for (const char* id : {"scan", "bounce", "flip_once", "chain3"}) {
    const ReversibleTM tm = build_composite_machine(corpus_program(id));
    const int N = 8;
    const Orbit o = orbit(tm, initial_configuration(tm, corpus_entry(id).input, N, Rational{1, 2}));
    ASSERT_EQ(o.kind, OrbitKind::Path) << id;
    ASSERT_GE(o.T_h, 0) << id;
    EXPECT_EQ(o.T, 2 * o.T_h + N) << id;
    for (int k = o.T_h + N; k < o.T; ++k) EXPECT_EQ(count_a2(tm, o.configs[k]), N / 2) << id << " step " << k;
    for (int k = 0; k <= o.T_h; ++k) EXPECT_EQ(count_a2(tm, o.configs[k]), 0) << id;
  }
}

TEST(Orbit, LoopingMachineNeverWritesA2) {
  for (const char* id : {"mover", "flipper", "alternator", "left_mover"}) {
    const ReversibleTM tm = build_composite_machine(corpus_program(id));
    const Orbit o = orbit(tm, initial_configuration(tm, corpus_entry(id).input, 8, Rational{1, 4}));
    EXPECT_EQ(o.T_h, -1) << id;
    for (const auto& c : o.configs) EXPECT_EQ(count_a2(tm, c), 0) << id;
  }
}

TEST(Orbit, PaddedRunTimeMatchesBufferFormula) {
  for (const char* id : {"scan", "bounce", "flip_once", "chain3"}) {
    for (int N : {8, 12}) {
      const ReversibleTM tm = build_padded_machine(corpus_program(id));
      const Orbit o = orbit(tm, initial_configuration(tm, corpus_entry(id).input, N, Rational{1, 4}));
      ASSERT_EQ(o.kind, OrbitKind::Path);
      EXPECT_EQ(o.T, (N + 2) * o.T_h + (N + 1) * N) << id << " N=" << N;
    }
  }
}

TEST(Orbit, PaddedLooperKeepsACellsUnflipped) {
  for (const char* id : {"mover", "alternator"}) {
    const TuringProgram prog = corpus_program(id);
    const ReversibleTM plain = build_composite_machine(prog);
    const ReversibleTM padded = build_padded_machine(prog);
    const Orbit a = orbit(plain, initial_configuration(plain, corpus_entry(id).input, 8, Rational{1, 4}));
    const Orbit b = orbit(padded, initial_configuration(padded, corpus_entry(id).input, 8, Rational{1, 4}));
    EXPECT_EQ(a.T, b.T) << id;
    for (const auto& c : b.configs)
      for (int i = 0; i < c.N(); ++i)
        if (c.layout[i] == CellKind::A) EXPECT_EQ(c.cells[i].symbol, padded.a1);
  }
}

TEST(Orbit, BudgetIsEnforced) {
  const ReversibleTM tm = build_composite_machine(corpus_program("bounce"));
  EXPECT_THROW(orbit(tm, initial_configuration(tm, "", 8, Rational{1, 2}), 5), OrbitBudgetExceeded);
}

TEST(Dimension, ClosedFormCounts) {
  EXPECT_EQ(construction_dimension(10, 10, 8), 51);
  EXPECT_EQ(construction_dimension(10, 10, 8, 2), 204);
  EXPECT_EQ(construction_dimension(2, 2, 2), 13);
}

TEST(Dimension, CompilerAlphabetMatchesClosedForm) {
  EXPECT_EQ(local_dimension(build_composite_machine(chain_program(10, 8))), 51);
  const TuringProgram toy = corpus_program("flip_once");
  EXPECT_EQ(local_dimension(build_composite_machine(toy)),
            construction_dimension(static_cast<int>(toy.states.size()), static_cast<int>(toy.states.size()),
                                   static_cast<int>(toy.symbols.size())));
}

TEST(Format, RoundTripPreservesProgram) {
  const TuringProgram prog = corpus_program("chain3");
  std::stringstream buf;
  write_program(prog, buf);
  const TuringProgram back = parse_program(buf);
  EXPECT_EQ(back.name, prog.name);
  EXPECT_EQ(back.states, prog.states);
  EXPECT_EQ(back.symbols, prog.symbols);
  ASSERT_EQ(back.rules.size(), prog.rules.size());
  for (std::size_t i = 0; i < prog.rules.size(); ++i) {
    EXPECT_EQ(back.rules[i].from, prog.rules[i].from);
    EXPECT_EQ(back.rules[i].write, prog.rules[i].write);
    EXPECT_EQ(back.rules[i].dir, prog.rules[i].dir);
  }
}

TEST(Format, MalformedTextRaisesParseError) {
  std::istringstream in("name x\nstates q0\nrule q0 1 -> \n");
  EXPECT_THROW(parse_program(in), ParseError);
}
