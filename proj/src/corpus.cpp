#include "thermo/corpus.hpp"

#include <sstream>

namespace thermo {

namespace {

std::vector<CorpusEntry> make_corpus() {
  return {
      {"scan",
       "name scan\nstates q0 q1 h\nsymbols _ 1\nblank _\ninitial q0\nhalting h\n"
       "rule q0 1 -> q1 1 R\nrule q0 _ -> h _ R\nrule q1 1 -> q1 _ R\nrule q1 _ -> h 1 R\n",
       true, "11"},
      {"bounce",
       "name bounce\nstates q0 q1 h\nsymbols _ 1\nblank _\ninitial q0\nhalting h\n"
       "rule q0 _ -> q1 1 L\nrule q1 _ -> q1 _ L\nrule q1 1 -> h 1 R\n",
       true, ""},
      {"flip_once",
       "name flip_once\nstates q0 h\nsymbols _ 1\nblank _\ninitial q0\nhalting h\n"
       "rule q0 _ -> h 1 R\nrule q0 1 -> h _ R\n",
       true, "1"},
      {"chain3",
       "name chain3\nstates q0 q1 q2 h\nsymbols _ 1\nblank _\ninitial q0\nhalting h\n"
       "rule q0 _ -> q1 1 R\nrule q0 1 -> q1 _ R\nrule q1 _ -> q2 1 R\nrule q1 1 -> q2 _ R\n"
       "rule q2 _ -> h 1 R\nrule q2 1 -> h _ R\n",
       true, "1"},
      {"mover",
       "name mover\nstates q0 h\nsymbols _ 1\nblank _\ninitial q0\nhalting h\n"
       "rule q0 _ -> q0 _ R\nrule q0 1 -> q0 1 R\n",
       false, "1"},
      {"flipper",
       "name flipper\nstates q0 h\nsymbols _ 1\nblank _\ninitial q0\nhalting h\n"
       "rule q0 _ -> q0 1 R\nrule q0 1 -> q0 _ R\n",
       false, ""},
      {"alternator",
       "name alternator\nstates q0 q1 h\nsymbols _ 1\nblank _\ninitial q0\nhalting h\n"
       "rule q0 _ -> q1 _ R\nrule q0 1 -> q1 1 R\nrule q1 _ -> q0 _ R\nrule q1 1 -> q0 1 R\n",
       false, "1"},
      {"left_mover",
       "name left_mover\nstates q0 h\nsymbols _ 1\nblank _\ninitial q0\nhalting h\n"
       "rule q0 _ -> q0 _ L\nrule q0 1 -> q0 1 L\n",
       false, ""},
  };
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = make_corpus();
  return entries;
}

const CorpusEntry& corpus_entry(const std::string& id) {
  for (const auto& e : corpus())
    if (e.id == id) return e;
  throw InvalidArgument("no corpus machine named " + id);
}

TuringProgram corpus_program(const std::string& id) {
  std::istringstream in(corpus_entry(id).text);
  return parse_program(in);
}

TuringProgram chain_program(int states, int symbols) {
  if (states < 2 || symbols < 1) throw InvalidArgument("chain program needs >= 2 states");
  TuringProgram p;
  p.name = "chain" + std::to_string(states) + "x" + std::to_string(symbols);
  for (int i = 0; i < states; ++i) p.states.push_back("q" + std::to_string(i));
  for (int j = 0; j < symbols; ++j) p.symbols.push_back("s" + std::to_string(j));
  p.initial = "q0";
  p.halting = {p.states.back()};
  p.blank = "s0";
  for (int i = 0; i + 1 < states; ++i)
    for (int j = 0; j < symbols; ++j)
      p.rules.push_back({p.states[i], p.symbols[j], p.symbols[j], Dir::R, p.states[i + 1]});
  return p;
}

}  // namespace thermo
