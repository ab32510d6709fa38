#pragma once

#include <string>
#include <vector>

#include "thermo/tm_model.hpp"

namespace thermo {

// Small reversible machines used by the tests, the acceptance runner and the
// `corpus` subcommand. Every entry lists inputs that behave as advertised on
// rings up to 16 cells.
struct CorpusEntry {
  std::string id;
  std::string text;   // program in the .tm file format
  bool halts = false;
  std::string input;  // default input string
};

const std::vector<CorpusEntry>& corpus();
const CorpusEntry& corpus_entry(const std::string& id);
TuringProgram corpus_program(const std::string& id);

// A synthetic reversible program with the requested number of states and
// symbols; used to exercise the dimension count at full alphabet sizes.
TuringProgram chain_program(int states, int symbols);

}  // namespace thermo
