#include <fstream>
#include <sstream>

#include "thermo/tm_model.hpp"

namespace thermo {

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

}  // namespace

TuringProgram parse_program(std::istream& in) {
  TuringProgram prog;
  std::string line;
  int lineno = 0;
  bool have_states = false, have_symbols = false, have_initial = false;
  auto fail = [&](const std::string& msg) {
    throw ParseError("line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto tok = tokens(line);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    std::vector<std::string> rest(tok.begin() + 1, tok.end());
    if (key == "name") {
      if (rest.empty()) fail("name needs a value");
      prog.name = rest[0];
      for (std::size_t i = 1; i < rest.size(); ++i) prog.name += " " + rest[i];
    } else if (key == "states") {
      if (rest.empty()) fail("states needs at least one name");
      prog.states = rest;
      have_states = true;
    } else if (key == "symbols") {
      if (rest.empty()) fail("symbols needs at least one name");
      prog.symbols = rest;
      have_symbols = true;
    } else if (key == "initial") {
      if (rest.size() != 1) fail("initial takes exactly one state");
      prog.initial = rest[0];
      have_initial = true;
    } else if (key == "halting") {
      prog.halting = rest;
    } else if (key == "blank") {
      if (rest.size() != 1) fail("blank takes exactly one symbol");
      prog.blank = rest[0];
    } else if (key == "rule") {
      // rule <from> <read> -> <to> <write> <L|R>
      if (rest.size() != 6 || rest[2] != "->") fail("expected 'rule p s -> q t L|R'");
      Quintuple q;
      q.from = rest[0];
      q.read = rest[1];
      q.to = rest[3];
      q.write = rest[4];
      if (rest[5] == "L")
        q.dir = Dir::L;
      else if (rest[5] == "R")
        q.dir = Dir::R;
      else
        fail("direction must be L or R");
      prog.rules.push_back(q);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!have_states || !have_symbols || !have_initial)
    throw ParseError("program needs 'states', 'symbols' and 'initial'");
  if (prog.blank.empty()) prog.blank = prog.symbols.front();
  if (prog.name.empty()) prog.name = "unnamed";
  auto diags = validate_program(prog);
  for (const auto& d : diags)
    if (d.kind == Diagnostic::Kind::Malformed) throw ParseError(d.message);
  return prog;
}

TuringProgram load_program(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  return parse_program(f);
}

void write_program(const TuringProgram& prog, std::ostream& out) {
  out << "name " << prog.name << "\n";
  out << "states";
  for (const auto& s : prog.states) out << ' ' << s;
  out << "\nsymbols";
  for (const auto& s : prog.symbols) out << ' ' << s;
  out << "\nblank " << prog.blank << "\ninitial " << prog.initial << "\nhalting";
  for (const auto& h : prog.halting) out << ' ' << h;
  out << "\n";
  for (const auto& q : prog.rules)
    out << "rule " << q.from << ' ' << q.read << " -> " << q.to << ' ' << q.write << ' '
        << (q.dir == Dir::L ? 'L' : 'R') << "\n";
}

}  // namespace thermo
