#pragma once

// Deterministic single-tape Turing machines: the source language of the
// compiler and the ground-truth oracle for compiled systems.
//
// File format:
//   alphabet 0 1 B;
//   input 0 1;
//   states start even odd accept reject;
//   blank B;            // optional, defaults to B
//   start B -> B R even // one transition per line: state read -> write dir state
//
// The tape is right-infinite; cell 0 is blank and the input occupies cells
// 1..n. A machine that moves left at cell 0 hits behaviour the model leaves
// undefined, so stepping aborts with a distinct error instead of guessing.

#include <map>
#include <string>
#include <vector>

#include "consfree/parse.hpp"
#include "consfree/store.hpp"

namespace consfree {

struct TmLeftUnderflow : Error {
  TmLeftUnderflow() : Error("head moved left at tape position 0") {}
};

struct Transition {
  std::string write;
  bool move_right = true;
  std::string next;
};

struct TuringMachine {
  std::vector<std::string> tape_alphabet;   // includes the blank
  std::vector<std::string> input_alphabet;  // excludes the blank
  std::vector<std::string> states;          // includes start/accept/reject
  std::string blank = "B";
  std::map<std::pair<std::string, std::string>, Transition> delta;

  bool has_state(const std::string& s) const {
    return std::find(states.begin(), states.end(), s) != states.end();
  }
  bool has_tape_symbol(const std::string& s) const {
    return std::find(tape_alphabet.begin(), tape_alphabet.end(), s) !=
           tape_alphabet.end();
  }
};

struct TmValidation {
  bool ok = true;
  std::vector<std::string> problems;
  void fail(std::string msg) {
    ok = false;
    problems.push_back(std::move(msg));
  }
};

// Totality and determinism: exactly one transition per (state, symbol) for
// every non-halting state, plus alphabet sanity.
inline TmValidation validate_tm(const TuringMachine& tm) {
  TmValidation v;
  if (!tm.has_state("start")) v.fail("missing state 'start'");
  if (!tm.has_state("accept")) v.fail("missing state 'accept'");
  if (!tm.has_state("reject")) v.fail("missing state 'reject'");
  if (!tm.has_tape_symbol(tm.blank)) v.fail("blank symbol not in tape alphabet");
  for (const std::string& c : tm.input_alphabet) {
    if (c == tm.blank) v.fail("blank symbol may not be an input symbol");
    if (!tm.has_tape_symbol(c)) v.fail("input symbol '" + c + "' not in tape alphabet");
  }
  for (const std::string& s : tm.states) {
    if (s == "accept" || s == "reject") continue;
    for (const std::string& r : tm.tape_alphabet) {
      auto it = tm.delta.find({s, r});
      if (it == tm.delta.end()) {
        v.fail("no transition for (" + s + ", " + r + ")");
      } else {
        if (!tm.has_tape_symbol(it->second.write))
          v.fail("transition (" + s + ", " + r + ") writes unknown symbol");
        if (!tm.has_state(it->second.next))
          v.fail("transition (" + s + ", " + r + ") enters unknown state");
      }
    }
  }
  for (auto& [key, t] : tm.delta) {
    if (!tm.has_state(key.first)) v.fail("transition from unknown state " + key.first);
    if (key.first == "accept" || key.first == "reject")
      v.fail("transition from halting state " + key.first);
    if (!tm.has_tape_symbol(key.second))
      v.fail("transition reads unknown symbol " + key.second);
  }
  return v;
}

struct TmConfig {
  std::vector<std::string> tape;  // finite prefix; blank beyond
  size_t head = 0;
  std::string state = "start";

  const std::string& read(const TuringMachine& tm) const {
    if (head < tape.size()) return tape[head];
    return tm.blank;
  }
  bool halted() const { return state == "accept" || state == "reject"; }
};

inline TmConfig tm_initial(const TuringMachine& tm, const std::string& input) {
  TmConfig c;
  c.tape.push_back(tm.blank);
  for (char ch : input) {
    std::string s(1, ch);
    if (std::find(tm.input_alphabet.begin(), tm.input_alphabet.end(), s) ==
        tm.input_alphabet.end())
      throw ValidationFailure("input symbol '" + s + "' not in the input alphabet");
    c.tape.push_back(s);
  }
  return c;
}

inline TmConfig tm_step(const TuringMachine& tm, const TmConfig& c) {
  if (c.halted()) throw ValidationFailure("cannot step a halted configuration");
  auto it = tm.delta.find({c.state, c.read(tm)});
  if (it == tm.delta.end())
    throw ValidationFailure("machine is stuck: no transition for (" + c.state + ", " +
                            c.read(tm) + ")");
  const Transition& t = it->second;
  TmConfig next = c;
  if (next.head >= next.tape.size()) next.tape.resize(next.head + 1, tm.blank);
  next.tape[next.head] = t.write;
  if (t.move_right) {
    next.head++;
  } else {
    if (next.head == 0) throw TmLeftUnderflow();
    next.head--;
  }
  next.state = t.next;
  return next;
}

enum class TmOutcome { accept, reject, timeout };

inline TmOutcome tm_run(const TuringMachine& tm, const std::string& input,
                        uint64_t fuel, uint64_t* steps_taken = nullptr) {
  TmConfig c = tm_initial(tm, input);
  uint64_t steps = 0;
  while (!c.halted()) {
    if (steps >= fuel) {
      if (steps_taken) *steps_taken = steps;
      return TmOutcome::timeout;
    }
    c = tm_step(tm, c);
    steps++;
  }
  if (steps_taken) *steps_taken = steps;
  return c.state == "accept" ? TmOutcome::accept : TmOutcome::reject;
}

// ---------------------------------------------------------------------------
// Parsing

inline TuringMachine parse_tm(std::string_view text) {
  detail::Lexer lex(text);
  TuringMachine tm;
  auto ident_list = [&]() {
    std::vector<std::string> out;
    while (!lex.at(";")) out.push_back(lex.expect_ident());
    lex.expect(";");
    return out;
  };
  while (!lex.done()) {
    if (lex.accept("alphabet")) {
      tm.tape_alphabet = ident_list();
    } else if (lex.accept("input")) {
      tm.input_alphabet = ident_list();
    } else if (lex.accept("states")) {
      tm.states = ident_list();
    } else if (lex.accept("blank")) {
      tm.blank = lex.expect_ident();
      lex.expect(";");
    } else {
      // Transition line: state read -> write (L|R) state
      int line = lex.line(), col = lex.col();
      std::string from = lex.expect_ident();
      std::string read = lex.expect_ident();
      lex.expect("->");
      std::string write = lex.expect_ident();
      std::string dir = lex.expect_ident();
      std::string next = lex.expect_ident();
      lex.accept(";");
      if (dir != "L" && dir != "R")
        throw ParseError("direction must be L or R, found '" + dir + "'", line, col);
      auto key = std::make_pair(from, read);
      if (tm.delta.count(key))
        throw ParseError("duplicate transition for (" + from + ", " + read + ")", line,
                         col);
      tm.delta[key] = Transition{write, dir == "R", next};
    }
  }
  return tm;
}

}  // namespace consfree
