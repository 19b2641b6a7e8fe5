#pragma once

// Built-in example corpus: one entry per well-known system, each with its
// expected validation outcome and acceptance vectors. `run_corpus` checks
// every entry and runs the vectors through the saturation decider (and the
// search engine where budgets permit).

#include <string>
#include <vector>

#include "consfree/afs.hpp"
#include "consfree/parse.hpp"
#include "consfree/rewrite.hpp"
#include "consfree/saturate.hpp"

namespace consfree {

struct CorpusVector {
  std::string input;
  bool accepted;        // expected outcome
  bool engine_only;     // skip the saturation decider (e.g. non-cons-free entries)
};

struct ExpectedWitness {
  std::string rule_lhs;   // printed lhs of the offending rule
  std::string subterm;    // printed offending subterm
};

struct CorpusEntry {
  std::string name;
  std::string source;
  CheckStatus constructor_system;
  CheckStatus left_linear;
  CheckStatus cons_free;
  std::vector<ExpectedWitness> witnesses;  // exact set, across all checks
  std::vector<CorpusVector> vectors;
  SearchBudget engine_budget;
};

// ---------------------------------------------------------------------------
// Sources

// Successor on least-significant-first bitstrings. Builds new data in two of
// its rules, so it is the canonical not-cons-free system.
inline const char* kCountSource = R"(
cons |> : string;
cons 0 : [string] => string;
cons 1 : [string] => string;
cons true : bool;
cons false : bool;
def succ : [string] => string;
rule succ(|>) -> 1(|>);
rule succ(0(xs)) -> 1(xs);
rule succ(1(xs)) -> 0(succ(xs));
)";

// Palindrome recognizer: walks a shrinking suffix to index the input from
// the rear without building data.
inline const char* kPalindromeSource = R"(
cons |> : string;
cons 0 : [string] => string;
cons 1 : [string] => string;
cons true : bool;
cons false : bool;
def decide : [string] => bool;
def palindrome : [string x string] => bool;
def and : [bool x bool] => bool;
def chk0 : [string x string] => bool;
def chk1 : [string x string] => bool;
rule decide(cs) -> palindrome(cs, cs);
rule palindrome(cs, |>) -> true;
rule palindrome(cs, 0(ys)) -> and(palindrome(cs, ys), chk0(cs, ys));
rule palindrome(cs, 1(ys)) -> and(palindrome(cs, ys), chk1(cs, ys));
rule and(true, x) -> x;
rule and(false, x) -> false;
rule chk0(0(xs), |>) -> true;
rule chk0(1(xs), |>) -> false;
rule chk1(1(xs), |>) -> true;
rule chk1(0(xs), |>) -> false;
forall b in {0,1}, c in {0,1}: rule chk0(b(xs), c(ys)) -> chk0(xs, ys);
forall b in {0,1}, c in {0,1}: rule chk1(b(xs), c(ys)) -> chk1(xs, ys);
)";

// Boolean satisfiability by nondeterministic assignment: terms not in
// normal form encode sets of variable indices.
inline const char* kSatSource = R"(
cons |> : string;
cons 0 : [string] => string;
cons 1 : [string] => string;
cons '#' : [string] => string;
cons '?' : [string] => string;
cons true : bool;
cons false : bool;
def decide : [string] => bool;
def assign : [string x string x string x string] => bool;
def main : [string x string x string] => bool;
def either : [string x string] => string;
def test : [string x string x string x bool x bool] => bool;
def eq : [string x string] => bool;
def skip : [string] => string;
rule eq('#'(xs), '#'(ys)) -> true;
forall a in {0,1,'?'}: rule eq('#'(xs), a(ys)) -> false;
forall a in {0,1,'?'}: rule eq(a(xs), '#'(ys)) -> false;
forall a in {0,1,'?'}, b in {0,1,'?'}: rule eq(a(xs), b(ys)) -> eq(xs, ys);
rule decide(cs) -> assign(cs, |>, |>, cs);
rule assign('#'(xs), s, t, cs) -> main(s, t, cs);
forall a in {0,1,'?'}: rule assign(a(xs), s, t, cs) -> assign(xs, either(a(xs), s), t, cs);
forall a in {0,1,'?'}: rule assign(a(xs), s, t, cs) -> assign(xs, s, either(a(xs), t), cs);
rule either(xs, q) -> xs;
rule either(xs, q) -> q;
rule main(s, t, '?'(xs)) -> main(s, t, xs);
rule main(s, t, 0(xs)) -> test(s, t, xs, eq(t, 0(xs)), eq(s, 0(xs)));
rule main(s, t, 1(xs)) -> test(s, t, xs, eq(s, 1(xs)), eq(t, 1(xs)));
rule main(s, t, |>) -> true;
rule main(s, t, '#'(xs)) -> false;
rule test(s, t, xs, true, z) -> main(s, t, skip(xs));
rule test(s, t, xs, z, true) -> main(s, t, xs);
rule skip('#'(xs)) -> xs;
forall a in {0,1,'?'}: rule skip(a(xs)) -> skip(xs);
)";

// Bit-sequences as functions from position strings to booleans; the
// second-order example.
inline const char* kHocountSource = R"(
cons |> : string;
cons 0 : [string] => string;
cons 1 : [string] => string;
cons true : bool;
cons false : bool;
def ite : [bool x bool x bool] => bool;
def not : [bool] => bool;
def all : [(string -> bool) x string] => bool;
def succ : [(string -> bool) x string] => bool;
rule ite(true, x, y) -> x;
rule ite(false, x, y) -> y;
rule not(x) -> ite(x, false, true);
rule all(F, |>) -> F |>;
forall a in {0,1}: rule all(F, a(xs)) -> ite(F (a(xs)), all(F, xs), false);
rule succ(F, |>) -> not(F |>);
forall a in {0,1}: rule succ(F, a(xs)) -> ite(all(F, xs), not(F (a(xs))), F (a(xs)));
)";

// Turing machine simulation through non-left-linear matching: tape halves
// are guessed afresh each step and checked for equality against the old
// tape, so the cons-freeness restriction loses its force. The embedded
// machine accepts exactly the word "1".
inline const char* kNonlinearTmSource = R"(
sort state;
sort sym;
sort direction;
cons |> : string;
cons 0 : [string] => string;
cons 1 : [string] => string;
cons true : bool;
cons false : bool;
cons startstate : state;
cons q1 : state;
cons q2 : state;
cons acc : state;
cons rej : state;
cons O : sym;
cons I : sym;
cons B : sym;
cons bot : sym;
cons R : direction;
cons L : direction;
def '::' : [sym x string] => string;
def rnd : sym;
def rndtape : [sym] => string;
def translate : [string] => string;
def equal : [string x string] => bool;
def start : [string] => bool;
def run : [state x string x sym x string] => bool;
def shift : [state x string x sym x string x direction] => bool;
def shift1 : [state x string x sym x string x direction x sym x string x string] => bool;
def shift2 : [state x string x sym x string x direction x sym x string] => bool;
def shift3 : [state x string x sym x string x bool] => bool;
def decide : [string] => bool;
rule '::'(bot, t) -> t;
rule rnd -> O;
rule rnd -> I;
rule rnd -> B;
rule rndtape(x) -> |>;
rule rndtape(x) -> '::'(rnd, rndtape(x));
rule translate(0(xs)) -> '::'(O, translate(xs));
rule translate(1(xs)) -> '::'(I, translate(xs));
rule translate(|>) -> '::'(B, translate(|>));
rule translate(|>) -> |>;
rule equal(xl, xl) -> true;
rule decide(cs) -> start(cs);
rule start(cs) -> run(startstate, |>, B, translate(cs));
rule run(startstate, xl, B, yl) -> shift(q1, xl, B, yl, R);
rule run(startstate, xl, O, yl) -> shift(rej, xl, O, yl, R);
rule run(startstate, xl, I, yl) -> shift(rej, xl, I, yl, R);
rule run(q1, xl, I, yl) -> shift(q2, xl, I, yl, R);
rule run(q1, xl, O, yl) -> shift(rej, xl, O, yl, R);
rule run(q1, xl, B, yl) -> shift(rej, xl, B, yl, R);
rule run(q2, xl, B, yl) -> shift(acc, xl, B, yl, R);
rule run(q2, xl, O, yl) -> shift(rej, xl, O, yl, R);
rule run(q2, xl, I, yl) -> shift(rej, xl, I, yl, R);
rule run(acc, xl, c, yl) -> true;
rule shift(s, xl, c, yl, d) -> shift1(s, xl, c, yl, d, rnd, rndtape(O), rndtape(I));
forall b in {O,I,B}: rule shift1(s, xl, c, yl, d, b, t, t) -> shift2(s, xl, c, yl, d, b, t);
rule shift2(s, xl, c, yl, R, z, t) -> shift3(s, '::'(c, xl), z, t, equal(yl, '::'(z, t)));
rule shift2(s, xl, c, yl, L, z, t) -> shift3(s, t, z, '::'(c, yl), equal(xl, '::'(z, t)));
rule shift3(s, xl, c, yl, true) -> run(s, xl, c, yl);
)";

inline std::vector<CorpusEntry> corpus_entries() {
  std::vector<CorpusEntry> out;

  CorpusEntry count;
  count.name = "count";
  count.source = kCountSource;
  count.constructor_system = CheckStatus::Pass;
  count.left_linear = CheckStatus::Pass;
  count.cons_free = CheckStatus::Fail;
  count.witnesses = {{"succ(0(xs))", "1(xs)"}, {"succ(1(xs))", "0(succ(xs))"}};
  out.push_back(count);

  CorpusEntry pal;
  pal.name = "palindrome";
  pal.source = kPalindromeSource;
  pal.constructor_system = CheckStatus::Pass;
  pal.left_linear = CheckStatus::Pass;
  pal.cons_free = CheckStatus::Pass;
  pal.vectors = {{"0110", true, false}, {"10", false, false}, {"11", true, false}};
  out.push_back(pal);

  CorpusEntry sat;
  sat.name = "sat";
  sat.source = kSatSource;
  sat.constructor_system = CheckStatus::Pass;
  sat.left_linear = CheckStatus::Pass;
  sat.cons_free = CheckStatus::Pass;
  sat.vectors = {{"10?#?10#", true, false},
                 {"11?#000#?11#", true, false},
                 {"1#0#", false, false}};
  out.push_back(sat);

  CorpusEntry ho;
  ho.name = "hocount";
  ho.source = kHocountSource;
  ho.constructor_system = CheckStatus::Pass;
  ho.left_linear = CheckStatus::Pass;
  ho.cons_free = CheckStatus::Pass;
  out.push_back(ho);

  CorpusEntry nl;
  nl.name = "nonlinear-tm";
  nl.source = kNonlinearTmSource;
  nl.constructor_system = CheckStatus::Pass;
  nl.left_linear = CheckStatus::Fail;
  nl.cons_free = CheckStatus::NotApplicable;
  nl.witnesses = {{"equal(xl, xl)", "xl"},
                  {"shift1(s, xl, c, yl, d, O, t, t)", "t"},
                  {"shift1(s, xl, c, yl, d, I, t, t)", "t"},
                  {"shift1(s, xl, c, yl, d, B, t, t)", "t"}};
  nl.vectors = {{"1", true, true}};
  nl.engine_budget = SearchBudget{2'000'000, 10'000};
  out.push_back(nl);

  return out;
}

struct CorpusVectorResult {
  std::string entry;
  std::string input;
  bool expected;
  bool engine_agrees = true;
  bool saturation_agrees = true;
  bool pass = false;
};

struct CorpusSummary {
  std::vector<std::string> validation_failures;
  std::vector<CorpusVectorResult> vector_results;
  bool all_pass() const {
    if (!validation_failures.empty()) return false;
    for (auto& r : vector_results)
      if (!r.pass) return false;
    return true;
  }
};

// Validates every entry against its expected report and runs the acceptance
// vectors. Saturation decides every vector of validating entries; the
// search engine cross-checks within its budget.
inline CorpusSummary run_corpus() {
  CorpusSummary sum;
  for (const CorpusEntry& e : corpus_entries()) {
    AFS afs = parse_afs(e.source);
    ValidationReport rep = validate(afs);
    auto expect = [&](const char* what, CheckStatus got, CheckStatus want) {
      if (got != want)
        sum.validation_failures.push_back(e.name + ": " + what + " is " +
                                          status_str(got) + ", expected " +
                                          status_str(want));
    };
    expect("constructor-system", rep.constructor_system, e.constructor_system);
    expect("left-linear", rep.left_linear, e.left_linear);
    expect("cons-free", rep.cons_free, e.cons_free);

    std::vector<ExpectedWitness> got;
    auto collect = [&](const std::vector<Witness>& ws) {
      for (const Witness& w : ws)
        got.push_back({print_term(afs.rules[w.rule].lhs), print_term(w.subterm)});
    };
    collect(rep.constructor_witnesses);
    collect(rep.linear_witnesses);
    collect(rep.cons_free_witnesses);
    auto key = [](const ExpectedWitness& w) { return w.rule_lhs + " @ " + w.subterm; };
    std::vector<std::string> got_keys, want_keys;
    for (auto& w : got) got_keys.push_back(key(w));
    for (auto& w : e.witnesses) want_keys.push_back(key(w));
    std::sort(got_keys.begin(), got_keys.end());
    std::sort(want_keys.begin(), want_keys.end());
    if (got_keys != want_keys) {
      std::string msg = e.name + ": witness set mismatch; got {";
      for (auto& k : got_keys) msg += " [" + k + "]";
      msg += " } expected {";
      for (auto& k : want_keys) msg += " [" + k + "]";
      msg += " }";
      sum.validation_failures.push_back(msg);
    }

    for (const CorpusVector& v : e.vectors) {
      CorpusVectorResult r;
      r.entry = e.name;
      r.input = v.input;
      r.expected = v.accepted;
      if (!v.engine_only) {
        bool sat_result = decide_by_saturation(afs, v.input);
        r.saturation_agrees = sat_result == v.accepted;
      }
      SearchBudget budget = e.engine_budget;
      Acceptance a = accepts(afs, v.input, budget);
      if (a == Acceptance::unknown)
        r.engine_agrees = true;  // budget ran out; not a verdict
      else
        r.engine_agrees = (a == Acceptance::accepted) == v.accepted;
      r.pass = r.engine_agrees && r.saturation_agrees;
      sum.vector_results.push_back(r);
    }
  }
  return sum;
}

}  // namespace consfree
