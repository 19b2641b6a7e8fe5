#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "helpers.hpp"
#include "sat_oracle.hpp"

#include "consfree/rewrite.hpp"
#include "consfree/saturate.hpp"

using namespace consfree;
using namespace testing_helpers;

namespace {

TermId decide_start(const AFS& afs, const std::string& input) {
  return store().fun(find_decide_symbol(afs), {encode_input(afs, input)});
}

std::set<TermId> as_set(const std::vector<TermId>& v) {
  return std::set<TermId>(v.begin(), v.end());
}

}  // namespace

TEST_CASE("domain enumeration") {
  AFS& afs = corpus_afs("palindrome");
  DataSet b = compute_data_set(afs, decide_start(afs, "10"));
  REQUIRE(b.size() == 5);

  SECTION("booleans: all four subsets") {
    EnumeratedDomain d = enumerate_domain(store().sort("bool"), b, 1 << 20);
    REQUIRE(d.elements.size() == 4);
    std::set<std::set<TermId>> subsets;
    for (auto& e : d.elements) subsets.insert(as_set(e.members));
    std::set<std::set<TermId>> want = {
        {}, {t(afs, "true")}, {t(afs, "false")}, {t(afs, "true"), t(afs, "false")}};
    CHECK(subsets == want);
  }
  SECTION("strings: all eight subsets of the three string members") {
    EnumeratedDomain d = enumerate_domain(store().sort("string"), b, 1 << 20);
    CHECK(d.elements.size() == 8);
  }
  SECTION("two inhabitants give four subsets") {
    AFS tiny = parse_afs(
        "cons c : string; cons d : string;\n"
        "def f : [string] => string;\n"
        "rule f(xs) -> c;\n"
        "rule f(xs) -> d;\n");
    DataSet b2 = compute_data_set(tiny, parse_term(tiny, "f(c)"));
    REQUIRE(b2.size() == 2);
    EnumeratedDomain d = enumerate_domain(store().sort("string"), b2, 1 << 20);
    CHECK(d.elements.size() == 4);
  }
  SECTION("function space sizes multiply out") {
    TypeId bb = store().arrow(store().sort("bool"), store().sort("bool"));
    EnumeratedDomain d = enumerate_domain(bb, b, 1 << 20);
    CHECK(d.elements.size() == 256);  // 4^4
    CHECK_THROWS_AS(enumerate_domain(bb, b, 100), DomainTooLarge);
  }
}

TEST_CASE("evaluator base cases against an unconfirmed table") {
  AFS& afs = corpus_afs("palindrome");
  TermId start = decide_start(afs, "10");
  Saturation sat(afs, start);
  SECTION("data terms evaluate to themselves") {
    uint64_t v = sat.eval_closed(t(afs, "true"));
    CHECK(sat.value_terms(store().sort("bool"), v) ==
          std::vector<TermId>{t(afs, "true")});
  }
  SECTION("defined symbols are unconfirmed before any iteration") {
    uint64_t v = sat.eval_closed(t(afs, "chk1(0(|>), |>)"));
    CHECK(v == 0);
  }
  SECTION("a constant abstraction maps every element to the constant") {
    AFS& ho = corpus_afs("hocount");
    TermId hostart = store().fun(ho.find_symbol("ite"),
                                 {t(ho, "true"), t(ho, "true"), t(ho, "false")});
    Saturation hsat(ho, hostart);
    TermId lam = t(ho, "\\x:string. false");
    TypeId lam_ty = store().node(lam).type;
    uint64_t id = hsat.eval_closed(lam);
    uint64_t false_bits = hsat.eval_closed(t(ho, "false"));
    for (uint64_t img : hsat.function_table(lam_ty, id)) CHECK(img == false_bits);
  }
}

TEST_CASE("saturation on the worked palindrome instance") {
  AFS& afs = corpus_afs("palindrome");
  SaturationStats stats;
  std::vector<TermId> result =
      saturate(afs, decide_start(afs, "10"), SaturationOptions{}, &stats);
  // "10" is not a palindrome: exactly {false}.
  REQUIRE(result.size() == 1);
  CHECK(result[0] == t(afs, "false"));

  // The quantities of the worked example: |B| = 5, 4 boolean and 8 string
  // semantic values, 432 statements in total.
  CHECK(stats.data_set_size == 5);
  REQUIRE_FALSE(stats.statement_count.inf);
  CHECK(stats.statement_count.v == 432);
  bool found_bool = false, found_string = false;
  for (const DomainCheck& c : stats.domain_checks) {
    if (c.type == store().sort("bool")) {
      CHECK_FALSE(c.size.inf);
      CHECK(c.size.v == 4);
      found_bool = true;
    }
    if (c.type == store().sort("string")) {
      CHECK_FALSE(c.size.inf);
      CHECK(c.size.v == 8);
      found_string = true;
    }
  }
  CHECK(found_bool);
  CHECK(found_string);

  // Fixpoint within #statements + 2 rounds.
  CHECK(stats.iterations <= stats.statement_count.v + 2);
}

TEST_CASE("saturation agrees with the satisfiability example") {
  AFS& afs = corpus_afs("sat");
  std::vector<TermId> result = saturate(afs, decide_start(afs, "10?#?10#"));
  CHECK(as_set(result).count(t(afs, "true")) == 1);
}

TEST_CASE("a symbol without rules confirms nothing") {
  AFS afs = parse_afs(
      "cons |> : string; cons 1 : [string] => string;\n"
      "cons true : bool; cons false : bool;\n"
      "def decide : [string] => bool;\n"
      "def other : [string] => bool;\n"
      "rule other(xs) -> true;\n");
  CHECK(saturate(afs, decide_start(afs, "1")).empty());
}

TEST_CASE("decide by saturation") {
  AFS& sat = corpus_afs("sat");
  CHECK(decide_by_saturation(sat, "11?#000#?11#"));
  REQUIRE_FALSE(sat_oracle::satisfiable("1#0#"));
  CHECK_FALSE(decide_by_saturation(sat, "1#0#"));
  AFS& pal = corpus_afs("palindrome");
  CHECK(decide_by_saturation(pal, "11"));
}

TEST_CASE("saturation equals exhausted search on small corpus instances") {
  SECTION("palindrome inputs") {
    AFS& afs = corpus_afs("palindrome");
    Rewriter rw(afs);
    for (const char* w : {"0", "1", "01", "11", "010", "0110", "1001", "1011"}) {
      TermId start = decide_start(afs, w);
      SearchResult res = rw.search(start, SearchBudget{});
      REQUIRE(res.exhausted);
      std::vector<TermId> sat_result = saturate(afs, start);
      INFO(w);
      CHECK(as_set(sat_result) == as_set(res.data_normal_forms));
    }
  }
  SECTION("sat instances with small reachable sets") {
    AFS& afs = corpus_afs("sat");
    Rewriter rw(afs);
    for (const char* w : {"1#", "0#", "?#", "1#0#", "10#", "11#01#"}) {
      TermId start = decide_start(afs, w);
      SearchResult res = rw.search(start, SearchBudget{500'000, 10'000});
      REQUIRE(res.exhausted);
      std::vector<TermId> sat_result = saturate(afs, start);
      INFO(w);
      CHECK(as_set(sat_result) == as_set(res.data_normal_forms));
    }
  }
  SECTION("a budget-starved search still underapproximates saturation") {
    AFS& afs = corpus_afs("sat");
    Rewriter rw(afs);
    TermId start = decide_start(afs, "11?#000#?11#");
    SearchResult res = rw.search(start, SearchBudget{3'000, 10'000});
    REQUIRE_FALSE(res.exhausted);
    std::set<TermId> sat_result = as_set(saturate(afs, start));
    for (TermId d : res.data_normal_forms) CHECK(sat_result.count(d) == 1);
  }
}

TEST_CASE("closed-term evaluation handles higher-order values") {
  AFS& ho = corpus_afs("hocount");
  // The number one, applied to position zero, is the bit true.
  TermId one_at_zero =
      beta_normalize(t(ho, "(\\x:string. succ(\\y:string. false, x)) |>"));
  for (uint64_t seed : {0ull, 1ull, 99ull}) {
    SaturationOptions opts;
    opts.perm_seed = seed;
    std::vector<TermId> result = saturate_closed_term(ho, one_at_zero, opts);
    REQUIRE(result.size() == 1);
    CHECK(result[0] == t(ho, "true"));
  }
  // Exhaustive search agrees.
  SearchResult res = search_data_normal_forms(ho, one_at_zero, SearchBudget{});
  REQUIRE(res.exhausted);
  CHECK(res.data_normal_forms == std::vector<TermId>{t(ho, "true")});
}

TEST_CASE("domain cap fails cleanly") {
  AFS& afs = corpus_afs("palindrome");
  SaturationOptions opts;
  opts.domain_cap = 4;
  CHECK_THROWS_AS(saturate(afs, decide_start(afs, "10"), opts), DomainTooLarge);
}

TEST_CASE("domain sizes respect the tower bound in every run") {
  for (const char* name : {"palindrome", "sat"}) {
    AFS& afs = corpus_afs(name);
    SaturationStats stats;
    saturate(afs, decide_start(afs, name == std::string("sat") ? "10?#?10#" : "0110"),
             SaturationOptions{}, &stats);
    CHECK(stats.all_bounds_ok);
    for (const DomainCheck& c : stats.domain_checks) CHECK(c.within_bound);
  }
}
