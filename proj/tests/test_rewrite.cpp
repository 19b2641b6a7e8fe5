#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "sat_oracle.hpp"

using namespace consfree;
using namespace testing_helpers;

namespace {

// Position-by-position reduct enumeration, written independently of the
// engine's recursion for cross-checking on small terms.
void naive_reducts(const AFS& afs, TermId t, std::set<TermId>& out) {
  Store& st = store();
  const TermNode& n = st.node(t);
  if (n.kind == Kind::Fun) {
    for (uint32_t ri : afs.rules_for(n.a)) {
      const Rule& r = afs.rules[ri];
      if (auto m = match_pattern(r.lhs, t, false))
        out.insert(apply_substitution(r.rhs, *m));
    }
  }
  if (n.kind == Kind::App && st.node(n.a).kind == Kind::Abs)
    out.insert(beta_contract(st.node(n.a).b, n.b));
  // positions below the root
  switch (n.kind) {
    case Kind::Fun: {
      for (uint32_t i = 0; i < n.argc; ++i) {
        std::set<TermId> inner;
        naive_reducts(afs, st.fun_arg(t, i), inner);
        for (TermId u : inner) {
          std::vector<TermId> args;
          for (uint32_t j = 0; j < n.argc; ++j) args.push_back(st.fun_arg(t, j));
          args[i] = u;
          out.insert(st.fun(n.a, args));
        }
      }
      break;
    }
    case Kind::App: {
      std::set<TermId> fs, xs;
      naive_reducts(afs, n.a, fs);
      naive_reducts(afs, n.b, xs);
      for (TermId f : fs) out.insert(st.app(f, n.b));
      for (TermId x : xs) out.insert(st.app(n.a, x));
      break;
    }
    case Kind::Abs: {
      std::set<TermId> bs;
      naive_reducts(afs, n.b, bs);
      for (TermId b : bs) out.insert(st.abs(n.a, st.type(n.type).left, b));
      break;
    }
    default:
      break;
  }
}

}  // namespace

TEST_CASE("one-step reducts") {
  SECTION("successor example") {
    AFS& afs = corpus_afs("count");
    auto r = one_step_reducts(afs, t(afs, "succ(1(0(1(|>))))"));
    REQUIRE(r.size() == 1);
    CHECK(r[0] == t(afs, "0(succ(0(1(|>))))"));
  }
  SECTION("data terms are normal forms") {
    AFS& afs = corpus_afs("count");
    CHECK(one_step_reducts(afs, t(afs, "true")).empty());
  }
  SECTION("overlapping rules give both reducts") {
    AFS& afs = corpus_afs("sat");
    auto r = one_step_reducts(afs, t(afs, "either(|>, 0(|>))"));
    std::set<TermId> got(r.begin(), r.end());
    CHECK(got == std::set<TermId>{t(afs, "|>"), t(afs, "0(|>)")});
  }
}

TEST_CASE("reduct enumeration agrees with a naive position walk") {
  AFS& afs = corpus_afs("sat");
  TermGen gen(afs, 424242);
  Rewriter rw(afs);
  int nontrivial = 0;
  for (int i = 0; i < 300; ++i) {
    TermId u = gen.term_of_sort(store().sort(i % 2 ? "string" : "bool"), 4);
    if (store().node(u).size > 50) continue;
    std::set<TermId> naive;
    naive_reducts(afs, u, naive);
    const auto& got = rw.one_step_reducts(u);
    CHECK(std::set<TermId>(got.begin(), got.end()) == naive);
    if (!naive.empty()) nontrivial++;
  }
  CHECK(nontrivial > 50);
}

TEST_CASE("search for data normal forms") {
  SECTION("second-order bit lookup") {
    AFS& afs = corpus_afs("hocount");
    TermId one_at_zero = t(afs, "(\\x:string. succ(\\y:string. false, x)) |>");
    SearchResult res = search_data_normal_forms(afs, one_at_zero, SearchBudget{});
    CHECK(res.exhausted);
    REQUIRE(res.data_normal_forms.size() == 1);
    CHECK(res.data_normal_forms[0] == t(afs, "true"));
  }
  SECTION("already data") {
    AFS& afs = corpus_afs("palindrome");
    SearchResult res = search_data_normal_forms(afs, t(afs, "true"), SearchBudget{});
    CHECK(res.exhausted);
    CHECK(res.visited == 1);
    REQUIRE(res.data_normal_forms.size() == 1);
  }
  SECTION("palindrome decision by exhaustive search") {
    AFS& afs = corpus_afs("palindrome");
    TermId start = store().fun(find_decide_symbol(afs), {encode_input(afs, "0110")});
    SearchResult res = search_data_normal_forms(afs, start, SearchBudget{});
    CHECK(res.exhausted);
    bool has_true = false;
    for (TermId d : res.data_normal_forms) has_true |= d == t(afs, "true");
    CHECK(has_true);
  }
}

TEST_CASE("search result terms are data normal forms; budgets are monotone") {
  AFS& afs = corpus_afs("sat");
  TermId start = store().fun(find_decide_symbol(afs), {encode_input(afs, "1?#")});
  Rewriter rw(afs);
  SearchResult small = rw.search(start, SearchBudget{200, 10'000});
  SearchResult big = rw.search(start, SearchBudget{200'000, 10'000});
  CHECK(big.exhausted);
  for (TermId d : big.data_normal_forms) {
    CHECK(afs.is_data(d));
    CHECK(rw.one_step_reducts(d).empty());
  }
  for (TermId d : small.data_normal_forms)
    CHECK(std::find(big.data_normal_forms.begin(), big.data_normal_forms.end(), d) !=
          big.data_normal_forms.end());
  // determinism
  SearchResult again = rw.search(start, SearchBudget{200'000, 10'000});
  CHECK(again.data_normal_forms == big.data_normal_forms);
  CHECK(again.visited == big.visited);
}

TEST_CASE("acceptance judgments") {
  AFS& sat = corpus_afs("sat");
  SECTION("satisfiable instance from the worked example") {
    CHECK(accepts(sat, "10?#?10#", SearchBudget{}) == Acceptance::accepted);
  }
  SECTION("unsatisfiable instance is refuted exhaustively") {
    REQUIRE_FALSE(sat_oracle::satisfiable("1#0#"));
    CHECK(accepts(sat, "1#0#", SearchBudget{}) == Acceptance::refuted);
  }
  SECTION("tiny budget reports unknown") {
    CHECK(accepts(sat, "10?#?10#", SearchBudget{20, 10'000}) == Acceptance::unknown);
  }
  SECTION("missing decide symbol") {
    AFS& count = corpus_afs("count");
    CHECK_THROWS_AS(accepts(count, "1", SearchBudget{}), Error);
  }
  SECTION("alphabet errors") {
    CHECK_THROWS_AS(accepts(sat, "1a", SearchBudget{}), Error);
  }
}
