#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace consfree;
using namespace testing_helpers;

TEST_CASE("typing of the running examples") {
  AFS& afs = corpus_afs("hocount");
  CHECK(infer_type(t(afs, "true")) == store().sort("bool"));

  TermId lam = t(afs, "\\x:string. 0(1(x))");
  CHECK(infer_type(lam) == store().arrow(store().sort("string"), store().sort("string")));

  TermId redex = t(afs, "(\\x:string. 0(x)) (1(y))");
  CHECK(infer_type(redex) == store().sort("string"));
}

TEST_CASE("typing errors identify the offense") {
  AFS& afs = corpus_afs("hocount");
  CHECK_THROWS_AS(t(afs, "ite(true, true)"), Error);            // arity
  CHECK_THROWS_AS(t(afs, "true false"), Error);                 // non-arrow applied
  CHECK_THROWS_AS(t(afs, "not(0(|>))"), Error);                 // wrong argument sort
  // Binder shadowing is scoping, not an error.
  TermId shadow = t(afs, "\\x:bool. (\\x:string. 0(x)) |>");
  CHECK(store().type(infer_type(shadow)).arrow);
}

TEST_CASE("type order") {
  TypeId str = store().sort("string");
  TypeId bl = store().sort("bool");
  CHECK(type_order(str) == 0);
  CHECK(type_order(store().arrow(bl, bl)) == 1);
  TypeDecl second{{store().arrow(bl, bl), str}, str};
  CHECK(decl_order(second) == 2);
  TypeDecl nullary{{}, str};
  CHECK(decl_order(nullary) == 0);
}

TEST_CASE("alpha equivalence is nameless") {
  AFS& afs = corpus_afs("hocount");
  CHECK(alpha_equal(t(afs, "\\x:bool. x"), t(afs, "\\y:bool. y")));
  CHECK_FALSE(alpha_equal(t(afs, "\\x:string. 0(x)"), t(afs, "\\x:string. 1(x)")));

  // Independent de Bruijn conversion oracle for the nested-binder case.
  NamedTerm a = nabs("x", nabs("y", nvar("x")));
  NamedTerm b = nabs("y", nabs("x", nvar("x")));
  REQUIRE(de_bruijn_string(a) != de_bruijn_string(b));
  CHECK_FALSE(alpha_equal(t(afs, "\\x:bool. \\y:bool. x"),
                          t(afs, "\\y:bool. \\x:bool. x")));
  // And a positive case the oracle agrees on.
  NamedTerm c = nabs("u", nabs("v", nvar("u")));
  REQUIRE(de_bruijn_string(a) == de_bruijn_string(c));
  CHECK(alpha_equal(t(afs, "\\x:bool. \\y:bool. x"), t(afs, "\\u:bool. \\v:bool. u")));
}

TEST_CASE("substitution") {
  AFS& afs = corpus_afs("hocount");
  TypeId str = store().sort("string");
  TermId x = store().var(store().name("x"), str);
  TermId y = store().var(store().name("y"), str);

  SECTION("direct replacement") {
    Substitution s;
    s.bind(x, t(afs, "|>"));
    CHECK(apply_substitution(x, s) == t(afs, "|>"));
  }
  SECTION("capture avoidance") {
    // (\y. x)[x := y] must not capture the free y.
    TermId lam = make_abs(y, x);
    Substitution s;
    s.bind(x, y);
    TermId r = apply_substitution(lam, s);
    // result is \y'. y with y free
    std::unordered_set<TermId> fv;
    free_vars(r, fv);
    REQUIRE(fv.size() == 1);
    CHECK(*fv.begin() == y);
    CHECK(store().node(store().node(r).b).kind == Kind::Var);
  }
  SECTION("bound occurrences untouched") {
    TermId lam = t(afs, "\\x:string. 0(x)");
    Substitution s;
    s.bind(x, t(afs, "1(|>)"));
    CHECK(apply_substitution(lam, s) == lam);
  }
  SECTION("type preservation") {
    CHECK_THROWS_AS([&] {
      Substitution s;
      s.bind(x, t(afs, "true"));
    }(), TypeError);
  }
}

TEST_CASE("matching") {
  AFS& count = corpus_afs("count");
  SECTION("pattern binds the argument") {
    TermId pat = store().fun(count.find_symbol("succ"), {t(count, "1(xs)")});
    TermId subj = t(count, "succ(1(0(|>)))");
    auto m = match_pattern(pat, subj, true);
    REQUIRE(m.has_value());
    REQUIRE(m->binds.size() == 1);
    CHECK(m->binds[0].second == t(count, "0(|>)"));
  }
  SECTION("nonlinear patterns require equal subjects") {
    AFS& nl = corpus_afs("nonlinear-tm");
    TermId pat = t(nl, "equal(xl, xl)");
    CHECK_FALSE(match_pattern(pat, t(nl, "equal(|>, 0(|>))"), false).has_value());
    auto m = match_pattern(pat, t(nl, "equal(0(|>), 0(|>))"), false);
    REQUIRE(m.has_value());
    CHECK(m->binds[0].second == t(nl, "0(|>)"));
  }
}

TEST_CASE("beta normalization") {
  AFS& afs = corpus_afs("hocount");
  CHECK(beta_normalize(t(afs, "(\\x:string. 0(x)) (1(|>))")) == t(afs, "0(1(|>))"));
  CHECK(beta_normalize(t(afs, "true")) == t(afs, "true"));
  // ONE |> -> succ(\y. false, |>) in one beta step
  TermId one_applied = t(afs, "(\\x:string. succ(\\y:string. false, x)) |>");
  CHECK(beta_normalize(one_applied) == t(afs, "succ(\\y:string. false, |>)"));
}

TEST_CASE("alpha equivalence is an equivalence relation on random terms") {
  AFS& afs = corpus_afs("palindrome");
  TermGen gen(afs, 20260112);
  for (int i = 0; i < 200; ++i) {
    TermId a = gen.term_of_sort(store().sort("bool"), 4);
    TermId b = gen.term_of_sort(store().sort("bool"), 4);
    TermId c = gen.term_of_sort(store().sort("bool"), 3);
    CHECK(alpha_equal(a, a));
    if (alpha_equal(a, b)) CHECK(alpha_equal(b, a));
    if (alpha_equal(a, b) && alpha_equal(b, c)) CHECK(alpha_equal(a, c));
  }
}

TEST_CASE("substitution commutes with typing; beta is idempotent and type-preserving") {
  AFS& afs = corpus_afs("palindrome");
  TermGen gen(afs, 777);
  TypeId str = store().sort("string");
  TermId x = store().var(store().name("hole"), str);
  for (int i = 0; i < 200; ++i) {
    TermId body = gen.term_of_sort(str, 4);
    TermId image = gen.term_of_sort(str, 3);
    Substitution s;
    s.bind(x, image);
    TermId applied = apply_substitution(body, s);
    CHECK(infer_type(applied) == infer_type(body));

    TermId nf = beta_normalize(applied);
    CHECK(infer_type(nf) == infer_type(applied));
    CHECK(beta_normalize(nf) == nf);
  }
}

TEST_CASE("terms print and reparse") {
  AFS& afs = corpus_afs("sat");
  for (const char* src : {"decide(1(0('?'('#'(|>)))))", "either(|>, 0(|>))",
                          "eq(xs, '#'(ys))"}) {
    TermId t1 = t(afs, src);
    CHECK(parse_term(afs, print_term(t1)) == t1);
  }
  AFS& ho = corpus_afs("hocount");
  TermId lam = t(ho, "\\x:string. succ(\\y:string. false, x)");
  CHECK(parse_term(ho, print_term(lam)) == lam);
}
