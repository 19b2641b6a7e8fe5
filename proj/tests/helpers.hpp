#pragma once

#include <random>
#include <string>
#include <vector>

#include "consfree/afs.hpp"
#include "consfree/corpus.hpp"
#include "consfree/parse.hpp"
#include "consfree/print.hpp"
#include "consfree/store.hpp"
#include "consfree/term_ops.hpp"

namespace testing_helpers {

using namespace consfree;

inline AFS& corpus_afs(const std::string& name) {
  static std::map<std::string, AFS> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  for (const CorpusEntry& e : corpus_entries()) {
    if (e.name == name) {
      auto [pos, _] = cache.emplace(name, parse_afs(e.source));
      return pos->second;
    }
  }
  throw Error("no corpus entry named " + name);
}

inline TermId t(const AFS& afs, const std::string& text) {
  return parse_term(afs, text);
}

// ---------------------------------------------------------------------------
// Independent oracle: a tiny named-variable lambda AST with its own
// conversion to de Bruijn strings, for checking alpha equivalence claims
// against the interned representation.

struct NamedTerm {
  enum { Var, App, Abs, Sym } kind;
  std::string name;  // Var/Abs binder/Sym head
  std::vector<NamedTerm> children;
};

inline NamedTerm nvar(std::string n) { return {NamedTerm::Var, std::move(n), {}}; }
inline NamedTerm nabs(std::string x, NamedTerm body) {
  return {NamedTerm::Abs, std::move(x), {std::move(body)}};
}
inline NamedTerm napp(NamedTerm f, NamedTerm x) {
  return {NamedTerm::App, "", {std::move(f), std::move(x)}};
}
inline NamedTerm nsym(std::string head, std::vector<NamedTerm> args = {}) {
  return {NamedTerm::Sym, std::move(head), std::move(args)};
}

inline std::string de_bruijn_string(const NamedTerm& t, std::vector<std::string>& env) {
  switch (t.kind) {
    case NamedTerm::Var: {
      for (size_t i = env.size(); i > 0; --i)
        if (env[i - 1] == t.name) return "b" + std::to_string(env.size() - i);
      return "f:" + t.name;
    }
    case NamedTerm::App: {
      std::string a = de_bruijn_string(t.children[0], env);
      std::string b = de_bruijn_string(t.children[1], env);
      return "(" + a + " " + b + ")";
    }
    case NamedTerm::Abs: {
      env.push_back(t.name);
      std::string b = de_bruijn_string(t.children[0], env);
      env.pop_back();
      return "\\." + b;
    }
    case NamedTerm::Sym: {
      std::string s = t.name + "(";
      for (size_t i = 0; i < t.children.size(); ++i) {
        if (i) s += ",";
        s += de_bruijn_string(t.children[i], env);
      }
      return s + ")";
    }
  }
  return "?";
}

inline std::string de_bruijn_string(const NamedTerm& t) {
  std::vector<std::string> env;
  return de_bruijn_string(t, env);
}

// ---------------------------------------------------------------------------
// Random well-typed term generation over the string signature, for property
// tests. Generates base-sort terms mixing constructors, defined symbols,
// abstractions and applications.

struct TermGen {
  const AFS& afs;
  std::mt19937_64 rng;
  TypeId str, boolean;

  TermGen(const AFS& a, uint64_t seed)
      : afs(a), rng(seed), str(store().sort("string")), boolean(store().sort("bool")) {}

  TermId data_string(int max_len) {
    TermId t = consfree::parse_term(afs, "|>");
    int len = static_cast<int>(rng() % (max_len + 1));
    for (int i = 0; i < len; ++i) {
      std::string c = (rng() & 1) ? "1" : "0";
      t = store().fun(afs.find_symbol(c), {t});
    }
    return t;
  }

  // A random term of the requested sort built from the signature, with a
  // chance of wrapping identity-shaped redexes to exercise beta.
  TermId term_of_sort(TypeId sort, int depth) {
    Store& st = store();
    if (depth <= 0 || (rng() % 4 == 0)) {
      if (sort == str) return data_string(3);
      return consfree::parse_term(afs, (rng() & 1) ? "true" : "false");
    }
    if (rng() % 5 == 0) {
      // (\x:sort. x) t
      TermId var = st.var(st.name("rx"), sort);
      TermId id = make_abs(var, var);
      return st.app(id, term_of_sort(sort, depth - 1));
    }
    std::vector<SymId> candidates;
    for (SymId s : afs.constructors)
      if (st.sym(s).decl.out == sort && decl_order(st.sym(s).decl) <= 1)
        candidates.push_back(s);
    for (SymId s : afs.defined) {
      bool first_order = true;
      for (TypeId a : st.sym(s).decl.args)
        if (!st.is_sort(a)) first_order = false;
      if (first_order && st.sym(s).decl.out == sort) candidates.push_back(s);
    }
    if (candidates.empty()) return term_of_sort(sort, 0);
    SymId s = candidates[rng() % candidates.size()];
    std::vector<TermId> args;
    for (TypeId a : st.sym(s).decl.args) args.push_back(term_of_sort(a, depth - 1));
    return st.fun(s, args);
  }
};

}  // namespace testing_helpers
