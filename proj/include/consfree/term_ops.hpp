#pragma once

// Operations on interned terms: typing, substitution, beta normalization,
// matching and subterm queries.

#include <algorithm>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "consfree/store.hpp"

namespace consfree {

// Terms are identified up to alpha conversion by construction.
inline bool alpha_equal(TermId a, TermId b) { return a == b; }

// A type-preserving map from variables to terms. Keys are Var term ids
// (a variable is identified by its name and type).
struct Substitution {
  std::vector<std::pair<TermId, TermId>> binds;

  std::optional<TermId> lookup(TermId var) const {
    for (auto& [v, t] : binds)
      if (v == var) return t;
    return std::nullopt;
  }
  void bind(TermId var, TermId t) {
    if (store().node(var).type != store().node(t).type)
      throw TypeError("substitution is not type-preserving");
    binds.emplace_back(var, t);
  }
};

namespace detail {

inline TermId map_term(TermId t, std::unordered_map<TermId, TermId>& memo,
                       const std::function<std::optional<TermId>(TermId)>& leaf) {
  auto it = memo.find(t);
  if (it != memo.end()) return it->second;
  Store& st = store();
  const TermNode& n = st.node(t);
  TermId out = t;
  if (auto r = leaf(t)) {
    out = *r;
  } else {
    switch (n.kind) {
      case Kind::Var:
      case Kind::Bound:
        out = t;
        break;
      case Kind::App: {
        TermId f = map_term(n.a, memo, leaf);
        TermId x = map_term(n.b, memo, leaf);
        out = (f == n.a && x == n.b) ? t : st.app(f, x);
        break;
      }
      case Kind::Abs: {
        TermId body = map_term(n.b, memo, leaf);
        out = (body == n.b) ? t : st.abs(n.a, st.type(n.type).left, body);
        break;
      }
      case Kind::Fun: {
        std::vector<TermId> args(n.argc);
        bool changed = false;
        for (uint32_t i = 0; i < n.argc; ++i) {
          TermId a = st.fun_arg(t, i);
          args[i] = map_term(a, memo, leaf);
          changed |= args[i] != a;
        }
        out = changed ? st.fun(n.a, args) : t;
        break;
      }
    }
  }
  memo.emplace(t, out);
  return out;
}

}  // namespace detail

// Capture-avoiding substitution of free variables. Substitution images are
// locally closed, so de Bruijn indices never need shifting and free
// variables of images cannot be captured.
inline TermId apply_substitution(TermId t, const Substitution& subst) {
  if (subst.binds.empty()) return t;
  std::unordered_map<TermId, TermId> memo;
  return detail::map_term(t, memo, [&](TermId u) -> std::optional<TermId> {
    if (store().node(u).kind == Kind::Var) return subst.lookup(u);
    return std::nullopt;
  });
}

namespace detail {

// Replace de Bruijn index `depth` by `v` (locally closed), shifting deeper
// indices down by one.
inline TermId open_at(TermId t, uint32_t depth, TermId v,
                      std::unordered_map<uint64_t, TermId>& memo) {
  Store& st = store();
  const TermNode& n = st.node(t);
  if (n.loose <= depth) return t;  // no index at or above `depth` occurs
  uint64_t key = (static_cast<uint64_t>(t) << 20) | depth;
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  TermId out;
  switch (n.kind) {
    case Kind::Bound:
      if (n.a == depth) out = v;
      else if (n.a > depth) out = st.bound(n.a - 1, n.type);
      else out = t;
      break;
    case Kind::App:
      out = st.app(open_at(n.a, depth, v, memo), open_at(n.b, depth, v, memo));
      break;
    case Kind::Abs:
      out = st.abs(n.a, st.type(n.type).left, open_at(n.b, depth + 1, v, memo));
      break;
    case Kind::Fun: {
      std::vector<TermId> args(n.argc);
      for (uint32_t i = 0; i < n.argc; ++i)
        args[i] = open_at(st.fun_arg(t, i), depth, v, memo);
      out = st.fun(n.a, args);
      break;
    }
    default:
      out = t;
  }
  memo.emplace(key, out);
  return out;
}

// Turn free occurrences of variable `var` into de Bruijn index `depth`.
inline TermId close_at(TermId t, uint32_t depth, TermId var,
                       std::unordered_map<uint64_t, TermId>& memo) {
  Store& st = store();
  const TermNode& n = st.node(t);
  if (!(n.flags & kHasFreeVar) && n.loose == 0) return t;
  uint64_t key = (static_cast<uint64_t>(t) << 20) | depth;
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  TermId out;
  switch (n.kind) {
    case Kind::Var:
      out = (t == var) ? st.bound(depth, n.type) : t;
      break;
    case Kind::Bound:
      out = (n.a >= depth) ? st.bound(n.a + 1, n.type) : t;
      break;
    case Kind::App:
      out = st.app(close_at(n.a, depth, var, memo), close_at(n.b, depth, var, memo));
      break;
    case Kind::Abs:
      out = st.abs(n.a, st.type(n.type).left, close_at(n.b, depth + 1, var, memo));
      break;
    case Kind::Fun: {
      std::vector<TermId> args(n.argc);
      for (uint32_t i = 0; i < n.argc; ++i)
        args[i] = close_at(st.fun_arg(t, i), depth, var, memo);
      out = st.fun(n.a, args);
      break;
    }
    default:
      out = t;
  }
  memo.emplace(key, out);
  return out;
}

}  // namespace detail

// Contract a beta redex (\x. body) v.
inline TermId beta_contract(TermId body, TermId v) {
  std::unordered_map<uint64_t, TermId> memo;
  return detail::open_at(body, 0, v, memo);
}

// Bind free occurrences of `var` in `body` and wrap in an abstraction.
inline TermId make_abs(TermId var, TermId body) {
  const TermNode& vn = store().node(var);
  if (vn.kind != Kind::Var) throw InternalBug("make_abs expects a variable");
  std::unordered_map<uint64_t, TermId> memo;
  TermId closed = detail::close_at(body, 0, var, memo);
  return store().abs(vn.a, vn.type, closed);
}

// Full beta normalization. Terminates because terms are simply typed.
inline TermId beta_normalize(TermId t) {
  Store& st = store();
  std::unordered_map<TermId, TermId> memo;
  std::function<TermId(TermId)> nf = [&](TermId u) -> TermId {
    auto it = memo.find(u);
    if (it != memo.end()) return it->second;
    const TermNode& n = st.node(u);
    TermId out = u;
    switch (n.kind) {
      case Kind::App: {
        TermId f = nf(n.a);
        TermId x = nf(n.b);
        if (st.node(f).kind == Kind::Abs)
          out = nf(beta_contract(st.node(f).b, x));
        else
          out = (f == n.a && x == n.b) ? u : st.app(f, x);
        break;
      }
      case Kind::Abs: {
        TermId body = nf(n.b);
        out = (body == n.b) ? u : st.abs(n.a, st.type(n.type).left, body);
        break;
      }
      case Kind::Fun: {
        std::vector<TermId> args(n.argc);
        bool changed = false;
        for (uint32_t i = 0; i < n.argc; ++i) {
          TermId a = st.fun_arg(u, i);
          args[i] = nf(a);
          changed |= args[i] != a;
        }
        out = changed ? st.fun(n.a, args) : u;
        break;
      }
      default:
        break;
    }
    memo.emplace(u, out);
    return out;
  };
  return nf(t);
}

// First-order matching of a rule pattern against a subject. Patterns are
// function applications over constructors and variables; repeated pattern
// variables must bind alpha-equal subjects. With linear=true the caller
// asserts the pattern is left-linear and the consistency check is skipped.
inline bool match_into(TermId pattern, TermId subject, bool linear, Substitution& out) {
  Store& st = store();
  const TermNode& p = st.node(pattern);
  switch (p.kind) {
    case Kind::Var: {
      if (!linear) {
        if (auto prev = out.lookup(pattern)) return *prev == subject;
      }
      out.binds.emplace_back(pattern, subject);
      return true;
    }
    case Kind::Fun: {
      const TermNode& s = st.node(subject);
      if (s.kind != Kind::Fun || s.a != p.a) return false;
      for (uint32_t i = 0; i < p.argc; ++i)
        if (!match_into(st.fun_arg(pattern, i), st.fun_arg(subject, i), linear, out))
          return false;
      return true;
    }
    default:
      // Rule left-hand sides contain no applications or abstractions.
      return pattern == subject;
  }
}

inline std::optional<Substitution> match_pattern(TermId pattern, TermId subject,
                                                 bool linear) {
  Substitution s;
  if (match_into(pattern, subject, linear, s)) return s;
  return std::nullopt;
}

// All subterm ids, including the term itself and bodies under binders.
inline void collect_subterms(TermId t, std::unordered_set<TermId>& out) {
  if (!out.insert(t).second) return;
  Store& st = store();
  const TermNode& n = st.node(t);
  switch (n.kind) {
    case Kind::App:
      collect_subterms(n.a, out);
      collect_subterms(n.b, out);
      break;
    case Kind::Abs:
      collect_subterms(n.b, out);
      break;
    case Kind::Fun:
      for (uint32_t i = 0; i < n.argc; ++i) collect_subterms(st.fun_arg(t, i), out);
      break;
    default:
      break;
  }
}

inline void free_vars(TermId t, std::unordered_set<TermId>& out) {
  Store& st = store();
  const TermNode& n = st.node(t);
  if (!(n.flags & kHasFreeVar)) return;
  switch (n.kind) {
    case Kind::Var:
      out.insert(t);
      break;
    case Kind::App:
      free_vars(n.a, out);
      free_vars(n.b, out);
      break;
    case Kind::Abs:
      free_vars(n.b, out);
      break;
    case Kind::Fun:
      for (uint32_t i = 0; i < n.argc; ++i) free_vars(st.fun_arg(t, i), out);
      break;
    default:
      break;
  }
}

// Re-derive the type of a term, checking every typing clause. `env` gives
// expected types for free variables; a variable outside `env` types as its
// intrinsic annotation. Throws TypeError naming the offending subterm on
// failure; construction normally guarantees success.
TypeId infer_type(TermId t, const std::unordered_map<NameId, TypeId>& env);

inline TypeId infer_type(TermId t) {
  static const std::unordered_map<NameId, TypeId> empty;
  return infer_type(t, empty);
}

inline TypeId infer_type_impl(TermId t, const std::unordered_map<NameId, TypeId>& env,
                              std::vector<TypeId>& stack) {
  Store& st = store();
  const TermNode& n = st.node(t);
  switch (n.kind) {
    case Kind::Var: {
      auto it = env.find(n.a);
      if (it != env.end() && it->second != n.type)
        throw TypeError("variable " + st.name_str(n.a) + " used at the wrong type");
      return n.type;
    }
    case Kind::Bound: {
      if (n.a >= stack.size()) throw TypeError("dangling bound variable");
      TypeId ty = stack[stack.size() - 1 - n.a];
      if (ty != n.type) throw TypeError("bound variable type mismatch");
      return n.type;
    }
    case Kind::App: {
      TypeId ft = infer_type_impl(n.a, env, stack);
      TypeId xt = infer_type_impl(n.b, env, stack);
      const TypeNode& f = st.type(ft);
      if (!f.arrow) throw TypeError("application of a non-arrow term");
      if (f.left != xt) throw TypeError("ill-typed application argument");
      return f.right;
    }
    case Kind::Abs: {
      TypeId binder = st.type(n.type).left;
      stack.push_back(binder);
      TypeId body = infer_type_impl(n.b, env, stack);
      stack.pop_back();
      return st.arrow(binder, body);
    }
    case Kind::Fun: {
      const SymbolInfo& si = st.sym(n.a);
      if (si.decl.args.size() != n.argc)
        throw TypeError("arity mismatch for " + st.name_str(si.name));
      for (uint32_t i = 0; i < n.argc; ++i) {
        TypeId at = infer_type_impl(st.fun_arg(t, i), env, stack);
        if (at != si.decl.args[i])
          throw TypeError("argument " + std::to_string(i + 1) + " of " +
                          st.name_str(si.name) + " is ill-typed");
      }
      return si.decl.out;
    }
  }
  throw InternalBug("unreachable term kind");
}

inline TypeId infer_type(TermId t, const std::unordered_map<NameId, TypeId>& env) {
  std::vector<TypeId> stack;
  return infer_type_impl(t, env, stack);
}

}  // namespace consfree
