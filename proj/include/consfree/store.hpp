#pragma once

// Interned representation of types, symbols and terms.
//
// Terms are simply typed and immutable. Binders use de Bruijn indices
// internally (a display name is kept per abstraction but is not part of a
// term's identity), so alpha-equal terms always intern to the same id and
// substitution is capture-free by construction. Free variables are named
// and carry their type.

#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace consfree {

using NameId = uint32_t;
using TypeId = uint32_t;
using SymId = uint32_t;
using TermId = uint32_t;

constexpr uint32_t kNone = 0xffffffffu;

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};
struct TypeError : Error {
  explicit TypeError(const std::string& m) : Error(m) {}
};
struct ParseError : Error {
  int line, col;
  ParseError(const std::string& m, int l, int c)
      : Error(m + " (line " + std::to_string(l) + ", col " + std::to_string(c) + ")"),
        line(l), col(c) {}
};
struct ValidationFailure : Error {
  explicit ValidationFailure(const std::string& m) : Error(m) {}
};
struct DomainTooLarge : Error {
  explicit DomainTooLarge(const std::string& m) : Error(m) {}
};
struct ResourceLimit : Error {
  explicit ResourceLimit(const std::string& m) : Error(m) {}
};
struct InternalBug : Error {
  explicit InternalBug(const std::string& m) : Error(m) {}
};

inline uint64_t hash_mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

enum class Kind : uint8_t { Var, Bound, App, Abs, Fun };

// Node flags.
constexpr uint16_t kHasFreeVar = 1;   // contains a named free variable
constexpr uint16_t kFunOnly = 2;      // built from Fun nodes only
constexpr uint16_t kHasAbsApp = 4;    // contains an abstraction or application

struct TermNode {
  Kind kind;
  uint16_t flags;
  uint16_t loose;  // 1 + max dangling de Bruijn index (0 = locally closed)
  TypeId type;
  uint32_t a;      // Var: name, Bound: index, App: fun, Abs: name hint, Fun: symbol
  uint32_t b;      // App: arg, Abs: body, Fun: args offset in pool
  uint32_t argc;   // Fun only
  uint32_t size;   // syntactic node count (tree, not DAG)
  uint64_t hash;
};

struct TypeNode {
  bool arrow;
  NameId sort;       // if !arrow
  TypeId left, right;  // if arrow
  uint16_t order;
  uint64_t hash;
};

struct TypeDecl {
  std::vector<TypeId> args;
  TypeId out = kNone;  // always a sort
  bool operator==(const TypeDecl& o) const { return args == o.args && out == o.out; }
};

struct SymbolInfo {
  NameId name;
  TypeDecl decl;
};

// Global interning store. All tables are append-only; a single mutex guards
// insertion so term construction is safe from concurrent corpus runs.
class Store {
 public:
  static Store& get() {
    static Store s;
    return s;
  }

  // ---- names ---------------------------------------------------------
  NameId name(std::string_view s) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = name_map_.find(std::string(s));
    if (it != name_map_.end()) return it->second;
    NameId id = static_cast<NameId>(names_.size());
    names_.emplace_back(s);
    name_map_.emplace(names_.back(), id);
    return id;
  }
  const std::string& name_str(NameId id) const { return names_[id]; }

  // ---- types ---------------------------------------------------------
  TypeId sort(NameId n) {
    TypeNode t;
    t.arrow = false;
    t.sort = n;
    t.left = t.right = kNone;
    t.order = 0;
    t.hash = hash_mix(0x51, n);
    return intern_type(t);
  }
  TypeId sort(std::string_view n) { return sort(name(n)); }

  TypeId arrow(TypeId l, TypeId r) {
    TypeNode t;
    t.arrow = true;
    t.sort = kNone;
    t.left = l;
    t.right = r;
    t.order = static_cast<uint16_t>(
        std::max<int>(types_[l].order + 1, types_[r].order));
    t.hash = hash_mix(hash_mix(0xA7, l), r);
    return intern_type(t);
  }

  const TypeNode& type(TypeId id) const { return types_[id]; }
  bool is_sort(TypeId id) const { return !types_[id].arrow; }

  // ---- symbols -------------------------------------------------------
  SymId symbol(NameId n, TypeDecl decl) {
    std::lock_guard<std::mutex> lock(mu_);
    uint64_t h = hash_mix(0xF0, n);
    for (TypeId a : decl.args) h = hash_mix(h, a);
    h = hash_mix(h, decl.out);
    auto range = sym_map_.equal_range(h);
    for (auto it = range.first; it != range.second; ++it) {
      const SymbolInfo& si = syms_[it->second];
      if (si.name == n && si.decl == decl) return it->second;
    }
    SymId id = static_cast<SymId>(syms_.size());
    syms_.push_back(SymbolInfo{n, std::move(decl)});
    sym_map_.emplace(h, id);
    return id;
  }
  const SymbolInfo& sym(SymId id) const { return syms_[id]; }

  // ---- terms ---------------------------------------------------------
  TermId var(NameId n, TypeId ty) {
    TermNode t{};
    t.kind = Kind::Var;
    t.type = ty;
    t.a = n;
    t.b = kNone;
    t.argc = 0;
    t.size = 1;
    t.flags = kHasFreeVar;
    t.loose = 0;
    t.hash = hash_mix(hash_mix(0x11, n), ty);
    return intern_term(t, nullptr);
  }

  TermId bound(uint32_t idx, TypeId ty) {
    TermNode t{};
    t.kind = Kind::Bound;
    t.type = ty;
    t.a = idx;
    t.b = kNone;
    t.argc = 0;
    t.size = 1;
    t.flags = 0;
    t.loose = static_cast<uint16_t>(idx + 1);
    t.hash = hash_mix(hash_mix(0x22, idx), ty);
    return intern_term(t, nullptr);
  }

  TermId app(TermId f, TermId x) {
    const TermNode& fn = node(f);
    const TermNode& xn = node(x);
    const TypeNode& ft = type(fn.type);
    if (!ft.arrow)
      throw TypeError("application of a non-arrow term");
    if (ft.left != xn.type)
      throw TypeError("argument type mismatch in application");
    TermNode t{};
    t.kind = Kind::App;
    t.type = ft.right;
    t.a = f;
    t.b = x;
    t.argc = 0;
    t.size = fn.size + xn.size + 1;
    t.flags = static_cast<uint16_t>((fn.flags | xn.flags | kHasAbsApp) & ~kFunOnly);
    t.loose = std::max(fn.loose, xn.loose);
    t.hash = hash_mix(hash_mix(0x33, node(f).hash), node(x).hash);
    return intern_term(t, nullptr);
  }

  // Body must already use de Bruijn index 0 for the binder.
  TermId abs(NameId hint, TypeId binder_ty, TermId body) {
    const TermNode& bn = node(body);
    TermNode t{};
    t.kind = Kind::Abs;
    t.type = arrow(binder_ty, bn.type);
    t.a = hint;  // not part of identity
    t.b = body;
    t.argc = 0;
    t.size = bn.size + 1;
    t.flags = static_cast<uint16_t>((bn.flags | kHasAbsApp) & ~kFunOnly);
    t.loose = static_cast<uint16_t>(bn.loose > 0 ? bn.loose - 1 : 0);
    t.hash = hash_mix(hash_mix(0x44, bn.hash), t.type);
    return intern_term(t, nullptr);
  }

  TermId fun(SymId s, const std::vector<TermId>& args) {
    const SymbolInfo& si = sym(s);
    if (si.decl.args.size() != args.size())
      throw TypeError("arity mismatch for symbol " + name_str(si.name) + ": expected " +
                      std::to_string(si.decl.args.size()) + " arguments, got " +
                      std::to_string(args.size()));
    TermNode t{};
    t.kind = Kind::Fun;
    t.type = si.decl.out;
    t.a = s;
    t.argc = static_cast<uint32_t>(args.size());
    t.size = 1;
    t.flags = kFunOnly;
    t.loose = 0;
    uint64_t h = hash_mix(0x55, s);
    for (size_t i = 0; i < args.size(); ++i) {
      const TermNode& an = node(args[i]);
      if (an.type != si.decl.args[i])
        throw TypeError("argument " + std::to_string(i + 1) + " of " +
                        name_str(si.name) + " has the wrong type");
      t.size += an.size;
      t.flags = static_cast<uint16_t>(t.flags | (an.flags & (kHasFreeVar | kHasAbsApp)));
      if (!(an.flags & kFunOnly)) t.flags = static_cast<uint16_t>(t.flags & ~kFunOnly);
      t.loose = std::max(t.loose, an.loose);
      h = hash_mix(h, an.hash);
    }
    t.hash = h;
    return intern_term(t, &args);
  }

  const TermNode& node(TermId id) const { return terms_[id]; }
  TermId fun_arg(TermId id, uint32_t i) const { return arg_pool_[terms_[id].b + i]; }
  size_t term_count() const { return terms_.size(); }

 private:
  Store() {
    names_.reserve(1024);
    types_.reserve(256);
    terms_.reserve(1 << 16);
  }

  TypeId intern_type(const TypeNode& t) {
    std::lock_guard<std::mutex> lock(mu_);
    auto range = type_map_.equal_range(t.hash);
    for (auto it = range.first; it != range.second; ++it) {
      const TypeNode& c = types_[it->second];
      if (c.arrow == t.arrow && c.sort == t.sort && c.left == t.left && c.right == t.right)
        return it->second;
    }
    TypeId id = static_cast<TypeId>(types_.size());
    types_.push_back(t);
    type_map_.emplace(t.hash, id);
    return id;
  }

  TermId intern_term(const TermNode& t, const std::vector<TermId>* args) {
    std::lock_guard<std::mutex> lock(mu_);
    auto range = term_map_.equal_range(t.hash);
    for (auto it = range.first; it != range.second; ++it) {
      const TermNode& c = terms_[it->second];
      if (c.kind != t.kind || c.type != t.type) continue;
      switch (t.kind) {
        case Kind::Var:
        case Kind::Bound:
          if (c.a == t.a) return it->second;
          break;
        case Kind::App:
          if (c.a == t.a && c.b == t.b) return it->second;
          break;
        case Kind::Abs:
          if (c.b == t.b) return it->second;  // name hint ignored
          break;
        case Kind::Fun: {
          if (c.a != t.a || c.argc != t.argc) break;
          bool same = true;
          for (uint32_t i = 0; i < t.argc; ++i)
            if (arg_pool_[c.b + i] != (*args)[i]) { same = false; break; }
          if (same) return it->second;
          break;
        }
      }
    }
    TermNode stored = t;
    if (t.kind == Kind::Fun) {
      stored.b = static_cast<uint32_t>(arg_pool_.size());
      for (TermId a : *args) arg_pool_.push_back(a);
    }
    TermId id = static_cast<TermId>(terms_.size());
    terms_.push_back(stored);
    term_map_.emplace(t.hash, id);
    return id;
  }

  std::mutex mu_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, NameId> name_map_;
  std::vector<TypeNode> types_;
  std::unordered_multimap<uint64_t, TypeId> type_map_;
  std::vector<SymbolInfo> syms_;
  std::unordered_multimap<uint64_t, SymId> sym_map_;
  std::vector<TermNode> terms_;
  std::unordered_multimap<uint64_t, TermId> term_map_;
  std::vector<TermId> arg_pool_;
};

inline Store& store() { return Store::get(); }

// Order of a type: 0 for sorts, max(order(l)+1, order(r)) for arrows.
inline int type_order(TypeId t) { return store().type(t).order; }

// Order of a declaration: 0 if nullary, else 1 + the max argument order.
inline int decl_order(const TypeDecl& d) {
  if (d.args.empty()) return 0;
  int m = 0;
  for (TypeId a : d.args) m = std::max(m, type_order(a));
  return m + 1;
}

inline bool is_closed(TermId t) {
  const TermNode& n = store().node(t);
  return !(n.flags & kHasFreeVar) && n.loose == 0;
}

}  // namespace consfree
