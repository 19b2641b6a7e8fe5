#pragma once

// Algebraic functional systems: signature partitioned into constructors and
// defined symbols plus rewrite rules, with the three syntactic validators
// (constructor system, left-linearity, cons-freeness), reachable-data-set
// computation and safety checking.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "consfree/print.hpp"
#include "consfree/store.hpp"
#include "consfree/term_ops.hpp"

namespace consfree {

struct Rule {
  TermId lhs;  // shape f(l1..ln)
  TermId rhs;  // stored beta-normal
  SymId head() const { return store().node(lhs).a; }
};

class AFS {
 public:
  std::vector<NameId> sorts;          // declaration order
  std::vector<SymId> constructors;    // declaration order
  std::vector<SymId> defined;         // declaration order
  std::vector<Rule> rules;
  std::vector<std::string> load_warnings;

  void add_sort(NameId n) {
    if (!sort_set_.insert(n).second) return;
    sorts.push_back(n);
  }
  void add_constructor(SymId s) {
    if (cons_.insert(s).second) constructors.push_back(s);
  }
  void add_defined(SymId s) {
    if (defs_.insert(s).second) defined.push_back(s);
  }
  // Right-hand sides are normalized at load; rules written with beta redexes
  // get a warning since reducing them first preserves reachable data.
  void add_rule(TermId lhs, TermId rhs) {
    if (store().node(lhs).kind != Kind::Fun)
      throw ValidationFailure("rule left-hand side must be a function application");
    if (store().node(lhs).type != store().node(rhs).type)
      throw ValidationFailure("rule sides differ in sort: " + print_term(lhs) +
                              " -> " + print_term(rhs));
    if (store().type(store().node(lhs).type).arrow)
      throw ValidationFailure("rule sides must have a sort, not an arrow type");
    TermId nrhs = beta_normalize(rhs);
    if (nrhs != rhs)
      load_warnings.push_back("rule right-hand side normalized: " + print_term(rhs));
    std::unordered_set<TermId> lv, rv;
    free_vars(lhs, lv);
    free_vars(nrhs, rv);
    for (TermId v : rv)
      if (!lv.count(v))
        throw ValidationFailure("free variable " +
                                store().name_str(store().node(v).a) +
                                " of right-hand side not bound by left-hand side");
    uint32_t idx = static_cast<uint32_t>(rules.size());
    rules.push_back(Rule{lhs, nrhs});
    rule_index_[store().node(lhs).a].push_back(idx);
  }

  bool is_constructor(SymId s) const { return cons_.count(s) != 0; }
  bool is_defined(SymId s) const { return defs_.count(s) != 0; }
  bool has_sort(NameId n) const { return sort_set_.count(n) != 0; }

  const std::vector<uint32_t>& rules_for(SymId s) const {
    static const std::vector<uint32_t> none;
    auto it = rule_index_.find(s);
    return it == rule_index_.end() ? none : it->second;
  }

  int order() const {
    int m = 0;
    for (SymId s : constructors) m = std::max(m, decl_order(store().sym(s).decl));
    for (SymId s : defined) m = std::max(m, decl_order(store().sym(s).decl));
    return m;
  }

  // Data term: closed, application- and abstraction-free, built only from
  // constructors.
  bool is_data(TermId t) const {
    const TermNode& n = store().node(t);
    if (!(n.flags & kFunOnly) || n.loose != 0 || (n.flags & kHasFreeVar)) return false;
    return funapp_all_constructors(t);
  }

  // Basic term: defined symbol applied to data terms.
  bool is_basic(TermId t) const {
    const TermNode& n = store().node(t);
    if (n.kind != Kind::Fun || !is_defined(n.a)) return false;
    for (uint32_t i = 0; i < n.argc; ++i)
      if (!is_data(store().fun_arg(t, i))) return false;
    return true;
  }

  SymId find_symbol(const std::string& name) const {
    NameId n = store().name(name);
    for (SymId s : defined)
      if (store().sym(s).name == n) return s;
    for (SymId s : constructors)
      if (store().sym(s).name == n) return s;
    return kNone;
  }

 private:
  bool funapp_all_constructors(TermId t) const {
    const TermNode& n = store().node(t);
    if (n.kind != Kind::Fun || !is_constructor(n.a)) return false;
    for (uint32_t i = 0; i < n.argc; ++i)
      if (!funapp_all_constructors(store().fun_arg(t, i))) return false;
    return true;
  }

  std::unordered_set<NameId> sort_set_;
  std::unordered_set<SymId> cons_;
  std::unordered_set<SymId> defs_;
  std::unordered_map<SymId, std::vector<uint32_t>> rule_index_;
};

// ---------------------------------------------------------------------------
// Validation

enum class CheckStatus { Pass, Fail, NotApplicable };

struct Witness {
  uint32_t rule;      // index into afs.rules
  TermId subterm;     // offending subterm
};

struct ValidationReport {
  CheckStatus constructor_system = CheckStatus::Pass;
  CheckStatus left_linear = CheckStatus::Pass;
  CheckStatus cons_free = CheckStatus::Pass;
  std::vector<Witness> constructor_witnesses;
  std::vector<Witness> linear_witnesses;
  std::vector<Witness> cons_free_witnesses;
  std::vector<SymId> pruned_symbols;  // functional constructors removable

  bool all_pass() const {
    return constructor_system == CheckStatus::Pass &&
           left_linear == CheckStatus::Pass && cons_free == CheckStatus::Pass;
  }

  std::string to_text(const AFS& afs) const;
  std::string to_records(const AFS& afs) const;
};

namespace detail {

// True for terms built from constructors and variables with no applications
// or abstractions anywhere.
inline bool is_proper_constructor_term(const AFS& afs, TermId t, TermId* offending) {
  const TermNode& n = store().node(t);
  switch (n.kind) {
    case Kind::Var:
      return true;
    case Kind::Fun: {
      if (!afs.is_constructor(n.a)) {
        if (offending) *offending = t;
        return false;
      }
      for (uint32_t i = 0; i < n.argc; ++i)
        if (!is_proper_constructor_term(afs, store().fun_arg(t, i), offending))
          return false;
      return true;
    }
    default:
      if (offending) *offending = t;
      return false;
  }
}

inline void count_var_occurrences(TermId t, std::unordered_map<TermId, int>& counts) {
  const TermNode& n = store().node(t);
  switch (n.kind) {
    case Kind::Var:
      counts[t]++;
      break;
    case Kind::App:
      count_var_occurrences(n.a, counts);
      count_var_occurrences(n.b, counts);
      break;
    case Kind::Abs:
      count_var_occurrences(n.b, counts);
      break;
    case Kind::Fun:
      for (uint32_t i = 0; i < n.argc; ++i)
        count_var_occurrences(store().fun_arg(t, i), counts);
      break;
    default:
      break;
  }
}

inline void constructor_headed_subterms(const AFS& afs, TermId t,
                                        std::vector<TermId>& out) {
  const TermNode& n = store().node(t);
  if (n.kind == Kind::Fun && afs.is_constructor(n.a)) out.push_back(t);
  switch (n.kind) {
    case Kind::App:
      constructor_headed_subterms(afs, n.a, out);
      constructor_headed_subterms(afs, n.b, out);
      break;
    case Kind::Abs:
      constructor_headed_subterms(afs, n.b, out);
      break;
    case Kind::Fun:
      for (uint32_t i = 0; i < n.argc; ++i)
        constructor_headed_subterms(afs, store().fun_arg(t, i), out);
      break;
    default:
      break;
  }
}

}  // namespace detail

// The three syntactic checks, reported independently. Cons-freeness is only
// meaningful for left-linear constructor systems; when either prerequisite
// fails the cons-free entry is marked not applicable.
//
// Bound variables are de Bruijn indices, so the strict-subterm test of the
// cons-free check is automatically performed on a form where binders cannot
// collide with left-hand-side variables.
inline ValidationReport validate(const AFS& afs) {
  ValidationReport rep;
  Store& st = store();

  for (uint32_t ri = 0; ri < afs.rules.size(); ++ri) {
    const Rule& r = afs.rules[ri];
    const TermNode& lhs = st.node(r.lhs);
    if (!afs.is_defined(lhs.a)) rep.constructor_witnesses.push_back({ri, r.lhs});
    for (uint32_t i = 0; i < lhs.argc; ++i) {
      TermId off = kNone;
      if (!detail::is_proper_constructor_term(afs, st.fun_arg(r.lhs, i), &off))
        rep.constructor_witnesses.push_back({ri, off});
    }

    std::unordered_map<TermId, int> counts;
    detail::count_var_occurrences(r.lhs, counts);
    for (auto& [v, c] : counts)
      if (c > 1) rep.linear_witnesses.push_back({ri, v});
  }
  if (!rep.constructor_witnesses.empty()) rep.constructor_system = CheckStatus::Fail;
  if (!rep.linear_witnesses.empty()) rep.left_linear = CheckStatus::Fail;

  if (rep.constructor_system != CheckStatus::Pass ||
      rep.left_linear != CheckStatus::Pass) {
    rep.cons_free = CheckStatus::NotApplicable;
  } else {
    for (uint32_t ri = 0; ri < afs.rules.size(); ++ri) {
      const Rule& r = afs.rules[ri];
      std::unordered_set<TermId> lhs_subterms;
      collect_subterms(r.lhs, lhs_subterms);
      std::vector<TermId> headed;
      detail::constructor_headed_subterms(afs, r.rhs, headed);
      std::unordered_set<TermId> seen;
      for (TermId s : headed) {
        if (!seen.insert(s).second) continue;
        if (afs.is_data(s)) continue;
        if (lhs_subterms.count(s)) continue;  // strict: lhs head is defined
        rep.cons_free_witnesses.push_back({ri, s});
      }
    }
    if (!rep.cons_free_witnesses.empty()) rep.cons_free = CheckStatus::Fail;
  }

  if (rep.cons_free == CheckStatus::Pass) {
    for (SymId c : afs.constructors) {
      const TypeDecl& d = st.sym(c).decl;
      bool functional = false;
      for (TypeId a : d.args)
        if (!st.is_sort(a)) functional = true;
      if (functional) rep.pruned_symbols.push_back(c);
    }
  }
  return rep;
}

// Lemma-style pruning: constructors with a functional argument type cannot
// occur in any term reachable from a basic term, so they and every rule
// mentioning them can be dropped without changing those reductions.
inline AFS prune_functional_constructors(const AFS& afs) {
  Store& st = store();
  std::unordered_set<SymId> doomed;
  for (SymId c : afs.constructors) {
    for (TypeId a : st.sym(c).decl.args)
      if (!st.is_sort(a)) {
        doomed.insert(c);
        break;
      }
  }
  if (doomed.empty()) return afs;

  AFS out;
  for (NameId s : afs.sorts) out.add_sort(s);
  for (SymId c : afs.constructors)
    if (!doomed.count(c)) out.add_constructor(c);
  for (SymId d : afs.defined) out.add_defined(d);
  auto mentions_doomed = [&](TermId t) {
    std::unordered_set<TermId> subs;
    collect_subterms(t, subs);
    for (TermId s : subs) {
      const TermNode& n = st.node(s);
      if (n.kind == Kind::Fun && doomed.count(n.a)) return true;
    }
    return false;
  };
  for (const Rule& r : afs.rules)
    if (!mentions_doomed(r.lhs) && !mentions_doomed(r.rhs)) out.add_rule(r.lhs, r.rhs);
  return out;
}

// ---------------------------------------------------------------------------
// Reachable data set

// The finite set of data terms available during any reduction of a basic
// term: data subterms of the start term plus data subterms of every rule
// right-hand side, closed under subterms, in a canonical order.
class DataSet {
 public:
  std::vector<TermId> elements;                    // canonical order
  std::unordered_map<TermId, uint32_t> index_of;   // element -> ordinal
  // Per-sort contiguous slices: sort type -> (begin, end) in `elements`.
  std::unordered_map<TypeId, std::pair<uint32_t, uint32_t>> slices;

  bool contains(TermId t) const { return index_of.count(t) != 0; }
  size_t size() const { return elements.size(); }

  std::pair<uint32_t, uint32_t> slice(TypeId sort) const {
    auto it = slices.find(sort);
    if (it == slices.end()) return {0, 0};
    return it->second;
  }
  uint32_t slice_size(TypeId sort) const {
    auto [b, e] = slice(sort);
    return e - b;
  }
  // Position of a data term within its sort's slice.
  uint32_t slot(TermId t) const {
    auto it = index_of.find(t);
    if (it == index_of.end()) throw InternalBug("term not in data set: " + print_term(t));
    return it->second - slice(store().node(t).type).first;
  }
};

inline DataSet compute_data_set(const AFS& afs, TermId start) {
  if (!afs.is_basic(start))
    throw ValidationFailure("data-set computation requires a basic start term, got " +
                            print_term(start));
  Store& st = store();
  std::unordered_set<TermId> all;
  collect_subterms(start, all);
  for (const Rule& r : afs.rules) collect_subterms(r.rhs, all);

  std::vector<TermId> data;
  for (TermId t : all)
    if (afs.is_data(t)) data.push_back(t);

  // Canonical order: sort name, then term size, then structural hash, with a
  // printed-form tiebreak so the order is reproducible.
  std::sort(data.begin(), data.end(), [&](TermId a, TermId b) {
    const TermNode& na = st.node(a);
    const TermNode& nb = st.node(b);
    const std::string& sa = st.name_str(st.type(na.type).sort);
    const std::string& sb = st.name_str(st.type(nb.type).sort);
    if (sa != sb) return sa < sb;
    if (na.size != nb.size) return na.size < nb.size;
    if (na.hash != nb.hash) return na.hash < nb.hash;
    if (a != b) return print_term(a) < print_term(b);
    return false;
  });

  DataSet ds;
  ds.elements = std::move(data);
  for (uint32_t i = 0; i < ds.elements.size(); ++i) {
    TermId t = ds.elements[i];
    ds.index_of.emplace(t, i);
    TypeId sort = st.node(t).type;
    auto it = ds.slices.find(sort);
    if (it == ds.slices.end())
      ds.slices.emplace(sort, std::make_pair(i, i + 1));
    else
      it->second.second = i + 1;
  }
  return ds;
}

// A term is safe w.r.t. a data set when every constructor-headed subterm is
// a member of the set.
inline bool is_data_safe(const AFS& afs, TermId t, const DataSet& ds) {
  std::vector<TermId> headed;
  detail::constructor_headed_subterms(afs, t, headed);
  for (TermId s : headed)
    if (!ds.contains(s)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Report rendering

inline const char* status_str(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    default: return "not-applicable";
  }
}

inline std::string ValidationReport::to_text(const AFS& afs) const {
  std::string out;
  auto section = [&](const char* name, CheckStatus s, const std::vector<Witness>& ws) {
    out += std::string(name) + ": " + status_str(s) + "\n";
    for (const Witness& w : ws) {
      out += "  rule " + std::to_string(w.rule + 1) + " (" +
             print_term(afs.rules[w.rule].lhs) + " -> " +
             print_term(afs.rules[w.rule].rhs) + "): offending subterm " +
             print_term(w.subterm) + "\n";
    }
  };
  section("constructor-system", constructor_system, constructor_witnesses);
  section("left-linear", left_linear, linear_witnesses);
  section("cons-free", cons_free, cons_free_witnesses);
  if (!pruned_symbols.empty()) {
    out += "prunable-constructors:";
    for (SymId s : pruned_symbols) out += " " + store().name_str(store().sym(s).name);
    out += "\n";
  }
  return out;
}

inline std::string ValidationReport::to_records(const AFS& afs) const {
  std::string out;
  auto rec = [&](const char* check, CheckStatus s, const std::vector<Witness>& ws) {
    out += std::string("check=") + check + " status=" + status_str(s) + "\n";
    for (const Witness& w : ws)
      out += std::string("check=") + check + " rule=" + std::to_string(w.rule + 1) +
             " subterm=" + print_term(w.subterm) + "\n";
  };
  rec("constructor-system", constructor_system, constructor_witnesses);
  rec("left-linear", left_linear, linear_witnesses);
  rec("cons-free", cons_free, cons_free_witnesses);
  for (SymId s : pruned_symbols)
    out += "check=prunable symbol=" + store().name_str(store().sym(s).name) + "\n";
  return out;
}

}  // namespace consfree
