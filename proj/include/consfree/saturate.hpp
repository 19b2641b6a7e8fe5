#pragma once

// Deterministic saturation: computes the exact set of data normal forms of
// a basic term by a fixpoint over statements f(A1,...,An) ~ t, where each
// argument ranges over a finite semantic domain: subsets of the reachable
// data set at sorts, total function tables at arrow types.
//
// The statement space is astronomically large for interesting inputs
// (domains are powersets), so the table is demand-driven: only rows whose
// value is actually read while evaluating reachable rows are materialized,
// and a row is re-evaluated only when first created or when a row it read
// has changed. Every iteration reads the frozen previous-iteration table
// (writes are applied at iteration end), so evaluation order is
// irrelevant and parallel evaluation would give identical results. The
// fixpoint of this scheme is the same least fixpoint the dense iteration
// computes, restricted to rows reachable from the start statement.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "consfree/afs.hpp"
#include "consfree/parse.hpp"
#include "consfree/print.hpp"
#include "consfree/store.hpp"
#include "consfree/term_ops.hpp"

namespace consfree {

// Saturating natural number for domain-size arithmetic; sizes beyond 2^63
// only ever need "bigger than anything we materialize".
struct SatNat {
  uint64_t v = 0;
  bool inf = false;

  static SatNat of(uint64_t x) { return {x, false}; }
  static SatNat infinite() { return {0, true}; }

  SatNat operator*(SatNat o) const {
    if (inf || o.inf) return infinite();
    if (v != 0 && o.v > UINT64_MAX / v) return infinite();
    return of(v * o.v);
  }
  SatNat operator+(SatNat o) const {
    if (inf || o.inf) return infinite();
    if (v > UINT64_MAX - o.v) return infinite();
    return of(v + o.v);
  }
  static SatNat pow2(SatNat e) {
    if (e.inf || e.v >= 63) return infinite();
    return of(uint64_t(1) << e.v);
  }
  static SatNat pow(SatNat b, SatNat e) {
    if (e.inf) return infinite();
    SatNat r = of(1);
    for (uint64_t i = 0; i < e.v; ++i) {
      r = r * b;
      if (r.inf) return r;
    }
    return r;
  }
  bool leq(SatNat o) const {
    if (o.inf) return true;
    if (inf) return false;
    return v <= o.v;
  }
  std::string str() const { return inf ? ">=2^63" : std::to_string(v); }
};

// exp2^k(n): iterated exponential.
inline SatNat exp2_tower(int k, SatNat n) {
  SatNat r = n;
  for (int i = 0; i < k; ++i) r = SatNat::pow2(r);
  return r;
}

inline int length_bound(TypeId t) {
  const TypeNode& n = store().type(t);
  if (!n.arrow) return 1;
  int len = 1, m = 0;
  TypeId cur = t;
  while (store().type(cur).arrow) {
    m = std::max(m, length_bound(store().type(cur).left));
    cur = store().type(cur).right;
    len++;
  }
  return std::max(len, m);
}

struct DomainCheck {
  TypeId type;
  SatNat size;          // closed-form cardinality
  SatNat bound_weak;    // exp2^{k+1}(i^{k+1} * N)
  SatNat bound_strong;  // exp2^{k+1}(i^k * N)
  bool within_bound;    // size <= bound_weak (checked for materialized types)
};

struct SaturationStats {
  size_t data_set_size = 0;
  int afs_order = 0;
  SatNat statement_count;
  uint64_t rows_materialized = 0;
  uint32_t iterations = 0;
  std::vector<uint64_t> flips_per_iteration;
  std::vector<DomainCheck> domain_checks;
  double wall_seconds = 0;
  bool all_bounds_ok = true;

  std::string to_text() const;
};

struct SaturationOptions {
  uint64_t domain_cap = uint64_t(1) << 20;  // max elements per type
  uint64_t perm_seed = 0;  // permutes function-table enumeration order
};

class Saturation {
 public:
  Saturation(const AFS& afs, TermId start, SaturationOptions opts = {})
      : afs_(prune_functional_constructors(afs)), opts_(opts) {
    ValidationReport rep = validate(afs);
    if (!rep.all_pass())
      throw ValidationFailure(
          "saturation requires a cons-free left-linear constructor system:\n" +
          rep.to_text(afs));
    if (!afs.is_basic(start))
      throw ValidationFailure("saturation requires a basic start term, got " +
                              print_term(start));
    start_ = start;
    b_ = compute_data_set(afs_, start);
    init_domains();
  }

  // Runs the fixpoint and returns the data normal forms of the start term.
  // With stop_early set, returns as soon as that data term is confirmed for
  // the start statement (sound: confirmed rows only ever stay confirmed).
  std::vector<TermId> run(std::optional<TermId> stop_early = std::nullopt) {
    auto t0 = std::chrono::steady_clock::now();
    Store& st = store();
    const TermNode& sn = st.node(start_);
    std::vector<uint64_t> args;
    for (uint32_t i = 0; i < sn.argc; ++i) {
      TermId d = st.fun_arg(start_, i);
      args.push_back(uint64_t(1) << b_.slot(d));
    }
    uint32_t root = get_row(sn.a, args);
    uint64_t stop_bit = 0;
    if (stop_early && b_.contains(*stop_early))
      stop_bit = uint64_t(1) << b_.slot(*stop_early);

    while (true) {
      std::vector<uint32_t> worklist;
      for (uint32_t i = 0; i < rows_.size(); ++i)
        if (rows_[i].dirty) worklist.push_back(i);
      if (worklist.empty()) break;
      stats_.iterations++;
      rows_created_ = 0;
      for (uint32_t i : worklist) rows_[i].dirty = false;

      std::vector<std::pair<uint32_t, uint64_t>> pending;
      for (uint32_t i : worklist) {
        uint64_t bits = eval_row(i);
        if (bits & ~rows_[i].bits) pending.emplace_back(i, bits);
      }
      uint64_t flips = 0;
      for (auto& [i, bits] : pending) {
        uint64_t added = bits & ~rows_[i].bits;
        flips += __builtin_popcountll(added);
        rows_[i].bits |= bits;
        for (uint32_t s : rows_[i].subs)
          if (!rows_[s].dirty) rows_[s].dirty = true;
      }
      stats_.flips_per_iteration.push_back(flips);
      if (stop_bit && (rows_[root].bits & stop_bit)) break;
      if (pending.empty() && rows_created_ == 0) {
        // No confirmations and no new demands: new rows created in earlier
        // iterations are still marked dirty and will drain, but a full pass
        // with no change is the fixpoint.
        bool any_dirty = false;
        for (const Row& r : rows_)
          if (r.dirty) { any_dirty = true; break; }
        if (!any_dirty) break;
      }
    }

    stats_.rows_materialized = rows_.size();
    stats_.data_set_size = b_.size();
    stats_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<TermId> out;
    TypeId out_sort = st.node(start_).type;
    auto [lo, hi] = b_.slice(out_sort);
    for (uint32_t i = lo; i < hi; ++i)
      if (rows_[root].bits & (uint64_t(1) << (i - lo))) out.push_back(b_.elements[i]);
    return out;
  }

  const SaturationStats& stats() const { return stats_; }
  const DataSet& data_set() const { return b_; }
  const AFS& pruned_afs() const { return afs_; }

  // Evaluate a closed beta-normal safe term against the current table
  // (before run(): the all-unconfirmed table). Returns the raw value:
  // a bitset over the sort slice, or a function-table id at arrow types.
  uint64_t eval_closed(TermId t) {
    Env env;
    return eval_term(t, env, get_row_probe());
  }
  std::vector<TermId> value_terms(TypeId sort, uint64_t bits) const {
    std::vector<TermId> out;
    auto [lo, hi] = b_.slice(sort);
    for (uint32_t i = lo; i < hi; ++i)
      if (bits & (uint64_t(1) << (i - lo))) out.push_back(b_.elements[i]);
    return out;
  }
  const std::vector<uint64_t>& function_table(TypeId arrow_type, uint64_t id) {
    return arrows_[arrow_type].tables[static_cast<size_t>(id)];
  }

 private:
  // ---- semantic domains ----------------------------------------------

  struct ArrowDomain {
    bool full = false;
    std::vector<std::vector<uint64_t>> tables;            // id -> table
    std::unordered_map<uint64_t, std::vector<uint32_t>> intern;  // hash -> ids
  };

  void init_domains() {
    Store& st = store();
    stats_.afs_order = afs_.order();
    // Cardinality checks for every sort and every declared argument type.
    for (NameId s : afs_.sorts) check_type(st.sort(s), /*materialized=*/true);
    SatNat stmts = SatNat::of(0);
    for (SymId f : afs_.defined) {
      const TypeDecl& d = st.sym(f).decl;
      SatNat combo = SatNat::of(1);
      for (TypeId a : d.args) {
        check_type(a, st.is_sort(a));
        combo = combo * dom_size(a);
      }
      stmts = stmts + combo * SatNat::of(b_.slice_size(d.out));
      check_type(d.out, true);
    }
    stats_.statement_count = stmts;
    // Materialized sort domains must fit the cap and the 64-bit slices.
    for (NameId s : afs_.sorts) {
      TypeId ty = st.sort(s);
      uint32_t m = b_.slice_size(ty);
      if (m > 63 || (uint64_t(1) << m) > opts_.domain_cap)
        throw DomainTooLarge("domain of sort " + st.name_str(s) + " has 2^" +
                             std::to_string(m) + " elements, over the cap of " +
                             std::to_string(opts_.domain_cap));
    }
  }

  SatNat dom_size(TypeId t) {
    const TypeNode& n = store().type(t);
    if (!n.arrow) return SatNat::pow2(SatNat::of(b_.slice_size(t)));
    return SatNat::pow(dom_size(n.right), dom_size(n.left));
  }

  void check_type(TypeId t, bool materialized) {
    if (checked_.count(t)) return;
    checked_.insert(t);
    int k = type_order(t);
    int i = length_bound(t);
    SatNat n = SatNat::of(b_.size());
    SatNat weak = exp2_tower(k + 1, SatNat::pow(SatNat::of(i), SatNat::of(k + 1)) * n);
    SatNat strong = exp2_tower(k + 1, SatNat::pow(SatNat::of(i), SatNat::of(k)) * n);
    SatNat size = dom_size(t);
    bool ok = !materialized || size.leq(weak);
    stats_.domain_checks.push_back({t, size, weak, strong, ok});
    if (!ok) stats_.all_bounds_ok = false;
  }

  ArrowDomain& arrow_domain(TypeId t) { return arrows_[t]; }

  // Total number of elements of a type, materializing arrows on demand.
  uint64_t ensure_full(TypeId t) {
    Store& st = store();
    if (!st.type(t).arrow) return uint64_t(1) << b_.slice_size(t);
    ArrowDomain& d = arrows_[t];
    if (d.full) return d.tables.size();
    check_type(t, true);
    SatNat size = dom_size(t);
    if (size.inf || size.v > opts_.domain_cap)
      throw DomainTooLarge("domain of type " + print_type(t) + " has " + size.str() +
                           " elements, over the cap of " +
                           std::to_string(opts_.domain_cap));
    uint64_t arg_count = ensure_full(st.type(t).left);
    uint64_t res_count = ensure_full(st.type(t).right);
    // All total functions, in lexicographic order (optionally permuted so
    // tests can confirm enumeration order does not affect results).
    std::vector<uint64_t> order(size.v);
    for (uint64_t i = 0; i < size.v; ++i) order[i] = i;
    if (opts_.perm_seed) {
      uint64_t s = opts_.perm_seed;
      for (uint64_t i = size.v; i > 1; --i) {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        std::swap(order[i - 1], order[s % i]);
      }
    }
    ArrowDomain& dom = arrows_[t];  // re-find: recursion may rehash the map
    for (uint64_t code : order) {
      std::vector<uint64_t> table(arg_count);
      uint64_t rest = code;
      for (uint64_t j = 0; j < arg_count; ++j) {
        table[j] = rest % res_count;
        rest /= res_count;
      }
      intern_table(t, dom, std::move(table));
    }
    dom.full = true;
    return dom.tables.size();
  }

  uint64_t intern_table(TypeId t, ArrowDomain& d, std::vector<uint64_t> table) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint64_t v : table) h = hash_mix(h, v);
    auto& bucket = d.intern[h];
    for (uint32_t id : bucket)
      if (d.tables[id] == table) return id;
    if (d.tables.size() >= opts_.domain_cap)
      throw DomainTooLarge("domain of type " + print_type(t) +
                           " exceeded the cap during evaluation");
    uint32_t id = static_cast<uint32_t>(d.tables.size());
    d.tables.push_back(std::move(table));
    bucket.push_back(id);
    return id;
  }

  // ---- statement rows --------------------------------------------------

  struct Row {
    SymId sym;
    std::vector<uint64_t> args;
    uint64_t bits = 0;
    bool dirty = true;
    uint32_t last_reader = kNone;
    std::vector<uint32_t> subs;
  };

  // A sink row index for subscriptions made by probe evaluations.
  uint32_t get_row_probe() {
    if (probe_row_ == kNone) {
      rows_.push_back(Row{kNone, {}, 0, false, kNone, {}});
      probe_row_ = static_cast<uint32_t>(rows_.size() - 1);
    }
    return probe_row_;
  }

  uint32_t get_row(SymId f, const std::vector<uint64_t>& args) {
    uint64_t h = hash_mix(0x9e3779b1, f);
    for (uint64_t a : args) h = hash_mix(h, a);
    auto& bucket = row_index_[h];
    for (uint32_t id : bucket)
      if (rows_[id].sym == f && rows_[id].args == args) return id;
    uint32_t id = static_cast<uint32_t>(rows_.size());
    rows_.push_back(Row{f, args, 0, true, kNone, {}});
    bucket.push_back(id);
    rows_created_++;
    return id;
  }

  uint64_t read_row(SymId f, const std::vector<uint64_t>& args, uint32_t reader) {
    uint32_t id = get_row(f, args);
    Row& r = rows_[id];
    if (r.last_reader != reader) {
      r.last_reader = reader;
      r.subs.push_back(reader);
    }
    return r.bits;  // frozen: writes land after the iteration
  }

  // ---- the NF evaluator -------------------------------------------------

  struct Env {
    std::vector<std::pair<TermId, uint64_t>> vars;  // rule variables
    std::vector<uint64_t> stack;                    // de Bruijn binders
  };

  uint64_t eval_row(uint32_t idx) {
    Store& st = store();
    SymId f = rows_[idx].sym;
    const std::vector<uint64_t> args = rows_[idx].args;  // copy: rows_ may grow
    uint64_t bits = rows_[idx].bits;
    for (uint32_t ri : afs_.rules_for(f)) {
      const Rule& rule = afs_.rules[ri];
      const TermNode& lhs = st.node(rule.lhs);
      // Per-argument binding choices.
      Env base_env;
      std::vector<std::vector<Substitution>> choices;
      bool feasible = true;
      for (uint32_t j = 0; j < lhs.argc && feasible; ++j) {
        TermId lj = st.fun_arg(rule.lhs, j);
        if (st.node(lj).kind == Kind::Var) {
          base_env.vars.emplace_back(lj, args[j]);
          continue;
        }
        // Non-variable pattern: base sort; enumerate matching data terms.
        std::vector<Substitution> opts;
        TypeId sort = st.node(lj).type;
        auto [lo, hi] = b_.slice(sort);
        for (uint32_t s = lo; s < hi; ++s) {
          if (!(args[j] & (uint64_t(1) << (s - lo)))) continue;
          if (auto m = match_pattern(lj, b_.elements[s], /*linear=*/true))
            opts.push_back(std::move(*m));
        }
        if (opts.empty()) feasible = false;
        choices.push_back(std::move(opts));
      }
      if (!feasible) continue;

      // Cartesian product over the per-argument choices (left-linearity
      // guarantees disjoint variables).
      std::vector<size_t> pick(choices.size(), 0);
      while (true) {
        Substitution gamma;
        for (size_t c = 0; c < choices.size(); ++c)
          for (auto& b : choices[c][pick[c]].binds) gamma.binds.push_back(b);
        TermId rhs = apply_substitution(rule.rhs, gamma);
        Env env = base_env;
        bits |= eval_term(rhs, env, idx);

        size_t c = 0;
        for (; c < choices.size(); ++c) {
          if (++pick[c] < choices[c].size()) break;
          pick[c] = 0;
        }
        if (c == choices.size()) break;
      }
    }
    return bits;
  }

  // The five evaluation cases. Values at sorts are bitsets over the sort's
  // slice of the data set; values at arrow types are interned table ids.
  uint64_t eval_term(TermId t, Env& env, uint32_t reader) {
    Store& st = store();
    const TermNode& n = st.node(t);
    switch (n.kind) {
      case Kind::Fun: {
        if (afs_.is_constructor(n.a)) {
          if (!b_.contains(t))
            throw InternalBug("constructor-headed term outside the data set: " +
                              print_term(t));
          return uint64_t(1) << b_.slot(t);
        }
        std::vector<uint64_t> args(n.argc);
        for (uint32_t i = 0; i < n.argc; ++i)
          args[i] = eval_term(st.fun_arg(t, i), env, reader);
        return read_row(n.a, args, reader);
      }
      case Kind::Var: {
        for (auto& [v, val] : env.vars)
          if (v == t) return val;
        throw InternalBug("unbound variable in evaluation: " + print_term(t));
      }
      case Kind::Bound: {
        if (n.a >= env.stack.size()) throw InternalBug("dangling binder index");
        return env.stack[env.stack.size() - 1 - n.a];
      }
      case Kind::App: {
        uint64_t fv = eval_term(n.a, env, reader);
        uint64_t xv = eval_term(n.b, env, reader);
        TypeId fty = st.node(n.a).type;
        ArrowDomain& d = arrows_[fty];
        if (fv >= d.tables.size()) throw InternalBug("function value out of range");
        const std::vector<uint64_t>& table = d.tables[static_cast<size_t>(fv)];
        if (xv >= table.size()) throw InternalBug("argument value out of range");
        return table[static_cast<size_t>(xv)];
      }
      case Kind::Abs: {
        TypeId binder = st.type(n.type).left;
        uint64_t count = ensure_full(binder);
        std::vector<uint64_t> table(count);
        for (uint64_t a = 0; a < count; ++a) {
          env.stack.push_back(a);
          table[a] = eval_term(n.b, env, reader);
          env.stack.pop_back();
        }
        return intern_table(n.type, arrows_[n.type], std::move(table));
      }
    }
    throw InternalBug("unreachable evaluation case");
  }

  AFS afs_;
  SaturationOptions opts_;
  TermId start_ = kNone;
  DataSet b_;
  SaturationStats stats_;
  std::unordered_map<TypeId, ArrowDomain> arrows_;
  std::unordered_set<TypeId> checked_;
  std::vector<Row> rows_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> row_index_;
  uint64_t rows_created_ = 0;
  uint32_t probe_row_ = kNone;
};

// The set of data normal forms of a basic term, computed exactly.
inline std::vector<TermId> saturate(const AFS& afs, TermId start,
                                    SaturationOptions opts = {},
                                    SaturationStats* stats = nullptr) {
  Saturation sat(afs, start, opts);
  std::vector<TermId> out = sat.run();
  if (stats) *stats = sat.stats();
  return out;
}

// Exact data reachability for a closed base-type term that need not be
// basic: wrap it as the right-hand side of a fresh nullary symbol and
// saturate that. Reaching data through the wrapper is the same relation,
// since the wrapper rule can only fire once at the root.
inline std::vector<TermId> saturate_closed_term(const AFS& afs, TermId term,
                                                SaturationOptions opts = {},
                                                SaturationStats* stats = nullptr) {
  Store& st = store();
  const TermNode& n = st.node(term);
  if (!is_closed(term))
    throw ValidationFailure("closed-term evaluation requires a closed term");
  if (st.type(n.type).arrow)
    throw ValidationFailure("closed-term evaluation requires a base-type term");
  AFS wrapped = afs;
  SymId root = st.symbol(st.name("eval_root"), TypeDecl{{}, n.type});
  wrapped.add_defined(root);
  wrapped.add_rule(st.fun(root, {}), beta_normalize(term));
  Saturation sat(wrapped, st.fun(root, {}), opts);
  std::vector<TermId> out = sat.run();
  if (stats) *stats = sat.stats();
  return out;
}

// decide(<input>) evaluated by saturation: exact, no budget.
inline bool decide_by_saturation(const AFS& afs, const std::string& input,
                                 SaturationOptions opts = {},
                                 SaturationStats* stats = nullptr) {
  Store& st = store();
  TermId encoded = encode_input(afs, input);
  SymId decide = find_decide_symbol(afs);
  TermId start = st.fun(decide, {encoded});
  TermId target = kNone;
  for (SymId c : afs.constructors)
    if (st.name_str(st.sym(c).name) == "true" && st.sym(c).decl.args.empty())
      target = st.fun(c, {});
  if (target == kNone) throw ValidationFailure("signature lacks true : bool");
  Saturation sat(afs, start, opts);
  std::vector<TermId> result = sat.run(target);
  if (stats) *stats = sat.stats();
  return std::find(result.begin(), result.end(), target) != result.end();
}

// ---------------------------------------------------------------------------
// Standalone domain enumeration (used by tests and --stats reporting).

struct DomainElement {
  // At sorts: the member data terms; at arrows: child ordinals per argument.
  std::vector<TermId> members;
  std::vector<uint64_t> table;
};

struct EnumeratedDomain {
  TypeId type;
  std::vector<DomainElement> elements;
};

inline EnumeratedDomain enumerate_domain(TypeId type, const DataSet& b, uint64_t cap) {
  Store& st = store();
  EnumeratedDomain d;
  d.type = type;
  if (st.is_sort(type)) {
    auto [lo, hi] = b.slice(type);
    uint32_t m = hi - lo;
    if (m > 63 || (uint64_t(1) << m) > cap)
      throw DomainTooLarge("domain of " + print_type(type) + " has 2^" +
                           std::to_string(m) + " elements, over the cap");
    for (uint64_t bits = 0; bits < (uint64_t(1) << m); ++bits) {
      DomainElement e;
      for (uint32_t i = 0; i < m; ++i)
        if (bits & (uint64_t(1) << i)) e.members.push_back(b.elements[lo + i]);
      d.elements.push_back(std::move(e));
    }
    return d;
  }
  EnumeratedDomain arg = enumerate_domain(st.type(type).left, b, cap);
  EnumeratedDomain res = enumerate_domain(st.type(type).right, b, cap);
  uint64_t n = arg.elements.size(), k = res.elements.size();
  // k^n tables in lexicographic order.
  double logsize = n * std::log2(double(k ? k : 1));
  if (k == 0 || logsize > 62 || SatNat::pow(SatNat::of(k), SatNat::of(n)).inf ||
      SatNat::pow(SatNat::of(k), SatNat::of(n)).v > cap)
    throw DomainTooLarge("domain of " + print_type(type) + " is over the cap");
  uint64_t total = SatNat::pow(SatNat::of(k), SatNat::of(n)).v;
  for (uint64_t code = 0; code < total; ++code) {
    DomainElement e;
    uint64_t rest = code;
    for (uint64_t j = 0; j < n; ++j) {
      e.table.push_back(rest % k);
      rest /= k;
    }
    d.elements.push_back(std::move(e));
  }
  return d;
}

inline std::string SaturationStats::to_text() const {
  std::string out;
  out += "data set size: " + std::to_string(data_set_size) + "\n";
  out += "order: " + std::to_string(afs_order) + "\n";
  out += "statements: " + statement_count.str() + "\n";
  out += "rows materialized: " + std::to_string(rows_materialized) + "\n";
  out += "iterations to fixpoint: " + std::to_string(iterations) + "\n";
  out += "domain sizes:\n";
  for (const DomainCheck& c : domain_checks) {
    out += "  " + print_type(c.type) + ": " + c.size.str() +
           " (bound " + c.bound_weak.str() + ", in-proof variant " +
           c.bound_strong.str() + ", " + (c.within_bound ? "ok" : "EXCEEDED") + ")\n";
  }
  out += "wall seconds: " + std::to_string(wall_seconds) + "\n";
  return out;
}

}  // namespace consfree
