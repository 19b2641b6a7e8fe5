#pragma once

// The executable rewrite semantics: one-step reducts at every position
// (rule steps plus beta), bounded breadth-first search for data normal
// forms, and the acceptance judgment decide(input) ->* true.

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "consfree/afs.hpp"
#include "consfree/parse.hpp"
#include "consfree/store.hpp"
#include "consfree/term_ops.hpp"

namespace consfree {

struct SearchBudget {
  uint64_t max_visited = 1'000'000;
  uint32_t max_depth = 10'000;
};

struct SearchResult {
  std::vector<TermId> data_normal_forms;  // deterministic order
  bool exhausted = false;   // the whole reachable set fit in the budget
  uint64_t visited = 0;
  // Parent links for trace reconstruction (present when tracing was on).
  std::unordered_map<TermId, TermId> parent;
};

enum class Acceptance { accepted, refuted, unknown };

inline const char* acceptance_str(Acceptance a) {
  switch (a) {
    case Acceptance::accepted: return "accepted";
    case Acceptance::refuted: return "refuted";
    default: return "unknown";
  }
}

// Per-AFS rewriting context. Reduct sets are memoized per term, which makes
// breadth-first exploration of heavily shared term graphs cheap.
class Rewriter {
 public:
  explicit Rewriter(const AFS& afs) : afs_(afs) {}

  const AFS& afs() const { return afs_; }

  // The exact set of one-step successors, deduplicated modulo alpha and
  // sorted for determinism.
  const std::vector<TermId>& one_step_reducts(TermId t) {
    auto it = memo_.find(t);
    if (it != memo_.end()) return it->second;
    std::vector<TermId> out;
    Store& st = store();
    const TermNode& n = st.node(t);

    switch (n.kind) {
      case Kind::Fun: {
        // Root rule steps.
        for (uint32_t ri : afs_.rules_for(n.a)) {
          const Rule& r = afs_.rules[ri];
          if (auto subst = match_pattern(r.lhs, t, /*linear=*/false))
            out.push_back(apply_substitution(r.rhs, *subst));
        }
        // Argument positions.
        for (uint32_t i = 0; i < n.argc; ++i) {
          TermId a = st.fun_arg(t, i);
          for (TermId a2 : one_step_reducts(a)) {
            std::vector<TermId> args(n.argc);
            for (uint32_t j = 0; j < n.argc; ++j) args[j] = st.fun_arg(t, j);
            args[i] = a2;
            out.push_back(st.fun(n.a, args));
          }
        }
        break;
      }
      case Kind::App: {
        if (st.node(n.a).kind == Kind::Abs)
          out.push_back(beta_contract(st.node(n.a).b, n.b));
        for (TermId f2 : one_step_reducts(n.a)) out.push_back(st.app(f2, n.b));
        for (TermId x2 : one_step_reducts(n.b)) out.push_back(st.app(n.a, x2));
        break;
      }
      case Kind::Abs: {
        TypeId binder = st.type(n.type).left;
        for (TermId b2 : one_step_reducts(n.b)) out.push_back(st.abs(n.a, binder, b2));
        break;
      }
      default:
        break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return memo_.emplace(t, std::move(out)).first->second;
  }

  bool is_normal_form(TermId t) { return one_step_reducts(t).empty(); }

  // Breadth-first search of the reachable term graph. Stops early when
  // `stop_on` is reached. `exhausted` is only reported when the frontier
  // emptied with no budget bound hit.
  SearchResult search(TermId start, const SearchBudget& budget,
                      std::optional<TermId> stop_on = std::nullopt,
                      bool keep_parents = false) {
    SearchResult res;
    std::unordered_set<TermId> visited;
    std::deque<std::pair<TermId, uint32_t>> frontier;
    visited.insert(start);
    frontier.emplace_back(start, 0);
    bool truncated = false;
    std::vector<TermId> found;

    bool stopped_early = false;
    if (stop_on && start == *stop_on) stopped_early = true;
    while (!frontier.empty() && !stopped_early) {
      auto [t, depth] = frontier.front();
      frontier.pop_front();
      const std::vector<TermId>& succ = one_step_reducts(t);
      if (succ.empty() && afs_.is_data(t)) found.push_back(t);
      if (depth >= budget.max_depth) {
        if (!succ.empty()) truncated = true;
        continue;
      }
      for (TermId s : succ) {
        if (visited.count(s)) continue;
        if (visited.size() >= budget.max_visited) {
          truncated = true;
          break;
        }
        visited.insert(s);
        if (keep_parents) res.parent.emplace(s, t);
        if (stop_on && s == *stop_on) {
          if (afs_.is_data(s)) found.push_back(s);
          stopped_early = true;  // remaining frontier left unexplored
          break;
        }
        frontier.emplace_back(s, depth + 1);
      }
    }
    truncated = truncated || stopped_early || !frontier.empty();

    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    res.data_normal_forms = std::move(found);
    res.exhausted = !truncated;
    res.visited = visited.size();
    return res;
  }

  void clear_memo() { memo_.clear(); }

 private:
  const AFS& afs_;
  std::unordered_map<TermId, std::vector<TermId>> memo_;
};

inline std::vector<TermId> one_step_reducts(const AFS& afs, TermId t) {
  Rewriter rw(afs);
  return rw.one_step_reducts(t);
}

inline SearchResult search_data_normal_forms(const AFS& afs, TermId start,
                                             const SearchBudget& budget) {
  Rewriter rw(afs);
  return rw.search(start, budget);
}

// decide(<input>) ->* true, explored breadth-first. `accepted` as soon as
// true is reached; `refuted` only when the reachable set was exhausted.
inline Acceptance accepts(const AFS& afs, const std::string& input,
                          const SearchBudget& budget) {
  Store& st = store();
  SymId decide = find_decide_symbol(afs);
  TermId encoded = encode_input(afs, input);
  TermId start = st.fun(decide, {encoded});
  TermId target = kNone;
  for (SymId c : afs.constructors)
    if (st.name_str(st.sym(c).name) == "true" && st.sym(c).decl.args.empty())
      target = st.fun(c, {});
  if (target == kNone) throw ValidationFailure("signature lacks true : bool");

  Rewriter rw(afs);
  SearchResult res = rw.search(start, budget, target);
  for (TermId t : res.data_normal_forms)
    if (t == target) return Acceptance::accepted;
  // search stops on the target, so reaching here means it was not found
  return res.exhausted ? Acceptance::refuted : Acceptance::unknown;
}

// Reconstructs the reduction path start ->* goal out of parent links.
inline std::vector<TermId> trace_path(const SearchResult& res, TermId start, TermId goal) {
  std::vector<TermId> path;
  TermId cur = goal;
  path.push_back(cur);
  while (cur != start) {
    auto it = res.parent.find(cur);
    if (it == res.parent.end()) throw InternalBug("broken parent chain in trace");
    cur = it->second;
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace consfree
