#pragma once

// Brute-force truth-table satisfiability oracle over the string encoding
// b11..b1n# b21..b2n# ... bmn#, where bij is 1 if xj occurs positively in
// clause i, 0 if negatively, ? if absent. Independent of the rewriting
// machinery: decodes the string and tries every assignment.

#include <string>
#include <vector>

namespace sat_oracle {

struct Formula {
  int vars = 0;
  // clause -> list of (var index 0-based, positive?)
  std::vector<std::vector<std::pair<int, bool>>> clauses;
  bool well_formed = true;
};

inline Formula decode(const std::string& enc) {
  Formula f;
  std::vector<std::pair<int, bool>> cur;
  int pos = 0;
  bool saw_clause = false;
  for (char c : enc) {
    if (c == '#') {
      f.clauses.push_back(cur);
      if (f.vars == 0)
        f.vars = pos;
      else if (pos != f.vars)
        f.well_formed = false;
      cur.clear();
      pos = 0;
      saw_clause = true;
    } else {
      if (c == '1') cur.push_back({pos, true});
      else if (c == '0') cur.push_back({pos, false});
      else if (c != '?') f.well_formed = false;
      pos++;
    }
  }
  if (pos != 0 || !saw_clause) f.well_formed = false;
  return f;
}

inline bool satisfiable(const std::string& enc) {
  Formula f = decode(enc);
  if (!f.well_formed) return false;
  for (uint32_t mask = 0; mask < (1u << f.vars); ++mask) {
    bool all = true;
    for (auto& clause : f.clauses) {
      bool sat = false;
      for (auto& [v, positive] : clause)
        if (((mask >> v) & 1) == (positive ? 1u : 0u)) sat = true;
      if (!sat) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

// All encodings with the given variable and clause counts.
inline std::vector<std::string> all_encodings(int vars, int clauses) {
  std::vector<std::string> out;
  int per = 1;
  for (int i = 0; i < vars; ++i) per *= 3;
  long long total = 1;
  for (int i = 0; i < clauses; ++i) total *= per;
  for (long long code = 0; code < total; ++code) {
    std::string s;
    long long rest = code;
    for (int c = 0; c < clauses; ++c) {
      int body = static_cast<int>(rest % per);
      rest /= per;
      for (int v = 0; v < vars; ++v) {
        int digit = body % 3;
        body /= 3;
        s += digit == 0 ? '?' : (digit == 1 ? '0' : '1');
      }
      s += '#';
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace sat_oracle
