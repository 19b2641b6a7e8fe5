#pragma once

// Surface-syntax printing for types, declarations and terms.
//
// Canonical mode quotes names that are not plain identifiers ('#', '?'),
// so printed text parses back to the same object. Pretty mode prints names
// raw; reduction traces use it.

#include <string>
#include <unordered_set>
#include <vector>

#include "consfree/store.hpp"
#include "consfree/term_ops.hpp"

namespace consfree {

inline bool is_ident_char(unsigned char c, bool first) {
  if (c >= 0x80) return true;  // UTF-8 continuation/lead bytes, e.g. in "▷"
  if (c == '_' || c == '@') return true;
  if (c >= 'a' && c <= 'z') return true;
  if (c >= 'A' && c <= 'Z') return true;
  if (!first && c >= '0' && c <= '9') return true;
  return false;
}

inline bool is_plain_ident(const std::string& s) {
  if (s.empty()) return false;
  bool all_digits = true;
  for (char c : s) all_digits &= c >= '0' && c <= '9';
  if (all_digits) return true;  // digit-named constructors lex as identifiers
  for (size_t i = 0; i < s.size(); ++i)
    if (!is_ident_char(static_cast<unsigned char>(s[i]), i == 0)) return false;
  return true;
}

inline std::string print_name(NameId n, bool pretty) {
  const std::string& s = store().name_str(n);
  if (pretty || is_plain_ident(s)) return s;
  return "'" + s + "'";
}

inline std::string print_type(TypeId t) {
  const TypeNode& n = store().type(t);
  if (!n.arrow) return store().name_str(n.sort);
  std::string l = print_type(n.left);
  if (store().type(n.left).arrow) l = "(" + l + ")";
  return l + " -> " + print_type(n.right);
}

inline std::string print_decl(const TypeDecl& d) {
  if (d.args.empty()) return print_type(d.out);
  std::string s = "[";
  for (size_t i = 0; i < d.args.size(); ++i) {
    if (i) s += " x ";
    s += print_type(d.args[i]);
  }
  return s + "] => " + print_type(d.out);
}

namespace detail {

inline void collect_free_names(TermId t, std::unordered_set<NameId>& out) {
  std::unordered_set<TermId> fv;
  free_vars(t, fv);
  for (TermId v : fv) out.insert(store().node(v).a);
}

inline void print_term_rec(TermId t, bool pretty, std::vector<NameId>& binders,
                           const std::unordered_set<NameId>& avoid, std::string& out,
                           bool atom_ctx) {
  Store& st = store();
  const TermNode& n = st.node(t);
  switch (n.kind) {
    case Kind::Var:
      out += print_name(n.a, pretty);
      break;
    case Kind::Bound: {
      if (n.a < binders.size())
        out += print_name(binders[binders.size() - 1 - n.a], pretty);
      else
        out += "#" + std::to_string(n.a);
      break;
    }
    case Kind::App: {
      bool paren = atom_ctx;
      if (paren) out += "(";
      print_term_rec(n.a, pretty, binders, avoid, out,
                     st.node(n.a).kind == Kind::Abs);
      out += " ";
      const TermNode& arg = st.node(n.b);
      print_term_rec(n.b, pretty, binders, avoid, out,
                     arg.kind == Kind::App || arg.kind == Kind::Abs);
      if (paren) out += ")";
      break;
    }
    case Kind::Abs: {
      bool paren = atom_ctx;
      if (paren) out += "(";
      // Pick a display name that avoids capture of free names in the body.
      NameId hint = n.a;
      std::string base = st.name_str(hint);
      std::string cand = base;
      std::unordered_set<NameId> body_free = avoid;
      collect_free_names(n.b, body_free);
      while (body_free.count(st.name(cand)) ||
             std::find(binders.begin(), binders.end(), st.name(cand)) != binders.end())
        cand += "'";
      NameId shown = st.name(cand);
      out += "\\" + print_name(shown, pretty) + ":" + print_type(st.type(n.type).left) + ". ";
      binders.push_back(shown);
      print_term_rec(n.b, pretty, binders, avoid, out, false);
      binders.pop_back();
      if (paren) out += ")";
      break;
    }
    case Kind::Fun: {
      out += print_name(st.sym(n.a).name, pretty);
      if (n.argc > 0) {
        out += "(";
        for (uint32_t i = 0; i < n.argc; ++i) {
          if (i) out += ", ";
          print_term_rec(st.fun_arg(t, i), pretty, binders, avoid, out, false);
        }
        out += ")";
      }
      break;
    }
  }
}

}  // namespace detail

inline std::string print_term(TermId t, bool pretty = false) {
  std::string out;
  std::vector<NameId> binders;
  std::unordered_set<NameId> avoid;
  detail::print_term_rec(t, pretty, binders, avoid, out, false);
  return out;
}

}  // namespace consfree
