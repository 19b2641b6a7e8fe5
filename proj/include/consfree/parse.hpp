#pragma once

// Parsing for the on-disk formats: AFS files, terms in surface syntax, and
// Turing machine descriptions.
//
// AFS grammar:
//   file  := decl*
//   decl  := "sort" id ";"
//          | "cons" id ":" decltype ";"
//          | "def"  id ":" decltype ";"
//          | ["forall" v "in" "{" ids "}" ("," v "in" "{" ids "}")* ":"]
//            "rule" term "->" term ";"
//   decltype := "[" type ("x" type)* "]" "=>" id | type
//   type  := atom ("->" type)? ;  atom := id | "(" type ")"
//   term  := "\" id ":" type "." term | atoms ;  atoms := atom+ (left-assoc)
//   atom  := id "(" term ("," term)* ")" | id | "(" term ")"
//
// Identifiers may be quoted ('#', '?') for names that are not plain
// identifiers; "|>" is an alias for the string terminator symbol "▷".
// Comments run from "//" to end of line.

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "consfree/afs.hpp"
#include "consfree/print.hpp"
#include "consfree/store.hpp"
#include "consfree/term_ops.hpp"

namespace consfree {

namespace detail {

struct Token {
  enum Type { Ident, Punct, End } type = End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }
  bool at(const std::string& s) const {
    return tok_.type != Token::End && tok_.text == s;
  }
  bool accept(const std::string& s) {
    if (!at(s)) return false;
    advance();
    return true;
  }
  void expect(const std::string& s) {
    if (!accept(s))
      throw ParseError("expected '" + s + "', found '" + describe() + "'", tok_.line,
                       tok_.col);
  }
  std::string expect_ident() {
    if (tok_.type != Token::Ident)
      throw ParseError("expected identifier, found '" + describe() + "'", tok_.line,
                       tok_.col);
    return next().text;
  }
  bool done() const { return tok_.type == Token::End; }
  std::string describe() const {
    return tok_.type == Token::End ? "<end of input>" : tok_.text;
  }
  int line() const { return tok_.line; }
  int col() const { return tok_.col; }

 private:
  void advance() {
    skip_ws();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = Token{Token::End, "", line_, col_};
      return;
    }
    char c = src_[pos_];
    // Quoted identifier: '...'
    if (c == '\'') {
      size_t end = src_.find('\'', pos_ + 1);
      if (end == std::string::npos)
        throw ParseError("unterminated quoted identifier", line_, col_);
      tok_ = Token{Token::Ident, std::string(src_.substr(pos_ + 1, end - pos_ - 1)),
                   line_, col_};
      bump(end + 1 - pos_);
      return;
    }
    // Multi-char punctuation.
    for (const char* p : {"->", "=>", "|>"}) {
      if (src_.compare(pos_, 2, p) == 0) {
        if (std::string(p) == "|>") {
          tok_ = Token{Token::Ident, "▷", line_, col_};
        } else {
          tok_ = Token{Token::Punct, p, line_, col_};
        }
        bump(2);
        return;
      }
    }
    if (is_ident_char(static_cast<unsigned char>(c), true)) {
      size_t end = pos_;
      while (end < src_.size() &&
             is_ident_char(static_cast<unsigned char>(src_[end]), end == pos_))
        ++end;
      // Allow digits after the first char; also allow leading digits so
      // constructor names like "0" and "1" lex as identifiers.
      tok_ = Token{Token::Ident, std::string(src_.substr(pos_, end - pos_)), line_, col_};
      bump(end - pos_);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t end = pos_;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end])))
        ++end;
      tok_ = Token{Token::Ident, std::string(src_.substr(pos_, end - pos_)), line_, col_};
      bump(end - pos_);
      return;
    }
    tok_ = Token{Token::Punct, std::string(1, c), line_, col_};
    bump(1);
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump(1);
      } else {
        break;
      }
    }
  }

  void bump(size_t n) {
    for (size_t i = 0; i < n && pos_ < src_.size(); ++i, ++pos_) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Term parsing

class TermParser {
 public:
  TermParser(const AFS& afs, detail::Lexer& lex) : afs_(afs), lex_(lex) {}

  // Free variables are typed from context (argument positions of known
  // symbols). Binder-introduced variables are typed by their annotation.
  TermId parse(std::optional<TypeId> expected) {
    TermId t = parse_term(expected);
    return t;
  }

  const std::map<std::string, TermId>& free_var_map() const { return free_vars_; }

 private:
  TypeId parse_type() {
    TypeId left;
    if (lex_.accept("(")) {
      left = parse_type();
      lex_.expect(")");
    } else {
      std::string id = lex_.expect_ident();
      if (!afs_.has_sort(store().name(id)))
        throw ParseError("unknown sort '" + id + "'", lex_.line(), lex_.col());
      left = store().sort(id);
    }
    if (lex_.accept("->")) return store().arrow(left, parse_type());
    return left;
  }

  TermId parse_term(std::optional<TypeId> expected) {
    if (lex_.accept("\\")) {
      std::string name = lex_.expect_ident();
      lex_.expect(":");
      TypeId ty = parse_type();
      lex_.expect(".");
      TermId var = store().var(store().name(name), ty);
      binders_.push_back({name, var});
      std::optional<TypeId> body_expected;
      if (expected && store().type(*expected).arrow) {
        if (store().type(*expected).left != ty)
          throw ParseError("binder type does not match expected type", lex_.line(),
                           lex_.col());
        body_expected = store().type(*expected).right;
      }
      TermId body = parse_term(body_expected);
      binders_.pop_back();
      return make_abs(var, body);
    }
    // Application chain: atom+
    TermId head = parse_atom(expected, /*may_apply=*/true);
    while (starts_atom()) {
      TypeId ht = store().node(head).type;
      if (!store().type(ht).arrow)
        throw ParseError("cannot apply a term of sort type", lex_.line(), lex_.col());
      TermId arg = parse_atom(store().type(ht).left, false);
      head = store().app(head, arg);
    }
    if (expected && store().node(head).type != *expected)
      throw ParseError("term has type " + print_type(store().node(head).type) +
                           " but " + print_type(*expected) + " was expected",
                       lex_.line(), lex_.col());
    return head;
  }

  bool starts_atom() {
    const detail::Token& t = lex_.peek();
    if (t.type == detail::Token::Ident) return true;
    return t.type == detail::Token::Punct && (t.text == "(" || t.text == "\\");
  }

  TermId parse_atom(std::optional<TypeId> expected, bool may_apply) {
    if (lex_.accept("(")) {
      // Inside parens the expected type is unknown until application resolves.
      TermId t = parse_term(std::nullopt);
      lex_.expect(")");
      return t;
    }
    if (lex_.at("\\")) return parse_term(expected);
    int line = lex_.line(), col = lex_.col();
    std::string id = lex_.expect_ident();
    // Binders shadow symbols and free variables.
    for (auto it = binders_.rbegin(); it != binders_.rend(); ++it)
      if (it->first == id) return it->second;

    SymId sym = afs_.find_symbol(id);
    if (sym != kNone) {
      const SymbolInfo& si = store().sym(sym);
      std::vector<TermId> args;
      if (lex_.accept("(")) {
        if (si.decl.args.empty())
          throw ParseError("symbol '" + id + "' takes no arguments", line, col);
        for (size_t i = 0; i < si.decl.args.size(); ++i) {
          if (i) lex_.expect(",");
          args.push_back(parse_term(si.decl.args[i]));
        }
        lex_.expect(")");
      } else if (!si.decl.args.empty()) {
        throw ParseError("symbol '" + id + "' expects " +
                             std::to_string(si.decl.args.size()) + " arguments",
                         line, col);
      }
      return store().fun(sym, args);
    }

    // Free variable.
    auto it = free_vars_.find(id);
    if (it != free_vars_.end()) return it->second;
    if (!expected)
      throw ParseError("cannot infer a type for variable '" + id + "'", line, col);
    TermId v = store().var(store().name(id), *expected);
    free_vars_.emplace(id, v);
    return v;
  }

  const AFS& afs_;
  detail::Lexer& lex_;
  std::vector<std::pair<std::string, TermId>> binders_;
  std::map<std::string, TermId> free_vars_;
};

inline TermId parse_term(const AFS& afs, std::string_view text,
                         std::optional<TypeId> expected = std::nullopt) {
  detail::Lexer lex(text);
  TermParser p(afs, lex);
  TermId t = p.parse(expected);
  if (!lex.done())
    throw ParseError("trailing input after term: '" + lex.describe() + "'", lex.line(),
                     lex.col());
  return t;
}

// ---------------------------------------------------------------------------
// AFS file parsing

// Parses the AFS file format. Rule right-hand sides reuse the variable
// typings established by their left-hand sides, and forall schemas expand
// to one rule per combination of metavariable values.
inline AFS parse_afs(std::string_view text) {
  detail::Lexer lex(text);
  AFS afs;
  // The built-in sorts exist in every signature this tool produces.
  afs.add_sort(store().name("string"));
  afs.add_sort(store().name("bool"));

  auto parse_type_in = [&](detail::Lexer& lx) {
    // Local copy of type grammar for declarations.
    std::function<TypeId()> go = [&]() -> TypeId {
      TypeId left;
      if (lx.accept("(")) {
        left = go();
        lx.expect(")");
      } else {
        std::string id = lx.expect_ident();
        if (!afs.has_sort(store().name(id)))
          throw ParseError("unknown sort '" + id + "'", lx.line(), lx.col());
        left = store().sort(id);
      }
      if (lx.accept("->")) return store().arrow(left, go());
      return left;
    };
    return go();
  };

  auto parse_decl_type = [&](detail::Lexer& lx) -> TypeDecl {
    TypeDecl d;
    if (lx.accept("[")) {
      d.args.push_back(parse_type_in(lx));
      while (lx.accept("x") || lx.accept("×")) d.args.push_back(parse_type_in(lx));
      lx.expect("]");
      lx.expect("=>");
      std::string out = lx.expect_ident();
      if (!afs.has_sort(store().name(out)))
        throw ParseError("unknown sort '" + out + "'", lx.line(), lx.col());
      d.out = store().sort(out);
    } else {
      TypeId t = parse_type_in(lx);
      if (store().type(t).arrow)
        throw ParseError("a nullary declaration must be a sort", lx.line(), lx.col());
      d.out = t;
    }
    return d;
  };

  // Collect the raw token text of a rule side up to a stop token, so that
  // forall schemas can be re-instantiated per combination.
  auto slurp_until = [&](const std::string& stop1, const std::string& stop2) {
    std::string out;
    int depth = 0;
    while (!lex.done()) {
      const detail::Token& t = lex.peek();
      if (depth == 0 && t.type == detail::Token::Punct &&
          (t.text == stop1 || (!stop2.empty() && t.text == stop2)))
        break;
      if (t.type == detail::Token::Punct && t.text == "(") depth++;
      if (t.type == detail::Token::Punct && t.text == ")") depth--;
      detail::Token tok = lex.next();
      std::string text = tok.text;
      if (tok.type == detail::Token::Ident && !is_plain_ident(text))
        text = "'" + text + "'";
      out += text;
      out += " ";
    }
    return out;
  };

  while (!lex.done()) {
    int line = lex.line(), col = lex.col();
    if (lex.accept("sort")) {
      std::string id = lex.expect_ident();
      afs.add_sort(store().name(id));
      lex.expect(";");
    } else if (lex.at("cons") || lex.at("def")) {
      bool is_cons = lex.peek().text == "cons";
      lex.next();
      std::string id = lex.expect_ident();
      lex.expect(":");
      TypeDecl d = parse_decl_type(lex);
      SymId s = store().symbol(store().name(id), d);
      if (is_cons)
        afs.add_constructor(s);
      else
        afs.add_defined(s);
      lex.expect(";");
    } else if (lex.at("forall") || lex.at("rule")) {
      std::vector<std::pair<std::string, std::vector<std::string>>> metas;
      if (lex.accept("forall")) {
        do {
          std::string v = lex.expect_ident();
          lex.expect("in");
          lex.expect("{");
          std::vector<std::string> vals;
          vals.push_back(lex.expect_ident());
          while (lex.accept(",")) vals.push_back(lex.expect_ident());
          lex.expect("}");
          metas.emplace_back(v, vals);
        } while (lex.accept(","));
        lex.expect(":");
      }
      lex.expect("rule");
      std::string lhs_src = slurp_until("->", "");
      lex.expect("->");
      std::string rhs_src = slurp_until(";", "");
      lex.expect(";");

      size_t combos = 1;
      for (auto& [_, vals] : metas) combos *= vals.size();
      for (size_t c = 0; c < combos; ++c) {
        size_t rest = c;
        std::map<std::string, std::string> env;
        for (auto& [var, vals] : metas) {
          env[var] = vals[rest % vals.size()];
          rest /= vals.size();
        }
        auto instantiate = [&](const std::string& src) {
          std::string out;
          detail::Lexer relex(src);
          while (!relex.done()) {
            detail::Token t = relex.next();
            std::string text = t.text;
            if (t.type == detail::Token::Ident) {
              auto it = env.find(text);
              if (it != env.end()) text = it->second;
              if (!is_plain_ident(text)) text = "'" + text + "'";
            }
            out += text + " ";
          }
          return out;
        };
        std::string li = instantiate(lhs_src);
        std::string ri = instantiate(rhs_src);
        try {
          std::string joined = li + " ; " + ri;
          detail::Lexer llex(joined);
          // Parse lhs and rhs with one parser so variables type consistently.
          TermParser p(afs, llex);
          TermId lhs = p.parse(std::nullopt);
          llex.expect(";");
          TermId rhs = p.parse(store().node(lhs).type);
          afs.add_rule(lhs, rhs);
        } catch (Error& e) {
          throw ParseError(std::string(e.what()) + " [in rule at line " +
                               std::to_string(line) + "]",
                           line, col);
        }
      }
    } else {
      throw ParseError("expected 'sort', 'cons', 'def', 'forall' or 'rule', found '" +
                           lex.describe() + "'",
                       line, col);
    }
  }
  return afs;
}

// Encode an input word as the data term x1(x2(...xn(▷)...)). Every character
// must be a declared unary string constructor.
inline TermId encode_input(const AFS& afs, const std::string& input) {
  if (input.empty()) throw ValidationFailure("input word must be nonempty");
  Store& st = store();
  TypeId str = st.sort("string");
  SymId terminator = kNone;
  for (SymId c : afs.constructors)
    if (st.sym(c).name == st.name("▷") && st.sym(c).decl.args.empty() &&
        st.sym(c).decl.out == str)
      terminator = c;
  if (terminator == kNone)
    throw ValidationFailure("signature lacks the string terminator constructor");
  TermId t = st.fun(terminator, {});
  for (auto it = input.rbegin(); it != input.rend(); ++it) {
    std::string ch(1, *it);
    SymId sym = kNone;
    for (SymId c : afs.constructors) {
      const SymbolInfo& si = st.sym(c);
      if (st.name_str(si.name) == ch && si.decl.args.size() == 1 &&
          si.decl.args[0] == str && si.decl.out == str)
        sym = c;
    }
    if (sym == kNone)
      throw ValidationFailure("input character '" + ch +
                              "' is not a declared string constructor");
    t = st.fun(sym, {t});
  }
  return t;
}

// The designated decision symbol decide : [string] => bool.
inline SymId find_decide_symbol(const AFS& afs) {
  Store& st = store();
  TypeDecl want{{st.sort("string")}, st.sort("bool")};
  for (SymId s : afs.defined) {
    const SymbolInfo& si = st.sym(s);
    if (st.name_str(si.name) == "decide" && si.decl == want) return s;
  }
  throw ValidationFailure("signature lacks decide : [string] => bool");
}

// ---------------------------------------------------------------------------
// Printing an AFS back to its file format.

inline std::string print_afs(const AFS& afs) {
  std::string out;
  Store& st = store();
  NameId string_name = st.name("string");
  NameId bool_name = st.name("bool");
  for (NameId s : afs.sorts)
    if (s != string_name && s != bool_name)
      out += "sort " + print_name(s, false) + ";\n";
  for (SymId c : afs.constructors)
    out += "cons " + print_name(st.sym(c).name, false) + " : " +
           print_decl(st.sym(c).decl) + ";\n";
  for (SymId d : afs.defined)
    out += "def " + print_name(st.sym(d).name, false) + " : " +
           print_decl(st.sym(d).decl) + ";\n";
  for (const Rule& r : afs.rules)
    out += "rule " + print_term(r.lhs) + " -> " + print_term(r.rhs) + ";\n";
  return out;
}

}  // namespace consfree
