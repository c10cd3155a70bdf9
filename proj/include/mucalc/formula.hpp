// Modal mu-calculus syntax: AST, parser, printer, normal forms,
// priority assignment and alternation classes.
#pragma once

#include <algorithm>
#include <cassert>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mucalc {

enum class FKind { Top, Bottom, Lit, Var, Or, And, Dia, Box, Mu, Nu };

struct FNode;
using FPtr = std::shared_ptr<const FNode>;

// One AST node. Every occurrence of a subformula is a distinct node, so
// node addresses identify subformula occurrences.
struct FNode {
  FKind kind;
  std::string name;    // Lit: proposition, Var/Mu/Nu: variable name
  bool positive = true; // Lit polarity
  std::string action;  // Dia/Box
  FPtr l, r;           // children; unary nodes use l only
};

inline FPtr f_top() { return std::make_shared<FNode>(FNode{FKind::Top}); }
inline FPtr f_bottom() { return std::make_shared<FNode>(FNode{FKind::Bottom}); }
inline FPtr f_lit(std::string p, bool pos = true) {
  return std::make_shared<FNode>(FNode{FKind::Lit, std::move(p), pos});
}
inline FPtr f_var(std::string x) {
  return std::make_shared<FNode>(FNode{FKind::Var, std::move(x)});
}
inline FPtr f_or(FPtr a, FPtr b) {
  return std::make_shared<FNode>(FNode{FKind::Or, "", true, "", std::move(a), std::move(b)});
}
inline FPtr f_and(FPtr a, FPtr b) {
  return std::make_shared<FNode>(FNode{FKind::And, "", true, "", std::move(a), std::move(b)});
}
inline FPtr f_dia(std::string act, FPtr b) {
  return std::make_shared<FNode>(FNode{FKind::Dia, "", true, std::move(act), std::move(b)});
}
inline FPtr f_box(std::string act, FPtr b) {
  return std::make_shared<FNode>(FNode{FKind::Box, "", true, std::move(act), std::move(b)});
}
inline FPtr f_mu(std::string x, FPtr body) {
  return std::make_shared<FNode>(FNode{FKind::Mu, std::move(x), true, "", std::move(body)});
}
inline FPtr f_nu(std::string x, FPtr body) {
  return std::make_shared<FNode>(FNode{FKind::Nu, std::move(x), true, "", std::move(body)});
}

inline bool is_binder(FKind k) { return k == FKind::Mu || k == FKind::Nu; }
inline bool is_modal(FKind k) { return k == FKind::Dia || k == FKind::Box; }

// Deep copy with fresh node identities.
inline FPtr clone(const FPtr& f) {
  if (!f) return nullptr;
  auto n = std::make_shared<FNode>(*f);
  const_cast<FNode&>(*n).l = clone(f->l);
  const_cast<FNode&>(*n).r = clone(f->r);
  return n;
}

inline bool struct_eq(const FPtr& a, const FPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name || a->positive != b->positive ||
      a->action != b->action)
    return false;
  return struct_eq(a->l, b->l) && struct_eq(a->r, b->r);
}

namespace detail {
inline bool alpha_eq_rec(const FPtr& a, const FPtr& b, std::map<std::string, std::string>& ab,
                         std::map<std::string, std::string>& ba) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind || a->positive != b->positive || a->action != b->action)
    return false;
  switch (a->kind) {
    case FKind::Lit: return a->name == b->name;
    case FKind::Var: {
      auto it = ab.find(a->name);
      if (it != ab.end()) return it->second == b->name;
      // both free: must agree and not be captured
      return !ba.count(b->name) && a->name == b->name;
    }
    case FKind::Mu:
    case FKind::Nu: {
      auto sa = ab.count(a->name) ? std::optional<std::string>(ab[a->name]) : std::nullopt;
      auto sb = ba.count(b->name) ? std::optional<std::string>(ba[b->name]) : std::nullopt;
      ab[a->name] = b->name;
      ba[b->name] = a->name;
      bool ok = alpha_eq_rec(a->l, b->l, ab, ba);
      if (sa) ab[a->name] = *sa; else ab.erase(a->name);
      if (sb) ba[b->name] = *sb; else ba.erase(b->name);
      return ok;
    }
    default:
      return alpha_eq_rec(a->l, b->l, ab, ba) && alpha_eq_rec(a->r, b->r, ab, ba);
  }
}
} // namespace detail

// structural equality up to renaming of bound variables
inline bool alpha_eq(const FPtr& a, const FPtr& b) {
  std::map<std::string, std::string> ab, ba;
  return detail::alpha_eq_rec(a, b, ab, ba);
}

namespace detail {
inline void alpha_key_rec(const FNode* n, std::vector<std::string>& binders, std::string& out) {
  switch (n->kind) {
    case FKind::Top: out += "T"; return;
    case FKind::Bottom: out += "F"; return;
    case FKind::Lit:
      out += n->positive ? "p:" : "n:";
      out += n->name + ";";
      return;
    case FKind::Var: {
      for (int i = static_cast<int>(binders.size()) - 1; i >= 0; --i)
        if (binders[i] == n->name) {
          out += "b" + std::to_string(binders.size() - 1 - i) + ";";
          return;
        }
      out += "f:" + n->name + ";";
      return;
    }
    case FKind::Or:
    case FKind::And:
      out += n->kind == FKind::Or ? "|(" : "&(";
      alpha_key_rec(n->l.get(), binders, out);
      out += ",";
      alpha_key_rec(n->r.get(), binders, out);
      out += ")";
      return;
    case FKind::Dia:
    case FKind::Box:
      out += (n->kind == FKind::Dia ? "<" : "[") + n->action + "(";
      alpha_key_rec(n->l.get(), binders, out);
      out += ")";
      return;
    case FKind::Mu:
    case FKind::Nu:
      out += n->kind == FKind::Mu ? "u(" : "v(";
      binders.push_back(n->name);
      alpha_key_rec(n->l.get(), binders, out);
      binders.pop_back();
      out += ")";
      return;
  }
}
} // namespace detail

// canonical key of the alpha-equivalence class (bound names positional)
inline std::string alpha_key(const FNode* n) {
  std::vector<std::string> binders;
  std::string out;
  detail::alpha_key_rec(n, binders, out);
  return out;
}

// A formula together with its declared action alphabet.
struct Formula {
  FPtr root;
  std::vector<std::string> alphabet; // sorted, unique, non-empty

  bool operator==(const Formula& o) const {
    return alphabet == o.alphabet && struct_eq(root, o.root);
  }
};

// ---------------------------------------------------------------------------
// Traversal helpers

inline void for_each_node(const FPtr& f, const std::function<void(const FPtr&)>& fn) {
  if (!f) return;
  fn(f);
  for_each_node(f->l, fn);
  for_each_node(f->r, fn);
}

inline long formula_size(const FPtr& f) {
  long n = 0;
  for_each_node(f, [&](const FPtr&) { ++n; });
  return n;
}

inline void collect_actions(const FPtr& f, std::set<std::string>& out) {
  for_each_node(f, [&](const FPtr& n) {
    if (is_modal(n->kind) && n->action != ".") out.insert(n->action);
  });
}

inline void collect_props(const FPtr& f, std::set<std::string>& out) {
  for_each_node(f, [&](const FPtr& n) {
    if (n->kind == FKind::Lit) out.insert(n->name);
  });
}

// ---------------------------------------------------------------------------
// Scoping and structural analysis

struct FormulaInfo {
  std::vector<const FNode*> nodes;                  // all occurrences, preorder
  std::map<const FNode*, const FNode*> binding;     // Var occurrence -> binder
  std::map<std::string, const FNode*> binder_of;    // variable name -> binder
  std::vector<const FNode*> binders;                // preorder
  std::set<std::string> free_vars;                  // names used but unbound
  bool guarded = true;
};

namespace detail {
struct ScopeEntry {
  const FNode* binder;
  bool under_modality;
};

inline void analyze_rec(const FPtr& f, std::vector<detail::ScopeEntry>& scope,
                        FormulaInfo& info) {
  info.nodes.push_back(f.get());
  switch (f->kind) {
    case FKind::Top:
    case FKind::Bottom:
    case FKind::Lit:
      break;
    case FKind::Var: {
      bool found = false;
      for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
        if (it->binder->name == f->name) {
          info.binding[f.get()] = it->binder;
          if (!it->under_modality) info.guarded = false;
          found = true;
          break;
        }
      }
      if (!found) info.free_vars.insert(f->name);
      break;
    }
    case FKind::Or:
    case FKind::And:
      analyze_rec(f->l, scope, info);
      analyze_rec(f->r, scope, info);
      break;
    case FKind::Dia:
    case FKind::Box: {
      std::vector<ScopeEntry> inner = scope;
      for (auto& e : inner) e.under_modality = true;
      analyze_rec(f->l, inner, info);
      break;
    }
    case FKind::Mu:
    case FKind::Nu: {
      info.binders.push_back(f.get());
      if (info.binder_of.count(f->name))
        throw std::runtime_error("duplicate fixpoint variable name: " + f->name);
      info.binder_of[f->name] = f.get();
      scope.push_back({f.get(), false});
      analyze_rec(f->l, scope, info);
      scope.pop_back();
      break;
    }
  }
}
} // namespace detail

inline FormulaInfo analyze(const FPtr& f) {
  FormulaInfo info;
  std::vector<detail::ScopeEntry> scope;
  detail::analyze_rec(f, scope, info);
  return info;
}

// ---------------------------------------------------------------------------
// Priority assignment, index, alternation class

struct PriorityAssignment {
  std::map<const FNode*, int> of_binder; // binder node -> priority
  int low = 0, high = 0;                 // co-domain interval {high..low}
  bool has_binders = false;

  int priority_of_var(const FormulaInfo& info, const FNode* var) const {
    auto b = info.binding.find(var);
    assert(b != info.binding.end());
    return of_binder.at(b->second);
  }
};

struct AltClass {
  bool modal = false;
  bool pi = false; // else sigma
  int level = 0;

  std::string str() const {
    if (modal) return "modal";
    return (pi ? "Pi" : "Sigma") + std::to_string(level);
  }
  bool operator==(const AltClass& o) const {
    return modal == o.modal && (modal || (pi == o.pi && level == o.level));
  }
};

struct Index {
  bool modal = false;
  int high = 0, low = 0; // interval {high,...,low}, low in {0,1}

  AltClass alt_class() const {
    if (modal) return {true, false, 0};
    if (low == 1) {
      // {q,...,1}: Sigma_q for odd q, Pi_q for even q
      return {false, high % 2 == 0, std::max(high, 1)};
    }
    // {q,...,0}: class level q+1; Pi for odd level, Sigma for even
    int level = high + 1;
    return {false, level % 2 == 1, level};
  }
  std::string str() const {
    if (modal) return "modal";
    std::string s = "{";
    for (int p = high; p >= low; --p) {
      s += std::to_string(p);
      if (p > low) s += ",";
    }
    return s + "}";
  }
};

// Pointwise-minimal valid priority assignment above a given floor:
// mu-binders odd, nu-binders even, and Omega(X) >= Omega(Y) whenever X
// occurs free in the binding formula of Y.  Inner binders are resolved
// first; each binder then takes the least priority >= floor of its own
// parity compatible with the constraints.
inline PriorityAssignment compute_assignment_floor(const FPtr& f, const FormulaInfo& info,
                                                   int floor) {
  PriorityAssignment pa;
  if (info.binders.empty()) return pa;
  pa.has_binders = true;

  // lower_bounds[X] = binders Y nested below X that mention X in their body
  std::map<const FNode*, std::set<const FNode*>> lower_bounds;
  {
    std::vector<const FNode*> stack;
    std::function<void(const FPtr&)> walk = [&](const FPtr& n) {
      if (!n) return;
      if (n->kind == FKind::Var) {
        auto it = info.binding.find(n.get());
        if (it != info.binding.end()) {
          // every binder strictly between the binding binder and this
          // occurrence gets a lower bound from it
          bool seen = false;
          for (auto s = stack.begin(); s != stack.end(); ++s) {
            if (*s == it->second) { seen = true; continue; }
            if (seen) lower_bounds[it->second].insert(*s);
          }
        }
      }
      if (is_binder(n->kind)) stack.push_back(n.get());
      walk(n->l);
      walk(n->r);
      if (is_binder(n->kind)) stack.pop_back();
    };
    walk(f);
  }

  // postorder over binder nesting: inner binders first
  std::function<void(const FNode*)> solve = [&](const FNode* b) {
    int v = std::max(floor, (b->kind == FKind::Mu) ? 1 : 0);
    for (const FNode* y : lower_bounds[b]) {
      assert(pa.of_binder.count(y));
      v = std::max(v, pa.of_binder.at(y));
    }
    if ((v % 2 == 0) != (b->kind == FKind::Nu)) ++v;
    pa.of_binder[b] = v;
  };
  // binders listed preorder; reverse gives children before parents for
  // nested chains, and unrelated binders are independent
  for (auto it = info.binders.rbegin(); it != info.binders.rend(); ++it) solve(*it);

  pa.low = floor;
  pa.high = floor;
  for (auto& [b, p] : pa.of_binder) pa.high = std::max(pa.high, p);
  return pa;
}

// Minimal-length index: an index interval ends at 0 or 1, so try both
// floors and keep the shorter interval (ties go to the {...,0} side).
inline PriorityAssignment compute_assignment(const FPtr& f, const FormulaInfo& info) {
  PriorityAssignment p0 = compute_assignment_floor(f, info, 0);
  if (!p0.has_binders) return p0;
  PriorityAssignment p1 = compute_assignment_floor(f, info, 1);
  int len0 = p0.high - p0.low + 1, len1 = p1.high - p1.low + 1;
  return len1 < len0 ? p1 : p0;
}

inline Index index_of(const PriorityAssignment& pa) {
  if (!pa.has_binders) return {true, 0, 0};
  return {false, pa.high, pa.low};
}

inline std::pair<Index, PriorityAssignment> compute_index(const Formula& f) {
  auto info = analyze(f.root);
  auto pa = compute_assignment(f.root, info);
  return {index_of(pa), pa};
}

inline AltClass classify(const Formula& f) { return compute_index(f).first.alt_class(); }

// ---------------------------------------------------------------------------
// Printing

namespace detail {
// precedence levels: 0 binder, 1 or, 2 and, 3 modal, 4 atom
inline int level_of(const FNode* n) {
  switch (n->kind) {
    case FKind::Mu:
    case FKind::Nu: return 0;
    case FKind::Or: return 1;
    case FKind::And: return 2;
    case FKind::Dia:
    case FKind::Box: return 3;
    default: return 4;
  }
}

inline void print_rec(const FPtr& f, int min_level, std::string& out) {
  bool paren = level_of(f.get()) < min_level;
  if (paren) out += "(";
  switch (f->kind) {
    case FKind::Top: out += "tt"; break;
    case FKind::Bottom: out += "ff"; break;
    case FKind::Lit:
      if (!f->positive) out += "~";
      out += f->name;
      break;
    case FKind::Var: out += f->name; break;
    case FKind::Or:
      print_rec(f->l, 1, out);
      out += " | ";
      print_rec(f->r, 2, out);
      break;
    case FKind::And:
      print_rec(f->l, 2, out);
      out += " & ";
      print_rec(f->r, 3, out);
      break;
    case FKind::Dia:
      out += "<" + f->action + ">";
      print_rec(f->l, 3, out);
      break;
    case FKind::Box:
      out += "[" + f->action + "]";
      print_rec(f->l, 3, out);
      break;
    case FKind::Mu:
    case FKind::Nu:
      out += (f->kind == FKind::Mu ? "mu " : "nu ") + f->name + ". ";
      print_rec(f->l, 0, out);
      break;
  }
  if (paren) out += ")";
}
} // namespace detail

inline std::string to_string(const FPtr& f) {
  std::string out;
  detail::print_rec(f, 0, out);
  return out;
}

inline std::string to_string(const Formula& f) { return to_string(f.root); }

// Canonical text form: an `actions` header is emitted only when the declared
// alphabet is not implied by the formula body.
inline std::string serialize(const Formula& f) {
  std::set<std::string> occ;
  collect_actions(f.root, occ);
  std::vector<std::string> def(occ.begin(), occ.end());
  if (def.empty()) def = {"t"};
  std::string out;
  if (def != f.alphabet) {
    out += "actions";
    for (auto& a : f.alphabet) out += " " + a;
    out += "\n";
  }
  return out + to_string(f.root);
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {
struct Parser {
  const std::string& src;
  size_t pos = 0;
  std::vector<std::string> binder_stack;
  std::set<std::string> binder_names;

  explicit Parser(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("parse error at offset " + std::to_string(pos) + ": " + msg);
  }
  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) { ++pos; return true; }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  bool peek_ident_start() {
    skip_ws();
    return pos < src.size() && std::isalpha(static_cast<unsigned char>(src[pos]));
  }
  std::string ident() {
    skip_ws();
    size_t s = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' ||
            src[pos] == '\''))
      ++pos;
    if (s == pos) fail("expected identifier");
    return src.substr(s, pos - s);
  }

  FPtr formula() { return or_expr(); }

  FPtr or_expr() {
    FPtr a = and_expr();
    while (true) {
      skip_ws();
      if (pos < src.size() && src[pos] == '|') { ++pos; a = f_or(a, and_expr()); }
      else break;
    }
    return a;
  }

  FPtr and_expr() {
    FPtr a = unary();
    while (true) {
      skip_ws();
      if (pos < src.size() && src[pos] == '&') { ++pos; a = f_and(a, unary()); }
      else break;
    }
    return a;
  }

  std::string action_name() {
    skip_ws();
    if (pos < src.size() && src[pos] == '.') { ++pos; return "."; }
    std::string a = ident();
    if (!std::islower(static_cast<unsigned char>(a[0]))) fail("action names start lowercase");
    return a;
  }

  FPtr unary() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    char c = src[pos];
    if (c == '(') {
      ++pos;
      FPtr f = formula();
      expect(')');
      return f;
    }
    if (c == '<') {
      ++pos;
      std::string a = action_name();
      expect('>');
      return f_dia(a, unary());
    }
    if (c == '[') {
      ++pos;
      std::string a = action_name();
      expect(']');
      return f_box(a, unary());
    }
    if (c == '~') {
      ++pos;
      std::string n = ident();
      if (!std::isupper(static_cast<unsigned char>(n[0])))
        fail("propositions start uppercase");
      for (auto& b : binder_stack)
        if (b == n) fail("negation applied to bound variable " + n);
      return f_lit(n, false);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string n = ident();
      if (n == "tt") return f_top();
      if (n == "ff") return f_bottom();
      if (n == "mu" || n == "nu") {
        std::string v = ident();
        if (!std::isupper(static_cast<unsigned char>(v[0])))
          fail("fixpoint variables start uppercase");
        if (binder_names.count(v)) fail("duplicate fixpoint variable " + v);
        binder_names.insert(v);
        expect('.');
        binder_stack.push_back(v);
        FPtr body = formula();
        binder_stack.pop_back();
        return n == "mu" ? f_mu(v, body) : f_nu(v, body);
      }
      if (!std::isupper(static_cast<unsigned char>(n[0])))
        fail("unexpected lowercase identifier " + n);
      for (auto it = binder_stack.rbegin(); it != binder_stack.rend(); ++it)
        if (*it == n) return f_var(n);
      return f_lit(n, true); // free uppercase names are propositions
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

// expand wildcard modalities over the alphabet
inline FPtr expand_wildcards(const FPtr& f, const std::vector<std::string>& alphabet) {
  if (!f) return nullptr;
  auto n = std::make_shared<FNode>(*f);
  auto& m = const_cast<FNode&>(*n);
  m.l = expand_wildcards(f->l, alphabet);
  m.r = expand_wildcards(f->r, alphabet);
  if (is_modal(f->kind) && f->action == ".") {
    FPtr acc;
    for (auto& a : alphabet) {
      FPtr body = acc ? clone(m.l) : m.l;
      FPtr one = (f->kind == FKind::Dia) ? f_dia(a, body) : f_box(a, body);
      if (!acc) acc = one;
      else acc = (f->kind == FKind::Dia) ? f_or(acc, one) : f_and(acc, one);
    }
    return acc;
  }
  return n;
}
} // namespace detail

inline Formula parse_formula(const std::string& text) {
  // optional header line: actions a b ...
  std::vector<std::string> declared;
  size_t body_start = 0;
  {
    size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (text.compare(i, 7, "actions") == 0 &&
        (i + 7 == text.size() || !std::isalnum(static_cast<unsigned char>(text[i + 7])))) {
      size_t eol = text.find('\n', i);
      if (eol == std::string::npos) throw std::runtime_error("actions header without formula");
      std::istringstream hs(text.substr(i + 7, eol - i - 7));
      std::string a;
      while (hs >> a) {
        if (!std::islower(static_cast<unsigned char>(a[0])))
          throw std::runtime_error("action names start lowercase: " + a);
        declared.push_back(a);
      }
      if (declared.empty()) throw std::runtime_error("empty actions header");
      body_start = eol + 1;
    }
  }
  std::string body = text.substr(body_start);
  detail::Parser p(body);
  FPtr root = p.formula();
  p.skip_ws();
  if (p.pos != body.size()) p.fail("trailing input");

  std::set<std::string> occ;
  collect_actions(root, occ);
  std::vector<std::string> alphabet;
  if (!declared.empty()) {
    std::set<std::string> ds(declared.begin(), declared.end());
    for (auto& a : occ)
      if (!ds.count(a)) throw std::runtime_error("undeclared action " + a);
    alphabet.assign(ds.begin(), ds.end());
  } else if (!occ.empty()) {
    alphabet.assign(occ.begin(), occ.end());
  } else {
    alphabet = {"t"};
  }
  root = detail::expand_wildcards(root, alphabet);
  analyze(root); // validates distinct binder names and scoping
  return Formula{root, alphabet};
}

// ---------------------------------------------------------------------------
// Negation (semantic dual in guarded positive form)

namespace detail {
inline FPtr negate_rec(const FPtr& f) {
  switch (f->kind) {
    case FKind::Top: return f_bottom();
    case FKind::Bottom: return f_top();
    case FKind::Lit: return f_lit(f->name, !f->positive);
    case FKind::Var: return f_var(f->name);
    case FKind::Or: return f_and(negate_rec(f->l), negate_rec(f->r));
    case FKind::And: return f_or(negate_rec(f->l), negate_rec(f->r));
    case FKind::Dia: return f_box(f->action, negate_rec(f->l));
    case FKind::Box: return f_dia(f->action, negate_rec(f->l));
    case FKind::Mu: return f_nu(f->name, negate_rec(f->l));
    case FKind::Nu: return f_mu(f->name, negate_rec(f->l));
  }
  throw std::logic_error("negate: bad kind");
}
} // namespace detail

inline Formula negate(const Formula& f) {
  return Formula{detail::negate_rec(f.root), f.alphabet};
}

// ---------------------------------------------------------------------------
// Normalization: guarding transformation, constant folding, binder renaming

namespace detail {

inline bool free_in(const FPtr& f, const std::string& x) {
  if (!f) return false;
  if (f->kind == FKind::Var) return f->name == x;
  if (is_binder(f->kind) && f->name == x) return false;
  return free_in(f->l, x) || free_in(f->r, x);
}

// substitute every free occurrence of variable x by a clone of rep
inline FPtr subst(const FPtr& f, const std::string& x, const FPtr& rep) {
  if (!f) return nullptr;
  if (f->kind == FKind::Var) return f->name == x ? clone(rep) : f;
  if (is_binder(f->kind) && f->name == x) return f;
  auto n = std::make_shared<FNode>(*f);
  auto& m = const_cast<FNode&>(*n);
  m.l = subst(f->l, x, rep);
  m.r = subst(f->r, x, rep);
  return n;
}

// does x occur free and not under a modality, with no binder in between?
inline bool has_shallow_unguarded(const FPtr& f, const std::string& x) {
  if (!f) return false;
  if (f->kind == FKind::Var) return f->name == x;
  if (f->kind == FKind::Or || f->kind == FKind::And)
    return has_shallow_unguarded(f->l, x) || has_shallow_unguarded(f->r, x);
  return false;
}

// does x occur free, not under a modality, but under some binder?
inline bool has_deep_unguarded(const FPtr& f, const std::string& x) {
  if (!f) return false;
  switch (f->kind) {
    case FKind::Var: return false;
    case FKind::Or:
    case FKind::And:
      return has_deep_unguarded(f->l, x) || has_deep_unguarded(f->r, x);
    case FKind::Mu:
    case FKind::Nu: {
      if (f->name == x) return false;
      // inside another binder: any unguarded occurrence counts as deep
      std::function<bool(const FPtr&)> ung = [&](const FPtr& g) -> bool {
        if (!g) return false;
        if (g->kind == FKind::Var) return g->name == x;
        if (is_binder(g->kind)) return g->name == x ? false : ung(g->l);
        if (g->kind == FKind::Or || g->kind == FKind::And) return ung(g->l) || ung(g->r);
        return false;
      };
      return ung(f->l);
    }
    default: return false;
  }
}

// unfold, in place, binders that hide unguarded occurrences of x
inline FPtr expose_unguarded(const FPtr& f, const std::string& x) {
  if (!f) return nullptr;
  switch (f->kind) {
    case FKind::Or:
    case FKind::And: {
      auto n = std::make_shared<FNode>(*f);
      auto& m = const_cast<FNode&>(*n);
      m.l = expose_unguarded(f->l, x);
      m.r = expose_unguarded(f->r, x);
      return n;
    }
    case FKind::Mu:
    case FKind::Nu: {
      if (f->name == x) return f;
      bool deep = has_deep_unguarded(f, x) ||
                  has_shallow_unguarded(f->l, x); // occurrence right below this binder
      if (!deep) return f;
      // unfold sigma Y. psi  ->  psi[sigma Y. psi / Y]; copies substituted for
      // Y sit under modalities (Y is guarded here), so x is guarded in them
      FPtr unfolded = subst(f->l, f->name, f);
      return expose_unguarded(unfolded, x);
    }
    default: return f;
  }
}

inline FPtr replace_shallow(const FPtr& f, const std::string& x, const FPtr& value) {
  if (!f) return nullptr;
  if (f->kind == FKind::Var && f->name == x) return clone(value);
  if (f->kind == FKind::Or || f->kind == FKind::And) {
    auto n = std::make_shared<FNode>(*f);
    auto& m = const_cast<FNode&>(*n);
    m.l = replace_shallow(f->l, x, value);
    m.r = replace_shallow(f->r, x, value);
    return n;
  }
  return f;
}

inline FPtr fold_constants(const FPtr& f) {
  if (!f) return nullptr;
  auto n = std::make_shared<FNode>(*f);
  auto& m = const_cast<FNode&>(*n);
  m.l = fold_constants(f->l);
  m.r = fold_constants(f->r);
  switch (f->kind) {
    case FKind::Or:
      if (m.l->kind == FKind::Top || m.r->kind == FKind::Top) return f_top();
      if (m.l->kind == FKind::Bottom) return m.r;
      if (m.r->kind == FKind::Bottom) return m.l;
      break;
    case FKind::And:
      if (m.l->kind == FKind::Bottom || m.r->kind == FKind::Bottom) return f_bottom();
      if (m.l->kind == FKind::Top) return m.r;
      if (m.r->kind == FKind::Top) return m.l;
      break;
    case FKind::Dia:
      if (m.l->kind == FKind::Bottom) return f_bottom();
      break;
    case FKind::Box:
      if (m.l->kind == FKind::Top) return f_top();
      break;
    case FKind::Mu:
      if (m.l->kind == FKind::Var && m.l->name == f->name) return f_bottom();
      if (!free_in(m.l, f->name)) return m.l;
      break;
    case FKind::Nu:
      if (m.l->kind == FKind::Var && m.l->name == f->name) return f_top();
      if (!free_in(m.l, f->name)) return m.l;
      break;
    default: break;
  }
  return n;
}

// bottom-up guarding: rewrite each binder so its own variable only occurs
// under modalities
inline FPtr guard_rec(const FPtr& f, bool& changed) {
  if (!f) return nullptr;
  auto n = std::make_shared<FNode>(*f);
  auto& m = const_cast<FNode&>(*n);
  m.l = guard_rec(f->l, changed);
  m.r = guard_rec(f->r, changed);
  if (is_binder(f->kind)) {
    FPtr body = m.l;
    if (has_shallow_unguarded(body, f->name) || has_deep_unguarded(body, f->name)) {
      changed = true;
      body = expose_unguarded(body, f->name);
      FPtr value = (f->kind == FKind::Mu) ? f_bottom() : f_top();
      body = replace_shallow(body, f->name, value);
      m.l = body;
    }
  }
  return n;
}

// deterministic fresh-name scheme: base, base1, base2, ...
inline FPtr rename_binders(const FPtr& f, std::map<std::string, std::string>& active,
                           std::map<std::string, int>& counter) {
  if (!f) return nullptr;
  if (f->kind == FKind::Var) {
    auto it = active.find(f->name);
    return f_var(it != active.end() ? it->second : f->name);
  }
  if (is_binder(f->kind)) {
    std::string base = f->name.substr(0, f->name.find('_'));
    int& k = counter[base];
    ++k;
    std::string fresh = k == 1 ? base : base + "_" + std::to_string(k);
    auto saved = active.count(f->name) ? std::optional<std::string>(active[f->name]) : std::nullopt;
    std::string key = f->name;
    active[key] = fresh;
    FPtr body = rename_binders(f->l, active, counter);
    if (saved) active[key] = *saved; else active.erase(key);
    return f->kind == FKind::Mu ? f_mu(fresh, body) : f_nu(fresh, body);
  }
  auto n = std::make_shared<FNode>(*f);
  auto& m = const_cast<FNode&>(*n);
  m.l = rename_binders(f->l, active, counter);
  m.r = rename_binders(f->r, active, counter);
  return n;
}
} // namespace detail

inline Formula refresh_binder_names(const Formula& f) {
  std::map<std::string, std::string> active;
  std::map<std::string, int> counter;
  return Formula{detail::rename_binders(f.root, active, counter), f.alphabet};
}

// Guarded positive form.  Positive form is structural in this AST; unguarded
// variable occurrences are eliminated by unfolding inner binders until the
// occurrence sits directly under its own binder, then replacing it by the
// fixpoint-neutral constant and folding.
inline Formula normalize(const Formula& f) {
  bool changed = false;
  FPtr g = detail::guard_rec(f.root, changed);
  if (changed) g = detail::fold_constants(g);
  Formula out{g, f.alphabet};
  // duplicate names can arise from unfolding
  try {
    analyze(out.root);
  } catch (const std::runtime_error&) {
    out = refresh_binder_names(out);
  }
  auto info = analyze(out.root);
  assert(info.guarded);
  return out;
}

} // namespace mucalc
