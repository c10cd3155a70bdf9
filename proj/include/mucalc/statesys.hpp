// Equation systems over mu-calculus templates and their scalarization into
// plain formulas by Gaussian elimination.
//
// States are eliminated in increasing priority order: a state's equation is
// closed under its own binder (mu for odd, nu for even priority) and the
// closed form is substituted, with fresh binder names per copy, into every
// remaining equation.  Later-eliminated variables are the only ones that
// cross earlier binders, so the state priorities remain a valid priority
// assignment of the output; in particular a {0,1}-priority system reads
// back inside index {1,0} and a {1,2} system inside {2,1}.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mucalc/formula.hpp"

namespace mucalc {

// Templates reference states through Var nodes named "@<id>".
struct StateSystem {
  std::vector<int> priority;   // per state
  std::vector<FPtr> templates; // per state, with @refs
  int initial = 0;

  int size() const { return static_cast<int>(priority.size()); }
};

namespace detail {

struct Scalarize {
  const StateSystem& sys;
  std::map<std::string, int> next_suffix;
  long budget;

  std::string fresh(const std::string& base) {
    // strip a previous suffix so copies of copies stay readable
    std::string b = base.substr(0, base.find('_'));
    int& k = next_suffix[b];
    ++k;
    return k == 1 ? b : b + "_" + std::to_string(k);
  }

  bool has_ref(const FPtr& t, const std::string& ref) {
    if (!t) return false;
    if (t->kind == FKind::Var) return t->name == ref;
    return has_ref(t->l, ref) || has_ref(t->r, ref);
  }

  // clone with fresh binder names (internal variable references follow)
  FPtr freshen(const FPtr& t, std::map<std::string, std::string>& ren) {
    if (--budget < 0) throw std::runtime_error("state system scalarization too large");
    if (!t) return nullptr;
    if (t->kind == FKind::Var) {
      auto it = ren.find(t->name);
      return f_var(it != ren.end() ? it->second : t->name);
    }
    if (is_binder(t->kind)) {
      std::string nn = fresh(t->name);
      auto saved = ren.count(t->name) ? std::optional<std::string>(ren[t->name]) : std::nullopt;
      ren[t->name] = nn;
      FPtr body = freshen(t->l, ren);
      if (saved) ren[t->name] = *saved; else ren.erase(t->name);
      return t->kind == FKind::Mu ? f_mu(nn, body) : f_nu(nn, body);
    }
    auto n = std::make_shared<FNode>(*t);
    auto& m = const_cast<FNode&>(*n);
    m.l = freshen(t->l, ren);
    m.r = freshen(t->r, ren);
    return n;
  }

  // replace @ref by fresh copies of rep
  FPtr subst_ref(const FPtr& t, const std::string& ref, const FPtr& rep) {
    if (--budget < 0) throw std::runtime_error("state system scalarization too large");
    if (!t) return nullptr;
    if (t->kind == FKind::Var) {
      if (t->name != ref) return t;
      std::map<std::string, std::string> ren;
      return freshen(rep, ren);
    }
    if (!has_ref(t, ref)) return t;
    auto n = std::make_shared<FNode>(*t);
    auto& m = const_cast<FNode&>(*n);
    m.l = subst_ref(t->l, ref, rep);
    m.r = subst_ref(t->r, ref, rep);
    return n;
  }

  FPtr run() {
    int n = sys.size();
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sys.priority[a] < sys.priority[b]; });

    std::vector<FPtr> eq = sys.templates;
    std::vector<char> done(n, 0);
    FPtr result; // kept-up-to-date solution of the initial state
    for (int s : order) {
      std::string ref = "@" + std::to_string(s);
      FPtr t = eq[s];
      if (has_ref(t, ref)) {
        std::string var = fresh("X" + std::to_string(s));
        t = subst_ref(t, ref, f_var(var));
        t = sys.priority[s] % 2 == 1 ? f_mu(var, t) : f_nu(var, t);
      }
      eq[s] = t;
      done[s] = 1;
      for (int r = 0; r < n; ++r)
        if (!done[r]) eq[r] = subst_ref(eq[r], ref, t);
      if (result) result = subst_ref(result, ref, t);
      if (s == sys.initial) result = t;
    }
    return result;
  }
};

} // namespace detail

inline FPtr system_to_fptr(const StateSystem& sys, long budget = 40000000) {
  detail::Scalarize sc{sys, {}, budget};
  FPtr raw = sc.run();
  // elimination shares untouched subtrees; deep-copy with distinct binder
  // names to restore occurrence-unique nodes
  std::map<std::string, std::string> active;
  std::map<std::string, int> counter;
  return detail::rename_binders(raw, active, counter);
}

} // namespace mucalc
