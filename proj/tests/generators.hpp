// Shared random generators for the test suites.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "mucalc/formula.hpp"
#include "mucalc/lts.hpp"
#include "mucalc/parity.hpp"

namespace mucalc::testgen {

struct FormulaGenOpts {
  int max_depth = 4;
  std::vector<std::string> props = {"P", "Q"};
  std::vector<std::string> actions = {"a"};
  bool allow_binders = true;
  bool allow_unguarded = false;
};

// Reference semantics: direct Tarski fixpoint evaluation over state sets.
// Independent of the game-based model checker; handles unguarded formulas.
inline std::vector<char> denote_rec(const Lts& m, const FPtr& f,
                                    std::map<std::string, std::vector<char>>& env) {
  int n = m.num_states();
  std::vector<char> out(n, 0);
  switch (f->kind) {
    case FKind::Top: out.assign(n, 1); break;
    case FKind::Bottom: break;
    case FKind::Lit:
      for (int v = 0; v < n; ++v) out[v] = m.has_prop(v, f->name) == f->positive;
      break;
    case FKind::Var: out = env.at(f->name); break;
    case FKind::Or: {
      auto a = denote_rec(m, f->l, env), b = denote_rec(m, f->r, env);
      for (int v = 0; v < n; ++v) out[v] = a[v] || b[v];
      break;
    }
    case FKind::And: {
      auto a = denote_rec(m, f->l, env), b = denote_rec(m, f->r, env);
      for (int v = 0; v < n; ++v) out[v] = a[v] && b[v];
      break;
    }
    case FKind::Dia:
    case FKind::Box: {
      auto b = denote_rec(m, f->l, env);
      int a = m.action_index(f->action);
      for (int v = 0; v < n; ++v) {
        bool ex = false, all = true;
        if (a >= 0)
          for (int t : m.succ(v, a)) {
            ex = ex || b[t];
            all = all && b[t];
          }
        out[v] = (f->kind == FKind::Dia) ? ex : all;
      }
      break;
    }
    case FKind::Mu:
    case FKind::Nu: {
      std::vector<char> cur(n, f->kind == FKind::Nu ? 1 : 0);
      while (true) {
        env[f->name] = cur;
        auto next = denote_rec(m, f->l, env);
        env.erase(f->name);
        if (next == cur) break;
        cur = next;
      }
      out = cur;
      break;
    }
  }
  return out;
}

inline bool denote(const Lts& m, const Formula& f) {
  std::map<std::string, std::vector<char>> env;
  return denote_rec(m, f.root, env)[m.init] != 0;
}

// Random closed guarded positive formula.  Variables are only emitted when
// some enclosing binder is separated from the hole by a modality, so the
// output is guarded by construction.
inline FPtr gen_formula_rec(std::mt19937_64& rng, const FormulaGenOpts& o, int depth,
                            std::vector<std::pair<std::string, bool>>& scope, int& binder_id) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  std::vector<std::string> usable;
  for (auto& [v, guarded] : scope)
    if (guarded || o.allow_unguarded) usable.push_back(v);

  if (depth <= 0) {
    int c = pick(usable.empty() ? 3 : 4);
    switch (c) {
      case 0: return f_lit(o.props[pick((int)o.props.size())], rng() % 2 == 0);
      case 1: return f_top();
      case 2: return f_bottom();
      default: return f_var(usable[pick((int)usable.size())]);
    }
  }
  int c = pick(10);
  if (!o.allow_binders && c >= 8) c -= 2;
  switch (c) {
    case 0:
      return f_lit(o.props[pick((int)o.props.size())], rng() % 2 == 0);
    case 1:
      if (!usable.empty()) return f_var(usable[pick((int)usable.size())]);
      return f_lit(o.props[pick((int)o.props.size())], true);
    case 2:
    case 3: {
      auto l = gen_formula_rec(rng, o, depth - 1, scope, binder_id);
      auto r = gen_formula_rec(rng, o, depth - 1, scope, binder_id);
      return c == 2 ? f_or(l, r) : f_and(l, r);
    }
    case 4:
    case 5:
    case 6:
    case 7: {
      std::vector<std::pair<std::string, bool>> inner = scope;
      for (auto& e : inner) e.second = true;
      auto b = gen_formula_rec(rng, o, depth - 1, inner, binder_id);
      const std::string& act = o.actions[pick((int)o.actions.size())];
      return (c % 2 == 0) ? f_dia(act, b) : f_box(act, b);
    }
    default: {
      std::string v = "V" + std::to_string(binder_id++);
      std::vector<std::pair<std::string, bool>> inner = scope;
      inner.emplace_back(v, false);
      auto b = gen_formula_rec(rng, o, depth - 1, inner, binder_id);
      return (c == 8) ? f_mu(v, b) : f_nu(v, b);
    }
  }
}

inline Formula gen_formula(uint64_t seed, const FormulaGenOpts& o = {}) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::string, bool>> scope;
  int binder_id = 0;
  FPtr root = gen_formula_rec(rng, o, o.max_depth, scope, binder_id);
  std::vector<std::string> alphabet = o.actions;
  std::sort(alphabet.begin(), alphabet.end());
  return Formula{root, alphabet};
}

inline ParityGame gen_game(uint64_t seed, int max_vertices = 8, int max_prio = 4) {
  std::mt19937_64 rng(seed);
  int n = 2 + static_cast<int>(rng() % (max_vertices - 1));
  ParityGame g;
  for (int v = 0; v < n; ++v)
    g.add_vertex(rng() % 2 ? kOdd : kEven, static_cast<int>(rng() % (max_prio + 1)));
  for (int v = 0; v < n; ++v) {
    int deg = static_cast<int>(rng() % 4); // 0..3, occasional terminals
    std::set<int> ts;
    for (int k = 0; k < deg; ++k) ts.insert(static_cast<int>(rng() % n));
    for (int t : ts) g.add_edge(v, t);
  }
  g.init = static_cast<int>(rng() % n);
  return g;
}

// Brute-force parity solver: enumerate positional strategies of one player,
// then check all plays of the opponent via cycle/terminal analysis.
namespace bf {

// with player p's strategy fixed (restricted graph), can the opponent force
// a win from v?  Opponent controls every remaining choice, so this holds iff
// some reachable terminal or cycle is winning for the opponent.
inline bool opponent_can_win(const ParityGame& g, const std::vector<int>& stratp, int p,
                             int from) {
  int n = g.size();
  int q = 1 - p;
  auto succs = [&](int v) {
    std::vector<int> out;
    if (g.succ[v].empty()) return out;
    if (g.owner[v] == p && stratp[v] >= 0) out.push_back(stratp[v]);
    else out = g.succ[v];
    return out;
  };
  std::vector<char> reach(n, 0);
  std::vector<int> todo{from};
  reach[from] = 1;
  while (!todo.empty()) {
    int v = todo.back();
    todo.pop_back();
    for (int t : succs(v))
      if (!reach[t]) { reach[t] = 1; todo.push_back(t); }
  }
  for (int v = 0; v < n; ++v)
    if (reach[v] && g.succ[v].empty() && (g.prio[v] % 2 == (q == kOdd ? 1 : 0))) return true;
  // cycle with max priority of opponent parity: for each candidate priority,
  // look for a cycle through it in the subgraph of priorities <= it
  for (int pr = 0; pr <= *std::max_element(g.prio.begin(), g.prio.end()); ++pr) {
    if (pr % 2 != (q == kOdd ? 1 : 0)) continue;
    // subgraph: reachable vertices with prio <= pr
    std::vector<char> in(n, 0);
    for (int v = 0; v < n; ++v) in[v] = reach[v] && g.prio[v] <= pr;
    // find cycle through a pr-vertex within `in`
    for (int s = 0; s < n; ++s) {
      if (!in[s] || g.prio[s] != pr) continue;
      // DFS from s within `in`, can we come back to s?
      std::vector<char> seen(n, 0);
      std::vector<int> st;
      for (int t : succs(s))
        if (in[t] && !seen[t]) { seen[t] = 1; st.push_back(t); }
      bool back = seen[s];
      while (!st.empty() && !back) {
        int v = st.back();
        st.pop_back();
        for (int t : succs(v)) {
          if (t == s) { back = true; break; }
          if (in[t] && !seen[t]) { seen[t] = 1; st.push_back(t); }
        }
      }
      if (back) return true;
    }
  }
  return false;
}

// set of vertices from which player p wins, by enumerating p's positional
// strategies
inline std::vector<char> winning_region(const ParityGame& g, int p) {
  int n = g.size();
  std::vector<int> owned;
  for (int v = 0; v < n; ++v)
    if (g.owner[v] == p && !g.succ[v].empty()) owned.push_back(v);
  std::vector<char> wins(n, 0);
  std::vector<size_t> choice(owned.size(), 0);
  while (true) {
    std::vector<int> strat(n, -1);
    for (size_t i = 0; i < owned.size(); ++i) strat[owned[i]] = g.succ[owned[i]][choice[i]];
    for (int v = 0; v < n; ++v)
      if (!wins[v] && !opponent_can_win(g, strat, p, v)) wins[v] = 1;
    // next strategy
    size_t i = 0;
    while (i < owned.size()) {
      if (++choice[i] < g.succ[owned[i]].size()) break;
      choice[i] = 0;
      ++i;
    }
    if (i == owned.size()) break;
    if (owned.empty()) break;
  }
  return wins;
}

} // namespace bf
} // namespace mucalc::testgen
