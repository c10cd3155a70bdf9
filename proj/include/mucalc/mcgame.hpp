// The model-checking parity game M x Psi and the model checker built on it.
#pragma once

#include <map>
#include <utility>

#include "mucalc/formula.hpp"
#include "mucalc/lts.hpp"
#include "mucalc/parity.hpp"

namespace mucalc {

struct McGame {
  ParityGame game;
  std::vector<std::pair<int, const FNode*>> info; // per vertex: (state, subformula)
  std::map<std::pair<int, const FNode*>, int> index;
  int base_priority = 0; // priority of non-variable vertices
};

// Product game over reachable (state, subformula occurrence) pairs.
// Disjunctions and diamonds belong to Even, conjunctions and boxes to Odd,
// single-successor vertices to Even.  Fixpoint variables carry their
// assigned priority, every other vertex the minimal co-domain priority.
// Literal vertices are terminal with even priority iff they hold.
inline McGame build_mc_game(const Lts& m, const Formula& f, const FormulaInfo& info,
                            const PriorityAssignment& pa) {
  if (!info.free_vars.empty())
    throw std::runtime_error("model checking needs a closed formula");
  if (!info.guarded) throw std::runtime_error("model checking needs a guarded formula");

  McGame out;
  out.base_priority = pa.has_binders ? pa.low : 0;

  std::vector<std::pair<int, const FNode*>> todo;
  auto vertex = [&](int s, const FNode* n) {
    auto key = std::make_pair(s, n);
    auto it = out.index.find(key);
    if (it != out.index.end()) return it->second;
    int own = kEven;
    int pr = out.base_priority;
    switch (n->kind) {
      case FKind::Top: pr = 0; break;
      case FKind::Bottom: pr = 1; break;
      case FKind::Lit: pr = (m.has_prop(s, n->name) == n->positive) ? 0 : 1; break;
      case FKind::Var: pr = pa.of_binder.at(info.binding.at(n)); break;
      case FKind::And:
      case FKind::Box: own = kOdd; break;
      default: break;
    }
    int v = out.game.add_vertex(own, pr);
    out.info.emplace_back(s, n);
    out.index[key] = v;
    todo.push_back(key);
    return v;
  };

  int initial = vertex(m.init, f.root.get());
  out.game.init = initial;
  while (!todo.empty()) {
    auto [s, n] = todo.back();
    todo.pop_back();
    int v = out.index.at({s, n});
    switch (n->kind) {
      case FKind::Top:
      case FKind::Bottom:
      case FKind::Lit:
        break; // terminal
      case FKind::Var: {
        const FNode* b = info.binding.at(n);
        out.game.add_edge(v, vertex(s, b->l.get()));
        break;
      }
      case FKind::Mu:
      case FKind::Nu:
        out.game.add_edge(v, vertex(s, n->l.get()));
        break;
      case FKind::Or:
      case FKind::And:
        out.game.add_edge(v, vertex(s, n->l.get()));
        out.game.add_edge(v, vertex(s, n->r.get()));
        break;
      case FKind::Dia:
      case FKind::Box: {
        int a = m.action_index(n->action);
        if (a >= 0)
          for (int t : m.succ(s, a)) out.game.add_edge(v, vertex(t, n->l.get()));
        if (out.game.succ[v].empty()) {
          // dead modality: <a> fails, [a] holds
          out.game.prio[v] = (n->kind == FKind::Dia) ? 1 : 0;
        }
        break;
      }
    }
  }
  return out;
}

inline McGame build_mc_game(const Lts& m, const Formula& f) {
  auto info = analyze(f.root);
  auto pa = compute_assignment(f.root, info);
  return build_mc_game(m, f, info, pa);
}

inline bool model_check(const Lts& m, const Formula& f) {
  McGame g = build_mc_game(m, f);
  return solve(g.game).even_wins(g.game.init);
}

} // namespace mucalc
