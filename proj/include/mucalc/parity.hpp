// Max-parity games and a recursive (Zielonka) solver with positional
// strategies.  Vertices without successors end the play; the final vertex's
// priority parity decides the winner.
#pragma once

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace mucalc {

constexpr int kEven = 0;
constexpr int kOdd = 1;

struct ParityGame {
  std::vector<int> owner;              // kEven / kOdd
  std::vector<int> prio;               // non-negative
  std::vector<std::vector<int>> succ;
  int init = 0;

  int size() const { return static_cast<int>(owner.size()); }
  int add_vertex(int own, int pr) {
    owner.push_back(own);
    prio.push_back(pr);
    succ.emplace_back();
    return size() - 1;
  }
  void add_edge(int u, int v) { succ[u].push_back(v); }
};

struct GameSolution {
  std::vector<int> winner;      // per vertex: kEven or kOdd
  std::vector<int> strategy[2]; // strategy[p][v] = chosen successor, -1 if none

  bool even_wins(int v) const { return winner[v] == kEven; }
};

namespace detail {

// Attractor of `target` for player p within `alive`; fills strategy choices
// for p's vertices drawn into the attractor.
inline std::vector<char> attractor(const ParityGame& g, const std::vector<char>& alive,
                                   std::vector<char> target, int p,
                                   std::vector<int>& strat,
                                   const std::vector<std::vector<int>>& pred,
                                   const std::vector<int>& outdeg_alive_init) {
  int n = g.size();
  std::vector<int> cnt = outdeg_alive_init; // for opponent vertices: alive succs not yet in attr
  std::vector<int> queue;
  for (int v = 0; v < n; ++v)
    if (target[v]) queue.push_back(v);
  std::vector<char> attr = std::move(target);
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    for (int u : pred[v]) {
      if (!alive[u] || attr[u]) continue;
      if (g.owner[u] == p) {
        attr[u] = 1;
        if (strat[u] < 0) strat[u] = v;
        queue.push_back(u);
      } else {
        if (--cnt[u] == 0) {
          attr[u] = 1;
          queue.push_back(u);
        }
      }
    }
  }
  return attr;
}

struct Z {
  const ParityGame& g;
  std::vector<std::vector<int>> pred;
  GameSolution sol;

  explicit Z(const ParityGame& game) : g(game) {
    int n = g.size();
    pred.resize(n);
    for (int v = 0; v < n; ++v)
      for (int t : g.succ[v]) pred[t].push_back(v);
    sol.winner.assign(n, kEven);
    sol.strategy[0].assign(n, -1);
    sol.strategy[1].assign(n, -1);
  }

  void run(std::vector<char> alive) {
    int n = g.size();
    // count alive successors per vertex
    auto outdeg = [&](const std::vector<char>& al) {
      std::vector<int> d(n, 0);
      for (int v = 0; v < n; ++v)
        if (al[v])
          for (int t : g.succ[v])
            if (al[t]) ++d[v];
      return d;
    };

    std::function<void(std::vector<char>)> go = [&](std::vector<char> al) {
      int maxp = -1;
      for (int v = 0; v < n; ++v)
        if (al[v]) maxp = std::max(maxp, g.prio[v]);
      if (maxp < 0) return;
      int p = maxp % 2 == 0 ? kEven : kOdd;
      int q = 1 - p;

      std::vector<char> target(n, 0);
      for (int v = 0; v < n; ++v)
        if (al[v] && g.prio[v] == maxp) target[v] = 1;

      std::vector<int> stratA(n, -1);
      auto deg = outdeg(al);
      auto A = attractor(g, al, target, p, stratA, pred, deg);

      std::vector<char> rest = al;
      for (int v = 0; v < n; ++v)
        if (A[v]) rest[v] = 0;
      go(rest);

      // did the opponent win anything in the subgame?
      bool opp_nonempty = false;
      for (int v = 0; v < n; ++v)
        if (rest[v] && sol.winner[v] == q) { opp_nonempty = true; break; }

      if (!opp_nonempty) {
        for (int v = 0; v < n; ++v)
          if (al[v]) {
            if (A[v]) {
              sol.winner[v] = p;
              if (g.owner[v] == p) {
                if (stratA[v] >= 0)
                  sol.strategy[p][v] = stratA[v];
                else {
                  // on a top vertex: stay inside the winning area
                  for (int t : g.succ[v])
                    if (al[t]) { sol.strategy[p][v] = t; break; }
                }
              }
            }
            // winners/strategies in `rest` stand as computed
          }
        return;
      }

      std::vector<char> oppW(n, 0);
      for (int v = 0; v < n; ++v)
        if (rest[v] && sol.winner[v] == q) oppW[v] = 1;
      std::vector<int> stratB(n, -1);
      auto B = attractor(g, al, oppW, q, stratB, pred, outdeg(al));
      std::vector<char> rest2 = al;
      for (int v = 0; v < n; ++v)
        if (B[v]) rest2[v] = 0;
      go(rest2);
      for (int v = 0; v < n; ++v)
        if (al[v] && B[v]) {
          sol.winner[v] = q;
          if (g.owner[v] == q && !oppW[v]) sol.strategy[q][v] = stratB[v];
          // strategies inside oppW were set by the inner call
        }
    };
    go(std::move(alive));
  }
};
} // namespace detail

// Solve a max-parity game.  Terminal vertices are modelled internally as
// self-loops, which realizes the finite-play rule.
inline GameSolution solve(const ParityGame& g0) {
  ParityGame g = g0;
  std::vector<char> was_terminal(g.size(), 0);
  for (int v = 0; v < g.size(); ++v)
    if (g.succ[v].empty()) {
      was_terminal[v] = 1;
      g.succ[v].push_back(v);
    }
  detail::Z z(g);
  z.run(std::vector<char>(g.size(), 1));
  for (int v = 0; v < g.size(); ++v)
    if (was_terminal[v]) {
      z.sol.strategy[0][v] = -1;
      z.sol.strategy[1][v] = -1;
    }
  return z.sol;
}

inline std::string dump(const ParityGame& g) {
  std::ostringstream out;
  for (int v = 0; v < g.size(); ++v) {
    out << v << (v == g.init ? "*" : "") << " " << (g.owner[v] == kEven ? "E" : "O") << " "
        << g.prio[v] << " ->";
    for (int t : g.succ[v]) out << " " << t;
    out << "\n";
  }
  return out.str();
}

} // namespace mucalc
