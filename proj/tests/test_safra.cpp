#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mucalc/safra.hpp"

using namespace mucalc;

namespace {

struct Nbw {
  int n;
  std::vector<char> acc;
  std::vector<int> init;
  // delta per letter: [letter][state] -> successors
  std::vector<std::vector<std::vector<int>>> delta;
};

Nbw random_nbw(uint64_t seed, int max_n = 5, int letters = 3) {
  std::mt19937_64 rng(seed);
  Nbw a;
  a.n = 2 + static_cast<int>(rng() % (max_n - 1));
  a.acc.assign(a.n, 0);
  for (int q = 0; q < a.n; ++q) a.acc[q] = rng() % 3 == 0;
  a.init = {static_cast<int>(rng() % a.n)};
  a.delta.assign(letters, std::vector<std::vector<int>>(a.n));
  for (int l = 0; l < letters; ++l)
    for (int q = 0; q < a.n; ++q) {
      int deg = static_cast<int>(rng() % 3); // 0..2
      std::set<int> t;
      for (int i = 0; i < deg; ++i) t.insert(static_cast<int>(rng() % a.n));
      a.delta[l][q].assign(t.begin(), t.end());
    }
  return a;
}

// does the NBW accept u v^omega?  search for a reachable accepting cycle in
// the (state, cycle position) product
bool lasso_accepts(const Nbw& a, const std::vector<int>& u, const std::vector<int>& v) {
  int L = static_cast<int>(v.size());
  // states reachable after consuming u
  std::set<int> cur(a.init.begin(), a.init.end());
  for (int letter : u) {
    std::set<int> nxt;
    for (int q : cur)
      for (int t : a.delta[letter][q]) nxt.insert(t);
    cur = nxt;
  }
  // product graph over (state, position in v)
  auto idx = [&](int q, int j) { return q * L + j; };
  int N = a.n * L;
  std::vector<std::vector<int>> succ(N);
  for (int q = 0; q < a.n; ++q)
    for (int j = 0; j < L; ++j)
      for (int t : a.delta[v[j]][q]) succ[idx(q, j)].push_back(idx(t, (j + 1) % L));
  std::vector<char> reach(N, 0);
  std::vector<int> todo;
  for (int q : cur) { reach[idx(q, 0)] = 1; todo.push_back(idx(q, 0)); }
  while (!todo.empty()) {
    int x = todo.back();
    todo.pop_back();
    for (int y : succ[x])
      if (!reach[y]) { reach[y] = 1; todo.push_back(y); }
  }
  // accepting product node on a cycle through itself
  for (int q = 0; q < a.n; ++q) {
    if (!a.acc[q]) continue;
    for (int j = 0; j < L; ++j) {
      int s = idx(q, j);
      if (!reach[s]) continue;
      std::vector<char> seen(N, 0);
      std::vector<int> st{s};
      bool back = false;
      std::vector<char> started(N, 0);
      while (!st.empty() && !back) {
        int x = st.back();
        st.pop_back();
        for (int y : succ[x]) {
          if (y == s) { back = true; break; }
          if (!seen[y]) { seen[y] = 1; st.push_back(y); }
        }
      }
      (void)started;
      if (back) return true;
    }
  }
  return false;
}

} // namespace

TEST_CASE("safra determinization matches lasso acceptance") {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (uint64_t seed = 0; seed < 150; ++seed) {
    Nbw a = random_nbw(seed);
    SafraDet det(a.n, a.acc, a.init);
    for (int rep = 0; rep < 6; ++rep) {
      int ulen = static_cast<int>(rng() % 4);
      int vlen = 1 + static_cast<int>(rng() % 4);
      std::vector<int> u, v;
      for (int i = 0; i < ulen; ++i) u.push_back(static_cast<int>(rng() % 3));
      for (int i = 0; i < vlen; ++i) v.push_back(static_cast<int>(rng() % 3));

      int tree = det.initial_tree();
      for (int letter : u) tree = det.step(tree, a.delta[letter]).first;
      // pump the cycle until the (tree) state repeats at cycle boundary
      std::map<int, int> seen_at;
      std::vector<int> boundary_trees{tree};
      std::vector<std::vector<int>> emissions_per_lap;
      seen_at[tree] = 0;
      int lap_of_repeat = -1, first = -1;
      for (int lap = 0;; ++lap) {
        std::vector<int> em;
        for (int letter : v) {
          auto [t2, e] = det.step(tree, a.delta[letter]);
          tree = t2;
          em.push_back(e);
        }
        emissions_per_lap.push_back(em);
        auto it = seen_at.find(tree);
        if (it != seen_at.end()) {
          first = it->second;
          lap_of_repeat = lap + 1;
          break;
        }
        seen_at[tree] = lap + 1;
        boundary_trees.push_back(tree);
        REQUIRE(lap < 4000);
      }
      int maxe = 0;
      for (int lap = first; lap < lap_of_repeat; ++lap)
        for (int e : emissions_per_lap[lap]) maxe = std::max(maxe, e);
      bool det_accepts = maxe % 2 == 0;
      bool oracle = lasso_accepts(a, u, v);
      CAPTURE(seed, rep, ulen, vlen);
      REQUIRE(det_accepts == oracle);
      ++checked;
    }
  }
  REQUIRE(checked == 900);
}
