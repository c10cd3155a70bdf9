// Safra determinization of nondeterministic Buchi word automata with a
// rank-based parity emission: the emitted stream has an even max-recurring
// value iff some tree node is eventually never deleted and succeeds
// (label = union of child labels) infinitely often, i.e. iff the NBW
// accepts.  Letters are supplied per step as an explicit successor map, so
// the construction works over arbitrary (lazily discovered) alphabets.
#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <stdexcept>

namespace mucalc {

class SafraDet {
 public:
  SafraDet(int n_states, std::vector<char> accepting, std::vector<int> initial)
      : n_(n_states), acc_(std::move(accepting)) {
    std::sort(initial.begin(), initial.end());
    initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
    Tree t;
    if (!initial.empty()) t.nodes.push_back({initial, {}, 1});
    init_ = intern(t);
  }

  int initial_tree() const { return init_; }
  int num_trees() const { return static_cast<int>(trees_.size()); }
  // Ceiling for emitted priorities (exclusive); useful for callers that
  // compose streams.
  int max_priority() const { return 2 * (2 * n_ + 2) + 2; }

  // delta[q] = successor NBW states of q under the consumed letter.
  std::pair<int, int> step(int tree_id, const std::vector<std::vector<int>>& delta) {
    Tree t = trees_[tree_id]; // working copy
    int K = 2 * n_ + 2;
    int next_rank = 0;
    for (auto& nd : t.nodes) next_rank = std::max(next_rank, nd.rank);
    ++next_rank;

    // 1. spawn: each existing node with accepting states gets a youngest child
    size_t existing = t.nodes.size();
    for (size_t i = 0; i < existing; ++i) {
      std::vector<int> af;
      for (int q : t.nodes[i].label)
        if (acc_[q]) af.push_back(q);
      if (!af.empty()) {
        t.nodes.push_back({std::move(af), {}, next_rank++});
        t.nodes[i].children.push_back(static_cast<int>(t.nodes.size()) - 1);
      }
    }
    // 2. powerset transition on every label
    for (auto& nd : t.nodes) {
      std::vector<char> set(n_, 0);
      for (int q : nd.label)
        for (int s : delta[q]) set[s] = 1;
      nd.label.clear();
      for (int s = 0; s < n_; ++s)
        if (set[s]) nd.label.push_back(s);
    }
    // 3. horizontal merge: a state stays only in the oldest sibling subtree
    for (size_t i = 0; i < t.nodes.size(); ++i) {
      std::vector<char> claimed(n_, 0);
      for (int c : t.nodes[i].children) {
        std::vector<int> allowed;
        for (int q : t.nodes[c].label)
          if (!claimed[q]) allowed.push_back(q);
        for (int q : allowed) claimed[q] = 1;
        if (allowed.size() != t.nodes[c].label.size()) restrict_subtree(t, c, allowed);
      }
    }

    int emit = 1; // no event
    auto event = [&](int value) { emit = std::max(emit, value); };
    auto death = [&](int rank) { event(2 * (K - rank) + 1); };
    auto success = [&](int rank) { event(2 * (K - rank)); };

    // 4. remove empty-labelled nodes (their subtrees are empty too)
    std::vector<char> dead(t.nodes.size(), 0);
    std::function<void(int)> kill = [&](int v) {
      if (dead[v]) return;
      dead[v] = 1;
      death(t.nodes[v].rank);
      for (int c : t.nodes[v].children) kill(c);
    };
    for (size_t v = 0; v < t.nodes.size(); ++v)
      if (!dead[v] && t.nodes[v].label.empty()) kill(static_cast<int>(v));

    // 5. vertical merge, top down
    std::function<void(int)> merge = [&](int v) {
      if (dead[v]) return;
      std::vector<char> uni(n_, 0);
      bool any_child = false;
      for (int c : t.nodes[v].children)
        if (!dead[c]) {
          any_child = true;
          for (int q : t.nodes[c].label) uni[q] = 1;
        }
      if (any_child) {
        bool equal = true;
        for (int q : t.nodes[v].label)
          if (!uni[q]) { equal = false; break; }
        if (equal) {
          success(t.nodes[v].rank);
          for (int c : t.nodes[v].children) kill(c);
          t.nodes[v].children.clear();
          return;
        }
      }
      for (int c : t.nodes[v].children)
        if (!dead[c]) merge(c);
    };
    if (!t.nodes.empty() && !dead[0]) merge(0);

    // 6. compact: drop dead nodes, renumber ranks order-preserving
    Tree out;
    if (!t.nodes.empty() && !dead[0]) {
      std::vector<int> remap(t.nodes.size(), -1);
      std::function<int(int)> copy = [&](int v) -> int {
        int id = static_cast<int>(out.nodes.size());
        out.nodes.push_back({t.nodes[v].label, {}, t.nodes[v].rank});
        remap[v] = id;
        for (int c : t.nodes[v].children)
          if (!dead[c]) out.nodes[id].children.push_back(copy(c));
        return id;
      };
      copy(0);
      std::vector<int> ranks;
      for (auto& nd : out.nodes) ranks.push_back(nd.rank);
      std::sort(ranks.begin(), ranks.end());
      for (auto& nd : out.nodes)
        nd.rank = static_cast<int>(std::lower_bound(ranks.begin(), ranks.end(), nd.rank) -
                                   ranks.begin()) + 1;
    }
    return {intern(out), emit};
  }

 private:
  struct Node {
    std::vector<int> label;
    std::vector<int> children; // in rank (age) order
    int rank;
  };
  struct Tree {
    std::vector<Node> nodes; // preorder, node 0 = root when non-empty
  };

  void restrict_subtree(Tree& t, int v, const std::vector<int>& allowed) {
    std::vector<char> ok(n_, 0);
    for (int q : allowed) ok[q] = 1;
    std::function<void(int)> go = [&](int u) {
      std::vector<int> keep;
      for (int q : t.nodes[u].label)
        if (ok[q]) keep.push_back(q);
      t.nodes[u].label = std::move(keep);
      for (int c : t.nodes[u].children) go(c);
    };
    go(v);
  }

  std::string key_of(const Tree& t) const {
    std::string k;
    std::function<void(int)> go = [&](int v) {
      k += "N" + std::to_string(t.nodes[v].rank) + ":";
      for (int q : t.nodes[v].label) k += std::to_string(q) + ",";
      k += "(";
      for (int c : t.nodes[v].children) go(c);
      k += ")";
    };
    if (!t.nodes.empty()) go(0);
    return k;
  }

  int intern(const Tree& t) {
    std::string k = key_of(t);
    auto it = ids_.find(k);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(trees_.size());
    trees_.push_back(t);
    ids_[k] = id;
    return id;
  }

  int n_;
  std::vector<char> acc_;
  int init_;
  std::vector<Tree> trees_;
  std::map<std::string, int> ids_;
};

} // namespace mucalc
