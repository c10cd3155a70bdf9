// Finite labelled transition systems: representation, text format,
// bounded enumeration and seeded random generation.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace mucalc {

struct Lts {
  std::vector<std::string> states;           // ids, index = state number
  std::vector<std::string> actions;          // sorted unique
  int init = 0;
  std::vector<std::set<std::string>> labels; // per state
  // adjacency[v][a] = sorted successor list for action index a
  std::vector<std::vector<std::vector<int>>> adj;

  int num_states() const { return static_cast<int>(states.size()); }
  int action_index(const std::string& a) const {
    auto it = std::find(actions.begin(), actions.end(), a);
    return it == actions.end() ? -1 : static_cast<int>(it - actions.begin());
  }
  const std::vector<int>& succ(int v, int a) const { return adj[v][a]; }
  bool has_prop(int v, const std::string& p) const { return labels[v].count(p) > 0; }
};

inline void validate(const Lts& m) {
  if (m.states.empty()) throw std::runtime_error("lts: no states");
  if (m.init < 0 || m.init >= m.num_states()) throw std::runtime_error("lts: bad init");
  std::set<std::string> ids(m.states.begin(), m.states.end());
  if (ids.size() != m.states.size()) throw std::runtime_error("lts: duplicate state id");
  if (static_cast<int>(m.labels.size()) != m.num_states() ||
      static_cast<int>(m.adj.size()) != m.num_states())
    throw std::runtime_error("lts: ragged tables");
  for (auto& row : m.adj) {
    if (row.size() != m.actions.size()) throw std::runtime_error("lts: ragged adjacency");
    for (auto& ss : row)
      for (int s : ss)
        if (s < 0 || s >= m.num_states()) throw std::runtime_error("lts: bad edge target");
  }
}

inline Lts parse_lts(const std::string& text) {
  std::vector<std::string> actions;
  std::vector<std::pair<std::string, std::set<std::string>>> states;
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  std::string init_id;
  bool have_init = false;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw[0] == '#') continue;
    if (kw == "actions") {
      std::string a;
      while (ls >> a) actions.push_back(a);
    } else if (kw == "init") {
      if (have_init) throw std::runtime_error("lts: duplicate init");
      if (!(ls >> init_id)) throw std::runtime_error("lts: init needs a state id");
      have_init = true;
    } else if (kw == "state") {
      std::string id;
      if (!(ls >> id)) throw std::runtime_error("lts: state needs an id");
      std::set<std::string> props;
      std::string p;
      while (ls >> p) props.insert(p);
      states.emplace_back(id, std::move(props));
    } else if (kw == "edge") {
      std::string s, a, t;
      if (!(ls >> s >> a >> t)) throw std::runtime_error("lts: edge needs src action dst");
      edges.emplace_back(s, a, t);
    } else {
      throw std::runtime_error("lts: unknown directive " + kw);
    }
  }
  if (!have_init) throw std::runtime_error("lts: missing init");

  Lts m;
  std::sort(actions.begin(), actions.end());
  actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
  m.actions = actions;
  std::map<std::string, int> idx;
  for (auto& [id, props] : states) {
    if (idx.count(id)) throw std::runtime_error("lts: duplicate state id " + id);
    idx[id] = m.num_states();
    m.states.push_back(id);
    m.labels.push_back(props);
  }
  m.adj.assign(m.states.size(), std::vector<std::vector<int>>(m.actions.size()));
  if (!idx.count(init_id)) throw std::runtime_error("lts: undeclared init state " + init_id);
  m.init = idx[init_id];
  for (auto& [s, a, t] : edges) {
    if (!idx.count(s)) throw std::runtime_error("lts: undeclared state " + s);
    if (!idx.count(t)) throw std::runtime_error("lts: undeclared state " + t);
    int ai = m.action_index(a);
    if (ai < 0) throw std::runtime_error("lts: undeclared action " + a);
    m.adj[idx[s]][ai].push_back(idx[t]);
  }
  for (auto& row : m.adj)
    for (auto& ss : row) {
      std::sort(ss.begin(), ss.end());
      ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
    }
  validate(m);
  return m;
}

inline std::string serialize(const Lts& m) {
  std::ostringstream out;
  out << "actions";
  for (auto& a : m.actions) out << " " << a;
  out << "\n";
  out << "init " << m.states[m.init] << "\n";
  std::vector<int> order(m.num_states());
  for (int i = 0; i < m.num_states(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return m.states[a] < m.states[b]; });
  for (int v : order) {
    out << "state " << m.states[v];
    for (auto& p : m.labels[v]) out << " " << p;
    out << "\n";
  }
  for (int v : order)
    for (size_t a = 0; a < m.actions.size(); ++a)
      for (int t : m.adj[v][a])
        out << "edge " << m.states[v] << " " << m.actions[a] << " " << m.states[t] << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Bounded enumeration for the falsification oracles.  Pointed structures up
// to n states over the given props/actions; all states reachable from the
// initial state; duplicate-free up to renaming of the non-initial states
// (kept iff the adjacency encoding is lexicographically minimal among the
// permuted variants).

namespace detail {
inline uint64_t lts_code(const Lts& m, const std::vector<int>& perm,
                         const std::vector<std::string>& props) {
  // perm maps old -> new; init must map to 0
  int n = m.num_states();
  uint64_t code = 0;
  for (int nv = 0; nv < n; ++nv) {
    int v = -1;
    for (int i = 0; i < n; ++i)
      if (perm[i] == nv) { v = i; break; }
    for (auto& p : props) code = code * 2 + (m.labels[v].count(p) ? 1 : 0);
    for (size_t a = 0; a < m.actions.size(); ++a)
      for (int nt = 0; nt < n; ++nt) {
        int t = -1;
        for (int i = 0; i < n; ++i)
          if (perm[i] == nt) { t = i; break; }
        bool e = std::find(m.adj[v][a].begin(), m.adj[v][a].end(), t) != m.adj[v][a].end();
        code = code * 2 + (e ? 1 : 0);
      }
  }
  return code;
}

inline bool all_reachable(const Lts& m) {
  std::vector<char> seen(m.num_states(), 0);
  std::vector<int> todo{m.init};
  seen[m.init] = 1;
  while (!todo.empty()) {
    int v = todo.back();
    todo.pop_back();
    for (auto& ss : m.adj[v])
      for (int t : ss)
        if (!seen[t]) { seen[t] = 1; todo.push_back(t); }
  }
  return std::count(seen.begin(), seen.end(), 1) == m.num_states();
}

inline bool is_canonical(const Lts& m, const std::vector<std::string>& props) {
  int n = m.num_states();
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  uint64_t base = lts_code(m, perm, props);
  // permutations fixing the initial state
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (i != m.init) rest.push_back(i);
  std::sort(rest.begin(), rest.end());
  do {
    std::vector<int> p(n);
    p[m.init] = 0;
    for (size_t k = 0; k < rest.size(); ++k) p[rest[k]] = static_cast<int>(k) + 1;
    if (lts_code(m, p, props) < base) return false;
  } while (std::next_permutation(rest.begin(), rest.end()));
  return true;
}
} // namespace detail

// Calls fn for each enumerated Lts; fn may return false to stop early.
// Returns number of structures produced.
inline long enumerate_lts(int max_states, std::vector<std::string> props,
                          std::vector<std::string> actions,
                          const std::function<bool(const Lts&)>& fn) {
  std::sort(props.begin(), props.end());
  std::sort(actions.begin(), actions.end());
  if (actions.empty()) actions = {"t"};
  long count = 0;
  for (int n = 1; n <= max_states; ++n) {
    int label_bits = n * static_cast<int>(props.size());
    long edge_bits = static_cast<long>(n) * n * static_cast<long>(actions.size());
    if (label_bits + edge_bits > 40)
      throw std::runtime_error("enumerate_lts: bound too large to enumerate");
    uint64_t lab_max = 1ULL << label_bits, edge_max = 1ULL << edge_bits;
    for (uint64_t lab = 0; lab < lab_max; ++lab) {
      for (uint64_t ed = 0; ed < edge_max; ++ed) {
        Lts m;
        m.actions = actions;
        for (int v = 0; v < n; ++v) m.states.push_back("s" + std::to_string(v));
        m.init = 0;
        m.labels.assign(n, {});
        uint64_t lb = lab;
        for (int v = 0; v < n; ++v)
          for (auto& p : props) {
            if (lb & 1) m.labels[v].insert(p);
            lb >>= 1;
          }
        m.adj.assign(n, std::vector<std::vector<int>>(actions.size()));
        uint64_t eb = ed;
        for (int v = 0; v < n; ++v)
          for (size_t a = 0; a < actions.size(); ++a)
            for (int t = 0; t < n; ++t) {
              if (eb & 1) m.adj[v][a].push_back(t);
              eb >>= 1;
            }
        if (!detail::all_reachable(m)) continue;
        if (!detail::is_canonical(m, props)) continue;
        ++count;
        if (!fn(m)) return count;
      }
    }
  }
  return count;
}

struct LtsBounds {
  int max_states = 3;
  std::vector<std::string> props;
  std::vector<std::string> actions;
  double edge_density = 0.35;
  double label_density = 0.5;
};

inline Lts random_lts(uint64_t seed, const LtsBounds& b) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> actions = b.actions;
  std::sort(actions.begin(), actions.end());
  if (actions.empty()) actions = {"t"};
  int n = 1 + static_cast<int>(rng() % static_cast<uint64_t>(std::max(1, b.max_states)));
  Lts m;
  m.actions = actions;
  for (int v = 0; v < n; ++v) m.states.push_back("s" + std::to_string(v));
  m.init = 0;
  m.labels.assign(n, {});
  m.adj.assign(n, std::vector<std::vector<int>>(actions.size()));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int v = 0; v < n; ++v) {
    for (auto& p : b.props)
      if (coin(rng) < b.label_density) m.labels[v].insert(p);
    for (size_t a = 0; a < actions.size(); ++a)
      for (int t = 0; t < n; ++t)
        if (coin(rng) < b.edge_density) m.adj[v][a].push_back(t);
  }
  // keep the structure connected enough to be interesting: chain fallback
  for (int v = 0; v + 1 < n; ++v) {
    bool any = false;
    for (auto& ss : m.adj[v]) any = any || !ss.empty();
    if (!any) {
      m.adj[v][rng() % actions.size()].push_back(v + 1);
      std::sort(m.adj[v].back().begin(), m.adj[v].back().end());
    }
  }
  for (auto& row : m.adj)
    for (auto& ss : row) {
      std::sort(ss.begin(), ss.end());
      ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
    }
  validate(m);
  return m;
}

} // namespace mucalc
