// Disjunctive form: recognition, the Odd-choice successor relation, and the
// tableau-based transformation into disjunctive form.
//
// The transformation expands macrostates (sets of subformula occurrences) up
// to their modal profiles and reads the result back as a formula whose only
// conjunctions are literal sets and Odd-choice nodes.  The "all traces have
// an even dominant priority" condition over the expansion DAG is enforced by
// a deterministic per-branch monitor: a breakpoint construction when every
// odd priority lies below every even one, and a Safra-based determinization
// of the odd-trace automaton otherwise.
#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mucalc/formula.hpp"
#include "mucalc/safra.hpp"
#include "mucalc/statesys.hpp"

namespace mucalc {

// Shared per-formula analysis with stable occurrence ids.
struct FormulaSystem {
  Formula f;
  FormulaInfo info;
  PriorityAssignment pa;
  std::map<const FNode*, int> id;
  std::vector<const FNode*> nodes;
  int low = 0;

  // prefer_buchi selects a {2,1}-co-domain assignment whenever one exists,
  // even if a {1,0} assignment would also fit
  explicit FormulaSystem(Formula g, bool prefer_buchi = false) : f(std::move(g)) {
    info = analyze(f.root);
    pa = compute_assignment(f.root, info);
    if (prefer_buchi && pa.has_binders) {
      auto p1 = compute_assignment_floor(f.root, info, 1);
      if (p1.high <= 2) pa = p1;
    }
    nodes = info.nodes;
    for (size_t i = 0; i < nodes.size(); ++i) id[nodes[i]] = static_cast<int>(i);
    low = pa.has_binders ? pa.low : 0;
  }
  int var_priority(const FNode* v) const { return pa.of_binder.at(info.binding.at(v)); }
};

// ---------------------------------------------------------------------------
// Odd-choice recognition

struct OddChoiceView {
  enum Kind { LiteralSet, Choice, Invalid } kind = Invalid;
  std::vector<std::pair<std::string, bool>> lits;           // the literal set A
  std::map<std::string, std::vector<const FNode*>> members; // per action: B_a occurrences
  const FNode* violator = nullptr;
};

namespace detail {
inline void flatten_conjuncts(const FNode* n, std::vector<const FNode*>& out) {
  if (n->kind == FKind::And) {
    flatten_conjuncts(n->l.get(), out);
    flatten_conjuncts(n->r.get(), out);
  } else {
    out.push_back(n);
  }
}
inline void flatten_disjuncts(const FNode* n, std::vector<const FNode*>& out) {
  if (n->kind == FKind::Or) {
    flatten_disjuncts(n->l.get(), out);
    flatten_disjuncts(n->r.get(), out);
  } else {
    out.push_back(n);
  }
}
} // namespace detail

// Parses a conjunction (or single conjunct) as a literal set or an
// Odd-choice node  A ∧ ⋀_a (⋀_{ψ∈B_a}<a>ψ ∧ [a]⋁B_a)  covering every
// action of the alphabet.  B_a is read off the diamonds; the box operand
// must then split into consecutive disjunct segments, each alpha-equal to
// some member, together covering all members.  Members are compared up to
// renaming of bound variables; representatives are the diamond bodies.
inline OddChoiceView parse_odd_choice(const FNode* n, const std::vector<std::string>& alphabet) {
  OddChoiceView v;
  std::vector<const FNode*> cs;
  detail::flatten_conjuncts(n, cs);
  std::map<std::string, std::vector<const FNode*>> dias;
  std::map<std::string, const FNode*> boxes;
  for (const FNode* c : cs) {
    switch (c->kind) {
      case FKind::Lit: v.lits.emplace_back(c->name, c->positive); break;
      case FKind::Dia: dias[c->action].push_back(c->l.get()); break;
      case FKind::Box:
        if (boxes.count(c->action)) { v.violator = c; return v; }
        boxes[c->action] = c->l.get();
        break;
      default:
        v.violator = c;
        return v;
    }
  }
  if (dias.empty() && boxes.empty()) {
    v.kind = OddChoiceView::LiteralSet;
    return v;
  }
  for (auto& [a, ds] : dias)
    if (std::find(alphabet.begin(), alphabet.end(), a) == alphabet.end()) {
      v.violator = n;
      return v;
    }
  for (auto& a : alphabet) {
    auto bit = boxes.find(a);
    if (bit == boxes.end()) { v.violator = n; return v; } // missing ->a part
    std::vector<const FNode*> box_leaves;
    if (bit->second->kind != FKind::Bottom) detail::flatten_disjuncts(bit->second, box_leaves);
    std::vector<std::string> box_keys;
    for (const FNode* b : box_leaves) box_keys.push_back(alpha_key(b));

    // members: distinct diamond bodies, each as its own disjunct-leaf key
    // sequence (flattening is associativity-ambiguous, so matching works on
    // leaf sequences)
    std::vector<const FNode*> reps;
    std::vector<std::vector<std::string>> rep_keys;
    std::set<std::string> seen;
    for (const FNode* d : dias[a]) {
      std::string k = alpha_key(d);
      if (!seen.insert(k).second) continue;
      reps.push_back(d);
      std::vector<const FNode*> leaves;
      detail::flatten_disjuncts(d, leaves);
      std::vector<std::string> ks;
      for (const FNode* l : leaves) ks.push_back(alpha_key(l));
      rep_keys.push_back(std::move(ks));
    }
    if (reps.empty()) {
      if (!box_leaves.empty()) { v.violator = n; return v; } // [a]D without <a>'s
      v.members[a] = {};
      continue;
    }
    if (box_leaves.empty()) { v.violator = n; return v; } // <a>psi with [a]ff

    // split the box leaf sequence into segments matching members, covering
    // every member at least once
    int k = static_cast<int>(reps.size());
    int len = static_cast<int>(box_keys.size());
    std::map<std::pair<int, unsigned>, char> memo;
    std::function<bool(int, unsigned)> match = [&](int pos, unsigned covered) -> bool {
      if (pos == len) return covered == (1u << k) - 1u;
      auto it = memo.find({pos, covered});
      if (it != memo.end()) return it->second;
      bool ok = false;
      for (int m = 0; m < k && !ok; ++m) {
        const auto& ks = rep_keys[m];
        if (pos + static_cast<int>(ks.size()) > len) continue;
        bool eq = true;
        for (size_t i = 0; i < ks.size() && eq; ++i) eq = ks[i] == box_keys[pos + i];
        if (eq) ok = match(pos + static_cast<int>(ks.size()), covered | (1u << m));
      }
      memo[{pos, covered}] = ok;
      return ok;
    };
    if (k > 31 || !match(0, 0)) { v.violator = n; return v; }
    v.members[a] = std::move(reps);
  }
  v.kind = OddChoiceView::Choice;
  return v;
}

// true iff f is generated by the disjunctive-form grammar; on failure also
// returns the first violating subformula.
inline std::pair<bool, const FNode*> is_disjunctive_node(const FNode* n,
                                                         const std::vector<std::string>& alphabet) {
  switch (n->kind) {
    case FKind::Top:
    case FKind::Bottom:
    case FKind::Lit:
    case FKind::Var:
      return {true, nullptr};
    case FKind::Or: {
      auto l = is_disjunctive_node(n->l.get(), alphabet);
      if (!l.first) return l;
      return is_disjunctive_node(n->r.get(), alphabet);
    }
    case FKind::Mu:
    case FKind::Nu:
      return is_disjunctive_node(n->l.get(), alphabet);
    case FKind::And:
    case FKind::Dia:
    case FKind::Box: {
      OddChoiceView v = parse_odd_choice(n, alphabet);
      if (v.kind == OddChoiceView::Invalid) return {false, v.violator ? v.violator : n};
      for (auto& [a, ms] : v.members)
        for (const FNode* m : ms) {
          auto r = is_disjunctive_node(m, alphabet);
          if (!r.first) return r;
        }
      return {true, nullptr};
    }
  }
  return {false, n};
}

inline std::pair<bool, const FNode*> is_disjunctive(const Formula& f) {
  return is_disjunctive_node(f.root.get(), f.alphabet);
}

// ---------------------------------------------------------------------------
// next_choices: Odd-choice formulas reachable without crossing a modality

struct ChoiceStep {
  const FNode* source;
  const FNode* target; // Odd-choice / literal-set / Top / Bottom node
  int max_priority;    // maximal fixpoint priority on the trace, -1 if none

  bool operator<(const ChoiceStep& o) const {
    return std::tie(source, target, max_priority) < std::tie(o.source, o.target, o.max_priority);
  }
};

// whether a literal set holds under valuation P
inline bool respects(const std::vector<std::pair<std::string, bool>>& lits,
                     const std::set<std::string>& P) {
  for (auto& [name, pos] : lits)
    if ((P.count(name) > 0) != pos) return false;
  return true;
}

// All stop nodes (Odd-choice, literal set, tt, ff) reachable from f by
// resolving disjunctions and unfolding fixpoints, each with the maximal
// fixpoint priority seen on its trace; only targets whose literal set
// respects P are kept (Bottom targets are kept for the caller to rule out).
inline std::vector<ChoiceStep> next_choices(const FormulaSystem& sys, const FNode* f,
                                            const std::set<std::string>& P) {
  std::set<ChoiceStep> out;
  std::set<std::pair<const FNode*, int>> seen;
  std::vector<std::pair<const FNode*, int>> todo{{f, -1}};
  while (!todo.empty()) {
    auto [n, prio] = todo.back();
    todo.pop_back();
    if (!seen.insert({n, prio}).second) continue;
    switch (n->kind) {
      case FKind::Or:
        todo.push_back({n->l.get(), prio});
        todo.push_back({n->r.get(), prio});
        break;
      case FKind::Mu:
      case FKind::Nu:
        todo.push_back({n->l.get(), prio});
        break;
      case FKind::Var: {
        if (!sys.info.binding.count(n))
          throw std::runtime_error("next_choices: free variable " + n->name);
        int p = std::max(prio, sys.var_priority(n));
        todo.push_back({sys.info.binding.at(n)->l.get(), p});
        break;
      }
      case FKind::Top:
        out.insert({f, n, prio});
        break;
      case FKind::Bottom:
        out.insert({f, n, prio});
        break;
      case FKind::Lit:
      case FKind::And:
      case FKind::Dia:
      case FKind::Box: {
        OddChoiceView v = parse_odd_choice(n, sys.f.alphabet);
        if (v.kind == OddChoiceView::Invalid)
          throw std::runtime_error("next_choices: subformula is not disjunctive");
        if (respects(v.lits, P)) out.insert({f, n, prio});
        break;
      }
    }
  }
  return std::vector<ChoiceStep>(out.begin(), out.end());
}

// ---------------------------------------------------------------------------
// Expansion of macrostates to modal profiles

namespace detail {

struct ExpLeaf {
  int origin;        // macrostate element (occurrence id)
  int body;          // occurrence id of the modal body
  int prio;          // max fixpoint priority on the path, -1 if none
};

struct Profile {
  std::vector<std::pair<std::string, bool>> lits;
  std::map<std::string, std::vector<ExpLeaf>> dias, boxes;
};

// expands a macrostate through non-modal connectives; Or-nodes branch
inline void expand_rec(const FormulaSystem& sys,
                       std::vector<std::tuple<const FNode*, int, int>> pending, Profile acc,
                       std::vector<Profile>& out, long& budget) {
  while (!pending.empty()) {
    if (--budget < 0) throw std::runtime_error("to_disjunctive: expansion too large");
    auto [n, origin, prio] = pending.back();
    pending.pop_back();
    switch (n->kind) {
      case FKind::Top:
        break; // trace discharged
      case FKind::Bottom:
        return; // inconsistent profile
      case FKind::Lit: {
        for (auto& [nm, pos] : acc.lits)
          if (nm == n->name && pos != n->positive) return; // complementary pair
        bool dup = false;
        for (auto& [nm, pos] : acc.lits) dup = dup || (nm == n->name && pos == n->positive);
        if (!dup) acc.lits.emplace_back(n->name, n->positive);
        break;
      }
      case FKind::Var: {
        int p = std::max(prio, sys.var_priority(n));
        pending.emplace_back(sys.info.binding.at(n)->l.get(), origin, p);
        break;
      }
      case FKind::Mu:
      case FKind::Nu:
        pending.emplace_back(n->l.get(), origin, prio);
        break;
      case FKind::And:
        pending.emplace_back(n->l.get(), origin, prio);
        pending.emplace_back(n->r.get(), origin, prio);
        break;
      case FKind::Or: {
        auto left = pending;
        left.emplace_back(n->l.get(), origin, prio);
        expand_rec(sys, std::move(left), acc, out, budget);
        pending.emplace_back(n->r.get(), origin, prio);
        break;
      }
      case FKind::Dia:
        acc.dias[n->action].push_back({origin, sys.id.at(n->l.get()), prio});
        break;
      case FKind::Box:
        acc.boxes[n->action].push_back({origin, sys.id.at(n->l.get()), prio});
        break;
    }
  }
  std::sort(acc.lits.begin(), acc.lits.end());
  out.push_back(std::move(acc));
}

inline std::vector<Profile> expand(const FormulaSystem& sys, const std::vector<int>& gamma) {
  std::vector<std::tuple<const FNode*, int, int>> pending;
  for (int g : gamma) pending.emplace_back(sys.nodes[g], g, -1);
  std::vector<Profile> out;
  long budget = 2000000;
  expand_rec(sys, std::move(pending), {}, out, budget);
  return out;
}

// ---------------------------------------------------------------------------
// Per-branch trace monitors.  A step letter is the set of trace edges from
// the current macrostate into the chosen member, each with the set of
// priorities realizable on it.

struct TraceEdge {
  int origin, target;
  uint32_t prios; // bitmask

  bool operator<(const TraceEdge& o) const {
    return std::tie(origin, target, prios) < std::tie(o.origin, o.target, o.prios);
  }
};

struct BreakpointMonitor {
  // states: sorted sets of owing occurrence ids
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> sets;

  int intern(std::vector<int> s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(sets.size());
    sets.push_back(s);
    ids[s] = id;
    return id;
  }
  int initial() { return intern({}); }

  // returns (next state, emitted priority in {1,2})
  std::pair<int, int> step(int id, const std::vector<TraceEdge>& edges) {
    const std::vector<int>& owing = sets[id];
    std::set<int> base(owing.begin(), owing.end());
    bool fresh = owing.empty();
    std::set<int> next;
    for (auto& e : edges) {
      bool from_base = fresh || base.count(e.origin);
      bool odd = false;
      for (int p = 0; p < 32; ++p)
        if ((e.prios >> p) & 1u) odd = odd || (p % 2 == 1);
      if (from_base && odd) next.insert(e.target);
    }
    if (next.empty()) return {intern({}), 2};
    return {intern(std::vector<int>(next.begin(), next.end())), 1};
  }
};

// Safra-based monitor: determinizes the "some trace has an odd dominant
// priority" automaton and complements by shifting the emitted priority.
struct OddTraceMonitor {
  // NBW states: (occurrence, guess p, phase 0 pre / 1 committed / 2 committed+p)
  int n_occ, n_guess;
  std::vector<int> guesses;
  std::unique_ptr<SafraDet> det;

  OddTraceMonitor(const FormulaSystem& sys) {
    n_occ = static_cast<int>(sys.nodes.size());
    for (int p = (sys.pa.low % 2 == 1 ? sys.pa.low : sys.pa.low + 1); p <= sys.pa.high; p += 2)
      guesses.push_back(p);
    if (guesses.empty()) guesses.push_back(1);
    n_guess = static_cast<int>(guesses.size());
    std::vector<char> acc(num_states(), 0);
    for (int g = 0; g < n_guess; ++g)
      for (int o = 0; o < n_occ; ++o) acc[state(o, g, 2)] = 1;
    std::vector<int> init;
    int root = 0; // root occurrence id is 0 (preorder)
    for (int g = 0; g < n_guess; ++g) {
      init.push_back(state(root, g, 0));
      init.push_back(state(root, g, 1));
    }
    det = std::make_unique<SafraDet>(num_states(), acc, init);
  }
  int num_states() const { return n_occ * n_guess * 3; }
  int state(int occ, int g, int phase) const { return (occ * n_guess + g) * 3 + phase; }

  int initial() { return det->initial_tree(); }

  std::pair<int, int> step(int id, const std::vector<TraceEdge>& edges) {
    std::vector<std::vector<int>> delta(num_states());
    for (auto& e : edges) {
      for (int p = 0; p < 32; ++p) {
        if (!((e.prios >> p) & 1u)) continue;
        for (int g = 0; g < n_guess; ++g) {
          int gp = guesses[g];
          delta[state(e.origin, g, 0)].push_back(state(e.target, g, 0));
          if (p <= gp) {
            int ph = (p == gp) ? 2 : 1;
            delta[state(e.origin, g, 0)].push_back(state(e.target, g, ph));
            delta[state(e.origin, g, 1)].push_back(state(e.target, g, ph));
            delta[state(e.origin, g, 2)].push_back(state(e.target, g, ph));
          }
        }
      }
    }
    auto [nid, prio] = det->step(id, delta);
    return {nid, prio + 1}; // complement: all traces even
  }
};

} // namespace detail

// ---------------------------------------------------------------------------
// to_disjunctive

namespace detail {

struct DjBuilder {
  const FormulaSystem& sys;
  bool buchi_able;
  BreakpointMonitor mh;
  std::optional<OddTraceMonitor> safra;

  // automaton states: (macrostate, monitor state, entry priority)
  struct Key {
    std::vector<int> gamma;
    int mon, prio;
    bool operator<(const Key& o) const {
      return std::tie(gamma, mon, prio) < std::tie(o.gamma, o.mon, o.prio);
    }
  };
  std::map<Key, int> ids;
  std::vector<Key> keys;
  StateSystem out;

  explicit DjBuilder(const FormulaSystem& s) : sys(s) {
    int min_even = INT32_MAX, max_odd = -1;
    auto consider = [&](int p) {
      if (p % 2 == 0) min_even = std::min(min_even, p);
      else max_odd = std::max(max_odd, p);
    };
    if (sys.pa.has_binders) {
      consider(sys.low);
      for (auto& [b, p] : sys.pa.of_binder) consider(p);
    } else {
      consider(0);
    }
    buchi_able = max_odd < min_even;
    if (!buchi_able) safra.emplace(sys);
  }

  // symbolic transition: literal set + per action either "unconstrained"
  // (nullopt) or a member list (state ids, -1 for the plain-tt member)
  struct Trans {
    std::vector<std::pair<std::string, bool>> lits;
    std::vector<std::optional<std::vector<int>>> per_action;
  };
  std::vector<std::vector<Trans>> delta;

  int intern(Key k) {
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(keys.size());
    ids[k] = id;
    keys.push_back(k);
    out.priority.push_back(k.prio);
    out.templates.emplace_back(); // rendered later
    delta.emplace_back();
    return id;
  }

  std::pair<int, int> mon_step(int mon, const std::vector<TraceEdge>& edges) {
    if (buchi_able) return mh.step(mon, edges);
    return safra->step(mon, edges);
  }

  // member = macrostate + its trace edges
  struct Member {
    std::vector<int> gamma;
    std::vector<TraceEdge> edges;
  };

  int member_state(int mon, const Member& m) {
    auto [mon2, prio] = mon_step(mon, m.edges);
    return intern({m.gamma, mon2, prio});
  }

  void build_transitions(int id) {
    const Key key = keys[id];
    auto profiles = expand(sys, key.gamma);
    std::vector<Trans> transitions;
    for (auto& prof : profiles) {
      // per action: the available member-set options; nullopt marks an
      // action the profile does not constrain at all
      std::vector<std::optional<std::vector<std::vector<Member>>>> action_options;
      for (auto& a : sys.f.alphabet) {
        std::vector<ExpLeaf> dias =
            prof.dias.count(a) ? prof.dias.at(a) : std::vector<ExpLeaf>();
        std::vector<ExpLeaf> boxes =
            prof.boxes.count(a) ? prof.boxes.at(a) : std::vector<ExpLeaf>();
        std::vector<int> dbodies;
        for (auto& d : dias) dbodies.push_back(d.body);
        std::sort(dbodies.begin(), dbodies.end());
        dbodies.erase(std::unique(dbodies.begin(), dbodies.end()), dbodies.end());
        int k = static_cast<int>(dbodies.size());
        if (k > 6) throw std::runtime_error("to_disjunctive: too many diamonds per action");

        if (k == 0 && boxes.empty()) {
          action_options.emplace_back();
          continue;
        }

        auto make_member = [&](const std::vector<int>& chosen) {
          Member m;
          std::set<int> gs(chosen.begin(), chosen.end());
          for (auto& b : boxes) gs.insert(b.body);
          m.gamma.assign(gs.begin(), gs.end());
          std::map<std::pair<int, int>, uint32_t> em;
          std::set<int> chosenset(chosen.begin(), chosen.end());
          for (auto& d : dias)
            if (chosenset.count(d.body))
              em[{d.origin, d.body}] |= 1u << (d.prio < 0 ? sys.low : d.prio);
          for (auto& b : boxes)
            em[{b.origin, b.body}] |= 1u << (b.prio < 0 ? sys.low : b.prio);
          for (auto& [ot, mask] : em) m.edges.push_back({ot.first, ot.second, mask});
          return m;
        };
        Member m_empty = make_member({});

        // One member per block of a partition of the diamond bodies: a
        // successor witnessing several diamonds carries its whole block.
        // Designating one witness per diamond makes partitions complete;
        // the box-only member admits non-witness successors.  When there
        // are no boxes that member is plain tt and subsumes the variant
        // without it, so only the extended variant is emitted.
        std::vector<std::vector<Member>> options;
        if (k == 0) {
          options.push_back({});        // no a-successors
          options.push_back({m_empty}); // some successor, only box obligations
        } else {
          std::vector<std::vector<int>> blocks; // current partition, by index
          std::function<void(int)> parts = [&](int i) {
            if (i == k) {
              std::vector<Member> ms;
              for (auto& blk : blocks) {
                std::vector<int> chosen;
                for (int bi : blk) chosen.push_back(dbodies[bi]);
                ms.push_back(make_member(chosen));
              }
              if (!boxes.empty()) options.push_back(ms);
              ms.push_back(m_empty);
              options.push_back(ms);
              return;
            }
            for (auto& blk : blocks) {
              blk.push_back(i);
              parts(i + 1);
              blk.pop_back();
            }
            blocks.push_back({i});
            parts(i + 1);
            blocks.pop_back();
          };
          parts(0);
        }
        action_options.emplace_back(std::move(options));
      }

      // a wholly unconstrained profile is a bare literal set; otherwise
      // unconstrained actions still need their ->a part in every variant
      bool any_constrained = false;
      for (auto& o : action_options) any_constrained = any_constrained || o.has_value();
      if (any_constrained)
        for (auto& o : action_options)
          if (!o) o = std::vector<std::vector<Member>>{{}, {Member{}}};

      // product over the constrained actions
      std::vector<size_t> pick(action_options.size(), 0);
      while (true) {
        Trans t;
        t.lits = prof.lits;
        for (size_t ai = 0; ai < sys.f.alphabet.size(); ++ai) {
          if (!action_options[ai]) {
            t.per_action.emplace_back(std::nullopt);
            continue;
          }
          const std::vector<Member>& ms = (*action_options[ai])[pick[ai]];
          std::vector<int> targets;
          for (auto& m : ms)
            targets.push_back(m.gamma.empty() ? -1 : member_state(key.mon, m));
          std::sort(targets.begin(), targets.end());
          targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
          t.per_action.emplace_back(std::move(targets));
        }
        transitions.push_back(std::move(t));

        size_t i = 0;
        while (i < pick.size()) {
          if (action_options[i] && ++pick[i] < action_options[i]->size()) break;
          pick[i] = 0;
          ++i;
        }
        if (i == pick.size()) break;
      }
      if (keys.size() > 60000)
        throw std::runtime_error("to_disjunctive: state space too large");
    }
    delta[id] = std::move(transitions);
  }

  // drop transitions that require an unsatisfiable member, iterating until
  // the dead set is stable
  void propagate_dead(std::vector<char>& dead) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t s = 0; s < delta.size(); ++s) {
        if (dead[s]) continue;
        auto& ts = delta[s];
        ts.erase(std::remove_if(ts.begin(), ts.end(),
                                [&](const Trans& t) {
                                  for (auto& pa : t.per_action)
                                    if (pa)
                                      for (int m : *pa)
                                        if (m >= 0 && dead[m]) return true;
                                  return false;
                                }),
                 ts.end());
        if (ts.empty()) {
          dead[s] = 1;
          changed = true;
        }
      }
    }
  }

  std::string trans_key(const std::vector<Trans>& ts, int prio) const {
    std::string k = "p" + std::to_string(prio) + "|";
    for (auto& t : ts) {
      for (auto& [nm, pos] : t.lits) k += (pos ? "+" : "-") + nm + ",";
      for (auto& pa : t.per_action) {
        if (!pa) { k += "*;"; continue; }
        for (int m : *pa) k += std::to_string(m) + ",";
        k += ";";
      }
      k += "|";
    }
    return k;
  }

  // merge states with equal priority and transitions, then prune
  void simplify(std::vector<char>& dead) {
    int n = static_cast<int>(delta.size());
    std::vector<int> remap(n);
    for (int i = 0; i < n; ++i) remap[i] = i;
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::string, int> repr;
      for (int i = 0; i < n; ++i) {
        if (dead[i] || remap[i] != i) continue;
        // normalize member ids through remap before keying
        std::vector<Trans> ts = delta[i];
        for (auto& t : ts)
          for (auto& pa : t.per_action)
            if (pa) {
              for (int& m : *pa)
                if (m >= 0) m = remap[m];
              std::sort(pa->begin(), pa->end());
              pa->erase(std::unique(pa->begin(), pa->end()), pa->end());
            }
        std::string k = trans_key(ts, out.priority[i]);
        auto it = repr.find(k);
        if (it == repr.end()) {
          repr[k] = i;
        } else {
          remap[i] = it->second;
          changed = true;
        }
      }
    }
    auto chase = [&](int x) {
      while (remap[x] != x) x = remap[x];
      return x;
    };
    for (auto& ts : delta)
      for (auto& t : ts)
        for (auto& pa : t.per_action)
          if (pa) {
            for (int& m : *pa)
              if (m >= 0) m = chase(m);
            std::sort(pa->begin(), pa->end());
            pa->erase(std::unique(pa->begin(), pa->end()), pa->end());
          }
    out.initial = chase(out.initial);
  }

  FPtr render(int id, const std::vector<char>& dead) {
    if (dead[id]) return f_bottom();
    std::vector<FPtr> transitions;
    for (auto& t : delta[id]) {
      FPtr g;
      auto add = [&](FPtr x) { g = g ? f_and(g, x) : x; };
      for (auto& [nm, pos] : t.lits) add(f_lit(nm, pos));
      for (size_t ai = 0; ai < sys.f.alphabet.size(); ++ai) {
        if (!t.per_action[ai]) continue;
        const std::string& a = sys.f.alphabet[ai];
        const std::vector<int>& ms = *t.per_action[ai];
        if (ms.empty()) {
          add(f_box(a, f_bottom()));
        } else {
          FPtr disj;
          for (int m : ms) {
            FPtr ref = m < 0 ? f_top() : f_var("@" + std::to_string(m));
            add(f_dia(a, ref));
            disj = disj ? f_or(disj, clone(ref)) : clone(ref);
          }
          add(f_box(a, disj));
        }
      }
      transitions.push_back(g ? g : f_top());
    }
    FPtr t = transitions[0];
    for (size_t i = 1; i < transitions.size(); ++i) t = f_or(t, transitions[i]);
    return t;
  }

  Formula run() {
    int mon0 = buchi_able ? mh.initial() : safra->initial();
    out.initial = intern({{0}, mon0, 1}); // occurrence 0 = root
    // building transitions may intern further states; the bound follows
    for (size_t i = 0; i < keys.size(); ++i) build_transitions(static_cast<int>(i));
    std::vector<char> dead(delta.size(), 0);
    propagate_dead(dead);
    simplify(dead);
    if (dead[out.initial]) return Formula{f_bottom(), sys.f.alphabet};
    // reachable render
    std::map<int, int> newid;
    std::vector<int> order{out.initial};
    newid[out.initial] = 0;
    for (size_t qi = 0; qi < order.size(); ++qi) {
      for (auto& t : delta[order[qi]])
        for (auto& pa : t.per_action)
          if (pa)
            for (int m : *pa)
              if (m >= 0 && !newid.count(m)) {
                newid[m] = static_cast<int>(order.size());
                order.push_back(m);
              }
    }
    StateSystem ns;
    for (int o : order) {
      ns.priority.push_back(out.priority[o]);
      FPtr t = render(o, dead);
      // rewrite refs to compact ids
      std::function<FPtr(const FPtr&)> rw = [&](const FPtr& x) -> FPtr {
        if (!x) return nullptr;
        if (x->kind == FKind::Var && !x->name.empty() && x->name[0] == '@')
          return f_var("@" + std::to_string(newid.at(std::stoi(x->name.substr(1)))));
        auto nn = std::make_shared<FNode>(*x);
        auto& mm = const_cast<FNode&>(*nn);
        mm.l = rw(x->l);
        mm.r = rw(x->r);
        return nn;
      };
      ns.templates.push_back(rw(t));
    }
    ns.initial = 0;
    FPtr root = system_to_fptr(ns);
    return Formula{root, sys.f.alphabet};
  }
};

} // namespace detail

inline Formula to_disjunctive(const Formula& f0) {
  Formula f = normalize(f0);
  if (is_disjunctive(f).first) return f;
  FormulaSystem sys(f, /*prefer_buchi=*/true);
  detail::DjBuilder b(sys);
  Formula out = b.run();
  if (!is_disjunctive(out).first)
    throw std::logic_error("to_disjunctive produced a non-disjunctive formula");
  // Lemma "disjunctive form preserves Pi2": a Pi2-or-lower input goes through
  // the breakpoint route, so the output must still admit a {2,1} assignment
  auto admits_21 = [](const Formula& g) {
    auto info = analyze(g.root);
    auto p1 = compute_assignment_floor(g.root, info, 1);
    return !p1.has_binders || p1.high <= 2;
  };
  if (admits_21(f) && !admits_21(out))
    throw std::logic_error("to_disjunctive failed to preserve Pi2");
  return out;
}

} // namespace mucalc
