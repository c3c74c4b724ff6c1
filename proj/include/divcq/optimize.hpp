#pragma once

// Diversity maximization: greedy (plain and lazy), exhaustive optimum,
// top-1 retrieval engines (naive, tropical, which-provenance) and greedy
// driven by those engines.

#include <algorithm>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "engine.hpp"
#include "query.hpp"
#include "relcore.hpp"
#include "volume.hpp"

namespace divcq {

struct DiverseResult {
  std::vector<Tuple> selected;
  std::vector<Rational> gains;
  Rational total = 0;
  std::string mode;
  bool optimal = false;
};

inline constexpr std::uint64_t kDefaultMaxSubsets = 10'000'000;

namespace detail {

// Balls over dense point ids, so marginals are cheap array scans.
struct DenseBalls {
  std::vector<std::vector<std::uint32_t>> balls;
  std::vector<Rational> weight;

  DenseBalls(const std::vector<Tuple>& items, const VolumeAssignment& v) {
    require_discrete(v);
    std::unordered_map<GroundPoint, std::uint32_t, GroundPointHash> ids;
    for (const auto& t : items) {
      std::vector<std::uint32_t> b;
      for (const auto& p : v.ball(t)) {
        auto [it, fresh] = ids.emplace(p, static_cast<std::uint32_t>(weight.size()));
        if (fresh) weight.push_back(v.measure().weight(p));
        b.push_back(it->second);
      }
      balls.push_back(std::move(b));
    }
  }

  Rational gain(std::size_t i, const std::vector<char>& covered) const {
    Rational g = 0;
    for (auto p : balls[i])
      if (!covered[p]) g += weight[p];
    return g;
  }

  Rational add(std::size_t i, std::vector<char>& covered) const {
    Rational g = 0;
    for (auto p : balls[i])
      if (!covered[p]) {
        covered[p] = 1;
        g += weight[p];
      }
    return g;
  }
};

inline std::vector<Tuple> sorted_unique(std::vector<Tuple> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

inline void check_non_increasing(const std::vector<Rational>& gains) {
  for (std::size_t i = 1; i < gains.size(); ++i)
    if (gains[i] > gains[i - 1])
      throw std::logic_error("greedy gains increased at step " + std::to_string(i + 1) +
                             "; the diversity function is not submodular");
}

inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  // C(m, i) = C(m-1, i-1) * m / i; i / gcd(c, i) divides m exactly
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    std::uint64_t m = n - k + i;
    std::uint64_t g = std::gcd(c, i);
    std::uint64_t a = c / g, b = m / (i / g);
    if (a > cap / b) return cap + 1;
    c = a * b;
  }
  return c;
}

}  // namespace detail

/// Exhaustive optimum over all k-subsets; ties go to the lexicographically
/// smallest sorted answer list. k ≥ |answers| returns every answer.
inline DiverseResult brute_force_diversify(std::vector<Tuple> answers, std::size_t k,
                                           const VolumeAssignment& v,
                                           std::uint64_t max_subsets = kDefaultMaxSubsets) {
  answers = detail::sorted_unique(std::move(answers));
  const auto n = answers.size();
  k = std::min(k, n);
  DiverseResult out;
  out.mode = "exact";
  out.optimal = true;
  if (k == 0) return out;
  auto count = detail::binomial_capped(n, k, max_subsets);
  if (count > max_subsets)
    throw CapExceeded("exact search needs C(" + std::to_string(n) + "," + std::to_string(k) +
                      ") subsets, more than the cap of " + std::to_string(max_subsets));
  detail::DenseBalls dense(answers, v);
  std::vector<std::size_t> comb(k);
  for (std::size_t i = 0; i < k; ++i) comb[i] = i;
  std::vector<std::size_t> best;
  Rational best_value = -1;
  std::vector<char> covered(dense.weight.size(), 0);
  while (true) {
    std::fill(covered.begin(), covered.end(), 0);
    Rational value = 0;
    for (auto i : comb) value += dense.add(i, covered);
    if (value > best_value) {
      best_value = value;
      best = comb;
    }
    // next combination in lexicographic order
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  std::fill(covered.begin(), covered.end(), 0);
  for (auto i : best) {
    out.selected.push_back(answers[i]);
    out.gains.push_back(dense.add(i, covered));
  }
  out.total = best_value;
  return out;
}

/// Greedy selection: k times add the answer with the largest marginal,
/// ties to the smallest answer. `lazy` re-evaluates stale upper bounds from
/// a priority queue and yields exactly the plain result.
inline DiverseResult greedy_diversify(std::vector<Tuple> answers, std::size_t k,
                                      const VolumeAssignment& v, bool lazy = true) {
  answers = detail::sorted_unique(std::move(answers));
  const auto n = answers.size();
  k = std::min(k, n);
  DiverseResult out;
  out.mode = "greedy";
  if (k == 0) return out;
  detail::DenseBalls dense(answers, v);
  std::vector<char> covered(dense.weight.size(), 0);
  std::vector<char> taken(n, 0);
  auto take = [&](std::size_t i) {
    taken[i] = 1;
    out.selected.push_back(answers[i]);
    Rational g = dense.add(i, covered);
    out.total += g;
    out.gains.push_back(std::move(g));
  };
  if (!lazy) {
    for (std::size_t round = 0; round < k; ++round) {
      std::optional<std::size_t> best;
      Rational best_gain = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        Rational g = dense.gain(i, covered);
        if (g > best_gain) {
          best_gain = std::move(g);
          best = i;
        }
      }
      take(*best);
    }
  } else {
    struct Entry {
      Rational bound;
      std::size_t index;
    };
    // max bound first, then smallest index
    auto worse = [](const Entry& a, const Entry& b) {
      return a.bound != b.bound ? a.bound < b.bound : a.index > b.index;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
    for (std::size_t i = 0; i < n; ++i) heap.push({dense.gain(i, covered), i});
    while (out.selected.size() < k) {
      Entry top = heap.top();
      heap.pop();
      Rational g = dense.gain(top.index, covered);
      bool accept = heap.empty();
      if (!accept) {
        const Entry& next = heap.top();
        accept = g > next.bound || (g == next.bound && top.index < next.index);
      }
      if (accept)
        take(top.index);
      else
        heap.push({std::move(g), top.index});
    }
  }
  detail::check_non_increasing(out.gains);
  return out;
}

/// Greedy on Monte-Carlo estimates (V_r); every estimate reuses the
/// assignment's seed. 1-D balls are measured exactly.
struct EstimatedResult {
  std::vector<Tuple> selected;
  std::vector<double> gains;
  double total = 0;
  double std_error = 0;
  bool exact = false;
};

inline EstimatedResult greedy_diversify_estimated(std::vector<Tuple> answers, std::size_t k,
                                                  const EuclideanVolume& v) {
  answers = detail::sorted_unique(std::move(answers));
  k = std::min(k, answers.size());
  EstimatedResult out;
  out.exact = true;
  std::vector<char> taken(answers.size(), 0);
  double current = 0;
  for (std::size_t round = 0; round < k; ++round) {
    std::optional<std::size_t> best;
    VolumeEstimate best_est;
    double best_gain = -INFINITY;
    for (std::size_t i = 0; i < answers.size(); ++i) {
      if (taken[i]) continue;
      auto trial = out.selected;
      trial.push_back(answers[i]);
      auto est = v.estimate(trial);
      if (est.estimate - current > best_gain) {
        best_gain = est.estimate - current;
        best = i;
        best_est = est;
      }
    }
    taken[*best] = 1;
    out.selected.push_back(answers[*best]);
    out.gains.push_back(best_gain);
    current = best_est.estimate;
    out.std_error = best_est.std_error;
    out.exact = best_est.exact;
  }
  out.total = current;
  return out;
}

// ---------------------------------------------------------------------------
// Top-1 retrieval: argmax over answers t of δ_V(S ∪ {t})

struct NextResult {
  std::optional<Tuple> answer;  // nullopt iff the query has no answers
  Rational marginal = 0;
};

/// Enumerates ⟦Q⟧(D) and scans it; ties go to the smallest answer.
inline NextResult cqnext_naive(const ConjunctiveQuery& q, const Database& d,
                               const std::vector<Tuple>& s, const VolumeAssignment& v) {
  require_discrete(v);
  auto answers = enumerate_answers(q, d);
  CoverageState cov(v);
  for (const auto& t : s) cov.add(t);
  NextResult out;
  for (const auto& t : answers.answers) {
    Rational g = cov.gain(t);
    if (!out.answer || g > out.marginal) {
      out.answer = t;
      out.marginal = std::move(g);
    }
  }
  return out;
}

namespace detail {

// Max-plus sum-product over the nodes of `td` flagged in `active` (a
// connected subtree containing the root). weight[u][r] = nullopt marks a
// dead row. Returns the chosen row per active node, or nullopt if no
// consistent assignment exists.
struct MaxPlusOutcome {
  Rational value;
  std::vector<int> rows;  // -1 for inactive nodes
};

inline std::optional<MaxPlusOutcome> max_plus(
    const TreeDecomposition& td, const std::vector<bool>& active,
    const std::vector<IndexedRows>& rel,
    const std::vector<std::vector<std::optional<Rational>>>& weight) {
  const auto n = td.size();
  std::vector<std::vector<std::optional<Rational>>> val(n);
  // per active non-root node: key binding -> (best value, smallest row)
  std::vector<std::unordered_map<Row, std::pair<Rational, std::uint32_t>, RowHash>> best(n);
  std::vector<std::vector<std::size_t>> key_in_child(n), key_in_parent(n);
  for (int u = 0; u < static_cast<int>(n); ++u) {
    if (!active[u] || td.node(u).parent < 0) continue;
    auto key = td.key(u);
    key_in_child[u] = positions_of(td.node(u).bag, key);
    key_in_parent[u] = positions_of(td.node(td.node(u).parent).bag, key);
  }
  for (int u : td.post_order()) {
    if (!active[u]) continue;
    const auto& rows = rel[u].rows();
    val[u].assign(rows.size(), std::nullopt);
    for (std::uint32_t r = 0; r < rows.size(); ++r) {
      if (!weight[u][r]) continue;
      Rational acc = *weight[u][r];
      bool alive = true;
      for (int c : td.node(u).children) {
        if (!active[c]) continue;
        auto it = best[c].find(project(rows[r], key_in_parent[c]));
        if (it == best[c].end()) {
          alive = false;
          break;
        }
        acc += it->second.first;
      }
      if (alive) val[u][r] = std::move(acc);
    }
    if (td.node(u).parent >= 0) {
      for (std::uint32_t r = 0; r < rows.size(); ++r) {
        if (!val[u][r]) continue;
        auto key = project(rows[r], key_in_child[u]);
        auto it = best[u].find(key);
        if (it == best[u].end())
          best[u].emplace(std::move(key), std::make_pair(*val[u][r], r));
        else if (*val[u][r] > it->second.first)
          it->second = {*val[u][r], r};
      }
    }
  }
  int root = td.root();
  std::optional<std::uint32_t> root_row;
  for (std::uint32_t r = 0; r < val[root].size(); ++r)
    if (val[root][r] && (!root_row || *val[root][r] > *val[root][*root_row])) root_row = r;
  if (!root_row) return std::nullopt;
  MaxPlusOutcome out{*val[root][*root_row], std::vector<int>(n, -1)};
  out.rows[root] = static_cast<int>(*root_row);
  for (int u : td.pre_order()) {
    if (!active[u] || u == root) continue;
    int p = td.node(u).parent;
    const auto& prow = rel[p].row(static_cast<std::size_t>(out.rows[p]));
    out.rows[u] = static_cast<int>(best[u].at(project(prow, key_in_parent[u])).second);
  }
  return out;
}

inline Tuple answer_from_rows(const ConjunctiveQuery& q, const TreeDecomposition& td,
                              const std::vector<IndexedRows>& rel, const std::vector<int>& rows) {
  std::vector<Value> assignment(q.var_count());
  for (std::size_t u = 0; u < td.size(); ++u) {
    if (rows[u] < 0) continue;
    const auto& bag = td.node(static_cast<int>(u)).bag;
    const auto& row = rel[u].row(static_cast<std::size_t>(rows[u]));
    for (std::size_t i = 0; i < bag.size(); ++i) assignment[bag[i]] = row[i];
  }
  return Tuple{q.head_name(), head_row(q, assignment)};
}

inline void require_valid_td(const ConjunctiveQuery& q, const TreeDecomposition& td) {
  if (auto v = validate_tree_decomposition(q, td); !v)
    throw InputError("invalid tree decomposition: " + v.property + ": " + v.witness);
}

// first node (pre-order) whose bag covers atom a and satisfies `allowed`
template <class Pred>
int covering_node(const TreeDecomposition& td, std::size_t a, Pred allowed) {
  for (int u : td.pre_order()) {
    const auto& cov = td.node(u).covering_atoms;
    if (allowed(u) && std::find(cov.begin(), cov.end(), a) != cov.end()) return u;
  }
  return -1;
}

}  // namespace detail

/// Max-plus retrieval for V_pos / V_pos^w over a width-1 decomposition.
/// Head position l is scored by its covering atom (first body atom holding
/// the head variable), which is scored at the first node covering it.
inline NextResult cqnext_tropical(const ConjunctiveQuery& q, const TreeDecomposition& td,
                                  const Database& d, const std::vector<Tuple>& s,
                                  const VolumeAssignment& v) {
  if (!dynamic_cast<const PosVolume*>(&v))
    throw InputError("tropical retrieval supports only pos and pos-w assignments, not " +
                     v.name() + "; use the naive engine");
  detail::require_valid_td(q, td);
  if (!td.is_width_one(q))
    throw InputError("tropical retrieval needs an acyclic query with a width-1 decomposition; "
                     "use the naive engine");
  atom_inputs(q, d);
  const auto& head = q.head();
  // values already present at each head position
  std::vector<std::unordered_set<Value, ValueHash>> seen(head.size());
  for (const auto& t : s) {
    if (t.values.size() != head.size()) throw InputError(to_string(t) + " has the wrong arity");
    for (std::size_t l = 0; l < head.size(); ++l) seen[l].insert(t.values[l]);
  }
  std::vector<std::size_t> cover(head.size());
  for (std::size_t l = 0; l < head.size(); ++l) {
    for (std::size_t a = 0; a < q.body().size(); ++a) {
      const auto& args = q.body()[a].args;
      if (std::find(args.begin(), args.end(), head[l]) != args.end()) {
        cover[l] = a;
        break;
      }
    }
  }
  // positions scored at each node
  std::vector<std::vector<std::size_t>> scored(td.size());
  for (std::size_t l = 0; l < head.size(); ++l) {
    int u = detail::covering_node(td, cover[l], [](int) { return true; });
    scored[u].push_back(l);
  }
  std::vector<IndexedRows> rel(td.size());
  std::vector<std::vector<std::optional<Rational>>> weight(td.size());
  for (std::size_t u = 0; u < td.size(); ++u) {
    const auto& bag = td.node(static_cast<int>(u)).bag;
    rel[u] = bag_relation(q, d, bag);
    std::vector<std::size_t> col(head.size());
    for (auto l : scored[u]) col[l] = detail::positions_of(bag, {head[l]})[0];
    for (const auto& row : rel[u].rows()) {
      Rational w = 0;
      for (auto l : scored[u]) {
        const auto& value = row[col[l]];
        if (!seen[l].count(value)) w += v.measure().weight(GroundPoint::of_position(value, l + 1));
      }
      weight[u].push_back(std::move(w));
    }
  }
  auto mp = detail::max_plus(td, std::vector<bool>(td.size(), true), rel, weight);
  NextResult out;
  if (!mp) return out;
  out.answer = detail::answer_from_rows(q, td, rel, mp->rows);
  out.marginal = mp->value;
  if (marginal(v, s, *out.answer) != out.marginal)
    throw std::logic_error("tropical retrieval value disagrees with the marginal of " +
                           to_string(*out.answer));
  return out;
}

/// Retrieval for which-provenance balls on self-join-free queries with a
/// free-connex decomposition. Provenance sets are built bottom-up in the
/// subtrees hanging off the head subtree (empty-set-absorbing union), then
/// the number of uncovered facts is maximized over the head subtree.
inline NextResult cqnext_provenance(const ConjunctiveQuery& q, const TreeDecomposition& td,
                                    const Database& d, const std::vector<Tuple>& s) {
  if (!q.is_self_join_free())
    throw InputError("provenance retrieval needs a self-join-free query");
  detail::require_valid_td(q, td);
  auto fc = free_connex_subtree(q, td);
  if (!fc) throw InputError("provenance retrieval needs a free-connex decomposition");
  atom_inputs(q, d);
  const auto& t = fc->td;
  const auto& in_head = fc->in_head_subtree;
  const auto n = t.size();

  std::set<TupleRef> covered;
  auto selected_prov = provenance_map(q, d, s);
  for (const auto& [ans, refs] : selected_prov.entries())
    covered.insert(refs.begin(), refs.end());

  std::vector<std::uint32_t> slot;
  for (const auto& a : q.body()) slot.push_back(d.slot(a.relation));
  // every atom (hence every relation) annotates exactly one node
  std::vector<std::vector<std::size_t>> atoms_at(n);
  for (std::size_t a = 0; a < q.body().size(); ++a) {
    auto vs = q.body()[a].var_set();
    bool head_only = std::all_of(vs.begin(), vs.end(), [&](VarId x) { return q.in_head(x); });
    int u = head_only ? detail::covering_node(t, a, [&](int w) { return in_head[w]; })
                      : detail::covering_node(t, a, [&](int w) { return !in_head[w]; });
    if (u < 0) throw std::logic_error("atom " + std::to_string(a) + " has no annotating node");
    atoms_at[u].push_back(a);
  }
  for (std::size_t a = 0; a < slot.size(); ++a)
    for (std::size_t b = a + 1; b < slot.size(); ++b)
      if (slot[a] == slot[b]) throw std::logic_error("relation annotated at two atoms");

  std::vector<IndexedRows> rel(n);
  for (std::size_t u = 0; u < n; ++u) rel[u] = bag_relation(q, d, t.node(static_cast<int>(u)).bag);

  auto fact_of = [&](std::size_t a, const std::vector<VarId>& bag, const Row& row) {
    const auto& args = q.body()[a].args;
    Row vals;
    for (auto x : args) vals.push_back(row[detail::positions_of(bag, {x})[0]]);
    auto r = d.relation(slot[a]).find(vals);
    if (!r) throw std::logic_error("bag row does not match a fact of atom " + std::to_string(a));
    return TupleRef{slot[a], *r};
  };

  // hanging subtrees: provenance set per row, nullopt = no extension
  using Prov = std::optional<std::vector<TupleRef>>;
  std::vector<std::vector<Prov>> prov(n);
  std::vector<std::unordered_map<Row, std::vector<TupleRef>, RowHash>> up(n);
  for (int u : t.post_order()) {
    if (in_head[u]) continue;
    const auto& bag = t.node(u).bag;
    auto key_child = detail::positions_of(bag, t.key(u));
    prov[u].resize(rel[u].size());
    for (std::uint32_t r = 0; r < rel[u].size(); ++r) {
      const auto& row = rel[u].row(r);
      std::set<TupleRef> acc;
      bool alive = true;
      for (auto a : atoms_at[u]) acc.insert(fact_of(a, bag, row));
      for (int c : t.node(u).children) {
        auto kp = detail::positions_of(bag, t.key(c));
        auto it = up[c].find(detail::project(row, kp));
        if (it == up[c].end()) {
          alive = false;
          break;
        }
        acc.insert(it->second.begin(), it->second.end());
      }
      if (!alive) continue;
      auto& slot_set = up[u][detail::project(row, key_child)];
      std::vector<TupleRef> merged;
      std::set_union(slot_set.begin(), slot_set.end(), acc.begin(), acc.end(),
                     std::back_inserter(merged));
      slot_set = std::move(merged);
    }
  }

  // head subtree weights: uncovered head-atom facts plus uncovered
  // provenance of every hanging child
  std::vector<std::vector<std::optional<Rational>>> weight(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (!in_head[u]) continue;
    const auto& bag = t.node(static_cast<int>(u)).bag;
    for (const auto& row : rel[u].rows()) {
      std::optional<Rational> w = Rational(0);
      for (auto a : atoms_at[u])
        if (!covered.count(fact_of(a, bag, row))) *w += 1;
      for (int c : t.node(static_cast<int>(u)).children) {
        if (in_head[c]) continue;
        auto it = up[c].find(detail::project(row, detail::positions_of(bag, t.key(c))));
        if (it == up[c].end()) {
          w.reset();
          break;
        }
        for (const auto& f : it->second)
          if (!covered.count(f)) *w += 1;
      }
      weight[u].push_back(std::move(w));
    }
  }
  auto mp = detail::max_plus(t, in_head, rel, weight);
  NextResult out;
  if (!mp) return out;
  out.answer = detail::answer_from_rows(q, t, rel, mp->rows);
  out.marginal = mp->value;
  std::vector<Tuple> probe = s;
  probe.push_back(*out.answer);
  auto pm = std::make_shared<ProvenanceMap>(provenance_map(q, d, probe));
  if (marginal(ProvenanceVolume(pm), s, *out.answer) != out.marginal)
    throw std::logic_error("provenance retrieval value disagrees with the marginal of " +
                           to_string(*out.answer));
  return out;
}

enum class EngineMode { Naive, Tropical, Provenance };

inline std::string to_string(EngineMode m) {
  switch (m) {
    case EngineMode::Naive: return "naive";
    case EngineMode::Tropical: return "tropical";
    case EngineMode::Provenance: return "provenance";
  }
  return "?";
}

inline EngineMode parse_engine_mode(const std::string& s) {
  if (s == "naive") return EngineMode::Naive;
  if (s == "tropical") return EngineMode::Tropical;
  if (s == "provenance") return EngineMode::Provenance;
  throw InputError("unknown engine '" + s + "' (naive, tropical, provenance)");
}

/// k rounds of top-1 retrieval. When every marginal is 0 and the retrieved
/// answer is already selected, the smallest unselected answer is found by
/// streaming homomorphisms. Tropical/provenance modes never materialize
/// ⟦Q⟧(D). For provenance mode `v` is unused (balls come from the query).
inline DiverseResult greedy_combined(const ConjunctiveQuery& q, const Database& d, std::size_t k,
                                     const VolumeAssignment* v, EngineMode mode,
                                     const TreeDecomposition* td = nullptr) {
  if (mode == EngineMode::Tropical && !dynamic_cast<const PosVolume*>(v))
    throw InputError("the tropical engine pairs only with pos or pos-w");
  if (mode == EngineMode::Provenance && v && !dynamic_cast<const ProvenanceVolume*>(v))
    throw InputError("the provenance engine pairs only with provenance");
  if (mode == EngineMode::Naive && !v) throw InputError("the naive engine needs an assignment");
  std::optional<TreeDecomposition> own;
  if (mode != EngineMode::Naive && !td) {
    own = gyo_join_tree(q);
    if (!own) throw InputError("query is cyclic; pass a decomposition or use the naive engine");
    td = &*own;
  }
  DiverseResult out;
  out.mode = "greedy-combined";
  std::set<Tuple> chosen;
  for (std::size_t round = 0; round < k; ++round) {
    NextResult next;
    switch (mode) {
      case EngineMode::Naive: next = cqnext_naive(q, d, out.selected, *v); break;
      case EngineMode::Tropical: next = cqnext_tropical(q, *td, d, out.selected, *v); break;
      case EngineMode::Provenance: next = cqnext_provenance(q, *td, d, out.selected); break;
    }
    if (!next.answer) break;
    if (chosen.count(*next.answer)) {
      // all marginals are zero; take the smallest unselected answer
      std::optional<Row> pick;
      enumerate_homomorphisms(atom_inputs(q, d), q.var_count(),
                              [&](const std::vector<Value>& a, const std::vector<std::uint32_t>&) {
                                Row r = head_row(q, a);
                                if (!chosen.count(Tuple{q.head_name(), r}) && (!pick || r < *pick))
                                  pick = std::move(r);
                                return true;
                              });
      if (!pick) break;
      next.answer = Tuple{q.head_name(), *pick};
      next.marginal = 0;
    }
    chosen.insert(*next.answer);
    out.selected.push_back(*next.answer);
    out.total += next.marginal;
    out.gains.push_back(next.marginal);
  }
  detail::check_non_increasing(out.gains);
  return out;
}

}  // namespace divcq
