#pragma once

// Answer enumeration (backtracking join and Yannakakis over width-1 trees)
// and which-provenance of answers.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>
#include <vector>

#include "query.hpp"
#include "relcore.hpp"

namespace divcq {

/// One relation taking part in a join: column c binds variable cols[c].
/// A variable may appear in several columns (equality filter).
struct JoinInput {
  const IndexedRows* rows = nullptr;
  std::vector<VarId> cols;
};

/// Called once per homomorphism with the full assignment (indexed by VarId)
/// and the chosen row id of every input (in input order). Return false to stop.
using HomomorphismVisitor =
    std::function<bool(const std::vector<Value>& assignment, const std::vector<std::uint32_t>& rows)>;

struct JoinOptions {
  /// Fixed evaluation order; empty = ascending cardinality, connected first.
  std::vector<std::size_t> order;
  /// Variables bound before the search starts (invalid Value = unbound).
  std::vector<Value> initial;
  /// Maximum number of partial extensions; 0 = unlimited.
  std::uint64_t max_extensions = 0;
};

namespace detail {

inline std::vector<std::size_t> join_order(const std::vector<JoinInput>& inputs,
                                           std::size_t var_count,
                                           const std::vector<Value>& initial) {
  std::vector<std::size_t> order;
  std::vector<bool> used(inputs.size(), false);
  std::vector<bool> bound(var_count, false);
  for (std::size_t v = 0; v < initial.size() && v < var_count; ++v) bound[v] = initial[v].valid();
  for (std::size_t step = 0; step < inputs.size(); ++step) {
    std::size_t best = inputs.size();
    bool best_connected = false;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (used[i]) continue;
      bool connected = std::any_of(inputs[i].cols.begin(), inputs[i].cols.end(),
                                   [&](VarId v) { return bound[v]; });
      if (best == inputs.size() || (connected && !best_connected) ||
          (connected == best_connected && inputs[i].rows->size() < inputs[best].rows->size())) {
        best = i;
        best_connected = connected;
      }
    }
    used[best] = true;
    order.push_back(best);
    for (auto v : inputs[best].cols) bound[v] = true;
  }
  return order;
}

}  // namespace detail

/// Backtracking join with single-column index probes. Enumerates every
/// assignment of the variables that satisfies all inputs.
inline void enumerate_homomorphisms(const std::vector<JoinInput>& inputs, std::size_t var_count,
                                    const HomomorphismVisitor& visit, JoinOptions opts = {}) {
  std::vector<Value> assignment(var_count);
  for (std::size_t v = 0; v < opts.initial.size() && v < var_count; ++v)
    assignment[v] = opts.initial[v];
  for (const auto& in : inputs)
    if (in.rows->empty()) return;
  auto order = opts.order.empty() ? detail::join_order(inputs, var_count, assignment) : opts.order;
  std::vector<std::uint32_t> chosen(inputs.size(), 0);
  std::uint64_t extensions = 0;
  bool stop = false;

  std::function<void(std::size_t)> descend = [&](std::size_t depth) {
    if (stop) return;
    if (depth == order.size()) {
      if (!visit(assignment, chosen)) stop = true;
      return;
    }
    const auto& in = inputs[order[depth]];
    // smallest posting list among bound columns
    std::span<const std::uint32_t> candidates;
    bool probed = false;
    for (std::size_t c = 0; c < in.cols.size(); ++c) {
      const auto& val = assignment[in.cols[c]];
      if (!val.valid()) continue;
      auto hits = in.rows->lookup(c, val);
      if (!probed || hits.size() < candidates.size()) {
        candidates = hits;
        probed = true;
      }
    }
    auto try_row = [&](std::uint32_t r) {
      const Row& row = in.rows->row(r);
      std::vector<VarId> newly;
      bool ok = true;
      for (std::size_t c = 0; c < in.cols.size(); ++c) {
        auto v = in.cols[c];
        if (assignment[v].valid()) {
          if (assignment[v] != row[c]) {
            ok = false;
            break;
          }
        } else {
          assignment[v] = row[c];
          newly.push_back(v);
        }
      }
      if (ok) {
        if (opts.max_extensions && ++extensions > opts.max_extensions)
          throw CapExceeded("homomorphism enumeration exceeded " +
                            std::to_string(opts.max_extensions) + " extensions");
        chosen[order[depth]] = r;
        descend(depth + 1);
      }
      for (auto v : newly) assignment[v] = Value();
    };
    if (probed) {
      for (auto r : candidates) {
        try_row(r);
        if (stop) return;
      }
    } else {
      for (std::uint32_t r = 0; r < in.rows->size(); ++r) {
        try_row(r);
        if (stop) return;
      }
    }
  };
  descend(0);
}

inline std::vector<JoinInput> atom_inputs(const ConjunctiveQuery& q, const Database& d) {
  std::vector<JoinInput> inputs;
  for (const auto& a : q.body()) {
    if (!d.has_relation(a.relation))
      throw InputError("query relation " + a.relation + " is not in the database");
    const auto& rel = d.relation(a.relation);
    if (rel.arity() != a.args.size())
      throw InputError("atom " + q.atom_to_string(a) + " does not match arity " +
                       std::to_string(rel.arity()));
    inputs.push_back({&rel, a.args});
  }
  return inputs;
}

inline Row head_row(const ConjunctiveQuery& q, const std::vector<Value>& assignment) {
  Row out;
  out.reserve(q.head().size());
  for (auto v : q.head()) out.push_back(assignment[v]);
  return out;
}

/// ⟦Q⟧(D) as a sorted, duplicate-free list of head tuples.
struct AnswerSet {
  std::string relation = "Q";
  std::vector<Tuple> answers;

  std::size_t size() const { return answers.size(); }
  bool empty() const { return answers.empty(); }
  bool contains(const Tuple& t) const {
    return std::binary_search(answers.begin(), answers.end(), t);
  }
  friend bool operator==(const AnswerSet&, const AnswerSet&) = default;
};

inline AnswerSet make_answer_set(const ConjunctiveQuery& q,
                                 std::unordered_set<Row, RowHash> rows) {
  AnswerSet out{q.head_name(), {}};
  out.answers.reserve(rows.size());
  for (const auto& r : rows) out.answers.push_back(Tuple{q.head_name(), r});
  std::sort(out.answers.begin(), out.answers.end());
  return out;
}

/// Naive evaluation: backtracking over atoms (ascending cardinality) with
/// index probes.
inline AnswerSet enumerate_answers(const ConjunctiveQuery& q, const Database& d) {
  auto inputs = atom_inputs(q, d);
  std::unordered_set<Row, RowHash> rows;
  enumerate_homomorphisms(inputs, q.var_count(),
                          [&](const std::vector<Value>& a, const std::vector<std::uint32_t>&) {
                            rows.insert(head_row(q, a));
                            return true;
                          });
  return make_answer_set(q, std::move(rows));
}

/// Materializes the relation of a bag: the join of the projections onto the
/// bag of every atom that mentions a bag variable. Columns follow `bag`.
inline IndexedRows bag_relation(const ConjunctiveQuery& q, const Database& d,
                                const std::vector<VarId>& bag) {
  std::vector<IndexedRows> projected;
  std::vector<std::vector<VarId>> projected_vars;
  for (const auto& a : q.body()) {
    std::vector<std::size_t> keep_cols;
    std::vector<VarId> keep_vars;
    for (std::size_t c = 0; c < a.args.size(); ++c) {
      auto v = a.args[c];
      if (std::find(bag.begin(), bag.end(), v) == bag.end()) continue;
      if (std::find(keep_vars.begin(), keep_vars.end(), v) != keep_vars.end()) continue;
      keep_cols.push_back(c);
      keep_vars.push_back(v);
    }
    if (keep_vars.empty()) continue;
    const auto& rel = d.relation(a.relation);
    auto repeats = a.repeated_columns();
    std::vector<Row> rows;
    for (const auto& row : rel.rows()) {
      bool ok = std::all_of(repeats.begin(), repeats.end(), [&](const auto& group) {
        return std::all_of(group.begin(), group.end(),
                           [&](std::size_t c) { return row[c] == row[group.front()]; });
      });
      if (!ok) continue;
      Row p;
      for (auto c : keep_cols) p.push_back(row[c]);
      rows.push_back(std::move(p));
    }
    projected.emplace_back(keep_vars.size(), std::move(rows));
    projected_vars.push_back(std::move(keep_vars));
  }
  std::vector<JoinInput> inputs;
  for (std::size_t i = 0; i < projected.size(); ++i)
    inputs.push_back({&projected[i], projected_vars[i]});
  std::vector<Row> out;
  if (bag.empty()) {
    // the empty bag holds the single empty row
    return IndexedRows(0, {Row{}});
  }
  enumerate_homomorphisms(inputs, q.var_count(),
                          [&](const std::vector<Value>& a, const std::vector<std::uint32_t>&) {
                            Row r;
                            for (auto v : bag) r.push_back(a[v]);
                            out.push_back(std::move(r));
                            return true;
                          });
  return IndexedRows(bag.size(), std::move(out));
}

namespace detail {

inline std::vector<std::size_t> positions_of(const std::vector<VarId>& vars,
                                             const std::vector<VarId>& subset) {
  std::vector<std::size_t> out;
  for (auto v : subset)
    out.push_back(static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin()));
  return out;
}

inline Row project(const Row& row, const std::vector<std::size_t>& cols) {
  Row out;
  out.reserve(cols.size());
  for (auto c : cols) out.push_back(row[c]);
  return out;
}

// keep rows of `target` whose key projection occurs in `filter`
inline IndexedRows semijoin(const IndexedRows& target, const std::vector<VarId>& target_vars,
                            const IndexedRows& filter, const std::vector<VarId>& filter_vars,
                            const std::vector<VarId>& key) {
  auto tk = positions_of(target_vars, key);
  auto fk = positions_of(filter_vars, key);
  std::unordered_set<Row, RowHash> keys;
  for (const auto& r : filter.rows()) keys.insert(project(r, fk));
  std::vector<Row> kept;
  for (const auto& r : target.rows())
    if (keys.count(project(r, tk))) kept.push_back(r);
  return IndexedRows(target.arity(), std::move(kept));
}

}  // namespace detail

/// Yannakakis: full semijoin reduction over a width-1 decomposition, then a
/// join along the tree. Throws InputError if `td` is invalid or not width 1.
inline AnswerSet yannakakis_answers(const ConjunctiveQuery& q, const TreeDecomposition& td,
                                    const Database& d) {
  if (auto v = validate_tree_decomposition(q, td); !v)
    throw InputError("invalid tree decomposition: " + v.property + ": " + v.witness);
  if (!td.is_width_one(q))
    throw InputError("yannakakis_answers needs a width-1 decomposition (every bag inside one atom)");
  atom_inputs(q, d);  // relation/arity checks

  std::vector<IndexedRows> rel(td.size());
  for (std::size_t i = 0; i < td.size(); ++i)
    rel[i] = bag_relation(q, d, td.node(static_cast<int>(i)).bag);
  auto bag = [&](int i) -> const std::vector<VarId>& { return td.node(i).bag; };

  for (int u : td.post_order()) {
    int p = td.node(u).parent;
    if (p < 0) continue;
    rel[p] = detail::semijoin(rel[p], bag(p), rel[u], bag(u), td.key(u));
  }
  for (int u : td.pre_order()) {
    int p = td.node(u).parent;
    if (p < 0) continue;
    rel[u] = detail::semijoin(rel[u], bag(u), rel[p], bag(p), td.key(u));
  }
  std::vector<JoinInput> inputs;
  std::vector<std::size_t> order;
  auto pre = td.pre_order();
  for (std::size_t i = 0; i < td.size(); ++i) inputs.push_back({&rel[i], bag(static_cast<int>(i))});
  for (int u : pre) order.push_back(static_cast<std::size_t>(u));
  std::unordered_set<Row, RowHash> rows;
  enumerate_homomorphisms(
      inputs, q.var_count(),
      [&](const std::vector<Value>& a, const std::vector<std::uint32_t>&) {
        rows.insert(head_row(q, a));
        return true;
      },
      JoinOptions{order, {}, 0});
  return make_answer_set(q, std::move(rows));
}

/// β_{Q,D}: each answer mapped to the database facts used by some
/// homomorphism producing it (sorted TupleRefs into the database).
class ProvenanceMap {
 public:
  ProvenanceMap() = default;
  explicit ProvenanceMap(const Database* db) : db_(db) {}

  void set(Tuple answer, std::vector<TupleRef> refs) { map_[std::move(answer)] = std::move(refs); }

  bool contains(const Tuple& answer) const { return map_.count(answer) > 0; }

  const std::vector<TupleRef>& refs(const Tuple& answer) const {
    auto it = map_.find(answer);
    if (it == map_.end()) throw InputError("no provenance for " + to_string(answer));
    return it->second;
  }

  std::vector<Tuple> tuples(const Tuple& answer) const {
    std::vector<Tuple> out;
    for (auto r : refs(answer)) out.push_back(db_->tuple(r));
    std::sort(out.begin(), out.end());
    return out;
  }

  const Database& database() const { return *db_; }
  const std::map<Tuple, std::vector<TupleRef>>& entries() const { return map_; }
  std::size_t size() const { return map_.size(); }

 private:
  const Database* db_ = nullptr;
  std::map<Tuple, std::vector<TupleRef>> map_;
};

inline constexpr std::uint64_t kDefaultMaxExtensions = 10'000'000;

/// Exhaustive homomorphism enumeration per answer. Throws InputError for an
/// answer that is not in ⟦Q⟧(D), CapExceeded beyond `max_extensions`.
inline ProvenanceMap provenance_map(const ConjunctiveQuery& q, const Database& d,
                                    const std::vector<Tuple>& answers,
                                    std::uint64_t max_extensions = kDefaultMaxExtensions) {
  auto inputs = atom_inputs(q, d);
  std::vector<std::uint32_t> slots;
  for (const auto& a : q.body()) slots.push_back(d.slot(a.relation));
  ProvenanceMap out(&d);
  std::uint64_t budget = max_extensions;
  for (const auto& ans : answers) {
    if (ans.values.size() != q.head().size())
      throw InputError("answer " + to_string(ans) + " has the wrong arity");
    std::vector<Value> initial(q.var_count());
    bool consistent = true;
    for (std::size_t i = 0; i < q.head().size(); ++i) {
      auto v = q.head()[i];
      if (initial[v].valid() && initial[v] != ans.values[i]) consistent = false;
      initial[v] = ans.values[i];
    }
    std::set<TupleRef> refs;
    bool any = false;
    if (consistent) {
      std::uint64_t used = 0;
      JoinOptions opts{{}, initial, 0};
      opts.max_extensions = budget;
      enumerate_homomorphisms(
          inputs, q.var_count(),
          [&](const std::vector<Value>&, const std::vector<std::uint32_t>& rows) {
            any = true;
            ++used;
            for (std::size_t i = 0; i < rows.size(); ++i) refs.insert(TupleRef{slots[i], rows[i]});
            return true;
          },
          opts);
      budget = budget > used ? budget - used : 1;
    }
    if (!any) throw InputError(to_string(ans) + " is not an answer of the query");
    out.set(ans, {refs.begin(), refs.end()});
  }
  return out;
}

}  // namespace divcq
