#pragma once

// Test-side generators and brute-force oracles. Oracles deliberately avoid
// the library's join engine, regions and measures.

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "divcq/baselines.hpp"
#include "divcq/engine.hpp"
#include "divcq/optimize.hpp"
#include "divcq/query.hpp"
#include "divcq/relcore.hpp"
#include "divcq/volume.hpp"

namespace divcq {
inline void PrintTo(const Tuple& t, std::ostream* os) { *os << to_string(t); }
}  // namespace divcq

namespace testsupport {

using namespace divcq;
using Rng = std::mt19937_64;

inline std::string data_path(const std::string& rel) { return std::string(DIVCQ_DATA_DIR) + "/" + rel; }

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline Value val(const std::string& s) { return intern(s); }

inline Tuple tup(const std::string& rel, std::initializer_list<const char*> vs) {
  Tuple t{rel, {}};
  for (auto v : vs) t.values.push_back(intern(v));
  return t;
}

inline Database database_of(const std::vector<Tuple>& facts,
                            const std::map<std::string, std::size_t>& arities) {
  Schema schema;
  for (const auto& [r, a] : arities) schema.declare(r, a);
  Database::Builder b(schema);
  for (const auto& t : facts) b.add(t);
  return std::move(b).build();
}

/// Random relation contents over values d0..d{domain-1}.
inline Database random_database(Rng& rng, const std::map<std::string, std::size_t>& arities,
                                std::size_t domain, std::size_t max_tuples) {
  std::vector<Tuple> facts;
  for (const auto& [r, a] : arities) {
    std::size_t n = uniform(rng, 1, max_tuples);
    for (std::size_t i = 0; i < n; ++i) {
      Tuple t{r, {}};
      for (std::size_t c = 0; c < a; ++c) t.values.push_back(intern("d" + std::to_string(uniform(rng, 0, domain - 1))));
      facts.push_back(t);
    }
  }
  return database_of(facts, arities);
}

struct RandomQuery {
  ConjunctiveQuery q;
  std::map<std::string, std::size_t> arities;
};

/// Acyclic by construction: each new atom shares variables with a single
/// earlier atom. `self_joins` lets atoms reuse a relation of equal arity.
inline RandomQuery random_acyclic_query(Rng& rng, std::size_t max_atoms, bool full,
                                        bool self_joins, bool allow_repeats = true) {
  std::size_t m = uniform(rng, 1, max_atoms);
  std::vector<std::vector<std::string>> atoms;
  std::size_t fresh = 0;
  auto new_var = [&] { return "v" + std::to_string(fresh++); };
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::string> args;
    std::size_t arity = uniform(rng, 1, 3);
    std::vector<std::string> pool;
    if (i > 0) {
      const auto& parent = atoms[uniform(rng, 0, i - 1)];
      for (const auto& v : parent)
        if (coin(rng, 0.5) && std::find(pool.begin(), pool.end(), v) == pool.end()) pool.push_back(v);
    }
    for (std::size_t c = 0; c < arity; ++c) {
      if (!pool.empty() && coin(rng, 0.6))
        args.push_back(pool[uniform(rng, 0, pool.size() - 1)]);
      else if (!args.empty() && allow_repeats && coin(rng, 0.1))
        args.push_back(args[uniform(rng, 0, args.size() - 1)]);
      else
        args.push_back(new_var());
    }
    atoms.push_back(args);
  }
  std::set<std::string> vars;
  for (const auto& a : atoms) vars.insert(a.begin(), a.end());
  std::vector<std::string> head;
  for (const auto& v : vars)
    if (full || coin(rng, 0.6)) head.push_back(v);
  if (head.empty()) head.push_back(*vars.begin());
  std::shuffle(head.begin(), head.end(), rng);

  RandomQuery out;
  std::string text = "Q(";
  for (std::size_t i = 0; i < head.size(); ++i) text += (i ? "," : "") + head[i];
  text += ") <- ";
  std::map<std::size_t, std::vector<std::string>> by_arity;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    std::string rel;
    auto& existing = by_arity[atoms[i].size()];
    if (self_joins && !existing.empty() && coin(rng, 0.5))
      rel = existing[uniform(rng, 0, existing.size() - 1)];
    else {
      rel = "R" + std::to_string(i);
      existing.push_back(rel);
    }
    out.arities[rel] = atoms[i].size();
    text += (i ? ", " : "") + rel + "(";
    for (std::size_t c = 0; c < atoms[i].size(); ++c) text += (c ? "," : "") + atoms[i][c];
    text += ")";
  }
  text += ".";
  out.q = parse_cq(text);
  return out;
}

/// Every homomorphism by exhaustive assignment over the active domain.
inline void oracle_homomorphisms(const ConjunctiveQuery& q, const Database& d,
                                 const std::function<void(const std::vector<Value>&)>& visit) {
  std::set<Tuple> facts;
  std::set<Value> domain_set;
  for (const auto& t : d.tuples()) {
    facts.insert(t);
    domain_set.insert(t.values.begin(), t.values.end());
  }
  std::vector<Value> domain(domain_set.begin(), domain_set.end());
  std::vector<Value> a(q.var_count());
  std::function<void(std::size_t)> rec = [&](std::size_t v) {
    if (v == q.var_count()) {
      for (const auto& atom : q.body()) {
        Tuple t{atom.relation, {}};
        for (auto x : atom.args) t.values.push_back(a[x]);
        if (!facts.count(t)) return;
      }
      visit(a);
      return;
    }
    for (const auto& x : domain) {
      a[v] = x;
      rec(v + 1);
    }
  };
  if (!domain.empty()) rec(0);
}

inline std::vector<Tuple> oracle_answers(const ConjunctiveQuery& q, const Database& d) {
  std::set<Tuple> out;
  oracle_homomorphisms(q, d, [&](const std::vector<Value>& a) {
    Tuple t{q.head_name(), {}};
    for (auto x : q.head()) t.values.push_back(a[x]);
    out.insert(t);
  });
  return {out.begin(), out.end()};
}

inline std::map<Tuple, std::set<Tuple>> oracle_provenance(const ConjunctiveQuery& q,
                                                          const Database& d) {
  std::map<Tuple, std::set<Tuple>> out;
  oracle_homomorphisms(q, d, [&](const std::vector<Value>& a) {
    Tuple ans{q.head_name(), {}};
    for (auto x : q.head()) ans.values.push_back(a[x]);
    auto& s = out[ans];
    for (const auto& atom : q.body()) {
      Tuple t{atom.relation, {}};
      for (auto x : atom.args) t.values.push_back(a[x]);
      s.insert(t);
    }
  });
  return out;
}

/// δ over string-keyed points: each tuple contributes keys, measure sums
/// weights of distinct keys.
using KeyFn = std::function<std::vector<std::string>(const Tuple&)>;
using WeightFn = std::function<Rational(const std::string&)>;

inline Rational oracle_diversity(const std::vector<Tuple>& s, const KeyFn& keys, const WeightFn& w) {
  std::set<std::string> all;
  for (const auto& t : s)
    for (auto& k : keys(t)) all.insert(k);
  Rational total = 0;
  for (const auto& k : all) total += w(k);
  return total;
}

inline std::vector<std::string> elem_keys(const Tuple& t) {
  std::vector<std::string> out;
  for (const auto& v : t.values) out.push_back(v.text());
  return out;
}

inline std::vector<std::string> pos_keys(const Tuple& t) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < t.values.size(); ++i)
    out.push_back(t.values[i].text() + "@" + std::to_string(i + 1));
  return out;
}

inline Rational unit_weight(const std::string&) { return 1; }

/// Brute-force OPT over k-subsets using the string-keyed oracle.
inline Rational oracle_opt(const std::vector<Tuple>& items, std::size_t k, const KeyFn& keys,
                           const WeightFn& w) {
  k = std::min(k, items.size());
  Rational best = 0;
  std::vector<std::size_t> idx;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (idx.size() == k) {
      std::vector<Tuple> s;
      for (auto i : idx) s.push_back(items[i]);
      best = std::max(best, oracle_diversity(s, keys, w));
      return;
    }
    for (std::size_t i = from; i < items.size(); ++i) {
      idx.push_back(i);
      rec(i + 1);
      idx.pop_back();
    }
  };
  rec(0);
  return best;
}

/// Random tuples of one relation.
inline std::vector<Tuple> random_tuples(Rng& rng, std::size_t n, std::size_t arity,
                                        std::size_t domain, const std::string& rel = "R") {
  std::size_t space = 1;
  for (std::size_t c = 0; c < arity && space < n; ++c) space *= domain;
  n = std::min(n, space);
  std::set<Tuple> out;
  while (out.size() < n) {
    Tuple t{rel, {}};
    for (std::size_t c = 0; c < arity; ++c)
      t.values.push_back(intern("d" + std::to_string(uniform(rng, 0, domain - 1))));
    out.insert(t);
  }
  return {out.begin(), out.end()};
}

/// Random ultrametric tree with integer heights; leaves l0..l{n-1}.
inline UltrametricTree random_ultrametric_tree(Rng& rng, std::size_t leaves, long max_height = 8) {
  std::vector<UltrametricTree::Node> nodes;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < leaves; ++i) labels.push_back("l" + std::to_string(i));
  std::shuffle(labels.begin(), labels.end(), rng);
  std::function<int(std::vector<std::string>, long, int)> build =
      [&](std::vector<std::string> ls, long height, int parent) -> int {
    int id = static_cast<int>(nodes.size());
    nodes.push_back({parent, {}, 0, {}});
    if (ls.size() == 1) {
      nodes[id].label = ls[0];
      return id;
    }
    std::size_t groups = std::min<std::size_t>(ls.size(), uniform(rng, 2, 3));
    std::vector<std::vector<std::string>> parts(groups);
    for (std::size_t i = 0; i < ls.size(); ++i)
      parts[i < groups ? i : uniform(rng, 0, groups - 1)].push_back(ls[i]);
    for (auto& p : parts) {
      long h = p.size() > 1 && height > 0
                   ? static_cast<long>(uniform(rng, 0, static_cast<std::size_t>(height - 1)))
                   : 0;
      int c = build(p, h, id);
      nodes[c].edge_length = height - h;
      nodes[id].children.push_back(c);
    }
    return id;
  };
  build(labels, std::max<long>(max_height, static_cast<long>(leaves)), -1);
  return UltrametricTree(std::move(nodes));
}

/// Random metric: L1 distances of random integer points.
inline std::vector<std::vector<Rational>> random_metric(Rng& rng, std::size_t n) {
  std::vector<std::array<long, 3>> pts(n);
  for (auto& p : pts)
    for (auto& c : p) c = static_cast<long>(uniform(rng, 0, 6));
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      long s = 0;
      for (int c = 0; c < 3; ++c) s += std::abs(pts[i][c] - pts[j][c]);
      d[i][j] = s;
    }
  return d;
}

/// Random sparse λ over universe x0..x{n-1}.
inline MultiAttributeWeights random_maw(Rng& rng, std::size_t n) {
  MultiAttributeWeights maw;
  for (std::size_t i = 0; i < n; ++i) maw.universe.push_back("x" + std::to_string(i));
  std::size_t entries = uniform(rng, 0, 2 * n);
  for (std::size_t e = 0; e < entries; ++e) {
    std::uint64_t a = uniform(rng, 1, (std::size_t{1} << n) - 1);
    maw.lambda[a] = Rational(static_cast<long long>(uniform(rng, 1, 9)), static_cast<long long>(uniform(rng, 1, 4)));
  }
  return maw;
}

/// v_λ(S) by direct definition over label sets.
inline Rational v_lambda_oracle(const MultiAttributeWeights& maw, std::uint64_t s) {
  Rational total = 0;
  for (const auto& [a, l] : maw.lambda) {
    bool meets = false;
    for (std::size_t i = 0; i < maw.universe.size(); ++i)
      if ((a >> i & 1) && (s >> i & 1)) meets = true;
    if (meets) total += l;
  }
  return total;
}

inline std::vector<Tuple> subset_tuples(const std::string& rel, const std::vector<std::string>& labels,
                                 std::uint64_t s) {
  std::vector<Tuple> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (s >> i & 1) out.push_back(element_tuple(rel, labels[i]));
  return out;
}

/// V_pos, optionally with random rational weights over d0..d4 at positions 1..8.
inline std::unique_ptr<PosVolume> random_pos_volume(Rng& rng, bool weighted) {
  if (!weighted) return std::make_unique<PosVolume>();
  std::unordered_map<GroundPoint, Rational, GroundPointHash> w;
  for (int v = 0; v < 5; ++v)
    for (std::size_t p = 1; p <= 8; ++p)
      w[GroundPoint::of_position(val("d" + std::to_string(v)), p)] =
          Rational(static_cast<long long>(uniform(rng, 0, 6)), static_cast<long long>(uniform(rng, 1, 3)));
  return std::make_unique<PosVolume>(Measure::weighted(w));
}

}  // namespace testsupport
