#pragma once

// Conjunctive queries: AST, parser/printer, structural flags, GYO join trees,
// tree-decomposition validation and free-connex subtrees.

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "relcore.hpp"

namespace divcq {

using VarId = std::uint32_t;

/// Syntax error with the byte offset and line/column of the offending input.
class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, std::size_t offset, std::size_t line, std::size_t column)
      : InputError("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
                   " (offset " + std::to_string(offset) + "): " + msg),
        offset_(offset),
        line_(line),
        column_(column) {}
  std::size_t offset() const { return offset_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t offset_, line_, column_;
};

/// R(x1..xk) as written. `args` may repeat a variable; `var_set()` is the
/// normalized variable list and `repeated_columns()` the equality record the
/// join engine enforces for repeats.
struct Atom {
  std::string relation;
  std::vector<VarId> args;

  std::vector<VarId> var_set() const {
    std::vector<VarId> out;
    for (auto v : args)
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
  }

  /// Groups of column positions that carry the same variable (size >= 2 only).
  std::vector<std::vector<std::size_t>> repeated_columns() const {
    std::map<VarId, std::vector<std::size_t>> by_var;
    for (std::size_t c = 0; c < args.size(); ++c) by_var[args[c]].push_back(c);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [v, cols] : by_var)
      if (cols.size() > 1) out.push_back(cols);
    return out;
  }

  friend bool operator==(const Atom&, const Atom&) = default;
};

class ConjunctiveQuery {
 public:
  ConjunctiveQuery() = default;

  ConjunctiveQuery(std::string head_name, std::vector<std::string> var_names,
                   std::vector<VarId> head, std::vector<Atom> body)
      : head_name_(std::move(head_name)),
        var_names_(std::move(var_names)),
        head_(std::move(head)),
        body_(std::move(body)) {
    std::vector<bool> in_body(var_names_.size(), false);
    for (const auto& a : body_)
      for (auto v : a.args) in_body.at(v) = true;
    for (auto v : head_)
      if (!in_body.at(v))
        throw InputError("head variable " + var_names_[v] + " does not occur in the body");
    std::vector<bool> in_head(var_names_.size(), false);
    for (auto v : head_) in_head[v] = true;
    full_ = true;
    for (std::size_t v = 0; v < var_names_.size(); ++v)
      if (in_body[v] && !in_head[v]) full_ = false;
    std::set<std::string> names;
    self_join_free_ = true;
    for (const auto& a : body_)
      if (!names.insert(a.relation).second) self_join_free_ = false;
  }

  const std::string& head_name() const { return head_name_; }
  const std::vector<VarId>& head() const { return head_; }
  const std::vector<Atom>& body() const { return body_; }
  std::size_t var_count() const { return var_names_.size(); }
  const std::string& var_name(VarId v) const { return var_names_.at(v); }
  const std::vector<std::string>& var_names() const { return var_names_; }

  std::optional<VarId> find_var(std::string_view name) const {
    for (VarId v = 0; v < var_names_.size(); ++v)
      if (var_names_[v] == name) return v;
    return std::nullopt;
  }

  bool is_full() const { return full_; }
  bool is_self_join_free() const { return self_join_free_; }

  /// Distinct head variables in first-occurrence order.
  std::vector<VarId> head_var_set() const {
    std::vector<VarId> out;
    for (auto v : head_)
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
  }

  bool in_head(VarId v) const { return std::find(head_.begin(), head_.end(), v) != head_.end(); }

  std::string atom_to_string(const Atom& a) const {
    std::string out = a.relation + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) out += ",";
      out += var_names_[a.args[i]];
    }
    return out + ")";
  }

  std::string to_string() const {
    std::string out = head_name_ + "(";
    for (std::size_t i = 0; i < head_.size(); ++i) {
      if (i) out += ",";
      out += var_names_[head_[i]];
    }
    out += ") <- ";
    for (std::size_t i = 0; i < body_.size(); ++i) {
      if (i) out += ", ";
      out += atom_to_string(body_[i]);
    }
    return out + ".";
  }

  friend bool operator==(const ConjunctiveQuery& a, const ConjunctiveQuery& b) {
    return a.head_name_ == b.head_name_ && a.var_names_ == b.var_names_ && a.head_ == b.head_ &&
           a.body_ == b.body_;
  }

 private:
  std::string head_name_ = "Q";
  std::vector<std::string> var_names_;
  std::vector<VarId> head_;
  std::vector<Atom> body_;
  bool full_ = true;
  bool self_join_free_ = true;
};

namespace detail {

class CqParser {
 public:
  explicit CqParser(std::string_view text) : s_(text) {}

  ConjunctiveQuery parse(const Schema* schema) {
    skip_ws();
    std::string head_name = identifier("head relation name");
    auto head_args = arg_list();
    skip_ws();
    if (s_.substr(pos_, 2) == "<-" || s_.substr(pos_, 2) == ":-") {
      pos_ += 2;
    } else {
      fail("expected '<-'");
    }
    std::vector<std::pair<std::string, std::vector<std::string>>> atoms;
    std::vector<std::size_t> atom_pos;
    while (true) {
      skip_ws();
      atom_pos.push_back(pos_);
      std::string rel = identifier("relation name");
      auto args = arg_list();
      if (args.empty()) fail("atom " + rel + " needs at least one variable");
      atoms.emplace_back(std::move(rel), std::move(args));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == '.') {
        ++pos_;
        break;
      }
      fail("expected ',' or '.'");
    }
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");

    std::vector<std::string> names;
    auto id_of = [&](const std::string& n) -> VarId {
      for (VarId v = 0; v < names.size(); ++v)
        if (names[v] == n) return v;
      names.push_back(n);
      return static_cast<VarId>(names.size() - 1);
    };
    std::vector<VarId> head;
    for (auto& n : head_args) head.push_back(id_of(n));
    std::vector<Atom> body;
    std::map<std::string, std::size_t> arity_seen;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      auto& [rel, args] = atoms[i];
      if (schema) {
        if (!schema->contains(rel)) fail_at("unknown relation " + rel, atom_pos[i]);
        if (schema->arity(rel) != args.size())
          fail_at("relation " + rel + " has arity " + std::to_string(schema->arity(rel)) +
                      ", atom uses " + std::to_string(args.size()),
                  atom_pos[i]);
      }
      auto [it, inserted] = arity_seen.emplace(rel, args.size());
      if (!inserted && it->second != args.size())
        fail_at("relation " + rel + " used with inconsistent arities", atom_pos[i]);
      Atom a{rel, {}};
      for (auto& n : args) a.args.push_back(id_of(n));
      body.push_back(std::move(a));
    }
    return ConjunctiveQuery(std::move(head_name), std::move(names), std::move(head),
                            std::move(body));
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '%') {  // line comment
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  std::string identifier(const char* what) {
    skip_ws();
    char c = peek();
    if (c == '"' || c == '\'' || std::isdigit(static_cast<unsigned char>(c)) || c == '-' ||
        c == '+')
      fail("constants are not supported in queries; expected " + std::string(what));
    std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    if (start == pos_) fail("expected " + std::string(what));
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> arg_list() {
    skip_ws();
    if (peek() != '(') fail("expected '('");
    ++pos_;
    std::vector<std::string> out;
    skip_ws();
    if (peek() == ')') {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(identifier("variable"));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ')') {
        ++pos_;
        return out;
      }
      fail("expected ',' or ')'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) { fail_at(msg, pos_); }

  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, at, line, col);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `Q(x,y) <- R(x,z), S(z,y).` (`:-` is accepted too; `%` starts a
/// comment). With a schema, relation names and arities are checked.
inline ConjunctiveQuery parse_cq(std::string_view text, const Schema* schema = nullptr) {
  return detail::CqParser(text).parse(schema);
}

// ---------------------------------------------------------------------------
// Tree decompositions

struct TdNode {
  std::vector<VarId> bag;  // sorted
  int parent = -1;
  std::vector<int> children;
  std::vector<std::size_t> covering_atoms;  // atoms whose variables lie inside the bag
};

class TreeDecomposition {
 public:
  TreeDecomposition() = default;

  /// `parents[i]` is -1 for the root. Bags are sorted/deduplicated and
  /// covering atoms recomputed against `q`.
  TreeDecomposition(const ConjunctiveQuery& q, std::vector<std::vector<VarId>> bags,
                    const std::vector<int>& parents, Rational declared_width = 1) {
    if (bags.size() != parents.size() || bags.empty())
      throw InputError("tree decomposition needs one parent entry per node and at least one node");
    width_ = std::move(declared_width);
    nodes_.resize(bags.size());
    for (std::size_t i = 0; i < bags.size(); ++i) {
      auto& b = bags[i];
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
      for (auto v : b)
        if (v >= q.var_count()) throw InputError("bag references an unknown variable");
      nodes_[i].bag = b;
      nodes_[i].parent = parents[i];
    }
    root_ = -1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      int p = nodes_[i].parent;
      if (p == -1) {
        if (root_ != -1) throw InputError("tree decomposition has more than one root");
        root_ = static_cast<int>(i);
      } else {
        if (p < 0 || static_cast<std::size_t>(p) >= nodes_.size() || p == static_cast<int>(i))
          throw InputError("tree decomposition node has an invalid parent");
        nodes_[p].children.push_back(static_cast<int>(i));
      }
    }
    if (root_ == -1) throw InputError("tree decomposition has no root");
    if (pre_order().size() != nodes_.size())
      throw InputError("tree decomposition parent links do not form a tree");
    for (auto& n : nodes_) {
      for (std::size_t a = 0; a < q.body().size(); ++a) {
        auto vs = q.body()[a].var_set();
        if (std::all_of(vs.begin(), vs.end(), [&](VarId v) {
              return std::binary_search(n.bag.begin(), n.bag.end(), v);
            }))
          n.covering_atoms.push_back(a);
      }
    }
  }

  std::size_t size() const { return nodes_.size(); }
  int root() const { return root_; }
  const TdNode& node(int i) const { return nodes_.at(i); }
  const std::vector<TdNode>& nodes() const { return nodes_; }
  const Rational& declared_width() const { return width_; }

  bool bag_contains(int i, VarId v) const {
    const auto& b = nodes_[i].bag;
    return std::binary_search(b.begin(), b.end(), v);
  }

  /// bag(node) ∩ bag(parent); empty at the root.
  std::vector<VarId> key(int i) const {
    const auto& n = nodes_.at(i);
    if (n.parent < 0) return {};
    const auto& pb = nodes_[n.parent].bag;
    std::vector<VarId> out;
    std::set_intersection(n.bag.begin(), n.bag.end(), pb.begin(), pb.end(),
                          std::back_inserter(out));
    return out;
  }

  /// Union of the bags below (and including) node i.
  std::vector<VarId> subtree_vars(int i) const {
    std::set<VarId> acc;
    std::vector<int> stack{i};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      acc.insert(nodes_[u].bag.begin(), nodes_[u].bag.end());
      for (int c : nodes_[u].children) stack.push_back(c);
    }
    return {acc.begin(), acc.end()};
  }

  std::vector<int> pre_order() const {
    std::vector<int> out;
    std::vector<int> stack{root_};
    std::vector<bool> seen(nodes_.size(), false);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      if (seen[u]) continue;
      seen[u] = true;
      out.push_back(u);
      for (auto it = nodes_[u].children.rbegin(); it != nodes_[u].children.rend(); ++it)
        stack.push_back(*it);
    }
    return out;
  }

  std::vector<int> post_order() const {
    auto pre = pre_order();
    // children before parents: reverse pre-order works for a rooted tree
    return {pre.rbegin(), pre.rend()};
  }

  /// Every bag lies inside the variable set of a single atom.
  bool is_width_one(const ConjunctiveQuery& q) const {
    for (const auto& n : nodes_) {
      bool ok = false;
      for (const auto& a : q.body()) {
        auto vs = a.var_set();
        std::sort(vs.begin(), vs.end());
        if (std::includes(vs.begin(), vs.end(), n.bag.begin(), n.bag.end())) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  }

 private:
  std::vector<TdNode> nodes_;
  int root_ = -1;
  Rational width_ = 1;
};

/// GYO ear removal with atoms as hyperedges. On success node i corresponds to
/// body atom i and its bag is that atom's variable set. nullopt means the query
/// is cyclic.
inline std::optional<TreeDecomposition> gyo_join_tree(const ConjunctiveQuery& q) {
  const std::size_t m = q.body().size();
  if (m == 0) return std::nullopt;
  std::vector<std::vector<VarId>> vars(m);
  for (std::size_t i = 0; i < m; ++i) {
    vars[i] = q.body()[i].var_set();
    std::sort(vars[i].begin(), vars[i].end());
  }
  std::vector<bool> alive(m, true);
  std::vector<int> parent(m, -1);
  std::size_t remaining = m;
  while (remaining > 1) {
    bool removed = false;
    for (std::size_t e = 0; e < m && !removed; ++e) {
      if (!alive[e]) continue;
      // variables of e that some other live atom also mentions
      std::vector<VarId> shared;
      for (auto v : vars[e]) {
        for (std::size_t f = 0; f < m; ++f) {
          if (f == e || !alive[f]) continue;
          if (std::binary_search(vars[f].begin(), vars[f].end(), v)) {
            shared.push_back(v);
            break;
          }
        }
      }
      for (std::size_t f = 0; f < m; ++f) {
        if (f == e || !alive[f]) continue;
        if (std::includes(vars[f].begin(), vars[f].end(), shared.begin(), shared.end())) {
          parent[e] = static_cast<int>(f);
          alive[e] = false;
          --remaining;
          removed = true;
          break;
        }
      }
    }
    if (!removed) return std::nullopt;
  }
  return TreeDecomposition(q, vars, parent, 1);
}

struct TdValidation {
  bool ok = true;
  std::string property;  // "connectedness" or "coverage"
  std::string witness;

  explicit operator bool() const { return ok; }
};

/// Checks the running-intersection (connectedness) and atom-coverage
/// properties; reports the first violation.
inline TdValidation validate_tree_decomposition(const ConjunctiveQuery& q,
                                                const TreeDecomposition& td) {
  for (VarId v = 0; v < q.var_count(); ++v) {
    std::size_t count = 0, edges = 0;
    std::vector<int> holders;
    for (std::size_t i = 0; i < td.size(); ++i) {
      if (!td.bag_contains(static_cast<int>(i), v)) continue;
      ++count;
      holders.push_back(static_cast<int>(i));
      int p = td.node(static_cast<int>(i)).parent;
      if (p >= 0 && td.bag_contains(p, v)) ++edges;
    }
    if (count > 0 && edges != count - 1) {
      std::string nodes;
      for (auto h : holders) nodes += (nodes.empty() ? "" : ",") + std::to_string(h);
      return {false, "connectedness",
              "variable " + q.var_name(v) + " occurs in disconnected nodes {" + nodes + "}"};
    }
  }
  for (std::size_t a = 0; a < q.body().size(); ++a) {
    bool covered = false;
    for (const auto& n : td.nodes())
      if (std::find(n.covering_atoms.begin(), n.covering_atoms.end(), a) !=
          n.covering_atoms.end())
        covered = true;
    if (!covered)
      return {false, "coverage",
              "atom " + std::to_string(a) + " " + q.atom_to_string(q.body()[a]) +
                  " is not contained in any bag"};
  }
  return {};
}

/// A decomposition rooted inside a connected subtree whose bags are exactly
/// the head variables.
struct FreeConnexDecomposition {
  TreeDecomposition td;
  std::vector<bool> in_head_subtree;  // per node of td
};

/// Finds a connected node set C whose internal edges only share head
/// variables and whose head parts cover the head; nodes of C carrying
/// non-head variables get a head-only parent bag inserted. Returns nullopt
/// (NotFreeConnex) if no such set exists or a head-only atom cannot be covered
/// inside the head subtree.
inline std::optional<FreeConnexDecomposition> free_connex_subtree(const ConjunctiveQuery& q,
                                                                  const TreeDecomposition& td) {
  std::vector<bool> head(q.var_count(), false);
  for (auto v : q.head()) head[v] = true;
  auto head_part = [&](const std::vector<VarId>& bag) {
    std::vector<VarId> out;
    for (auto v : bag)
      if (head[v]) out.push_back(v);
    return out;
  };
  const int n = static_cast<int>(td.size());
  // union-find over edges whose key is head-only
  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
  for (int u = 0; u < n; ++u) {
    if (td.node(u).parent < 0) continue;
    auto key = td.key(u);
    if (std::all_of(key.begin(), key.end(), [&](VarId v) { return head[v]; }))
      comp[find(u)] = find(td.node(u).parent);
  }
  auto head_vars = q.head_var_set();
  std::sort(head_vars.begin(), head_vars.end());

  // candidate components, root's component first, then by smallest member
  std::vector<int> order;
  for (int u : td.pre_order())
    if (std::find(order.begin(), order.end(), find(u)) == order.end()) order.push_back(find(u));

  for (int c : order) {
    std::set<VarId> covered;
    for (int u = 0; u < n; ++u)
      if (find(u) == c) {
        auto hp = head_part(td.node(u).bag);
        covered.insert(hp.begin(), hp.end());
      }
    if (!std::equal(covered.begin(), covered.end(), head_vars.begin(), head_vars.end()) ||
        covered.size() != head_vars.size())
      continue;
    // head-only atoms must be covered by a node of C
    bool atoms_ok = true;
    for (std::size_t a = 0; a < q.body().size() && atoms_ok; ++a) {
      auto vs = q.body()[a].var_set();
      if (!std::all_of(vs.begin(), vs.end(), [&](VarId v) { return head[v]; })) continue;
      bool found = false;
      for (int u = 0; u < n && !found; ++u) {
        if (find(u) != c) continue;
        const auto& cov = td.node(u).covering_atoms;
        found = std::find(cov.begin(), cov.end(), a) != cov.end();
      }
      atoms_ok = found;
    }
    if (!atoms_ok) continue;

    // build the rewritten tree: original nodes keep their index, skeleton
    // bags for impure members of C are appended
    std::vector<std::vector<VarId>> bags;
    for (int u = 0; u < n; ++u) bags.push_back(td.node(u).bag);
    std::vector<int> skeleton(n, -1);
    for (int u = 0; u < n; ++u) {
      if (find(u) != c) continue;
      auto hp = head_part(td.node(u).bag);
      if (hp.size() == td.node(u).bag.size()) {
        skeleton[u] = u;
      } else {
        skeleton[u] = static_cast<int>(bags.size());
        bags.push_back(hp);
      }
    }
    const int total = static_cast<int>(bags.size());
    std::vector<std::vector<int>> adj(total);
    auto link = [&](int a, int b) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    };
    for (int u = 0; u < n; ++u) {
      if (skeleton[u] >= 0 && skeleton[u] != u) link(skeleton[u], u);
      int p = td.node(u).parent;
      if (p < 0) continue;
      bool uc = find(u) == c, pc = find(p) == c;
      if (uc && pc)
        link(skeleton[u], skeleton[p]);
      else
        link(u, p);  // edge leaves C: attach to the full-bag node
    }
    int new_root = -1;
    for (int u : td.pre_order())
      if (find(u) == c) {
        new_root = skeleton[u];
        break;
      }
    std::vector<int> parents(total, -2);
    parents[new_root] = -1;
    std::vector<int> queue{new_root};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int u = queue[i];
      std::sort(adj[u].begin(), adj[u].end());
      for (int w : adj[u]) {
        if (parents[w] != -2) continue;
        parents[w] = u;
        queue.push_back(w);
      }
    }
    FreeConnexDecomposition out{TreeDecomposition(q, bags, parents, td.declared_width()),
                                std::vector<bool>(total, false)};
    for (int u = 0; u < n; ++u)
      if (skeleton[u] >= 0) out.in_head_subtree[skeleton[u]] = true;
    return out;
  }
  return std::nullopt;
}

/// Reads `{"nodes":[{"id":..,"bag":[..],"parent":..|null}]}`. Variable names
/// are resolved against `q`.
inline TreeDecomposition tree_decomposition_from_json(const ConjunctiveQuery& q,
                                                      const nlohmann::json& doc,
                                                      Rational declared_width = 1) {
  if (!doc.contains("nodes") || !doc["nodes"].is_array())
    throw InputError("tree decomposition JSON needs a 'nodes' array");
  std::map<std::string, int> index;
  const auto& nodes = doc["nodes"];
  auto id_string = [](const nlohmann::json& j) {
    return j.is_string() ? j.get<std::string>() : j.dump();
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].contains("id")) throw InputError("tree decomposition node without 'id'");
    if (!index.emplace(id_string(nodes[i]["id"]), static_cast<int>(i)).second)
      throw InputError("duplicate tree decomposition node id " + id_string(nodes[i]["id"]));
  }
  std::vector<std::vector<VarId>> bags;
  std::vector<int> parents;
  for (const auto& node : nodes) {
    std::vector<VarId> bag;
    for (const auto& name : node.value("bag", nlohmann::json::array())) {
      auto v = q.find_var(name.get<std::string>());
      if (!v) throw InputError("bag mentions variable " + name.get<std::string>() +
                               " which is not in the query");
      bag.push_back(*v);
    }
    bags.push_back(std::move(bag));
    if (!node.contains("parent") || node["parent"].is_null() ||
        (node["parent"].is_number() && node["parent"].get<long long>() < 0)) {
      parents.push_back(-1);
    } else {
      auto it = index.find(id_string(node["parent"]));
      if (it == index.end())
        throw InputError("unknown parent id " + id_string(node["parent"]));
      parents.push_back(it->second);
    }
  }
  return TreeDecomposition(q, std::move(bags), parents, std::move(declared_width));
}

inline nlohmann::json tree_decomposition_to_json(const ConjunctiveQuery& q,
                                                 const TreeDecomposition& td) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < td.size(); ++i) {
    nlohmann::json bag = nlohmann::json::array();
    for (auto v : td.node(static_cast<int>(i)).bag) bag.push_back(q.var_name(v));
    int p = td.node(static_cast<int>(i)).parent;
    nodes.push_back({{"id", i},
                     {"bag", bag},
                     {"parent", p < 0 ? nlohmann::json(nullptr) : nlohmann::json(p)}});
  }
  return {{"nodes", nodes}};
}

}  // namespace divcq
