#pragma once

// Distance-based diversity (sum, min, Hamming), Weitzman diversity and
// ultrametric trees.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "json.hpp"
#include "relcore.hpp"
#include "volume.hpp"

namespace divcq {

/// Number of differing positions of two same-relation, same-arity tuples.
inline std::size_t hamming(const Tuple& a, const Tuple& b) {
  if (a.relation != b.relation || a.values.size() != b.values.size())
    throw InputError("hamming distance needs tuples of one relation and arity: " + to_string(a) +
                     " vs " + to_string(b));
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) n += a.values[i] != b.values[i];
  return n;
}

/// Σ over ordered pairs (a,b) of S of d(a,b); 0 when |S| ≤ 1.
template <class T, class Dist>
Rational delta_sum(const std::vector<T>& s, Dist d) {
  Rational total = 0;
  if (s.size() <= 1) return total;
  for (const auto& a : s)
    for (const auto& b : s) total += Rational(d(a, b));
  return total;
}

/// Minimum over pairs of distinct members; 0 when |S| ≤ 1.
template <class T, class Dist>
Rational delta_min(const std::vector<T>& s, Dist d) {
  std::optional<Rational> best;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      Rational v(d(s[i], s[j]));
      if (!best || v < *best) best = v;
    }
  return best.value_or(Rational(0));
}

/// Symmetric distance matrix over named elements.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<std::string> labels, std::vector<std::vector<Rational>> d)
      : labels_(std::move(labels)), d_(std::move(d)) {
    const auto n = labels_.size();
    if (d_.size() != n) throw InputError("distance matrix is not square");
    for (std::size_t i = 0; i < n; ++i) {
      if (d_[i].size() != n) throw InputError("distance matrix is not square");
      if (!index_.emplace(labels_[i], i).second)
        throw InputError("duplicate element '" + labels_[i] + "' in distance matrix");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (d_[i][i] != 0) throw InputError("distance of '" + labels_[i] + "' to itself is not 0");
      for (std::size_t j = 0; j < n; ++j) {
        if (d_[i][j] < 0) throw InputError("negative distance in matrix");
        if (d_[i][j] != d_[j][i])
          throw InputError("distance matrix is not symmetric at (" + labels_[i] + "," +
                           labels_[j] + ")");
      }
    }
  }

  /// Header row of names; data rows hold n numbers, optionally preceded by
  /// the row's name (which must match the header order).
  static DistanceMatrix parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> lines;
    std::size_t start = 0;
    while (start < text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string line(text.substr(start, end - start));
      start = end + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      lines.push_back(split_csv_line(line));
    }
    if (lines.empty()) throw InputError("distance matrix file is empty");
    auto header = lines.front();
    if (!header.empty() && header.front().empty()) header.erase(header.begin());
    const auto n = header.size();
    if (lines.size() != n + 1)
      throw InputError("distance matrix has " + std::to_string(lines.size() - 1) + " rows for " +
                       std::to_string(n) + " elements");
    std::vector<std::vector<Rational>> d;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = lines[i + 1];
      if (row.size() == n + 1) {
        if (row.front() != header[i])
          throw InputError("row " + std::to_string(i + 2) + " is labelled '" + row.front() +
                           "', expected '" + header[i] + "'");
        row.erase(row.begin());
      }
      if (row.size() != n)
        throw InputError("row " + std::to_string(i + 2) + " has " + std::to_string(row.size()) +
                         " entries, expected " + std::to_string(n));
      std::vector<Rational> r;
      for (const auto& f : row) {
        auto q = parse_exact_number(f);
        if (!q) throw InputError("'" + f + "' is not a number");
        r.push_back(*q);
      }
      d.push_back(std::move(r));
    }
    return DistanceMatrix(std::move(header), std::move(d));
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t index(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw InputError("'" + label + "' is not in the distance matrix");
    return it->second;
  }
  const Rational& operator()(std::size_t i, std::size_t j) const { return d_[i][j]; }
  const Rational& operator()(const std::string& a, const std::string& b) const {
    return d_[index(a)][index(b)];
  }

  /// Tuples are matched by their value for unary tuples, else by full text.
  std::string label_of(const Tuple& t) const {
    if (t.values.size() == 1 && index_.count(t.values[0].text())) return t.values[0].text();
    return to_string(t);
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<Rational>> d_;
  std::map<std::string, std::size_t> index_;
};

inline constexpr std::size_t kDefaultWeitzmanCap = 15;

/// δ_W over elements 0..n-1: δ_W({a}) = 0 and
/// δ_W(S) = max_a δ_W(S∖{a}) + min_{b ∈ S∖{a}} d(a,b), memoized on subsets.
inline Rational weitzman(std::size_t n, const std::function<Rational(std::size_t, std::size_t)>& d,
                         std::size_t cap = kDefaultWeitzmanCap) {
  if (n > cap)
    throw CapExceeded("Weitzman diversity is intractable in general; " + std::to_string(n) +
                      " elements exceed the cap of " + std::to_string(cap));
  if (n <= 1) return 0;
  std::vector<std::vector<Rational>> dist(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist[i][j] = i == j ? Rational(0) : d(i, j);
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<Rational> memo(std::size_t{full} + 1);
  // subsets in increasing numeric order visit every proper subset first
  for (std::uint32_t s = 1; s <= full; ++s) {
    if ((s & (s - 1)) == 0) continue;  // singleton
    std::optional<Rational> best;
    for (std::size_t a = 0; a < n; ++a) {
      if (!(s >> a & 1)) continue;
      std::uint32_t rest = s & ~(std::uint32_t{1} << a);
      std::optional<Rational> near;
      for (std::size_t b = 0; b < n; ++b)
        if ((rest >> b & 1) && (!near || dist[a][b] < *near)) near = dist[a][b];
      Rational v = memo[rest] + *near;
      if (!best || v > *best) best = v;
    }
    memo[s] = *best;
  }
  return memo[full];
}

template <class T, class Dist>
Rational weitzman(const std::vector<T>& s, Dist d, std::size_t cap = kDefaultWeitzmanCap) {
  return weitzman(
      s.size(), [&](std::size_t i, std::size_t j) { return Rational(d(s[i], s[j])); }, cap);
}

// ---------------------------------------------------------------------------
// Ultrametric trees

/// Rooted tree with edge lengths whose leaves are labelled. The distance of
/// two leaves is the length of the path from either leaf up to their lowest
/// common ancestor; every root-to-leaf path has length r.
class UltrametricTree {
 public:
  struct Node {
    int parent = -1;
    std::vector<int> children;
    Rational edge_length = 0;  // edge to the parent
    std::string label;         // leaves only
  };

  UltrametricTree() = default;
  explicit UltrametricTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) { finish(); }

  /// {"children": [...], "edge_length": x, "label": "a"}; leaves have a
  /// label and no children. Lengths are numbers or "p/q" strings.
  static UltrametricTree from_json(const nlohmann::json& j) {
    std::vector<Node> nodes;
    std::function<int(const nlohmann::json&, int)> build = [&](const nlohmann::json& n, int parent) {
      if (!n.is_object()) throw InputError("ultrametric tree node must be an object");
      int id = static_cast<int>(nodes.size());
      nodes.push_back(Node{parent, {}, 0, {}});
      if (n.contains("edge_length") && parent >= 0) {
        const auto& e = n["edge_length"];
        std::optional<Rational> len;
        if (e.is_string()) len = parse_exact_number(e.get<std::string>());
        else if (e.is_number()) len = parse_exact_number(e.dump());
        if (!len) throw InputError("edge_length " + e.dump() + " is not a number");
        nodes[id].edge_length = *len;
      }
      if (n.contains("label")) nodes[id].label = n["label"].get<std::string>();
      if (n.contains("children")) {
        for (const auto& c : n["children"]) {
          int cid = build(c, id);
          nodes[id].children.push_back(cid);
        }
      }
      return id;
    };
    build(j, -1);
    return UltrametricTree(std::move(nodes));
  }

  nlohmann::json to_json(int node = 0) const {
    nlohmann::json j = nlohmann::json::object();
    const auto& n = nodes_[node];
    if (node != root()) j["edge_length"] = to_string(n.edge_length);
    if (n.children.empty()) j["label"] = n.label;
    else {
      j["children"] = nlohmann::json::array();
      for (int c : n.children) j["children"].push_back(to_json(c));
    }
    return j;
  }

  int root() const { return 0; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int i) const { return nodes_.at(i); }
  const Rational& radius() const { return radius_; }
  const std::vector<int>& leaves() const { return leaves_; }
  std::vector<std::string> leaf_labels() const {
    std::vector<std::string> out;
    for (int l : leaves_) out.push_back(nodes_[l].label);
    return out;
  }
  int leaf(const std::string& label) const {
    auto it = leaf_index_.find(label);
    if (it == leaf_index_.end()) throw InputError("'" + label + "' is not a leaf of the tree");
    return it->second;
  }

  /// Path length from leaf a up to the lowest common ancestor with b.
  Rational distance(int a, int b) const {
    if (a == b) return 0;
    std::vector<bool> anc(nodes_.size(), false);
    for (int u = b; u >= 0; u = nodes_[u].parent) anc[u] = true;
    Rational len = 0;
    for (int u = a; !anc[u]; u = nodes_[u].parent) len += nodes_[u].edge_length;
    return len;
  }
  Rational distance(const std::string& a, const std::string& b) const {
    return distance(leaf(a), leaf(b));
  }

  /// Edges (identified by their child node) on the path from the root to u.
  std::vector<int> root_path_edges(int u) const {
    std::vector<int> out;
    for (; u != root(); u = nodes_[u].parent) out.push_back(u);
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  void finish() {
    if (nodes_.empty()) throw InputError("ultrametric tree is empty");
    std::optional<Rational> r;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      auto& n = nodes_[i];
      if (n.edge_length < 0) throw InputError("negative edge length in ultrametric tree");
      if (!n.children.empty()) continue;
      if (n.label.empty()) throw InputError("ultrametric tree leaf without a label");
      if (!leaf_index_.emplace(n.label, static_cast<int>(i)).second)
        throw InputError("duplicate leaf label '" + n.label + "'");
      leaves_.push_back(static_cast<int>(i));
      Rational depth = 0;
      for (int u = static_cast<int>(i); u != root(); u = nodes_[u].parent) depth += nodes_[u].edge_length;
      if (r && depth != *r)
        throw InputError("leaf '" + n.label + "' is at depth " + to_string(depth) +
                         ", other leaves at " + to_string(*r));
      r = depth;
    }
    radius_ = *r;
  }

  std::vector<Node> nodes_;
  std::vector<int> leaves_;
  std::map<std::string, int> leaf_index_;
  Rational radius_ = 0;
};

/// Edge lengths of the smallest root-containing subtree spanning S, minus r.
inline Rational weitzman_ultrametric(const std::vector<std::string>& s, const UltrametricTree& t) {
  if (s.empty()) return 0;
  std::vector<bool> used(t.nodes().size(), false);
  Rational total = 0;
  for (const auto& label : s)
    for (int u = t.leaf(label); u != t.root() && !used[u]; u = t.node(u).parent) {
      used[u] = true;
      total += t.node(u).edge_length;
    }
  return total - t.radius();
}

/// Ground points are edges, β(leaf) = edges on its root path, weighted by
/// length; δ_V(S) = δ_W(S) + r. Elements are tuples U(label).
inline TableVolume ultrametric_to_volume(const UltrametricTree& t) {
  std::unordered_map<GroundPoint, Rational, GroundPointHash> weights;
  for (std::size_t i = 1; i < t.nodes().size(); ++i)
    weights[GroundPoint::of_edge(i)] = t.node(static_cast<int>(i)).edge_length;
  std::map<Tuple, Region> balls;
  for (int l : t.leaves()) {
    std::vector<GroundPoint> pts;
    for (int e : t.root_path_edges(l)) pts.push_back(GroundPoint::of_edge(static_cast<std::uint64_t>(e)));
    balls[element_tuple("U", t.node(l).label)] = make_region(std::move(pts));
  }
  return TableVolume("ultrametric", std::move(balls), Measure::weighted(std::move(weights), 0));
}

struct UltrametricViolation {
  std::string a, b, c;  // d(a,c) > max(d(a,b), d(b,c))
  Rational d_ac, d_ab, d_bc;
};

/// Single-linkage reconstruction. Returns the tree (distance = height of the
/// lowest common ancestor) or the lexicographically first violating triple.
inline std::variant<UltrametricTree, UltrametricViolation> ultrametric_tree_from_matrix(
    const DistanceMatrix& d) {
  const auto n = d.size();
  if (n == 0) throw InputError("distance matrix is empty");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const std::size_t tri[3] = {i, j, k};
        // check each member of the triple as the middle element b
        for (int mid = 0; mid < 3; ++mid) {
          std::size_t b = tri[mid], a = tri[(mid + 1) % 3], c = tri[(mid + 2) % 3];
          if (a > c) std::swap(a, c);
          if (d(a, c) > std::max(d(a, b), d(b, c)))
            return UltrametricViolation{d.labels()[a], d.labels()[b], d.labels()[c],
                                        d(a, c), d(a, b), d(b, c)};
        }
      }
  std::vector<UltrametricTree::Node> nodes;
  // builds the subtree over `members`; returns (node id, height)
  std::function<int(const std::vector<std::size_t>&, int)> build =
      [&](const std::vector<std::size_t>& members, int parent) -> int {
    int id = static_cast<int>(nodes.size());
    nodes.push_back({parent, {}, 0, {}});
    if (members.size() == 1) {
      nodes[id].label = d.labels()[members[0]];
      return id;
    }
    Rational h = 0;
    for (auto x : members)
      for (auto y : members) h = std::max(h, d(x, y));
    // classes of the relation d < h (an equivalence for ultrametrics)
    std::vector<std::vector<std::size_t>> classes;
    for (auto x : members) {
      bool placed = false;
      for (auto& c : classes)
        if (d(x, c.front()) < h) {
          c.push_back(x);
          placed = true;
          break;
        }
      if (!placed) classes.push_back({x});
    }
    if (classes.size() == 1) {
      // only possible with h = 0 and repeated points; split into leaves
      classes.clear();
      for (auto x : members) classes.push_back({x});
    }
    for (const auto& c : classes) {
      Rational hc = 0;
      for (auto x : c)
        for (auto y : c) hc = std::max(hc, d(x, y));
      int child = build(c, id);
      nodes[child].edge_length = h - hc;
      nodes[id].children.push_back(child);
    }
    return id;
  };
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  build(all, -1);
  return UltrametricTree(std::move(nodes));
}

}  // namespace divcq
