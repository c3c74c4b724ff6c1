#pragma once

// Volume assignments: ball functions, measures, diversity and marginals,
// induced distances, multi-attribute conversions and Euclidean balls.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <memory>
#include <numbers>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "engine.hpp"
#include "json.hpp"
#include "relcore.hpp"

namespace divcq {

/// Element of a ball. `value` is set for Value/PosValue, `id` carries the
/// position (PosValue), packed TupleRef (DbTuple), subset mask
/// (AttributeSet) or edge index (Edge).
struct GroundPoint {
  enum class Kind : std::uint8_t { Value, PosValue, DbTuple, AttributeSet, Edge };
  Kind kind = Kind::Value;
  divcq::Value value;
  std::uint64_t id = 0;

  static GroundPoint of_value(divcq::Value v) { return {Kind::Value, v, 0}; }
  static GroundPoint of_position(divcq::Value v, std::uint64_t pos) {
    return {Kind::PosValue, v, pos};
  }
  static GroundPoint of_fact(TupleRef r) {
    return {Kind::DbTuple, {}, (std::uint64_t{r.relation} << 32) | r.row};
  }
  static GroundPoint of_attribute_set(std::uint64_t mask) { return {Kind::AttributeSet, {}, mask}; }
  static GroundPoint of_edge(std::uint64_t edge) { return {Kind::Edge, {}, edge}; }

  TupleRef fact() const {
    return TupleRef{static_cast<std::uint32_t>(id >> 32), static_cast<std::uint32_t>(id)};
  }

  friend bool operator==(const GroundPoint& a, const GroundPoint& b) {
    return a.kind == b.kind && a.value == b.value && a.id == b.id;
  }
  friend std::strong_ordering operator<=>(const GroundPoint& a, const GroundPoint& b) {
    if (a.kind != b.kind) return a.kind <=> b.kind;
    if (a.value.valid() && b.value.valid())
      if (auto c = a.value <=> b.value; c != 0) return c;
    return a.id <=> b.id;
  }
};

struct GroundPointHash {
  std::size_t operator()(const GroundPoint& p) const {
    std::size_t h = p.value.valid() ? p.value.hash() : 0;
    h ^= std::hash<std::uint64_t>{}(p.id) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h * 8 + static_cast<std::size_t>(p.kind);
  }
};

inline std::string to_string(const GroundPoint& p, const Database* db = nullptr) {
  switch (p.kind) {
    case GroundPoint::Kind::Value:
      return p.value.text();
    case GroundPoint::Kind::PosValue:
      return "(" + p.value.text() + "," + std::to_string(p.id) + ")";
    case GroundPoint::Kind::DbTuple:
      if (db) return to_string(db->tuple(p.fact()));
      return "fact#" + std::to_string(p.fact().relation) + ":" + std::to_string(p.fact().row);
    case GroundPoint::Kind::AttributeSet:
      return "set#" + std::to_string(p.id);
    case GroundPoint::Kind::Edge:
      return "edge#" + std::to_string(p.id);
  }
  return "?";
}

/// Finite region: sorted, duplicate-free points.
using Region = std::vector<GroundPoint>;

inline Region make_region(std::vector<GroundPoint> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

inline Region region_union(const Region& a, const Region& b) {
  Region out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline Region region_difference(const Region& a, const Region& b) {
  Region out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

/// Counting measure or point weights with a default for unlisted points.
class Measure {
 public:
  enum class Kind { Count, Weighted };

  static Measure count() { return Measure(); }
  static Measure weighted(std::unordered_map<GroundPoint, Rational, GroundPointHash> weights,
                          Rational default_weight = 1) {
    if (default_weight < 0) throw InputError("default weight must be non-negative");
    for (const auto& [p, w] : weights)
      if (w < 0) throw InputError("weight of " + to_string(p) + " is negative");
    Measure m;
    m.kind_ = Kind::Weighted;
    m.weights_ = std::move(weights);
    m.default_ = std::move(default_weight);
    return m;
  }

  Kind kind() const { return kind_; }
  const Rational& default_weight() const { return default_; }
  const std::unordered_map<GroundPoint, Rational, GroundPointHash>& weights() const {
    return weights_;
  }

  Rational weight(const GroundPoint& p) const {
    if (kind_ == Kind::Count) return 1;
    auto it = weights_.find(p);
    return it == weights_.end() ? default_ : it->second;
  }

  template <class Points>
  Rational operator()(const Points& pts) const {
    if (kind_ == Kind::Count) return Rational(static_cast<long long>(std::size(pts)));
    Rational s = 0;
    for (const auto& p : pts) s += weight(p);
    return s;
  }

 private:
  Kind kind_ = Kind::Count;
  std::unordered_map<GroundPoint, Rational, GroundPointHash> weights_;
  Rational default_ = 1;
};

/// (S, μ, β) over tuples. Discrete assignments expose finite balls; the
/// Euclidean one only supports diversity estimates.
class VolumeAssignment {
 public:
  virtual ~VolumeAssignment() = default;
  virtual std::string name() const = 0;
  virtual bool discrete() const { return true; }
  /// β(t); throws InputError for tuples outside the universe.
  virtual Region ball(const Tuple& t) const = 0;
  /// Finite universe if the assignment has one.
  virtual std::optional<std::vector<Tuple>> universe() const { return std::nullopt; }
  const Measure& measure() const { return measure_; }

 protected:
  explicit VolumeAssignment(Measure m) : measure_(std::move(m)) {}
  Measure measure_;
};

/// β(t) = set of values of t.
class ElemVolume : public VolumeAssignment {
 public:
  explicit ElemVolume(Measure m = Measure::count()) : VolumeAssignment(std::move(m)) {}
  std::string name() const override {
    return measure_.kind() == Measure::Kind::Count ? "elem" : "elem-w";
  }
  Region ball(const Tuple& t) const override {
    std::vector<GroundPoint> pts;
    for (const auto& v : t.values) pts.push_back(GroundPoint::of_value(v));
    return make_region(std::move(pts));
  }
};

/// β(t) = {(value, position)}, positions 1-based.
class PosVolume : public VolumeAssignment {
 public:
  explicit PosVolume(Measure m = Measure::count()) : VolumeAssignment(std::move(m)) {}
  std::string name() const override {
    return measure_.kind() == Measure::Kind::Count ? "pos" : "pos-w";
  }
  Region ball(const Tuple& t) const override {
    std::vector<GroundPoint> pts;
    for (std::size_t i = 0; i < t.values.size(); ++i)
      pts.push_back(GroundPoint::of_position(t.values[i], i + 1));
    return make_region(std::move(pts));
  }
};

/// β(answer) = facts used by some homomorphism producing it.
class ProvenanceVolume : public VolumeAssignment {
 public:
  explicit ProvenanceVolume(std::shared_ptr<const ProvenanceMap> prov,
                            Measure m = Measure::count())
      : VolumeAssignment(std::move(m)), prov_(std::move(prov)) {}
  std::string name() const override { return "provenance"; }
  Region ball(const Tuple& t) const override {
    if (!prov_->contains(t)) throw InputError(to_string(t) + " is outside the answer universe");
    std::vector<GroundPoint> pts;
    for (auto r : prov_->refs(t)) pts.push_back(GroundPoint::of_fact(r));
    return make_region(std::move(pts));
  }
  std::optional<std::vector<Tuple>> universe() const override {
    std::vector<Tuple> out;
    for (const auto& [t, refs] : prov_->entries()) out.push_back(t);
    return out;
  }
  const ProvenanceMap& provenance() const { return *prov_; }

 private:
  std::shared_ptr<const ProvenanceMap> prov_;
};

/// Explicit table of balls over a finite universe.
class TableVolume : public VolumeAssignment {
 public:
  TableVolume(std::string name, std::map<Tuple, Region> balls, Measure m)
      : VolumeAssignment(std::move(m)), name_(std::move(name)), balls_(std::move(balls)) {}
  std::string name() const override { return name_; }
  Region ball(const Tuple& t) const override {
    auto it = balls_.find(t);
    if (it == balls_.end()) throw InputError(to_string(t) + " is outside the universe");
    return it->second;
  }
  std::optional<std::vector<Tuple>> universe() const override {
    std::vector<Tuple> out;
    for (const auto& [t, b] : balls_) out.push_back(t);
    return out;
  }
  const std::map<Tuple, Region>& balls() const { return balls_; }

 private:
  std::string name_;
  std::map<Tuple, Region> balls_;
};

/// Points covered so far and their measure; supports O(|β(t)|) marginals.
class CoverageState {
 public:
  explicit CoverageState(const VolumeAssignment& v) : v_(&v) {}

  Rational gain(const Region& ball) const {
    Rational g = 0;
    for (const auto& p : ball)
      if (!covered_.count(p)) g += v_->measure().weight(p);
    return g;
  }
  Rational gain(const Tuple& t) const { return gain(v_->ball(t)); }

  Rational add(const Tuple& t) {
    Rational g = 0;
    for (const auto& p : v_->ball(t))
      if (covered_.insert(p).second) g += v_->measure().weight(p);
    total_ += g;
    return g;
  }

  bool covers(const GroundPoint& p) const { return covered_.count(p) > 0; }
  const Rational& total() const { return total_; }
  const std::unordered_set<GroundPoint, GroundPointHash>& covered() const { return covered_; }

 private:
  const VolumeAssignment* v_;
  std::unordered_set<GroundPoint, GroundPointHash> covered_;
  Rational total_ = 0;
};

inline void require_discrete(const VolumeAssignment& v) {
  if (!v.discrete())
    throw InputError("unsupported for continuous assignment " + v.name() +
                     "; use the Monte-Carlo estimator");
}

/// δ_V(S) = μ(∪ β(a)); δ_V(∅) = 0.
inline Rational diversity(const VolumeAssignment& v, const std::vector<Tuple>& s) {
  require_discrete(v);
  Region all;
  for (const auto& t : s) all = region_union(all, v.ball(t));
  return v.measure()(all);
}

/// μ(β(t) \ ∪β(S)).
inline Rational marginal(const VolumeAssignment& v, const std::vector<Tuple>& s, const Tuple& t) {
  require_discrete(v);
  Region covered;
  for (const auto& x : s) covered = region_union(covered, v.ball(x));
  return v.measure()(region_difference(v.ball(t), covered));
}

/// d^Δ(a,b) = μ(β(a) Δ β(b)).
inline Rational sym_diff_distance(const VolumeAssignment& v, const Tuple& a, const Tuple& b) {
  require_discrete(v);
  auto ba = v.ball(a);
  auto bb = v.ball(b);
  return v.measure()(region_difference(ba, bb)) + v.measure()(region_difference(bb, ba));
}

/// d^M(a,b) = δ_V({a,b}) − δ_V({b}).
inline Rational marginal_distance(const VolumeAssignment& v, const Tuple& a, const Tuple& b) {
  return marginal(v, {b}, a);
}

// ---------------------------------------------------------------------------
// Weight files

/// Parses `point,weight` lines. Points are `value` (elem) or `value@pos`
/// (pos); `positional` selects which form is expected.
inline Measure parse_weight_file(std::string_view text, bool positional,
                                 Rational default_weight = 1) {
  std::unordered_map<GroundPoint, Rational, GroundPointHash> weights;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') {
      if (end == text.size()) break;
      continue;
    }
    auto fields = split_csv_line(line);
    auto fail = [&](const std::string& msg) {
      throw InputError("weight file line " + std::to_string(line_no) + ": " + msg);
    };
    if (fields.size() != 2) fail("expected point,weight");
    auto w = parse_exact_number(fields[1]);
    if (!w) fail("weight '" + fields[1] + "' is not a number");
    if (*w < 0) fail("negative weight");
    auto at = fields[0].rfind('@');
    GroundPoint p;
    if (positional) {
      if (at == std::string::npos) fail("expected value@position");
      auto pos_text = fields[0].substr(at + 1);
      if (pos_text.empty() ||
          !std::all_of(pos_text.begin(), pos_text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        fail("position '" + pos_text + "' is not a positive integer");
      auto pos = std::stoull(pos_text);
      if (pos < 1) fail("positions start at 1");
      p = GroundPoint::of_position(intern(fields[0].substr(0, at)), pos);
    } else {
      if (at != std::string::npos) fail("positional weight in a value weight file");
      p = GroundPoint::of_value(intern(fields[0]));
    }
    weights[p] = *w;
    if (end == text.size()) break;
  }
  return Measure::weighted(std::move(weights), std::move(default_weight));
}

// ---------------------------------------------------------------------------
// Multi-attribute diversity

/// v_λ over a finite universe X (|X| ≤ 64 representable; conversions cap lower).
struct MultiAttributeWeights {
  std::vector<std::string> universe;
  std::map<std::uint64_t, Rational> lambda;  // non-zero entries only

  /// v_λ(S) for S given as a mask over `universe`.
  Rational value(std::uint64_t s) const {
    Rational v = 0;
    for (const auto& [a, l] : lambda)
      if (a & s) v += l;
    return v;
  }

  std::uint64_t mask_of(const std::vector<std::string>& labels) const {
    std::uint64_t m = 0;
    for (const auto& l : labels) {
      auto it = std::find(universe.begin(), universe.end(), l);
      if (it == universe.end()) throw InputError("'" + l + "' is not in the universe");
      m |= std::uint64_t{1} << (it - universe.begin());
    }
    return m;
  }
};

inline constexpr std::size_t kDefaultUniverseCap = 16;

/// {"universe": [...], "lambda": [{"set": [...], "weight": w}]}; weights are
/// numbers or "p/q" strings, repeated sets accumulate.
inline MultiAttributeWeights multiattribute_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("universe") || !j["universe"].is_array())
    throw InputError("multi-attribute file needs a \"universe\" array");
  MultiAttributeWeights out;
  for (const auto& x : j["universe"]) {
    if (!x.is_string()) throw InputError("universe elements must be strings");
    auto label = x.get<std::string>();
    if (std::find(out.universe.begin(), out.universe.end(), label) != out.universe.end())
      throw InputError("duplicate universe element '" + label + "'");
    out.universe.push_back(label);
  }
  if (out.universe.size() > 64) throw InputError("universe is limited to 64 elements");
  if (!j.contains("lambda")) return out;
  if (!j["lambda"].is_array()) throw InputError("\"lambda\" must be an array");
  for (const auto& e : j["lambda"]) {
    if (!e.is_object() || !e.contains("set") || !e.contains("weight") || !e["set"].is_array())
      throw InputError("lambda entries are {\"set\": [...], \"weight\": w}");
    std::vector<std::string> labels;
    for (const auto& x : e["set"]) {
      if (!x.is_string()) throw InputError("set elements must be strings");
      labels.push_back(x.get<std::string>());
    }
    const auto& w = e["weight"];
    std::optional<Rational> q;
    if (w.is_string()) q = parse_exact_number(w.get<std::string>());
    else if (w.is_number()) q = parse_exact_number(w.dump());
    if (!q) throw InputError("weight " + w.dump() + " is not a number");
    if (*q < 0) throw InputError("negative multi-attribute weight");
    auto mask = out.mask_of(labels);
    if (mask == 0) throw InputError("lambda entry over the empty set");
    out.lambda[mask] += *q;
  }
  for (auto it = out.lambda.begin(); it != out.lambda.end();)
    it = it->second == 0 ? out.lambda.erase(it) : std::next(it);
  return out;
}

inline nlohmann::json multiattribute_to_json(const MultiAttributeWeights& maw) {
  nlohmann::json lambda = nlohmann::json::array();
  for (const auto& [mask, w] : maw.lambda) {
    nlohmann::json set = nlohmann::json::array();
    for (std::size_t i = 0; i < maw.universe.size(); ++i)
      if (mask >> i & 1) set.push_back(maw.universe[i]);
    lambda.push_back({{"set", set}, {"weight", to_string(w)}});
  }
  return {{"universe", maw.universe}, {"lambda", lambda}};
}

/// Tuple standing for universe element `label` in converted assignments.
inline Tuple element_tuple(const std::string& relation, const std::string& label) {
  return Tuple{relation, {default_pool().intern_symbol(label)}};
}

/// β(x) = {A : x ∈ A} with μ(𝔅) = Σ λ_A. Elements are tuples X(label).
inline TableVolume volume_from_multiattribute(const MultiAttributeWeights& maw,
                                              std::size_t cap = kDefaultUniverseCap) {
  const auto n = maw.universe.size();
  if (n > cap)
    throw CapExceeded("universe has " + std::to_string(n) + " elements, cap is " +
                      std::to_string(cap));
  std::unordered_map<GroundPoint, Rational, GroundPointHash> weights;
  std::map<Tuple, Region> balls;
  for (std::size_t i = 0; i < n; ++i) balls[element_tuple("X", maw.universe[i])];
  for (const auto& [a, l] : maw.lambda) {
    if (l < 0) throw InputError("negative multi-attribute weight");
    if (a >> n) throw InputError("multi-attribute subset outside the universe");
    if (a == 0) continue;  // the empty set never meets S
    auto p = GroundPoint::of_attribute_set(a);
    weights[p] = l;
    for (std::size_t i = 0; i < n; ++i)
      if (a >> i & 1) balls[element_tuple("X", maw.universe[i])].push_back(p);
  }
  for (auto& [t, b] : balls) b = make_region(std::move(b));
  return TableVolume("multiattribute", std::move(balls),
                     Measure::weighted(std::move(weights), 0));
}

/// λ_A = μ(∩_{a∈A} β(a) \ ∪_{x∉A} β(x)). Each covered point contributes its
/// weight to the subset of elements whose balls contain it.
inline MultiAttributeWeights multiattribute_from_volume(const VolumeAssignment& v,
                                                        const std::vector<Tuple>& universe,
                                                        std::size_t cap = kDefaultUniverseCap) {
  require_discrete(v);
  if (universe.size() > cap)
    throw CapExceeded("universe has " + std::to_string(universe.size()) + " elements, cap is " +
                      std::to_string(cap));
  MultiAttributeWeights out;
  std::unordered_map<GroundPoint, std::uint64_t, GroundPointHash> signature;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    out.universe.push_back(to_string(universe[i]));
    for (const auto& p : v.ball(universe[i])) signature[p] |= std::uint64_t{1} << i;
  }
  for (const auto& [p, sig] : signature) {
    auto w = v.measure().weight(p);
    if (w != 0) out.lambda[sig] += w;
  }
  for (auto it = out.lambda.begin(); it != out.lambda.end();)
    it = it->second == 0 ? out.lambda.erase(it) : std::next(it);
  return out;
}

// ---------------------------------------------------------------------------
// Euclidean balls

struct ContinuousBallSet {
  std::vector<std::vector<double>> centers;
  double radius = 1.0;

  std::size_t dimension() const { return centers.empty() ? 0 : centers.front().size(); }
};

struct VolumeEstimate {
  double estimate = 0;
  double std_error = 0;
  bool exact = false;
  std::uint64_t samples = 0;
};

/// Worker count: DIVERSE_CQ_THREADS if set, else the hardware concurrency.
inline unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DIVERSE_CQ_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = static_cast<unsigned>(std::min<long>(v, 1024));
  }
  return n;
}

namespace detail {

inline double interval_union_length(std::vector<std::pair<double, double>> iv) {
  std::sort(iv.begin(), iv.end());
  double total = 0;
  double lo = 0, hi = 0;
  bool open = false;
  for (auto [a, b] : iv) {
    if (!open || a > hi) {
      if (open) total += hi - lo;
      lo = a;
      hi = b;
      open = true;
    } else {
      hi = std::max(hi, b);
    }
  }
  if (open) total += hi - lo;
  return total;
}

}  // namespace detail

inline constexpr unsigned kMonteCarloShards = 64;

/// Lebesgue measure of the union of radius-r balls. 1-D is computed exactly;
/// higher dimensions sample the bounding box. Samples are split into a fixed
/// number of shards, each with its own seeded stream, so the result does
/// not depend on the number of worker threads.
inline VolumeEstimate mc_ball_union_volume(const ContinuousBallSet& balls, std::uint64_t samples,
                                           std::uint64_t seed) {
  if (samples < 1) throw InputError("samples must be at least 1");
  if (!(balls.radius > 0)) throw InputError("radius must be positive");
  VolumeEstimate out;
  if (balls.centers.empty()) {
    out.exact = true;
    return out;
  }
  const auto k = balls.dimension();
  for (const auto& c : balls.centers)
    if (c.size() != k) throw InputError("ball centers have different dimensions");
  if (k == 0) throw InputError("ball centers have dimension 0");
  const double r = balls.radius;
  if (k == 1) {
    std::vector<std::pair<double, double>> iv;
    for (const auto& c : balls.centers) iv.emplace_back(c[0] - r, c[0] + r);
    out.estimate = detail::interval_union_length(std::move(iv));
    out.exact = true;
    return out;
  }
  std::vector<double> lo(k, INFINITY), hi(k, -INFINITY);
  for (const auto& c : balls.centers)
    for (std::size_t i = 0; i < k; ++i) {
      lo[i] = std::min(lo[i], c[i] - r);
      hi[i] = std::max(hi[i], c[i] + r);
    }
  double box = 1;
  for (std::size_t i = 0; i < k; ++i) box *= hi[i] - lo[i];

  std::vector<std::uint64_t> hits(kMonteCarloShards, 0);
  std::atomic<unsigned> next{0};
  const double r2 = r * r;
  auto work = [&] {
    std::vector<double> x(k);
    for (unsigned shard; (shard = next.fetch_add(1)) < kMonteCarloShards;) {
      std::uint64_t n = samples / kMonteCarloShards + (shard < samples % kMonteCarloShards);
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        shard};
      std::mt19937_64 rng(seq);
      std::vector<std::uniform_real_distribution<double>> axis;
      for (std::size_t i = 0; i < k; ++i) axis.emplace_back(lo[i], hi[i]);
      std::uint64_t h = 0;
      for (std::uint64_t s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < k; ++i) x[i] = axis[i](rng);
        for (const auto& c : balls.centers) {
          double d2 = 0;
          for (std::size_t i = 0; i < k; ++i) d2 += (x[i] - c[i]) * (x[i] - c[i]);
          if (d2 <= r2) {
            ++h;
            break;
          }
        }
      }
      hits[shard] = h;
    }
  };
  unsigned threads = std::min(worker_threads(), kMonteCarloShards);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  double p = static_cast<double>(total) / static_cast<double>(samples);
  out.estimate = box * p;
  out.std_error = box * std::sqrt(p * (1 - p) / static_cast<double>(samples));
  out.samples = samples;
  return out;
}

/// V_r: ball of radius r around the numeric point given by a tuple's values.
class EuclideanVolume : public VolumeAssignment {
 public:
  EuclideanVolume(double radius, std::uint64_t samples, std::uint64_t seed)
      : VolumeAssignment(Measure::count()), radius_(radius), samples_(samples), seed_(seed) {
    if (!(radius > 0)) throw InputError("ball radius must be positive");
  }
  std::string name() const override { return "ball"; }
  bool discrete() const override { return false; }
  Region ball(const Tuple& t) const override {
    throw InputError("ball of " + to_string(t) + " is a continuous region");
  }

  static std::vector<double> center(const Tuple& t) {
    std::vector<double> c;
    for (const auto& v : t.values) {
      if (!v.is_number()) throw InputError(to_string(t) + " has a non-numeric value");
      c.push_back(to_double(v.number()));
    }
    return c;
  }

  VolumeEstimate estimate(const std::vector<Tuple>& s) const {
    ContinuousBallSet set{{}, radius_};
    for (const auto& t : s) set.centers.push_back(center(t));
    return mc_ball_union_volume(set, samples_, seed_);
  }

  double radius() const { return radius_; }

 private:
  double radius_;
  std::uint64_t samples_;
  std::uint64_t seed_;
};

}  // namespace divcq
