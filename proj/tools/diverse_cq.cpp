// diverse-cq: evaluate conjunctive queries and pick diverse answer subsets.
//
// Every command prints one JSON run report on stdout. `result` depends only on
// the inputs and --seed; wall-clock numbers live under `timings_ms`.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "divcq/baselines.hpp"
#include "divcq/engine.hpp"
#include "divcq/optimize.hpp"
#include "divcq/query.hpp"
#include "divcq/relcore.hpp"
#include "divcq/volume.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace divcq;

namespace {

constexpr const char* kVersion = "0.3.0";
constexpr std::size_t kExhaustiveCheckLimit = 10;  // |X| for full subset checks
constexpr std::size_t kAnomalySearchLimit = 12;

struct Options {
  std::string data, schema, query_file, query_text, td_file;
  std::string td_width = "1";
  bool dump = false;
  std::string volume = "elem";
  std::string measure;
  std::size_t k = 3;
  std::string mode = "greedy";
  std::string engine;
  std::string distance = "hamming";
  std::string multiattr, ultrametric;
  bool volume_dump = false;
  std::uint64_t max_subsets = kDefaultMaxSubsets;
  std::size_t max_weitzman = kDefaultWeitzmanCap;
  std::uint64_t seed = 0;
  std::uint64_t samples = 100'000;
  std::size_t vertices = 100, edges = 300, path_length = 6;
};

// ---------------------------------------------------------------------------
// report plumbing

std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class Report {
 public:
  Report(std::string command, std::vector<std::string> argv, std::uint64_t seed)
      : command_(std::move(command)), argv_(std::move(argv)), seed_(seed) {}

  std::string read_input(const std::string& role, const fs::path& path) {
    auto text = read_file(path);
    inputs_.push_back({{"role", role}, {"path", path.string()}, {"bytes", text.size()},
                       {"fnv1a64", fnv1a64(text)}});
    return text;
  }

  void digest_directory(const std::string& role, const fs::path& dir) {
    if (!fs::is_directory(dir)) throw InputError(dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) read_input(role, f);
  }

  template <class F>
  auto timed(const std::string& phase, F&& f) {
    auto start = std::chrono::steady_clock::now();
    struct Stop {
      Report* r;
      std::string phase;
      std::chrono::steady_clock::time_point start;
      ~Stop() {
        std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
        r->timings_[phase] = r->timings_.value(phase, 0.0) + ms.count();
      }
    } stop{this, phase, start};
    return f();
  }

  json& result() { return result_; }

  json to_json() const {
    return {{"tool", "diverse-cq"}, {"version", kVersion}, {"command", command_},
            {"argv", argv_},        {"seed", seed_},       {"inputs", inputs_},
            {"result", result_},    {"timings_ms", timings_}};
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::uint64_t seed_;
  json inputs_ = json::array();
  json result_ = json::object();
  json timings_ = json::object();
};

json values_json(const Tuple& t) {
  json out = json::array();
  for (const auto& v : t.values) out.push_back(v.text());
  return out;
}

json tuples_json(const std::vector<Tuple>& ts) {
  json out = json::array();
  for (const auto& t : ts) out.push_back(values_json(t));
  return out;
}

json rationals_json(const std::vector<Rational>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(to_string(x));
  return out;
}

Rational parse_rational_flag(const std::string& flag, const std::string& text) {
  auto q = parse_exact_number(text);
  if (!q) throw InputError(flag + " expects a number, got '" + text + "'");
  return *q;
}

// ---------------------------------------------------------------------------
// shared loading

struct Workload {
  Database db;
  ConjunctiveQuery q;
  std::optional<TreeDecomposition> td;
};

Database load_data(const Options& o, Report& r) {
  if (o.data.empty()) throw InputError("--data is required");
  r.digest_directory("data", o.data);
  std::optional<fs::path> schema;
  if (!o.schema.empty()) {
    r.read_input("schema", o.schema);
    schema = fs::path(o.schema);
  }
  LoadReport lr;
  auto db = r.timed("load", [&] { return load_database(o.data, schema, &lr); });
  json rels = json::array();
  for (const auto& s : lr.relations)
    rels.push_back({{"relation", s.relation}, {"lines", s.lines}, {"distinct_rows", s.distinct_rows},
                    {"arity", s.columns}});
  r.result()["relations"] = rels;
  return db;
}

ConjunctiveQuery load_query(const Options& o, Report& r, const Schema& schema) {
  if (o.query_file.empty() == o.query_text.empty())
    throw InputError("give exactly one of --query <file> or --query-text <rule>");
  std::string text = o.query_file.empty() ? o.query_text : r.read_input("query", o.query_file);
  auto q = r.timed("parse", [&] { return parse_cq(text, &schema); });
  r.result()["query"] = q.to_string();
  return q;
}

std::optional<TreeDecomposition> load_td(const Options& o, Report& r, const ConjunctiveQuery& q) {
  if (o.td_file.empty()) return std::nullopt;
  auto text = r.read_input("td", o.td_file);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("tree decomposition " + o.td_file + ": " + e.what());
  }
  auto td = tree_decomposition_from_json(q, doc, parse_rational_flag("--td-width", o.td_width));
  if (auto v = validate_tree_decomposition(q, td); !v)
    throw InputError("invalid tree decomposition (" + v.property + "): " + v.witness);
  return td;
}

Workload load_workload(const Options& o, Report& r) {
  auto db = load_data(o, r);
  auto q = load_query(o, r, db.schema());
  auto td = load_td(o, r, q);
  return {std::move(db), std::move(q), std::move(td)};
}

AnswerSet evaluate(const Workload& w, Report& r) {
  return r.timed("evaluate", [&] {
    if (w.td && w.td->is_width_one(w.q)) return yannakakis_answers(w.q, *w.td, w.db);
    if (!w.td)
      if (auto jt = gyo_join_tree(w.q)) return yannakakis_answers(w.q, *jt, w.db);
    return enumerate_answers(w.q, w.db);
  });
}

// ---------------------------------------------------------------------------
// volume selection

struct VolumeChoice {
  std::shared_ptr<VolumeAssignment> v;
  std::string kind;  // elem, pos, elem-w, pos-w, provenance, ball
};

Measure load_measure(const Options& o, Report& r, bool positional) {
  const std::string prefix = "weighted:";
  if (o.measure.rfind(prefix, 0) != 0)
    throw InputError("--measure expects weighted:<file>[:default=<w>]");
  std::string spec = o.measure.substr(prefix.size());
  Rational def = 1;
  if (auto at = spec.rfind(":default="); at != std::string::npos) {
    def = parse_rational_flag("--measure default", spec.substr(at + 9));
    if (def < 0) throw InputError("--measure default weight must be non-negative");
    spec = spec.substr(0, at);
  }
  return parse_weight_file(r.read_input("measure", spec), positional, def);
}

double parse_ball_radius(const std::string& spec) {
  const std::string prefix = "ball:r=";
  if (spec.rfind(prefix, 0) != 0) throw InputError("ball volume is written ball:r=<radius>");
  auto q = parse_exact_number(spec.substr(prefix.size()));
  if (!q || *q <= 0) throw InputError("ball radius must be a positive number");
  return to_double(*q);
}

/// `answers` feeds the provenance assignment; it may be null for modes that
/// never materialize the answer set.
VolumeChoice make_volume(const Options& o, Report& r, const Workload* w, const AnswerSet* answers) {
  const auto& s = o.volume;
  bool weighted = s == "elem-w" || s == "pos-w";
  if (!o.measure.empty() && !weighted)
    throw InputError("--measure applies to elem-w and pos-w only");
  if (weighted && o.measure.empty()) throw InputError("--volume " + s + " needs --measure");
  if (s == "elem") return {std::make_shared<ElemVolume>(), s};
  if (s == "pos") return {std::make_shared<PosVolume>(), s};
  if (s == "elem-w") return {std::make_shared<ElemVolume>(load_measure(o, r, false)), s};
  if (s == "pos-w") return {std::make_shared<PosVolume>(load_measure(o, r, true)), s};
  if (s == "provenance") {
    if (!w) throw InputError("provenance volume needs --data and a query");
    if (!answers) return {nullptr, s};
    auto pm = r.timed("provenance", [&] {
      return std::make_shared<ProvenanceMap>(provenance_map(w->q, w->db, answers->answers));
    });
    return {std::make_shared<ProvenanceVolume>(pm), s};
  }
  if (s.rfind("ball:", 0) == 0)
    return {std::make_shared<EuclideanVolume>(parse_ball_radius(s), o.samples, o.seed), "ball"};
  throw InputError("unknown volume '" + s + "' (elem, pos, elem-w, pos-w, provenance, ball:r=<r>)");
}

json diverse_json(const DiverseResult& d) {
  return {{"mode", d.mode},
          {"selected", tuples_json(d.selected)},
          {"gains", rationals_json(d.gains)},
          {"total", to_string(d.total)},
          {"total_approx", to_double(d.total)},
          {"optimal", d.optimal}};
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const Options& o, Report& r) {
  auto w = load_workload(o, r);
  auto answers = evaluate(w, r);
  auto& res = r.result();
  res["acyclic"] = gyo_join_tree(w.q).has_value();
  res["full"] = w.q.is_full();
  res["evaluation"] = (w.td ? w.td->is_width_one(w.q) : gyo_join_tree(w.q).has_value())
                          ? "yannakakis"
                          : "backtracking";
  res["answer_count"] = answers.size();
  if (o.dump) res["answers"] = tuples_json(answers.answers);
  std::cerr << answers.size() << " answers\n";
  return 0;
}

// ---------------------------------------------------------------------------
// diversify

EngineMode default_engine(const std::string& volume_kind) {
  if (volume_kind == "pos" || volume_kind == "pos-w") return EngineMode::Tropical;
  if (volume_kind == "provenance") return EngineMode::Provenance;
  return EngineMode::Naive;
}

int cmd_diversify(const Options& o, Report& r) {
  auto w = load_workload(o, r);
  auto& res = r.result();
  res["k"] = o.k;
  if (o.mode == "greedy-combined") {
    auto mode = o.engine.empty() ? default_engine(o.volume) : parse_engine_mode(o.engine);
    // only the naive engine needs ⟦Q⟧(D), and only for provenance balls
    std::optional<AnswerSet> answers;
    if (mode == EngineMode::Naive && o.volume == "provenance") answers = evaluate(w, r);
    auto vc = make_volume(o, r, &w, answers ? &*answers : nullptr);
    if (vc.v) require_discrete(*vc.v);
    auto d = r.timed("diversify", [&] {
      return greedy_combined(w.q, w.db, o.k, vc.v.get(), mode, w.td ? &*w.td : nullptr);
    });
    res["volume"] = vc.kind;
    res["engine"] = to_string(mode);
    res["diverse"] = diverse_json(d);
    return 0;
  }
  if (!o.engine.empty()) throw InputError("--engine applies to --mode greedy-combined only");
  auto answers = evaluate(w, r);
  res["answer_count"] = answers.size();
  auto vc = make_volume(o, r, &w, &answers);
  res["volume"] = vc.kind;
  if (o.mode == "greedy") {
    if (auto* ball = dynamic_cast<const EuclideanVolume*>(vc.v.get())) {
      auto e = r.timed("diversify", [&] { return greedy_diversify_estimated(answers.answers, o.k, *ball); });
      res["diverse"] = {{"mode", "greedy"},          {"selected", tuples_json(e.selected)},
                        {"gains", e.gains},          {"total_approx", e.total},
                        {"std_error", e.std_error},  {"exact", e.exact},
                        {"samples", o.samples},      {"optimal", false}};
      return 0;
    }
    auto d = r.timed("diversify", [&] { return greedy_diversify(answers.answers, o.k, *vc.v); });
    res["diverse"] = diverse_json(d);
    return 0;
  }
  if (o.mode == "exact") {
    auto d = r.timed("diversify",
                     [&] { return brute_force_diversify(answers.answers, o.k, *vc.v, o.max_subsets); });
    res["diverse"] = diverse_json(d);
    return 0;
  }
  throw InputError("unknown mode '" + o.mode + "' (greedy, exact, greedy-combined)");
}

// ---------------------------------------------------------------------------
// compare

using SetFn = std::function<Rational(const std::vector<Tuple>&)>;

/// Greedy on an arbitrary set function: add the argmax of f(S ∪ {t}), ties
/// to the smallest answer.
std::vector<Tuple> greedy_on(const std::vector<Tuple>& answers, std::size_t k, const SetFn& f) {
  std::vector<Tuple> s;
  std::vector<char> used(answers.size(), 0);
  k = std::min(k, answers.size());
  while (s.size() < k) {
    std::optional<std::size_t> best;
    Rational best_v;
    for (std::size_t i = 0; i < answers.size(); ++i) {
      if (used[i]) continue;
      s.push_back(answers[i]);
      auto v = f(s);
      s.pop_back();
      if (!best || v > best_v) {
        best = i;
        best_v = v;
      }
    }
    used[*best] = 1;
    s.push_back(answers[*best]);
  }
  return s;
}

std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (cur.size() == m) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = from; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

std::vector<Tuple> pick(const std::vector<Tuple>& a, const std::vector<std::size_t>& idx) {
  std::vector<Tuple> out;
  for (auto i : idx) out.push_back(a[i]);
  return out;
}

/// Witnesses that the distance aggregates break monotonicity/submodularity.
json distance_anomalies(const std::vector<Tuple>& a, const SetFn& sum, const SetFn& min) {
  json out = json::object();
  const auto n = a.size();
  // δ_sum: marginal of t grows when x joins S; largest |S| first, then lex order
  json sum_w = nullptr;
  for (long m = static_cast<long>(n) - 2; m >= 0 && sum_w.is_null(); --m)
    for (std::size_t t = 0; t < n && sum_w.is_null(); ++t) {
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i)
        if (i != t) rest.push_back(i);
      for (const auto& sub : subsets_of_size(rest.size(), static_cast<std::size_t>(m))) {
        std::vector<std::size_t> s;
        for (auto i : sub) s.push_back(rest[i]);
        for (auto x : rest) {
          if (std::find(s.begin(), s.end(), x) != s.end()) continue;
          auto base = pick(a, s);
          auto with_x = base;
          with_x.push_back(a[x]);
          auto small = base;
          small.push_back(a[t]);
          auto big = with_x;
          big.push_back(a[t]);
          Rational g_small = sum(small) - sum(base), g_big = sum(big) - sum(with_x);
          if (g_big > g_small) {
            sum_w = {{"added", values_json(a[t])},
                     {"smaller_set", tuples_json(base)},
                     {"extra", values_json(a[x])},
                     {"marginal_on_smaller", to_string(g_small)},
                     {"marginal_on_larger", to_string(g_big)}};
            break;
          }
        }
        if (!sum_w.is_null()) break;
      }
    }
  out["sum_marginal_increase"] = sum_w;
  // δ_min: a pair scoring above the whole answer set
  json min_w = nullptr;
  if (n >= 3) {
    Rational whole = min(a), best = -1;
    std::vector<std::size_t> arg;
    for (const auto& p : subsets_of_size(n, 2)) {
      auto v = min(pick(a, p));
      if (v > best) {
        best = v;
        arg = p;
      }
    }
    if (best > whole)
      min_w = {{"subset", tuples_json(pick(a, arg))},
               {"subset_value", to_string(best)},
               {"superset_size", n},
               {"superset_value", to_string(whole)}};
  }
  out["min_not_monotone"] = min_w;
  return out;
}

int cmd_compare(const Options& o, Report& r) {
  auto w = load_workload(o, r);
  auto answers = evaluate(w, r);
  auto vc = make_volume(o, r, &w, &answers);
  require_discrete(*vc.v);
  std::function<Rational(const Tuple&, const Tuple&)> dist;
  std::optional<DistanceMatrix> matrix;
  if (o.distance == "hamming") {
    dist = [](const Tuple& a, const Tuple& b) { return Rational(hamming(a, b)); };
  } else if (o.distance.rfind("matrix:", 0) == 0) {
    matrix = DistanceMatrix::parse_csv(r.read_input("distance", o.distance.substr(7)));
    dist = [&](const Tuple& a, const Tuple& b) { return (*matrix)(matrix->label_of(a), matrix->label_of(b)); };
  } else {
    throw InputError("unknown distance '" + o.distance + "' (hamming, matrix:<file>)");
  }
  const auto& xs = answers.answers;
  SetFn f_volume = [&](const std::vector<Tuple>& s) { return diversity(*vc.v, s); };
  SetFn f_sum = [&](const std::vector<Tuple>& s) { return delta_sum(s, dist); };
  SetFn f_min = [&](const std::vector<Tuple>& s) { return delta_min(s, dist); };
  SetFn f_weitzman = [&](const std::vector<Tuple>& s) { return weitzman(s, dist, o.max_weitzman); };

  auto& res = r.result();
  res["answer_count"] = xs.size();
  res["volume"] = vc.kind;
  res["distance"] = matrix ? "matrix" : "hamming";
  res["k"] = o.k;
  std::size_t k = std::min(o.k, xs.size());
  bool weitzman_ok = k <= o.max_weitzman;
  json sets = json::array();
  r.timed("compare", [&] {
    std::vector<std::pair<std::string, std::vector<Tuple>>> picks;
    picks.emplace_back("volume", greedy_diversify(xs, k, *vc.v).selected);
    picks.emplace_back("sum", greedy_on(xs, k, f_sum));
    picks.emplace_back("min", greedy_on(xs, k, f_min));
    if (weitzman_ok) picks.emplace_back("weitzman", greedy_on(xs, k, f_weitzman));
    for (const auto& [by, s] : picks) {
      json scores = {{"volume", to_string(f_volume(s))},
                     {"sum", to_string(f_sum(s))},
                     {"min", to_string(f_min(s))},
                     {"weitzman", weitzman_ok ? json(to_string(f_weitzman(s))) : json(nullptr)}};
      sets.push_back({{"greedy_for", by}, {"selected", tuples_json(s)}, {"scores", scores}});
    }
    if (xs.size() <= kAnomalySearchLimit) res["anomalies"] = distance_anomalies(xs, f_sum, f_min);
    else res["anomalies"] = nullptr;
  });
  res["sets"] = sets;
  if (!weitzman_ok)
    std::cerr << "weitzman scores skipped: k=" << k << " exceeds --max-weitzman " << o.max_weitzman
              << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// convert

json volume_table_json(const TableVolume& v) {
  json balls = json::array();
  for (const auto& [t, region] : v.balls()) {
    json pts = json::array();
    for (const auto& p : region)
      pts.push_back({{"point", to_string(p)}, {"weight", to_string(v.measure().weight(p))}});
    balls.push_back({{"element", to_string(t)}, {"ball", pts}});
  }
  return {{"name", v.name()}, {"balls", balls}};
}

std::string check_line(const std::string& what, bool ok, std::size_t checked) {
  return what + ": " + (ok ? "PASS" : "FAIL") + " (" + std::to_string(checked) + " subsets)";
}

/// v_λ(S) = δ_V(S) for every non-empty S over the universe.
json multiattr_check(const MultiAttributeWeights& maw, const VolumeAssignment& v,
                     const std::vector<Tuple>& elems) {
  const auto n = elems.size();
  if (n > kExhaustiveCheckLimit)
    return {{"status", "SKIPPED"}, {"reason", "universe larger than 10"}};
  std::size_t checked = 0;
  json mismatch = nullptr;
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
    std::vector<Tuple> sel;
    for (std::size_t i = 0; i < n; ++i)
      if (s >> i & 1) sel.push_back(elems[i]);
    ++checked;
    auto lhs = maw.value(s), rhs = diversity(v, sel);
    if (lhs != rhs) {
      mismatch = {{"subset", tuples_json(sel)}, {"multiattribute", to_string(lhs)}, {"volume", to_string(rhs)}};
      break;
    }
  }
  bool ok = mismatch.is_null();
  return {{"status", ok ? "PASS" : "FAIL"},
          {"subsets_checked", checked},
          {"mismatch", mismatch},
          {"summary", check_line("v_lambda(S) = delta_V(S) on all non-empty subsets", ok, checked)}};
}

int cmd_convert(const Options& o, Report& r) {
  int sources = !o.multiattr.empty() + !o.ultrametric.empty() + o.volume_dump;
  if (sources != 1) throw InputError("convert takes exactly one of --multiattr, --ultrametric, --volume-dump");
  auto& res = r.result();
  auto parse_json = [&](const std::string& role, const std::string& path) {
    auto text = r.read_input(role, path);
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(path + ": " + e.what());
    }
  };

  if (!o.multiattr.empty()) {
    auto maw = multiattribute_from_json(parse_json("multiattr", o.multiattr));
    auto v = r.timed("convert", [&] { return volume_from_multiattribute(maw); });
    std::vector<Tuple> elems;
    for (const auto& x : maw.universe) elems.push_back(element_tuple("X", x));
    res["from"] = "multiattribute";
    res["volume"] = volume_table_json(v);
    res["check"] = r.timed("verify", [&] { return multiattr_check(maw, v, elems); });
  } else if (!o.ultrametric.empty()) {
    auto tree = UltrametricTree::from_json(parse_json("ultrametric", o.ultrametric));
    auto v = r.timed("convert", [&] { return ultrametric_to_volume(tree); });
    auto labels = tree.leaf_labels();
    std::sort(labels.begin(), labels.end());
    std::size_t checked = 0;
    json mismatch = nullptr;
    r.timed("verify", [&] {
      for (std::size_t m = 1; m <= std::min<std::size_t>(4, labels.size()) && mismatch.is_null(); ++m)
        for (const auto& idx : subsets_of_size(labels.size(), m)) {
          std::vector<std::string> s;
          std::vector<Tuple> ts;
          for (auto i : idx) {
            s.push_back(labels[i]);
            ts.push_back(element_tuple("U", labels[i]));
          }
          ++checked;
          auto dv = diversity(v, ts);
          auto dw = weitzman(s, [&](const std::string& a, const std::string& b) { return tree.distance(a, b); },
                             o.max_weitzman);
          auto fast = weitzman_ultrametric(s, tree);
          if (dv != dw + tree.radius() || fast != dw) {
            json labels_json = s;
            mismatch = {{"subset", labels_json},
                        {"volume", to_string(dv)},
                        {"weitzman", to_string(dw)},
                        {"weitzman_tree", to_string(fast)}};
            break;
          }
        }
    });
    bool ok = mismatch.is_null();
    res["from"] = "ultrametric";
    res["radius"] = to_string(tree.radius());
    res["leaves"] = labels;
    res["volume"] = volume_table_json(v);
    res["check"] = {{"status", ok ? "PASS" : "FAIL"},
                    {"subsets_checked", checked},
                    {"mismatch", mismatch},
                    {"summary", check_line("delta_V = delta_W + r on all subsets <= size 4", ok, checked)}};
  } else {
    auto db = load_data(o, r);
    std::vector<Tuple> universe;
    std::optional<Workload> w;
    std::optional<AnswerSet> answers;
    if (!o.query_file.empty() || !o.query_text.empty()) {
      auto q = load_query(o, r, db.schema());
      w.emplace(Workload{std::move(db), std::move(q), std::nullopt});
      answers = evaluate(*w, r);
      universe = answers->answers;
    } else {
      if (o.volume == "provenance") throw InputError("provenance volume needs a query");
      universe = db.tuples();
      std::sort(universe.begin(), universe.end());
    }
    auto vc = make_volume(o, r, w ? &*w : nullptr, answers ? &*answers : nullptr);
    auto maw = r.timed("convert", [&] { return multiattribute_from_volume(*vc.v, universe); });
    res["from"] = vc.kind;
    res["multiattribute"] = multiattribute_to_json(maw);
    // the table built from λ must agree with the source on every subset
    auto back = volume_from_multiattribute(maw);
    std::vector<Tuple> elems;
    for (const auto& x : maw.universe) elems.push_back(element_tuple("X", x));
    auto source = r.timed("verify", [&] { return multiattr_check(maw, *vc.v, universe); });
    auto round = r.timed("verify", [&] { return multiattr_check(maw, back, elems); });
    bool ok = source["status"] == "PASS" && round["status"] == "PASS";
    bool skipped = source["status"] == "SKIPPED";
    res["check"] = {{"status", skipped ? "SKIPPED" : ok ? "PASS" : "FAIL"},
                    {"source", source},
                    {"round_trip", round}};
  }
  std::cerr << res["check"].value("summary", res["check"]["status"].get<std::string>()) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const Options& o, Report& r) {
  if (o.path_length < 1) throw InputError("--length must be at least 1");
  if (o.vertices < 2) throw InputError("--vertices must be at least 2");
  std::uint64_t max_edges = static_cast<std::uint64_t>(o.vertices) * (o.vertices - 1);
  if (o.edges > max_edges) throw InputError("too many edges for the vertex count");
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<std::size_t> pick_vertex(0, o.vertices - 1);
  std::set<std::pair<std::size_t, std::size_t>> edges;
  while (edges.size() < o.edges) {
    auto a = pick_vertex(rng), b = pick_vertex(rng);
    if (a != b) edges.emplace(a, b);
  }
  Schema schema;
  schema.declare("E", 2);
  Database::Builder builder(schema);
  for (auto [a, b] : edges)
    builder.add("E", {intern("v" + std::to_string(a)), intern("v" + std::to_string(b))});
  auto db = std::move(builder).build();
  std::string text = "P(";
  for (std::size_t i = 0; i <= o.path_length; ++i) text += (i ? ",x" : "x") + std::to_string(i);
  text += ") <- ";
  for (std::size_t i = 0; i < o.path_length; ++i)
    text += (i ? ", " : "") + std::string("E(x") + std::to_string(i) + ",x" + std::to_string(i + 1) + ")";
  text += ".";
  auto q = parse_cq(text);
  PosVolume pos;

  auto& res = r.result();
  res["query"] = q.to_string();
  res["vertices"] = o.vertices;
  res["edges"] = o.edges;
  res["k"] = o.k;
  auto combined = r.timed("greedy_combined", [&] { return greedy_combined(q, db, o.k, &pos, EngineMode::Tropical); });
  auto answers = r.timed("materialize", [&] { return enumerate_answers(q, db); });
  auto greedy = r.timed("greedy_materialized", [&] { return greedy_diversify(answers.answers, o.k, pos); });
  res["materialized_answers"] = answers.size();
  res["combined"] = diverse_json(combined);
  res["materialized"] = diverse_json(greedy);
  std::cerr << "materialized " << answers.size() << " answers; combined total "
            << to_string(combined.total) << ", materialized total " << to_string(greedy.total) << "\n";
  return 0;
}

void add_data_options(CLI::App* sub, Options& o) {
  sub->add_option("--data", o.data, "directory with schema.txt and one <Relation>.csv per relation")->required();
  sub->add_option("--schema", o.schema, "schema file overriding <data>/schema.txt");
}

void add_query_options(CLI::App* sub, Options& o) {
  sub->add_option("--query", o.query_file, "file holding one rule, e.g. Q(x) <- R(x,y).");
  sub->add_option("--query-text", o.query_text, "rule given inline");
  sub->add_option("--td", o.td_file, "tree decomposition JSON {nodes:[{id,bag,parent}]}");
  sub->add_option("--td-width", o.td_width, "declared width of --td");
}

void add_volume_options(CLI::App* sub, Options& o) {
  sub->add_option("--volume", o.volume, "elem|pos|elem-w|pos-w|provenance|ball:r=<r>");
  sub->add_option("--measure", o.measure, "weighted:<file>[:default=<w>]");
  sub->add_option("--samples", o.samples, "Monte-Carlo samples for ball volumes");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Diverse answers of conjunctive queries"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.add_option("--seed", o.seed, "seed for every random choice")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "evaluate a query");
  add_data_options(eval, o);
  add_query_options(eval, o);
  eval->add_flag("--dump", o.dump, "include the sorted answers");

  auto* div = app.add_subcommand("diversify", "select k diverse answers");
  add_data_options(div, o);
  add_query_options(div, o);
  add_volume_options(div, o);
  div->add_option("-k", o.k, "number of answers to select");
  div->add_option("--mode", o.mode, "greedy|exact|greedy-combined");
  div->add_option("--engine", o.engine, "naive|tropical|provenance (greedy-combined)");
  div->add_option("--max-subsets", o.max_subsets, "cap on subsets examined by --mode exact");

  auto* cmp = app.add_subcommand("compare", "score greedy sets under volume and distance diversities");
  add_data_options(cmp, o);
  add_query_options(cmp, o);
  add_volume_options(cmp, o);
  cmp->add_option("-k", o.k, "set size");
  cmp->add_option("--distance", o.distance, "hamming|matrix:<file>");
  cmp->add_option("--max-weitzman", o.max_weitzman, "largest set scored by Weitzman diversity");

  auto* conv = app.add_subcommand("convert", "convert between volume, multi-attribute and ultrametric forms");
  conv->add_option("--multiattr", o.multiattr, "multi-attribute weights JSON");
  conv->add_option("--ultrametric", o.ultrametric, "ultrametric tree JSON");
  conv->add_flag("--volume-dump", o.volume_dump, "dump λ of --volume over --data (or a query's answers)");
  conv->add_option("--data", o.data, "database directory for --volume-dump");
  conv->add_option("--schema", o.schema, "schema file overriding <data>/schema.txt");
  conv->add_option("--query", o.query_file, "restrict --volume-dump to a query's answers");
  conv->add_option("--query-text", o.query_text, "rule given inline");
  conv->add_option("--max-weitzman", o.max_weitzman, "largest set scored by Weitzman diversity");
  add_volume_options(conv, o);

  auto* bench = app.add_subcommand("bench", "greedy-combined vs materialize-then-greedy on random paths");
  bench->add_option("--vertices", o.vertices, "graph vertices");
  bench->add_option("--edges", o.edges, "distinct directed edges");
  bench->add_option("--length", o.path_length, "path query length (atoms)");
  bench->add_option("-k", o.k, "number of answers to select");
  for (auto* sub : {eval, div, cmp, conv, bench})
    sub->add_option("--seed", o.seed, "seed for every random choice");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  auto* sub = app.get_subcommands().front();
  Report report(sub->get_name(), args, o.seed);
  try {
    int code = 0;
    if (sub == eval) code = cmd_eval(o, report);
    else if (sub == div) code = cmd_diversify(o, report);
    else if (sub == cmp) code = cmd_compare(o, report);
    else if (sub == conv) code = cmd_convert(o, report);
    else code = cmd_bench(o, report);
    std::cout << report.to_json().dump(2) << "\n";
    return code;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
