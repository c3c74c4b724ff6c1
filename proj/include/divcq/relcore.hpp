#pragma once

// Relational data model: interned values, tuples, schemas, indexed
// relations and databases, plus flat-file ingestion.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace divcq {

using Rational = boost::multiprecision::cpp_rational;

/// Bad user input (files, queries, flags). The CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation exceeded a configured cap (subset counts, Weitzman size, ...).
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Exact decimal or fraction: "12", "-3.25", "+0.5", "7/2". Returns nullopt for
// anything else (the caller then treats the text as a symbol).
inline std::optional<Rational> parse_exact_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = parse_exact_number(s.substr(0, slash));
    auto den = parse_exact_number(s.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    if (denominator(*num) != 1 || denominator(*den) != 1) return std::nullopt;
    return *num / *den;
  }
  std::size_t i = 0;
  bool negative = false;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    i = 1;
  }
  boost::multiprecision::cpp_int digits = 0;
  boost::multiprecision::cpp_int scale = 1;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (seen_point) scale *= 10;
      any_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      return std::nullopt;
    }
  }
  if (!any_digit || s.back() == '.') return std::nullopt;
  Rational q(digits, scale);
  return negative ? Rational(-q) : q;
}

namespace detail {

struct ValueEntry {
  bool numeric = false;
  Rational number;
  std::string text;  // canonical spelling for numbers, payload for symbols
  std::size_t hash = 0;
};

}  // namespace detail

/// An interned data value: either a symbol or an exact number. Two values are
/// equal iff their payloads are equal; equality and hashing are pointer-cheap.
/// Ordering is by payload: numbers (numerically) before symbols (bytewise).
class Value {
 public:
  Value() = default;

  bool is_number() const { return entry_->numeric; }
  const Rational& number() const { return entry_->number; }
  const std::string& text() const { return entry_->text; }
  std::size_t hash() const { return entry_->hash; }
  bool valid() const { return entry_ != nullptr; }
  std::uintptr_t identity() const { return reinterpret_cast<std::uintptr_t>(entry_); }

  friend bool operator==(const Value& a, const Value& b) { return a.entry_ == b.entry_; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.entry_ == b.entry_) return std::strong_ordering::equal;
    if (a.entry_->numeric != b.entry_->numeric)
      return a.entry_->numeric ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.entry_->numeric)
      return a.entry_->number < b.entry_->number ? std::strong_ordering::less
                                                 : std::strong_ordering::greater;
    return a.entry_->text.compare(b.entry_->text) < 0 ? std::strong_ordering::less
                                                      : std::strong_ordering::greater;
  }

 private:
  friend class ValuePool;
  explicit Value(const detail::ValueEntry* e) : entry_(e) {}
  const detail::ValueEntry* entry_ = nullptr;
};

/// Thread-safe interner. Entries live as long as the pool.
class ValuePool {
 public:
  Value intern(std::string_view text) {
    if (auto number = parse_exact_number(text)) return intern_number(*number);
    return intern_symbol(text);
  }

  Value intern_symbol(std::string_view text) {
    std::string key = "s:";
    key.append(text);
    return lookup_or_insert(std::move(key), false, Rational(0), std::string(text));
  }

  Value intern_number(const Rational& q) {
    std::string canonical = divcq::to_string(q);
    return lookup_or_insert("n:" + canonical, true, q, canonical);
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  Value lookup_or_insert(std::string key, bool numeric, const Rational& q, std::string text) {
    std::lock_guard lock(mu_);
    if (auto it = by_key_.find(key); it != by_key_.end()) return Value(it->second);
    auto& e = entries_.emplace_back();
    e.numeric = numeric;
    e.number = q;
    e.text = std::move(text);
    e.hash = std::hash<std::string>{}(key);
    by_key_.emplace(std::move(key), &e);
    return Value(&e);
  }

  mutable std::mutex mu_;
  std::deque<detail::ValueEntry> entries_;
  std::unordered_map<std::string, const detail::ValueEntry*> by_key_;
};

inline ValuePool& default_pool() {
  static ValuePool pool;
  return pool;
}

/// Interns into the process-wide pool. Numeric parsing is tried first.
inline Value intern(std::string_view text) { return default_pool().intern(text); }

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

using Row = std::vector<Value>;

struct RowHash {
  std::size_t operator()(const Row& r) const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& v : r) h ^= v.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

inline std::string to_string(const Value& v) { return v.text(); }

inline std::string row_to_string(std::span<const Value> row) {
  std::string out = "(";
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ",";
    out += row[i].text();
  }
  return out + ")";
}

/// A fact R(a1..ak).
struct Tuple {
  std::string relation;
  Row values;

  friend bool operator==(const Tuple&, const Tuple&) = default;
  friend std::strong_ordering operator<=>(const Tuple& a, const Tuple& b) {
    if (auto c = a.relation.compare(b.relation); c != 0)
      return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::lexicographical_compare_three_way(a.values.begin(), a.values.end(),
                                                  b.values.begin(), b.values.end());
  }
};

struct TupleHash {
  std::size_t operator()(const Tuple& t) const {
    return RowHash{}(t.values) ^ (std::hash<std::string>{}(t.relation) * 31);
  }
};

inline std::string to_string(const Tuple& t) { return t.relation + row_to_string(t.values); }

/// Convenience for tests and fixtures: make_tuple("R", {"a", "b"}).
inline Tuple make_tuple(std::string relation, std::initializer_list<std::string_view> values) {
  Tuple t{std::move(relation), {}};
  for (auto v : values) t.values.push_back(intern(v));
  return t;
}

class Schema {
 public:
  Schema() = default;

  void declare(const std::string& relation, std::size_t arity) {
    if (arity == 0) throw InputError("relation " + relation + " must have positive arity");
    if (arities_.count(relation))
      throw InputError("relation " + relation + " declared twice");
    arities_.emplace(relation, arity);
  }

  bool contains(const std::string& relation) const { return arities_.count(relation) > 0; }

  std::size_t arity(const std::string& relation) const {
    auto it = arities_.find(relation);
    if (it == arities_.end()) throw InputError("unknown relation " + relation);
    return it->second;
  }

  const std::map<std::string, std::size_t>& arities() const { return arities_; }

  /// Parses lines of the form `R/2`. Blank lines and `#` comments are ignored.
  static Schema parse(std::string_view text) {
    Schema schema;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      auto last = line.find_last_not_of(" \t\r");
      std::string decl = line.substr(first, last - first + 1);
      auto slash = decl.find('/');
      if (slash == std::string::npos || slash == 0)
        throw InputError("schema line " + std::to_string(line_no) + ": expected R/arity, got '" +
                         decl + "'");
      std::string name = decl.substr(0, slash);
      std::string arity = decl.substr(slash + 1);
      if (arity.empty() || !std::all_of(arity.begin(), arity.end(), ::isdigit))
        throw InputError("schema line " + std::to_string(line_no) + ": bad arity '" + arity + "'");
      schema.declare(name, std::stoul(arity));
    }
    return schema;
  }

 private:
  std::map<std::string, std::size_t> arities_;
};

/// A set of same-arity rows with a hash index on every single column.
/// Rows are sorted and deduplicated; row ids are positions in that order.
class IndexedRows {
 public:
  IndexedRows() = default;
  IndexedRows(std::size_t arity, std::vector<Row> rows) : arity_(arity), rows_(std::move(rows)) {
    std::sort(rows_.begin(), rows_.end());
    rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
    index_.resize(arity_);
    for (std::uint32_t r = 0; r < rows_.size(); ++r)
      for (std::size_t c = 0; c < arity_; ++c) index_[c][rows_[r][c]].push_back(r);
  }

  std::size_t arity() const { return arity_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(std::size_t id) const { return rows_[id]; }

  /// Row ids whose column `col` equals `v` (ascending).
  std::span<const std::uint32_t> lookup(std::size_t col, const Value& v) const {
    auto it = index_[col].find(v);
    if (it == index_[col].end()) return {};
    return it->second;
  }

  std::optional<std::uint32_t> find(const Row& r) const {
    auto it = std::lower_bound(rows_.begin(), rows_.end(), r);
    if (it == rows_.end() || *it != r) return std::nullopt;
    return static_cast<std::uint32_t>(it - rows_.begin());
  }

 private:
  std::size_t arity_ = 0;
  std::vector<Row> rows_;
  std::vector<std::unordered_map<Value, std::vector<std::uint32_t>, ValueHash>> index_;
};

/// Stable reference to a database fact: (relation slot, row id).
struct TupleRef {
  std::uint32_t relation = 0;
  std::uint32_t row = 0;
  friend auto operator<=>(const TupleRef&, const TupleRef&) = default;
};

/// Immutable relational instance. Build with Database::Builder or load_database.
class Database {
 public:
  class Builder {
   public:
    explicit Builder(Schema schema) : schema_(std::move(schema)) {
      for (const auto& [name, arity] : schema_.arities()) staged_[name];
    }

    Builder& add(const std::string& relation, Row values) {
      auto arity = schema_.arity(relation);
      if (values.size() != arity)
        throw InputError("tuple for " + relation + " has " + std::to_string(values.size()) +
                         " values, expected " + std::to_string(arity));
      staged_[relation].push_back(std::move(values));
      return *this;
    }

    Builder& add(const Tuple& t) { return add(t.relation, t.values); }

    Database build() && {
      Database db;
      db.schema_ = std::move(schema_);
      for (auto& [name, rows] : staged_) {
        db.slot_.emplace(name, static_cast<std::uint32_t>(db.names_.size()));
        db.names_.push_back(name);
        db.relations_.emplace_back(db.schema_.arity(name), std::move(rows));
      }
      return db;
    }

   private:
    Schema schema_;
    std::map<std::string, std::vector<Row>> staged_;
  };

  Database() = default;

  const Schema& schema() const { return schema_; }

  bool has_relation(const std::string& name) const { return slot_.count(name) > 0; }

  std::uint32_t slot(const std::string& name) const {
    auto it = slot_.find(name);
    if (it == slot_.end()) throw InputError("relation " + name + " is not in the database");
    return it->second;
  }

  const IndexedRows& relation(const std::string& name) const { return relations_[slot(name)]; }
  const IndexedRows& relation(std::uint32_t slot) const { return relations_[slot]; }
  const std::string& relation_name(std::uint32_t slot) const { return names_[slot]; }
  std::size_t relation_count() const { return relations_.size(); }

  Tuple tuple(TupleRef ref) const {
    return Tuple{names_[ref.relation], relations_[ref.relation].row(ref.row)};
  }

  std::optional<TupleRef> find(const Tuple& t) const {
    auto it = slot_.find(t.relation);
    if (it == slot_.end()) return std::nullopt;
    auto row = relations_[it->second].find(t.values);
    if (!row) return std::nullopt;
    return TupleRef{it->second, *row};
  }

  bool contains(const Tuple& t) const { return find(t).has_value(); }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& r : relations_) n += r.size();
    return n;
  }

  /// All facts, ordered by relation name then row.
  std::vector<Tuple> tuples() const {
    std::vector<Tuple> out;
    for (std::uint32_t s = 0; s < relations_.size(); ++s)
      for (const auto& row : relations_[s].rows()) out.push_back(Tuple{names_[s], row});
    return out;
  }

 private:
  Schema schema_;
  std::vector<std::string> names_;
  std::vector<IndexedRows> relations_;
  std::map<std::string, std::uint32_t> slot_;
};

// ---------------------------------------------------------------------------
// Flat files

/// Splits one CSV line. Fields may be quoted; a doubled quote inside a quoted
/// field is a literal quote. Throws InputError on an unterminated quote or on
/// stray characters after a closing quote.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  std::size_t i = 0;
  bool field_start = true;
  while (true) {
    if (field_start && i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            cur += '"';
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        cur += line[i++];
      }
      if (!closed) throw InputError("unterminated quoted field");
      if (i < line.size() && line[i] != ',')
        throw InputError("unexpected character after closing quote");
    } else {
      while (i < line.size() && line[i] != ',') cur += line[i++];
    }
    fields.push_back(std::move(cur));
    cur.clear();
    if (i >= line.size()) break;
    ++i;  // comma
    field_start = true;
  }
  return fields;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct RelationLoadStats {
  std::string relation;
  std::size_t lines = 0;
  std::size_t distinct_rows = 0;
  std::size_t columns = 0;
};

struct LoadReport {
  std::vector<RelationLoadStats> relations;
};

/// Loads one `<Relation>.csv` per declared relation from `dir`.
inline Database load_database(const std::filesystem::path& dir, const Schema& schema,
                              LoadReport* report = nullptr) {
  Database::Builder builder(schema);
  LoadReport local;
  for (const auto& [name, arity] : schema.arities()) {
    auto path = dir / (name + ".csv");
    if (!std::filesystem::exists(path))
      throw InputError("missing relation file " + path.string());
    std::istringstream in(read_file(path));
    std::string line;
    std::size_t line_no = 0;
    RelationLoadStats stats{name, 0, 0, arity};
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> fields;
      try {
        fields = split_csv_line(line);
      } catch (const InputError& e) {
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (fields.size() != arity)
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(arity) + " fields, found " +
                         std::to_string(fields.size()));
      Row row;
      row.reserve(arity);
      for (const auto& f : fields) row.push_back(intern(f));
      builder.add(name, std::move(row));
      ++stats.lines;
    }
    local.relations.push_back(stats);
  }
  Database db = std::move(builder).build();
  for (auto& s : local.relations) s.distinct_rows = db.relation(s.relation).size();
  if (report) *report = std::move(local);
  return db;
}

/// Reads `schema.txt` from `dir` (or `schema_path` when given) and loads.
inline Database load_database(const std::filesystem::path& dir,
                              const std::optional<std::filesystem::path>& schema_path = std::nullopt,
                              LoadReport* report = nullptr) {
  auto path = schema_path.value_or(dir / "schema.txt");
  return load_database(dir, Schema::parse(read_file(path)), report);
}

}  // namespace divcq

template <>
struct std::hash<divcq::Value> {
  std::size_t operator()(const divcq::Value& v) const { return v.hash(); }
};
