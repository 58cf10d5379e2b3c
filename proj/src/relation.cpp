#include "smrec/relation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string_view>

#include "smrec/checksum.hpp"

namespace smrec {

IdIndex::IdIndex(std::vector<ExternalId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  lookup_.reserve(ids_.size());
  for (Index i = 0; i < ids_.size(); ++i) lookup_.emplace(ids_[i], i);
}

std::optional<Index> IdIndex::find(ExternalId id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

namespace {

void build_csr(std::size_t count, const std::vector<RelationEntry>& sorted, bool by_row,
               std::vector<std::size_t>& offsets, std::vector<Index>& items) {
  offsets.assign(count + 1, 0);
  for (const auto& e : sorted) ++offsets[(by_row ? e.row : e.col) + 1];
  for (std::size_t i = 0; i < count; ++i) offsets[i + 1] += offsets[i];
  items.resize(sorted.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& e : sorted) {
    const Index key = by_row ? e.row : e.col;
    items[cursor[key]++] = by_row ? e.col : e.row;
  }
}

}  // namespace

BinaryRelation::BinaryRelation(IdIndex rows, IdIndex cols, std::vector<RelationEntry> entries)
    : row_ids_(std::move(rows)), col_ids_(std::move(cols)) {
  for (const auto& e : entries) {
    if (e.row >= row_ids_.size() || e.col >= col_ids_.size())
      throw DataError("relation entry (" + std::to_string(e.row) + ", " +
                      std::to_string(e.col) + ") outside " + std::to_string(row_ids_.size()) +
                      "x" + std::to_string(col_ids_.size()));
  }
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

  // Row-major order from the sort gives sorted columns within each row; a
  // stable pass keyed by column gives sorted rows within each column.
  build_csr(row_ids_.size(), entries, true, row_offsets_, row_items_);
  build_csr(col_ids_.size(), entries, false, col_offsets_, col_items_);
}

std::span<const Index> BinaryRelation::row(Index r) const {
  return {row_items_.data() + row_offsets_.at(r), row_offsets_.at(r + 1) - row_offsets_[r]};
}

std::span<const Index> BinaryRelation::col(Index c) const {
  return {col_items_.data() + col_offsets_.at(c), col_offsets_.at(c + 1) - col_offsets_[c]};
}

bool BinaryRelation::contains(Index r, Index c) const {
  auto items = row(r);
  return std::binary_search(items.begin(), items.end(), c);
}

std::vector<RelationEntry> BinaryRelation::entries() const {
  std::vector<RelationEntry> out;
  out.reserve(entry_count());
  for (Index r = 0; r < rows(); ++r)
    for (Index c : row(r)) out.push_back({r, c});
  return out;
}

std::uint64_t BinaryRelation::checksum() const {
  Fnv1a hash;
  hash.add_value(static_cast<std::uint64_t>(rows()));
  hash.add_value(static_cast<std::uint64_t>(cols()));
  for (ExternalId id : row_ids_.ids()) hash.add_value(id);
  for (ExternalId id : col_ids_.ids()) hash.add_value(id);
  for (Index r = 0; r < rows(); ++r) {
    for (Index c : row(r)) {
      hash.add_value(r);
      hash.add_value(c);
    }
  }
  return hash.digest();
}

namespace {

std::int64_t parse_field(std::string_view field, std::size_t line_no, const char* name) {
  std::int64_t value = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty())
    throw ParseError(line_no, std::string("field '") + name + "' is not an integer: '" +
                                  std::string(field) + "'");
  return value;
}

}  // namespace

std::vector<RatingRecord> parse_rating_records(std::istream& in) {
  static constexpr const char* kNames[] = {"user_id", "item_id", "rating", "timestamp"};
  std::vector<RatingRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::string_view fields[4];
    std::size_t count = 0;
    std::size_t start = 0;
    for (;;) {
      const auto tab = view.find('\t', start);
      const auto piece = view.substr(start, tab == std::string_view::npos ? tab : tab - start);
      if (count < 4) fields[count] = piece;
      ++count;
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (count != 4)
      throw ParseError(line_no, "expected 4 tab-separated fields, found " + std::to_string(count));

    records.push_back({parse_field(fields[0], line_no, kNames[0]),
                       parse_field(fields[1], line_no, kNames[1]),
                       parse_field(fields[2], line_no, kNames[2]),
                       parse_field(fields[3], line_no, kNames[3])});
  }
  return records;
}

BinaryRelation relation_from_records(const std::vector<RatingRecord>& records,
                                     const IdIndex& users, const IdIndex& items,
                                     const BinarizationPolicy& policy) {
  std::vector<RelationEntry> entries;
  entries.reserve(records.size());
  for (const auto& rec : records) {
    if (!policy.accepts(rec.rating)) continue;
    auto u = users.find(rec.user);
    auto i = items.find(rec.item);
    if (!u || !i)
      throw DataError("rating (" + std::to_string(rec.user) + ", " + std::to_string(rec.item) +
                      ") references an unknown id");
    entries.push_back({*u, *i});
  }
  return BinaryRelation(users, items, std::move(entries));
}

namespace {

std::pair<IdIndex, IdIndex> index_records(const std::vector<RatingRecord>& records,
                                          const BinarizationPolicy& policy) {
  std::vector<ExternalId> users, items;
  users.reserve(records.size());
  items.reserve(records.size());
  for (const auto& rec : records) {
    if (!policy.accepts(rec.rating)) continue;
    users.push_back(rec.user);
    items.push_back(rec.item);
  }
  return {IdIndex(std::move(users)), IdIndex(std::move(items))};
}

}  // namespace

BinaryRelation parse_ratings(std::istream& in, const BinarizationPolicy& policy) {
  const auto records = parse_rating_records(in);
  if (records.empty()) throw DataError("ratings input is empty");
  auto [users, items] = index_records(records, policy);
  if (users.size() == 0) throw DataError("no rating passes the binarization policy");
  return relation_from_records(records, users, items, policy);
}

void write_ratings(std::ostream& out, const BinaryRelation& relation) {
  for (Index r = 0; r < relation.rows(); ++r)
    for (Index c : relation.row(r))
      out << relation.row_ids().external(r) << '\t' << relation.col_ids().external(c)
          << "\t1\t0\n";
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::vector<RatingRecord> read_records(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_rating_records(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

}  // namespace

BinaryRelation load_ratings(const std::filesystem::path& path, const BinarizationPolicy& policy) {
  auto in = open_input(path);
  try {
    return parse_ratings(in, policy);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

namespace {

std::vector<SplitWarning> empty_profile_warnings(const BinaryRelation& full,
                                                 const BinaryRelation& train) {
  std::vector<SplitWarning> warnings;
  for (Index u = 0; u < train.rows(); ++u) {
    if (train.row(u).empty() && !full.row(u).empty())
      warnings.push_back({train.row_ids().external(u),
                          "no training entries; user skipped in per-user evaluation"});
  }
  return warnings;
}

}  // namespace

Split split(const BinaryRelation& relation, const RandomHoldout& holdout) {
  if (!(holdout.fraction > 0.0 && holdout.fraction < 1.0))
    throw UsageError("holdout fraction must lie in (0, 1), got " + std::to_string(holdout.fraction));

  auto entries = relation.entries();
  // Fisher-Yates over the raw engine output keeps the permutation identical
  // across standard library implementations.
  std::mt19937_64 rng(holdout.seed);
  for (std::size_t i = entries.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(entries[i - 1], entries[j]);
  }
  const auto test_count = static_cast<std::size_t>(
      std::llround(holdout.fraction * static_cast<double>(entries.size())));

  std::vector<RelationEntry> test(entries.begin(), entries.begin() + test_count);
  std::vector<RelationEntry> train(entries.begin() + test_count, entries.end());

  Split out{BinaryRelation(relation.row_ids(), relation.col_ids(), std::move(train)),
            BinaryRelation(relation.row_ids(), relation.col_ids(), std::move(test)),
            {}};
  out.warnings = empty_profile_warnings(relation, out.train);
  return out;
}

Split load_file_pair(const std::filesystem::path& base, const std::filesystem::path& test,
                     const BinarizationPolicy& policy) {
  const auto base_records = read_records(base);
  const auto test_records = read_records(test);
  if (base_records.empty()) throw DataError("'" + base.string() + "' is empty");
  if (test_records.empty()) throw DataError("'" + test.string() + "' is empty");

  std::vector<RatingRecord> all(base_records);
  all.insert(all.end(), test_records.begin(), test_records.end());
  auto [users, items] = index_records(all, policy);

  Split out{relation_from_records(base_records, users, items, policy),
            relation_from_records(test_records, users, items, policy),
            {}};

  // A pair present in both files belongs to training only, keeping the
  // partition disjoint.
  std::vector<RelationEntry> test_entries;
  for (const auto& e : out.test.entries())
    if (!out.train.contains(e.row, e.col)) test_entries.push_back(e);
  if (test_entries.size() != out.test.entry_count())
    out.test = BinaryRelation(users, items, std::move(test_entries));

  BinaryRelation full = relation_from_records(all, users, items, policy);
  out.warnings = empty_profile_warnings(full, out.train);
  return out;
}

}  // namespace smrec
