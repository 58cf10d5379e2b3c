#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "smrec/common.hpp"

namespace smrec {

/// Bidirectional map between external ids and dense indices.
/// Dense indices follow ascending external id, so ordering by index is
/// ordering by the original id.
class IdIndex {
public:
  IdIndex() = default;
  /// Builds the index from an arbitrary id list; duplicates are dropped.
  explicit IdIndex(std::vector<ExternalId> ids);

  std::size_t size() const noexcept { return ids_.size(); }
  ExternalId external(Index i) const { return ids_.at(i); }
  std::optional<Index> find(ExternalId id) const;
  const std::vector<ExternalId>& ids() const noexcept { return ids_; }

  friend bool operator==(const IdIndex& a, const IdIndex& b) { return a.ids_ == b.ids_; }

private:
  std::vector<ExternalId> ids_;
  std::unordered_map<ExternalId, Index> lookup_;
};

struct RelationEntry {
  Index row;
  Index col;

  friend auto operator<=>(const RelationEntry&, const RelationEntry&) = default;
};

/// Sparse boolean user-item incidence matrix. Rows are users, columns items.
/// Immutable after construction; both the row-major and column-major views are
/// kept so either proximity graph can be built without a transpose.
class BinaryRelation {
public:
  BinaryRelation() = default;
  /// Entries are deduplicated; any index outside the id maps throws DataError.
  BinaryRelation(IdIndex rows, IdIndex cols, std::vector<RelationEntry> entries);

  std::size_t rows() const noexcept { return row_ids_.size(); }
  std::size_t cols() const noexcept { return col_ids_.size(); }
  std::size_t entry_count() const noexcept { return row_items_.size(); }
  bool empty() const noexcept { return row_items_.empty(); }

  /// Sorted column indices of row `r` (a user's profile).
  std::span<const Index> row(Index r) const;
  /// Sorted row indices of column `c` (the users of an item).
  std::span<const Index> col(Index c) const;
  bool contains(Index r, Index c) const;

  const IdIndex& row_ids() const noexcept { return row_ids_; }
  const IdIndex& col_ids() const noexcept { return col_ids_; }

  /// All entries in row-major order.
  std::vector<RelationEntry> entries() const;

  /// FNV-1a digest over the id maps and entry set.
  std::uint64_t checksum() const;

private:
  IdIndex row_ids_;
  IdIndex col_ids_;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<Index> row_items_;
  std::vector<std::size_t> col_offsets_{0};
  std::vector<Index> col_items_;
};

/// One parsed line of a MovieLens ratings file.
struct RatingRecord {
  ExternalId user;
  ExternalId item;
  std::int64_t rating;
  std::int64_t timestamp;
};

/// Decides which ratings count as a "1" in the binary relation.
/// The default counts every rated pair.
struct BinarizationPolicy {
  std::optional<std::int64_t> min_rating;

  bool accepts(std::int64_t rating) const { return !min_rating || rating >= *min_rating; }
};

/// Parses tab-separated `user item rating timestamp` lines. Blank lines are
/// skipped; anything else malformed throws ParseError with the 1-based line.
std::vector<RatingRecord> parse_rating_records(std::istream& in);

/// Parses and binarizes a ratings stream. Duplicate (user, item) lines collapse.
/// Throws DataError on empty input.
BinaryRelation parse_ratings(std::istream& in, const BinarizationPolicy& policy = {});

/// Binarizes records against given id maps. Records whose ids are missing from
/// the maps throw DataError.
BinaryRelation relation_from_records(const std::vector<RatingRecord>& records,
                                     const IdIndex& users, const IdIndex& items,
                                     const BinarizationPolicy& policy = {});

/// Writes the entry set back in ratings format (rating 1, timestamp 0).
void write_ratings(std::ostream& out, const BinaryRelation& relation);

/// Opens and parses a ratings file; the path is named in any error.
BinaryRelation load_ratings(const std::filesystem::path& path,
                            const BinarizationPolicy& policy = {});

struct RandomHoldout {
  double fraction = 0.2;
  std::uint64_t seed = 42;
};

struct SplitWarning {
  ExternalId user;
  std::string message;
};

struct Split {
  BinaryRelation train;
  BinaryRelation test;
  std::vector<SplitWarning> warnings;
};

/// Seeded random holdout over entries. round(fraction * |R|) entries go to the
/// test side. Users left without any training entry are reported as warnings.
Split split(const BinaryRelation& relation, const RandomHoldout& holdout);

/// Loads a published base/test file pair (e.g. u1.base / u1.test). Both sides
/// share id maps built from the union of the two files.
Split load_file_pair(const std::filesystem::path& base, const std::filesystem::path& test,
                     const BinarizationPolicy& policy = {});

}  // namespace smrec
