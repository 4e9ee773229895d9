#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mibguard/class_label.hpp"

namespace mibguard {

// Ordered list of unique attribute names. Schema order is the tie-break
// order everywhere.
class AttributeSchema {
 public:
  AttributeSchema() = default;
  explicit AttributeSchema(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_[i]; }

  // Exact match first; falls back to the ICMP short/long alias
  // (iIE <-> icmpInEchos).
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const AttributeSchema&) const = default;

 private:
  std::vector<std::string> names_;
};

// The six ICMP-group counters, canonical order.
inline constexpr std::array<std::string_view, 6> kIcmpShortNames = {
    "iOM", "iIM", "iOU", "iIU", "iIE", "iOE"};
inline constexpr std::array<std::string_view, 6> kIcmpLongNames = {
    "icmpOutMsgs",        "icmpInMsgs",         "icmpOutDestUnreachs",
    "icmpInDestUnreachs", "icmpInEchos",        "icmpOutEchos"};

// Schema over the six short names.
const AttributeSchema& icmp_schema();

struct Record {
  std::vector<double> values;
  ClassLabel label = ClassLabel::Normal;

  bool operator==(const Record&) const = default;
};

// Immutable labeled numeric records aligned to a schema. Construction
// validates lengths and finiteness; instances are safe to share.
class Dataset {
 public:
  Dataset() = default;
  Dataset(AttributeSchema schema, std::vector<Record> records);

  const AttributeSchema& schema() const { return schema_; }
  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  std::size_t width() const { return schema_.size(); }
  double value(std::size_t row, std::size_t col) const {
    return records_[row].values[col];
  }
  ClassLabel label(std::size_t row) const { return records_[row].label; }

  bool operator==(const Dataset&) const = default;

 private:
  AttributeSchema schema_;
  std::vector<Record> records_;
};

// CSV ingestion: header `attr1,...,attrN,class`, comma delimiter, '.' decimal,
// label column last. Throws DataError with the offending row/column.
Dataset load_csv(std::istream& in);

// Inverse of load_csv up to shortest-round-trip real formatting.
void write_csv(const Dataset& ds, std::ostream& out);

std::array<std::size_t, kClassCount> class_distribution(const Dataset& ds);

// New dataset whose schema is exactly `names` in the given order.
Dataset select_attributes(const Dataset& ds, std::span<const std::string> names);

// Per-attribute min/max from a training partition.
struct NormalizationStats {
  std::vector<double> mins;
  std::vector<double> maxs;

  bool operator==(const NormalizationStats&) const = default;
};

NormalizationStats fit_normalization(const Dataset& ds);

// Maps into [0,1]; out-of-range values clamp; constant attributes map to 0.
double normalize_value(const NormalizationStats& stats, std::size_t attr,
                       double value);
std::vector<double> apply_normalization(const NormalizationStats& stats,
                                        std::span<const double> values);

// Stratified fold assignment: per class, fold sizes differ by at most 1;
// deterministic in (dataset order, k, seed).
struct FoldAssignment {
  int k = 0;
  std::uint32_t seed = 0;
  std::vector<int> fold_of;  // per record, in 0..k-1
};

FoldAssignment stratified_folds(const Dataset& ds, int k, std::uint32_t seed);

}  // namespace mibguard
