#include "mibguard/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "mibguard/error.hpp"
#include "mibguard/rng.hpp"

namespace mibguard {
namespace {

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && (text[begin] == ' ' || text[begin] == '\t')) ++begin;
  while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t' ||
                         text[end - 1] == '\r'))
    --end;
  return std::string(text.substr(begin, end - begin));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw DataError("row " + std::to_string(row) + ", column " +
                    std::to_string(col + 1) + ": non-numeric cell '" + cell +
                    "'");
  }
  return value;
}

void format_double(std::ostream& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.write(buf, ptr - buf);
  (void)ec;
}

}  // namespace

AttributeSchema::AttributeSchema(std::vector<std::string> names)
    : names_(std::move(names)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw DataError("attribute names must be non-empty");
    if (!seen.insert(name).second) {
      throw DataError("duplicate attribute name '" + name + "'");
    }
  }
}

std::optional<std::size_t> AttributeSchema::index_of(
    std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  // ICMP short/long alias fallback.
  for (std::size_t j = 0; j < kIcmpShortNames.size(); ++j) {
    std::string_view other;
    if (name == kIcmpShortNames[j]) {
      other = kIcmpLongNames[j];
    } else if (name == kIcmpLongNames[j]) {
      other = kIcmpShortNames[j];
    } else {
      continue;
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == other) return i;
    }
  }
  return std::nullopt;
}

const AttributeSchema& icmp_schema() {
  static const AttributeSchema schema{std::vector<std::string>(
      kIcmpShortNames.begin(), kIcmpShortNames.end())};
  return schema;
}

Dataset::Dataset(AttributeSchema schema, std::vector<Record> records)
    : schema_(std::move(schema)), records_(std::move(records)) {
  for (std::size_t r = 0; r < records_.size(); ++r) {
    if (records_[r].values.size() != schema_.size()) {
      throw DataError("record " + std::to_string(r) + " has " +
                      std::to_string(records_[r].values.size()) +
                      " values, schema has " + std::to_string(schema_.size()));
    }
    for (double v : records_[r].values) {
      if (!std::isfinite(v)) {
        throw DataError("record " + std::to_string(r) +
                        " contains a non-finite value");
      }
    }
  }
}

Dataset load_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("malformed header: empty input");
  std::vector<std::string> header = split_fields(line);
  if (header.size() < 2) {
    throw DataError("malformed header: need at least one attribute and the "
                    "class column");
  }
  header.pop_back();  // class column
  AttributeSchema schema(std::move(header));

  std::vector<Record> records;
  std::size_t row = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != schema.size() + 1) {
      throw DataError("row " + std::to_string(row) + ": expected " +
                      std::to_string(schema.size() + 1) + " fields, got " +
                      std::to_string(fields.size()));
    }
    Record rec;
    rec.values.reserve(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      rec.values.push_back(parse_cell(fields[c], row, c));
    }
    const auto label = parse_label(fields.back());
    if (!label) {
      throw DataError("row " + std::to_string(row) + ": unknown class label '" +
                      fields.back() + "'");
    }
    rec.label = *label;
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw DataError("empty dataset");
  return Dataset(std::move(schema), std::move(records));
}

void write_csv(const Dataset& ds, std::ostream& out) {
  for (std::size_t i = 0; i < ds.width(); ++i) {
    if (i > 0) out << ',';
    out << ds.schema().name(i);
  }
  out << (ds.width() > 0 ? "," : "") << "class\n";
  for (const Record& rec : ds.records()) {
    for (double v : rec.values) {
      format_double(out, v);
      out << ',';
    }
    out << label_name(rec.label) << '\n';
  }
}

std::array<std::size_t, kClassCount> class_distribution(const Dataset& ds) {
  std::array<std::size_t, kClassCount> counts{};
  for (const Record& rec : ds.records()) ++counts[label_index(rec.label)];
  return counts;
}

Dataset select_attributes(const Dataset& ds,
                          std::span<const std::string> names) {
  std::vector<std::size_t> columns;
  columns.reserve(names.size());
  for (const auto& name : names) {
    const auto idx = ds.schema().index_of(name);
    if (!idx) throw DataError("unknown attribute '" + name + "'");
    columns.push_back(*idx);
  }
  std::vector<std::string> selected;
  selected.reserve(columns.size());
  for (std::size_t c : columns) selected.push_back(ds.schema().name(c));

  std::vector<Record> records;
  records.reserve(ds.size());
  for (const Record& rec : ds.records()) {
    Record out;
    out.label = rec.label;
    out.values.reserve(columns.size());
    for (std::size_t c : columns) out.values.push_back(rec.values[c]);
    records.push_back(std::move(out));
  }
  return Dataset(AttributeSchema(std::move(selected)), std::move(records));
}

NormalizationStats fit_normalization(const Dataset& ds) {
  if (ds.size() == 0) throw DataError("cannot fit normalization on no records");
  NormalizationStats stats;
  stats.mins.assign(ds.width(), 0.0);
  stats.maxs.assign(ds.width(), 0.0);
  for (std::size_t a = 0; a < ds.width(); ++a) {
    double lo = ds.value(0, a);
    double hi = lo;
    for (std::size_t r = 1; r < ds.size(); ++r) {
      lo = std::min(lo, ds.value(r, a));
      hi = std::max(hi, ds.value(r, a));
    }
    stats.mins[a] = lo;
    stats.maxs[a] = hi;
  }
  return stats;
}

double normalize_value(const NormalizationStats& stats, std::size_t attr,
                       double value) {
  const double lo = stats.mins[attr];
  const double hi = stats.maxs[attr];
  if (hi <= lo) return 0.0;  // constant attribute
  const double scaled = (value - lo) / (hi - lo);
  return std::clamp(scaled, 0.0, 1.0);
}

std::vector<double> apply_normalization(const NormalizationStats& stats,
                                        std::span<const double> values) {
  std::vector<double> out(values.size());
  for (std::size_t a = 0; a < values.size(); ++a) {
    out[a] = normalize_value(stats, a, values[a]);
  }
  return out;
}

FoldAssignment stratified_folds(const Dataset& ds, int k, std::uint32_t seed) {
  if (k < 2) throw DataError("fold count must be at least 2");
  if (static_cast<std::size_t>(k) > ds.size()) {
    throw DataError("fold count " + std::to_string(k) + " exceeds record count " +
                    std::to_string(ds.size()));
  }
  std::array<std::vector<std::size_t>, kClassCount> by_class;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    by_class[label_index(ds.label(r))].push_back(r);
  }

  FoldAssignment assignment;
  assignment.k = k;
  assignment.seed = seed;
  assignment.fold_of.assign(ds.size(), 0);

  Rng rng(seed);
  // Deal each class round-robin; the fold counter rolls across classes so the
  // global fold sizes stay balanced too.
  int next_fold = 0;
  for (auto& members : by_class) {
    if (members.empty()) continue;
    rng.shuffle(members);
    for (std::size_t m : members) {
      assignment.fold_of[m] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  return assignment;
}

}  // namespace mibguard
