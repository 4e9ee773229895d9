#include "mibguard/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "json.hpp"

#include "mibguard/error.hpp"
#include "mibguard/rng.hpp"

namespace mibguard {
namespace {

using ordered_json = nlohmann::ordered_json;

double truncated_normal(Rng& rng, double mean, double stddev) {
  if (stddev <= 0.0) return std::max(0.0, mean);
  for (;;) {
    const double v = mean + stddev * rng.normal();
    if (v >= 0.0) return v;
  }
}

double require_number(const ordered_json& obj, const char* key,
                      const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw DataError("synthetic spec: " + where + " needs numeric '" + key + "'");
  }
  return obj[key].get<double>();
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw DataError(std::string("synthetic spec: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("classes") ||
      !doc["classes"].is_array() || doc["classes"].empty()) {
    throw DataError("synthetic spec: need a non-empty 'classes' array");
  }

  SynthSpec spec;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw DataError("synthetic spec: 'seed' must be a non-negative integer");
    }
    spec.seed = doc["seed"].get<std::uint32_t>();
  }

  std::vector<std::string> attr_names;
  std::set<ClassLabel> seen_labels;
  std::size_t total = 0;
  for (const auto& entry : doc["classes"]) {
    if (!entry.is_object() || !entry.contains("label") ||
        !entry["label"].is_string() || !entry.contains("count") ||
        !entry["count"].is_number_unsigned() || !entry.contains("attrs") ||
        !entry["attrs"].is_object()) {
      throw DataError(
          "synthetic spec: each class needs 'label', 'count' and 'attrs'");
    }
    SynthClass cls;
    const std::string label_text = entry["label"].get<std::string>();
    const auto label = parse_label(label_text);
    if (!label) {
      throw DataError("synthetic spec: unknown class label '" + label_text + "'");
    }
    cls.label = *label;
    if (!seen_labels.insert(*label).second) {
      throw DataError("synthetic spec: duplicate class '" + label_text + "'");
    }
    cls.count = entry["count"].get<std::size_t>();
    total += cls.count;

    if (attr_names.empty()) {
      for (const auto& [name, params] : entry["attrs"].items()) {
        (void)params;
        attr_names.push_back(name);
      }
      if (attr_names.empty()) {
        throw DataError("synthetic spec: class '" + label_text +
                        "' has no attributes");
      }
    }
    cls.attrs.resize(attr_names.size());
    std::size_t matched = 0;
    for (std::size_t a = 0; a < attr_names.size(); ++a) {
      const auto& attrs = entry["attrs"];
      if (!attrs.contains(attr_names[a])) {
        throw DataError("synthetic spec: class '" + label_text +
                        "' is missing attribute '" + attr_names[a] + "'");
      }
      const auto& params = attrs[attr_names[a]];
      const std::string where = label_text + "/" + attr_names[a];
      AttrDistribution dist;
      dist.mean = require_number(params, "mean", where);
      dist.stddev = require_number(params, "stddev", where);
      if (dist.mean < 0.0 || dist.stddev < 0.0) {
        throw DataError("synthetic spec: " + where +
                        ": mean and stddev must be non-negative");
      }
      cls.attrs[a] = dist;
      ++matched;
    }
    if (entry["attrs"].size() != matched) {
      throw DataError("synthetic spec: class '" + label_text +
                      "' lists attributes outside the shared schema");
    }
    spec.classes.push_back(std::move(cls));
  }
  if (total == 0) throw DataError("synthetic spec: all class counts are zero");
  spec.schema = AttributeSchema(std::move(attr_names));
  return spec;
}

std::string synth_spec_to_json(const SynthSpec& spec) {
  ordered_json doc;
  doc["classes"] = ordered_json::array();
  for (const auto& cls : spec.classes) {
    ordered_json entry;
    entry["label"] = std::string(label_name(cls.label));
    entry["count"] = cls.count;
    ordered_json attrs = ordered_json::object();
    for (std::size_t a = 0; a < spec.schema.size(); ++a) {
      attrs[spec.schema.name(a)] = {{"mean", cls.attrs[a].mean},
                                    {"stddev", cls.attrs[a].stddev}};
    }
    entry["attrs"] = std::move(attrs);
    doc["classes"].push_back(std::move(entry));
  }
  doc["seed"] = spec.seed;
  return doc.dump(2) + "\n";
}

Dataset synth_generate(const SynthSpec& spec) {
  return synth_generate(spec, spec.seed);
}

Dataset synth_generate(const SynthSpec& spec, std::uint32_t seed_override) {
  std::size_t total = 0;
  for (const auto& cls : spec.classes) {
    if (cls.attrs.size() != spec.schema.size()) {
      throw DataError("synthetic spec: attribute list out of sync with schema");
    }
    total += cls.count;
  }
  if (total == 0) throw DataError("synthetic spec: all class counts are zero");

  Rng rng(seed_override);
  std::vector<Record> records;
  records.reserve(total);
  for (const auto& cls : spec.classes) {
    for (std::size_t i = 0; i < cls.count; ++i) {
      Record rec;
      rec.label = cls.label;
      rec.values.reserve(spec.schema.size());
      for (const auto& dist : cls.attrs) {
        rec.values.push_back(truncated_normal(rng, dist.mean, dist.stddev));
      }
      records.push_back(std::move(rec));
    }
  }
  return Dataset(spec.schema, std::move(records));
}

}  // namespace mibguard
