#include "mibguard/model_io.hpp"

#include <utility>

#include "json.hpp"

#include "mibguard/error.hpp"

namespace mibguard {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json model_to_obj(const Model& model);

std::string class_key(std::size_t c) {
  return std::string(label_name(static_cast<ClassLabel>(c)));
}

ClassLabel parse_class(const std::string& text) {
  const auto label = parse_label(text);
  if (!label) throw DataError("model file: unknown class '" + text + "'");
  return *label;
}

ordered_json bayes_structure(const BayesModel& m) {
  ordered_json priors = ordered_json::object();
  ordered_json gaussians = ordered_json::object();
  for (std::size_t c = 0; c < kClassCount; ++c) {
    if (m.priors()[c] <= 0.0) continue;
    priors[class_key(c)] = m.priors()[c];
    ordered_json attrs = ordered_json::array();
    for (std::size_t a = 0; a < m.schema().size(); ++a) {
      attrs.push_back({{"mean", m.means()[c][a]},
                       {"variance", m.variances()[c][a]}});
    }
    gaussians[class_key(c)] = std::move(attrs);
  }
  return {{"priors", std::move(priors)}, {"gaussians", std::move(gaussians)}};
}

ordered_json tree_structure(const TreeModel& m) {
  ordered_json nodes = ordered_json::array();
  for (const TreeNode& node : m.nodes()) {
    if (node.is_leaf()) {
      ordered_json counts = ordered_json::object();
      for (std::size_t c = 0; c < kClassCount; ++c) {
        if (node.counts[c] > 0) counts[class_key(c)] = node.counts[c];
      }
      nodes.push_back({{"counts", std::move(counts)}});
    } else {
      nodes.push_back({{"attribute", m.schema().name(node.attribute)},
                       {"threshold", node.threshold},
                       {"left", node.left},
                       {"right", node.right}});
    }
  }
  return {{"nodes", std::move(nodes)}};
}

ordered_json rules_structure(const RulesModel& m) {
  ordered_json rules = ordered_json::array();
  for (const Rule& rule : m.rules()) {
    ordered_json conditions = ordered_json::array();
    for (const RuleCondition& cond : rule.conditions) {
      conditions.push_back({{"attribute", m.schema().name(cond.attribute)},
                            {"op", cond.is_upper ? "<=" : ">"},
                            {"threshold", cond.threshold}});
    }
    rules.push_back({{"conditions", std::move(conditions)},
                     {"class", class_key(label_index(rule.label))}});
  }
  return {{"rules", std::move(rules)},
          {"default", class_key(label_index(m.default_label()))}};
}

ordered_json model_to_obj(const Model& model) {
  ordered_json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = std::string(kind_name(model.kind()));
  doc["schema"] = model.schema().names();
  ordered_json classes = ordered_json::array();
  for (std::size_t c = 0; c < kClassCount; ++c) {
    if (model.trained_classes()[c]) classes.push_back(class_key(c));
  }
  doc["classes"] = std::move(classes);
  doc["normalization"] = nullptr;
  doc["params"] = ordered_json::object();

  switch (model.kind()) {
    case ClassifierKind::Bayes: {
      const auto& m = static_cast<const BayesModel&>(model);
      doc["params"]["variance_floor"] = m.variance_floor();
      doc["structure"] = bayes_structure(m);
      break;
    }
    case ClassifierKind::Ibk: {
      const auto& m = static_cast<const IbkModel&>(model);
      doc["params"]["k"] = m.k();
      doc["normalization"] = {{"mins", m.stats().mins},
                              {"maxs", m.stats().maxs}};
      ordered_json labels = ordered_json::array();
      for (ClassLabel l : m.labels()) labels.push_back(class_key(label_index(l)));
      doc["structure"] = {{"records", m.records()}, {"labels", std::move(labels)}};
      break;
    }
    case ClassifierKind::Tree: {
      doc["structure"] = tree_structure(static_cast<const TreeModel&>(model));
      break;
    }
    case ClassifierKind::Rules: {
      doc["structure"] = rules_structure(static_cast<const RulesModel&>(model));
      break;
    }
    case ClassifierKind::Bagging: {
      const auto& m = static_cast<const BaggingModel&>(model);
      doc["params"]["iterations"] = m.iterations();
      doc["params"]["base"] = to_string(m.base());
      doc["params"]["seed"] = m.seed();
      ordered_json members = ordered_json::array();
      for (const auto& member : m.members()) {
        members.push_back(model_to_obj(*member));
      }
      doc["structure"] = {{"members", std::move(members)}};
      break;
    }
  }
  return doc;
}

int attribute_index(const AttributeSchema& schema, const std::string& name) {
  const auto idx = schema.index_of(name);
  if (!idx) throw DataError("model file: unknown attribute '" + name + "'");
  return static_cast<int>(*idx);
}

std::unique_ptr<Model> model_from_obj(const ordered_json& doc) {
  if (!doc.is_object() || !doc.contains("format_version") ||
      !doc["format_version"].is_number_integer()) {
    throw DataError("model file: missing format_version");
  }
  if (doc["format_version"].get<int>() != kModelFormatVersion) {
    throw DataError("model file: unsupported format_version " +
                    doc["format_version"].dump());
  }
  for (const char* key : {"kind", "schema", "structure"}) {
    if (!doc.contains(key)) {
      throw DataError(std::string("model file: missing '") + key + "'");
    }
  }
  AttributeSchema schema(doc["schema"].get<std::vector<std::string>>());
  const std::string kind = doc["kind"].get<std::string>();
  const auto& structure = doc["structure"];

  if (kind == "bayes") {
    std::array<double, kClassCount> priors{};
    std::array<std::vector<double>, kClassCount> means;
    std::array<std::vector<double>, kClassCount> variances;
    for (const auto& [name, value] : structure.at("priors").items()) {
      priors[label_index(parse_class(name))] = value.get<double>();
    }
    for (const auto& [name, attrs] : structure.at("gaussians").items()) {
      const std::size_t c = label_index(parse_class(name));
      if (attrs.size() != schema.size()) {
        throw DataError("model file: gaussian list out of sync with schema");
      }
      for (const auto& entry : attrs) {
        means[c].push_back(entry.at("mean").get<double>());
        variances[c].push_back(entry.at("variance").get<double>());
      }
    }
    const double floor = doc.contains("params") && doc["params"].contains("variance_floor")
                             ? doc["params"]["variance_floor"].get<double>()
                             : 1e-9;
    return std::make_unique<BayesModel>(std::move(schema), priors,
                                        std::move(means), std::move(variances),
                                        floor);
  }
  if (kind == "ibk") {
    const int k = doc.at("params").at("k").get<int>();
    NormalizationStats stats;
    stats.mins = doc.at("normalization").at("mins").get<std::vector<double>>();
    stats.maxs = doc.at("normalization").at("maxs").get<std::vector<double>>();
    auto records = structure.at("records").get<std::vector<std::vector<double>>>();
    std::vector<ClassLabel> labels;
    for (const auto& entry : structure.at("labels")) {
      labels.push_back(parse_class(entry.get<std::string>()));
    }
    if (labels.size() != records.size()) {
      throw DataError("model file: record/label count mismatch");
    }
    return std::make_unique<IbkModel>(std::move(schema), k, std::move(stats),
                                      std::move(records), std::move(labels));
  }
  if (kind == "j48") {
    std::vector<TreeNode> nodes;
    for (const auto& entry : structure.at("nodes")) {
      TreeNode node;
      if (entry.contains("counts")) {
        for (const auto& [name, count] : entry["counts"].items()) {
          node.counts[label_index(parse_class(name))] =
              count.get<std::uint64_t>();
        }
      } else {
        node.attribute =
            attribute_index(schema, entry.at("attribute").get<std::string>());
        node.threshold = entry.at("threshold").get<double>();
        node.left = entry.at("left").get<std::int32_t>();
        node.right = entry.at("right").get<std::int32_t>();
        if (node.left < 0 || node.right < 0 ||
            static_cast<std::size_t>(node.left) >= structure["nodes"].size() ||
            static_cast<std::size_t>(node.right) >= structure["nodes"].size()) {
          throw DataError("model file: tree child index out of range");
        }
      }
      nodes.push_back(node);
    }
    return std::make_unique<TreeModel>(std::move(schema), std::move(nodes));
  }
  if (kind == "rules") {
    std::vector<Rule> rules;
    for (const auto& entry : structure.at("rules")) {
      Rule rule;
      rule.label = parse_class(entry.at("class").get<std::string>());
      for (const auto& cond_doc : entry.at("conditions")) {
        RuleCondition cond;
        cond.attribute =
            attribute_index(schema, cond_doc.at("attribute").get<std::string>());
        const std::string op = cond_doc.at("op").get<std::string>();
        if (op != "<=" && op != ">") {
          throw DataError("model file: unknown rule operator '" + op + "'");
        }
        cond.is_upper = (op == "<=");
        cond.threshold = cond_doc.at("threshold").get<double>();
        rule.conditions.push_back(cond);
      }
      rules.push_back(std::move(rule));
    }
    const ClassLabel default_label =
        parse_class(structure.at("default").get<std::string>());
    return std::make_unique<RulesModel>(std::move(schema), std::move(rules),
                                        default_label);
  }
  if (kind == "bagging") {
    const auto& params = doc.at("params");
    const int iterations = params.at("iterations").get<int>();
    const std::uint32_t seed = params.at("seed").get<std::uint32_t>();
    const ClassifierSpec base =
        parse_classifier_spec(params.at("base").get<std::string>());
    std::vector<std::unique_ptr<Model>> members;
    for (const auto& member_doc : structure.at("members")) {
      members.push_back(model_from_obj(member_doc));
    }
    return std::make_unique<BaggingModel>(std::move(schema), std::move(members),
                                          base, iterations, seed);
  }
  throw DataError("model file: unknown kind '" + kind + "'");
}

}  // namespace

std::string model_to_json(const Model& model) {
  return model_to_obj(model).dump(2) + "\n";
}

std::unique_ptr<Model> model_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw DataError(std::string("model file: invalid JSON: ") + e.what());
  }
  try {
    return model_from_obj(doc);
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

}  // namespace mibguard
