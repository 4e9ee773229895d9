#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mibguard/classifiers.hpp"
#include "mibguard/collector.hpp"
#include "mibguard/dataset.hpp"
#include "mibguard/error.hpp"
#include "mibguard/eval.hpp"
#include "mibguard/features.hpp"
#include "mibguard/model_io.hpp"
#include "mibguard/synth.hpp"

namespace mibguard::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::uint32_t parse_seed_text(std::string_view text, const char* what) {
  std::uint32_t seed = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError(std::string("invalid ") + what + " '" + std::string(text) +
                     "'");
  }
  return seed;
}

// --seed beats MIBGUARD_SEED beats the fixed default.
std::uint32_t default_seed() {
  if (const char* env = std::getenv("MIBGUARD_SEED")) {
    return parse_seed_text(env, "MIBGUARD_SEED");
  }
  return 42;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return load_csv(in);
}

void write_output(const std::string& content, const std::string& path,
                  std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + path + "'");
  file << content;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return parts;
}

std::vector<AttributeScore> run_evaluator(const Dataset& ds,
                                          const std::string& method,
                                          int knn_neighbors,
                                          std::size_t sample_count,
                                          std::uint32_t seed) {
  if (method == "infogain") return info_gain_scores(ds);
  if (method == "correlation") return correlation_scores(ds);
  if (method == "relieff") {
    ReliefFParams params;
    params.k_neighbors = knn_neighbors;
    params.sample_count = sample_count;
    params.seed = seed;
    return relieff_scores(ds, params);
  }
  throw UsageError("unknown evaluator '" + method + "'");
}

// --attrs grammar: explicit comma-separated names, or top:N:evaluator to
// fuse ranking and selection.
Dataset apply_attrs(const Dataset& ds, const std::string& attrs,
                    std::uint32_t seed) {
  if (attrs.empty()) return ds;
  if (attrs.rfind("top:", 0) == 0) {
    const auto parts = split_commas(attrs);  // no commas expected
    const std::string spec = parts[0];
    const std::size_t second_colon = spec.find(':', 4);
    if (parts.size() != 1 || second_colon == std::string::npos) {
      throw UsageError("--attrs top form is top:N:evaluator");
    }
    const std::string count_text = spec.substr(4, second_colon - 4);
    std::size_t count = 0;
    const auto [ptr, ec] = std::from_chars(
        count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc{} || ptr != count_text.data() + count_text.size() ||
        count < 1) {
      throw UsageError("--attrs top form needs a positive N");
    }
    const std::string method = spec.substr(second_colon + 1);
    const auto scores = run_evaluator(ds, method, 10, 0, seed);
    const auto ranking = rank(method, scores, ds.schema());
    const auto names = top_n(ranking, count);
    return select_attributes(ds, names);
  }
  return select_attributes(ds, split_commas(attrs));
}

std::string distribution_json(const ClassDistribution& dist) {
  ordered_json obj = ordered_json::object();
  for (std::size_t c = 0; c < kClassCount; ++c) {
    obj[std::string(label_name(static_cast<ClassLabel>(c)))] = dist[c];
  }
  return obj.dump();
}

// ---------------------------------------------------------------------------
// Subcommand options

struct SynthOptions {
  std::string spec_path;
  std::string out_path;
};

struct RankOptions {
  std::string data_path;
  std::string method;
  int knn_neighbors = 10;
  std::size_t sample_count = 0;
  std::size_t top = 0;
  std::string format = "text";
  std::string out_path;
};

struct TrainOptions {
  std::string data_path;
  std::string classifier;
  std::string attrs;
  std::string out_path;
};

struct EvalOptions {
  std::string data_path;
  std::string classifier;
  std::string attrs;
  int folds = 10;
  std::string format = "text";
  std::string out_path;
};

struct PredictOptions {
  std::string model_path;
  std::string format = "text";
  std::string out_path;
};

struct CollectOptions {
  std::string model_path;
  std::string host = "127.0.0.1";
  std::uint16_t port = 161;
  std::string community = "public";
  double interval_s = 10.0;
  std::size_t windows = 0;
  int timeout_ms = 1000;
  int retries = 1;
  std::string out_path;
};

int do_synth(const SynthOptions& opt, bool seed_given, std::uint32_t seed,
             std::ostream& out) {
  const SynthSpec spec = parse_synth_spec(read_file(opt.spec_path));
  const Dataset ds =
      seed_given ? synth_generate(spec, seed) : synth_generate(spec);
  std::ostringstream csv;
  write_csv(ds, csv);
  write_output(csv.str(), opt.out_path, out);
  return 0;
}

int do_rank(const RankOptions& opt, std::uint32_t seed, std::ostream& out) {
  const Dataset ds = load_dataset(opt.data_path);
  const auto scores = run_evaluator(ds, opt.method, opt.knn_neighbors,
                                    opt.sample_count, seed);
  AttributeRanking ranking = rank(opt.method, scores, ds.schema());
  if (opt.top > 0) {
    top_n(ranking, opt.top);  // validates the range
    ranking.scores.resize(opt.top);
  }
  const std::string rendered = opt.format == "json" ? ranking_to_json(ranking)
                                                    : ranking_to_text(ranking);
  write_output(rendered, opt.out_path, out);
  return 0;
}

int do_train(const TrainOptions& opt, std::uint32_t seed, std::ostream& out) {
  Dataset ds = load_dataset(opt.data_path);
  ds = apply_attrs(ds, opt.attrs, seed);
  const ClassifierSpec spec = parse_classifier_spec(opt.classifier);
  const auto model = train(ds, spec, seed);
  write_output(model_to_json(*model), opt.out_path, out);
  return 0;
}

int do_eval(const EvalOptions& opt, std::uint32_t seed, std::ostream& out) {
  Dataset ds = load_dataset(opt.data_path);
  ds = apply_attrs(ds, opt.attrs, seed);
  const ClassifierSpec spec = parse_classifier_spec(opt.classifier);
  const EvalReport report = evaluate_cv(ds, spec, opt.folds, seed);
  const std::string rendered = opt.format == "json"
                                   ? report_to_json(report)
                                   : render_report_text(report);
  write_output(rendered, opt.out_path, out);
  return 0;
}

int do_predict(const PredictOptions& opt, std::istream& in, std::ostream& out) {
  const auto model = model_from_json(read_file(opt.model_path));

  std::ofstream file;
  std::ostream* sink = &out;
  if (!opt.out_path.empty()) {
    file.open(opt.out_path, std::ios::binary);
    if (!file) throw DataError("cannot write '" + opt.out_path + "'");
    sink = &file;
  }

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> values;
    for (const std::string& cell : split_commas(line)) {
      double v = 0.0;
      const auto [ptr, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw DataError("line " + std::to_string(line_no) +
                        ": non-numeric value '" + cell + "'");
      }
      values.push_back(v);
    }
    const ClassLabel label = model->predict(values);
    if (opt.format == "json") {
      const ClassDistribution dist = model->predict_distribution(values);
      ordered_json obj;
      obj["label"] = std::string(label_name(label));
      obj["distribution"] = ordered_json::parse(distribution_json(dist));
      *sink << obj.dump() << "\n";
    } else {
      *sink << label_name(label) << "\n";
    }
  }
  return 0;
}

int do_collect(const CollectOptions& opt, std::ostream& out) {
  if (opt.interval_s < 1.0) {
    throw UsageError("--interval must be at least 1 second");
  }
  if (opt.windows < 1) throw UsageError("--windows must be at least 1");
  const auto model = model_from_json(read_file(opt.model_path));

  AgentEndpoint endpoint;
  endpoint.host = opt.host;
  endpoint.port = opt.port;
  endpoint.community = opt.community;
  endpoint.timeout = std::chrono::milliseconds(opt.timeout_ms);
  endpoint.retries = opt.retries;

  std::ofstream file;
  std::ostream* sink = &out;
  if (!opt.out_path.empty()) {
    file.open(opt.out_path, std::ios::binary);
    if (!file) throw DataError("cannot write '" + opt.out_path + "'");
    sink = &file;
  }

  std::size_t gaps = 0;
  const auto emit = [&](const StreamEvent& event) {
    ordered_json line;
    if (event.is_gap) {
      ++gaps;
      line["gap"] = true;
      line["reason"] = event.gap_reason;
    } else {
      line["window_start"] = event.window.window_start_ms;
      line["window_end"] = event.window.window_end_ms;
      ordered_json deltas = ordered_json::object();
      for (std::size_t i = 0; i < kIcmpShortNames.size(); ++i) {
        deltas[std::string(kIcmpShortNames[i])] = event.window.deltas[i];
      }
      line["deltas"] = std::move(deltas);
      line["label"] = std::string(label_name(event.label));
      line["distribution"] = ordered_json::parse(distribution_json(event.distribution));
    }
    *sink << line.dump() << "\n";
    sink->flush();
  };

  const auto interval = std::chrono::milliseconds(
      static_cast<std::int64_t>(opt.interval_s * 1000.0));
  const std::size_t events =
      classify_stream(endpoint, *model, interval, opt.windows, emit);
  if (events == 0 && gaps > 0) {
    throw NetworkError("no windows could be classified (" +
                       std::to_string(gaps) + " failed polls)");
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  CLI::App app{"SNMP-MIB ICMP traffic classification toolkit"};
  app.name("mibguard");
  app.require_subcommand(1);

  std::uint32_t seed = 0;
  bool seed_given = false;

  SynthOptions synth_opt;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic labeled CSV dataset");
  synth_cmd->add_option("--spec", synth_opt.spec_path,
                        "Synthetic spec JSON file")->required();
  synth_cmd->add_option("--out", synth_opt.out_path, "Output CSV path");

  RankOptions rank_opt;
  auto* rank_cmd =
      app.add_subcommand("rank", "Score and rank attributes by an evaluator");
  rank_cmd->add_option("--data", rank_opt.data_path, "Dataset CSV")->required();
  rank_cmd->add_option("--method", rank_opt.method, "Attribute evaluator")
      ->required()
      ->check(CLI::IsMember({"infogain", "relieff", "correlation"}));
  rank_cmd->add_option("--knn", rank_opt.knn_neighbors,
                       "ReliefF neighbor count");
  rank_cmd->add_option("--sample", rank_opt.sample_count,
                       "ReliefF sample count (0 = all instances)");
  rank_cmd->add_option("--top", rank_opt.top, "Keep only the top N attributes");
  rank_cmd->add_option("--format", rank_opt.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  rank_cmd->add_option("--out", rank_opt.out_path, "Output path");

  TrainOptions train_opt;
  auto* train_cmd = app.add_subcommand("train", "Train a classifier");
  train_cmd->add_option("--data", train_opt.data_path, "Dataset CSV")->required();
  train_cmd
      ->add_option("--classifier", train_opt.classifier,
                   "bayes | ibk[:k] | j48[:min_leaf] | rules[:min_cov] | "
                   "bagging[:iters[:base]]")
      ->required();
  train_cmd->add_option("--attrs", train_opt.attrs,
                        "Attribute names or top:N:evaluator");
  train_cmd->add_option("--out", train_opt.out_path, "Model JSON path");

  EvalOptions eval_opt;
  auto* eval_cmd =
      app.add_subcommand("eval", "Cross-validated evaluation report");
  eval_cmd->add_option("--data", eval_opt.data_path, "Dataset CSV")->required();
  eval_cmd
      ->add_option("--classifier", eval_opt.classifier, "Classifier spec")
      ->required();
  eval_cmd->add_option("--attrs", eval_opt.attrs,
                       "Attribute names or top:N:evaluator");
  eval_cmd->add_option("--folds", eval_opt.folds, "Cross-validation folds");
  eval_cmd->add_option("--format", eval_opt.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  eval_cmd->add_option("--out", eval_opt.out_path, "Output path");

  PredictOptions predict_opt;
  auto* predict_cmd = app.add_subcommand(
      "predict", "Classify comma-separated value rows from stdin");
  predict_cmd->add_option("--model", predict_opt.model_path, "Model JSON file")
      ->required();
  predict_cmd->add_option("--format", predict_opt.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}));
  predict_cmd->add_option("--out", predict_opt.out_path, "Output path");

  CollectOptions collect_opt;
  auto* collect_cmd = app.add_subcommand(
      "collect", "Poll an SNMP agent and classify live traffic windows");
  collect_cmd
      ->add_option("--model", collect_opt.model_path, "Model JSON file")
      ->required();
  collect_cmd->add_option("--host", collect_opt.host, "Agent host");
  collect_cmd->add_option("--port", collect_opt.port, "Agent UDP port");
  collect_cmd->add_option("--community", collect_opt.community,
                          "SNMP community string");
  collect_cmd->add_option("--interval", collect_opt.interval_s,
                          "Polling interval in seconds (>= 1)");
  collect_cmd->add_option("--windows", collect_opt.windows,
                          "Number of windows to classify")->required();
  collect_cmd->add_option("--timeout", collect_opt.timeout_ms,
                          "Per-request timeout in milliseconds");
  collect_cmd->add_option("--retries", collect_opt.retries,
                          "Retries after a failed request");
  collect_cmd->add_option("--out", collect_opt.out_path,
                          "Output path for JSON lines");

  for (auto* cmd : {synth_cmd, rank_cmd, train_cmd, eval_cmd, predict_cmd,
                    collect_cmd}) {
    cmd->add_option("--seed", seed, "Deterministic seed")
        ->each([&seed_given](const std::string&) { seed_given = true; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!seed_given) seed = default_seed();
    if (synth_cmd->parsed()) return do_synth(synth_opt, seed_given, seed, out);
    if (rank_cmd->parsed()) return do_rank(rank_opt, seed, out);
    if (train_cmd->parsed()) return do_train(train_opt, seed, out);
    if (eval_cmd->parsed()) return do_eval(eval_opt, seed, out);
    if (predict_cmd->parsed()) return do_predict(predict_opt, in, out);
    if (collect_cmd->parsed()) return do_collect(collect_opt, out);
    err << "error: no subcommand\n";
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NetworkError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mibguard::cli
