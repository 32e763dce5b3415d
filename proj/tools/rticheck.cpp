// rticheck: metamorphic testing of machine translation. Extracts noun
// phrases as referentially transparent inputs, pairs them with containing
// text, translates both sides and reports pairs whose translations drift
// apart by more than the bag-of-words threshold.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rti/evalkit.hpp"
#include "rti/pipeline.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitClean = 0;
constexpr int kExitIssuesFound = 1;
constexpr int kExitError = 2;

std::vector<int> parse_thresholds(const std::string& spec) {
  std::vector<int> values;
  const auto parse_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size() || v < 0) throw CLI::ValidationError("--d", "bad threshold: " + s);
    return v;
  };
  std::size_t range = spec.find("..");
  if (range != std::string::npos) {
    int lo = parse_int(spec.substr(0, range));
    int hi = parse_int(spec.substr(range + 2));
    if (hi < lo) throw CLI::ValidationError("--d", "empty range: " + spec);
    for (int d = lo; d <= hi; ++d) values.push_back(d);
    return values;
  }
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    values.push_back(parse_int(spec.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return values;
}

rti::pipeline::PipelineConfig load_config(const std::string& config_path,
                                          std::optional<int> threshold,
                                          const std::string& backend_override, bool replay_only) {
  auto config = rti::pipeline::PipelineConfig::load(config_path);
  if (threshold) config.threshold = *threshold;
  if (!backend_override.empty())
    config.backend_kind = rti::pipeline::backend_kind_from_string(backend_override);
  if (replay_only) config.replay_only = true;
  config.validate();
  return config;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int cmd_run(const std::string& config_path, const std::string& corpus_path,
            const std::string& out_path, std::optional<int> threshold,
            const std::string& backend_override, bool replay_only) {
  auto config = load_config(config_path, threshold, backend_override, replay_only);
  auto corpus = rti::pipeline::Corpus::load(corpus_path);
  auto output = rti::pipeline::run_to_files(config, corpus, out_path);

  const auto& report = output.report;
  std::fprintf(stderr, "corpus: %zu sentences, %d RTIs, %d pairs\n",
               report.sentences.size(), report.total_rtis(), report.total_pairs());
  std::fprintf(stderr, "threshold d=%d: %zu suspicious issue(s)\n", config.threshold,
               report.issues.size());
  for (const auto& issue : report.issues)
    std::fprintf(stderr, "  [%s] distance %d: \"%s\" vs \"%s\"\n", issue.issue_id.c_str(),
                 issue.distance, issue.rti_text.c_str(), issue.container_text.c_str());
  std::fprintf(stderr, "report written to %s (%.3fs)\n", out_path.c_str(),
               output.meta.duration_seconds);
  return report.issues.empty() ? kExitClean : kExitIssuesFound;
}

int cmd_sweep(const std::string& config_path, const std::string& corpus_path,
              const std::string& d_spec, const std::string& labels_path,
              const std::string& out_path, const std::string& json_path,
              const std::string& backend_override, bool replay_only) {
  auto config = load_config(config_path, std::nullopt, backend_override, replay_only);
  auto corpus = rti::pipeline::Corpus::load(corpus_path);
  auto output = rti::pipeline::run(config, corpus);

  std::vector<int> d_values = parse_thresholds(d_spec);
  std::optional<rti::evalkit::EvalLabels> labels;
  if (!labels_path.empty()) labels = rti::evalkit::EvalLabels::load(labels_path);

  auto rows = rti::evalkit::threshold_sweep(output.pairs, output.rti_translations,
                                            output.container_translations, d_values,
                                            config.tokenization, labels ? &*labels : nullptr);

  std::string csv = rti::evalkit::sweep_to_csv(rows);
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_text_file(out_path, csv);
    std::fprintf(stderr, "sweep written to %s\n", out_path.c_str());
  }
  if (!json_path.empty()) {
    ordered_json doc = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json r{{"d", row.threshold}, {"suspicious_count", row.suspicious_count}};
      if (row.erroneous_count) r["erroneous_count"] = *row.erroneous_count;
      if (row.precision) r["precision"] = *row.precision;
      doc.push_back(std::move(r));
    }
    write_text_file(json_path, doc.dump(2) + "\n");
  }
  return kExitClean;
}

int cmd_eval(const std::string& report_path, const std::string& labels_path,
             const std::string& out_path) {
  auto issues = rti::pipeline::Report::issues_from_file(report_path);
  auto labels = rti::evalkit::EvalLabels::load(labels_path);

  // Labels should correspond to this report's issues; stale ids usually
  // mean the report and labels file are out of step.
  int orphans = 0;
  for (const auto& [issue_id, label] : labels.by_issue) {
    bool found = false;
    for (const auto& issue : issues) found = found || issue.issue_id == issue_id;
    if (!found) ++orphans;
  }
  if (orphans > 0)
    std::fprintf(stderr, "warning: %d label(s) have no matching issue in this report\n", orphans);

  auto result = rti::evalkit::precision(labels, issues);
  auto unique = rti::evalkit::unique_erroneous_translations(labels, issues);
  auto tally = rti::evalkit::category_tally(labels);

  ordered_json doc;
  doc["precision"] = {{"true_count", result.true_count},
                      {"total_count", result.total_count},
                      {"precision", result.precision}};
  doc["unique_erroneous_translations"] = unique.count;
  ordered_json listing = ordered_json::array();
  for (const auto& [source, target] : unique.listing)
    listing.push_back({{"source", source}, {"target", target}});
  doc["erroneous_translations"] = std::move(listing);
  ordered_json categories;
  for (const auto& [category, count] : tally)
    categories[std::string(rti::evalkit::to_string(category))] = count;
  doc["category_tally"] = std::move(categories);

  std::string rendered = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::fputs(rendered.c_str(), stdout);
  } else {
    write_text_file(out_path, rendered);
  }
  std::fprintf(stderr, "precision %.4f (%d/%d), %d unique erroneous translation(s)\n",
               result.precision, result.true_count, result.total_count, unique.count);
  return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metamorphic testing of machine translation via referentially "
               "transparent inputs"};
  app.require_subcommand(1);

  std::string config_path, corpus_path, out_path, json_path, labels_path, report_path;
  std::string backend_override, d_spec = "0..5";
  std::optional<int> threshold;
  bool replay_only = false;

  CLI::App* run = app.add_subcommand("run", "Run the detection pipeline over a corpus");
  run->add_option("--config", config_path, "Pipeline config (JSON)")->required();
  run->add_option("--corpus", corpus_path, "Corpus (JSONL: {id, text, tree})")->required();
  run->add_option("--out", out_path, "Report output path (JSON)")->required();
  run->add_option("--threshold", threshold, "Override the distance threshold d");
  run->add_option("--backend", backend_override, "Override backend: replay|rest|mock")
      ->check(CLI::IsMember({"replay", "rest", "mock"}));
  run->add_flag("--replay-only", replay_only, "Serve from cache only; unseeded text fails");

  CLI::App* sweep = app.add_subcommand("sweep", "Suspicious-issue counts across thresholds");
  sweep->add_option("--config", config_path, "Pipeline config (JSON)")->required();
  sweep->add_option("--corpus", corpus_path, "Corpus (JSONL)")->required();
  sweep->add_option("--d", d_spec, "Thresholds: \"0..5\" or \"0,2,4\" (default 0..5)");
  sweep->add_option("--labels", labels_path, "Labels file for precision columns");
  sweep->add_option("--out", out_path, "CSV output path (stdout when omitted)");
  sweep->add_option("--json", json_path, "Also write rows as JSON");
  sweep->add_option("--backend", backend_override, "Override backend: replay|rest|mock")
      ->check(CLI::IsMember({"replay", "rest", "mock"}));
  sweep->add_flag("--replay-only", replay_only, "Serve from cache only");

  CLI::App* eval = app.add_subcommand("eval", "Precision and error tallies from labels");
  eval->add_option("--report", report_path, "Report produced by `run`")->required();
  eval->add_option("--labels", labels_path, "Labels file (JSON)")->required();
  eval->add_option("--out", out_path, "JSON output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, corpus_path, out_path, threshold, backend_override, replay_only);
    if (sweep->parsed())
      return cmd_sweep(config_path, corpus_path, d_spec, labels_path, out_path, json_path,
                       backend_override, replay_only);
    return cmd_eval(report_path, labels_path, out_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}
