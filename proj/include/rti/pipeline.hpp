#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rti/detector.hpp"
#include "rti/evalkit.hpp"
#include "rti/extract.hpp"
#include "rti/gateway.hpp"
#include "rti/treebank.hpp"

// Orchestrates the four pipeline steps over a JSONL corpus: extract RTIs,
// generate pairs, translate both sides, detect violations; emits a
// deterministic JSON report.
namespace rti::pipeline {

enum class BackendKind { replay, rest, mock };

std::string_view to_string(BackendKind kind);
BackendKind backend_kind_from_string(std::string_view name);

struct PipelineConfig {
  int threshold = 2;
  std::string src_lang = "en";
  std::string tgt_lang = "zh";

  extract::FilterConfig filters;  // stopwords resolved at load time
  detector::TokenizationMode tokenization;

  BackendKind backend_kind = BackendKind::replay;
  std::string backend_name = "replay";  // cache identity, independent of transport
  bool replay_only = false;
  gateway::RestConfig rest;
  std::filesystem::path dictionary_path;
  std::filesystem::path faults_path;

  std::filesystem::path cache_path;
  int concurrency = 4;

  // JSON file; relative paths resolve against the config file's directory.
  static PipelineConfig load(const std::filesystem::path& path);

  void validate() const;

  // The effective run configuration (after CLI overrides), embedded in
  // the report. Excludes machine-specific paths.
  nlohmann::ordered_json effective_snapshot() const;
};

enum class PipelineErrorKind { CorpusFormatError, YieldMismatch };

class PipelineError : public std::runtime_error {
 public:
  PipelineError(PipelineErrorKind kind, const std::string& detail);
  PipelineErrorKind kind() const { return kind_; }

 private:
  PipelineErrorKind kind_;
};

struct SentenceEntry {
  std::string id;
  std::string text;
  treebank::ConstituencyTree tree;
};

struct Corpus {
  std::vector<SentenceEntry> sentences;
  std::string digest;  // fnv1a64 over the corpus file bytes

  // JSONL, one {"id", "text", "tree"} object per line. Verifies that each
  // tree's yield reproduces the sentence tokens.
  static Corpus load(const std::filesystem::path& path);
};

struct SentenceStats {
  std::string id;
  int rti_count = 0;
  int pair_count = 0;
};

struct Report {
  int schema = 1;
  nlohmann::ordered_json config_snapshot;
  std::string corpus_digest;
  std::vector<SentenceStats> sentences;
  std::vector<detector::IssueRecord> issues;

  int total_rtis() const;
  int total_pairs() const;

  // Deterministic: fixed key order, no wall-clock fields.
  nlohmann::ordered_json to_json() const;
  std::string to_json_string() const;

  static std::vector<detector::IssueRecord> issues_from_json(const nlohmann::json& report);
  static std::vector<detector::IssueRecord> issues_from_file(const std::filesystem::path& path);
};

// Wall-clock metadata lives outside the deterministic report.
struct RunMeta {
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;
  double duration_seconds = 0.0;
  nlohmann::ordered_json to_json() const;
};

struct RunOutput {
  Report report;
  RunMeta meta;
  // Parallel arrays for downstream threshold sweeps.
  std::vector<extract::RtiPair> pairs;
  std::vector<gateway::Translation> rti_translations;
  std::vector<gateway::Translation> container_translations;
};

RunOutput run(const PipelineConfig& config, const Corpus& corpus);

// `run` plus report/meta/cache persistence. Returns the run output.
RunOutput run_to_files(const PipelineConfig& config, const Corpus& corpus,
                       const std::filesystem::path& report_path);

}  // namespace rti::pipeline
