#include "rti/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "rti/text.hpp"

namespace rti::pipeline {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
  std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::map<std::string, std::string> load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dictionary file: " + path.string());
  json doc = json::parse(in);
  const json& map = doc.contains("dictionary") ? doc.at("dictionary") : doc;
  std::map<std::string, std::string> dict;
  for (const auto& [word, target] : map.items()) dict.emplace(word, target.get<std::string>());
  return dict;
}

std::map<std::string, std::vector<gateway::FaultSpec>> load_faults(
    const std::filesystem::path& path) {
  std::map<std::string, std::vector<gateway::FaultSpec>> faults;
  if (path.empty()) return faults;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open faults file: " + path.string());
  json doc = json::parse(in);
  for (const json& entry : doc.at("faults")) {
    gateway::FaultSpec spec;
    spec.kind = gateway::fault_kind_from_string(entry.at("kind").get<std::string>());
    if (entry.contains("token")) spec.token = entry.at("token").get<std::string>();
    if (entry.contains("index")) spec.index = entry.at("index").get<int>();
    if (entry.contains("replacement")) spec.replacement = entry.at("replacement").get<std::string>();
    if (entry.contains("seed")) spec.seed = entry.at("seed").get<std::uint64_t>();
    faults[entry.at("text").get<std::string>()].push_back(std::move(spec));
  }
  return faults;
}

std::unique_ptr<gateway::Backend> make_backend(const PipelineConfig& config) {
  if (config.replay_only || config.backend_kind == BackendKind::replay) return nullptr;
  if (config.backend_kind == BackendKind::mock) {
    return std::make_unique<gateway::MockBackend>(load_dictionary(config.dictionary_path),
                                                  load_faults(config.faults_path));
  }
  return std::make_unique<gateway::RestBackend>(config.rest);
}

}  // namespace

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::replay:
      return "replay";
    case BackendKind::rest:
      return "rest";
    case BackendKind::mock:
      return "mock";
  }
  return "replay";
}

BackendKind backend_kind_from_string(std::string_view name) {
  if (name == "replay") return BackendKind::replay;
  if (name == "rest") return BackendKind::rest;
  if (name == "mock") return BackendKind::mock;
  throw std::invalid_argument("unknown backend kind: " + std::string(name));
}

PipelineError::PipelineError(PipelineErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(kind == PipelineErrorKind::CorpusFormatError
                                         ? "CorpusFormatError"
                                         : "YieldMismatch") +
                         ": " + detail),
      kind_(kind) {}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  ordered_json doc = ordered_json::parse(in);
  const std::filesystem::path base = path.has_parent_path()
                                         ? path.parent_path()
                                         : std::filesystem::path(".");

  PipelineConfig cfg;
  cfg.threshold = doc.value("threshold", 2);
  if (doc.contains("languages")) {
    cfg.src_lang = doc.at("languages").value("src", "en");
    cfg.tgt_lang = doc.at("languages").value("tgt", "zh");
  }

  cfg.filters = extract::default_filter_config();
  if (doc.contains("filters")) {
    const ordered_json& f = doc.at("filters");
    cfg.filters.max_words = f.value("max_words", cfg.filters.max_words);
    cfg.filters.min_content_words = f.value("min_content_words", cfg.filters.min_content_words);
    if (f.contains("stopwords_path"))
      cfg.filters.stopwords =
          extract::load_stopwords(resolve(base, f.at("stopwords_path").get<std::string>()));
  }

  if (doc.contains("tokenization")) {
    const ordered_json& t = doc.at("tokenization");
    std::string mode = t.value("mode", "whitespace");
    if (mode == "per_character") {
      cfg.tokenization.kind = detector::TokenizerKind::per_character;
    } else if (mode == "whitespace") {
      cfg.tokenization.kind = detector::TokenizerKind::whitespace;
    } else {
      throw std::invalid_argument("unknown tokenization mode: " + mode);
    }
    std::string punct = t.value("punctuation", "strip");
    if (punct == "keep") {
      cfg.tokenization.punctuation = detector::PunctuationPolicy::keep;
    } else if (punct == "strip") {
      cfg.tokenization.punctuation = detector::PunctuationPolicy::strip;
    } else {
      throw std::invalid_argument("unknown punctuation policy: " + punct);
    }
  }

  if (doc.contains("backend")) {
    const ordered_json& b = doc.at("backend");
    cfg.backend_kind = backend_kind_from_string(b.value("kind", "replay"));
    cfg.backend_name = b.value("name", std::string(to_string(cfg.backend_kind)));
    cfg.replay_only = b.value("replay_only", false);
    if (b.contains("rest")) {
      const ordered_json& r = b.at("rest");
      cfg.rest.url = r.value("url", "");
      cfg.rest.method = r.value("method", "POST");
      cfg.rest.body = r.value("body", "");
      cfg.rest.response_path = r.value("response_path", "");
      cfg.rest.api_key_env = r.value("api_key_env", "");
      cfg.rest.max_attempts = r.value("max_attempts", 3);
      cfg.rest.initial_backoff_ms = r.value("initial_backoff_ms", 250);
      if (r.contains("headers"))
        for (const auto& [name, value] : r.at("headers").items())
          cfg.rest.headers.emplace_back(name, value.get<std::string>());
    }
    if (b.contains("mock")) {
      const ordered_json& m = b.at("mock");
      if (m.contains("dictionary_path"))
        cfg.dictionary_path = resolve(base, m.at("dictionary_path").get<std::string>());
      if (m.contains("faults_path"))
        cfg.faults_path = resolve(base, m.at("faults_path").get<std::string>());
    }
  }

  if (doc.contains("cache_path"))
    cfg.cache_path = resolve(base, doc.at("cache_path").get<std::string>());
  cfg.concurrency = doc.value("concurrency", 4);
  cfg.validate();
  return cfg;
}

void PipelineConfig::validate() const {
  if (threshold < 0) throw std::invalid_argument("threshold must be >= 0");
  if (src_lang.empty() || tgt_lang.empty())
    throw std::invalid_argument("languages must be non-empty");
  if (concurrency < 1) throw std::invalid_argument("concurrency must be >= 1");
  filters.validate();
  if (backend_kind == BackendKind::mock && !replay_only && dictionary_path.empty())
    throw std::invalid_argument("mock backend needs a dictionary_path");
  if (backend_kind == BackendKind::rest && !replay_only &&
      (rest.url.empty() || rest.response_path.empty()))
    throw std::invalid_argument("rest backend needs url and response_path");
}

ordered_json PipelineConfig::effective_snapshot() const {
  ordered_json doc;
  doc["threshold"] = threshold;
  doc["languages"] = ordered_json{{"src", src_lang}, {"tgt", tgt_lang}};
  doc["filters"] = ordered_json{{"max_words", filters.max_words},
                                {"min_content_words", filters.min_content_words},
                                {"stopword_count", static_cast<int>(filters.stopwords.size())}};
  doc["tokenization"] = ordered_json{
      {"mode", tokenization.kind == detector::TokenizerKind::per_character ? "per_character"
                                                                           : "whitespace"},
      {"punctuation",
       tokenization.punctuation == detector::PunctuationPolicy::keep ? "keep" : "strip"}};
  doc["backend"] = ordered_json{{"name", backend_name},
                                {"kind", std::string(to_string(backend_kind))},
                                {"replay_only", replay_only}};
  doc["concurrency"] = concurrency;
  return doc;
}

Corpus Corpus::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();

  Corpus corpus;
  corpus.digest = "fnv1a64:" + text::to_hex(text::fnv1a64(bytes));

  std::istringstream lines(bytes);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (text::collapse_ws(line).empty()) continue;
    json entry = json::parse(line, nullptr, false);
    if (entry.is_discarded() || !entry.is_object() || !entry.contains("id") ||
        !entry.contains("text") || !entry.contains("tree"))
      throw PipelineError(PipelineErrorKind::CorpusFormatError,
                          "line " + std::to_string(line_no) +
                              ": expected {\"id\", \"text\", \"tree\"}");
    SentenceEntry sentence;
    sentence.id = entry.at("id").is_string() ? entry.at("id").get<std::string>()
                                             : entry.at("id").dump();
    sentence.text = entry.at("text").get<std::string>();
    try {
      sentence.tree =
          treebank::ConstituencyTree::parse(entry.at("tree").get<std::string>(), sentence.id);
    } catch (const treebank::ParseError& e) {
      throw PipelineError(PipelineErrorKind::CorpusFormatError,
                          "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (sentence.tree.yield_tokens() != text::split_ws(sentence.text))
      throw PipelineError(PipelineErrorKind::YieldMismatch,
                          "sentence '" + sentence.id + "': tree yield differs from text");
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

int Report::total_rtis() const {
  int n = 0;
  for (const SentenceStats& s : sentences) n += s.rti_count;
  return n;
}

int Report::total_pairs() const {
  int n = 0;
  for (const SentenceStats& s : sentences) n += s.pair_count;
  return n;
}

ordered_json Report::to_json() const {
  ordered_json doc;
  doc["schema"] = schema;
  doc["config"] = config_snapshot;
  doc["corpus_digest"] = corpus_digest;
  ordered_json sentence_rows = ordered_json::array();
  for (const SentenceStats& s : sentences)
    sentence_rows.push_back({{"id", s.id}, {"rtis", s.rti_count}, {"pairs", s.pair_count}});
  doc["sentences"] = std::move(sentence_rows);
  ordered_json issue_rows = ordered_json::array();
  for (const detector::IssueRecord& rec : issues) {
    issue_rows.push_back({{"issue_id", rec.issue_id},
                          {"sentence_id", rec.sentence_id},
                          {"pair_id", rec.pair_id},
                          {"rti_text", rec.rti_text},
                          {"container_text", rec.container_text},
                          {"container_kind", std::string(extract::to_string(rec.container_kind))},
                          {"rti_translation", rec.rti_translation},
                          {"container_translation", rec.container_translation},
                          {"distance", rec.distance},
                          {"threshold", rec.threshold}});
  }
  doc["issues"] = std::move(issue_rows);
  doc["summary"] = {{"sentences", static_cast<int>(sentences.size())},
                    {"rtis", total_rtis()},
                    {"pairs", total_pairs()},
                    {"suspicious_issues", static_cast<int>(issues.size())}};
  return doc;
}

std::string Report::to_json_string() const { return to_json().dump(2) + "\n"; }

std::vector<detector::IssueRecord> Report::issues_from_json(const json& report) {
  std::vector<detector::IssueRecord> issues;
  for (const json& row : report.at("issues")) {
    detector::IssueRecord rec;
    rec.issue_id = row.at("issue_id").get<std::string>();
    rec.sentence_id = row.at("sentence_id").get<std::string>();
    rec.pair_id = row.at("pair_id").get<std::string>();
    rec.rti_text = row.at("rti_text").get<std::string>();
    rec.container_text = row.at("container_text").get<std::string>();
    rec.container_kind = row.at("container_kind").get<std::string>() == "ancestor_np"
                             ? extract::ContainerKind::ancestor_np
                             : extract::ContainerKind::full_sentence;
    rec.rti_translation = row.at("rti_translation").get<std::string>();
    rec.container_translation = row.at("container_translation").get<std::string>();
    rec.distance = row.at("distance").get<int>();
    rec.threshold = row.at("threshold").get<int>();
    issues.push_back(std::move(rec));
  }
  return issues;
}

std::vector<detector::IssueRecord> Report::issues_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report file: " + path.string());
  return issues_from_json(json::parse(in));
}

ordered_json RunMeta::to_json() const {
  return ordered_json{{"started_at", started_at},
                      {"finished_at", finished_at},
                      {"duration_seconds", duration_seconds}};
}

RunOutput run(const PipelineConfig& config, const Corpus& corpus) {
  const auto wall_start = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();

  RunOutput out;
  out.report.config_snapshot = config.effective_snapshot();
  out.report.corpus_digest = corpus.digest;

  // Steps 1 + 2: identify RTIs and build source-language pairs.
  for (const SentenceEntry& sentence : corpus.sentences) {
    std::vector<extract::Rti> rtis = extract::extract_rtis(sentence.tree, config.filters);
    std::vector<extract::RtiPair> pairs =
        extract::generate_pairs(rtis, sentence.text, sentence.tree);
    out.report.sentences.push_back(SentenceStats{sentence.id, static_cast<int>(rtis.size()),
                                                 static_cast<int>(pairs.size())});
    for (extract::RtiPair& pair : pairs) out.pairs.push_back(std::move(pair));
  }

  // Step 3: translate each distinct source text once.
  const auto make_request = [&](const std::string& source_text) {
    gateway::TranslationRequest req;
    req.text = source_text;
    req.src_lang = config.src_lang;
    req.tgt_lang = config.tgt_lang;
    req.backend_id = config.backend_name;
    return req;
  };
  std::map<std::string, std::size_t> request_index;
  std::vector<gateway::TranslationRequest> requests;
  const auto enqueue = [&](const std::string& source_text) {
    auto [it, inserted] = request_index.emplace(source_text, requests.size());
    if (inserted) requests.push_back(make_request(source_text));
    return it->second;
  };
  std::vector<std::pair<std::size_t, std::size_t>> pair_slots;  // (rti, container) indices
  pair_slots.reserve(out.pairs.size());
  for (const extract::RtiPair& pair : out.pairs)
    pair_slots.emplace_back(enqueue(pair.rti.text), enqueue(pair.container_text));

  gateway::Gateway gw(gateway::TranslationCache::load(config.cache_path), make_backend(config));
  std::vector<gateway::Translation> translations = gw.translate_many(requests, config.concurrency);

  out.rti_translations.reserve(out.pairs.size());
  out.container_translations.reserve(out.pairs.size());
  for (const auto& [rti_idx, container_idx] : pair_slots) {
    out.rti_translations.push_back(translations[rti_idx]);
    out.container_translations.push_back(translations[container_idx]);
  }

  // Write-through: persist anything a live backend produced.
  const bool used_backend = !config.replay_only && config.backend_kind != BackendKind::replay;
  if (used_backend && !config.cache_path.empty()) gw.save_cache(config.cache_path);

  // Step 4: flag pairs whose translations drift apart.
  std::vector<detector::SuspiciousIssue> issues =
      detector::detect_all(out.pairs, out.rti_translations, out.container_translations,
                           config.threshold, config.tokenization, config.concurrency);
  out.report.issues.reserve(issues.size());
  for (const detector::SuspiciousIssue& issue : issues)
    out.report.issues.push_back(detector::to_record(issue));

  const auto t1 = std::chrono::steady_clock::now();
  out.meta.started_at = iso8601_utc(wall_start);
  out.meta.finished_at = iso8601_utc(std::chrono::system_clock::now());
  out.meta.duration_seconds = std::chrono::duration<double>(t1 - t0).count();
  return out;
}

RunOutput run_to_files(const PipelineConfig& config, const Corpus& corpus,
                       const std::filesystem::path& report_path) {
  RunOutput out = run(config, corpus);
  if (report_path.has_parent_path())
    std::filesystem::create_directories(report_path.parent_path());
  std::ofstream report_file(report_path, std::ios::binary);
  if (!report_file) throw std::runtime_error("cannot write report: " + report_path.string());
  report_file << out.report.to_json_string();

  std::filesystem::path meta_path = report_path;
  meta_path += ".meta.json";
  std::ofstream meta_file(meta_path);
  if (meta_file) meta_file << out.meta.to_json().dump(2) << '\n';
  return out;
}

}  // namespace rti::pipeline
