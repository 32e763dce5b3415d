#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Translation of source texts through interchangeable backends: a replay
// cache for network-free deterministic runs, a template-configured REST
// adapter, and a compositional mock translator with fault injection.
namespace rti::gateway {

struct TranslationRequest {
  std::string text;
  std::string src_lang;
  std::string tgt_lang;
  std::string backend_id;
};

enum class Origin { cache, network, mock };

std::string_view to_string(Origin origin);

struct Translation {
  TranslationRequest request;
  std::string target_text;
  Origin origin = Origin::cache;
};

enum class GatewayErrorKind {
  CacheMiss,
  NetworkFailure,
  EmptyTranslation,
  UnknownToken,
  CacheConflict,
};

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrorKind kind, const std::string& detail, int status = 0);
  GatewayErrorKind kind() const { return kind_; }
  int status() const { return status_; }  // HTTP status for NetworkFailure

 private:
  GatewayErrorKind kind_;
  int status_;
};

// Cache keys collapse whitespace; text is assumed NFC-normalized.
std::string normalize_cache_text(std::string_view text);

// Persisted as a single JSON array of {backend, src, tgt, text, translation}.
class TranslationCache {
 public:
  TranslationCache() = default;

  // A missing file loads as an empty cache.
  static TranslationCache load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::optional<Translation> get(const TranslationRequest& req) const;
  // Idempotent for identical values; CacheConflict otherwise.
  void put(const Translation& translation);

  std::size_t size() const { return entries_.size(); }

 private:
  struct Key {
    std::string backend_id, src_lang, tgt_lang, text;
    auto operator<=>(const Key&) const = default;
  };
  static Key key_of(const TranslationRequest& req);

  std::map<Key, std::string> entries_;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Translation translate(const TranslationRequest& req) = 0;
};

// ---- Mock translator -------------------------------------------------

enum class FaultKind { under_translation, over_translation, mistranslation };

std::string_view to_string(FaultKind kind);
FaultKind fault_kind_from_string(std::string_view name);

// Selects target tokens: by value (all occurrences), by index, or by a
// seeded random index when neither is given.
struct FaultSpec {
  FaultKind kind = FaultKind::under_translation;
  std::optional<std::string> token;
  std::optional<int> index;
  std::string replacement;  // mistranslation only
  std::uint64_t seed = 0;
};

// Token-by-token mapping through `dictionary`, then faults applied in
// order. Deterministic. Throws UnknownToken for unmapped source tokens and
// EmptyTranslation when faults delete every token.
Translation mock_translate(const TranslationRequest& req,
                           const std::map<std::string, std::string>& dictionary,
                           const std::vector<FaultSpec>& faults);

class MockBackend : public Backend {
 public:
  MockBackend(std::map<std::string, std::string> dictionary,
              std::map<std::string, std::vector<FaultSpec>> faults_by_text = {});

  Translation translate(const TranslationRequest& req) override;

 private:
  std::map<std::string, std::string> dictionary_;
  std::map<std::string, std::vector<FaultSpec>> faults_by_text_;  // keyed by source text
};

// ---- REST adapter ----------------------------------------------------

// Template placeholders: {text}, {src}, {tgt}, {api_key}. {text} is
// URL-encoded in `url` and JSON-escaped in `body`.
struct RestConfig {
  std::string url;
  std::string method = "POST";
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::string response_path;  // e.g. "data.translations[0].text"
  std::string api_key_env;    // credentials come from this env var only
  int max_attempts = 3;
  int initial_backoff_ms = 250;
};

class RestBackend : public Backend {
 public:
  explicit RestBackend(RestConfig config);

  Translation translate(const TranslationRequest& req) override;

 private:
  RestConfig config_;
  std::string api_key_;
};

// ---- Gateway ---------------------------------------------------------

// Cache-first translation. A null backend means replay-only: unseeded
// texts raise CacheMiss.
class Gateway {
 public:
  Gateway(TranslationCache cache, std::unique_ptr<Backend> backend);

  Translation translate(const TranslationRequest& req);

  // Issues requests concurrently up to `max_in_flight`; the result vector
  // is ordered by request index regardless of completion order.
  std::vector<Translation> translate_many(std::span<const TranslationRequest> requests,
                                          int max_in_flight);

  const TranslationCache& cache() const { return cache_; }
  void save_cache(const std::filesystem::path& path) const;

 private:
  TranslationCache cache_;
  std::unique_ptr<Backend> backend_;
  mutable std::mutex mutex_;
};

}  // namespace rti::gateway
