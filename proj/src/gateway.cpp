#include "rti/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rti/text.hpp"

namespace rti::gateway {

namespace {

using nlohmann::json;

const char* kind_name(GatewayErrorKind k) {
  switch (k) {
    case GatewayErrorKind::CacheMiss:
      return "CacheMiss";
    case GatewayErrorKind::NetworkFailure:
      return "NetworkFailure";
    case GatewayErrorKind::EmptyTranslation:
      return "EmptyTranslation";
    case GatewayErrorKind::UnknownToken:
      return "UnknownToken";
    case GatewayErrorKind::CacheConflict:
      return "CacheConflict";
  }
  return "GatewayError";
}

std::string url_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
        c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

std::string json_escape(std::string_view s) {
  std::string quoted = json(std::string(s)).dump();
  return quoted.substr(1, quoted.size() - 2);  // drop surrounding quotes
}

enum class Expansion { raw, url, json_string };

std::string expand_template(std::string_view tmpl, const TranslationRequest& req,
                            const std::string& api_key, Expansion text_expansion) {
  const auto expand_text = [&](std::string_view v) -> std::string {
    switch (text_expansion) {
      case Expansion::url:
        return url_encode(v);
      case Expansion::json_string:
        return json_escape(v);
      case Expansion::raw:
        break;
    }
    return std::string(v);
  };
  // Only the four known placeholders are substituted; every other brace
  // (e.g. JSON syntax in a body template) passes through untouched.
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    std::string_view rest = tmpl.substr(open);
    if (rest.starts_with("{text}")) {
      out.append(expand_text(req.text));
      pos = open + 6;
    } else if (rest.starts_with("{src}")) {
      out.append(req.src_lang);
      pos = open + 5;
    } else if (rest.starts_with("{tgt}")) {
      out.append(req.tgt_lang);
      pos = open + 5;
    } else if (rest.starts_with("{api_key}")) {
      out.append(api_key);
      pos = open + 9;
    } else {
      out.push_back('{');
      pos = open + 1;
    }
  }
  return out;
}

// Walks a dotted path with optional [i] subscripts through a JSON value.
const json* json_path_get(const json& root, std::string_view path) {
  const json* cur = &root;
  std::size_t pos = 0;
  while (pos < path.size()) {
    std::size_t dot = path.find('.', pos);
    std::string_view segment =
        path.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    std::size_t bracket = segment.find('[');
    std::string_view name = segment.substr(0, bracket);
    if (!name.empty()) {
      if (!cur->is_object()) return nullptr;
      auto it = cur->find(std::string(name));
      if (it == cur->end()) return nullptr;
      cur = &*it;
    }
    while (bracket != std::string_view::npos) {
      std::size_t end = segment.find(']', bracket);
      if (end == std::string_view::npos) return nullptr;
      std::size_t idx = 0;
      for (char c : segment.substr(bracket + 1, end - bracket - 1)) {
        if (c < '0' || c > '9') return nullptr;
        idx = idx * 10 + static_cast<std::size_t>(c - '0');
      }
      if (!cur->is_array() || idx >= cur->size()) return nullptr;
      cur = &(*cur)[idx];
      bracket = segment.find('[', end);
    }
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return cur;
}

}  // namespace

GatewayError::GatewayError(GatewayErrorKind kind, const std::string& detail, int status)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + detail),
      kind_(kind),
      status_(status) {}

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::cache:
      return "cache";
    case Origin::network:
      return "network";
    case Origin::mock:
      return "mock";
  }
  return "cache";
}

std::string normalize_cache_text(std::string_view text) { return text::collapse_ws(text); }

// ---- TranslationCache ------------------------------------------------

TranslationCache::Key TranslationCache::key_of(const TranslationRequest& req) {
  return Key{req.backend_id, req.src_lang, req.tgt_lang, normalize_cache_text(req.text)};
}

TranslationCache TranslationCache::load(const std::filesystem::path& path) {
  TranslationCache cache;
  std::ifstream in(path);
  if (!in) return cache;
  json doc = json::parse(in);
  if (!doc.is_array()) throw std::runtime_error("cache file must be a JSON array: " + path.string());
  for (const json& e : doc) {
    Translation t;
    t.request.backend_id = e.at("backend").get<std::string>();
    t.request.src_lang = e.at("src").get<std::string>();
    t.request.tgt_lang = e.at("tgt").get<std::string>();
    t.request.text = e.at("text").get<std::string>();
    t.target_text = e.at("translation").get<std::string>();
    t.origin = Origin::cache;
    cache.put(t);
  }
  return cache;
}

void TranslationCache::save(const std::filesystem::path& path) const {
  json doc = json::array();
  for (const auto& [key, value] : entries_) {
    doc.push_back({{"backend", key.backend_id},
                   {"src", key.src_lang},
                   {"tgt", key.tgt_lang},
                   {"text", key.text},
                   {"translation", value}});
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cache file: " + path.string());
  out << doc.dump(2) << '\n';
}

std::optional<Translation> TranslationCache::get(const TranslationRequest& req) const {
  auto it = entries_.find(key_of(req));
  if (it == entries_.end()) return std::nullopt;
  Translation t;
  t.request = req;
  t.target_text = it->second;
  t.origin = Origin::cache;
  return t;
}

void TranslationCache::put(const Translation& translation) {
  if (translation.target_text.empty())
    throw GatewayError(GatewayErrorKind::EmptyTranslation,
                       "refusing to cache an empty translation");
  Key key = key_of(translation.request);
  auto [it, inserted] = entries_.emplace(key, translation.target_text);
  if (!inserted && it->second != translation.target_text)
    throw GatewayError(GatewayErrorKind::CacheConflict,
                       "key '" + key.text + "' already maps to '" + it->second +
                           "', refusing '" + translation.target_text + "'");
}

// ---- Mock translator -------------------------------------------------

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::under_translation:
      return "under_translation";
    case FaultKind::over_translation:
      return "over_translation";
    case FaultKind::mistranslation:
      return "mistranslation";
  }
  return "under_translation";
}

FaultKind fault_kind_from_string(std::string_view name) {
  if (name == "under_translation") return FaultKind::under_translation;
  if (name == "over_translation") return FaultKind::over_translation;
  if (name == "mistranslation") return FaultKind::mistranslation;
  throw std::invalid_argument("unknown fault kind: " + std::string(name));
}

namespace {

std::vector<std::size_t> select_targets(const std::vector<std::string>& tokens,
                                        const FaultSpec& fault) {
  std::vector<std::size_t> picked;
  if (fault.token) {
    for (std::size_t i = 0; i < tokens.size(); ++i)
      if (tokens[i] == *fault.token) picked.push_back(i);
  } else if (fault.index) {
    if (*fault.index >= 0 && *fault.index < static_cast<int>(tokens.size()))
      picked.push_back(static_cast<std::size_t>(*fault.index));
  } else if (!tokens.empty()) {
    std::mt19937_64 rng(fault.seed);
    picked.push_back(std::uniform_int_distribution<std::size_t>(0, tokens.size() - 1)(rng));
  }
  return picked;
}

void apply_fault(std::vector<std::string>& tokens, const FaultSpec& fault) {
  std::vector<std::size_t> picked = select_targets(tokens, fault);
  switch (fault.kind) {
    case FaultKind::under_translation: {
      for (auto it = picked.rbegin(); it != picked.rend(); ++it)
        tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(*it));
      break;
    }
    case FaultKind::over_translation: {
      for (auto it = picked.rbegin(); it != picked.rend(); ++it)
        tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(*it), tokens[*it]);
      break;
    }
    case FaultKind::mistranslation: {
      if (fault.replacement.empty())
        throw std::invalid_argument("mistranslation fault needs a replacement token");
      for (std::size_t i : picked) tokens[i] = fault.replacement;
      break;
    }
  }
}

}  // namespace

Translation mock_translate(const TranslationRequest& req,
                           const std::map<std::string, std::string>& dictionary,
                           const std::vector<FaultSpec>& faults) {
  std::vector<std::string> target;
  for (const std::string& tok : text::split_ws(req.text)) {
    auto it = dictionary.find(tok);
    if (it == dictionary.end())
      throw GatewayError(GatewayErrorKind::UnknownToken, "no dictionary entry for '" + tok + "'");
    target.push_back(it->second);
  }
  for (const FaultSpec& fault : faults) apply_fault(target, fault);
  if (target.empty())
    throw GatewayError(GatewayErrorKind::EmptyTranslation,
                       "faults removed every token of '" + req.text + "'");
  Translation t;
  t.request = req;
  t.target_text = text::join(target);
  t.origin = Origin::mock;
  return t;
}

MockBackend::MockBackend(std::map<std::string, std::string> dictionary,
                         std::map<std::string, std::vector<FaultSpec>> faults_by_text)
    : dictionary_(std::move(dictionary)), faults_by_text_(std::move(faults_by_text)) {}

Translation MockBackend::translate(const TranslationRequest& req) {
  static const std::vector<FaultSpec> kNoFaults;
  auto it = faults_by_text_.find(req.text);
  return mock_translate(req, dictionary_, it == faults_by_text_.end() ? kNoFaults : it->second);
}

// ---- RestBackend -----------------------------------------------------

RestBackend::RestBackend(RestConfig config) : config_(std::move(config)) {
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
}

Translation RestBackend::translate(const TranslationRequest& req) {
  std::string url = expand_template(config_.url, req, api_key_, Expansion::url);
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw GatewayError(GatewayErrorKind::NetworkFailure, "url has no scheme: " + url);
  std::size_t path_start = url.find('/', scheme_end + 3);
  std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);

  httplib::Headers headers;
  for (const auto& [name, value] : config_.headers)
    headers.emplace(name, expand_template(value, req, api_key_, Expansion::raw));
  std::string body = expand_template(config_.body, req, api_key_, Expansion::json_string);

  int last_status = 0;
  std::string last_detail;
  int backoff_ms = config_.initial_backoff_ms;
  for (int attempt = 0; attempt < std::max(1, config_.max_attempts); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    httplib::Result res = config_.method == "GET"
                              ? client.Get(path, headers)
                              : client.Post(path, headers, body, "application/json");
    if (!res) {
      last_status = 0;
      last_detail = httplib::to_string(res.error());
      continue;
    }
    last_status = res->status;
    last_detail = res->body.substr(0, 256);
    if (res->status >= 500 || res->status == 429) continue;  // retryable
    if (res->status < 200 || res->status >= 300) break;      // other 4xx: fail fast

    json doc = json::parse(res->body, nullptr, false);
    if (doc.is_discarded())
      throw GatewayError(GatewayErrorKind::NetworkFailure,
                         "response is not JSON: " + last_detail, res->status);
    const json* value = json_path_get(doc, config_.response_path);
    if (value == nullptr || !value->is_string())
      throw GatewayError(GatewayErrorKind::NetworkFailure,
                         "response path '" + config_.response_path + "' not found: " + last_detail,
                         res->status);
    std::string target = value->get<std::string>();
    if (target.empty())
      throw GatewayError(GatewayErrorKind::EmptyTranslation, "backend returned an empty string");
    Translation t;
    t.request = req;
    t.target_text = std::move(target);
    t.origin = Origin::network;
    return t;
  }
  throw GatewayError(GatewayErrorKind::NetworkFailure,
                     "request failed after " + std::to_string(config_.max_attempts) +
                         " attempts: " + last_detail,
                     last_status);
}

// ---- Gateway ---------------------------------------------------------

Gateway::Gateway(TranslationCache cache, std::unique_ptr<Backend> backend)
    : cache_(std::move(cache)), backend_(std::move(backend)) {}

Translation Gateway::translate(const TranslationRequest& req) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (std::optional<Translation> hit = cache_.get(req)) return *hit;
  }
  if (!backend_)
    throw GatewayError(GatewayErrorKind::CacheMiss,
                       "replay-only mode and no cached translation for '" + req.text + "'");
  Translation t = backend_->translate(req);
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.put(t);
  return t;
}

std::vector<Translation> Gateway::translate_many(std::span<const TranslationRequest> requests,
                                                 int max_in_flight) {
  std::vector<Translation> results(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());
  const int n = static_cast<int>(requests.size());
  const int threads = std::clamp(max_in_flight, 1, std::max(1, n));
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = translate(requests[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  // Rethrow the error of the lowest request index so failures are
  // deterministic regardless of scheduling.
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

void Gateway::save_cache(const std::filesystem::path& path) const {
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.save(path);
}

}  // namespace rti::gateway
