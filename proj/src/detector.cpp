#include "rti/detector.hpp"

#include <algorithm>
#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rti/text.hpp"

namespace rti::detector {

namespace {

bool all_punct(std::string_view token) {
  std::size_t pos = 0;
  while (pos < token.size()) {
    if (!text::is_punct(text::decode_utf8(token, pos))) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view target_text, TokenizationMode mode) {
  std::vector<std::string> out;
  if (mode.kind == TokenizerKind::whitespace) {
    for (const std::string& raw : text::split_ws(target_text)) {
      if (mode.punctuation == PunctuationPolicy::strip && all_punct(raw)) continue;
      out.push_back(text::fold_case(raw));
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos < target_text.size()) {
    std::size_t start = pos;
    char32_t cp = text::decode_utf8(target_text, pos);
    if (text::is_space(cp)) continue;
    if (mode.punctuation == PunctuationPolicy::strip && text::is_punct(cp)) continue;
    out.emplace_back(target_text.substr(start, pos - start));
  }
  return out;
}

BagOfWords::BagOfWords(std::map<std::string, int> counts, TokenizationMode mode)
    : counts_(std::move(counts)), mode_(mode) {
  // Counts below one carry no occurrences and are not representable.
  std::erase_if(counts_, [](const auto& entry) { return entry.second < 1; });
  for (const auto& [token, count] : counts_) total_ += count;
}

int BagOfWords::count(const std::string& token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

BagOfWords bag_of_words(std::string_view target_text, TokenizationMode mode) {
  std::map<std::string, int> counts;
  for (std::string& tok : tokenize(target_text, mode)) ++counts[std::move(tok)];
  return BagOfWords(std::move(counts), mode);
}

int bow_distance(const BagOfWords& bag_rti, const BagOfWords& bag_container) {
  if (bag_rti.mode() != bag_container.mode()) throw ModeMismatch();
  int missing = 0;
  for (const auto& [token, count] : bag_rti.counts())
    missing += std::max(0, count - bag_container.count(token));
  return missing;
}

std::string issue_id(const gateway::Translation& rti_translation,
                     const gateway::Translation& container_translation) {
  const gateway::TranslationRequest& r = rti_translation.request;
  std::uint64_t h = text::fnv1a64(r.backend_id);
  for (std::string_view part : {std::string_view(r.src_lang), std::string_view(r.tgt_lang),
                                std::string_view(r.text),
                                std::string_view(container_translation.request.text)}) {
    h = text::fnv1a64_combine(h, "\x1f");
    h = text::fnv1a64_combine(h, part);
  }
  return text::to_hex(h);
}

IssueRecord to_record(const SuspiciousIssue& issue) {
  IssueRecord rec;
  rec.issue_id = issue_id(issue.rti_translation, issue.container_translation);
  rec.sentence_id = issue.pair.rti.sentence_id;
  rec.pair_id = issue.pair.pair_id;
  rec.rti_text = issue.pair.rti.text;
  rec.container_text = issue.pair.container_text;
  rec.container_kind = issue.pair.container_kind;
  rec.rti_translation = issue.rti_translation.target_text;
  rec.container_translation = issue.container_translation.target_text;
  rec.distance = issue.distance;
  rec.threshold = issue.threshold_used;
  return rec;
}

std::optional<SuspiciousIssue> detect(const extract::RtiPair& pair,
                                      const gateway::Translation& rti_translation,
                                      const gateway::Translation& container_translation,
                                      int threshold, TokenizationMode mode) {
  int distance = bow_distance(bag_of_words(rti_translation.target_text, mode),
                              bag_of_words(container_translation.target_text, mode));
  if (distance <= threshold) return std::nullopt;
  SuspiciousIssue issue;
  issue.pair = pair;
  issue.rti_translation = rti_translation;
  issue.container_translation = container_translation;
  issue.distance = distance;
  issue.threshold_used = threshold;
  return issue;
}

std::vector<SuspiciousIssue> detect_all_serial(
    std::span<const extract::RtiPair> pairs,
    std::span<const gateway::Translation> rti_translations,
    std::span<const gateway::Translation> container_translations, int threshold,
    TokenizationMode mode) {
  assert(pairs.size() == rti_translations.size());
  assert(pairs.size() == container_translations.size());
  std::vector<SuspiciousIssue> issues;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (auto issue = detect(pairs[i], rti_translations[i], container_translations[i], threshold,
                            mode))
      issues.push_back(std::move(*issue));
  }
  return issues;
}

std::vector<SuspiciousIssue> detect_all(std::span<const extract::RtiPair> pairs,
                                        std::span<const gateway::Translation> rti_translations,
                                        std::span<const gateway::Translation> container_translations,
                                        int threshold, TokenizationMode mode, int num_threads) {
  assert(pairs.size() == rti_translations.size());
  assert(pairs.size() == container_translations.size());
  const int n = static_cast<int>(pairs.size());
  std::vector<std::optional<SuspiciousIssue>> slots(pairs.size());
  const auto evaluate = [&](int i) {
    const auto idx = static_cast<std::size_t>(i);
    slots[idx] =
        detect(pairs[idx], rti_translations[idx], container_translations[idx], threshold, mode);
  };
#ifdef _OPENMP
  const int requested = num_threads > 0 ? num_threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(requested)
  for (int i = 0; i < n; ++i) evaluate(i);
#else
  (void)num_threads;
  for (int i = 0; i < n; ++i) evaluate(i);
#endif
  // Compact in pair order so output matches the serial reference.
  std::vector<SuspiciousIssue> issues;
  for (std::optional<SuspiciousIssue>& slot : slots)
    if (slot) issues.push_back(std::move(*slot));
  return issues;
}

}  // namespace rti::detector
