#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rti/extract.hpp"
#include "rti/gateway.hpp"

// Target-text tokenization, bag-of-words multisets, the multiset-difference
// distance, and detection of pairs whose translations violate the bound.
namespace rti::detector {

enum class TokenizerKind { whitespace, per_character };
enum class PunctuationPolicy { keep, strip };

struct TokenizationMode {
  TokenizerKind kind = TokenizerKind::whitespace;
  PunctuationPolicy punctuation = PunctuationPolicy::strip;

  bool operator==(const TokenizationMode&) const = default;
};

// whitespace: split on Unicode whitespace, case-fold, drop tokens that are
// entirely punctuation when stripping. per_character: one token per
// non-whitespace codepoint, punctuation codepoints dropped when stripping.
std::vector<std::string> tokenize(std::string_view target_text, TokenizationMode mode);

class ModeMismatch : public std::invalid_argument {
 public:
  ModeMismatch() : std::invalid_argument("bags built with different tokenization modes") {}
};

class BagOfWords {
 public:
  BagOfWords() = default;
  BagOfWords(std::map<std::string, int> counts, TokenizationMode mode);

  const std::map<std::string, int>& counts() const { return counts_; }
  TokenizationMode mode() const { return mode_; }
  int count(const std::string& token) const;
  // Total occurrences across all tokens.
  int size() const { return total_; }

 private:
  std::map<std::string, int> counts_;
  TokenizationMode mode_;
  int total_ = 0;
};

BagOfWords bag_of_words(std::string_view target_text, TokenizationMode mode);

// |bag_rti \ bag_container|: occurrences present on the RTI side but
// missing from the container side. Asymmetric on purpose.
int bow_distance(const BagOfWords& bag_rti, const BagOfWords& bag_container);

struct SuspiciousIssue {
  extract::RtiPair pair;
  gateway::Translation rti_translation;
  gateway::Translation container_translation;
  int distance = 0;
  int threshold_used = 0;
};

// Stable id over (backend, languages, both source texts); survives re-runs
// so out-of-band labels stay valid.
std::string issue_id(const gateway::Translation& rti_translation,
                     const gateway::Translation& container_translation);

// Flat projection of an issue, as serialized in reports.
struct IssueRecord {
  std::string issue_id;
  std::string sentence_id;
  std::string pair_id;
  std::string rti_text;
  std::string container_text;
  extract::ContainerKind container_kind = extract::ContainerKind::full_sentence;
  std::string rti_translation;
  std::string container_translation;
  int distance = 0;
  int threshold = 0;
};

IssueRecord to_record(const SuspiciousIssue& issue);

// Issue iff distance > threshold (strict).
std::optional<SuspiciousIssue> detect(const extract::RtiPair& pair,
                                      const gateway::Translation& rti_translation,
                                      const gateway::Translation& container_translation,
                                      int threshold, TokenizationMode mode);

// Batch evaluation over parallel arrays (pairs[i] goes with
// rti_translations[i] / container_translations[i]). Output is ordered by
// pair index. detect_all runs the pairs in parallel when OpenMP is
// enabled; detect_all_serial is the reference implementation and always
// produces identical output.
std::vector<SuspiciousIssue> detect_all_serial(
    std::span<const extract::RtiPair> pairs,
    std::span<const gateway::Translation> rti_translations,
    std::span<const gateway::Translation> container_translations, int threshold,
    TokenizationMode mode);

std::vector<SuspiciousIssue> detect_all(std::span<const extract::RtiPair> pairs,
                                        std::span<const gateway::Translation> rti_translations,
                                        std::span<const gateway::Translation> container_translations,
                                        int threshold, TokenizationMode mode,
                                        int num_threads = 0);

}  // namespace rti::detector
