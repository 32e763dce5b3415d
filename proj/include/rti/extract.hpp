#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rti/treebank.hpp"

// RTI identification: noun phrases that pass the word-count filters, and
// construction of (RTI, container) pairs from nesting structure.
namespace rti::extract {

struct FilterConfig {
  int max_words = 10;          // cap counts all tokens
  int min_content_words = 3;   // floor counts non-stop-word tokens only
  std::set<std::string> stopwords;  // case-folded

  // Throws std::invalid_argument when bounds are inconsistent or the
  // stop-word set is empty.
  void validate() const;
};

// Built-in list of ~50 English function words.
FilterConfig default_filter_config();

// One word per line, '#' starts a comment line, blank lines ignored.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

bool is_content_word(std::string_view token, const FilterConfig& cfg);

struct Rti {
  std::string sentence_id;
  int span_begin = 0;
  int span_end = 0;
  std::string text;  // space-joined yield of the NP node
  treebank::NodePath node_path;
};

enum class ContainerKind { full_sentence, ancestor_np };

std::string_view to_string(ContainerKind kind);

struct RtiPair {
  Rti rti;
  std::string container_text;
  ContainerKind container_kind = ContainerKind::full_sentence;
  std::string pair_id;  // sentence-local ordinal, e.g. "p003"
};

// Every NP node whose yield passes both filters, in pre-order, with
// duplicate spans removed (first wins).
std::vector<Rti> extract_rtis(const treebank::ConstituencyTree& tree, const FilterConfig& cfg);

// For each RTI: one pair against the full sentence (skipped when the RTI
// spans the whole sentence), then one pair per NP ancestor that is itself
// an extracted RTI, innermost first.
std::vector<RtiPair> generate_pairs(const std::vector<Rti>& rtis, const std::string& sentence,
                                    const treebank::ConstituencyTree& tree);

}  // namespace rti::extract
