#include "rti/extract.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <utility>

#include "rti/text.hpp"

namespace rti::extract {

namespace {

constexpr std::string_view kNounPhraseTag = "NP";

constexpr const char* kDefaultStopwords[] = {
    // articles / demonstratives
    "a", "an", "the", "this", "that", "these", "those",
    // copulas / auxiliaries
    "is", "are", "was", "were", "be", "been",
    "do", "does", "did", "have", "has", "had",
    "will", "would", "can", "could", "should", "may",
    // prepositions
    "of", "in", "on", "at", "to", "for", "with", "by", "from", "as",
    // pronouns
    "i", "you", "he", "she", "it", "we", "they", "her",
    "his", "its", "their", "my", "your", "our",
    // conjunctions / misc structure words
    "and", "or", "but", "so", "if", "than", "then", "not", "no",
};

}  // namespace

void FilterConfig::validate() const {
  if (min_content_words < 1)
    throw std::invalid_argument("min_content_words must be >= 1");
  if (max_words < min_content_words)
    throw std::invalid_argument("max_words must be >= min_content_words");
  if (stopwords.empty()) throw std::invalid_argument("stop-word set must be non-empty");
}

FilterConfig default_filter_config() {
  FilterConfig cfg;
  for (const char* w : kDefaultStopwords) cfg.stopwords.insert(w);
  return cfg;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stop-word file: " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string trimmed = text::collapse_ws(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    for (const std::string& w : text::split_ws(trimmed)) words.insert(text::fold_case(w));
  }
  return words;
}

bool is_content_word(std::string_view token, const FilterConfig& cfg) {
  return !cfg.stopwords.contains(text::fold_case(token));
}

std::string_view to_string(ContainerKind kind) {
  return kind == ContainerKind::full_sentence ? "full_sentence" : "ancestor_np";
}

std::vector<Rti> extract_rtis(const treebank::ConstituencyTree& tree, const FilterConfig& cfg) {
  cfg.validate();
  std::vector<Rti> out;
  std::set<std::pair<int, int>> seen_spans;
  tree.for_each_preorder([&](const treebank::TreeNode& node, const treebank::NodePath& path) {
    if (node.is_leaf()) return;
    if (treebank::base_label(node.label) != kNounPhraseTag) return;
    std::vector<std::string> tokens = tree.yield_tokens(node);
    if (static_cast<int>(tokens.size()) > cfg.max_words) return;
    int content = 0;
    for (const std::string& tok : tokens)
      if (is_content_word(tok, cfg)) ++content;
    if (content < cfg.min_content_words) return;
    if (!seen_spans.insert({node.span_begin, node.span_end}).second) return;
    Rti rti;
    rti.sentence_id = tree.sentence_id();
    rti.span_begin = node.span_begin;
    rti.span_end = node.span_end;
    rti.text = text::join(tokens);
    rti.node_path = path;
    out.push_back(std::move(rti));
  });
  return out;
}

std::vector<RtiPair> generate_pairs(const std::vector<Rti>& rtis, const std::string& sentence,
                                    const treebank::ConstituencyTree& tree) {
  std::map<treebank::NodePath, const Rti*> by_path;
  for (const Rti& r : rtis) by_path.emplace(r.node_path, &r);

  const int sentence_width = tree.root().span_width();
  std::vector<RtiPair> out;
  int next_id = 0;
  const auto make_id = [&next_id]() {
    std::string id = "p";
    std::string n = std::to_string(next_id++);
    id.append(3 - std::min<std::size_t>(3, n.size()), '0');
    id += n;
    return id;
  };

  for (const Rti& rti : rtis) {
    if (rti.span_end - rti.span_begin < sentence_width) {
      RtiPair pair;
      pair.rti = rti;
      pair.container_text = sentence;
      pair.container_kind = ContainerKind::full_sentence;
      pair.pair_id = make_id();
      out.push_back(std::move(pair));
    }
    for (const treebank::NodePath& anc :
         tree.ancestors_with_label(rti.node_path, kNounPhraseTag)) {
      auto it = by_path.find(anc);
      if (it == by_path.end()) continue;  // ancestor NP did not pass the filters
      RtiPair pair;
      pair.rti = rti;
      pair.container_text = it->second->text;
      pair.container_kind = ContainerKind::ancestor_np;
      pair.pair_id = make_id();
      out.push_back(std::move(pair));
    }
  }
  return out;
}

}  // namespace rti::extract
