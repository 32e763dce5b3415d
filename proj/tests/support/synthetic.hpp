#pragma once

// Deterministic generators for synthetic corpora and random bracketed
// trees, shared by the unit and acceptance suites.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

struct SynthSentence {
  std::string id;
  std::string text;
  std::string tree;
};

struct SynthCorpus {
  std::vector<SynthSentence> sentences;
  // Injective source -> target map covering every corpus token.
  std::map<std::string, std::string> dictionary;

  std::string to_jsonl() const;
  void write_jsonl(const std::filesystem::path& path) const;
  void write_dictionary(const std::filesystem::path& path) const;
};

// Sentences with subject/object noun phrases, a mix of nested NPs and
// NPs that fail the filters. Deterministic in (count, seed).
SynthCorpus make_synthetic_corpus(int sentence_count, std::uint64_t seed);

// Random well-formed bracketed tree with irregular whitespace; labels are
// biased toward NP so extraction properties have something to chew on.
std::string random_tree_source(std::mt19937_64& rng, int max_depth = 4);

// Scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport
