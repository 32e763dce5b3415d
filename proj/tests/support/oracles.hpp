#pragma once

// Brute-force reference implementations used as test oracles. Kept
// deliberately independent of the library code they check.

#include <string>
#include <vector>

#include "rti/extract.hpp"

namespace testsupport {

// Occurrence-by-occurrence multiset difference |a \ b|: each token of `a`
// consumes at most one matching token of `b`; unmatched tokens count.
inline int naive_multiset_difference(const std::vector<std::string>& a,
                                     std::vector<std::string> b) {
  int unmatched = 0;
  for (const std::string& token : a) {
    bool matched = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == token) {
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(j));
        matched = true;
        break;
      }
    }
    if (!matched) ++unmatched;
  }
  return unmatched;
}

inline bool is_proper_path_prefix(const rti::treebank::NodePath& prefix,
                                  const rti::treebank::NodePath& path) {
  if (prefix.size() >= path.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (prefix[i] != path[i]) return false;
  return true;
}

// Expected |generate_pairs| by exhaustive enumeration: every extracted RTI
// contributes one full-sentence pair (unless it spans the whole sentence)
// plus one pair per extracted RTI whose node path is a proper prefix.
inline int brute_force_pair_count(const std::vector<rti::extract::Rti>& rtis,
                                  int sentence_token_count) {
  int pairs = 0;
  for (const rti::extract::Rti& r : rtis) {
    if (r.span_end - r.span_begin != sentence_token_count) ++pairs;
    for (const rti::extract::Rti& anc : rtis)
      if (is_proper_path_prefix(anc.node_path, r.node_path)) ++pairs;
  }
  return pairs;
}

}  // namespace testsupport
