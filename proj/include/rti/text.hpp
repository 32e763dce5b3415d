#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared across the pipeline: UTF-8 iteration,
// whitespace splitting, case folding, punctuation classification and a
// stable content hash for ids/digests.
namespace rti::text {

// Decodes the UTF-8 sequence starting at text[pos]. Advances pos past the
// sequence. Invalid bytes decode as U+FFFD and advance by one byte.
char32_t decode_utf8(std::string_view text, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);

// Splits on runs of Unicode whitespace; never returns empty tokens.
std::vector<std::string> split_ws(std::string_view text);

// Trims and collapses every whitespace run to a single ASCII space.
std::string collapse_ws(std::string_view text);

// Simple 1:1 case folding: ASCII A-Z and Latin-1 À-Þ (× excluded).
std::string fold_case(std::string_view token);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

// FNV-1a, used for issue ids and corpus digests. Stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_combine(std::uint64_t h, std::string_view bytes);
std::string to_hex(std::uint64_t v);

}  // namespace rti::text
