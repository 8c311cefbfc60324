#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace trace_explain {

struct SentenceSpan {
  std::size_t offset = 0;
  std::string text;

  bool operator==(const SentenceSpan&) const = default;
};

// Words (without their trailing '.') after which a period never ends a
// sentence. Compared case-insensitively.
struct AbbreviationList {
  std::set<std::string> words;

  static AbbreviationList defaults();
  // One abbreviation per line; '#' starts a comment.
  static AbbreviationList load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
};

// Rule-based splitter: a sentence ends after a run of '.', '?' or '!'
// (plus closing quotes/brackets) that is followed by whitespace and then an
// upper-case letter, or by the end of the text. A period after a single
// upper-case letter or a listed abbreviation never ends a sentence.
std::vector<SentenceSpan> segment_sentences(
    std::string_view text,
    const AbbreviationList& abbreviations = AbbreviationList::defaults());

}  // namespace trace_explain
