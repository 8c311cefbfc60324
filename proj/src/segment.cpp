#include "trace_explain/segment.hpp"

#include <fstream>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace {

bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

bool is_closer(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}

// The whitespace-delimited word ending right before position `dot`, with
// leading punctuation such as '(' removed.
std::string_view word_before(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(text[b - 1])) --b;
  std::string_view w = text.substr(b, dot - b);
  while (!w.empty() && !is_alnum(w.front())) w.remove_prefix(1);
  return w;
}

}  // namespace

AbbreviationList AbbreviationList::defaults() {
  return AbbreviationList{
      {"dr", "mr", "ms", "e.g", "i.e", "etc", "vs", "fig", "eq"}};
}

AbbreviationList AbbreviationList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open abbreviation file " + path.string());
  AbbreviationList out;
  std::string line;
  while (std::getline(in, line)) {
    auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (body.back() == '.') body.remove_suffix(1);
    out.words.insert(fold(body));
  }
  return out;
}

bool AbbreviationList::contains(std::string_view word) const {
  return words.count(fold(word)) > 0;
}

std::vector<SentenceSpan> segment_sentences(
    std::string_view text, const AbbreviationList& abbreviations) {
  std::vector<SentenceSpan> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    while (start < end && is_space(text[start])) ++start;
    std::size_t e = end;
    while (e > start && is_space(text[e - 1])) --e;
    if (e > start) out.push_back({start, std::string(text.substr(start, e - start))});
    start = end;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    const std::size_t first = i;
    while (i < text.size() && is_terminal(text[i])) ++i;
    while (i < text.size() && is_closer(text[i])) ++i;
    const std::size_t end = i;

    if (text[first] == '.') {
      const auto word = word_before(text, first);
      const bool single_initial = word.size() == 1 && is_upper(word[0]);
      if (single_initial || abbreviations.contains(word)) continue;
    }

    std::size_t j = end;
    while (j < text.size() && is_space(text[j])) ++j;
    if (j == text.size()) {
      emit(text.size());
      break;
    }
    if (j > end && is_upper(text[j])) emit(end);
  }
  emit(text.size());
  return out;
}

}  // namespace trace_explain
