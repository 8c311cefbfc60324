#include <algorithm>
#include <map>

#include "trace_explain/concepts.hpp"
#include "trace_explain/extraction.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace {

std::size_t word_count(std::string_view s) {
  return split_whitespace(s).size();
}

bool has_letter(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_alpha(c); });
}

bool has_capital(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_upper(c); });
}

bool plausible_short_form(std::string_view s) {
  return !s.empty() && has_letter(s) && (is_alnum(s.front()) || s.front() == '(');
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

// Index of the ')' matching the '(' at `open`, or npos.
std::size_t matching_paren(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')' && --depth == 0) return i;
  }
  return std::string_view::npos;
}

}  // namespace

std::size_t short_form_length(std::string_view short_form) {
  return static_cast<std::size_t>(
      std::count_if(short_form.begin(), short_form.end(),
                    [](char c) { return is_alnum(c); }));
}

std::optional<std::string> best_long_form(std::string_view short_form,
                                          std::string_view candidate) {
  long s = static_cast<long>(short_form.size()) - 1;
  long l = static_cast<long>(candidate.size()) - 1;
  for (; s >= 0; --s) {
    const char want = to_lower(short_form[s]);
    if (!is_alnum(want)) continue;
    // The first short-form character must also open a word.
    while ((l >= 0 && to_lower(candidate[l]) != want) ||
           (s == 0 && l > 0 && is_alnum(candidate[l - 1])))
      --l;
    if (l < 0) return std::nullopt;
    --l;
  }
  const auto space = l < 0 ? std::string_view::npos : candidate.rfind(' ', l);
  const std::size_t begin = space == std::string_view::npos ? 0 : space + 1;
  return std::string(candidate.substr(begin));
}

bool valid_acronym_pair(std::string_view short_form,
                        std::string_view long_form) {
  if (!is_acronym(short_form)) return false;
  const std::size_t n = short_form_length(short_form);
  if (n < 2 || n > 10) return false;
  const auto best = best_long_form(short_form, long_form);
  if (!best || *best != long_form) return false;
  const std::size_t words = word_count(long_form);
  if (words > std::min(n + 5, n * 2)) return false;
  if (long_form.size() < short_form.size()) return false;
  const std::string sf(short_form);
  if (long_form.find(sf + " ") != std::string_view::npos ||
      ends_with(long_form, sf))
    return false;
  return true;
}

std::vector<std::pair<std::string, std::string>> find_acronym_pairs(
    std::string_view sentence) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t open = sentence.find(" (");
  while (open != std::string_view::npos) {
    const std::size_t paren = open + 1;
    const std::size_t close = matching_paren(sentence, paren);
    if (close == std::string_view::npos) break;

    std::string_view inner = sentence.substr(paren + 1, close - paren - 1);
    for (std::string_view cut : {std::string_view(", "), std::string_view("; ")}) {
      const auto at = inner.find(cut);
      if (at != std::string_view::npos) inner = inner.substr(0, at);
    }
    inner = trim(inner);
    std::string_view before = trim(sentence.substr(0, open));

    std::string short_form;
    std::string long_candidate;
    if (word_count(inner) > 2 || inner.size() > before.size()) {
      // "SF (long form)": the short form is the word before the paren.
      const auto space = before.rfind(' ');
      std::string_view word =
          space == std::string_view::npos ? before : before.substr(space + 1);
      while (!word.empty() && !is_alnum(word.back())) word.remove_suffix(1);
      if (has_capital(word)) {
        short_form = std::string(word);
        long_candidate = std::string(inner);
      }
    } else {
      short_form = std::string(inner);
      long_candidate = std::string(before);
    }

    if (plausible_short_form(short_form) && short_form.size() > 1) {
      if (auto best = best_long_form(short_form, long_candidate)) {
        const std::string lf(trim(*best));
        if (valid_acronym_pair(short_form, lf)) out.emplace_back(short_form, lf);
      }
    }
    open = sentence.find(" (", close);
  }
  return out;
}

std::vector<AcronymPair> extract_acronym_pairs(const DomainCorpus& corpus) {
  std::vector<AcronymPair> out;
  std::map<std::pair<std::string, std::string>, bool> seen;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    for (auto& [sf, lf] : find_acronym_pairs(corpus.sentences[i].text)) {
      if (!seen.emplace(std::make_pair(sf, canonical_key(lf)), true).second)
        continue;
      out.push_back({sf, lf, i});
    }
  }
  return out;
}

}  // namespace trace_explain
