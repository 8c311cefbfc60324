#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trace_explain/model.hpp"
#include "trace_explain/segment.hpp"

namespace trace_explain {

// Knuth-Morris-Pratt matcher over ASCII-folded text. Matches may overlap.
class KmpMatcher {
 public:
  explicit KmpMatcher(std::string_view pattern);

  std::vector<std::size_t> find_all(std::string_view text) const;
  // First match at a word boundary, if any.
  bool matches_word(std::string_view text) const;
  const std::string& pattern() const { return pattern_; }

 private:
  std::string pattern_;
  std::vector<std::size_t> failure_;
};

// All start offsets of `pattern` in `text`, case-insensitive, ascending.
// Throws InvalidArgument on an empty pattern.
std::vector<std::size_t> kmp_find(std::string_view pattern,
                                  std::string_view text);

struct CorpusSentence {
  std::string text;
  std::string source_uri;
  std::set<std::string> matched_concepts;
  std::optional<ParsedSentence> parse;
};

struct DomainCorpus {
  std::vector<CorpusSentence> sentences;
  std::map<std::string, std::vector<std::size_t>> index;  // key -> positions

  void add(CorpusSentence sentence);
  const std::vector<std::size_t>& sentences_for(const std::string& key) const;
  // Index and matched_concepts agree in both directions.
  bool consistent() const;
};

struct RawSentence {
  std::string text;
  std::string uri;
};

// Word-boundary concept matching with one KMP automaton per concept key.
class ConceptMatcher {
 public:
  explicit ConceptMatcher(const std::vector<std::string>& keys);

  std::set<std::string> match(std::string_view text) const;

 private:
  std::vector<KmpMatcher> matchers_;
};

DomainCorpus topdown_filter(const std::vector<RawSentence>& sentences,
                            const std::vector<std::string>& concept_keys);

// Segments each document into sentences, then filters.
DomainCorpus topdown_filter_documents(
    const std::vector<RawSentence>& documents,
    const std::vector<std::string>& concept_keys,
    const AbbreviationList& abbreviations = AbbreviationList::defaults());

// Concatenation that drops sentences whose folded text was already seen.
DomainCorpus merge_corpora(const DomainCorpus& a, const DomainCorpus& b);

std::string make_query(std::string_view concept_surface,
                       std::string_view domain_name);

// JSON Lines: {"text":..., "uri":..., "concepts":[...]} per line.
void write_corpus_jsonl(std::ostream& out, const DomainCorpus& corpus);
DomainCorpus read_corpus_jsonl(std::istream& in);

}  // namespace trace_explain
