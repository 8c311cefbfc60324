#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trace_explain/model.hpp"

namespace trace_explain {

// Inclusive 1-based token range.
struct TokenSpan {
  int first = 0;
  int last = 0;

  bool operator==(const TokenSpan&) const = default;
};

struct Concept {
  std::string id;  // canonical key
  std::string surface;
  TokenSpan token_span;
  int head_index = 0;
  CharSpan char_span;  // in the owning text (sentence or artifact)
  std::string sentence_id;

  bool operator==(const Concept&) const = default;
};

bool is_noun(const Token& token);
bool is_proper_noun(const Token& token);

// Labels that extend a noun phrase leftwards/rightwards from its head.
bool is_phrase_modifier_label(std::string_view label);

// Noun phrases bounded by compound/amod/flat attachments, left to right.
// Char spans are relative to sentence.raw_text.
std::vector<Concept> detect_concepts(const ParsedSentence& sentence);

// Same, with char spans in artifact.text.
std::vector<Concept> detect_concepts(const Artifact& artifact,
                                     std::size_t sentence_index);

// At least two letters, all upper-case; digits and punctuation allowed.
bool is_acronym(std::string_view surface);
inline bool is_acronym(const Concept& c) { return is_acronym(c.surface); }

struct Blacklist {
  std::map<std::string, std::uint64_t> entries;  // key -> corpus count
  std::uint64_t min_count = 1000;
  double top_fraction = 0.015;

  bool contains(const std::string& key) const {
    return entries.count(key) > 0;
  }
};

using KeyCount = std::pair<std::string, std::uint64_t>;

// Keeps keys with count > min_count that rank within the top
// ceil(top_fraction * distinct keys) by count (ties: key ascending).
// Repeated keys in the stream are summed.
Blacklist build_blacklist(const std::vector<KeyCount>& frequencies,
                          std::uint64_t min_count = 1000,
                          double top_fraction = 0.015);

// Sorted `key<TAB>count` lines.
void write_blacklist(std::ostream& out, const Blacklist& blacklist);
Blacklist read_blacklist(std::istream& in);

std::vector<Concept> filter_general(std::vector<Concept> concepts,
                                    const Blacklist& blacklist);

// Concept-key frequencies over parsed sentences; feeds build_blacklist.
class ConceptCounter {
 public:
  void add(const ParsedSentence& sentence);
  void merge(const ConceptCounter& other);
  std::vector<KeyCount> frequencies() const;

 private:
  std::map<std::string, std::uint64_t> counts_;
};

// Detected (and blacklist-filtered) concepts of every artifact of a project.
class ConceptIndex {
 public:
  ConceptIndex(const Project& project, const Blacklist& blacklist);

  const std::vector<Concept>& concepts(const std::string& artifact_id) const;
  std::size_t occurrences(const std::string& artifact_id,
                          const std::string& key) const;
  std::size_t document_frequency(const std::string& key) const;
  std::size_t artifact_count() const { return by_artifact_.size(); }
  bool contains(const std::string& key) const;
  // Distinct keys in first-seen order.
  const std::vector<std::string>& keys() const { return keys_; }
  const std::string& surface(const std::string& key) const;

 private:
  std::map<std::string, std::vector<Concept>> by_artifact_;
  std::map<std::string, std::size_t> df_;
  std::map<std::string, std::string> surfaces_;
  std::vector<std::string> keys_;
};

struct ImportanceScore {
  double value = 0.0;
};

// Importance of every concept key on each side of a link: tf-idf
// (occurrences in the artifact x log(1 + N / df)) min-max normalised over
// both artifacts of the link. A constant batch maps to 1.
struct LinkImportance {
  std::map<std::string, double> source;
  std::map<std::string, double> target;
};

LinkImportance importance_for_link(const ConceptIndex& index,
                                   const TraceLink& link);

ImportanceScore compute_importance(const Concept& c,
                                   const std::string& artifact_id,
                                   const ConceptIndex& index,
                                   const TraceLink& link);

}  // namespace trace_explain
