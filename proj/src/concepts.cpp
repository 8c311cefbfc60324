#include "trace_explain/concepts.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace {

std::string_view base_label(std::string_view label) {
  const auto colon = label.find(':');
  return colon == std::string_view::npos ? label : label.substr(0, colon);
}

// Parent of `index`, or 0.
int parent(const ParsedSentence& s, int index) {
  const auto* arc = s.arc_to(index);
  return arc ? arc->head : 0;
}

bool attached_by_modifier(const ParsedSentence& s, int index) {
  const auto* arc = s.arc_to(index);
  return arc && arc->head != 0 && is_phrase_modifier_label(arc->label);
}

// True if a chain of modifier arcs leads from `index` up to a noun.
bool modifies_a_noun(const ParsedSentence& s, int index) {
  int cur = index;
  int guard = s.size();
  while (attached_by_modifier(s, cur) && guard-- > 0) {
    cur = parent(s, cur);
    if (is_noun(s.token(cur))) return true;
  }
  return false;
}

// True if `index` reaches `head` through modifier arcs only.
bool in_phrase_of(const ParsedSentence& s, int index, int head) {
  int cur = index;
  int guard = s.size();
  while (attached_by_modifier(s, cur) && guard-- > 0) {
    cur = parent(s, cur);
    if (cur == head) return true;
  }
  return false;
}

bool all_upper(std::string_view s) {
  bool any = false;
  for (char c : s) {
    if (!is_alpha(c)) continue;
    if (!is_upper(c)) return false;
    any = true;
  }
  return any;
}

}  // namespace

bool is_noun(const Token& t) {
  return t.pos.rfind("NN", 0) == 0 || t.pos == "NOUN" || t.pos == "PROPN";
}

bool is_proper_noun(const Token& t) {
  return t.pos == "NNP" || t.pos == "NNPS" || t.pos == "PROPN";
}

bool is_phrase_modifier_label(std::string_view label) {
  const auto base = base_label(label);
  return base == "compound" || base == "amod" || base == "flat";
}

std::vector<Concept> detect_concepts(const ParsedSentence& s) {
  std::vector<Concept> out;
  const auto spans = s.token_spans();
  for (int h = 1; h <= s.size(); ++h) {
    if (!is_noun(s.token(h)) || modifies_a_noun(s, h)) continue;
    int first = h;
    int last = h;
    while (first > 1 && in_phrase_of(s, first - 1, h)) --first;
    while (last < s.size() && in_phrase_of(s, last + 1, h)) ++last;
    if (first == last && !is_proper_noun(s.token(h)) &&
        !all_upper(s.token(h).text))
      continue;

    Concept c;
    c.token_span = {first, last};
    c.head_index = h;
    c.sentence_id = s.id;
    const auto& b = spans[first - 1];
    const auto& e = spans[last - 1];
    if (e.end > b.begin && b.end > b.begin) {
      c.char_span = {b.begin, e.end};
      c.surface = s.raw_text.substr(b.begin, e.end - b.begin);
    } else {
      std::vector<std::string> words;
      for (int i = first; i <= last; ++i) words.push_back(s.token(i).text);
      c.surface = join(words, " ");
      c.char_span = {b.begin, b.begin};
    }
    c.id = canonical_key(c.surface);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Concept> detect_concepts(const Artifact& artifact,
                                     std::size_t sentence_index) {
  auto concepts = detect_concepts(artifact.sentences.at(sentence_index));
  const auto spans = artifact.token_spans(sentence_index);
  for (auto& c : concepts) {
    const auto& b = spans[c.token_span.first - 1];
    const auto& e = spans[c.token_span.last - 1];
    if (e.end <= b.begin) continue;
    c.char_span = {b.begin, e.end};
    c.surface = artifact.text.substr(b.begin, e.end - b.begin);
    c.id = canonical_key(c.surface);
  }
  return concepts;
}

bool is_acronym(std::string_view surface) {
  int letters = 0;
  for (char c : surface) {
    if (!is_alpha(c)) continue;
    if (!is_upper(c)) return false;
    ++letters;
  }
  return letters >= 2;
}

Blacklist build_blacklist(const std::vector<KeyCount>& frequencies,
                          std::uint64_t min_count, double top_fraction) {
  if (!(top_fraction > 0.0 && top_fraction <= 1.0))
    throw InvalidArgument("top_fraction must lie in (0, 1]");
  std::map<std::string, std::uint64_t> totals;
  for (const auto& [key, count] : frequencies) totals[key] += count;

  std::vector<KeyCount> ranked(totals.begin(), totals.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const KeyCount& a, const KeyCount& b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  const auto cap = static_cast<std::size_t>(
      std::ceil(top_fraction * static_cast<double>(ranked.size())));

  Blacklist out;
  out.min_count = min_count;
  out.top_fraction = top_fraction;
  for (std::size_t i = 0; i < ranked.size() && i < cap; ++i)
    if (ranked[i].second > min_count) out.entries.insert(ranked[i]);
  return out;
}

void write_blacklist(std::ostream& out, const Blacklist& blacklist) {
  for (const auto& [key, count] : blacklist.entries)
    out << key << '\t' << count << '\n';
}

Blacklist read_blacklist(std::istream& in) {
  Blacklist out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto tab = line.rfind('\t');
    std::uint64_t count = 0;
    if (tab != std::string::npos) {
      try {
        count = std::stoull(line.substr(tab + 1));
      } catch (const std::exception&) {
        throw FormatError("malformed blacklist line " +
                          std::to_string(line_no));
      }
    }
    out.entries[canonical_key(line.substr(0, tab))] = count;
  }
  return out;
}

std::vector<Concept> filter_general(std::vector<Concept> concepts,
                                    const Blacklist& blacklist) {
  std::erase_if(concepts,
                [&](const Concept& c) { return blacklist.contains(c.id); });
  return concepts;
}

void ConceptCounter::add(const ParsedSentence& sentence) {
  for (const auto& c : detect_concepts(sentence)) ++counts_[c.id];
}

void ConceptCounter::merge(const ConceptCounter& other) {
  for (const auto& [k, n] : other.counts_) counts_[k] += n;
}

std::vector<KeyCount> ConceptCounter::frequencies() const {
  return {counts_.begin(), counts_.end()};
}

ConceptIndex::ConceptIndex(const Project& project,
                           const Blacklist& blacklist) {
  for (const auto& artifact : project.artifacts) {
    auto& list = by_artifact_[artifact.id];
    for (std::size_t i = 0; i < artifact.sentences.size(); ++i) {
      auto found = filter_general(detect_concepts(artifact, i), blacklist);
      list.insert(list.end(), found.begin(), found.end());
    }
    std::set<std::string> seen;
    for (const auto& c : list) {
      if (seen.insert(c.id).second) ++df_[c.id];
      if (surfaces_.emplace(c.id, c.surface).second) keys_.push_back(c.id);
    }
  }
}

const std::vector<Concept>& ConceptIndex::concepts(
    const std::string& artifact_id) const {
  const auto it = by_artifact_.find(artifact_id);
  if (it == by_artifact_.end())
    throw NotFoundError("unknown artifact '" + artifact_id + "'");
  return it->second;
}

std::size_t ConceptIndex::occurrences(const std::string& artifact_id,
                                      const std::string& key) const {
  const auto& list = concepts(artifact_id);
  return static_cast<std::size_t>(std::count_if(
      list.begin(), list.end(), [&](const Concept& c) { return c.id == key; }));
}

std::size_t ConceptIndex::document_frequency(const std::string& key) const {
  const auto it = df_.find(key);
  return it == df_.end() ? 0 : it->second;
}

bool ConceptIndex::contains(const std::string& key) const {
  return df_.count(key) > 0;
}

const std::string& ConceptIndex::surface(const std::string& key) const {
  const auto it = surfaces_.find(key);
  if (it == surfaces_.end())
    throw NotFoundError("unknown concept '" + key + "'");
  return it->second;
}

LinkImportance importance_for_link(const ConceptIndex& index,
                                   const TraceLink& link) {
  const double n = static_cast<double>(index.artifact_count());
  auto raw_for = [&](const std::string& artifact_id) {
    std::map<std::string, double> raw;
    for (const auto& c : index.concepts(artifact_id)) {
      if (raw.count(c.id)) continue;
      const double tf =
          static_cast<double>(index.occurrences(artifact_id, c.id));
      const double df = static_cast<double>(index.document_frequency(c.id));
      raw[c.id] = tf * std::log(1.0 + n / df);
    }
    return raw;
  };
  LinkImportance out;
  out.source = raw_for(link.source_artifact_id);
  out.target = raw_for(link.target_artifact_id);

  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (const auto* side : {&out.source, &out.target})
    for (const auto& [k, v] : *side) {
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  for (auto* side : {&out.source, &out.target})
    for (auto& [k, v] : *side) v = hi > lo ? (v - lo) / (hi - lo) : 1.0;
  return out;
}

ImportanceScore compute_importance(const Concept& c,
                                   const std::string& artifact_id,
                                   const ConceptIndex& index,
                                   const TraceLink& link) {
  if (!index.contains(c.id))
    throw NotFoundError("concept '" + c.id + "' not in project");
  const auto scores = importance_for_link(index, link);
  const std::map<std::string, double>* side = nullptr;
  if (artifact_id == link.source_artifact_id) side = &scores.source;
  else if (artifact_id == link.target_artifact_id) side = &scores.target;
  else
    throw InvalidArgument("artifact '" + artifact_id + "' is not on link " +
                          link.id);
  const auto it = side->find(c.id);
  if (it == side->end())
    throw NotFoundError("concept '" + c.id + "' not in artifact " +
                        artifact_id);
  return {it->second};
}

}  // namespace trace_explain
