#include "trace_explain/corpus.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {

KmpMatcher::KmpMatcher(std::string_view pattern) : pattern_(fold(pattern)) {
  if (pattern_.empty()) throw InvalidArgument("empty KMP pattern");
  failure_.assign(pattern_.size(), 0);
  std::size_t k = 0;
  for (std::size_t i = 1; i < pattern_.size(); ++i) {
    while (k > 0 && pattern_[i] != pattern_[k]) k = failure_[k - 1];
    if (pattern_[i] == pattern_[k]) ++k;
    failure_[i] = k;
  }
}

std::vector<std::size_t> KmpMatcher::find_all(std::string_view text) const {
  std::vector<std::size_t> out;
  const std::size_t m = pattern_.size();
  std::size_t k = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = to_lower(text[i]);
    while (k > 0 && c != pattern_[k]) k = failure_[k - 1];
    if (c == pattern_[k]) ++k;
    if (k == m) {
      out.push_back(i + 1 - m);
      k = failure_[k - 1];
    }
  }
  return out;
}

bool KmpMatcher::matches_word(std::string_view text) const {
  for (auto at : find_all(text))
    if (at_word_boundary(text, at, at + pattern_.size())) return true;
  return false;
}

std::vector<std::size_t> kmp_find(std::string_view pattern,
                                  std::string_view text) {
  return KmpMatcher(pattern).find_all(text);
}

void DomainCorpus::add(CorpusSentence sentence) {
  const std::size_t pos = sentences.size();
  for (const auto& key : sentence.matched_concepts) index[key].push_back(pos);
  sentences.push_back(std::move(sentence));
}

const std::vector<std::size_t>& DomainCorpus::sentences_for(
    const std::string& key) const {
  static const std::vector<std::size_t> kEmpty;
  const auto it = index.find(key);
  return it == index.end() ? kEmpty : it->second;
}

bool DomainCorpus::consistent() const {
  std::size_t refs = 0;
  for (const auto& [key, ids] : index) {
    for (auto id : ids) {
      if (id >= sentences.size()) return false;
      if (!sentences[id].matched_concepts.count(key)) return false;
    }
    refs += ids.size();
  }
  std::size_t claimed = 0;
  for (const auto& s : sentences) {
    if (s.matched_concepts.empty()) return false;
    claimed += s.matched_concepts.size();
  }
  return refs == claimed;
}

ConceptMatcher::ConceptMatcher(const std::vector<std::string>& keys) {
  std::set<std::string> unique;
  for (const auto& k : keys) {
    auto key = canonical_key(k);
    if (!key.empty() && unique.insert(key).second) matchers_.emplace_back(key);
  }
}

std::set<std::string> ConceptMatcher::match(std::string_view text) const {
  std::set<std::string> out;
  for (const auto& m : matchers_)
    if (m.matches_word(text)) out.insert(m.pattern());
  return out;
}

DomainCorpus topdown_filter(const std::vector<RawSentence>& sentences,
                            const std::vector<std::string>& concept_keys) {
  const ConceptMatcher matcher(concept_keys);
  DomainCorpus corpus;
  for (const auto& s : sentences) {
    auto matched = matcher.match(s.text);
    if (matched.empty()) continue;
    corpus.add({s.text, s.uri, std::move(matched), std::nullopt});
  }
  return corpus;
}

DomainCorpus topdown_filter_documents(
    const std::vector<RawSentence>& documents,
    const std::vector<std::string>& concept_keys,
    const AbbreviationList& abbreviations) {
  std::vector<RawSentence> sentences;
  for (const auto& doc : documents)
    for (auto& span : segment_sentences(doc.text, abbreviations))
      sentences.push_back({std::move(span.text), doc.uri});
  return topdown_filter(sentences, concept_keys);
}

DomainCorpus merge_corpora(const DomainCorpus& a, const DomainCorpus& b) {
  DomainCorpus out;
  std::set<std::string> seen;
  for (const auto* c : {&a, &b})
    for (const auto& s : c->sentences)
      if (seen.insert(canonical_key(s.text)).second) out.add(s);
  return out;
}

std::string make_query(std::string_view concept_surface,
                       std::string_view domain_name) {
  if (trim(concept_surface).empty() || trim(domain_name).empty())
    throw InvalidArgument("query needs a concept and a domain name");
  return "what is inbody:" + join(split_whitespace(concept_surface), " ") +
         " in " + join(split_whitespace(domain_name), " ");
}

void write_corpus_jsonl(std::ostream& out, const DomainCorpus& corpus) {
  for (const auto& s : corpus.sentences) {
    nlohmann::json j;
    j["text"] = s.text;
    j["uri"] = s.source_uri;
    j["concepts"] = s.matched_concepts;
    out << j.dump() << '\n';
  }
}

DomainCorpus read_corpus_jsonl(std::istream& in) {
  DomainCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      CorpusSentence s;
      s.text = j.at("text").get<std::string>();
      s.source_uri = j.value("uri", "");
      for (const auto& k : j.at("concepts"))
        s.matched_concepts.insert(k.get<std::string>());
      if (s.matched_concepts.empty())
        throw FormatError("corpus line " + std::to_string(line_no) +
                          " has no concepts");
      corpus.add(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("malformed corpus line " + std::to_string(line_no) +
                        ": " + e.what());
    }
  }
  return corpus;
}

}  // namespace trace_explain
