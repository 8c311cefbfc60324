#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "trace_explain/concepts.hpp"
#include "trace_explain/error.hpp"
#include "trace_explain/extraction.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace {

std::string squash(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!is_space(c)) out += to_lower(c);
  return out;
}

// Heads of every occurrence of `key` in the parse.
std::vector<int> concept_heads(const ParsedSentence& parse,
                               std::string_view key) {
  std::vector<int> heads;
  const std::string want = squash(key);
  if (want.empty()) return heads;
  for (int i = 1; i <= parse.size(); ++i) {
    std::string acc;
    for (int j = i; j <= parse.size(); ++j) {
      acc += squash(parse.token(j).text);
      if (acc.size() > want.size() || want.compare(0, acc.size(), acc) != 0)
        break;
      if (acc.size() != want.size()) continue;
      int head = j;
      for (int k = j; k >= i; --k) {
        const auto* arc = parse.arc_to(k);
        if (!arc || arc->head < i || arc->head > j) {
          head = k;
          break;
        }
      }
      heads.push_back(head);
      break;
    }
  }
  return heads;
}

const ParsedSentence& require_parse(const DomainCorpus& corpus,
                                    std::size_t pos) {
  const auto& s = corpus.sentences.at(pos);
  if (!s.parse)
    throw InvalidArgument("corpus sentence " + std::to_string(pos) +
                          " has no parse: \"" + s.text + "\"");
  return *s.parse;
}

bool is_verb_tag(const Token& t) {
  return t.pos.rfind("VB", 0) == 0 || t.pos == "VERB" || t.pos == "AUX";
}

}  // namespace

int locate_concept_head(const ParsedSentence& parse, std::string_view key) {
  const auto heads = concept_heads(parse, key);
  return heads.empty() ? 0 : heads.front();
}

bool is_nominal_subject(const ParsedSentence& parse, int head) {
  const auto* arc = parse.arc_to(head);
  return arc && arc->label == "nsubj";
}

int definitional_verb(const ParsedSentence& parse, int head) {
  std::vector<int> dist(parse.size() + 1, -1);
  std::deque<int> queue{head};
  dist[head] = 0;
  int found = 0;
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    if (dist[cur] == 2) continue;
    std::vector<int> next;
    for (const auto& arc : parse.arcs) {
      if (arc.label != "nsubj" && arc.label != "cop") continue;
      if (arc.head == cur && arc.dependent != 0) next.push_back(arc.dependent);
      if (arc.dependent == cur && arc.head != 0) next.push_back(arc.head);
    }
    std::sort(next.begin(), next.end());
    for (int n : next) {
      if (dist[n] != -1) continue;
      dist[n] = dist[cur] + 1;
      queue.push_back(n);
      const auto& tok = parse.token(n);
      const auto form = fold(tok.text);
      if (!found && (form == "is" || form == "are" || tok.pos == "VBZ"))
        found = n;
    }
  }
  return found;
}

std::vector<DefinitionCandidate> extract_definitions(
    const std::string& concept_key, const DomainCorpus& corpus) {
  std::vector<DefinitionCandidate> out;
  for (auto pos : corpus.sentences_for(concept_key)) {
    const auto& parse = require_parse(corpus, pos);
    for (int head : concept_heads(parse, concept_key)) {
      if (!is_nominal_subject(parse, head)) continue;
      if (int verb = definitional_verb(parse, head)) {
        out.push_back({concept_key, pos, verb});
        break;
      }
    }
  }
  return out;
}

std::vector<ContextCandidate> extract_contexts(const std::string& concept_key,
                                               const DomainCorpus& corpus) {
  std::vector<ContextCandidate> out;
  for (auto pos : corpus.sentences_for(concept_key)) {
    const auto& parse = require_parse(corpus, pos);
    for (int head : concept_heads(parse, concept_key)) {
      if (is_nominal_subject(parse, head)) {
        out.push_back({concept_key, pos});
        break;
      }
    }
  }
  return out;
}

HierarchicalVerbLexicon HierarchicalVerbLexicon::defaults() {
  return {{"include", "contain", "comprise", "consist", "involve", "cover",
           "encompass", "incorporate", "embrace", "hold", "admit", "span"}};
}

HierarchicalVerbLexicon HierarchicalVerbLexicon::load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open verb lexicon " + path.string());
  HierarchicalVerbLexicon out;
  std::string line;
  while (std::getline(in, line)) {
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    out.lemmas.insert(fold(body));
  }
  if (out.lemmas.empty())
    throw FormatError("verb lexicon " + path.string() + " is empty");
  return out;
}

bool HierarchicalVerbLexicon::contains(std::string_view lemma) const {
  return lemmas.count(std::string(lemma)) > 0;
}

std::string verb_lemma(const Token& token) {
  const std::string form = fold(token.text);
  if (!token.lemma.empty() && token.lemma != "_" && fold(token.lemma) != form)
    return fold(token.lemma);
  auto ends = [&](std::string_view suf) {
    return form.size() > suf.size() + 1 &&
           form.compare(form.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends("ies")) return form.substr(0, form.size() - 3) + "y";
  for (std::string_view suf : {"sses", "shes", "ches", "xes", "zes"})
    if (ends(suf)) return form.substr(0, form.size() - 2);
  if (ends("s") && !ends("ss")) return form.substr(0, form.size() - 1);
  return form;
}

std::vector<RelationTriplet> extract_triplets(
    const DomainCorpus& corpus, const HierarchicalVerbLexicon& lexicon) {
  std::vector<RelationTriplet> out;
  for (std::size_t pos = 0; pos < corpus.sentences.size(); ++pos) {
    const auto& parse = require_parse(corpus, pos);

    // Resolve head tokens to concept keys; longer project keys win.
    std::map<int, std::string> concept_at;
    std::vector<std::string> keys(corpus.sentences[pos].matched_concepts.begin(),
                                  corpus.sentences[pos].matched_concepts.end());
    std::stable_sort(keys.begin(), keys.end(),
                     [](const std::string& a, const std::string& b) {
                       return a.size() > b.size();
                     });
    for (const auto& key : keys)
      for (int head : concept_heads(parse, key)) concept_at.emplace(head, key);
    for (const auto& c : detect_concepts(parse))
      concept_at.emplace(c.head_index, c.id);

    for (int v = 1; v <= parse.size(); ++v) {
      const auto& tok = parse.token(v);
      if (!is_verb_tag(tok)) continue;
      const auto lemma = verb_lemma(tok);
      if (!lexicon.contains(lemma)) continue;
      std::vector<int> subjects;
      std::vector<int> objects;
      for (const auto* arc : parse.arcs_from(v)) {
        if (!concept_at.count(arc->dependent)) continue;
        if (arc->label == "nsubj" || arc->label == "xsubj")
          subjects.push_back(arc->dependent);
        else if (arc->label == "obj")
          objects.push_back(arc->dependent);
      }
      for (int s : subjects)
        for (int o : objects) {
          const auto& subj = concept_at.at(s);
          const auto& obj = concept_at.at(o);
          if (subj == obj) continue;
          out.push_back({subj, lemma, tok.text, obj, pos});
        }
    }
  }
  return out;
}

void write_acronyms_jsonl(std::ostream& out, const DomainCorpus& corpus,
                          const std::vector<AcronymPair>& pairs) {
  for (const auto& p : pairs) {
    nlohmann::json j{{"short", p.short_form},
                     {"long", p.long_form},
                     {"evidence", corpus.sentences.at(p.evidence).text},
                     {"uri", corpus.sentences.at(p.evidence).source_uri}};
    out << j.dump() << '\n';
  }
}

void write_definitions_jsonl(std::ostream& out, const DomainCorpus& corpus,
                             const std::vector<DefinitionCandidate>& defs) {
  for (const auto& d : defs) {
    const auto& s = corpus.sentences.at(d.sentence);
    nlohmann::json j{{"concept", d.concept_key},
                     {"text", s.text},
                     {"uri", s.source_uri},
                     {"verb", s.parse ? s.parse->token(d.verb_index).text : ""}};
    out << j.dump() << '\n';
  }
}

void write_contexts_jsonl(std::ostream& out, const DomainCorpus& corpus,
                          const std::vector<ContextCandidate>& contexts) {
  for (const auto& c : contexts) {
    const auto& s = corpus.sentences.at(c.sentence);
    nlohmann::json j{{"concept", c.concept_key},
                     {"text", s.text},
                     {"uri", s.source_uri}};
    out << j.dump() << '\n';
  }
}

void write_triplets_jsonl(std::ostream& out, const DomainCorpus& corpus,
                          const std::vector<RelationTriplet>& triplets) {
  for (const auto& t : triplets) {
    nlohmann::json j{{"s", t.subject},
                     {"v", t.verb},
                     {"verb", t.verb_surface},
                     {"o", t.object},
                     {"evidence", corpus.sentences.at(t.evidence).text}};
    out << j.dump() << '\n';
  }
}

}  // namespace trace_explain
