#include "trace_explain/model.hpp"

#include <algorithm>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {

std::string to_string(Origin origin) {
  switch (origin) {
    case Origin::project_artifact: return "project_artifact";
    case Origin::corpus_document: return "corpus_document";
    case Origin::search_result: return "search_result";
  }
  return "corpus_document";
}

Origin origin_from_string(const std::string& s) {
  if (s == "project_artifact") return Origin::project_artifact;
  if (s == "corpus_document") return Origin::corpus_document;
  if (s == "search_result") return Origin::search_result;
  throw FormatError("unknown sentence origin '" + s + "'");
}

std::string to_string(ArtifactKind kind) {
  return kind == ArtifactKind::source ? "source" : "target";
}

const DependencyArc* ParsedSentence::arc_to(int index) const {
  for (const auto& arc : arcs)
    if (arc.dependent == index) return &arc;
  return nullptr;
}

std::vector<const DependencyArc*> ParsedSentence::arcs_from(int head) const {
  std::vector<const DependencyArc*> out;
  for (const auto& arc : arcs)
    if (arc.head == head) out.push_back(&arc);
  return out;
}

std::vector<CharSpan> ParsedSentence::token_spans() const {
  std::vector<CharSpan> spans;
  spans.reserve(tokens.size());
  std::size_t cursor = 0;
  for (const auto& tok : tokens) {
    const auto at = raw_text.find(tok.text, cursor);
    if (at == std::string::npos) {
      spans.push_back({cursor, cursor});
      continue;
    }
    spans.push_back({at, at + tok.text.size()});
    cursor = at + tok.text.size();
  }
  return spans;
}

void validate_tree(const ParsedSentence& s) {
  const int n = s.size();
  for (int i = 0; i < n; ++i) {
    if (s.tokens[i].index != i + 1)
      throw FormatError("token indices are not 1..n, sentence " + s.id);
    if (s.tokens[i].text.empty())
      throw FormatError("empty token text, sentence " + s.id);
  }
  std::vector<int> head(n + 1, -1);
  for (const auto& arc : s.arcs) {
    if (arc.dependent < 1 || arc.dependent > n || arc.head < 0 ||
        arc.head > n)
      throw FormatError("arc endpoint out of range, sentence " + s.id);
    if (arc.dependent == arc.head)
      throw FormatError("self-loop arc, sentence " + s.id);
    if (head[arc.dependent] != -1)
      throw FormatError("multiple heads, sentence " + s.id);
    head[arc.dependent] = arc.head;
  }
  for (int i = 1; i <= n; ++i)
    if (head[i] == -1)
      throw FormatError("token " + std::to_string(i) +
                        " has no head, sentence " + s.id);
  // Every token must reach the root within n steps.
  for (int i = 1; i <= n; ++i) {
    int cur = i;
    int steps = 0;
    while (cur != 0) {
      cur = head[cur];
      if (++steps > n) throw FormatError("cycle, sentence " + s.id);
    }
  }
}

const Artifact& Project::artifact(const std::string& artifact_id) const {
  for (const auto& a : artifacts)
    if (a.id == artifact_id) return a;
  throw NotFoundError("unknown artifact '" + artifact_id + "'");
}

const TraceLink& Project::link(const std::string& link_id) const {
  for (const auto& l : links)
    if (l.id == link_id) return l;
  throw NotFoundError("unknown link '" + link_id + "'");
}

std::vector<CharSpan> Artifact::token_spans(std::size_t i) const {
  const auto& s = sentences.at(i);
  std::vector<CharSpan> spans;
  spans.reserve(s.tokens.size());
  std::size_t cursor = i < sentence_offsets.size() ? sentence_offsets[i] : 0;
  for (const auto& tok : s.tokens) {
    const auto at = text.find(tok.text, cursor);
    if (at == std::string::npos) {
      spans.push_back({cursor, cursor});
      continue;
    }
    spans.push_back({at, at + tok.text.size()});
    cursor = at + tok.text.size();
  }
  return spans;
}

void locate_sentences(Artifact& artifact) {
  artifact.sentence_offsets.clear();
  std::size_t cursor = 0;
  for (const auto& s : artifact.sentences) {
    // Match on the first token so whitespace differences inside the
    // sentence do not matter; fall back to the full raw text.
    std::size_t at = artifact.text.find(s.raw_text, cursor);
    if (at == std::string::npos && !s.tokens.empty())
      at = artifact.text.find(s.tokens.front().text, cursor);
    if (at == std::string::npos)
      throw FormatError("sentence " + s.id + " not found in artifact " +
                        artifact.id);
    artifact.sentence_offsets.push_back(at);
    cursor = at + 1;
  }
}

}  // namespace trace_explain
