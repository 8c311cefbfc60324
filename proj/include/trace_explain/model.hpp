#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace trace_explain {

struct Token {
  int index = 0;  // 1-based
  std::string text;
  std::string lemma;
  std::string pos;

  bool operator==(const Token&) const = default;
};

struct DependencyArc {
  int head = 0;  // 0 = root
  int dependent = 0;
  std::string label;

  bool operator==(const DependencyArc&) const = default;
};

enum class Origin { project_artifact, corpus_document, search_result };

std::string to_string(Origin origin);
Origin origin_from_string(const std::string& s);

struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive

  bool operator==(const CharSpan&) const = default;
  auto operator<=>(const CharSpan&) const = default;
};

struct ParsedSentence {
  std::string id;
  std::string raw_text;
  std::vector<Token> tokens;
  std::vector<DependencyArc> arcs;
  Origin origin = Origin::corpus_document;
  std::string source;  // locator: file path, uri, artifact id

  bool operator==(const ParsedSentence&) const = default;

  const Token& token(int index) const { return tokens.at(index - 1); }
  int size() const { return static_cast<int>(tokens.size()); }

  // Arc whose dependent is `index`; nullptr if none.
  const DependencyArc* arc_to(int index) const;
  std::vector<const DependencyArc*> arcs_from(int head) const;

  // Character span of each token inside raw_text, found by left-to-right
  // alignment. Tokens that cannot be aligned get an empty span at the
  // cursor.
  std::vector<CharSpan> token_spans() const;
};

// Throws FormatError unless arcs form a tree rooted at 0 covering every
// token exactly once.
void validate_tree(const ParsedSentence& sentence);

enum class ArtifactKind { source, target };

std::string to_string(ArtifactKind kind);

struct Artifact {
  std::string id;
  std::string project_id;
  ArtifactKind kind = ArtifactKind::source;
  std::string text;
  std::vector<ParsedSentence> sentences;
  // Offset of each sentence's raw_text inside `text`.
  std::vector<std::size_t> sentence_offsets;

  // Token spans of sentence `i` aligned against `text` (not raw_text).
  std::vector<CharSpan> token_spans(std::size_t i) const;
};

enum class GoldLabel { correct, incorrect };

struct TraceLink {
  std::string id;
  std::string source_artifact_id;
  std::string target_artifact_id;
  std::optional<GoldLabel> gold_label;
};

struct Glossary {
  std::map<std::string, std::string> acronyms;     // short (case kept) -> long
  std::map<std::string, std::string> definitions;  // canonical key -> text
  std::map<std::string, std::string> contexts;     // canonical key -> text
};

struct Project {
  std::string id;
  std::string domain_name;
  std::vector<Artifact> artifacts;
  std::vector<TraceLink> links;
  std::optional<Glossary> glossary;

  const Artifact& artifact(const std::string& artifact_id) const;
  const TraceLink& link(const std::string& link_id) const;
};

// Places each sentence's raw_text inside the artifact text, filling
// sentence_offsets. Throws FormatError when a sentence cannot be located.
void locate_sentences(Artifact& artifact);

}  // namespace trace_explain
