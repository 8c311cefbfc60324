#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trace_explain/concepts.hpp"
#include "trace_explain/conllu.hpp"
#include "trace_explain/corpus.hpp"
#include "trace_explain/model.hpp"

namespace trace_explain {

// Parses keyed by the canonical form of their raw text, so corpus sentences
// found by string matching can pick up a parse produced elsewhere.
class ParseStore {
 public:
  void add(const ParsedSentence& sentence);
  void add_all(const std::vector<ParsedSentence>& sentences);
  const ParsedSentence* find(const std::string& text) const;
  std::size_t size() const { return by_text_.size(); }

 private:
  std::map<std::string, ParsedSentence> by_text_;
};

// Attaches parses to sentences that lack one; returns how many were
// attached.
std::size_t attach_parses(DomainCorpus& corpus, const ParseStore& store);

// On-disk project directory:
//   project.json           {"id", "domain_name", optional "artifacts": {id: "source"|"target"}}
//   artifacts/<id>.txt     artifact text
//   artifacts/<id>.conllu  its parse (sentences in text order)
//   links.csv              link_id,source_id,target_id[,gold_label]
//   glossary.json          optional
//   blacklist.tsv          optional, key<TAB>count
//   corpus/*.txt           optional domain documents; corpus/*.conllu their parses
//   search/                optional fixture search pages; search/*.conllu their parses
//   background/*.txt       optional out-of-domain text, one document per line
struct ProjectBundle {
  std::filesystem::path root;
  Project project;
  std::optional<Blacklist> blacklist;
  std::vector<RawSentence> corpus_documents;
  std::vector<std::string> background_documents;
  ParseStore parses;
  std::optional<std::filesystem::path> search_dir;
};

struct BundleOptions {
  LabelAliases aliases = LabelAliases::defaults();
};

// Throws FormatError / NotFoundError with the offending path in the message.
ProjectBundle load_bundle(const std::filesystem::path& root,
                          const BundleOptions& options = {});

std::vector<TraceLink> read_links_csv(const std::filesystem::path& path);

// One document per non-empty line of every *.txt file under `dir`, files in
// name order.
std::vector<std::string> read_line_documents(const std::filesystem::path& dir);

}  // namespace trace_explain
