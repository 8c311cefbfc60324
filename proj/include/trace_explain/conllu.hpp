#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "trace_explain/model.hpp"

namespace trace_explain {

// Dependency label rewrite map applied on ingestion. The defaults translate
// Stanford legacy labels to their Universal Dependencies names.
struct LabelAliases {
  std::map<std::string, std::string> rewrite;

  static LabelAliases defaults();
  // `from<TAB>to` per line; '#' starts a comment.
  static LabelAliases load(const std::filesystem::path& path);

  const std::string& apply(const std::string& label) const;
};

struct ConlluOptions {
  LabelAliases aliases = LabelAliases::defaults();
  Origin origin = Origin::corpus_document;
  std::string source;
};

// Reads CoNLL-U blocks. Multiword-token ranges and empty nodes are skipped.
// Sentence ids come from `# sent_id =`, else "s<block number>".
std::vector<ParsedSentence> ingest_conllu(std::istream& in,
                                          const ConlluOptions& options = {});
std::vector<ParsedSentence> ingest_conllu_file(
    const std::filesystem::path& path, ConlluOptions options = {});

void write_conllu(std::ostream& out, const ParsedSentence& sentence);
std::string to_conllu(const std::vector<ParsedSentence>& sentences);

}  // namespace trace_explain
