#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "trace_explain/conllu.hpp"
#include "trace_explain/corpus.hpp"

namespace test_support {

inline std::filesystem::path data_dir() { return TE_TEST_DATA; }

inline std::vector<trace_explain::ParsedSentence> load_parses(
    const std::string& relative) {
  return trace_explain::ingest_conllu_file(data_dir() / relative);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Tab-separated rows, blank lines and '#' comments skipped.
inline std::vector<std::vector<std::string>> read_tsv(const std::string& relative) {
  std::ifstream in(data_dir() / relative);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// Corpus whose sentences carry their own parses; concepts matched against
// `keys`.
inline trace_explain::DomainCorpus parsed_corpus(
    const std::vector<trace_explain::ParsedSentence>& parses,
    const std::vector<std::string>& keys) {
  trace_explain::DomainCorpus corpus;
  trace_explain::ConceptMatcher matcher(keys);
  for (const auto& p : parses) {
    trace_explain::CorpusSentence s;
    s.text = p.raw_text;
    s.source_uri = "fixture:" + p.id;
    s.matched_concepts = matcher.match(p.raw_text);
    s.parse = p;
    if (!s.matched_concepts.empty()) corpus.add(std::move(s));
  }
  return corpus;
}

}  // namespace test_support
