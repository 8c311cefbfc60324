#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trace_explain/bundle.hpp"
#include "trace_explain/concepts.hpp"
#include "trace_explain/corpus.hpp"
#include "trace_explain/explanation.hpp"
#include "trace_explain/extraction.hpp"
#include "trace_explain/graph.hpp"
#include "trace_explain/quality.hpp"
#include "trace_explain/search.hpp"

namespace trace_explain {

enum class CorpusMode { topdown, bottomup, both };

CorpusMode corpus_mode_from_string(const std::string& s);

struct PipelineConfig {
  CorpusMode mode = CorpusMode::both;
  // "fixture:<dir>" or an "http://...{query}" endpoint; empty uses the bundle's search/
  // directory when present.
  std::string provider;
  int max_results = 10;
  std::optional<Blacklist> blacklist;  // overrides the bundle's
  std::vector<std::string> extra_background;
  FilterConfig filter;
  AssemblyConfig assembly;
  HierarchicalVerbLexicon lexicon = HierarchicalVerbLexicon::defaults();
  AbbreviationList abbreviations = AbbreviationList::defaults();
};

struct PipelineResult {
  Blacklist blacklist;
  std::unique_ptr<ConceptIndex> index;
  DomainCorpus corpus;
  std::vector<QueryReport> search_report;
  std::vector<AcronymPair> acronyms;
  std::vector<DefinitionCandidate> definitions;
  std::vector<ContextCandidate> contexts;
  std::vector<RelationTriplet> triplets;
  std::vector<Selection> selections;
  MergeResult merge;
  KnowledgeGraph graph;
  std::vector<std::string> warnings;
  std::vector<LinkExplanation> explanations;  // in link order
};

// Corpus of the selected mode: documents under corpus/ filtered top-down,
// search results collected bottom-up, or both merged.
DomainCorpus build_corpus(const ProjectBundle& bundle,
                          const std::vector<ConceptTerm>& concepts,
                          const PipelineConfig& config,
                          std::vector<QueryReport>* report = nullptr);

// Scored candidates for every concept key: acronym long forms, definition
// and context sentences. Scores come from the evidence sentence.
std::vector<ScoredCandidate> score_candidates(
    const ConceptIndex& index, const DomainCorpus& corpus,
    const std::vector<AcronymPair>& acronyms,
    const std::vector<DefinitionCandidate>& definitions,
    const std::vector<ContextCandidate>& contexts, const Scorer& scorer);

MinedElements best_elements(const std::vector<Selection>& selections);

std::vector<ConceptTerm> concept_terms(const ConceptIndex& index);

PipelineResult run_pipeline(const ProjectBundle& bundle,
                            const PipelineConfig& config = {});

// {"project", "links":[explanation...], "coverage"} as written by
// `trace-explain explain`.
nlohmann::json explanations_json(const ProjectBundle& bundle,
                                 const PipelineResult& result);

}  // namespace trace_explain
