#include "trace_explain/pipeline.hpp"

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {

CorpusMode corpus_mode_from_string(const std::string& s) {
  if (s == "topdown") return CorpusMode::topdown;
  if (s == "bottomup") return CorpusMode::bottomup;
  if (s == "both") return CorpusMode::both;
  throw InvalidArgument("corpus mode must be topdown, bottomup or both, got '" +
                        s + "'");
}

std::vector<ConceptTerm> concept_terms(const ConceptIndex& index) {
  std::vector<ConceptTerm> terms;
  for (const auto& key : index.keys())
    terms.push_back({key, index.surface(key)});
  return terms;
}

DomainCorpus build_corpus(const ProjectBundle& bundle,
                          const std::vector<ConceptTerm>& concepts,
                          const PipelineConfig& config,
                          std::vector<QueryReport>* report) {
  std::vector<std::string> keys;
  for (const auto& c : concepts) keys.push_back(c.key);

  DomainCorpus topdown;
  if (config.mode != CorpusMode::bottomup)
    topdown = topdown_filter_documents(bundle.corpus_documents, keys,
                                       config.abbreviations);

  DomainCorpus bottomup;
  if (config.mode != CorpusMode::topdown) {
    std::unique_ptr<SearchProvider> provider;
    if (!config.provider.empty())
      provider = make_search_provider(config.provider, config.max_results);
    else if (bundle.search_dir)
      provider = std::make_unique<FixtureSearchProvider>(*bundle.search_dir);
    if (provider) {
      auto collected = bottomup_collect(concepts, *provider,
                                        bundle.project.domain_name,
                                        config.abbreviations);
      bottomup = std::move(collected.corpus);
      if (report) *report = std::move(collected.report);
    } else if (config.mode == CorpusMode::bottomup) {
      throw InvalidArgument(
          "bottom-up mode needs a search provider or a search/ directory");
    }
  }

  DomainCorpus corpus = merge_corpora(topdown, bottomup);
  attach_parses(corpus, bundle.parses);
  return corpus;
}

std::vector<ScoredCandidate> score_candidates(
    const ConceptIndex& index, const DomainCorpus& corpus,
    const std::vector<AcronymPair>& acronyms,
    const std::vector<DefinitionCandidate>& definitions,
    const std::vector<ContextCandidate>& contexts, const Scorer& scorer) {
  std::vector<ScoredCandidate> out;
  std::map<std::size_t, double> cache;
  auto sentence_score = [&](std::size_t pos) {
    auto it = cache.find(pos);
    if (it == cache.end())
      it = cache.emplace(pos, scorer.score(corpus.sentences.at(pos).text)).first;
    return it->second;
  };

  // Acronym concepts are looked up by their surface, case kept.
  std::map<std::string, std::vector<std::string>> keys_by_short_form;
  for (const auto& key : index.keys()) {
    const auto& surface = index.surface(key);
    if (is_acronym(surface)) keys_by_short_form[surface].push_back(key);
  }
  for (std::size_t i = 0; i < acronyms.size(); ++i) {
    const auto& p = acronyms[i];
    const auto it = keys_by_short_form.find(p.short_form);
    if (it == keys_by_short_form.end()) continue;
    for (const auto& key : it->second)
      out.push_back({key, ElementCategory::acronym, p.long_form,
                     sentence_score(p.evidence), i});
  }
  for (std::size_t i = 0; i < definitions.size(); ++i) {
    const auto& d = definitions[i];
    out.push_back({d.concept_key, ElementCategory::definition,
                   corpus.sentences.at(d.sentence).text,
                   sentence_score(d.sentence), i});
  }
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const auto& c = contexts[i];
    out.push_back({c.concept_key, ElementCategory::context,
                   corpus.sentences.at(c.sentence).text,
                   sentence_score(c.sentence), i});
  }
  return out;
}

MinedElements best_elements(const std::vector<Selection>& selections) {
  MinedElements mined;
  for (const auto& s : selections)
    if (const auto* best = s.best())
      mined[s.concept_key][s.category] = best->candidate.text;
  return mined;
}

PipelineResult run_pipeline(const ProjectBundle& bundle,
                            const PipelineConfig& config) {
  PipelineResult r;
  if (config.blacklist)
    r.blacklist = *config.blacklist;
  else if (bundle.blacklist)
    r.blacklist = *bundle.blacklist;
  r.index = std::make_unique<ConceptIndex>(bundle.project, r.blacklist);
  const ConceptIndex& index = *r.index;

  r.corpus = build_corpus(bundle, concept_terms(index), config,
                          &r.search_report);

  r.acronyms = extract_acronym_pairs(r.corpus);

  // Parse-dependent rules run on the parsed part of the corpus only.
  std::size_t unparsed = 0;
  for (const auto& s : r.corpus.sentences)
    if (!s.parse) ++unparsed;
  if (unparsed)
    r.warnings.push_back(std::to_string(unparsed) +
                         " corpus sentences have no parse; skipped by the "
                         "definition, context and triplet rules");
  DomainCorpus parsed;
  std::vector<std::size_t> original;  // parsed position -> corpus position
  for (std::size_t i = 0; i < r.corpus.sentences.size(); ++i) {
    if (!r.corpus.sentences[i].parse) continue;
    parsed.add(r.corpus.sentences[i]);
    original.push_back(i);
  }
  for (const auto& key : index.keys()) {
    for (auto d : extract_definitions(key, parsed)) {
      d.sentence = original[d.sentence];
      r.definitions.push_back(d);
    }
    for (auto c : extract_contexts(key, parsed)) {
      c.sentence = original[c.sentence];
      r.contexts.push_back(c);
    }
  }
  for (auto t : extract_triplets(parsed, config.lexicon)) {
    t.evidence = original[t.evidence];
    r.triplets.push_back(t);
  }

  std::vector<std::string> background = bundle.background_documents;
  background.insert(background.end(), config.extra_background.begin(),
                    config.extra_background.end());
  const auto profile = ProjectProfile::from_project(bundle.project, background);
  const LexicalScorer scorer(profile);
  r.selections = filter_rank_select(
      score_candidates(index, r.corpus, r.acronyms, r.definitions, r.contexts,
                       scorer),
      config.filter);

  const Glossary glossary = bundle.project.glossary.value_or(Glossary{});
  r.merge = merge_glossary(best_elements(r.selections), glossary);

  r.graph = build_graph(r.triplets, &r.corpus, &r.warnings);

  for (const auto& link : bundle.project.links)
    r.explanations.push_back(assemble_explanation(
        bundle.project, link.id, index, r.merge.merged, r.graph,
        config.assembly));
  return r;
}

nlohmann::json explanations_json(const ProjectBundle& bundle,
                                 const PipelineResult& result) {
  nlohmann::json links = nlohmann::json::array();
  for (const auto& e : result.explanations) links.push_back(to_json(e));
  return {{"project", bundle.project.id},
          {"domain_name", bundle.project.domain_name},
          {"links", std::move(links)},
          {"coverage", to_json(result.merge.coverage)}};
}

}  // namespace trace_explain
