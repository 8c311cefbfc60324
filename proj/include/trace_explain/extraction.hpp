#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trace_explain/corpus.hpp"
#include "trace_explain/model.hpp"

namespace trace_explain {

// --- acronyms -------------------------------------------------------------

struct AcronymPair {
  std::string short_form;
  std::string long_form;   // as written
  std::size_t evidence = 0;  // corpus sentence position
};

// Number of letters/digits in a short form.
std::size_t short_form_length(std::string_view short_form);

// Right-to-left character match of the short form inside the candidate;
// returns the shortest suffix of `candidate` that starts at a word and
// covers every short-form character in order, or nullopt.
std::optional<std::string> best_long_form(std::string_view short_form,
                                          std::string_view candidate);

// Full validity test applied to an emitted (short, long) pair.
bool valid_acronym_pair(std::string_view short_form,
                        std::string_view long_form);

// Schwartz-Hearst extraction over one sentence: "long form (SF)" and
// "SF (long form)".
std::vector<std::pair<std::string, std::string>> find_acronym_pairs(
    std::string_view sentence);

// Over a corpus, duplicates (same short form, same folded long form) keep
// their first evidence.
std::vector<AcronymPair> extract_acronym_pairs(const DomainCorpus& corpus);

// --- definitions and contexts ----------------------------------------------

struct DefinitionCandidate {
  std::string concept_key;
  std::size_t sentence = 0;  // corpus position
  int verb_index = 0;
};

struct ContextCandidate {
  std::string concept_key;
  std::size_t sentence = 0;
};

// Head token of the concept inside the parse: the occurrence whose folded
// token sequence spells the key, head = span token governed from outside
// the span. Returns 0 when the concept does not occur.
int locate_concept_head(const ParsedSentence& parse, std::string_view key);

// Verb within two nsubj/cop arcs of `head` (arcs read undirected) whose
// form is "is"/"are" or whose tag is VBZ; 0 if none.
int definitional_verb(const ParsedSentence& parse, int head);

bool is_nominal_subject(const ParsedSentence& parse, int head);

// Both throw InvalidArgument naming the sentence if a candidate sentence has
// no parse attached.
std::vector<DefinitionCandidate> extract_definitions(
    const std::string& concept_key, const DomainCorpus& corpus);
std::vector<ContextCandidate> extract_contexts(const std::string& concept_key,
                                               const DomainCorpus& corpus);

// --- relation triplets ------------------------------------------------------

struct HierarchicalVerbLexicon {
  std::set<std::string> lemmas;

  static HierarchicalVerbLexicon defaults();
  static HierarchicalVerbLexicon load(const std::filesystem::path& path);

  bool contains(std::string_view lemma) const;
};

struct RelationTriplet {
  std::string subject;
  std::string verb;  // lemma
  std::string verb_surface;
  std::string object;
  std::size_t evidence = 0;

  bool operator==(const RelationTriplet&) const = default;
};

// Lemma used for lexicon lookup: the token lemma when present, else the
// folded form with a third-person -s stripped.
std::string verb_lemma(const Token& token);

// Pairs nsubj/xsubj dependents with obj dependents of lexicon verbs; both
// ends must be concept heads (project concepts located in the sentence,
// then any other detected concept).
std::vector<RelationTriplet> extract_triplets(
    const DomainCorpus& corpus, const HierarchicalVerbLexicon& lexicon);

// JSON Lines writers used by the CLI.
void write_acronyms_jsonl(std::ostream& out, const DomainCorpus& corpus,
                          const std::vector<AcronymPair>& pairs);
void write_definitions_jsonl(std::ostream& out, const DomainCorpus& corpus,
                             const std::vector<DefinitionCandidate>& defs);
void write_contexts_jsonl(std::ostream& out, const DomainCorpus& corpus,
                          const std::vector<ContextCandidate>& contexts);
void write_triplets_jsonl(std::ostream& out, const DomainCorpus& corpus,
                          const std::vector<RelationTriplet>& triplets);

}  // namespace trace_explain
