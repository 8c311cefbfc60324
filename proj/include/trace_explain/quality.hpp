#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trace_explain/model.hpp"

namespace trace_explain {

enum class ElementCategory { acronym, definition, context };

std::string to_string(ElementCategory category);

using TermVector = std::map<std::string, double>;

// Lower-cased alphanumeric runs of length >= 2, English stop words removed.
std::vector<std::string> content_terms(std::string_view text);

TermVector term_frequencies(std::string_view text);

double cosine(const TermVector& a, const TermVector& b);

// Term statistics of the project's own artifacts (positive side) against
// background text from elsewhere (negative side). Each artifact and each
// background entry is one document for idf purposes.
class ProjectProfile {
 public:
  ProjectProfile(const std::vector<std::string>& positive_documents,
                 const std::vector<std::string>& background_documents);

  static ProjectProfile from_project(
      const Project& project,
      const std::vector<std::string>& background_documents);

  double idf(const std::string& term) const;
  const TermVector& positive_tf() const { return positive_tf_; }
  const TermVector& background_tf() const { return background_tf_; }
  const TermVector& positive_centroid() const { return positive_centroid_; }
  const TermVector& background_centroid() const { return background_centroid_; }
  std::size_t document_count() const { return documents_; }

 private:
  TermVector positive_tf_;
  TermVector background_tf_;
  std::map<std::string, std::size_t> df_;
  TermVector positive_centroid_;
  TermVector background_centroid_;
  std::size_t documents_ = 0;
};

// Affinity of a text to the project domain in [0, 1].
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double score(std::string_view text) const = 0;
};

// (cos(tf, positive centroid) - cos(tf, background centroid) + 1) / 2.
// Empty text, or text sharing nothing with either side, scores 0.5.
double score_affinity(std::string_view text, const ProjectProfile& profile);

class LexicalScorer : public Scorer {
 public:
  explicit LexicalScorer(const ProjectProfile& profile) : profile_(profile) {}
  double score(std::string_view text) const override {
    return score_affinity(text, profile_);
  }

 private:
  const ProjectProfile& profile_;
};

enum class Normalization { per_batch_minmax, none };

struct FilterConfig {
  double threshold = 0.5;
  Normalization normalization = Normalization::per_batch_minmax;
};

struct ScoredCandidate {
  std::string concept_key;
  ElementCategory category = ElementCategory::definition;
  std::string text;
  double score = 0.0;   // raw scorer output
  std::size_t ref = 0;  // caller's handle on the underlying element
};

struct ScoredElement {
  ScoredCandidate candidate;
  double score = 0.0;  // after normalisation
};

struct Selection {
  std::string concept_key;
  ElementCategory category = ElementCategory::definition;
  std::vector<ScoredElement> survivors;  // ranked, best first
  const ScoredElement* best() const {
    return survivors.empty() ? nullptr : &survivors.front();
  }
};

// Normalises each (concept, category) batch, drops scores below the
// threshold and ranks the rest (score desc, folded text asc). Under min-max
// a batch whose scores are all equal normalises to 1. A batch with
// no survivor is kept with an empty survivor list. Batches come back sorted
// by (concept key, category).
std::vector<Selection> filter_rank_select(
    const std::vector<ScoredCandidate>& candidates, const FilterConfig& config);

}  // namespace trace_explain
