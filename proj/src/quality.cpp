#include "trace_explain/quality.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace {

const std::set<std::string, std::less<>>& stop_words() {
  static const std::set<std::string, std::less<>> kWords = {
      "a",     "about", "above",  "after", "again",  "all",   "also",
      "am",    "an",    "and",    "any",   "are",    "as",    "at",
      "be",    "been",  "being",  "both",  "but",    "by",    "can",
      "could", "did",   "do",     "does",  "each",   "few",   "for",
      "from",  "had",   "has",    "have",  "he",     "her",   "here",
      "him",   "his",   "how",    "if",    "in",     "into",  "is",
      "it",    "its",   "may",    "me",    "more",   "most",  "must",
      "my",    "no",    "nor",    "not",   "of",     "on",    "once",
      "only",  "or",    "other",  "our",   "out",    "over",  "own",
      "same",  "shall", "she",    "should", "so",    "some",  "such",
      "than",  "that",  "the",    "their", "them",   "then",  "there",
      "these", "they",  "this",   "those", "through", "to",   "too",
      "under", "until", "up",     "very",  "was",    "we",    "were",
      "what",  "when",  "where",  "which", "while",  "who",   "whom",
      "why",   "will",  "with",   "would", "you",    "your"};
  return kWords;
}

}  // namespace

std::string to_string(ElementCategory category) {
  switch (category) {
    case ElementCategory::acronym: return "acronym";
    case ElementCategory::definition: return "definition";
    case ElementCategory::context: return "context";
  }
  return "context";
}

std::vector<std::string> content_terms(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_alnum(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && is_alnum(text[j])) ++j;
    if (j - i >= 2) {
      auto term = fold(text.substr(i, j - i));
      if (!stop_words().count(term)) out.push_back(std::move(term));
    }
    i = j;
  }
  return out;
}

TermVector term_frequencies(std::string_view text) {
  TermVector tf;
  for (auto& t : content_terms(text)) tf[t] += 1.0;
  return tf;
}

double cosine(const TermVector& a, const TermVector& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [t, w] : a) {
    na += w * w;
    const auto it = b.find(t);
    if (it != b.end()) dot += w * it->second;
  }
  for (const auto& [t, w] : b) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

ProjectProfile::ProjectProfile(
    const std::vector<std::string>& positive_documents,
    const std::vector<std::string>& background_documents) {
  auto add = [&](const std::string& doc, TermVector& tf) {
    const auto doc_tf = term_frequencies(doc);
    for (const auto& [t, n] : doc_tf) {
      tf[t] += n;
      ++df_[t];
    }
    ++documents_;
  };
  for (const auto& d : positive_documents) add(d, positive_tf_);
  for (const auto& d : background_documents) add(d, background_tf_);
  if (positive_tf_.empty())
    throw InvalidArgument("project profile has an empty positive vocabulary");
  for (const auto& [t, n] : positive_tf_) positive_centroid_[t] = n * idf(t);
  for (const auto& [t, n] : background_tf_)
    background_centroid_[t] = n * idf(t);
}

ProjectProfile ProjectProfile::from_project(
    const Project& project,
    const std::vector<std::string>& background_documents) {
  std::vector<std::string> positives;
  for (const auto& a : project.artifacts) positives.push_back(a.text);
  return ProjectProfile(positives, background_documents);
}

double ProjectProfile::idf(const std::string& term) const {
  const auto it = df_.find(term);
  if (it == df_.end()) return 0.0;
  return std::log(1.0 + static_cast<double>(documents_) /
                            static_cast<double>(it->second));
}

double score_affinity(std::string_view text, const ProjectProfile& profile) {
  const auto tf = term_frequencies(text);
  if (tf.empty()) return 0.5;
  const double diff = cosine(tf, profile.positive_centroid()) -
                      cosine(tf, profile.background_centroid());
  return std::clamp((diff + 1.0) / 2.0, 0.0, 1.0);
}

std::vector<Selection> filter_rank_select(
    const std::vector<ScoredCandidate>& candidates,
    const FilterConfig& config) {
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0))
    throw InvalidArgument("threshold must lie in [0, 1]");

  std::map<std::pair<std::string, ElementCategory>,
           std::vector<const ScoredCandidate*>>
      batches;
  for (const auto& c : candidates) {
    if (!std::isfinite(c.score))
      throw InvalidArgument("non-finite score for " + c.concept_key);
    if (config.normalization == Normalization::none &&
        (c.score < 0.0 || c.score > 1.0))
      throw InvalidArgument("score outside [0, 1] for " + c.concept_key);
    batches[{c.concept_key, c.category}].push_back(&c);
  }

  std::vector<Selection> out;
  for (const auto& [key, batch] : batches) {
    double lo = batch.front()->score;
    double hi = lo;
    for (const auto* c : batch) {
      lo = std::min(lo, c->score);
      hi = std::max(hi, c->score);
    }
    const bool minmax =
        config.normalization == Normalization::per_batch_minmax;

    // A batch with a single distinct score has nothing to rank against; all
    // of it maps to 1 so that selection does not depend on the raw scale.
    Selection sel{key.first, key.second, {}};
    for (const auto* c : batch) {
      double s = std::clamp(c->score, 0.0, 1.0);
      if (minmax) s = hi > lo ? (c->score - lo) / (hi - lo) : 1.0;
      if (s < config.threshold) continue;
      sel.survivors.push_back({*c, s});
    }
    std::stable_sort(sel.survivors.begin(), sel.survivors.end(),
                     [](const ScoredElement& a, const ScoredElement& b) {
                       if (a.score != b.score) return a.score > b.score;
                       return fold(a.candidate.text) < fold(b.candidate.text);
                     });
    out.push_back(std::move(sel));
  }
  return out;
}

}  // namespace trace_explain
