#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "trace_explain/corpus.hpp"

namespace trace_explain {

struct SearchResult {
  std::string uri;
  std::string body;  // plain text
};

class SearchProvider {
 public:
  virtual ~SearchProvider() = default;
  // Throws on provider failure; an empty list is a miss.
  virtual std::vector<SearchResult> query(const std::string& query) = 0;
};

// Offline provider: `<dir>/<stable_hash(query)>.txt` holds the page body
// for that query. A missing file means no results.
class FixtureSearchProvider : public SearchProvider {
 public:
  explicit FixtureSearchProvider(std::filesystem::path dir);

  std::vector<SearchResult> query(const std::string& query) override;

  static std::string file_name_for(std::string_view query);
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// Live adapter. `endpoint` is an http:// URL containing "{query}"; it must
// answer with JSON holding result URLs either as {"results":[{"url":..}]}
// or {"webPages":{"value":[{"url":..}]}}. Each page is fetched and reduced
// to text with html_to_text.
class HttpSearchProvider : public SearchProvider {
 public:
  HttpSearchProvider(std::string endpoint, int max_results = 10);

  std::vector<SearchResult> query(const std::string& query) override;

 private:
  std::string endpoint_;
  int max_results_;
};

// Drops <script>/<style> blocks and all tags, decodes a few common
// entities, collapses whitespace.
std::string html_to_text(std::string_view html);

std::string url_encode(std::string_view s);

// Builds a provider from "fixture:<dir>" or an "http://...{query}..."
// endpoint.
std::unique_ptr<SearchProvider> make_search_provider(const std::string& provider,
                                                     int max_results = 10);

struct ConceptTerm {
  std::string key;
  std::string surface;
};

enum class QueryStatus { hit, miss, error };

struct QueryReport {
  std::string concept_key;
  std::string query;
  QueryStatus status = QueryStatus::miss;
  std::size_t sentences = 0;  // matching sentences before deduplication
  std::string message;
};

std::string to_string(QueryStatus status);

struct BottomUpResult {
  DomainCorpus corpus;
  std::vector<QueryReport> report;
};

// One query per concept; returned pages are segmented and filtered against
// the full concept set, then deduplicated by folded text. Provider errors
// are recorded and the concept skipped.
BottomUpResult bottomup_collect(
    const std::vector<ConceptTerm>& concepts, SearchProvider& provider,
    const std::string& domain_name,
    const AbbreviationList& abbreviations = AbbreviationList::defaults());

}  // namespace trace_explain
