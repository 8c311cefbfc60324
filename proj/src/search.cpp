#include "trace_explain/search.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Url {
  std::string host_port;  // scheme://host[:port]
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos)
    throw InvalidArgument("not an absolute URL: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string http_get(const std::string& url) {
  const auto parts = split_url(url);
  httplib::Client client(parts.host_port);
  client.set_follow_location(true);
  client.set_connection_timeout(10);
  client.set_read_timeout(20);
  auto res = client.Get(parts.path);
  if (!res) throw Error("request failed: " + url);
  if (res->status != 200)
    throw Error("HTTP " + std::to_string(res->status) + " for " + url);
  return res->body;
}

}  // namespace

FixtureSearchProvider::FixtureSearchProvider(std::filesystem::path dir)
    : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_))
    throw InvalidArgument("fixture provider directory not found: " +
                          dir_.string());
}

std::string FixtureSearchProvider::file_name_for(std::string_view query) {
  return stable_hash(query) + ".txt";
}

std::vector<SearchResult> FixtureSearchProvider::query(
    const std::string& query) {
  const auto name = file_name_for(query);
  const auto path = dir_ / name;
  if (!std::filesystem::exists(path)) return {};
  return {{"fixture:" + name, read_file(path)}};
}

HttpSearchProvider::HttpSearchProvider(std::string endpoint, int max_results)
    : endpoint_(std::move(endpoint)), max_results_(max_results) {
  if (endpoint_.find("{query}") == std::string::npos)
    throw InvalidArgument("search endpoint must contain {query}");
}

std::vector<SearchResult> HttpSearchProvider::query(const std::string& query) {
  std::string url = endpoint_;
  url.replace(url.find("{query}"), 7, url_encode(query));
  const auto listing = nlohmann::json::parse(http_get(url));
  std::vector<std::string> urls;
  const nlohmann::json* items = nullptr;
  if (listing.contains("results")) items = &listing["results"];
  else if (listing.contains("webPages")) items = &listing["webPages"]["value"];
  if (items)
    for (const auto& item : *items)
      if (item.contains("url")) urls.push_back(item["url"].get<std::string>());

  std::vector<SearchResult> out;
  for (const auto& page : urls) {
    if (static_cast<int>(out.size()) >= max_results_) break;
    try {
      out.push_back({page, html_to_text(http_get(page))});
    } catch (const std::exception&) {
      // One unreachable page does not fail the query.
    }
  }
  return out;
}

std::string html_to_text(std::string_view html) {
  std::string out;
  std::size_t i = 0;
  const std::string lower = fold(html);
  auto skip_block = [&](std::string_view tag) {
    const std::string close = "</" + std::string(tag);
    const auto end = lower.find(close, i);
    if (end == std::string::npos) {
      i = html.size();
      return;
    }
    const auto gt = lower.find('>', end);
    i = gt == std::string::npos ? html.size() : gt + 1;
  };
  while (i < html.size()) {
    if (html[i] == '<') {
      if (lower.compare(i, 7, "<script") == 0) {
        skip_block("script");
        out += ' ';
        continue;
      }
      if (lower.compare(i, 6, "<style") == 0) {
        skip_block("style");
        out += ' ';
        continue;
      }
      const auto gt = html.find('>', i);
      i = gt == std::string::npos ? html.size() : gt + 1;
      out += ' ';
      continue;
    }
    if (html[i] == '&') {
      static const std::pair<std::string_view, char> kEntities[] = {
          {"&amp;", '&'}, {"&lt;", '<'},   {"&gt;", '>'},
          {"&quot;", '"'}, {"&#39;", '\''}, {"&nbsp;", ' '}};
      bool decoded = false;
      for (const auto& [name, ch] : kEntities) {
        if (html.substr(i, name.size()) == name) {
          out += ch;
          i += name.size();
          decoded = true;
          break;
        }
      }
      if (decoded) continue;
    }
    out += html[i++];
  }
  return join(split_whitespace(out), " ");
}

std::string url_encode(std::string_view s) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (is_alnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += c;
    } else if (c == ' ') {
      out += '+';
    } else {
      out += '%';
      out += kHex[u >> 4];
      out += kHex[u & 15];
    }
  }
  return out;
}

std::unique_ptr<SearchProvider> make_search_provider(const std::string& provider,
                                                     int max_results) {
  if (provider.rfind("fixture:", 0) == 0)
    return std::make_unique<FixtureSearchProvider>(provider.substr(8));
  if (provider.rfind("http://", 0) == 0)
    return std::make_unique<HttpSearchProvider>(provider, max_results);
  throw InvalidArgument("provider must be fixture:<dir> or an http:// endpoint");
}

std::string to_string(QueryStatus status) {
  switch (status) {
    case QueryStatus::hit: return "hit";
    case QueryStatus::miss: return "miss";
    case QueryStatus::error: return "error";
  }
  return "miss";
}

BottomUpResult bottomup_collect(const std::vector<ConceptTerm>& concepts,
                                SearchProvider& provider,
                                const std::string& domain_name,
                                const AbbreviationList& abbreviations) {
  std::vector<std::string> keys;
  keys.reserve(concepts.size());
  for (const auto& c : concepts) keys.push_back(c.key);
  const ConceptMatcher matcher(keys);

  BottomUpResult result;
  std::set<std::string> seen;
  for (const auto& c : concepts) {
    QueryReport report;
    report.concept_key = c.key;
    report.query = make_query(c.surface, domain_name);
    std::vector<SearchResult> pages;
    try {
      pages = provider.query(report.query);
    } catch (const std::exception& e) {
      report.status = QueryStatus::error;
      report.message = e.what();
      result.report.push_back(std::move(report));
      continue;
    }
    for (const auto& page : pages) {
      for (auto& span : segment_sentences(page.body, abbreviations)) {
        auto matched = matcher.match(span.text);
        if (matched.empty()) continue;
        ++report.sentences;
        if (!seen.insert(canonical_key(span.text)).second) continue;
        result.corpus.add(
            {std::move(span.text), page.uri, std::move(matched), std::nullopt});
      }
    }
    report.status = report.sentences > 0 ? QueryStatus::hit : QueryStatus::miss;
    result.report.push_back(std::move(report));
  }
  return result;
}

}  // namespace trace_explain
