#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "trace_explain/corpus.hpp"
#include "trace_explain/extraction.hpp"

namespace trace_explain {

struct GraphEdge {
  std::string subject;
  std::string verb;   // lemma; part of the edge identity
  std::string label;  // surface form of the first occurrence
  std::string object;
  std::vector<std::string> evidence;
};

// Concept keys as nodes, triplets as labelled edges. Traversal ignores edge
// direction.
class KnowledgeGraph {
 public:
  struct Incidence {
    std::string neighbor;
    std::size_t edge = 0;
    bool forward = true;  // edge runs node -> neighbor
  };

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  bool has_node(const std::string& key) const { return nodes_.count(key) > 0; }
  const std::vector<Incidence>& incident(const std::string& key) const;

  // Adds an edge or merges evidence into an identical one. Returns false
  // (and adds nothing) for a self-loop.
  bool add(const std::string& subject, const std::string& verb,
           const std::string& label, const std::string& object,
           const std::string& evidence);

  nlohmann::json to_json() const;
  static KnowledgeGraph from_json(const nlohmann::json& j);

 private:
  std::set<std::string> nodes_;
  std::vector<GraphEdge> edges_;
  std::map<std::string, std::vector<Incidence>> adjacency_;
};

// Evidence strings are taken from `corpus` when given, else "sentence:<n>".
// Self-loop triplets are skipped and reported in `warnings`.
KnowledgeGraph build_graph(const std::vector<RelationTriplet>& triplets,
                           const DomainCorpus* corpus = nullptr,
                           std::vector<std::string>* warnings = nullptr);

struct RelationPath {
  std::vector<std::string> nodes;
  std::vector<std::string> labels;
  std::vector<bool> forward;

  std::size_t hops() const { return labels.size(); }
  bool operator==(const RelationPath&) const = default;
};

// Fewest-hop path with unit weights (Dijkstra), ties broken by the
// lexicographically smallest node sequence; between two nodes the edge with
// the smallest (label, reverse-before-forward) is used. None when the
// endpoints coincide, are disconnected, or are more than max_hops apart.
std::optional<RelationPath> shortest_relation_path(const KnowledgeGraph& graph,
                                                   const std::string& from,
                                                   const std::string& to,
                                                   int max_hops = 1);

// Singular form of one lower-case noun token.
std::string noun_lemma(std::string_view token);
std::vector<std::string> lemma_tokens(std::string_view key);

enum class EquivalenceKind { lemma_identical, subsequence_abstraction };

std::string to_string(EquivalenceKind kind);

struct Equivalence {
  std::string left;   // source-side key
  std::string right;  // target-side key
  EquivalenceKind kind = EquivalenceKind::lemma_identical;
  std::optional<std::string> abstraction;  // the shorter key

  bool operator==(const Equivalence&) const = default;
};

bool is_strict_subsequence(const std::vector<std::string>& shorter,
                           const std::vector<std::string>& longer);

std::optional<Equivalence> equivalence_between(const std::string& left,
                                               const std::string& right);

std::vector<Equivalence> find_equivalences(
    const std::vector<std::string>& source_keys,
    const std::vector<std::string>& target_keys);

}  // namespace trace_explain
