#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trace_explain/concepts.hpp"
#include "trace_explain/graph.hpp"
#include "trace_explain/model.hpp"
#include "trace_explain/quality.hpp"

namespace trace_explain {

Glossary glossary_from_json(const nlohmann::json& j);
Glossary load_glossary(const std::filesystem::path& path);

enum class Provenance { mined, glossary, both };

std::string to_string(Provenance provenance);

struct ElementValue {
  std::string text;
  Provenance provenance = Provenance::mined;

  bool operator==(const ElementValue&) const = default;
};

struct ConceptElements {
  std::optional<ElementValue> acronym;
  std::optional<ElementValue> definition;
  std::optional<ElementValue> context;

  bool empty() const { return !acronym && !definition && !context; }
  std::optional<ElementValue>& at(ElementCategory category);
  const std::optional<ElementValue>& at(ElementCategory category) const;
  bool operator==(const ConceptElements&) const = default;
};

// Best mined text per concept key and category.
using MinedElements =
    std::map<std::string, std::map<ElementCategory, std::string>>;

struct MergedElements {
  std::map<std::string, ConceptElements> by_key;

  const ConceptElements* find(const std::string& key) const;
};

struct CoverageCounts {
  std::size_t glossary_only = 0;
  std::size_t mined_only = 0;
  std::size_t both = 0;

  std::size_t total() const { return glossary_only + mined_only + both; }
  bool operator==(const CoverageCounts&) const = default;
};

struct CoverageReport {
  std::map<ElementCategory, CoverageCounts> per_category;
  // A concept counts once, by the union of its sources over categories.
  CoverageCounts overall;
};

struct MergeResult {
  MergedElements merged;
  CoverageReport coverage;
};

// Glossary text wins on conflict and the value is marked `both`.
MergeResult merge_glossary(const MinedElements& mined,
                           const Glossary& glossary);

nlohmann::json to_json(const CoverageReport& report);

struct Annotation {
  std::string key;
  CharSpan span;
  double importance = 0.0;
  int color = 0;  // shared by lemma-identical keys across both views
  bool underlined = false;
  ConceptElements elements;
};

struct ArtifactView {
  std::string artifact_id;
  std::string text;
  std::vector<Annotation> annotations;
};

enum class RelationKind { equivalence, triplet_path };

struct Relation {
  std::string left;
  std::string right;
  RelationKind kind = RelationKind::equivalence;
  std::string label;
  std::optional<RelationPath> path;
  std::optional<Equivalence> equivalence;
};

struct LinkExplanation {
  std::string link_id;
  ArtifactView source;
  ArtifactView target;
  std::vector<Relation> relations;
};

struct AssemblyConfig {
  int max_hops = 1;
};

// Annotations for every located concept of both artifacts, relations from
// equivalences and graph paths over all cross-artifact key pairs. Throws
// NotFoundError for an unknown link id.
LinkExplanation assemble_explanation(const Project& project,
                                     const std::string& link_id,
                                     const ConceptIndex& index,
                                     const MergedElements& elements,
                                     const KnowledgeGraph& graph,
                                     const AssemblyConfig& config = {});

// Keys sorted, floats rounded to 4 decimals.
nlohmann::json to_json(const LinkExplanation& explanation);
// The same JSON with explanation affordances stripped (plain texts only).
nlohmann::json plain_json(const LinkExplanation& explanation);
std::string serialize(const nlohmann::json& j);

double round4(double value);

}  // namespace trace_explain
