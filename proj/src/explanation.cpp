#include "trace_explain/explanation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace {

constexpr ElementCategory kCategories[] = {ElementCategory::acronym,
                                           ElementCategory::definition,
                                           ElementCategory::context};

void tally(CoverageCounts& counts, bool from_glossary, bool from_mining) {
  if (from_glossary && from_mining) ++counts.both;
  else if (from_glossary) ++counts.glossary_only;
  else if (from_mining) ++counts.mined_only;
}

nlohmann::json counts_json(const CoverageCounts& c) {
  return {{"glossary_only", c.glossary_only},
          {"mined_only", c.mined_only},
          {"both", c.both},
          {"total", c.total()}};
}

std::string relation_kind_name(RelationKind kind) {
  return kind == RelationKind::equivalence ? "equivalence" : "triplet_path";
}

}  // namespace

Glossary glossary_from_json(const nlohmann::json& j) {
  Glossary g;
  try {
    if (j.contains("acronyms"))
      for (const auto& [k, v] : j["acronyms"].items())
        g.acronyms[std::string(trim(k))] = v.get<std::string>();
    if (j.contains("definitions"))
      for (const auto& [k, v] : j["definitions"].items())
        g.definitions[canonical_key(k)] = v.get<std::string>();
    if (j.contains("contexts"))
      for (const auto& [k, v] : j["contexts"].items())
        g.contexts[canonical_key(k)] = v.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed glossary: ") + e.what());
  }
  return g;
}

Glossary load_glossary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open glossary " + path.string());
  try {
    return glossary_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("malformed glossary " + path.string() + ": " + e.what());
  }
}

std::string to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::mined: return "mined";
    case Provenance::glossary: return "glossary";
    case Provenance::both: return "both";
  }
  return "mined";
}

std::optional<ElementValue>& ConceptElements::at(ElementCategory category) {
  switch (category) {
    case ElementCategory::acronym: return acronym;
    case ElementCategory::definition: return definition;
    case ElementCategory::context: return context;
  }
  return context;
}

const std::optional<ElementValue>& ConceptElements::at(
    ElementCategory category) const {
  return const_cast<ConceptElements*>(this)->at(category);
}

const ConceptElements* MergedElements::find(const std::string& key) const {
  const auto it = by_key.find(key);
  return it == by_key.end() ? nullptr : &it->second;
}

MergeResult merge_glossary(const MinedElements& mined,
                           const Glossary& glossary) {
  MergeResult result;
  auto& merged = result.merged.by_key;

  for (const auto& [key, categories] : mined)
    for (const auto& [category, text] : categories)
      merged[key].at(category) = ElementValue{text, Provenance::mined};

  auto apply = [&](const std::string& key, ElementCategory category,
                   const std::string& text) {
    auto& slot = merged[key].at(category);
    slot = ElementValue{text, slot ? Provenance::both : Provenance::glossary};
  };
  for (const auto& [short_form, long_form] : glossary.acronyms)
    apply(canonical_key(short_form), ElementCategory::acronym, long_form);
  for (const auto& [key, text] : glossary.definitions)
    apply(key, ElementCategory::definition, text);
  for (const auto& [key, text] : glossary.contexts)
    apply(key, ElementCategory::context, text);

  for (auto category : kCategories) result.coverage.per_category[category];
  for (const auto& [key, elements] : merged) {
    bool any_glossary = false;
    bool any_mined = false;
    for (auto category : kCategories) {
      const auto& v = elements.at(category);
      if (!v) continue;
      const bool g = v->provenance != Provenance::mined;
      const bool m = v->provenance != Provenance::glossary;
      tally(result.coverage.per_category[category], g, m);
      any_glossary |= g;
      any_mined |= m;
    }
    tally(result.coverage.overall, any_glossary, any_mined);
  }
  return result;
}

nlohmann::json to_json(const CoverageReport& report) {
  nlohmann::json j;
  for (const auto& [category, counts] : report.per_category)
    j[to_string(category)] = counts_json(counts);
  j["overall"] = counts_json(report.overall);
  return j;
}

double round4(double value) { return std::round(value * 1e4) / 1e4; }

LinkExplanation assemble_explanation(const Project& project,
                                     const std::string& link_id,
                                     const ConceptIndex& index,
                                     const MergedElements& elements,
                                     const KnowledgeGraph& graph,
                                     const AssemblyConfig& config) {
  const TraceLink& link = project.link(link_id);
  const auto importance = importance_for_link(index, link);

  LinkExplanation out;
  out.link_id = link.id;
  auto build_view = [&](const std::string& artifact_id,
                        const std::map<std::string, double>& scores) {
    const Artifact& artifact = project.artifact(artifact_id);
    ArtifactView view{artifact.id, artifact.text, {}};
    auto concepts = index.concepts(artifact_id);
    std::stable_sort(concepts.begin(), concepts.end(),
                     [](const Concept& a, const Concept& b) {
                       return a.char_span.begin < b.char_span.begin;
                     });
    std::size_t covered_to = 0;
    for (const auto& c : concepts) {
      if (c.char_span.end <= c.char_span.begin ||
          c.char_span.end > artifact.text.size())
        continue;
      if (!view.annotations.empty() && c.char_span.begin < covered_to) continue;
      Annotation a;
      a.key = c.id;
      a.span = c.char_span;
      a.importance = round4(scores.at(c.id));
      if (const auto* e = elements.find(c.id)) a.elements = *e;
      a.underlined = !a.elements.empty();
      covered_to = c.char_span.end;
      view.annotations.push_back(std::move(a));
    }
    return view;
  };
  out.source = build_view(link.source_artifact_id, importance.source);
  out.target = build_view(link.target_artifact_id, importance.target);

  // Colors follow the lemmatised key, so lemma-identical concepts on the two
  // sides match.
  std::map<std::string, int> colors;
  for (auto* view : {&out.source, &out.target})
    for (auto& a : view->annotations) {
      const auto [it, inserted] = colors.emplace(
          join(lemma_tokens(a.key), " "), static_cast<int>(colors.size()));
      a.color = it->second;
    }

  auto keys_of = [](const ArtifactView& view) {
    std::vector<std::string> keys;
    std::set<std::string> seen;
    for (const auto& a : view.annotations)
      if (seen.insert(a.key).second) keys.push_back(a.key);
    return keys;
  };
  const auto source_keys = keys_of(out.source);
  const auto target_keys = keys_of(out.target);

  for (auto& eq : find_equivalences(source_keys, target_keys)) {
    Relation r;
    r.left = eq.left;
    r.right = eq.right;
    r.kind = RelationKind::equivalence;
    if (eq.kind == EquivalenceKind::lemma_identical) {
      r.label = "same concept";
    } else {
      const auto& longer = *eq.abstraction == eq.left ? eq.right : eq.left;
      r.label = *eq.abstraction + " is an abstraction of " + longer;
    }
    r.equivalence = std::move(eq);
    out.relations.push_back(std::move(r));
  }
  for (const auto& l : source_keys) {
    if (!graph.has_node(l)) continue;
    for (const auto& r : target_keys) {
      if (l == r || !graph.has_node(r)) continue;
      auto path = shortest_relation_path(graph, l, r, config.max_hops);
      if (!path) continue;
      Relation rel;
      rel.left = l;
      rel.right = r;
      rel.kind = RelationKind::triplet_path;
      rel.label = join(path->labels, " / ");
      rel.path = std::move(path);
      out.relations.push_back(std::move(rel));
    }
  }
  return out;
}

nlohmann::json to_json(const LinkExplanation& e) {
  auto view_json = [](const ArtifactView& v) {
    nlohmann::json annotations = nlohmann::json::array();
    for (const auto& a : v.annotations) {
      nlohmann::json elements = nlohmann::json::object();
      nlohmann::json provenance = nlohmann::json::object();
      for (auto category : kCategories) {
        if (const auto& value = a.elements.at(category)) {
          elements[to_string(category)] = value->text;
          provenance[to_string(category)] = to_string(value->provenance);
        }
      }
      annotations.push_back({{"key", a.key},
                             {"span", {a.span.begin, a.span.end}},
                             {"importance", round4(a.importance)},
                             {"color", a.color},
                             {"underlined", a.underlined},
                             {"elements", elements},
                             {"provenance", provenance}});
    }
    return nlohmann::json{{"artifact_id", v.artifact_id},
                          {"text", v.text},
                          {"annotations", annotations}};
  };
  nlohmann::json relations = nlohmann::json::array();
  for (const auto& r : e.relations) {
    nlohmann::json j{{"left", r.left},
                     {"right", r.right},
                     {"kind", relation_kind_name(r.kind)},
                     {"label", r.label}};
    if (r.path) {
      std::vector<std::string> direction;
      for (bool f : r.path->forward) direction.push_back(f ? "forward" : "reverse");
      j["path"] = {{"nodes", r.path->nodes},
                   {"labels", r.path->labels},
                   {"direction", direction},
                   {"hops", r.path->hops()}};
    }
    if (r.equivalence) {
      j["equivalence"] = to_string(r.equivalence->kind);
      if (r.equivalence->abstraction)
        j["abstraction"] = *r.equivalence->abstraction;
    }
    relations.push_back(std::move(j));
  }
  return {{"link_id", e.link_id},
          {"source", view_json(e.source)},
          {"target", view_json(e.target)},
          {"relations", relations}};
}

nlohmann::json plain_json(const LinkExplanation& e) {
  auto view = [](const ArtifactView& v) {
    return nlohmann::json{{"artifact_id", v.artifact_id}, {"text", v.text}};
  };
  return {{"link_id", e.link_id},
          {"source", view(e.source)},
          {"target", view(e.target)}};
}

std::string serialize(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace trace_explain
