#include "trace_explain/graph.hpp"

#include <queue>
#include <tuple>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {

const std::vector<KnowledgeGraph::Incidence>& KnowledgeGraph::incident(
    const std::string& key) const {
  static const std::vector<Incidence> kNone;
  const auto it = adjacency_.find(key);
  return it == adjacency_.end() ? kNone : it->second;
}

bool KnowledgeGraph::add(const std::string& subject, const std::string& verb,
                         const std::string& label, const std::string& object,
                         const std::string& evidence) {
  if (subject == object) return false;
  for (auto& e : edges_) {
    if (e.subject == subject && e.verb == verb && e.object == object) {
      e.evidence.push_back(evidence);
      return true;
    }
  }
  nodes_.insert(subject);
  nodes_.insert(object);
  const std::size_t id = edges_.size();
  edges_.push_back({subject, verb, label.empty() ? verb : label, object,
                    {evidence}});
  adjacency_[subject].push_back({object, id, true});
  adjacency_[object].push_back({subject, id, false});
  return true;
}

nlohmann::json KnowledgeGraph::to_json() const {
  nlohmann::json j;
  j["nodes"] = nodes_;
  j["edges"] = nlohmann::json::array();
  for (const auto& e : edges_)
    j["edges"].push_back({{"s", e.subject},
                          {"v", e.verb},
                          {"label", e.label},
                          {"o", e.object},
                          {"evidence", e.evidence}});
  return j;
}

KnowledgeGraph KnowledgeGraph::from_json(const nlohmann::json& j) {
  KnowledgeGraph g;
  try {
    for (const auto& e : j.at("edges")) {
      const auto& evidence = e.at("evidence");
      for (std::size_t i = 0; i < std::max<std::size_t>(evidence.size(), 1);
           ++i)
        g.add(e.at("s").get<std::string>(), e.at("v").get<std::string>(),
              e.value("label", e.at("v").get<std::string>()),
              e.at("o").get<std::string>(),
              evidence.empty() ? "" : evidence[i].get<std::string>());
    }
    for (const auto& n : j.at("nodes")) g.nodes_.insert(n.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed graph JSON: ") + e.what());
  }
  return g;
}

KnowledgeGraph build_graph(const std::vector<RelationTriplet>& triplets,
                           const DomainCorpus* corpus,
                           std::vector<std::string>* warnings) {
  KnowledgeGraph g;
  for (const auto& t : triplets) {
    const std::string evidence =
        corpus && t.evidence < corpus->sentences.size()
            ? corpus->sentences[t.evidence].text
            : "sentence:" + std::to_string(t.evidence);
    if (!g.add(t.subject, t.verb, t.verb_surface, t.object, evidence) &&
        warnings)
      warnings->push_back("skipped self-loop triplet <" + t.subject + ", " +
                          t.verb + ", " + t.object + ">");
  }
  return g;
}

std::optional<RelationPath> shortest_relation_path(const KnowledgeGraph& graph,
                                                   const std::string& from,
                                                   const std::string& to,
                                                   int max_hops) {
  if (!graph.has_node(from)) throw NotFoundError("unknown node '" + from + "'");
  if (!graph.has_node(to)) throw NotFoundError("unknown node '" + to + "'");
  if (max_hops < 1) throw InvalidArgument("max_hops must be >= 1");
  if (from == to) return std::nullopt;

  using Label = std::pair<std::size_t, std::vector<std::string>>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> queue;
  std::set<std::string> settled;
  queue.push({0, {from}});
  std::vector<std::string> found;
  while (!queue.empty()) {
    auto [hops, seq] = queue.top();
    queue.pop();
    const std::string node = seq.back();
    if (!settled.insert(node).second) continue;
    if (node == to) {
      found = std::move(seq);
      break;
    }
    if (hops >= static_cast<std::size_t>(max_hops)) continue;
    for (const auto& inc : graph.incident(node)) {
      if (settled.count(inc.neighbor)) continue;
      auto next = seq;
      next.push_back(inc.neighbor);
      queue.push({hops + 1, std::move(next)});
    }
  }
  if (found.empty()) return std::nullopt;

  RelationPath path;
  path.nodes = found;
  for (std::size_t i = 0; i + 1 < found.size(); ++i) {
    const KnowledgeGraph::Incidence* pick = nullptr;
    for (const auto& inc : graph.incident(found[i])) {
      if (inc.neighbor != found[i + 1]) continue;
      const auto& label = graph.edges()[inc.edge].label;
      if (!pick ||
          std::make_tuple(label, inc.forward) <
              std::make_tuple(graph.edges()[pick->edge].label, pick->forward))
        pick = &inc;
    }
    path.labels.push_back(graph.edges()[pick->edge].label);
    path.forward.push_back(pick->forward);
  }
  return path;
}

std::string noun_lemma(std::string_view token) {
  static const std::set<std::string, std::less<>> kKeep = {
      "analysis", "basis",  "axis",    "status", "bus",     "gas",
      "lens",     "news",   "series",  "species", "process", "access",
      "address",  "class",  "physics", "always", "canvas",  "corpus",
      "thesis",   "chassis", "diagnosis", "virus", "campus", "bonus"};
  std::string t(token);
  if (t.size() <= 3 || kKeep.count(t)) return t;
  auto ends = [&](std::string_view suf) {
    return t.size() > suf.size() &&
           t.compare(t.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends("ies")) return t.substr(0, t.size() - 3) + "y";
  for (std::string_view suf : {"ses", "xes", "zes", "ches", "shes"})
    if (ends(suf)) return t.substr(0, t.size() - 2);
  if (ends("ss") || ends("us") || ends("is")) return t;
  if (ends("s")) return t.substr(0, t.size() - 1);
  return t;
}

std::vector<std::string> lemma_tokens(std::string_view key) {
  auto tokens = split_whitespace(fold(key));
  for (auto& t : tokens) t = noun_lemma(t);
  return tokens;
}

std::string to_string(EquivalenceKind kind) {
  return kind == EquivalenceKind::lemma_identical ? "lemma_identical"
                                                  : "subsequence_abstraction";
}

bool is_strict_subsequence(const std::vector<std::string>& shorter,
                           const std::vector<std::string>& longer) {
  if (shorter.empty() || shorter.size() >= longer.size()) return false;
  std::size_t i = 0;
  for (const auto& tok : longer)
    if (i < shorter.size() && tok == shorter[i]) ++i;
  return i == shorter.size();
}

std::optional<Equivalence> equivalence_between(const std::string& left,
                                               const std::string& right) {
  const auto ll = lemma_tokens(left);
  const auto rl = lemma_tokens(right);
  if (!ll.empty() && ll == rl)
    return Equivalence{left, right, EquivalenceKind::lemma_identical,
                       std::nullopt};
  const auto lt = split_whitespace(fold(left));
  const auto rt = split_whitespace(fold(right));
  if (is_strict_subsequence(lt, rt))
    return Equivalence{left, right, EquivalenceKind::subsequence_abstraction,
                       left};
  if (is_strict_subsequence(rt, lt))
    return Equivalence{left, right, EquivalenceKind::subsequence_abstraction,
                       right};
  return std::nullopt;
}

std::vector<Equivalence> find_equivalences(
    const std::vector<std::string>& source_keys,
    const std::vector<std::string>& target_keys) {
  auto unique = [](const std::vector<std::string>& keys) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& k : keys)
      if (seen.insert(k).second) out.push_back(k);
    return out;
  };
  std::vector<Equivalence> out;
  for (const auto& l : unique(source_keys))
    for (const auto& r : unique(target_keys))
      if (auto eq = equivalence_between(l, r)) out.push_back(std::move(*eq));
  return out;
}

}  // namespace trace_explain
