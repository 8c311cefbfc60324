#include <doctest.h>

#include <algorithm>
#include <random>
#include <thread>

#include <httplib.h>

#include "support.hpp"
#include "trace_explain/api.hpp"
#include "trace_explain/error.hpp"
#include "trace_explain/explanation.hpp"
#include "trace_explain/pipeline.hpp"
#include "trace_explain/study.hpp"
#include "trace_explain/text.hpp"

using namespace trace_explain;
namespace fs = std::filesystem;

namespace {

struct Mini {
  ProjectBundle bundle;
  PipelineResult result;
};

const Mini& mini() {
  static const Mini m = [] {
    Mini out;
    out.bundle = load_bundle(test_support::data_dir() / "mini");
    out.result = run_pipeline(out.bundle);
    return out;
  }();
  return m;
}

std::unique_ptr<ExplanationService> mini_service(VerdictLog& log) {
  auto service = std::make_unique<ExplanationService>(log);
  auto bundle = load_bundle(test_support::data_dir() / "mini");
  auto result = run_pipeline(bundle);
  service->add_project(std::move(bundle), std::move(result));
  return service;
}

const LinkExplanation& link(const std::string& id) {
  for (const auto& e : mini().result.explanations)
    if (e.link_id == id) return e;
  throw NotFoundError(id);
}

fs::path temp_path(const std::string& stem) {
  return fs::temp_directory_path() /
         (stem + std::to_string(std::random_device{}()) + ".jsonl");
}

std::vector<StudyLink> links_per_project(int projects, int per_project) {
  std::vector<StudyLink> out;
  for (int p = 0; p < projects; ++p)
    for (int i = 0; i < per_project; ++i)
      out.push_back({"P" + std::to_string(p) + "-L" + std::to_string(i),
                     "P" + std::to_string(p)});
  return out;
}

}  // namespace

TEST_CASE("glossary merge counts three sources") {
  // Overlapping entries are counted inside the glossary and mined totals.
  MinedElements mined;
  for (const char* k : {"c", "d", "e", "o"})
    mined[k][ElementCategory::definition] = std::string("mined ") + k;
  Glossary glossary;
  for (const char* k : {"a", "b", "o"}) glossary.definitions[k] = std::string("gloss ") + k;
  const auto r = merge_glossary(mined, glossary);
  CHECK(r.coverage.per_category.at(ElementCategory::definition) == CoverageCounts{2, 3, 1});
  CHECK(r.coverage.overall == CoverageCounts{2, 3, 1});
  CHECK(r.merged.find("o")->definition ==
        ElementValue{"gloss o", Provenance::both});
  CHECK(r.merged.find("zzz") == nullptr);
}

TEST_CASE("glossary merge with disjoint-only counts") {
  MinedElements mined;
  for (const char* k : {"m1", "m2", "m3", "m4", "both"})
    mined[k][ElementCategory::definition] = "mined";
  Glossary glossary;
  for (const char* k : {"g1", "g2", "g3", "both"}) glossary.definitions[k] = "gloss";
  const auto r = merge_glossary(mined, glossary);
  CHECK(r.coverage.per_category.at(ElementCategory::definition) == CoverageCounts{3, 4, 1});
  CHECK(r.coverage.per_category.at(ElementCategory::acronym) == CoverageCounts{});
  CHECK(r.coverage.overall == CoverageCounts{3, 4, 1});
  CHECK(r.merged.find("g2")->definition->provenance == Provenance::glossary);
  CHECK(r.merged.find("m2")->definition->provenance == Provenance::mined);
  CHECK(r.merged.find("both")->definition->text == "gloss");
  const auto j = to_json(r.coverage);
  CHECK(j["overall"]["glossary_only"] == 3);
  CHECK(j["definition"]["mined_only"] == 4);
  CHECK(j["definition"]["both"] == 1);
}

TEST_CASE("acronym merge and per-concept union") {
  MinedElements mined;
  mined["rcu"][ElementCategory::acronym] = "robotic control unit";
  mined["obu"][ElementCategory::definition] = "The OBU is the on-board unit.";
  Glossary glossary;
  glossary.acronyms["RCU"] = "Robotic Control Unit";
  glossary.acronyms["OBU"] = "On-Board Unit";
  const auto r = merge_glossary(mined, glossary);
  CHECK(r.merged.find("rcu")->acronym == ElementValue{"Robotic Control Unit", Provenance::both});
  CHECK(r.merged.find("obu")->acronym->provenance == Provenance::glossary);
  CHECK(r.merged.find("obu")->definition->provenance == Provenance::mined);
  CHECK(r.coverage.per_category.at(ElementCategory::acronym) == CoverageCounts{1, 0, 1});
  CHECK(r.coverage.per_category.at(ElementCategory::definition) == CoverageCounts{0, 1, 0});
  // obu draws on both sources across categories.
  CHECK(r.coverage.overall == CoverageCounts{0, 0, 2});
}

TEST_CASE("coverage counts add up on random merges") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    MinedElements mined;
    Glossary glossary;
    for (int k = 0; k < 12; ++k) {
      const std::string key = "k" + std::to_string(k);
      if (rng() % 3 == 0) mined[key][ElementCategory::definition] = "m";
      if (rng() % 3 == 0) mined[key][ElementCategory::context] = "m";
      if (rng() % 3 == 0) glossary.definitions[key] = "g";
      if (rng() % 4 == 0) glossary.acronyms["K" + std::to_string(k)] = "g";
    }
    const auto r = merge_glossary(mined, glossary);
    for (auto category : {ElementCategory::acronym, ElementCategory::definition,
                          ElementCategory::context}) {
      std::size_t explained = 0;
      for (const auto& [key, e] : r.merged.by_key) {
        if (!e.at(category)) continue;
        ++explained;
        const bool g = category == ElementCategory::definition
                           ? glossary.definitions.count(key) > 0
                           : category == ElementCategory::acronym;
        const bool m = mined.count(key) && mined.at(key).count(category);
        CHECK(e.at(category)->provenance ==
              (g && m ? Provenance::both : g ? Provenance::glossary : Provenance::mined));
      }
      CHECK(r.coverage.per_category.at(category).total() == explained);
    }
    CHECK(r.coverage.overall.total() == r.merged.by_key.size());
  }
}

TEST_CASE("glossary JSON") {
  const auto g = glossary_from_json(nlohmann::json::parse(
      R"({"acronyms": {" WIU ": "Wayside Interface Unit"},
          "definitions": {"Wayside  Data": "Data from the wayside."}})"));
  CHECK(g.acronyms.at("WIU") == "Wayside Interface Unit");
  CHECK(g.definitions.at("wayside data") == "Data from the wayside.");
  CHECK(g.contexts.empty());
  CHECK_THROWS_AS(glossary_from_json(nlohmann::json::parse(R"({"acronyms": {"X": 3}})")),
                  FormatError);
  CHECK_THROWS_AS(load_glossary("/nonexistent/glossary.json"), FormatError);
}

TEST_CASE("annotation invariants on every mini-project link") {
  REQUIRE(mini().result.explanations.size() == mini().bundle.project.links.size());
  for (const auto& e : mini().result.explanations) {
    CAPTURE(e.link_id);
    std::map<std::string, int> color_of;
    for (const auto* view : {&e.source, &e.target}) {
      std::size_t last_end = 0;
      for (const auto& a : view->annotations) {
        CHECK(a.span.begin < a.span.end);
        CHECK(a.span.end <= view->text.size());
        CHECK(a.span.begin >= last_end);
        last_end = a.span.end;
        CHECK(canonical_key(view->text.substr(a.span.begin, a.span.end - a.span.begin)) ==
              a.key);
        CHECK(a.underlined == !a.elements.empty());
        CHECK(a.importance >= 0.0);
        CHECK(a.importance <= 1.0);
        const auto [it, fresh] = color_of.emplace(a.key, a.color);
        CHECK(it->second == a.color);
      }
    }
    for (const auto& r : e.relations) {
      if (r.path) {
        CHECK(r.path->hops() == 1);
        CHECK(r.path->nodes.front() == r.left);
        CHECK(r.path->nodes.back() == r.right);
      } else {
        REQUIRE(r.equivalence);
      }
    }
  }
}

TEST_CASE("navigation relation between OBU and WIU requirements") {
  const auto& e = link("L01");
  const auto it = std::find_if(e.relations.begin(), e.relations.end(),
                               [](const Relation& r) { return r.kind == RelationKind::triplet_path; });
  REQUIRE(it != e.relations.end());
  CHECK(it->left == "navigation information");
  CHECK(it->right == "operational hazards");
  CHECK(it->label == "includes");
  CHECK(it->path->hops() == 1);
}

TEST_CASE("lemma-identical concepts share a color") {
  const auto& e = link("L05");
  REQUIRE(e.relations.size() == 1);
  CHECK(e.relations[0].equivalence->kind == EquivalenceKind::lemma_identical);
  REQUIRE(e.source.annotations.size() == 1);
  REQUIRE(e.target.annotations.size() == 1);
  CHECK(e.source.annotations[0].key == "drug interactions");
  CHECK(e.target.annotations[0].key == "drug interaction");
  CHECK(e.source.annotations[0].color == e.target.annotations[0].color);
}

TEST_CASE("unrelated link keeps annotations and has no relations") {
  const auto& e = link("L09");
  CHECK(!e.source.annotations.empty());
  CHECK(!e.target.annotations.empty());
  CHECK(e.relations.empty());
}

TEST_CASE("explanation JSON schema and stable serialisation") {
  const auto j = to_json(link("L06"));
  for (const char* f : {"link_id", "source", "target", "relations"}) CHECK(j.contains(f));
  for (const char* side : {"source", "target"}) {
    CHECK(j[side].contains("artifact_id"));
    CHECK(j[side].contains("text"));
    for (const auto& a : j[side]["annotations"]) {
      for (const char* f : {"key", "span", "importance", "color", "underlined",
                            "elements", "provenance"})
        CHECK(a.contains(f));
      CHECK(a["span"].size() == 2);
      CHECK(a["underlined"] == !a["elements"].empty());
      for (const auto& [k, v] : a["elements"].items())
        CHECK((k == "acronym" || k == "definition" || k == "context"));
    }
  }
  for (const auto& r : j["relations"])
    for (const char* f : {"left", "right", "kind", "label"}) CHECK(r.contains(f));

  const auto plain = plain_json(link("L06"));
  CHECK_FALSE(plain["source"].contains("annotations"));
  CHECK_FALSE(plain.contains("relations"));
  CHECK(plain["source"]["text"] == j["source"]["text"]);

  CHECK(serialize(j) == serialize(to_json(link("L06"))));
  CHECK(round4(0.123456) == 0.1235);
  CHECK(round4(1.0 / 3.0) == 0.3333);

  CHECK_THROWS_AS(assemble_explanation(mini().bundle.project, "nope", *mini().result.index,
                                       mini().result.merge.merged, mini().result.graph),
                  NotFoundError);
}

TEST_CASE("study session over six links") {
  const auto links = links_per_project(3, 2);
  const auto g1 = create_study_session("p1", links, 1, 7);
  // Hand split: the first link of each project goes to half A.
  const std::map<std::string, Treatment> expected{
      {"P0-L0", Treatment::with_explanation},    {"P0-L1", Treatment::without_explanation},
      {"P1-L0", Treatment::with_explanation},    {"P1-L1", Treatment::without_explanation},
      {"P2-L0", Treatment::with_explanation},    {"P2-L1", Treatment::without_explanation}};
  CHECK(g1.treatments() == expected);
  CHECK(g1.order.size() == 6);
  CHECK(g1.id == session_id_for("p1", 7));
  CHECK(g1.id.rfind("sess-", 0) == 0);

  const auto g2 = create_study_session("p1", links, 2, 7);
  for (const auto& [l, t] : g1.treatments()) CHECK(g2.treatments().at(l) != t);

  bool order_changed = false;
  for (std::uint64_t seed = 8; seed < 20; ++seed) {
    const auto other = create_study_session("p1", links, 1, seed);
    CHECK(other.treatments() == g1.treatments());
    order_changed |= other.order != g1.order;
  }
  CHECK(order_changed);
  CHECK(create_study_session("p1", links, 1, 7).order == g1.order);

  CHECK_THROWS_AS(create_study_session("p1", links_per_project(1, 3), 1, 7), InvalidArgument);
  CHECK_THROWS_AS(create_study_session("p1", links, 3, 7), InvalidArgument);
  auto dup = links;
  dup[1] = dup[0];
  CHECK_THROWS_AS(create_study_session("p1", dup, 1, 7), InvalidArgument);
  CHECK(create_study_session("p1", {}, 1, 7).order.empty());
}

TEST_CASE("study session over thirty links") {
  const auto links = links_per_project(3, 10);
  std::set<std::vector<std::pair<std::string, Treatment>>> orders;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g1 = create_study_session("p", links, 1, seed);
    const auto g2 = create_study_session("p", links, 2, seed);
    int with = 0;
    std::map<std::string, int> with_per_project;
    std::set<std::string> seen;
    for (const auto& [l, t] : g1.order) {
      seen.insert(l);
      CHECK(g2.treatments().at(l) != t);
      if (t == Treatment::with_explanation) {
        ++with;
        ++with_per_project[l.substr(0, 2)];
      }
    }
    CHECK(seen.size() == 30);
    CHECK(with == 15);
    for (const auto& [p, n] : with_per_project) CHECK(n == 5);
    CHECK(with_per_project.size() == 3);
    orders.insert(g1.order);
  }
  CHECK(orders.size() == 50);
}

TEST_CASE("odd project sizes pool their leftovers") {
  // Projects of 3, 3 and 2: leftovers P0-L2 and P1-L2 are split A/B.
  auto links = links_per_project(2, 3);
  links.push_back({"P2-L0", "P2"});
  links.push_back({"P2-L1", "P2"});
  const auto t = create_study_session("p", links, 1, 1).treatments();
  CHECK(t.at("P0-L2") == Treatment::with_explanation);
  CHECK(t.at("P1-L2") == Treatment::without_explanation);
  int with = 0;
  for (const auto& [l, tr] : t) with += tr == Treatment::with_explanation;
  CHECK(with == 4);
}

TEST_CASE("verdict log") {
  const auto path = temp_path("te_verdicts_");
  {
    VerdictLog log(path);
    const std::set<std::string> known{"L01", "L02"};
    const auto r1 = record_verdict(log, known, {"L01", "p1", VerdictChoice::correct,
                                                Treatment::with_explanation, "", ""});
    CHECK(r1.sequence == 1);
    CHECK(!r1.verdict.timestamp.empty());
    const auto r2 = record_verdict(log, known, {"L01", "p1", VerdictChoice::incorrect,
                                                Treatment::with_explanation, "", ""});
    CHECK(r2.sequence == 2);
    CHECK(log.records().size() == 2);
    CHECK(log.has_verdict("p1", "L01"));
    CHECK_FALSE(log.has_verdict("p1", "L02"));
    CHECK_THROWS_AS(record_verdict(log, known, {"L99", "p1", VerdictChoice::correct,
                                                Treatment::with_explanation, "", ""}),
                    NotFoundError);
    CHECK_THROWS_AS(record_verdict(log, known, {"L01", " ", VerdictChoice::correct,
                                                Treatment::with_explanation, "", ""}),
                    InvalidArgument);
  }
  {
    VerdictLog reopened(path);
    REQUIRE(reopened.records().size() == 2);
    CHECK(reopened.records()[1].verdict.verdict == VerdictChoice::incorrect);
    const auto r3 = reopened.append({"L02", "p2", VerdictChoice::dont_know,
                                     Treatment::without_explanation, "2026-01-01T00:00:00Z", "s"});
    CHECK(r3.sequence == 3);
    const auto j = to_json(r3);
    CHECK(j["verdict"] == "dont_know");
    CHECK(j["treatment"] == "without_explanation");
    CHECK(j["seq"] == 3);
    const auto back = verdict_record_from_json(j);
    CHECK(back.verdict.session_id == "s");
    CHECK(back.verdict.timestamp == "2026-01-01T00:00:00Z");
  }
  std::ofstream(path, std::ios::app) << "not json\n";
  CHECK_THROWS_AS(VerdictLog{path}, FormatError);
  fs::remove(path);

  CHECK(verdict_from_string("dont_know") == VerdictChoice::dont_know);
  CHECK_THROWS_AS(verdict_from_string("maybe"), InvalidArgument);
  CHECK_THROWS_AS(treatment_from_string("both"), InvalidArgument);
}

TEST_CASE("concurrent verdicts get distinct sequence numbers") {
  VerdictLog log;
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&log, t] {
      for (int i = 0; i < 50; ++i)
        log.append({"L01", "p" + std::to_string(t), VerdictChoice::correct,
                    Treatment::with_explanation, "", ""});
    });
  for (auto& t : threads) t.join();
  std::set<std::uint64_t> seqs;
  for (const auto& r : log.records()) seqs.insert(r.sequence);
  CHECK(seqs.size() == 400);
  CHECK(*seqs.rbegin() == 400);
}

TEST_CASE("HTTP API routes") {
  VerdictLog log;
  const auto service = mini_service(log);

  auto projects = service->handle("GET", "/projects", "");
  CHECK(projects.status == 200);
  REQUIRE(projects.body.size() == 1);
  CHECK(projects.body[0]["id"] == "mini");
  CHECK(projects.body[0]["links"] == 10);

  auto links = service->handle("GET", "/projects/mini/links", "");
  CHECK(links.status == 200);
  CHECK(links.body.size() == 10);
  CHECK(links.body[8]["gold_label"] == "incorrect");

  auto expl = service->handle("GET", "/links/L01/explanation", "");
  CHECK(expl.status == 200);
  CHECK(expl.body == to_json(link("L01")));

  CHECK(service->handle("GET", "/projects/none/links", "").body["error"] == "not_found");
  CHECK(service->handle("GET", "/links/L99/explanation", "").status == 404);
  CHECK(service->handle("DELETE", "/projects", "").status == 404);
  CHECK(service->handle("GET", "/nowhere", "").body["error"] == "not_found");

  auto bad = service->handle("POST", "/sessions", "{not json");
  CHECK(bad.status == 400);
  CHECK(bad.body["error"] == "invalid_argument");
  CHECK(bad.body.contains("message"));
  CHECK(service->handle("POST", "/sessions", R"({"participant_id":"p","group":1})").status == 400);
  CHECK(service->handle("POST", "/sessions",
                        R"({"participant_id":"p","group":5,"seed":1})").status == 400);
  CHECK(service->handle("POST", "/sessions",
                        R"({"participant_id":"p","group":1,"seed":1,"links":["L99","L01"]})")
            .status == 404);
}

TEST_CASE("HTTP API study flow") {
  VerdictLog log;
  const auto service = mini_service(log);
  const std::string create = R"({"participant_id":"ana","group":2,"seed":42,
                                 "links":["L01","L02","L05","L09"]})";
  auto s = service->handle("POST", "/sessions", create);
  REQUIRE(s.status == 201);
  const std::string sid = s.body["session_id"];
  CHECK(s.body["links"].size() == 4);
  CHECK(service->handle("POST", "/sessions", create).status == 200);
  CHECK(service->handle("POST", "/sessions",
                        R"({"participant_id":"ana","group":1,"seed":42,
                            "links":["L01","L02","L05","L09"]})")
            .body["error"] == "conflict");

  std::set<std::string> visited;
  for (int step = 0; step < 4; ++step) {
    auto next = service->handle("GET", "/sessions/" + sid + "/next", "");
    REQUIRE(next.status == 200);
    REQUIRE(next.body["done"] == false);
    CHECK(next.body["position"] == step);
    const std::string lid = next.body["link_id"];
    visited.insert(lid);
    const bool with = next.body["treatment"] == "with_explanation";
    CHECK(next.body["explanation"].contains("relations") == with);
    CHECK(next.body["explanation"]["source"].contains("text"));

    const nlohmann::json verdict{{"participant_id", "ana"},
                                 {"verdict", step % 2 ? "incorrect" : "correct"},
                                 {"session_id", sid}};
    auto ack = service->handle("POST", "/links/" + lid + "/verdict", verdict.dump());
    REQUIRE(ack.status == 201);
    CHECK(ack.body["seq"] == step + 1);
    CHECK(ack.body["record"]["treatment"] == next.body["treatment"]);
  }
  CHECK(visited.size() == 4);
  auto done = service->handle("GET", "/sessions/" + sid + "/next", "");
  CHECK(done.body["done"] == true);
  CHECK(done.body["submitted"] == 4);

  CHECK(service->handle("GET", "/sessions/nope/next", "").status == 404);
  CHECK(service->handle("POST", "/links/L01/verdict",
                        R"({"participant_id":"bob","verdict":"correct","session_id":")" +
                            sid + "\"}")
            .status == 400);
  CHECK(service->handle("POST", "/links/L03/verdict",
                        R"({"participant_id":"ana","verdict":"correct","session_id":")" +
                            sid + "\"}")
            .status == 400);
  CHECK(service->handle("POST", "/links/L01/verdict",
                        R"({"participant_id":"ana","verdict":"perhaps"})").status == 400);
  CHECK(service->handle("POST", "/links/L99/verdict",
                        R"({"participant_id":"ana","verdict":"correct"})").status == 404);
  auto free = service->handle("POST", "/links/L03/verdict",
                              R"({"participant_id":"cy","verdict":"dont_know",
                                  "treatment":"without_explanation"})");
  CHECK(free.status == 201);
  CHECK(free.body["record"]["treatment"] == "without_explanation");
  CHECK(log.records().size() == 5);
}

TEST_CASE("duplicate link ids across projects are rejected") {
  VerdictLog log;
  auto service = mini_service(log);
  auto bundle = load_bundle(test_support::data_dir() / "mini");
  auto result = run_pipeline(bundle);
  CHECK_THROWS_AS(service->add_project(std::move(bundle), std::move(result)), InvalidArgument);
}

TEST_CASE("routes over a real socket") {
  VerdictLog log;
  const auto service = mini_service(log);
  httplib::Server server;
  bind_routes(server, *service);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  struct Stop {
    httplib::Server& s;
    std::thread& t;
    ~Stop() {
      s.stop();
      t.join();
    }
  } stop{server, t};
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/links/L05/explanation");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(nlohmann::json::parse(res->body)["link_id"] == "L05");
  auto post = client.Post("/links/L05/verdict",
                          R"({"participant_id":"p","verdict":"correct"})", "application/json");
  REQUIRE(post);
  CHECK(post->status == 201);
  auto missing = client.Get("/links/L77/explanation");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(nlohmann::json::parse(missing->body)["error"] == "not_found");
  auto options = client.Options("/sessions");
  REQUIRE(options);
  CHECK(options->status == 204);
}
