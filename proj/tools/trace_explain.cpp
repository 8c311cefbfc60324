#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "trace_explain/api.hpp"
#include "trace_explain/bundle.hpp"
#include "trace_explain/conllu.hpp"
#include "trace_explain/error.hpp"
#include "trace_explain/pipeline.hpp"

namespace te = trace_explain;

namespace {

struct Common {
  std::string label_aliases;
  std::string abbreviations;
  std::string verb_lexicon;
};

struct PipelineFlags {
  std::string project;
  std::string mode = "both";
  std::string provider;
  int max_results = 10;
  std::string blacklist;
  double threshold = 0.5;
  bool no_normalize = false;
  std::string background;
  int max_hops = 1;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
  cmd->add_option("--project", f.project, "Project bundle directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--mode", f.mode, "Corpus mode")
      ->check(CLI::IsMember({"topdown", "bottomup", "both"}));
  cmd->add_option("--provider", f.provider,
                  "Search provider: fixture:<dir> or http://...{query}");
  cmd->add_option("--max-results", f.max_results, "Pages per search query");
  cmd->add_option("--blacklist", f.blacklist, "Blacklist file (key<TAB>count)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--threshold", f.threshold, "Quality threshold");
  cmd->add_flag("--no-normalize", f.no_normalize,
                "Threshold raw scores without per-batch min-max");
  cmd->add_option("--background", f.background,
                  "Directory of background *.txt, one document per line")
      ->check(CLI::ExistingDirectory);
  cmd->add_option("--max-hops", f.max_hops, "Longest relation path")
      ->check(CLI::PositiveNumber);
}

te::BundleOptions bundle_options(const Common& c) {
  te::BundleOptions o;
  if (!c.label_aliases.empty()) o.aliases = te::LabelAliases::load(c.label_aliases);
  return o;
}

te::PipelineConfig pipeline_config(const Common& c, const PipelineFlags& f) {
  te::PipelineConfig cfg;
  cfg.mode = te::corpus_mode_from_string(f.mode);
  cfg.provider = f.provider;
  cfg.max_results = f.max_results;
  if (!f.blacklist.empty()) {
    std::ifstream in(f.blacklist);
    cfg.blacklist = te::read_blacklist(in);
  }
  cfg.filter.threshold = f.threshold;
  if (f.no_normalize) cfg.filter.normalization = te::Normalization::none;
  if (!f.background.empty())
    cfg.extra_background = te::read_line_documents(f.background);
  cfg.assembly.max_hops = f.max_hops;
  if (!c.abbreviations.empty())
    cfg.abbreviations = te::AbbreviationList::load(c.abbreviations);
  if (!c.verb_lexicon.empty())
    cfg.lexicon = te::HierarchicalVerbLexicon::load(c.verb_lexicon);
  return cfg;
}

// Writes to `path`, or stdout for "" / "-".
template <typename F>
void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw te::Error("cannot write " + path);
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept-level explanations for software trace links"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--label-aliases", common.label_aliases,
                 "Dependency label alias file (from<TAB>to)")
      ->check(CLI::ExistingFile);
  app.add_option("--abbreviations", common.abbreviations,
                 "Sentence-splitter abbreviation list")
      ->check(CLI::ExistingFile);
  app.add_option("--verb-lexicon", common.verb_lexicon,
                 "Hierarchical verb lemmas, one per line")
      ->check(CLI::ExistingFile);

  // blacklist
  auto* bl = app.add_subcommand("blacklist",
                                "Build a general-concept blacklist from parsed corpora");
  std::uint64_t min_count = 1000;
  double top_fraction = 0.015;
  std::vector<std::string> bl_inputs;
  std::string bl_out;
  bl->add_option("--min-count", min_count, "Keep keys seen more than N times");
  bl->add_option("--top-fraction", top_fraction,
                 "Fraction of distinct keys ranked by count")
      ->check(CLI::Range(0.0, 1.0));
  bl->add_option("--out", bl_out, "Output file (default stdout)");
  bl->add_option("corpus", bl_inputs, "CoNLL-U files")
      ->required()
      ->check(CLI::ExistingFile);

  // corpus
  auto* cp = app.add_subcommand("corpus", "Build the domain corpus as JSON Lines");
  PipelineFlags cp_flags;
  cp_flags.mode = "topdown";
  std::string cp_out, cp_report;
  add_pipeline_flags(cp, cp_flags);
  cp->add_option("--out", cp_out, "Corpus JSONL (default stdout)");
  cp->add_option("--report", cp_report, "Per-concept search report (JSON)");

  // mine
  auto* mn = app.add_subcommand("mine", "Mine explanatory elements as JSON Lines");
  PipelineFlags mn_flags;
  std::string kind, mn_out;
  add_pipeline_flags(mn, mn_flags);
  mn->add_option("--kind", kind, "Element kind")
      ->required()
      ->check(CLI::IsMember({"acronyms", "definitions", "contexts", "triplets",
                             "survivors"}));
  mn->add_option("--out", mn_out, "Output file (default stdout)");

  // explain
  auto* ex = app.add_subcommand("explain", "Write explanations for every link");
  PipelineFlags ex_flags;
  std::string ex_out, graph_out;
  add_pipeline_flags(ex, ex_flags);
  ex->add_option("--out", ex_out, "Explanation JSON (default stdout)");
  ex->add_option("--graph", graph_out, "Also write the knowledge graph JSON");

  // serve
  auto* sv = app.add_subcommand("serve", "Serve explanations over HTTP");
  PipelineFlags sv_flags;
  std::vector<std::string> extra_projects;
  int port = 8080;
  std::string host = "127.0.0.1", verdicts = "verdicts.jsonl", static_dir;
  add_pipeline_flags(sv, sv_flags);
  sv->add_option("--also", extra_projects, "Further project directories")
      ->check(CLI::ExistingDirectory);
  sv->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  sv->add_option("--host", host, "Bind address");
  sv->add_option("--verdicts", verdicts, "Append-only verdict log (JSONL)");
  sv->add_option("--static", static_dir, "Directory served under /ui")
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bl) {
      te::ConceptCounter counter;
      for (const auto& path : bl_inputs)
        for (const auto& s : te::ingest_conllu_file(
                 path, {common.label_aliases.empty()
                            ? te::LabelAliases::defaults()
                            : te::LabelAliases::load(common.label_aliases),
                        te::Origin::corpus_document, path}))
          counter.add(s);
      const auto blacklist =
          te::build_blacklist(counter.frequencies(), min_count, top_fraction);
      with_output(bl_out, [&](std::ostream& o) { te::write_blacklist(o, blacklist); });
      return 0;
    }

    auto run_for = [&](const PipelineFlags& f) {
      auto bundle = te::load_bundle(f.project, bundle_options(common));
      auto cfg = pipeline_config(common, f);
      return std::make_pair(std::move(bundle), std::move(cfg));
    };

    if (*cp) {
      auto [bundle, cfg] = run_for(cp_flags);
      te::Blacklist blacklist = cfg.blacklist.value_or(
          bundle.blacklist.value_or(te::Blacklist{}));
      te::ConceptIndex index(bundle.project, blacklist);
      std::vector<te::QueryReport> report;
      const auto corpus =
          te::build_corpus(bundle, te::concept_terms(index), cfg, &report);
      with_output(cp_out, [&](std::ostream& o) { te::write_corpus_jsonl(o, corpus); });
      if (!cp_report.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : report)
          j.push_back({{"concept", r.concept_key},
                       {"query", r.query},
                       {"status", te::to_string(r.status)},
                       {"sentences", r.sentences},
                       {"message", r.message}});
        with_output(cp_report, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
      }
      std::cerr << corpus.sentences.size() << " sentences\n";
      return 0;
    }

    if (*mn) {
      auto [bundle, cfg] = run_for(mn_flags);
      const auto r = te::run_pipeline(bundle, cfg);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      with_output(mn_out, [&](std::ostream& o) {
        if (kind == "acronyms") te::write_acronyms_jsonl(o, r.corpus, r.acronyms);
        else if (kind == "definitions")
          te::write_definitions_jsonl(o, r.corpus, r.definitions);
        else if (kind == "contexts")
          te::write_contexts_jsonl(o, r.corpus, r.contexts);
        else if (kind == "triplets")
          te::write_triplets_jsonl(o, r.corpus, r.triplets);
        else
          for (const auto& s : r.selections)
            for (const auto& e : s.survivors)
              o << nlohmann::json{{"concept", s.concept_key},
                                  {"category", te::to_string(s.category)},
                                  {"text", e.candidate.text},
                                  {"raw_score", te::round4(e.candidate.score)},
                                  {"score", te::round4(e.score)}}
                       .dump()
                << '\n';
      });
      return 0;
    }

    if (*ex) {
      auto [bundle, cfg] = run_for(ex_flags);
      const auto r = te::run_pipeline(bundle, cfg);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      with_output(ex_out, [&](std::ostream& o) {
        o << te::serialize(te::explanations_json(bundle, r));
      });
      if (!graph_out.empty())
        with_output(graph_out,
                    [&](std::ostream& o) { o << te::serialize(r.graph.to_json()); });
      return 0;
    }

    if (*sv) {
      te::VerdictLog log(verdicts);
      te::ExplanationService service(log);
      std::vector<std::string> dirs{sv_flags.project};
      dirs.insert(dirs.end(), extra_projects.begin(), extra_projects.end());
      for (const auto& dir : dirs) {
        PipelineFlags f = sv_flags;
        f.project = dir;
        auto [bundle, cfg] = run_for(f);
        auto result = te::run_pipeline(bundle, cfg);
        service.add_project(std::move(bundle), std::move(result));
      }
      httplib::Server server;
      te::bind_routes(server, service, static_dir);
      std::cerr << "listening on " << host << ':' << port << '\n';
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot bind " << host << ':' << port << '\n';
        return 1;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
