#include "trace_explain/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trace_explain/error.hpp"
#include "trace_explain/explanation.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> files_with_extension(const fs::path& dir,
                                           const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ext)
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.emplace_back(trim(cell));
  return cells;
}

void load_parses(const fs::path& dir, Origin origin, const LabelAliases& aliases,
                 ParseStore& store) {
  for (const auto& path : files_with_extension(dir, ".conllu")) {
    ConlluOptions options;
    options.aliases = aliases;
    options.origin = origin;
    options.source = path.filename().string();
    store.add_all(ingest_conllu_file(path, options));
  }
}

}  // namespace

void ParseStore::add(const ParsedSentence& sentence) {
  by_text_.emplace(canonical_key(sentence.raw_text), sentence);
}

void ParseStore::add_all(const std::vector<ParsedSentence>& sentences) {
  for (const auto& s : sentences) add(s);
}

const ParsedSentence* ParseStore::find(const std::string& text) const {
  const auto it = by_text_.find(canonical_key(text));
  return it == by_text_.end() ? nullptr : &it->second;
}

std::size_t attach_parses(DomainCorpus& corpus, const ParseStore& store) {
  std::size_t attached = 0;
  for (auto& s : corpus.sentences) {
    if (s.parse) continue;
    if (const auto* p = store.find(s.text)) {
      s.parse = *p;
      ++attached;
    }
  }
  return attached;
}

std::vector<TraceLink> read_links_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<TraceLink> links;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (cells.size() >= 3 && cells[0] == "link_id") continue;
    }
    if (cells.size() < 3 || cells.size() > 4)
      throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                        " needs 3 or 4 columns");
    TraceLink link{cells[0], cells[1], cells[2], std::nullopt};
    if (cells.size() == 4 && !cells[3].empty()) {
      const std::string g = fold(cells[3]);
      if (g == "correct" || g == "1" || g == "true")
        link.gold_label = GoldLabel::correct;
      else if (g == "incorrect" || g == "0" || g == "false")
        link.gold_label = GoldLabel::incorrect;
      else
        throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                          ": bad gold_label '" + cells[3] + "'");
    }
    links.push_back(std::move(link));
  }
  return links;
}

std::vector<std::string> read_line_documents(const fs::path& dir) {
  std::vector<std::string> docs;
  for (const auto& path : files_with_extension(dir, ".txt")) {
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      const auto t = trim(line);
      if (!t.empty()) docs.emplace_back(t);
    }
  }
  return docs;
}

ProjectBundle load_bundle(const fs::path& root, const BundleOptions& options) {
  if (!fs::is_directory(root))
    throw NotFoundError("project directory " + root.string() + " not found");

  ProjectBundle b;
  b.root = root;

  const fs::path meta_path = root / "project.json";
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(meta_path));
    b.project.id = meta.at("id").get<std::string>();
    b.project.domain_name = meta.at("domain_name").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(meta_path.string() + ": " + e.what());
  }

  b.project.links = read_links_csv(root / "links.csv");
  std::set<std::string> link_ids;
  std::map<std::string, ArtifactKind> kinds;
  for (const auto& l : b.project.links) {
    if (!link_ids.insert(l.id).second)
      throw FormatError("duplicate link id '" + l.id + "'");
    kinds.emplace(l.source_artifact_id, ArtifactKind::source);
    kinds.emplace(l.target_artifact_id, ArtifactKind::target);
  }
  if (meta.contains("artifacts")) {
    for (const auto& [id, kind] : meta.at("artifacts").items()) {
      const auto k = kind.get<std::string>();
      if (k != "source" && k != "target")
        throw FormatError(meta_path.string() + ": artifact kind '" + k + "'");
      kinds[id] = k == "source" ? ArtifactKind::source : ArtifactKind::target;
    }
  }

  const fs::path artifact_dir = root / "artifacts";
  for (const auto& txt : files_with_extension(artifact_dir, ".txt")) {
    Artifact a;
    a.id = txt.stem().string();
    a.project_id = b.project.id;
    a.text = read_file(txt);
    while (!a.text.empty() && is_space(a.text.back())) a.text.pop_back();
    const auto it = kinds.find(a.id);
    a.kind = it == kinds.end() ? ArtifactKind::source : it->second;

    fs::path parse_path = txt;
    parse_path.replace_extension(".conllu");
    if (!fs::exists(parse_path))
      throw NotFoundError("artifact " + a.id + " has no parse at " +
                          parse_path.string());
    ConlluOptions co;
    co.aliases = options.aliases;
    co.origin = Origin::project_artifact;
    co.source = a.id;
    a.sentences = ingest_conllu_file(parse_path, co);
    locate_sentences(a);
    b.parses.add_all(a.sentences);
    b.project.artifacts.push_back(std::move(a));
  }

  for (const auto& l : b.project.links) {
    b.project.artifact(l.source_artifact_id);
    b.project.artifact(l.target_artifact_id);
  }

  if (fs::exists(root / "glossary.json"))
    b.project.glossary = load_glossary(root / "glossary.json");

  if (fs::exists(root / "blacklist.tsv")) {
    std::ifstream in(root / "blacklist.tsv");
    b.blacklist = read_blacklist(in);
  }

  for (const auto& txt : files_with_extension(root / "corpus", ".txt"))
    b.corpus_documents.push_back({read_file(txt), "file:corpus/" +
                                                      txt.filename().string()});
  load_parses(root / "corpus", Origin::corpus_document, options.aliases,
              b.parses);

  if (fs::is_directory(root / "search")) {
    b.search_dir = root / "search";
    load_parses(root / "search", Origin::search_result, options.aliases,
                b.parses);
  }

  b.background_documents = read_line_documents(root / "background");
  return b;
}

}  // namespace trace_explain
