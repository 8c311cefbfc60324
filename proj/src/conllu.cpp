#include "trace_explain/conllu.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "trace_explain/error.hpp"
#include "trace_explain/text.hpp"

namespace trace_explain {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool parse_int(const std::string& s, int& value) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::string comment_value(const std::string& line, std::string_view key) {
  // "# key = value"
  std::string_view rest = std::string_view(line).substr(1);
  rest = trim(rest);
  if (rest.substr(0, key.size()) != key) return {};
  rest = rest.substr(key.size());
  rest = trim(rest);
  if (rest.empty() || rest.front() != '=') return {};
  return std::string(trim(rest.substr(1)));
}

bool has_comment_key(const std::string& line, std::string_view key) {
  std::string_view rest = trim(std::string_view(line).substr(1));
  if (rest.substr(0, key.size()) != key) return false;
  rest = trim(rest.substr(key.size()));
  return !rest.empty() && rest.front() == '=';
}

struct PendingToken {
  Token token;
  int head = 0;
  std::string label;
  bool space_after = true;
};

class BlockBuilder {
 public:
  explicit BlockBuilder(const ConlluOptions& options) : options_(options) {}

  bool empty() const { return tokens_.empty() && !has_comments_; }

  void comment(const std::string& line) {
    has_comments_ = true;
    if (has_comment_key(line, "sent_id")) id_ = comment_value(line, "sent_id");
    else if (has_comment_key(line, "text")) {
      text_ = comment_value(line, "text");
      has_text_ = true;
    } else if (has_comment_key(line, "origin"))
      origin_ = origin_from_string(comment_value(line, "origin"));
    else if (has_comment_key(line, "source"))
      source_ = comment_value(line, "source");
  }

  void token_line(const std::string& line, std::size_t line_no) {
    const auto cols = split_tabs(line);
    if (cols.size() != 10)
      throw FormatError("malformed line " + std::to_string(line_no) +
                        ": expected 10 tab-separated columns, got " +
                        std::to_string(cols.size()));
    const std::string& id = cols[0];
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos)
      return;
    int index = 0;
    if (!parse_int(id, index) || index < 1)
      throw FormatError("malformed line " + std::to_string(line_no) +
                        ": bad token id '" + id + "'");
    int head = 0;
    if (!parse_int(cols[6], head) || head < 0)
      throw FormatError("malformed line " + std::to_string(line_no) +
                        ": bad head '" + cols[6] + "'");
    if (cols[1].empty())
      throw FormatError("malformed line " + std::to_string(line_no) +
                        ": empty form");
    PendingToken t;
    t.token.index = index;
    t.token.text = cols[1];
    t.token.lemma = cols[2] == "_" ? fold(cols[1]) : cols[2];
    t.token.pos = cols[4] != "_" ? cols[4] : cols[3];
    t.head = head;
    t.label = options_.aliases.apply(cols[7]);
    t.space_after = cols[9].find("SpaceAfter=No") == std::string::npos;
    tokens_.push_back(std::move(t));
    line_numbers_.push_back(line_no);
  }

  ParsedSentence finish(std::size_t block_no) {
    ParsedSentence s;
    s.id = id_.empty() ? "s" + std::to_string(block_no) : id_;
    s.origin = origin_.value_or(options_.origin);
    s.source = source_.empty() ? options_.source : source_;
    std::vector<bool> seen(tokens_.size() + 2, false);
    for (std::size_t k = 0; k < tokens_.size(); ++k) {
      const int idx = tokens_[k].token.index;
      if (idx < static_cast<int>(seen.size()) && seen[idx])
        throw FormatError("multiple heads, sentence " + s.id + " (token " +
                          std::to_string(idx) + ", line " +
                          std::to_string(line_numbers_[k]) + ")");
      if (idx != static_cast<int>(k) + 1)
        throw FormatError("malformed line " + std::to_string(line_numbers_[k]) +
                          ": token id " + std::to_string(idx) +
                          " out of sequence, sentence " + s.id);
      seen[idx] = true;
    }
    std::string rebuilt;
    for (auto& t : tokens_) {
      rebuilt += t.token.text;
      if (t.space_after) rebuilt += ' ';
      s.arcs.push_back({t.head, t.token.index, t.label});
      s.tokens.push_back(std::move(t.token));
    }
    s.raw_text = has_text_ ? text_ : std::string(trim(rebuilt));
    validate_tree(s);
    return s;
  }

 private:
  const ConlluOptions& options_;
  std::vector<PendingToken> tokens_;
  std::vector<std::size_t> line_numbers_;
  std::string id_;
  std::string text_;
  std::string source_;
  std::optional<Origin> origin_;
  bool has_text_ = false;
  bool has_comments_ = false;
};

}  // namespace

LabelAliases LabelAliases::defaults() {
  return LabelAliases{{{"nn", "compound"},
                       {"dobj", "obj"},
                       {"nsubj:xsubj", "xsubj"}}};
}

LabelAliases LabelAliases::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open alias file " + path.string());
  LabelAliases out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto parts = split_whitespace(body);
    if (parts.size() != 2)
      throw FormatError("malformed line " + std::to_string(line_no) + " in " +
                        path.string());
    out.rewrite[parts[0]] = parts[1];
  }
  return out;
}

const std::string& LabelAliases::apply(const std::string& label) const {
  const auto it = rewrite.find(label);
  return it == rewrite.end() ? label : it->second;
}

std::vector<ParsedSentence> ingest_conllu(std::istream& in,
                                          const ConlluOptions& options) {
  std::vector<ParsedSentence> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t block_no = 0;
  auto builder = std::make_unique<BlockBuilder>(options);
  auto flush = [&] {
    if (builder->empty()) return;
    ++block_no;
    auto s = builder->finish(block_no);
    if (!s.tokens.empty()) out.push_back(std::move(s));
    builder = std::make_unique<BlockBuilder>(options);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
    } else if (line.front() == '#') {
      builder->comment(line);
    } else {
      builder->token_line(line, line_no);
    }
  }
  flush();
  return out;
}

std::vector<ParsedSentence> ingest_conllu_file(
    const std::filesystem::path& path, ConlluOptions options) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  if (options.source.empty()) options.source = path.string();
  return ingest_conllu(in, options);
}

void write_conllu(std::ostream& out, const ParsedSentence& s) {
  out << "# sent_id = " << s.id << '\n';
  out << "# text = " << s.raw_text << '\n';
  out << "# origin = " << to_string(s.origin) << '\n';
  if (!s.source.empty()) out << "# source = " << s.source << '\n';
  for (const auto& tok : s.tokens) {
    const auto* arc = s.arc_to(tok.index);
    out << tok.index << '\t' << tok.text << '\t' << tok.lemma << "\t_\t"
        << tok.pos << "\t_\t" << (arc ? arc->head : 0) << '\t'
        << (arc ? arc->label : std::string("_")) << "\t_\t_\n";
  }
  out << '\n';
}

std::string to_conllu(const std::vector<ParsedSentence>& sentences) {
  std::ostringstream out;
  for (const auto& s : sentences) write_conllu(out, s);
  return out.str();
}

}  // namespace trace_explain
