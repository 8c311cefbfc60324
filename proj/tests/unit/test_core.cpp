#include <doctest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "trace_explain/conllu.hpp"
#include "trace_explain/error.hpp"
#include "trace_explain/model.hpp"
#include "trace_explain/segment.hpp"
#include "trace_explain/text.hpp"

using namespace trace_explain;

namespace {

std::vector<ParsedSentence> ingest(const std::string& s,
                                   const ConlluOptions& options = {}) {
  std::istringstream in(s);
  return ingest_conllu(in, options);
}

const char* kThreeTokens =
    "# sent_id = s1\n"
    "# text = The CCD works\n"
    "1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_\n"
    "2\tCCD\tCCD\tPROPN\tNN\t_\t3\tnsubj\t_\t_\n"
    "3\tworks\twork\tVERB\tVBZ\t_\t0\troot\t_\t_\n"
    "\n";

}  // namespace

TEST_CASE("empty stream ingests to nothing") {
  CHECK(ingest("").empty());
  CHECK(ingest("\n\n").empty());
}

TEST_CASE("three token block") {
  const auto sents = ingest(kThreeTokens);
  REQUIRE(sents.size() == 1);
  const auto& s = sents[0];
  CHECK(s.id == "s1");
  CHECK(s.raw_text == "The CCD works");
  REQUIRE(s.size() == 3);
  CHECK(s.token(2).text == "CCD");
  CHECK(s.token(3).pos == "VBZ");
  CHECK(s.token(3).lemma == "work");
  const auto* arc = s.arc_to(2);
  REQUIRE(arc != nullptr);
  CHECK(arc->head == 3);
  CHECK(arc->label == "nsubj");
}

TEST_CASE("two heads for one token names the sentence") {
  const std::string text =
      "# sent_id = s1\n"
      "1\tThe\t_\tDET\tDT\t_\t2\tdet\t_\t_\n"
      "2\tCCD\t_\tNOUN\tNN\t_\t3\tnsubj\t_\t_\n"
      "2\tCCD\t_\tNOUN\tNN\t_\t1\tnsubj\t_\t_\n"
      "3\tworks\t_\tVERB\tVBZ\t_\t0\troot\t_\t_\n";
  CHECK_THROWS_WITH_AS(ingest(text), doctest::Contains("multiple heads, sentence s1"),
                       FormatError);
}

TEST_CASE("cycles are rejected") {
  const std::string text =
      "# sent_id = loop\n"
      "1\ta\t_\tX\tX\t_\t2\tdep\t_\t_\n"
      "2\tb\t_\tX\tX\t_\t1\tdep\t_\t_\n"
      "3\tc\t_\tX\tX\t_\t0\troot\t_\t_\n";
  CHECK_THROWS_WITH_AS(ingest(text), doctest::Contains("cycle, sentence loop"),
                       FormatError);
}

TEST_CASE("malformed line reports its number") {
  const std::string text =
      "# sent_id = s1\n"
      "1\tThe\t_\tDET\n";
  CHECK_THROWS_WITH_AS(ingest(text), doctest::Contains("line 2"), FormatError);
  CHECK_THROWS_AS(ingest("1\tx\t_\tX\tX\t_\tnope\tdep\t_\t_\n"), FormatError);
}

TEST_CASE("legacy labels are aliased") {
  const std::string text =
      "1\tnavigation\t_\tNOUN\tNN\t_\t2\tnn\t_\t_\n"
      "2\tdata\t_\tNOUN\tNN\t_\t3\tnsubj:xsubj\t_\t_\n"
      "3\tincludes\t_\tVERB\tVBZ\t_\t0\troot\t_\t_\n"
      "4\thazards\t_\tNOUN\tNNS\t_\t3\tdobj\t_\t_\n";
  const auto s = ingest(text).at(0);
  CHECK(s.arc_to(1)->label == "compound");
  CHECK(s.arc_to(2)->label == "xsubj");
  CHECK(s.arc_to(4)->label == "obj");
  CHECK(s.id == "s1");
  CHECK(s.raw_text == "navigation data includes hazards");

  ConlluOptions raw;
  raw.aliases = LabelAliases{};
  CHECK(ingest(text, raw).at(0).arc_to(4)->label == "dobj");
}

TEST_CASE("alias file loads") {
  const auto path = std::filesystem::temp_directory_path() / "te_aliases.tsv";
  {
    std::ofstream out(path);
    out << "# legacy\nprep_of\tnmod\n\n";
  }
  const auto aliases = LabelAliases::load(path);
  CHECK(aliases.apply("prep_of") == "nmod");
  CHECK(aliases.apply("nsubj") == "nsubj");
  std::filesystem::remove(path);
}

TEST_CASE("multiword ranges and empty nodes are skipped") {
  const std::string text =
      "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tdo\t_\tAUX\tVBP\t_\t3\taux\t_\t_\n"
      "2\tn't\t_\tPART\tRB\t_\t3\tadvmod\t_\t_\n"
      "2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "3\tstop\t_\tVERB\tVB\t_\t0\troot\t_\t_\n";
  CHECK(ingest(text).at(0).size() == 3);
}

TEST_CASE("every fixture parse is a tree") {
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(test_support::data_dir())) {
    if (entry.path().extension() != ".conllu") continue;
    for (const auto& s : ingest_conllu_file(entry.path()))
      CHECK_NOTHROW(validate_tree(s));
  }
}

TEST_CASE("CoNLL-U round trip on random sentences") {
  std::mt19937_64 rng(42);
  const std::vector<std::string> words{"CCD", "data", "unit", "is", "the",
                                       "Wayside", "OBU", "runs", "x-ray"};
  const std::vector<std::string> tags{"NN", "NNP", "VBZ", "DT", "JJ"};
  const std::vector<std::string> labels{"nsubj", "compound", "amod", "obj",
                                        "det", "cop"};
  for (int trial = 0; trial < 300; ++trial) {
    ParsedSentence s;
    s.id = "r" + std::to_string(trial);
    s.origin = static_cast<Origin>(trial % 3);
    s.source = trial % 2 ? "doc-" + std::to_string(trial) : "";
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<std::string> forms;
    // Random tree: each token attaches to an earlier one or the root.
    const int root = 1 + static_cast<int>(rng() % n);
    for (int i = 1; i <= n; ++i) {
      Token t;
      t.index = i;
      t.text = words[rng() % words.size()];
      t.lemma = rng() % 2 ? fold(t.text) : t.text;
      t.pos = tags[rng() % tags.size()];
      s.tokens.push_back(t);
      forms.push_back(t.text);
    }
    std::vector<int> order;
    for (int i = 1; i <= n; ++i)
      if (i != root) order.push_back(i);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> placed{root};
    s.arcs.push_back({0, root, "root"});
    for (int d : order) {
      const int h = placed[rng() % placed.size()];
      s.arcs.push_back({h, d, labels[rng() % labels.size()]});
      placed.push_back(d);
    }
    std::sort(s.arcs.begin(), s.arcs.end(),
              [](const DependencyArc& a, const DependencyArc& b) {
                return a.dependent < b.dependent;
              });
    s.raw_text = join(forms, " ");

    const auto back = ingest(to_conllu({s}));
    REQUIRE(back.size() == 1);
    CHECK(back[0] == s);
  }
}

TEST_CASE("token spans follow SpaceAfter") {
  const auto sents = test_support::load_parses("mini/artifacts/des-02.conllu");
  const auto& s = sents.at(0);
  CHECK(s.raw_text ==
        "The RCU shall publish an AckermannDriveStamped message to the "
        "robot's control topic.");
  const auto spans = s.token_spans();
  CHECK(s.raw_text.substr(spans[10].begin, spans[10].end - spans[10].begin) == "'s");
}

TEST_CASE("sentence segmentation") {
  CHECK(segment_sentences("").empty());
  CHECK(segment_sentences("A works. B fails.") ==
        std::vector<SentenceSpan>{{0, "A works."}, {9, "B fails."}});
  const auto dr = segment_sentences("Dr. X left. He ran.");
  REQUIRE(dr.size() == 2);
  CHECK(dr[0].text == "Dr. X left.");
  CHECK(dr[1].offset == 12);
  CHECK(segment_sentences("See Fig. 3 and e.g. the CCD. It works.").size() == 2);
  CHECK(segment_sentences("Is it? Yes! Fine.").size() == 3);
  CHECK(segment_sentences("lower. case start").size() == 1);
  CHECK(segment_sentences("Ends without period").size() == 1);
}

TEST_CASE("segmentation spans cover the text in order") {
  std::mt19937 rng(7);
  const std::vector<std::string> pieces{"A", "b", "CCD", ".", "?", "!", " ",
                                        "  ", "\n", "Dr.", "X.", "e.g.", "Unit"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const int n = static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) text += pieces[rng() % pieces.size()];
    const auto spans = segment_sentences(text);
    std::size_t cursor = 0;
    for (const auto& s : spans) {
      REQUIRE(s.offset >= cursor);
      REQUIRE(s.offset + s.text.size() <= text.size());
      CHECK(text.compare(s.offset, s.text.size(), s.text) == 0);
      CHECK(trim(text.substr(cursor, s.offset - cursor)).empty());
      CHECK(!s.text.empty());
      cursor = s.offset + s.text.size();
    }
    CHECK(trim(text.substr(cursor)).empty());
  }
}

TEST_CASE("abbreviation list") {
  const auto d = AbbreviationList::defaults();
  CHECK(d.contains("Dr"));
  CHECK(d.contains("fig"));
  CHECK(d.contains("E.G"));
  CHECK_FALSE(d.contains("left"));
}

TEST_CASE("artifact sentence offsets") {
  Artifact a;
  a.id = "a";
  a.text = "The OBU runs.   The WIU stops.";
  ParsedSentence s1;
  s1.raw_text = "The OBU runs.";
  ParsedSentence s2;
  s2.raw_text = "The WIU stops.";
  a.sentences = {s1, s2};
  locate_sentences(a);
  CHECK(a.sentence_offsets == std::vector<std::size_t>{0, 16});

  a.sentences[1].raw_text = "Missing sentence.";
  CHECK_THROWS_AS(locate_sentences(a), FormatError);
}

TEST_CASE("project lookups") {
  Project p;
  p.id = "p";
  p.artifacts.push_back(Artifact{"a1", "p", ArtifactKind::source, "x", {}, {}});
  p.links.push_back(TraceLink{"L1", "a1", "a1", GoldLabel::correct});
  CHECK(p.artifact("a1").text == "x");
  CHECK(p.link("L1").gold_label == GoldLabel::correct);
  CHECK_THROWS_AS(p.artifact("zz"), NotFoundError);
  CHECK_THROWS_AS(p.link("zz"), NotFoundError);
}

TEST_CASE("text helpers") {
  CHECK(canonical_key("  Wayside \t Data ") == "wayside data");
  CHECK(fold("CCD-Imager") == "ccd-imager");
  CHECK(stable_hash("") == "cbf29ce484222325");
  CHECK(stable_hash("a") == "af63dc4c8601ec8c");
  CHECK(at_word_boundary("template", 5, 8) == false);
  CHECK(at_word_boundary("the EMP protocol", 4, 7));
}

TEST_CASE("shipped config files match the built-in defaults") {
  const auto config = test_support::data_dir().parent_path().parent_path() / "config";
  CHECK(AbbreviationList::load(config / "abbreviations.txt").words ==
        AbbreviationList::defaults().words);
  CHECK(LabelAliases::load(config / "label_aliases.tsv").rewrite ==
        LabelAliases::defaults().rewrite);
}
