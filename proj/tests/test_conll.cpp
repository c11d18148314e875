#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>
#include <sstream>

#include "conll_fixtures.h"
#include "coref/conll.h"
#include "corpus_helpers.h"
#include "doctest.h"

using namespace coref;

namespace {

// Canonical form for clustering comparison: clusters as sorted span sets,
// sorted by first mention.
std::vector<Cluster> canonical(Clustering clusters) {
  for (Cluster& c : clusters) std::sort(c.begin(), c.end());
  std::sort(clusters.begin(), clusters.end());
  return clusters;
}

}  // namespace

TEST_CASE("multi-token mention spans its open and close brackets") {
  std::istringstream in(three_token_doc({"(3", "-", "3)"}));
  auto docs = parse_conll(in);
  REQUIRE(docs.size() == 1);
  REQUIRE(docs[0].gold_clusters.size() == 1);
  REQUIRE(docs[0].gold_clusters[0].size() == 1);
  CHECK(docs[0].gold_clusters[0][0] == Span{0, 2});
}

TEST_CASE("a token can open one mention and fully contain another") {
  std::istringstream in(three_token_doc({"(1)|(2", "2)", "-"}));
  auto docs = parse_conll(in);
  auto clusters = canonical(docs[0].gold_clusters);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0] == Cluster{Span{0, 0}});
  CHECK(clusters[1] == Cluster{Span{0, 1}});
}

TEST_CASE("all-dash coreference column gives no clusters") {
  std::istringstream in(three_token_doc({"-", "-", "-"}));
  auto docs = parse_conll(in);
  CHECK(docs[0].gold_clusters.empty());
}

TEST_CASE("same cluster id nests via a bracket stack") {
  std::istringstream in(three_token_doc({"(0", "(0)", "0)"}));
  auto docs = parse_conll(in);
  REQUIRE(docs[0].gold_clusters.size() == 1);
  auto mentions = docs[0].gold_clusters[0];
  std::sort(mentions.begin(), mentions.end());
  CHECK(mentions == Cluster{Span{0, 2}, Span{1, 1}});
}

TEST_CASE("document metadata comes from the begin header") {
  std::istringstream in(three_token_doc({"-", "-", "-"}));
  auto docs = parse_conll(in);
  CHECK(docs[0].source_id == "bc/synth/doc0");
  CHECK(docs[0].genre == "bc");
  CHECK(docs[0].part == 0);
  CHECK(docs[0].doc_key() == "bc/synth/doc0_0");
  CHECK(docs[0].num_sentences() == 1);
  CHECK(docs[0].tokens[1].speaker == "spk0");
}

TEST_CASE("parse bits reconstruct constituent spans") {
  // (S(NP w0 w1 )NP (VP w2 )VP )S  ->  constituents (0,1), (2,2), (0,2).
  std::istringstream in(three_token_doc({"-", "-", "-"},
                                        {"(S(NP*", "*)", "(VP*))"}));
  auto docs = parse_conll(in);
  auto spans = docs[0].gold_constituents;
  CHECK(spans == std::vector<Span>{{0, 1}, {0, 2}, {2, 2}});
}

TEST_CASE("unclosed bracket is reported with its line number") {
  std::istringstream in(three_token_doc({"(4", "-", "-"}));
  try {
    parse_conll(in);
    FAIL("expected ConllError");
  } catch (const ConllError& e) {
    CHECK(std::string(e.what()).find("unclosed") != std::string::npos);
  }
}

TEST_CASE("close without open is rejected") {
  std::istringstream in(three_token_doc({"-", "7)", "-"}));
  CHECK_THROWS_AS(parse_conll(in), ConllError);
}

TEST_CASE("inconsistent column counts are rejected with the line number") {
  std::string text = three_token_doc({"-", "-", "-"});
  // Append an extra column to the second token row.
  size_t first_row = text.find("\nbc/") + 1;
  size_t second_row = text.find("\nbc/", first_row) + 1;
  size_t row_end = text.find('\n', second_row);
  text.insert(row_end, " extra");
  std::istringstream in(text);
  try {
    parse_conll(in);
    FAIL("expected ConllError");
  } catch (const ConllError& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
}

TEST_CASE("mention crossing a sentence boundary is rejected") {
  std::string text =
      "#begin document (bc/synth/doc0); part 000\n"
      "bc/synth/doc0 0 0 a - * - - - spk0 * (0\n"
      "\n"
      "bc/synth/doc0 0 0 b - * - - - spk0 * 0)\n"
      "\n"
      "#end document\n";
  std::istringstream in(text);
  CHECK_THROWS_AS(parse_conll(in), ConllError);
}

TEST_CASE("empty clustering writes all-dash coreference fields") {
  Rng rng(1);
  Document doc = make_random_document(rng, 0);
  doc.gold_clusters.clear();
  std::string text = write_conll(doc, {});
  std::istringstream check(text);
  std::string line;
  int rows = 0;
  while (std::getline(check, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++rows;
    CHECK(line.substr(line.size() - 2) == " -");
  }
  CHECK(rows == doc.num_tokens());
}

TEST_CASE("two-mention cluster serializes with dense id 0") {
  Document doc;
  doc.source_id = "nw/x";
  doc.genre = "nw";
  for (int i = 0; i < 6; ++i) {
    doc.tokens.push_back({"w" + std::to_string(i), 0, "s", i});
  }
  doc.sentences = {{0, 5}};
  std::string text = write_conll(doc, {{{0, 0}, {4, 5}}});
  std::istringstream in(text);
  std::vector<std::string> fields;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    fields.push_back(line.substr(line.rfind(' ') + 1));
  }
  CHECK(fields == std::vector<std::string>{"(0)", "-", "-", "-", "(0", "0)"});
}

TEST_CASE("nested mentions in different clusters share token fields") {
  Document doc;
  doc.source_id = "nw/x";
  doc.genre = "nw";
  for (int i = 0; i < 6; ++i) {
    doc.tokens.push_back({"w" + std::to_string(i), 0, "s", i});
  }
  doc.sentences = {{0, 5}};
  // Cluster 0: (2,4) and (0,0); cluster 1: (3,3) and (2,3), adjacent+nested.
  Clustering pred = {{{2, 4}, {0, 0}}, {{3, 3}, {2, 3}}};
  std::string text = write_conll(doc, pred);
  std::istringstream in(text);
  std::vector<std::string> fields;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    fields.push_back(line.substr(line.rfind(' ') + 1));
  }
  CHECK(fields[2] == "(0|(1");     // outermost open first
  CHECK(fields[3] == "(1)|1)");    // single + close joined by |
  CHECK(fields[4] == "0)");
  std::istringstream again(text);
  auto docs = parse_conll(again);
  CHECK(canonical(docs[0].gold_clusters) == canonical(pred));
}

TEST_CASE("a span in two clusters is rejected") {
  Document doc;
  doc.source_id = "nw/x";
  doc.genre = "nw";
  for (int i = 0; i < 3; ++i) {
    doc.tokens.push_back({"w", 0, "s", i});
  }
  doc.sentences = {{0, 2}};
  CHECK_THROWS_AS(write_conll(doc, {{{0, 1}, {2, 2}}, {{0, 1}, {1, 2}}}),
                  std::invalid_argument);
}

TEST_CASE("round-trip preserves tokens, speakers, and clusters") {
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    Document doc = make_random_document(rng, i);
    std::string text = write_conll(doc, doc.gold_clusters);
    std::istringstream in(text);
    auto docs = parse_conll(in);
    REQUIRE(docs.size() == 1);
    const Document& back = docs[0];
    REQUIRE(back.num_tokens() == doc.num_tokens());
    for (int t = 0; t < doc.num_tokens(); ++t) {
      CHECK(back.tokens[t].text == doc.tokens[t].text);
      CHECK(back.tokens[t].speaker == doc.tokens[t].speaker);
      CHECK(back.tokens[t].sentence_index == doc.tokens[t].sentence_index);
    }
    CHECK(back.sentences == doc.sentences);
    CHECK(canonical(back.gold_clusters) == canonical(doc.gold_clusters));
    CHECK(back.source_id == doc.source_id);
    CHECK(back.part == doc.part);

    // Every parsed mention lies inside one sentence and inside bounds.
    for (const Cluster& c : back.gold_clusters) {
      for (const Span& s : c) {
        CHECK(s.start >= 0);
        CHECK(s.start <= s.end);
        CHECK(s.end < back.num_tokens());
        CHECK(back.tokens[s.start].sentence_index ==
              back.tokens[s.end].sentence_index);
      }
    }
  }
}

TEST_CASE("multiple documents in one stream parse independently") {
  Rng rng(77);
  Document a = make_random_document(rng, 0);
  Document b = make_random_document(rng, 1);
  std::string text = write_conll(a, a.gold_clusters) +
                     write_conll(b, b.gold_clusters);
  std::istringstream in(text);
  auto docs = parse_conll(in);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_key() == a.doc_key());
  CHECK(docs[1].doc_key() == b.doc_key());
}
