#include <doctest.h>

#include <fstream>
#include <random>

#include "rti/extract.hpp"
#include "rti/text.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace rti::extract;
using rti::treebank::ConstituencyTree;

namespace {

// "Holmes will portray Holmes in a movie based on Bad Blood": the two
// noun phrases that pass the filters are nested.
constexpr const char* kMovieTree =
    "(S (NP (NNP Holmes)) (VP (MD will) (VB portray)"
    " (NP (NP (NNP Holmes)) (PP (IN in)"
    " (NP (NP (DT a) (NN movie)) (VP (VBN based) (PP (IN on)"
    " (NP (NNP Bad) (NNP Blood)))))))))";

std::vector<std::string> rti_texts(const std::vector<Rti>& rtis) {
  std::vector<std::string> out;
  for (const Rti& r : rtis) out.push_back(r.text);
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("extract");

TEST_CASE("is_content_word consults the case-folded stop list") {
  FilterConfig cfg = default_filter_config();
  CHECK_FALSE(is_content_word("is", cfg));
  CHECK_FALSE(is_content_word("An", cfg));
  CHECK_FALSE(is_content_word("this", cfg));
  CHECK(is_content_word("movie", cfg));
  CHECK(is_content_word("Movie", cfg));
}

TEST_CASE("filter config bounds are validated") {
  FilterConfig cfg = default_filter_config();
  cfg.max_words = 2;
  cfg.min_content_words = 3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = default_filter_config();
  cfg.stopwords.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = default_filter_config();
  cfg.min_content_words = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("stop-word files allow comments and blank lines") {
  testsupport::TempDir tmp;
  auto path = tmp.path() / "stopwords.txt";
  std::ofstream(path) << "# structural words\nthe\nIs\n\nan\n";
  auto words = load_stopwords(path);
  CHECK(words == std::set<std::string>{"the", "is", "an"});
}

TEST_CASE("nested noun phrases from the movie sentence are both kept") {
  auto tree = ConstituencyTree::parse(kMovieTree, "movie");
  auto rtis = extract_rtis(tree, default_filter_config());
  auto texts = rti_texts(rtis);
  REQUIRE(texts.size() == 2);
  // Pre-order: the containing phrase first.
  CHECK(texts[0] == "Holmes in a movie based on Bad Blood");
  CHECK(texts[1] == "a movie based on Bad Blood");
}

TEST_CASE("too few content words filters a phrase out") {
  auto tree = ConstituencyTree::parse("(S (NP (DT the) (NN dog)) (VP (VBD ran)))");
  CHECK(extract_rtis(tree, default_filter_config()).empty());
}

TEST_CASE("more than ten words filters a phrase out") {
  std::string np = "(NP";
  for (int i = 0; i < 11; ++i) np += " (NN word" + std::to_string(i) + ")";
  np += ")";
  auto tree = ConstituencyTree::parse("(S " + np + " (VP (VBD ran)))");
  CHECK(extract_rtis(tree, default_filter_config()).empty());

  // Exactly ten words stays in.
  std::string np10 = "(NP";
  for (int i = 0; i < 10; ++i) np10 += " (NN word" + std::to_string(i) + ")";
  np10 += ")";
  auto tree10 = ConstituencyTree::parse("(S " + np10 + " (VP (VBD ran)))");
  CHECK(extract_rtis(tree10, default_filter_config()).size() == 1);
}

TEST_CASE("function-tagged NP labels still match") {
  auto tree = ConstituencyTree::parse(
      "(S (NP-SBJ (NNP Granite) (NN harbor) (NN survey)) (VP (VBD ran)))");
  auto rtis = extract_rtis(tree, default_filter_config());
  REQUIRE(rtis.size() == 1);
  CHECK(rtis[0].text == "Granite harbor survey");
}

TEST_CASE("duplicate spans collapse to the outermost node") {
  auto tree = ConstituencyTree::parse(
      "(S (NP (NP (NNP Granite) (NN harbor) (NN survey))) (VP (VBD ran)))");
  auto rtis = extract_rtis(tree, default_filter_config());
  REQUIRE(rtis.size() == 1);
  CHECK(rtis[0].node_path == rti::treebank::NodePath{0});
}

TEST_CASE("pair generation for the nested movie RTIs") {
  auto tree = ConstituencyTree::parse(kMovieTree, "movie");
  std::string sentence = rti::text::join(tree.yield_tokens());
  auto rtis = extract_rtis(tree, default_filter_config());
  auto pairs = generate_pairs(rtis, sentence, tree);

  // Outer vs sentence, inner vs sentence, inner vs outer.
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].rti.text == "Holmes in a movie based on Bad Blood");
  CHECK(pairs[0].container_text == sentence);
  CHECK(pairs[0].container_kind == ContainerKind::full_sentence);
  CHECK(pairs[1].rti.text == "a movie based on Bad Blood");
  CHECK(pairs[1].container_text == sentence);
  CHECK(pairs[2].rti.text == "a movie based on Bad Blood");
  CHECK(pairs[2].container_text == "Holmes in a movie based on Bad Blood");
  CHECK(pairs[2].container_kind == ContainerKind::ancestor_np);
  // Sentence-local ordinals, in order.
  CHECK(pairs[0].pair_id == "p000");
  CHECK(pairs[1].pair_id == "p001");
  CHECK(pairs[2].pair_id == "p002");
}

TEST_CASE("a single RTI that is not the whole sentence yields one pair") {
  auto tree = ConstituencyTree::parse(
      "(S (NP (NNP Granite) (NN harbor) (NN survey)) (VP (VBD ran)))");
  auto rtis = extract_rtis(tree, default_filter_config());
  auto pairs = generate_pairs(rtis, rti::text::join(tree.yield_tokens()), tree);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].container_kind == ContainerKind::full_sentence);
}

TEST_CASE("an RTI spanning the whole sentence gets no sentence pair") {
  auto tree = ConstituencyTree::parse("(NP (NNP Granite) (NN harbor) (NN survey))");
  auto rtis = extract_rtis(tree, default_filter_config());
  REQUIRE(rtis.size() == 1);
  CHECK(generate_pairs(rtis, rti::text::join(tree.yield_tokens()), tree).empty());
}

TEST_CASE("chain of nested RTIs matches the exhaustive ancestor count") {
  // Three extracted NPs on one spine; derived count: each pairs with the
  // sentence plus every extracted ancestor: (1+0) + (1+1) + (1+2) = 6.
  auto tree = ConstituencyTree::parse(
      "(S (VP (VBD ran))"
      " (NP (JJ regional) (NN committee)"
      "  (NP (JJ quarterly) (NN reform) (NN survey)"
      "   (NP (NNP Granite) (NN harbor) (NN museum)))))");
  auto rtis = extract_rtis(tree, default_filter_config());
  REQUIRE(rtis.size() == 3);
  auto pairs = generate_pairs(rtis, rti::text::join(tree.yield_tokens()), tree);
  CHECK(static_cast<int>(pairs.size()) ==
        testsupport::brute_force_pair_count(rtis, tree.root().span_width()));
  CHECK(pairs.size() == 6);
  // Ancestor pairs come innermost-first after the sentence pair.
  CHECK(pairs[4].rti.text == "Granite harbor museum");
  CHECK(pairs[4].container_text == "quarterly reform survey Granite harbor museum");
  CHECK(pairs[5].container_text ==
        "regional committee quarterly reform survey Granite harbor museum");
}

TEST_CASE("properties over random corpora") {
  auto cfg = default_filter_config();
  auto corpus = testsupport::make_synthetic_corpus(120, 0xfeedbeef);
  int total_pairs = 0;
  for (const auto& sentence : corpus.sentences) {
    auto tree = ConstituencyTree::parse(sentence.tree, sentence.id);
    auto rtis = extract_rtis(tree, cfg);
    auto sentence_tokens = tree.yield_tokens();

    for (const Rti& r : rtis) {
      // Yield is a contiguous token slice of the sentence.
      auto span_tokens = std::vector<std::string>(
          sentence_tokens.begin() + r.span_begin, sentence_tokens.begin() + r.span_end);
      CHECK(rti::text::join(span_tokens) == r.text);
      // Filter soundness.
      auto tokens = rti::text::split_ws(r.text);
      CHECK(static_cast<int>(tokens.size()) <= cfg.max_words);
      int content = 0;
      for (const auto& t : tokens)
        if (is_content_word(t, cfg)) ++content;
      CHECK(content >= cfg.min_content_words);
    }

    auto pairs = generate_pairs(rtis, sentence.text, tree);
    CHECK(static_cast<int>(pairs.size()) ==
          testsupport::brute_force_pair_count(rtis, tree.root().span_width()));
    total_pairs += static_cast<int>(pairs.size());

    // Tightening either filter never grows the RTI set.
    FilterConfig tighter = cfg;
    tighter.max_words = 6;
    auto fewer = extract_rtis(tree, tighter);
    CHECK(fewer.size() <= rtis.size());
    for (const Rti& r : fewer) {
      bool found = false;
      for (const Rti& orig : rtis) found = found || orig.node_path == r.node_path;
      CHECK(found);
    }
    FilterConfig stricter = cfg;
    stricter.min_content_words = 4;
    auto strict_set = extract_rtis(tree, stricter);
    CHECK(strict_set.size() <= rtis.size());
    for (const Rti& r : strict_set) {
      bool found = false;
      for (const Rti& orig : rtis) found = found || orig.node_path == r.node_path;
      CHECK(found);
    }
  }
  CHECK(total_pairs > 0);
}

TEST_SUITE_END();
