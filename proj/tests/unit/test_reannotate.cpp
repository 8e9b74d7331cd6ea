#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "generators.hpp"
#include "test_support.hpp"
#include "thattag/conllu.hpp"
#include "thattag/fsutil.hpp"
#include "thattag/reannotate.hpp"

using namespace thattag;
using namespace thattag::testing;

namespace {

Sentence parse_one(const std::string& text) { return parse_conllu(text, "t").sentences.at(0); }

const char* kRelative =
    "# sent_id = r\n"
    "1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_\n"
    "2\tbook\tbook\tNOUN\tNN\t_\t7\tnsubj\t_\t_\n"
    "3\tthat\tthat\tPRON\tWDT\tPronType=Rel\t5\tobj\t_\t_\n"
    "4\tI\tI\tPRON\tPRP\t_\t5\tnsubj\t_\t_\n"
    "5\tread\tread\tVERB\tVBD\t_\t2\tacl:relcl\t_\t_\n"
    "6\twas\tbe\tAUX\tVBD\t_\t7\tcop\t_\t_\n"
    "7\tfascinating\tfascinating\tADJ\tJJ\t_\t0\troot\t_\t_\n"
    "8\t.\t.\tPUNCT\t.\t_\t7\tpunct\t_\t_\n\n";

const char* kComplement =
    "# sent_id = c\n"
    "1\tShe\tshe\tPRON\tPRP\t_\t2\tnsubj\t_\t_\n"
    "2\tbelieves\tbelieve\tVERB\tVBZ\t_\t0\troot\t_\t_\n"
    "3\tthat\tthat\tSCONJ\tIN\t_\t6\tmark\t_\t_\n"
    "4\the\the\tPRON\tPRP\t_\t6\tnsubj\t_\t_\n"
    "5\tis\tbe\tAUX\tVBZ\t_\t6\tcop\t_\t_\n"
    "6\thonest\thonest\tADJ\tJJ\t_\t2\tccomp\t_\t_\n\n";

const char* kDeterminer =
    "# sent_id = d\n"
    "1\tGive\tgive\tVERB\tVB\t_\t0\troot\t_\t_\n"
    "2\tme\tI\tPRON\tPRP\t_\t1\tiobj\t_\t_\n"
    "3\tthat\tthat\tDET\tDT\t_\t4\tdet\t_\t_\n"
    "4\tbook\tbook\tNOUN\tNN\t_\t1\tobj\t_\t_\n\n";

const char* kNoThat =
    "# sent_id = n\n"
    "1\tBooks\tbook\tNOUN\tNNS\t_\t2\tnsubj\t_\t_\n"
    "2\tmatter\tmatter\tVERB\tVBP\t_\t0\troot\t_\t_\n\n";

Corpus corpus_of(const std::vector<std::string>& docs) {
  Corpus c;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::string id = "doc" + std::to_string(i + 1);
    c.documents.push_back({id, parse_conllu(docs[i], id).sentences});
    c.source_order.push_back(id);
  }
  return c;
}

}  // namespace

TEST_CASE("relative that under acl:relcl becomes WPR") {
  const ReannotationOutcome out = reannotate_that(parse_one(kRelative));
  REQUIRE(out.edits.size() == 1);
  CHECK(out.edits[0] == Edit{3, "WDT", "WPR", "WPR-rule"});
  CHECK(out.sentence.tokens[2].xpos == "WPR");
}

TEST_CASE("complementizer that under ccomp becomes CST") {
  const ReannotationOutcome out = reannotate_that(parse_one(kComplement));
  REQUIRE(out.edits.size() == 1);
  CHECK(out.edits[0] == Edit{3, "IN", "CST", "CST-rule"});
}

TEST_CASE("determiner that is untouched") {
  const Sentence s = parse_one(kDeterminer);
  const ReannotationOutcome out = reannotate_that(s);
  CHECK(out.edits.empty());
  CHECK(out.sentence == s);
}

TEST_CASE("sentence without that serializes byte-identically") {
  const ReannotationOutcome out = reannotate_that(parse_one(kNoThat));
  CHECK(out.edits.empty());
  CHECK(serialize_conllu({out.sentence}) == kNoThat);
}

TEST_CASE("sentence-initial That is eligible") {
  std::string text = kRelative;
  text.replace(text.find("\tthat\tthat\t"), 11, "\tThat\tthat\t");
  CHECK(reannotate_that(parse_one(text)).edits.size() == 1);
}

TEST_CASE("dangling head skips the token with a warning") {
  std::string text = kRelative;
  text.replace(text.find("\t5\tobj"), 6, "\t9\tobj");
  std::vector<std::string> warnings;
  const ReannotationOutcome out = reannotate_that(parse_one(text), &warnings);
  CHECK(out.edits.empty());
  CHECK(warnings.size() == 1);
}

TEST_CASE("golden fixture labels are reproduced exactly") {
  const Corpus corpus = load_corpus(fixture_dir() / "annotated");
  const CorpusReannotation result = reannotate_corpus(corpus);

  std::set<std::tuple<std::string, std::string, int, std::string, std::string>> expected, actual;
  std::istringstream golden(read_file(fixture_dir() / "golden_labels.tsv"));
  std::string line;
  std::getline(golden, line);  // header
  while (std::getline(golden, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string doc, sent, id, old, label;
    std::getline(row, doc, '\t');
    std::getline(row, sent, '\t');
    std::getline(row, id, '\t');
    std::getline(row, old, '\t');
    std::getline(row, label, '\t');
    expected.emplace(doc, sent, std::stoi(id), old, label);
  }
  REQUIRE(expected.size() == 20);
  for (const auto& d : result.outcomes)
    for (const Edit& e : d.outcome.edits)
      actual.emplace(d.doc_id, d.outcome.sentence.sent_id, e.token_id, e.old_xpos, e.new_tag);
  CHECK(actual == expected);

  // Nothing but the XPOS of edited tokens changes.
  std::size_t changed = 0;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d)
    for (std::size_t s = 0; s < corpus.documents[d].sentences.size(); ++s) {
      const auto& before = corpus.documents[d].sentences[s].tokens;
      const auto& after = result.corpus.documents[d].sentences[s].tokens;
      REQUIRE(before.size() == after.size());
      for (std::size_t t = 0; t < before.size(); ++t) {
        Token a = after[t];
        if (a.xpos != before[t].xpos) {
          ++changed;
          a.xpos = before[t].xpos;
        }
        CHECK(a == before[t]);
      }
    }
  CHECK(changed == 20);
  CHECK(result.partition("WPR").size() == 10);
  CHECK(result.partition("CST").size() == 10);
}

TEST_CASE("corpus without that has no outcomes") {
  const CorpusReannotation r = reannotate_corpus(corpus_of({kNoThat, kNoThat}));
  CHECK(r.outcomes.empty());
}

TEST_CASE("single-sentence corpus matches reannotate_that") {
  const CorpusReannotation r = reannotate_corpus(corpus_of({kRelative}));
  const ReannotationOutcome direct = reannotate_that(parse_one(kRelative));
  REQUIRE(r.outcomes.size() == 1);
  CHECK(r.outcomes[0].outcome.edits == direct.edits);
  CHECK(r.outcomes[0].outcome.sentence == direct.sentence);
  CHECK(r.corpus.documents[0].sentences[0] == direct.sentence);
}

TEST_CASE("properties over random sentences: determinism, disjointness, conservativity, partition") {
  Rng rng(303);
  for (int i = 0; i < 300; ++i) {
    const std::string text = random_conllu(rng, 3);
    const Corpus corpus = corpus_of({text});
    const CorpusReannotation a = reannotate_corpus(corpus);
    const CorpusReannotation b = reannotate_corpus(corpus);
    CHECK(a.corpus == b.corpus);

    for (const Sentence& s : corpus.documents[0].sentences) {
      const ReannotationOutcome out = reannotate_that(s);
      std::set<int> edited;
      for (const Edit& e : out.edits) CHECK(edited.insert(e.token_id).second);
      for (const Token& t : s.tokens) {
        const bool wpr = relative_pronoun_rule().matches(s, t);
        const bool cst = complementizer_rule().matches(s, t);
        CHECK_FALSE((wpr && cst));
        if (to_lower_ascii(t.form) != "that") {
          CHECK_FALSE(wpr);
          CHECK_FALSE(cst);
          CHECK(out.sentence.tokens[t.id - 1] == t);
        }
      }
      if (out.edits.empty()) CHECK(serialize_conllu({out.sentence}) == serialize_conllu({s}));
    }

    const CorpusStats stats = compute_stats(corpus, a.outcomes);
    CHECK(stats.cst_count + stats.wpr_count == stats.reannotated_total);
  }
}

TEST_CASE("stats on the five-document fixture match the hand counts") {
  const Corpus corpus = load_corpus(fixture_dir() / "stats");
  REQUIRE(corpus.documents.size() == 5);
  const CorpusStats st = compute_stats(corpus, reannotate_corpus(corpus).outcomes);
  CHECK(st.total_that == 6);
  CHECK(st.wpr_count == 1);
  CHECK(st.cst_count == 2);
  CHECK(st.reannotated_total == 3);
  CHECK(st.acl_relations == 5);
  CHECK(st.acl_relcl_verbs_without_that == 1);
  REQUIRE(st.acl_left_to_right_fraction);
  CHECK(*st.acl_left_to_right_fraction == doctest::Approx(0.8).epsilon(1e-12));
  REQUIRE(st.acl_mean_parent_child_distance);
  CHECK(std::abs(*st.acl_mean_parent_child_distance - 2.2) <= 1e-9);
  REQUIRE(st.acl_pos_pair_fractions.size() == 2);
  CHECK(std::abs(st.acl_pos_pair_fractions.at({"NOUN", "VERB"}) - 0.8) <= 1e-9);
  CHECK(std::abs(st.acl_pos_pair_fractions.at({"PRON", "ADJ"}) - 0.2) <= 1e-9);
}

TEST_CASE("two acl relations at distances 3 and 1 average 2.0") {
  const char* far =
      "1\tclaims\tclaim\tNOUN\tNNS\t_\t0\troot\t_\t_\n"
      "2\tthat\tthat\tSCONJ\tIN\t_\t4\tmark\t_\t_\n"
      "3\tit\tit\tPRON\tPRP\t_\t4\tnsubj\t_\t_\n"
      "4\tworks\twork\tVERB\tVBZ\t_\t1\tacl\t_\t_\n\n";
  const char* near =
      "1\tpeople\tpeople\tNOUN\tNNS\t_\t0\troot\t_\t_\n"
      "2\tliving\tlive\tVERB\tVBG\t_\t1\tacl\t_\t_\n\n";
  const Corpus corpus = corpus_of({std::string(far) + near});
  const CorpusStats st = compute_stats(corpus, reannotate_corpus(corpus).outcomes);
  CHECK(st.acl_relations == 2);
  CHECK(std::abs(*st.acl_mean_parent_child_distance - 2.0) <= 1e-12);
  CHECK(*st.acl_left_to_right_fraction == 1.0);
  CHECK(st.cst_count == 1);
}

TEST_CASE("empty corpus stats are zero with fractions absent") {
  const CorpusStats st = compute_stats(Corpus{}, {});
  CHECK(st.total_that == 0);
  CHECK(st.reannotated_total == 0);
  CHECK_FALSE(st.acl_left_to_right_fraction);
  CHECK_FALSE(st.acl_mean_parent_child_distance);
  CHECK(st.acl_pos_pair_fractions.empty());
  const std::string json = stats_to_json(st);
  CHECK(json.find("acl_mean_parent_child_distance") == std::string::npos);
  CHECK(json.find("\"total_that\": 0") != std::string::npos);
}

TEST_CASE("display lists WPR then CST, numbered from 0") {
  const CorpusReannotation r = reannotate_corpus(corpus_of({kRelative, std::string(kComplement) + kComplement}));
  const std::string text = display_outcomes(r.outcomes, 10);
  const auto wpr = text.find("WPR");
  const auto cst = text.find("CST ");
  REQUIRE(wpr != std::string::npos);
  REQUIRE(cst != std::string::npos);
  CHECK(wpr < cst);
  CHECK(text.find("0 The book [that/WPR] I read was fascinating .") != std::string::npos);
  CHECK(text.find("0 She believes [that/CST] he is honest") != std::string::npos);
  CHECK(text.find("1 She believes [that/CST] he is honest") != std::string::npos);
  CHECK(text.find("1 The book") == std::string::npos);
}

TEST_CASE("display with limit 0 prints headers only") {
  const CorpusReannotation r = reannotate_corpus(corpus_of({kRelative, kComplement}));
  const std::string text = display_outcomes(r.outcomes, 0);
  CHECK(text.find("WPR") != std::string::npos);
  CHECK(text.find("CST") != std::string::npos);
  CHECK(text.find("[that/") == std::string::npos);
}

TEST_CASE("edit report columns") {
  const CorpusReannotation r = reannotate_corpus(corpus_of({kRelative}));
  CHECK(edits_tsv(r.outcomes) ==
        "doc_id\tsent_id\ttoken_id\told_xpos\tnew_tag\trule\n"
        "doc1\tr\t3\tWDT\tWPR\tWPR-rule\n");
}
