#include <doctest.h>

#include <array>
#include <cctype>
#include <map>
#include <set>

#include "generators.hpp"
#include "test_support.hpp"
#include "thattag/error.hpp"
#include "thattag/eval.hpp"

using namespace thattag;
using namespace thattag::testing;

namespace {

TrainingFile file_of(const std::vector<std::pair<std::string, std::string>>& rows) {
  TrainingFile f;
  for (const auto& [form, tag] : rows) f.rows.push_back({form, tag});
  f.sentence_breaks.push_back(f.rows.size());
  return f;
}

// Confusion matrix recount, independent of evaluate.
std::map<std::string, std::array<std::size_t, 3>> naive_counts(const TrainingFile& gold, const TrainingFile& pred,
                                                               const std::string& target) {
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;
  std::set<std::string> tags;
  for (std::size_t i = 0; i < gold.rows.size(); ++i) {
    std::string lower = gold.rows[i].form;
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower != target) continue;
    ++confusion[{gold.rows[i].tag, pred.rows[i].tag}];
    tags.insert(gold.rows[i].tag);
    tags.insert(pred.rows[i].tag);
  }
  std::map<std::string, std::array<std::size_t, 3>> out;
  for (const std::string& t : tags) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& [cell, n] : confusion) {
      if (cell.first == t && cell.second == t) tp += n;
      if (cell.first != t && cell.second == t) fp += n;
      if (cell.first == t && cell.second != t) fn += n;
    }
    out[t] = {tp, fp, fn};
  }
  return out;
}

}  // namespace

TEST_CASE("identical files score 1 everywhere") {
  const TrainingFile f = file_of({{"that", "WPR"}, {"that", "CST"}, {"book", "NN"}, {"That", "WPR"}});
  const EvalReport r = evaluate(f, f, "that");
  CHECK(r.token_count == 3);
  REQUIRE(r.per_tag.size() == 2);
  for (const auto& [tag, m] : r.per_tag) {
    CHECK(*m.precision == 1.0);
    CHECK(*m.recall == 1.0);
    CHECK(*m.f1 == 1.0);
  }
}

TEST_CASE("a gold tag never predicted has N/A precision and zero recall") {
  const EvalReport r = evaluate(file_of({{"that", "CST"}, {"that", "CST"}}),
                                file_of({{"that", "WPR"}, {"that", "WPR"}}), "that");
  const TagMetrics cst = r.metrics_for("CST");
  CHECK_FALSE(cst.precision);
  REQUIRE(cst.recall);
  CHECK(*cst.recall == 0.0);
  CHECK_FALSE(cst.f1);
  CHECK(format_metric(cst.precision) == "N/A");
  const TagMetrics wpr = r.metrics_for("WPR");
  CHECK(*wpr.precision == 0.0);
  CHECK_FALSE(wpr.recall);
}

TEST_CASE("DT example: six of ten correct, four predicted as IN") {
  std::vector<std::pair<std::string, std::string>> gold(10, {"that", "DT"}), pred;
  for (int i = 0; i < 6; ++i) pred.push_back({"that", "DT"});
  for (int i = 0; i < 4; ++i) pred.push_back({"that", "IN"});
  const TagMetrics dt = evaluate(file_of(gold), file_of(pred), "that").metrics_for("DT");
  CHECK(dt.tp == 6);
  CHECK(dt.fp == 0);
  CHECK(dt.fn == 4);
  CHECK(*dt.precision == doctest::Approx(1.0));
  CHECK(*dt.recall == doctest::Approx(0.6));
  CHECK(*dt.f1 == doctest::Approx(0.75));
}

TEST_CASE("misaligned files raise AlignmentError") {
  CHECK_THROWS_AS(evaluate(file_of({{"that", "A"}}), file_of({{"this", "A"}}), "that"), AlignmentError);
  CHECK_THROWS_AS(evaluate(file_of({{"that", "A"}}), file_of({{"that", "A"}, {"x", "B"}}), "that"), AlignmentError);
}

TEST_CASE("evaluate matches a naive confusion-matrix recount") {
  Rng rng(808);
  for (int i = 0; i < 300; ++i) {
    const auto [gold, pred] = random_eval_pair(rng, "that");
    const EvalReport r = evaluate(gold, pred, "that");
    const auto expected = naive_counts(gold, pred, "that");
    REQUIRE(r.per_tag.size() == expected.size());
    for (const auto& [tag, c] : expected) {
      const TagMetrics& m = r.per_tag.at(tag);
      CHECK(m.tp == c[0]);
      CHECK(m.fp == c[1]);
      CHECK(m.fn == c[2]);
    }
  }
}

TEST_CASE("rows with other forms never change counts") {
  Rng rng(909);
  for (int i = 0; i < 200; ++i) {
    auto [gold, pred] = random_eval_pair(rng, "that");
    const EvalReport before = evaluate(gold, pred, "that");
    for (std::size_t k = 0; k < gold.rows.size(); ++k)
      if (to_lower_ascii(gold.rows[k].form) != "that") pred.rows[k].tag = rng.coin() ? "ZZ" : gold.rows[k].tag;
    gold.rows.push_back({"other", "NN"});
    pred.rows.push_back({"other", "VB"});
    const EvalReport after = evaluate(gold, pred, "that");
    CHECK(after.per_tag == before.per_tag);
  }
}

TEST_CASE("F1 bounds") {
  for (std::size_t tp = 0; tp < 8; ++tp)
    for (std::size_t fp = 0; fp < 8; ++fp)
      for (std::size_t fn = 0; fn < 8; ++fn) {
        const TagMetrics m = compute_metrics(tp, fp, fn);
        if (!m.f1) continue;
        CHECK(*m.f1 >= 0.0);
        CHECK(*m.f1 <= 1.0);
        CHECK(*m.f1 <= std::max(*m.precision, *m.recall) + 1e-15);
        CHECK((*m.f1 == 1.0) == (*m.precision == 1.0 && *m.recall == 1.0));
      }
}

TEST_CASE("comparison table") {
  const TrainingFile g = file_of({{"that", "DT"}});
  const EvalReport r = evaluate(g, g, "that");
  const ComparisonTable one = comparison_table({{"m1", r}});
  CHECK(one.tsv == "model\tcategory\tprecision\trecall\tf1\nm1\tDT\t1.0000\t1.0000\t1.0000\n");

  const EvalReport na = evaluate(file_of({{"that", "CST"}}), file_of({{"that", "WPR"}}), "that");
  CHECK(comparison_table({{"m", na}}).tsv.find("m\tCST\tN/A\t0.0000\tN/A") != std::string::npos);

  const ComparisonTable two = comparison_table({{"m1", r}, {"m2", r}});
  CHECK(two.tsv.find("m1\tDT") != std::string::npos);
  CHECK(two.tsv.find("m2\tDT") != std::string::npos);
  CHECK(two.text.find("m1") < two.text.find("m2"));
  CHECK_THROWS_AS(comparison_table({}), PreconditionError);
}
