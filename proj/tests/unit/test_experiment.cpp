#include <doctest.h>

#include <algorithm>

#include "fixture_corpus.hpp"
#include "test_support.hpp"
#include "thattag/error.hpp"
#include "thattag/eval.hpp"
#include "thattag/fsutil.hpp"

using namespace thattag;
using namespace thattag::testing;

namespace {

ExperimentConfig fixture_config(const TempDir& dir, std::vector<std::size_t> sizes) {
  export_fixture_tokens(dir / "tokens");
  ExperimentConfig cfg;
  cfg.token_dir = dir / "tokens";
  cfg.wpr_test = fixture_dir() / "testsets" / "wpr_test.txt";
  cfg.cst_test = fixture_dir() / "testsets" / "cst_test.txt";
  cfg.sizes = std::move(sizes);
  cfg.grouped_dir = dir / "grouped";
  cfg.models_dir = dir / "models";
  return cfg;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("default ladder") {
  CHECK(kDefaultSizeLadder == std::vector<std::size_t>{10, 30, 100, 200, 300, 500});
  CHECK(ExperimentConfig{}.sizes == kDefaultSizeLadder);
}

TEST_CASE("ladder validation") {
  CHECK_NOTHROW(check_size_ladder({1, 2, 3}));
  CHECK_THROWS_AS(check_size_ladder({}), PreconditionError);
  CHECK_THROWS_AS(check_size_ladder({0, 1}), PreconditionError);
  CHECK_THROWS_AS(check_size_ladder({5, 5}), PreconditionError);
  CHECK_THROWS_AS(check_size_ladder({5, 3}), PreconditionError);
}

TEST_CASE("single-size run on the fixture corpus") {
  TempDir dir;
  const ScalingResult r = run_scaling_experiment(fixture_config(dir, {10}));
  REQUIRE(r.points.size() == 1);
  const ScalingPoint& p = r.points[0];
  CHECK(p.n_files == 10);
  CHECK(p.files_used == 10);
  CHECK(p.tokens_trained > 0);
  CHECK(std::filesystem::exists(dir / "grouped" / "10.txt"));
  CHECK(std::filesystem::exists(dir / "models" / "model_10.ttm"));
  // Correct instances are the tp count at that tag.
  CHECK(p.wpr.tp + p.wpr.fn == 20);
  CHECK(p.cst.tp + p.cst.fn == 20);

  const std::string csv = scaling_csv(r);
  CHECK(line_count(csv) == 1 + 2);
  CHECK(csv.rfind("n_files,tag,tp,fp,fn,precision,recall,f1\n", 0) == 0);
  CHECK(csv.find("\n10,WPR," + std::to_string(p.wpr.tp) + ",") != std::string::npos);
}

TEST_CASE("CSV rows scale with the ladder and runs are deterministic") {
  TempDir a, b;
  const ScalingResult ra = run_scaling_experiment(fixture_config(a, {2, 5, 10}));
  const ScalingResult rb = run_scaling_experiment(fixture_config(b, {2, 5, 10}));
  CHECK(line_count(scaling_csv(ra)) == 1 + 3 * 2);
  CHECK(scaling_csv(ra) == scaling_csv(rb));
  CHECK(read_file(a / "models" / "model_5.ttm") == read_file(b / "models" / "model_5.ttm"));
}

TEST_CASE("plots are written and labeled") {
  TempDir dir;
  const ScalingResult r = run_scaling_experiment(fixture_config(dir, {3}));
  const auto written = emit_plots(r, dir / "reports");
  CHECK(written.size() == 4);
  for (const char* name : {"scaling.csv", "wpr.svg", "cst.svg", "cross.svg"})
    CHECK(std::filesystem::exists(dir / "reports" / name));
  const std::string wpr = read_file(dir / "reports" / "wpr.svg");
  CHECK(wpr.find("<svg") != std::string::npos);
  CHECK(wpr.find("n_files") != std::string::npos);
  CHECK(wpr.find("recall") != std::string::npos);
  CHECK(wpr.find("<circle") != std::string::npos);
  CHECK(read_file(dir / "reports" / "cst.svg").find("correct instances") != std::string::npos);
}

TEST_CASE("charts handle degenerate input") {
  CHECK_NOTHROW(render_line_chart("t", "x", "y", {}));
  const std::string one = render_line_chart("t", "x", "y", {{"s", "#000", {{1.0, 0.5}}}});
  CHECK(std::count(one.begin(), one.end(), '\n') > 0);
  CHECK(one.find("<circle") != std::string::npos);
  const std::string same = render_line_chart("t", "x", "y", {{"s", "#000", {{1.0, 0.5}, {1.0, 0.5}}}});
  CHECK(same.find("nan") == std::string::npos);
}

TEST_CASE("undefined metrics are written as N/A") {
  ScalingResult r;
  ScalingPoint p;
  p.n_files = 1;
  p.wpr = compute_metrics(0, 0, 3);
  p.cst = compute_metrics(0, 0, 0);
  r.points.push_back(p);
  const std::string csv = scaling_csv(r);
  CHECK(csv.find("1,WPR,0,0,3,N/A,0.0000,N/A") != std::string::npos);
  CHECK(csv.find("1,CST,0,0,0,N/A,N/A,N/A") != std::string::npos);
}

TEST_CASE("failures name the ladder size") {
  TempDir dir;
  ExperimentConfig cfg = fixture_config(dir, {2});
  cfg.token_dir = dir / "empty";
  std::filesystem::create_directories(cfg.token_dir);
  try {
    run_scaling_experiment(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("size 2") != std::string::npos);
  }
}
