#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "cli.hpp"
#include "pipeline_config.hpp"
#include "test_support.hpp"
#include "thattag/error.hpp"
#include "thattag/fsutil.hpp"

using namespace thattag;
using namespace thattag::testing;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

void copy_fixtures(const std::filesystem::path& to) {
  std::filesystem::copy(fixture_dir(), to, std::filesystem::copy_options::recursive);
}

}  // namespace

TEST_CASE("stats prints JSON on standard output") {
  const Run r = run({"stats", "--in", (fixture_dir() / "annotated").string(), "--json", "-"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"total_that\"") != std::string::npos);
  CHECK(r.out.find("\"wpr_count\": 10") != std::string::npos);
  CHECK(r.out.find("\"cst_count\": 10") != std::string::npos);
}

TEST_CASE("unknown subcommand is a usage error with synopsis") {
  const Run r = run({"frobnicate"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"stats"}).code == 1);
  CHECK(run({"stats", "--in", "x", "--bogus"}).code == 1);
}

TEST_CASE("every subcommand has help listing its flags") {
  const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> cases = {
      {{"annotate"}, {"--in", "--out", "--model", "--endpoint", "--config", "--min-interval-ms"}},
      {{"reannotate"}, {"--in", "--out", "--report", "--show"}},
      {{"stats"}, {"--in", "--json"}},
      {{"lexicon"}, {"export", "concat", "build"}},
      {{"lexicon", "export"}, {"--in", "--out"}},
      {{"lexicon", "concat"}, {"--in", "--n", "--out"}},
      {{"lexicon", "build"}, {"--in", "--out"}},
      {{"train"},
       {"--training", "--lexicon", "--out", "--min-samples", "--min-gain", "--add-lambda", "--suffix-length",
        "--rare-threshold", "--open-class-file", "--open-class-min-forms", "--config"}},
      {{"tag"}, {"--model", "--in", "--out", "--beam"}},
      {{"eval"}, {"--gold", "--pred", "--target", "--tsv", "--name"}},
      {{"experiment"}, {"--tokens", "--wpr-test", "--cst-test", "--sizes", "--out", "--grouped", "--models"}},
      {{"pipeline"}, {"--config", "--endpoint", "--sizes"}},
  };
  for (const auto& [cmd, flags] : cases) {
    std::vector<std::string> args = cmd;
    args.push_back("--help");
    const Run r = run(args);
    CAPTURE(cmd[0]);
    CHECK(r.code == 0);
    for (const std::string& f : flags) CHECK(r.out.find(f) != std::string::npos);
  }
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("stage failures exit 2") {
  TempDir dir;
  write_file_atomic(dir / "in" / "bad.conllu", "1\tthe\n");
  CHECK(run({"reannotate", "--in", (dir / "in").string(), "--out", (dir / "out").string()}).code == 2);
}

TEST_CASE("train, tag and eval through the command line") {
  TempDir dir;
  const std::string wpr = (fixture_dir() / "testsets" / "wpr_test.txt").string();
  REQUIRE(run({"lexicon", "build", "--in", wpr, "--out", (dir / "lex.txt").string()}).code == 0);
  REQUIRE(run({"train", "--training", wpr, "--lexicon", (dir / "lex.txt").string(), "--out",
               (dir / "m.ttm").string(), "--open-class-min-forms", "3"})
              .code == 0);
  REQUIRE(run({"tag", "--model", (dir / "m.ttm").string(), "--in", wpr, "--out", (dir / "tagged.txt").string()})
              .code == 0);
  const Run e = run({"eval", "--gold", wpr, "--pred", (dir / "tagged.txt").string(), "--tsv", "-", "--name", "tt"});
  CHECK(e.code == 0);
  CHECK(e.out.find("tt\tWPR\t") != std::string::npos);
}

TEST_CASE("config precedence: flags over file over defaults") {
  TempDir dir;
  write_file_atomic(dir / "c.conf", "size_ladder = 3,4\nmin_gain = 0.5\nwpr_test = w.txt\n# comment\n\n");
  PipelineConfig cfg;
  CHECK(cfg.size_ladder == kDefaultSizeLadder);
  CHECK(cfg.params.min_gain == 1e-4);
  apply_config_file(cfg, dir / "c.conf");
  CHECK(cfg.size_ladder == std::vector<std::size_t>{3, 4});
  CHECK(cfg.params.min_gain == 0.5);
  CHECK(cfg.wpr_test == dir / "w.txt");
  CHECK_THROWS_AS(apply_config_text(cfg, "nonsense = 1\n", dir.path()), PreconditionError);
  CHECK_THROWS_AS(apply_config_text(cfg, "size_ladder = 3,x\n", dir.path()), PreconditionError);

  // The flag wins over the file: sizes 1 only gives two CSV rows.
  TempDir work;
  copy_fixtures(work / "fx");
  const std::string conf = (work / "fx" / "pipeline.conf").string();
  const Run r = run({"pipeline", "--config", conf, "--sizes", "1"});
  REQUIRE(r.code == 0);
  const std::string csv = read_file(work / "fx" / "run" / "reports" / "scaling.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("pipeline with the shipped config creates the scaling report") {
  TempDir work;
  copy_fixtures(work / "fx");
  const Run r = run({"pipeline", "--config", (work / "fx" / "pipeline.conf").string()});
  CHECK(r.code == 0);
  const auto reports = work / "fx" / "run" / "reports";
  CHECK(std::filesystem::exists(reports / "scaling.csv"));
  CHECK(std::filesystem::exists(reports / "edits.tsv"));
  CHECK(std::filesystem::exists(reports / "cross.svg"));
}
