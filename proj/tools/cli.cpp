#include "cli.hpp"

#include <CLI11.hpp>
#include <functional>
#include <iostream>
#include <optional>

#include "pipeline_config.hpp"
#include "thattag/annotate.hpp"
#include "thattag/conllu.hpp"
#include "thattag/error.hpp"
#include "thattag/eval.hpp"
#include "thattag/fsutil.hpp"
#include "thattag/lexicon.hpp"
#include "thattag/reannotate.hpp"
#include "thattag/tagger.hpp"

namespace fs = std::filesystem;

namespace thattag {

namespace {

// Flag values that, when given, override config-file values.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> endpoint;
  std::optional<std::string> model_name;
  std::optional<std::string> sizes;
  std::optional<std::string> target;
  std::optional<std::string> open_class_file;
  std::optional<std::size_t> open_class_min_forms;
  std::optional<std::size_t> min_samples;
  std::optional<double> min_gain;
  std::optional<double> add_lambda;
  std::optional<std::size_t> suffix_length;
  std::optional<std::size_t> rare_threshold;
  std::optional<double> beam;
  std::optional<int> min_interval_ms;

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (config) apply_config_file(cfg, *config);
    if (endpoint) cfg.endpoint = *endpoint;
    if (model_name) cfg.model_name = *model_name;
    if (sizes) cfg.size_ladder = parse_size_list(*sizes);
    if (target) cfg.target_form = to_lower_ascii(*target);
    if (open_class_file) cfg.open_class_file = fs::path(*open_class_file);
    if (open_class_min_forms) cfg.open_class_min_forms = *open_class_min_forms;
    if (min_samples) cfg.params.min_samples = *min_samples;
    if (min_gain) cfg.params.min_gain = *min_gain;
    if (add_lambda) cfg.params.add_lambda = *add_lambda;
    if (suffix_length) cfg.params.suffix_length = *suffix_length;
    if (rare_threshold) cfg.params.rare_threshold = *rare_threshold;
    if (beam) cfg.beam = *beam;
    cfg.validate();
    return cfg;
  }
};

void add_config_flag(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Flat key=value config file (flags take precedence)")->check(CLI::ExistingFile);
}

void add_train_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--min-samples", o.min_samples, "Stop splitting nodes with fewer samples (default 2)");
  cmd->add_option("--min-gain", o.min_gain, "Stop splitting below this information gain in bits (default 1e-4)");
  cmd->add_option("--add-lambda", o.add_lambda, "Add-lambda smoothing constant (default 0.1)");
  cmd->add_option("--suffix-length", o.suffix_length, "Longest suffix in the unknown-word model (default 5)");
  cmd->add_option("--rare-threshold", o.rare_threshold, "Forms seen at most this often feed the suffix model (default 2)");
  cmd->add_option("--open-class-file", o.open_class_file, "File listing open-class tags, one per line")
      ->check(CLI::ExistingFile);
  cmd->add_option("--open-class-min-forms", o.open_class_min_forms,
                  "Infer open-class tags seen with at least this many forms (default 10)");
}

void add_beam_flag(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--beam", o.beam, "Prune Viterbi states this far (natural log) below the best; 0 = exact");
}

Lexicon lexicon_for(const TrainingFile& training, const PipelineConfig& cfg) {
  Lexicon lex = build_lexicon(training, cfg.open_class_min_forms);
  if (cfg.open_class_file) lex.open_class_tags = read_open_class_file(*cfg.open_class_file);
  return lex;
}

void write_output(const std::string& target, const std::string& content, std::ostream& out) {
  if (target == "-")
    out << content;
  else
    write_file_atomic(target, content);
}

// Stage bodies shared by the individual subcommands and `pipeline`.
int stage_annotate(const fs::path& in, const fs::path& out_dir, const PipelineConfig& cfg,
                   std::optional<int> min_interval_ms, std::ostream& out, std::ostream& err) {
  AnnotateRequest req;
  req.model = cfg.model_name;
  AnnotateOptions options;
  if (min_interval_ms) options.min_interval = std::chrono::milliseconds(std::max(0, *min_interval_ms));
  const AnnotateSummary s = annotate_directory(in, out_dir, req, cfg.endpoint, options);
  out << "annotate: " << s.files_done << " done, " << s.files_skipped << " skipped, " << s.files_failed.size()
      << " failed\n";
  for (const auto& [file, why] : s.files_failed) err << "  failed " << file << ": " << why << "\n";
  return s.files_failed.empty() ? kExitOk : kExitStageFailure;
}

void stage_reannotate(const fs::path& in, const fs::path& out_dir, const std::optional<std::string>& report,
                      std::optional<std::size_t> show, std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  const Corpus corpus = load_corpus(in, "*.conllu", &warnings);
  const CorpusReannotation result = reannotate_corpus(corpus);
  warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  for (const std::string& w : warnings) err << "warning: " << w << "\n";
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  for (const Document& doc : result.corpus.documents)
    write_file_atomic(out_dir / (doc.doc_id + ".conllu"), serialize_conllu(doc.sentences));
  if (report) write_output(*report, edits_tsv(result.outcomes), out);
  if (show) out << display_outcomes(result.outcomes, *show);
  std::size_t edits = 0;
  for (const auto& o : result.outcomes) edits += o.outcome.edits.size();
  err << "reannotate: " << result.corpus.documents.size() << " documents, " << edits << " edits\n";
}

void stage_export(const fs::path& in, const fs::path& out_dir, std::ostream& err) {
  const Corpus corpus = load_corpus(in);
  const std::size_t files = export_token_per_row(corpus, out_dir);
  err << "lexicon export: " << files << " files\n";
}

ScalingResult stage_experiment(const fs::path& tokens, const fs::path& reports, const fs::path& grouped,
                               const fs::path& models, const PipelineConfig& cfg, std::ostream& out) {
  ExperimentConfig ec;
  ec.token_dir = tokens;
  ec.wpr_test = cfg.wpr_test;
  ec.cst_test = cfg.cst_test;
  ec.sizes = cfg.size_ladder;
  ec.params = cfg.params;
  ec.grouped_dir = grouped;
  ec.models_dir = models;
  ec.open_class_file = cfg.open_class_file;
  ec.open_class_min_forms = cfg.open_class_min_forms;
  ec.target_form = cfg.target_form;
  ec.beam = cfg.beam;
  if (ec.wpr_test.empty() || ec.cst_test.empty())
    throw PreconditionError("experiment needs both a WPR and a CST test file");
  const ScalingResult result = run_scaling_experiment(ec);
  for (const fs::path& p : emit_plots(result, reports)) out << "wrote " << p.filename().string() << "\n";
  return result;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reannotation, training and evaluation toolchain for postnominal \"that\"", "thattag"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Overrides o;
  std::function<int()> action;

  // annotate
  std::string in_dir, out_dir;
  auto* annotate = app.add_subcommand("annotate", "Annotate raw .txt files through a UDPipe-compatible service");
  annotate->add_option("--in", in_dir, "Directory of raw .txt files (or .conllu files when offline)")->required();
  annotate->add_option("--out", out_dir, "Output directory for .conllu files")->required();
  annotate->add_option("--model", o.model_name, "Service model name (default english-ewt)");
  annotate->add_option("--endpoint", o.endpoint, "Service URL, or 'offline' to validate pre-annotated files");
  annotate->add_option("--min-interval-ms", o.min_interval_ms, "Minimum delay between requests (default 500)");
  add_config_flag(annotate, o);
  annotate->callback([&] {
    action = [&] { return stage_annotate(in_dir, out_dir, o.resolve(), o.min_interval_ms, out, err); };
  });

  // reannotate
  std::optional<std::string> report;
  std::optional<std::size_t> show;
  auto* reannotate = app.add_subcommand("reannotate", "Relabel \"that\" as WPR or CST in the XPOS column");
  reannotate->add_option("--in", in_dir, "Directory of annotated .conllu files")->required();
  reannotate->add_option("--out", out_dir, "Output directory for reannotated .conllu files")->required();
  reannotate->add_option("--report", report, "Write the edit list as TSV ('-' for standard output)");
  reannotate->add_option("--show", show, "Print up to N reannotated sentences per tag");
  reannotate->callback([&] {
    action = [&] {
      stage_reannotate(in_dir, out_dir, report, show, out, err);
      return kExitOk;
    };
  });

  // stats
  std::string json_out = "-";
  auto* stats = app.add_subcommand("stats", "Count \"that\" reannotations and acl relation statistics");
  stats->add_option("--in", in_dir, "Directory of annotated .conllu files")->required();
  stats->add_option("--json", json_out, "Output JSON file ('-' for standard output)");
  stats->callback([&] {
    action = [&] {
      const Corpus corpus = load_corpus(in_dir);
      const CorpusReannotation r = reannotate_corpus(corpus);
      write_output(json_out, stats_to_json(compute_stats(corpus, r.outcomes)), out);
      return kExitOk;
    };
  });

  // lexicon
  std::size_t concat_n = 0;
  std::string in_path, out_path;
  auto* lexicon = app.add_subcommand("lexicon", "Token-per-row export, first-n concatenation and lexicon building");
  lexicon->require_subcommand(1);
  auto* lex_export = lexicon->add_subcommand("export", "Write one form<TAB>tag file per document");
  lex_export->add_option("--in", in_dir, "Directory of reannotated .conllu files")->required();
  lex_export->add_option("--out", out_dir, "Output directory")->required();
  lex_export->callback([&] {
    action = [&] {
      stage_export(in_dir, out_dir, err);
      return kExitOk;
    };
  });
  auto* lex_concat = lexicon->add_subcommand("concat", "Concatenate the first n token-per-row files");
  lex_concat->add_option("--in", in_dir, "Directory of token-per-row files")->required();
  lex_concat->add_option("--n", concat_n, "Number of files")->required()->check(CLI::PositiveNumber);
  lex_concat->add_option("--out", out_path, "Output file, conventionally <n>.txt")->required();
  lex_concat->callback([&] {
    action = [&] {
      const std::size_t rows = concat_first_n(in_dir, concat_n, out_path);
      err << "lexicon concat: " << rows << " rows\n";
      return kExitOk;
    };
  });
  auto* lex_build = lexicon->add_subcommand("build", "Build a form<TAB>tag<TAB>count lexicon from a training file");
  lex_build->add_option("--in", in_path, "Token-per-row training file")->required()->check(CLI::ExistingFile);
  lex_build->add_option("--out", out_path, "Lexicon file ('-' for standard output)")->required();
  lex_build->callback([&] {
    action = [&] {
      const Lexicon lex = build_lexicon(read_token_file(in_path));
      write_output(out_path, format_lexicon(lex), out);
      return kExitOk;
    };
  });

  // train
  std::string training_path, lexicon_path, model_path;
  auto* train_cmd = app.add_subcommand("train", "Train a decision-tree trigram tagger");
  train_cmd->add_option("--training", training_path, "Token-per-row training file")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--lexicon", lexicon_path, "Lexicon file")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", model_path, "Model output path")->required();
  add_train_flags(train_cmd, o);
  add_config_flag(train_cmd, o);
  train_cmd->callback([&] {
    action = [&] {
      const PipelineConfig cfg = o.resolve();
      const TrainingFile training = read_token_file(training_path);
      Lexicon lex = parse_lexicon(read_file(lexicon_path), cfg.open_class_min_forms);
      if (cfg.open_class_file) lex.open_class_tags = read_open_class_file(*cfg.open_class_file);
      const TaggerModel model = train(training, lex, cfg.params);
      save_model(model, model_path);
      err << "train: " << model.tagset().real_size() << " tags, " << model.context().nodes.size()
          << " tree nodes, " << model.lexical().size() << " forms\n";
      return kExitOk;
    };
  });

  // tag
  auto* tag_cmd = app.add_subcommand("tag", "Tag a one-token-per-line file");
  tag_cmd->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  tag_cmd->add_option("--in", in_path, "Input tokens (extra columns are ignored)")->required()->check(CLI::ExistingFile);
  tag_cmd->add_option("--out", out_path, "Output form<TAB>tag file")->required();
  add_beam_flag(tag_cmd, o);
  tag_cmd->callback([&] {
    action = [&] {
      const PipelineConfig cfg = o.resolve();
      tag_file(load_model(model_path), in_path, out_path, cfg.beam);
      return kExitOk;
    };
  });

  // eval
  std::string gold_path, pred_path, model_label = "model";
  std::optional<std::string> tsv_out;
  auto* eval_cmd = app.add_subcommand("eval", "Per-tag precision/recall/F1 restricted to one word form");
  eval_cmd->add_option("--gold", gold_path, "Gold token-per-row file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--pred", pred_path, "Predicted token-per-row file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--target", o.target, "Word form to evaluate (default that)");
  eval_cmd->add_option("--tsv", tsv_out, "Also write the table as TSV ('-' for standard output)");
  eval_cmd->add_option("--name", model_label, "Model name shown in the table");
  add_config_flag(eval_cmd, o);
  eval_cmd->callback([&] {
    action = [&] {
      const PipelineConfig cfg = o.resolve();
      const EvalReport report = evaluate(read_token_file(gold_path), read_token_file(pred_path), cfg.target_form);
      const ComparisonTable table = comparison_table({{model_label, report}});
      out << table.text;
      out << "target rows: " << report.token_count << ", token accuracy: " << report.all_correct << "/"
          << report.all_rows << "\n";
      if (tsv_out) write_output(*tsv_out, table.tsv, out);
      return kExitOk;
    };
  });

  // experiment
  std::optional<std::string> grouped_dir, models_dir, wpr_test, cst_test;
  std::string tokens_dir, reports_dir;
  auto* experiment = app.add_subcommand("experiment", "Train at each ladder size and evaluate WPR/CST");
  experiment->add_option("--tokens", tokens_dir, "Directory of token-per-row files")->required();
  experiment->add_option("--wpr-test", wpr_test, "Gold WPR test file");
  experiment->add_option("--cst-test", cst_test, "Gold CST test file");
  experiment->add_option("--sizes", o.sizes, "Comma-separated size ladder (default 10,30,100,200,300,500)");
  experiment->add_option("--out", reports_dir, "Report directory (scaling.csv and charts)")->required();
  experiment->add_option("--grouped", grouped_dir, "Directory for grouped training files (default <out>/grouped)");
  experiment->add_option("--models", models_dir, "Directory for models (default <out>/models)");
  experiment->add_option("--target", o.target, "Word form to evaluate (default that)");
  add_train_flags(experiment, o);
  add_beam_flag(experiment, o);
  add_config_flag(experiment, o);
  experiment->callback([&] {
    action = [&] {
      PipelineConfig cfg = o.resolve();
      if (wpr_test) cfg.wpr_test = *wpr_test;
      if (cst_test) cfg.cst_test = *cst_test;
      const fs::path reports = reports_dir;
      stage_experiment(tokens_dir, reports, grouped_dir ? fs::path(*grouped_dir) : reports / "grouped",
                       models_dir ? fs::path(*models_dir) : reports / "models", cfg, out);
      return kExitOk;
    };
  });

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "annotate -> reannotate -> lexicon export -> experiment");
  pipeline->add_option("--endpoint", o.endpoint, "Service URL or 'offline'");
  pipeline->add_option("--model", o.model_name, "Service model name");
  pipeline->add_option("--sizes", o.sizes, "Comma-separated size ladder");
  pipeline->add_option("--target", o.target, "Word form to evaluate");
  pipeline->add_option("--min-interval-ms", o.min_interval_ms, "Minimum delay between service requests");
  add_train_flags(pipeline, o);
  add_beam_flag(pipeline, o);
  add_config_flag(pipeline, o);
  pipeline->callback([&] {
    action = [&] {
      const PipelineConfig cfg = o.resolve();
      if (int rc = stage_annotate(cfg.raw_dir, cfg.annotated_dir, cfg, o.min_interval_ms, out, err); rc != kExitOk)
        return rc;
      stage_reannotate(cfg.annotated_dir, cfg.reannotated_dir, (cfg.reports_dir / "edits.tsv").string(),
                       std::nullopt, out, err);
      stage_export(cfg.reannotated_dir, cfg.token_dir, err);
      stage_experiment(cfg.token_dir, cfg.reports_dir, cfg.grouped_dir, cfg.models_dir, cfg, out);
      return kExitOk;
    };
  });

  std::vector<std::string> argv_storage{"thattag"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitStageFailure;
  }
}

}  // namespace thattag
