#include <cstdio>
#include <future>
#include <optional>

#include "thattag/error.hpp"
#include "thattag/eval.hpp"
#include "thattag/fsutil.hpp"
#include "thattag/reannotate.hpp"

namespace fs = std::filesystem;

namespace thattag {

namespace {

std::size_t count_files(const fs::path& dir, std::size_t n) {
  const std::size_t available = list_files(dir, "*.txt").size();
  return std::min(n, available);
}

ScalingPoint run_one_size(const ExperimentConfig& cfg, std::size_t n, const TrainingFile& wpr_gold,
                          const TrainingFile& cst_gold) {
  ScalingPoint point;
  point.n_files = n;
  point.files_used = count_files(cfg.token_dir, n);

  const std::string tag = std::to_string(n);
  const fs::path grouped = cfg.grouped_dir / (tag + ".txt");
  point.tokens_trained = concat_first_n(cfg.token_dir, n, grouped);

  const TrainingFile training = read_token_file(grouped);
  if (training.rows.empty()) throw EmptyTraining();
  Lexicon lexicon = build_lexicon(training, cfg.open_class_min_forms);
  if (cfg.open_class_file) lexicon.open_class_tags = read_open_class_file(*cfg.open_class_file);
  write_file_atomic(cfg.grouped_dir / ("lexicon_" + tag + ".txt"), format_lexicon(lexicon));

  const TaggerModel model = train(training, lexicon, cfg.params);
  save_model(model, cfg.models_dir / ("model_" + tag + ".ttm"));

  const TrainingFile wpr_pred = tag_file(model, wpr_gold, cfg.beam);
  const TrainingFile cst_pred = tag_file(model, cst_gold, cfg.beam);
  write_file_atomic(cfg.models_dir / ("wpr_tagged_" + tag + ".txt"), format_token_rows(wpr_pred));
  write_file_atomic(cfg.models_dir / ("cst_tagged_" + tag + ".txt"), format_token_rows(cst_pred));

  point.wpr = evaluate(wpr_gold, wpr_pred, cfg.target_form).metrics_for(kRelativePronounTag);
  point.cst = evaluate(cst_gold, cst_pred, cfg.target_form).metrics_for(kComplementizerTag);
  return point;
}

}  // namespace

void check_size_ladder(const std::vector<std::size_t>& sizes) {
  if (sizes.empty()) throw PreconditionError("size ladder is empty");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw PreconditionError("size ladder entries must be >= 1");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw PreconditionError("size ladder must be strictly increasing");
  }
}

ScalingResult run_scaling_experiment(const ExperimentConfig& cfg) {
  check_size_ladder(cfg.sizes);
  if (cfg.target_form.empty()) throw PreconditionError("target form is empty");
  const TrainingFile wpr_gold = read_token_file(cfg.wpr_test);
  const TrainingFile cst_gold = read_token_file(cfg.cst_test);

  std::error_code ec;
  fs::create_directories(cfg.grouped_dir, ec);
  fs::create_directories(cfg.models_dir, ec);

  // Sizes touch disjoint files, so they run concurrently; results are merged
  // in ladder order and the first failing size (in that order) is reported.
  std::vector<std::future<ScalingPoint>> pending;
  for (std::size_t n : cfg.sizes)
    pending.push_back(std::async(std::launch::async, [&cfg, n, &wpr_gold, &cst_gold] {
      return run_one_size(cfg, n, wpr_gold, cst_gold);
    }));

  ScalingResult result;
  std::optional<Error> failure;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      result.points.push_back(pending[i].get());
    } catch (const Error& e) {
      if (!failure) failure.emplace("experiment size " + std::to_string(cfg.sizes[i]) + ": " + e.what());
    }
  }
  if (failure) throw *failure;
  return result;
}

std::string scaling_csv(const ScalingResult& result) {
  std::string out = "n_files,tag,tp,fp,fn,precision,recall,f1\n";
  for (const ScalingPoint& p : result.points) {
    for (const auto& [tag, m] : {std::pair<const char*, const TagMetrics&>{kRelativePronounTag, p.wpr},
                                 std::pair<const char*, const TagMetrics&>{kComplementizerTag, p.cst}}) {
      out += std::to_string(p.n_files) + ',' + tag + ',' + std::to_string(m.tp) + ',' + std::to_string(m.fp) + ',' +
             std::to_string(m.fn) + ',' + format_metric(m.precision) + ',' + format_metric(m.recall) + ',' +
             format_metric(m.f1) + '\n';
    }
  }
  return out;
}

std::vector<fs::path> emit_plots(const ScalingResult& result, const fs::path& out_dir) {
  if (result.points.empty()) throw PreconditionError("emit_plots needs at least one point");
  ChartSeries wpr_recall{"WPR recall", "#1f77b4", {}};
  ChartSeries cst_recall{"CST recall", "#d62728", {}};
  ChartSeries cst_tp{"CST correct instances", "#d62728", {}};
  for (const ScalingPoint& p : result.points) {
    const auto x = static_cast<double>(p.n_files);
    wpr_recall.points.emplace_back(x, p.wpr.recall.value_or(0.0));
    cst_recall.points.emplace_back(x, p.cst.recall.value_or(0.0));
    cst_tp.points.emplace_back(x, static_cast<double>(p.cst.tp));
  }

  std::vector<fs::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    write_file_atomic(out_dir / name, content);
    written.push_back(out_dir / name);
  };
  put("scaling.csv", scaling_csv(result));
  put("wpr.svg", render_line_chart("WPR accuracy by training size", "n_files", "recall", {wpr_recall}));
  put("cst.svg", render_line_chart("CST correct instances by training size", "n_files", "correct instances (tp)",
                                   {cst_tp}));
  put("cross.svg",
      render_line_chart("WPR vs CST accuracy by training size", "n_files", "recall", {wpr_recall, cst_recall}));
  return written;
}

}  // namespace thattag
