#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thattag/lexicon.hpp"
#include "thattag/tagger.hpp"

namespace thattag {

// Undefined metrics (zero denominators) are empty and render as "N/A".
struct TagMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;

  bool defined() const { return precision && recall && f1; }
  bool operator==(const TagMetrics&) const = default;
};

TagMetrics compute_metrics(std::size_t tp, std::size_t fp, std::size_t fn);

struct EvalReport {
  std::string target_form;
  std::map<std::string, TagMetrics> per_tag;
  std::size_t token_count = 0;  // rows whose form matched the target
  // Auxiliary whole-file token accuracy.
  std::size_t all_rows = 0;
  std::size_t all_correct = 0;

  // Zero counts with undefined metrics when the tag never occurred.
  TagMetrics metrics_for(const std::string& tag) const;
};

// Counts are restricted to rows whose lowercased form equals target_form
// (itself compared lowercased). Throws AlignmentError on the first row
// where the two files disagree on the form, or on a length mismatch.
EvalReport evaluate(const TrainingFile& gold, const TrainingFile& predicted, std::string_view target_form);

struct ComparisonTable {
  std::string text;
  std::string tsv;
};

ComparisonTable comparison_table(const std::vector<std::pair<std::string, EvalReport>>& reports);

std::string format_metric(const std::optional<double>& value);

struct ScalingPoint {
  std::size_t n_files = 0;
  std::size_t files_used = 0;
  std::size_t tokens_trained = 0;
  TagMetrics wpr;  // WPR on the WPR test set
  TagMetrics cst;  // CST on the CST test set
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
};

inline const std::vector<std::size_t> kDefaultSizeLadder = {10, 30, 100, 200, 300, 500};

struct ExperimentConfig {
  std::filesystem::path token_dir;
  std::filesystem::path wpr_test;
  std::filesystem::path cst_test;
  std::vector<std::size_t> sizes = kDefaultSizeLadder;
  TrainParams params;
  std::filesystem::path grouped_dir;  // receives <n>.txt and lexicon_<n>.txt
  std::filesystem::path models_dir;   // receives model_<n>.ttm and the tagged test files
  std::optional<std::filesystem::path> open_class_file;
  std::size_t open_class_min_forms = kDefaultOpenClassMinForms;
  std::string target_form = "that";
  double beam = kNoBeam;
};

// Throws PreconditionError unless the ladder is strictly increasing and >= 1.
void check_size_ladder(const std::vector<std::size_t>& sizes);

// For each size: concat_first_n -> build_lexicon -> train -> tag both test
// sets -> evaluate. Stage failures are rethrown annotated with the size.
ScalingResult run_scaling_experiment(const ExperimentConfig& config);

// n_files,tag,tp,fp,fn,precision,recall,f1
std::string scaling_csv(const ScalingResult& result);

// Writes scaling.csv, wpr.svg, cst.svg and cross.svg into out_dir.
std::vector<std::filesystem::path> emit_plots(const ScalingResult& result, const std::filesystem::path& out_dir);

struct ChartSeries {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

std::string render_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<ChartSeries>& series);

}  // namespace thattag
