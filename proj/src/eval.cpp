#include "thattag/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "thattag/error.hpp"

namespace thattag {

TagMetrics compute_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  TagMetrics m{tp, fp, fn, std::nullopt, std::nullopt, std::nullopt};
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision && m.recall) {
    const double p = *m.precision;
    const double r = *m.recall;
    m.f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return m;
}

TagMetrics EvalReport::metrics_for(const std::string& tag) const {
  auto it = per_tag.find(tag);
  return it == per_tag.end() ? compute_metrics(0, 0, 0) : it->second;
}

EvalReport evaluate(const TrainingFile& gold, const TrainingFile& predicted, std::string_view target_form) {
  const std::string target = to_lower_ascii(target_form);
  const std::size_t common = std::min(gold.rows.size(), predicted.rows.size());
  for (std::size_t i = 0; i < common; ++i)
    if (gold.rows[i].form != predicted.rows[i].form)
      throw AlignmentError(i, "gold form '" + gold.rows[i].form + "' vs predicted form '" + predicted.rows[i].form +
                                  "'");
  if (gold.rows.size() != predicted.rows.size())
    throw AlignmentError(common, "gold has " + std::to_string(gold.rows.size()) + " rows, predicted has " +
                                     std::to_string(predicted.rows.size()));

  EvalReport report;
  report.target_form = target;
  report.all_rows = gold.rows.size();
  std::map<std::string, std::size_t> tp, fp, fn;
  std::set<std::string> tags;
  for (std::size_t i = 0; i < gold.rows.size(); ++i) {
    const std::string& g = gold.rows[i].tag;
    const std::string& p = predicted.rows[i].tag;
    if (g == p) ++report.all_correct;
    if (to_lower_ascii(gold.rows[i].form) != target) continue;
    ++report.token_count;
    tags.insert(g);
    tags.insert(p);
    if (g == p) {
      ++tp[g];
    } else {
      ++fn[g];
      ++fp[p];
    }
  }
  for (const std::string& t : tags) report.per_tag[t] = compute_metrics(tp[t], fp[t], fn[t]);
  return report;
}

std::string format_metric(const std::optional<double>& value) {
  if (!value) return "N/A";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *value);
  return buf;
}

ComparisonTable comparison_table(const std::vector<std::pair<std::string, EvalReport>>& reports) {
  if (reports.empty()) throw PreconditionError("comparison_table needs at least one report");
  struct Row {
    std::string model, category, precision, recall, f1;
  };
  std::vector<Row> rows;
  for (const auto& [model, report] : reports)
    for (const auto& [tag, m] : report.per_tag)
      rows.push_back({model, tag, format_metric(m.precision), format_metric(m.recall), format_metric(m.f1)});

  ComparisonTable table;
  table.tsv = "model\tcategory\tprecision\trecall\tf1\n";
  for (const Row& r : rows)
    table.tsv += r.model + '\t' + r.category + '\t' + r.precision + '\t' + r.recall + '\t' + r.f1 + '\n';

  std::size_t w_model = 5, w_cat = 8;
  for (const Row& r : rows) {
    w_model = std::max(w_model, r.model.size());
    w_cat = std::max(w_cat, r.category.size());
  }
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
  const std::string rule(w_model + w_cat + 3 * 11 + 4, '-');
  table.text = pad("Model", w_model) + "  " + pad("Category", w_cat) + "  " + pad("Precision", 9) + "  " +
               pad("Recall", 9) + "  F1\n" + rule + '\n';
  std::string last_model;
  for (const Row& r : rows) {
    if (!last_model.empty() && r.model != last_model) table.text += rule + '\n';
    table.text += pad(r.model == last_model ? "" : r.model, w_model) + "  " + pad(r.category, w_cat) + "  " +
                  pad(r.precision, 9) + "  " + pad(r.recall, 9) + "  " + r.f1 + '\n';
    last_model = r.model;
  }
  return table;
}

}  // namespace thattag
