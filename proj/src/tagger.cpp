#include "thattag/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "thattag/error.hpp"
#include "thattag/fsutil.hpp"

namespace thattag {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// Histories seen in training, with tag counts for the token that followed.
struct HistoryCounts {
  int prev2 = 0;
  int prev1 = 0;
  std::vector<double> counts;
};

double entropy_bits(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts)
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  return h;
}

class TreeGrower {
 public:
  TreeGrower(const TrainParams& params, const std::vector<double>& global, int tagset_size)
      : params_(params), global_(global), size_(tagset_size) {}

  ContextTree grow(std::vector<const HistoryCounts*> histories) {
    ContextTree tree;
    std::set<std::pair<int, int>> used;
    build(tree, histories, used);
    return tree;
  }

 private:
  static int history_tag(const HistoryCounts& h, int position) { return position == 1 ? h.prev1 : h.prev2; }

  std::vector<double> sum_counts(const std::vector<const HistoryCounts*>& hs) const {
    std::vector<double> c(static_cast<std::size_t>(size_), 0.0);
    for (const HistoryCounts* h : hs)
      for (int t = 0; t < size_; ++t) c[t] += h->counts[t];
    return c;
  }

  std::vector<double> leaf_distribution(const std::vector<double>& counts, double total) const {
    std::vector<double> d(static_cast<std::size_t>(size_), 0.0);
    const double lambda = params_.add_lambda;
    const double denom = total + lambda;
    for (int t = 1; t < size_; ++t) d[t] = denom > 0.0 ? (counts[t] + lambda * global_[t]) / denom : global_[t];
    return d;
  }

  int build(ContextTree& tree, const std::vector<const HistoryCounts*>& hs, std::set<std::pair<int, int>>& used) {
    const std::vector<double> counts = sum_counts(hs);
    double total = 0.0;
    for (double c : counts) total += c;

    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    int best_pos = 0;
    int best_tag = -1;
    double best_gain = -1.0;
    if (total >= static_cast<double>(params_.min_samples)) {
      const double parent_h = entropy_bits(counts, total);
      for (int pos = 1; pos <= 2; ++pos) {
        for (int tag = 0; tag < size_; ++tag) {
          if (used.count({pos, tag})) continue;
          std::vector<double> yes(static_cast<std::size_t>(size_), 0.0);
          double yes_total = 0.0;
          for (const HistoryCounts* h : hs) {
            if (history_tag(*h, pos) != tag) continue;
            for (int t = 0; t < size_; ++t) {
              yes[t] += h->counts[t];
              yes_total += h->counts[t];
            }
          }
          if (yes_total <= 0.0 || yes_total >= total) continue;
          std::vector<double> no(counts);
          for (int t = 0; t < size_; ++t) no[t] -= yes[t];
          const double no_total = total - yes_total;
          const double gain = parent_h - (yes_total / total) * entropy_bits(yes, yes_total) -
                              (no_total / total) * entropy_bits(no, no_total);
          if (gain > best_gain) {
            best_gain = gain;
            best_pos = pos;
            best_tag = tag;
          }
        }
      }
    }

    if (best_tag < 0 || !(best_gain >= params_.min_gain)) {
      tree.nodes[index].distribution = leaf_distribution(counts, total);
      return index;
    }

    std::vector<const HistoryCounts*> yes_hs;
    std::vector<const HistoryCounts*> no_hs;
    for (const HistoryCounts* h : hs) (history_tag(*h, best_pos) == best_tag ? yes_hs : no_hs).push_back(h);

    tree.nodes[index].position = static_cast<HistoryPosition>(best_pos);
    tree.nodes[index].tag = best_tag;
    used.insert({best_pos, best_tag});
    const int yes_index = build(tree, yes_hs, used);
    const int no_index = build(tree, no_hs, used);
    used.erase({best_pos, best_tag});
    tree.nodes[index].yes = yes_index;
    tree.nodes[index].no = no_index;
    return index;
  }

  const TrainParams& params_;
  const std::vector<double>& global_;
  int size_;
};

SuffixModel build_suffix_model(const TrainingFile& training, const TagsetInfo& tagset,
                               const std::vector<double>& prior, const TrainParams& params) {
  const auto size = static_cast<std::size_t>(tagset.size());
  std::map<std::string, std::size_t> freq;
  for (const TaggedRow& r : training.rows) ++freq[r.form];

  struct RawNode {
    std::map<char, int> children;
    std::vector<double> counts;
  };
  std::vector<RawNode> raw(1);
  raw[0].counts.assign(size, 0.0);
  for (const TaggedRow& r : training.rows) {
    if (freq[r.form] > params.rare_threshold) continue;
    const int tag = tagset.id(r.tag);
    int node = 0;
    raw[0].counts[tag] += 1.0;
    const std::size_t depth = std::min(params.suffix_length, r.form.size());
    for (std::size_t k = 0; k < depth; ++k) {
      const char c = r.form[r.form.size() - 1 - k];
      auto it = raw[node].children.find(c);
      int next;
      if (it == raw[node].children.end()) {
        next = static_cast<int>(raw.size());
        raw[node].children.emplace(c, next);
        raw.push_back(RawNode{{}, std::vector<double>(size, 0.0)});
      } else {
        next = it->second;
      }
      node = next;
      raw[node].counts[tag] += 1.0;
    }
  }

  // theta: standard deviation of the unconditioned tag probabilities.
  const int s = tagset.real_size();
  double theta = 0.0;
  if (s > 1) {
    const double mean = 1.0 / s;
    double acc = 0.0;
    for (int t = 1; t < tagset.size(); ++t) acc += (prior[t] - mean) * (prior[t] - mean);
    theta = std::sqrt(acc / (s - 1));
  }

  SuffixModel model;
  model.max_length = params.suffix_length;
  model.theta = theta;
  model.nodes.resize(raw.size());

  // Pre-order walk: parents are finished before children.
  std::vector<std::pair<int, int>> stack{{0, -1}};
  while (!stack.empty()) {
    auto [node, parent] = stack.back();
    stack.pop_back();
    double total = 0.0;
    for (double c : raw[node].counts) total += c;
    std::vector<double> d(size, 0.0);
    if (parent < 0) {
      for (std::size_t t = 1; t < size; ++t) d[t] = total > 0.0 ? raw[node].counts[t] / total : prior[t];
    } else {
      const std::vector<double>& up = model.nodes[parent].distribution;
      for (std::size_t t = 1; t < size; ++t) d[t] = (raw[node].counts[t] / total + theta * up[t]) / (1.0 + theta);
    }
    model.nodes[node].distribution = std::move(d);
    model.nodes[node].children = raw[node].children;
    for (auto it = raw[node].children.rbegin(); it != raw[node].children.rend(); ++it)
      stack.emplace_back(it->second, node);
  }
  return model;
}

// Renumbers trie nodes in pre-order with children visited by edge
// character, the layout the model file uses.
SuffixModel canonical_layout(SuffixModel suffix) {
  if (suffix.nodes.empty()) return suffix;
  std::vector<SuffixModel::Node> ordered;
  ordered.reserve(suffix.nodes.size());
  std::vector<char> visited(suffix.nodes.size(), 0);
  std::function<int(int)> visit = [&](int old_index) {
    if (old_index < 0 || static_cast<std::size_t>(old_index) >= suffix.nodes.size() || visited[old_index])
      throw PreconditionError("suffix trie is not a tree");
    visited[old_index] = 1;
    const int index = static_cast<int>(ordered.size());
    ordered.push_back({{}, std::move(suffix.nodes[old_index].distribution)});
    for (const auto& [c, child] : suffix.nodes[old_index].children) {
      const int new_child = visit(child);
      ordered[index].children[c] = new_child;
    }
    return index;
  };
  visit(0);
  suffix.nodes = std::move(ordered);
  return suffix;
}

}  // namespace

TagsetInfo::TagsetInfo(std::vector<std::string> real_tags) : TagsetInfo() {
  std::sort(real_tags.begin(), real_tags.end());
  real_tags.erase(std::unique(real_tags.begin(), real_tags.end()), real_tags.end());
  for (std::string& t : real_tags) {
    if (t == kBoundaryTag) throw PreconditionError("the boundary tag cannot be used as a real tag");
    index_.emplace(t, static_cast<int>(tags_.size()));
    tags_.push_back(std::move(t));
  }
}

int TagsetInfo::id(std::string_view tag) const {
  auto it = index_.find(tag);
  return it == index_.end() ? -1 : it->second;
}

int ContextTree::leaf_for(int prev2, int prev1) const {
  int node = 0;
  while (!nodes[node].is_leaf()) {
    const Node& n = nodes[node];
    const int observed = n.position == HistoryPosition::kPrevious ? prev1 : prev2;
    node = observed == n.tag ? n.yes : n.no;
  }
  return node;
}

const std::vector<double>& SuffixModel::lookup(std::string_view form) const {
  int node = 0;
  const std::size_t depth = std::min(max_length, form.size());
  for (std::size_t k = 0; k < depth; ++k) {
    auto it = nodes[node].children.find(form[form.size() - 1 - k]);
    if (it == nodes[node].children.end()) break;
    node = it->second;
  }
  return nodes[node].distribution;
}

TaggerModel::TaggerModel(TagsetInfo tagset, std::vector<double> prior,
                         std::map<std::string, LexicalDistribution> lexical, ContextTree context, SuffixModel suffix,
                         std::vector<int> open_class)
    : tagset_(std::move(tagset)),
      prior_(std::move(prior)),
      lexical_(std::move(lexical)),
      context_(std::move(context)),
      suffix_(canonical_layout(std::move(suffix))),
      open_class_(std::move(open_class)) {
  const int n = tagset_.size();
  if (static_cast<int>(prior_.size()) != n) throw PreconditionError("prior size does not match the tagset");
  if (context_.nodes.empty()) throw PreconditionError("context tree has no nodes");
  if (suffix_.nodes.empty()) throw PreconditionError("suffix model has no nodes");
  log_leaf_.resize(context_.nodes.size());
  for (std::size_t i = 0; i < context_.nodes.size(); ++i) {
    const auto& node = context_.nodes[i];
    if (!node.is_leaf()) continue;
    if (static_cast<int>(node.distribution.size()) != n)
      throw PreconditionError("leaf distribution size does not match the tagset");
    log_leaf_[i].reserve(node.distribution.size());
    for (double p : node.distribution) log_leaf_[i].push_back(safe_log(p));
  }
  leaf_of_history_.resize(static_cast<std::size_t>(n) * n);
  for (int p2 = 0; p2 < n; ++p2)
    for (int p1 = 0; p1 < n; ++p1) leaf_of_history_[static_cast<std::size_t>(p2) * n + p1] = context_.leaf_for(p2, p1);
}

double TaggerModel::log_transition(int prev2, int prev1, int tag) const {
  const int n = tagset_.size();
  return log_leaf_[leaf_of_history_[static_cast<std::size_t>(prev2) * n + prev1]][tag];
}

bool TaggerModel::is_known(std::string_view form) const {
  if (lexical_.count(std::string(form))) return true;
  return lexical_.count(to_lower_ascii(form)) > 0;
}

std::vector<double> TaggerModel::log_emissions(std::string_view form) const {
  const int n = tagset_.size();
  std::vector<double> out(static_cast<std::size_t>(n), kNegInf);

  auto it = lexical_.find(std::string(form));
  if (it == lexical_.end()) it = lexical_.find(to_lower_ascii(form));
  if (it != lexical_.end()) {
    for (const auto& [tag, p] : it->second)
      if (prior_[tag] > 0.0) out[tag] = safe_log(p) - std::log(prior_[tag]);
    return out;
  }

  // Unknown form: suffix guess restricted to open-class tags. An empty
  // open-class list admits every tag.
  std::vector<char> admissible(static_cast<std::size_t>(n), open_class_.empty() ? 1 : 0);
  admissible[TagsetInfo::kBoundary] = 0;
  for (int t : open_class_) admissible[t] = 1;

  const std::vector<double>& guess = suffix_.lookup(form);
  double mass = 0.0;
  for (int t = 1; t < n; ++t)
    if (admissible[t]) mass += guess[t];
  const std::vector<double>* dist = &guess;
  if (mass <= 0.0) {
    dist = &prior_;
    for (int t = 1; t < n; ++t)
      if (admissible[t]) mass += prior_[t];
  }
  for (int t = 1; t < n; ++t)
    if (admissible[t] && (*dist)[t] > 0.0 && prior_[t] > 0.0)
      out[t] = std::log((*dist)[t] / mass) - std::log(prior_[t]);
  return out;
}

bool TaggerModel::operator==(const TaggerModel& other) const {
  return tagset_ == other.tagset_ && prior_ == other.prior_ && lexical_ == other.lexical_ &&
         context_ == other.context_ && suffix_ == other.suffix_ && open_class_ == other.open_class_;
}

TaggerModel train(const TrainingFile& training, const Lexicon& lexicon, const TrainParams& params) {
  if (training.rows.empty()) throw EmptyTraining();
  if (params.add_lambda < 0.0) throw PreconditionError("add_lambda must be non-negative");

  std::vector<std::string> tags;
  for (const TaggedRow& r : training.rows) {
    if (r.tag.empty()) throw PreconditionError("training row for '" + r.form + "' has no tag");
    tags.push_back(r.tag);
  }
  TagsetInfo tagset(std::move(tags));
  const int n = tagset.size();

  std::vector<double> prior(static_cast<std::size_t>(n), 0.0);
  for (const TaggedRow& r : training.rows) prior[tagset.id(r.tag)] += 1.0;
  for (double& p : prior) p /= static_cast<double>(training.rows.size());

  // Trigram histories with boundary padding at each sentence start.
  std::map<std::pair<int, int>, HistoryCounts> histories;
  for (std::size_t s = 0; s < training.sentence_count(); ++s) {
    auto [begin, end] = training.sentence_span(s);
    int prev2 = TagsetInfo::kBoundary;
    int prev1 = TagsetInfo::kBoundary;
    for (std::size_t i = begin; i < end; ++i) {
      const int tag = tagset.id(training.rows[i].tag);
      HistoryCounts& h = histories[{prev2, prev1}];
      if (h.counts.empty()) h = HistoryCounts{prev2, prev1, std::vector<double>(static_cast<std::size_t>(n), 0.0)};
      h.counts[tag] += 1.0;
      prev2 = prev1;
      prev1 = tag;
    }
  }
  std::vector<const HistoryCounts*> all;
  all.reserve(histories.size());
  for (const auto& [key, h] : histories) all.push_back(&h);
  ContextTree tree = TreeGrower(params, prior, n).grow(std::move(all));

  std::map<std::string, LexicalDistribution> lexical;
  for (const auto& [form, entries] : lexicon.entries) {
    std::vector<std::pair<int, double>> counts;
    double total = 0.0;
    for (const TagCount& tc : entries) {
      const int id = tagset.id(tc.tag);
      if (id < 0) continue;
      counts.emplace_back(id, static_cast<double>(tc.count));
      total += static_cast<double>(tc.count);
    }
    if (counts.empty()) continue;
    std::sort(counts.begin(), counts.end());
    const double denom = total + params.add_lambda * static_cast<double>(counts.size());
    for (auto& [id, c] : counts) c = (c + params.add_lambda) / denom;
    lexical.emplace(form, std::move(counts));
  }

  SuffixModel suffix = build_suffix_model(training, tagset, prior, params);

  std::vector<int> open_class;
  for (const std::string& t : lexicon.open_class_tags)
    if (int id = tagset.id(t); id > 0) open_class.push_back(id);
  std::sort(open_class.begin(), open_class.end());

  TaggerModel model(std::move(tagset), std::move(prior), std::move(lexical), std::move(tree), std::move(suffix),
                    std::move(open_class));
  check_normalized(model);
  return model;
}

std::vector<int> tag_sentence_ids(const TaggerModel& model, const std::vector<std::string>& forms, double beam) {
  const std::size_t len = forms.size();
  if (len == 0) return {};
  const int n = model.tagset().size();
  const auto cell = [n](int p1, int t) { return static_cast<std::size_t>(p1) * n + t; };

  std::vector<std::vector<double>> emissions;
  emissions.reserve(len);
  for (const std::string& f : forms) emissions.push_back(model.log_emissions(f));

  // delta[(prev, cur)] at the current position; backpointers per position.
  std::vector<double> delta(static_cast<std::size_t>(n) * n, kNegInf);
  std::vector<std::vector<int>> back(len, std::vector<int>(static_cast<std::size_t>(n) * n, -1));
  for (int t = 1; t < n; ++t) {
    if (emissions[0][t] == kNegInf) continue;
    delta[cell(TagsetInfo::kBoundary, t)] =
        model.log_transition(TagsetInfo::kBoundary, TagsetInfo::kBoundary, t) + emissions[0][t];
    back[0][cell(TagsetInfo::kBoundary, t)] = TagsetInfo::kBoundary;
  }

  auto prune = [&](std::vector<double>& d) {
    if (beam <= 0.0) return;
    double best = kNegInf;
    for (double v : d) best = std::max(best, v);
    for (double& v : d)
      if (v < best - beam) v = kNegInf;
  };
  prune(delta);

  for (std::size_t i = 1; i < len; ++i) {
    std::vector<double> next(static_cast<std::size_t>(n) * n, kNegInf);
    for (int t = 1; t < n; ++t) {
      const double e = emissions[i][t];
      if (e == kNegInf) continue;
      for (int p1 = 1; p1 < n; ++p1) {
        double best = kNegInf;
        int arg = -1;
        for (int p2 = 0; p2 < n; ++p2) {
          const double prev = delta[cell(p2, p1)];
          if (prev == kNegInf) continue;
          const double score = prev + model.log_transition(p2, p1, t);
          if (score > best) {
            best = score;
            arg = p2;
          }
        }
        if (arg < 0) continue;
        next[cell(p1, t)] = best + e;
        back[i][cell(p1, t)] = arg;
      }
    }
    delta.swap(next);
    prune(delta);
  }

  double best = kNegInf;
  int best_p1 = -1;
  int best_t = -1;
  for (int p1 = 0; p1 < n; ++p1)
    for (int t = 1; t < n; ++t)
      if (delta[cell(p1, t)] > best) {
        best = delta[cell(p1, t)];
        best_p1 = p1;
        best_t = t;
      }

  std::vector<int> tags(len, 1);
  if (best_t < 0) {
    // Every path has zero probability (only possible with add_lambda = 0):
    // fall back to the best emission per token.
    for (std::size_t i = 0; i < len; ++i) {
      double b = kNegInf;
      for (int t = 1; t < n; ++t)
        if (emissions[i][t] > b) {
          b = emissions[i][t];
          tags[i] = t;
        }
    }
    return tags;
  }
  tags[len - 1] = best_t;
  int p1 = best_p1;
  for (std::size_t i = len - 1; i > 0; --i) {
    tags[i - 1] = p1;
    const int p2 = back[i][cell(p1, tags[i])];
    p1 = p2;
  }
  return tags;
}

std::vector<std::string> tag_sentence(const TaggerModel& model, const std::vector<std::string>& forms, double beam) {
  std::vector<std::string> out;
  for (int id : tag_sentence_ids(model, forms, beam)) out.push_back(model.tagset().name(id));
  return out;
}

double sequence_log_score(const TaggerModel& model, const std::vector<std::string>& forms,
                          const std::vector<int>& tags) {
  double score = 0.0;
  int p2 = TagsetInfo::kBoundary;
  int p1 = TagsetInfo::kBoundary;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    score += model.log_transition(p2, p1, tags[i]) + model.log_emissions(forms[i])[tags[i]];
    p2 = p1;
    p1 = tags[i];
  }
  return score;
}

TrainingFile tag_file(const TaggerModel& model, const TrainingFile& input, double beam) {
  TrainingFile out = input;
  for (std::size_t s = 0; s < input.sentence_count(); ++s) {
    auto [begin, end] = input.sentence_span(s);
    std::vector<std::string> forms;
    for (std::size_t i = begin; i < end; ++i) forms.push_back(input.rows[i].form);
    const std::vector<std::string> tags = tag_sentence(model, forms, beam);
    for (std::size_t i = begin; i < end; ++i) out.rows[i].tag = tags[i - begin];
  }
  return out;
}

void tag_file(const TaggerModel& model, const std::filesystem::path& in, const std::filesystem::path& out,
              double beam) {
  write_file_atomic(out, format_token_rows(tag_file(model, read_token_file(in, false), beam)));
}

void check_normalized(const TaggerModel& model, double tolerance) {
  auto check = [tolerance](double sum, const std::string& what) {
    if (!(std::fabs(sum - 1.0) <= tolerance))
      throw Error(what + " sums to " + std::to_string(sum) + ", expected 1");
  };
  for (const auto& [form, dist] : model.lexical()) {
    double sum = 0.0;
    for (const auto& [tag, p] : dist) sum += p;
    check(sum, "lexical distribution of '" + form + "'");
  }
  for (std::size_t i = 0; i < model.context().nodes.size(); ++i) {
    const auto& node = model.context().nodes[i];
    if (!node.is_leaf()) continue;
    double sum = 0.0;
    for (double p : node.distribution) sum += p;
    check(sum, "context leaf " + std::to_string(i));
  }
  for (std::size_t i = 0; i < model.suffix().nodes.size(); ++i) {
    double sum = 0.0;
    for (double p : model.suffix().nodes[i].distribution) sum += p;
    check(sum, "suffix node " + std::to_string(i));
  }
}

}  // namespace thattag
