#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thattag/lexicon.hpp"

namespace thattag {

inline constexpr const char* kBoundaryTag = "\xE2\x8A\xA5";  // U+22A5, pads sentence-start history
inline constexpr const char* kModelFormatVersion = "v1";

// Dense tag ids. Id 0 is always the boundary tag, real tags follow in
// lexicographic order.
class TagsetInfo {
 public:
  static constexpr int kBoundary = 0;

  TagsetInfo() : tags_{kBoundaryTag}, index_{{kBoundaryTag, kBoundary}} {}
  explicit TagsetInfo(std::vector<std::string> real_tags);

  int size() const { return static_cast<int>(tags_.size()); }
  int real_size() const { return size() - 1; }
  const std::string& name(int id) const { return tags_.at(static_cast<std::size_t>(id)); }
  // -1 when the tag is unknown.
  int id(std::string_view tag) const;
  const std::vector<std::string>& tags() const { return tags_; }

  bool operator==(const TagsetInfo& other) const { return tags_ == other.tags_; }

 private:
  std::vector<std::string> tags_;
  std::map<std::string, int, std::less<>> index_;
};

enum class HistoryPosition : int { kPrevious = 1, kPrevious2 = 2 };

// Binary tree over trigram histories. Internal nodes ask "is the tag at
// `position` equal to `tag`?"; leaves hold p(tag | history) over the whole
// tagset (the boundary entry is always 0). Nodes are stored in pre-order:
// the yes child directly follows its parent.
struct ContextTree {
  struct Node {
    HistoryPosition position = HistoryPosition::kPrevious;
    int tag = -1;
    int yes = -1;
    int no = -1;
    std::vector<double> distribution;

    bool is_leaf() const { return yes < 0; }
    bool operator==(const Node&) const = default;
  };

  std::vector<Node> nodes;

  // Index of the leaf reached by the history (prev2, prev1).
  int leaf_for(int prev2, int prev1) const;
  const std::vector<double>& lookup(int prev2, int prev1) const { return nodes[leaf_for(prev2, prev1)].distribution; }
  bool operator==(const ContextTree&) const = default;
};

// Trie over word endings (last character first). Every node holds a tag
// distribution already interpolated with its ancestors.
struct SuffixModel {
  struct Node {
    std::map<char, int> children;
    std::vector<double> distribution;

    bool operator==(const Node&) const = default;
  };

  std::vector<Node> nodes;  // nodes[0] is the empty suffix
  std::size_t max_length = 0;
  double theta = 0.0;

  const std::vector<double>& lookup(std::string_view form) const;
  bool operator==(const SuffixModel&) const = default;
};

// Sparse p(tag | form) over the tags observed with the form.
using LexicalDistribution = std::vector<std::pair<int, double>>;

struct TrainParams {
  std::size_t min_samples = 2;
  double min_gain = 1e-4;  // bits
  double add_lambda = 0.1;
  std::size_t suffix_length = 5;
  std::size_t rare_threshold = 2;
};

class TaggerModel {
 public:
  TaggerModel(TagsetInfo tagset, std::vector<double> prior, std::map<std::string, LexicalDistribution> lexical,
              ContextTree context, SuffixModel suffix, std::vector<int> open_class);

  const TagsetInfo& tagset() const { return tagset_; }
  const std::vector<double>& prior() const { return prior_; }
  const std::map<std::string, LexicalDistribution>& lexical() const { return lexical_; }
  const ContextTree& context() const { return context_; }
  const SuffixModel& suffix() const { return suffix_; }
  const std::vector<int>& open_class() const { return open_class_; }
  std::string format_version() const { return kModelFormatVersion; }

  double log_transition(int prev2, int prev1, int tag) const;
  // log p(form | tag) up to a per-form constant; -inf for impossible tags.
  std::vector<double> log_emissions(std::string_view form) const;
  bool is_known(std::string_view form) const;

  bool operator==(const TaggerModel& other) const;

 private:
  TagsetInfo tagset_;
  std::vector<double> prior_;
  std::map<std::string, LexicalDistribution> lexical_;
  ContextTree context_;
  SuffixModel suffix_;
  std::vector<int> open_class_;

  std::vector<int> leaf_of_history_;          // size()^2, indexed prev2 * size() + prev1
  std::vector<std::vector<double>> log_leaf_;  // per node, empty for internal nodes
};

TaggerModel train(const TrainingFile& training, const Lexicon& lexicon, const TrainParams& params = {});

inline constexpr double kNoBeam = 0.0;

// Exact trigram Viterbi unless `beam` > 0, in which case states scoring more
// than `beam` (natural log units) below the best state are pruned.
std::vector<int> tag_sentence_ids(const TaggerModel& model, const std::vector<std::string>& forms,
                                  double beam = kNoBeam);
std::vector<std::string> tag_sentence(const TaggerModel& model, const std::vector<std::string>& forms,
                                      double beam = kNoBeam);

// Joint log score of a tag sequence, the quantity Viterbi maximizes.
double sequence_log_score(const TaggerModel& model, const std::vector<std::string>& forms,
                          const std::vector<int>& tags);

// Replaces every row's tag with the predicted one; sentence breaks are kept.
TrainingFile tag_file(const TaggerModel& model, const TrainingFile& input, double beam = kNoBeam);
void tag_file(const TaggerModel& model, const std::filesystem::path& in, const std::filesystem::path& out,
              double beam = kNoBeam);

// Throws Error when any distribution sums to 1 off by more than `tolerance`.
void check_normalized(const TaggerModel& model, double tolerance = 1e-9);

std::string serialize_model(const TaggerModel& model);
TaggerModel parse_model(std::string_view text);
void save_model(const TaggerModel& model, const std::filesystem::path& path);
TaggerModel load_model(const std::filesystem::path& path);

}  // namespace thattag
