#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "thattag/conllu.hpp"

namespace thattag {

inline constexpr const char* kRelativePronounTag = "WPR";
inline constexpr const char* kComplementizerTag = "CST";

// Relabels "that" when its own relation and its head's relation both match.
struct ReannotationRule {
  std::string name;
  std::string tag;
  std::set<std::string> that_deprels;
  std::set<std::string> head_deprels;
  std::string extra_conditions;

  bool matches(const Sentence& sentence, const Token& token) const;
};

// WPR-rule: "that" in {nsubj, nsubj:pass, obj, obl} under an acl:relcl head.
const ReannotationRule& relative_pronoun_rule();
// CST-rule: "that" as mark under an acl or ccomp head.
const ReannotationRule& complementizer_rule();

struct Edit {
  int token_id = 0;
  std::string old_xpos;
  std::string new_tag;
  std::string rule;

  bool operator==(const Edit&) const = default;
};

struct ReannotationOutcome {
  Sentence sentence;  // after edits
  std::vector<Edit> edits;

  bool has_tag(const std::string& tag) const;
};

ReannotationOutcome reannotate_that(const Sentence& sentence, std::vector<std::string>* warnings = nullptr);

struct DocumentOutcome {
  std::string doc_id;
  ReannotationOutcome outcome;
};

struct CorpusReannotation {
  Corpus corpus;
  // Only sentences with at least one edit, in corpus order.
  std::vector<DocumentOutcome> outcomes;
  std::vector<std::string> warnings;

  // Outcomes containing an edit to `tag`; a sentence with both kinds of edit
  // appears in both partitions.
  std::vector<const DocumentOutcome*> partition(const std::string& tag) const;
};

CorpusReannotation reannotate_corpus(const Corpus& corpus);

struct CorpusStats {
  std::size_t total_that = 0;
  std::size_t reannotated_total = 0;
  std::size_t cst_count = 0;
  std::size_t wpr_count = 0;
  std::size_t acl_relcl_verbs_without_that = 0;
  std::size_t acl_relations = 0;
  // Absent when the corpus has no acl / acl:relcl relation.
  std::optional<double> acl_left_to_right_fraction;
  std::optional<double> acl_mean_parent_child_distance;
  std::map<std::pair<std::string, std::string>, double> acl_pos_pair_fractions;
};

CorpusStats compute_stats(const Corpus& corpus, const std::vector<DocumentOutcome>& outcomes);
std::string stats_to_json(const CorpusStats& stats);

// WPR block then CST block, sentences numbered from 0 with edited tokens
// bracketed. At most `limit` sentences per block.
std::string display_outcomes(const std::vector<DocumentOutcome>& outcomes, std::size_t limit);

// doc_id, sent_id, token_id, old_xpos, new_tag, rule (with a header row).
std::string edits_tsv(const std::vector<DocumentOutcome>& outcomes);

}  // namespace thattag
