#include "thattag/reannotate.hpp"

#include <cstdlib>
#include "json.hpp"

namespace thattag {

namespace {

bool is_that(const Token& t) { return to_lower_ascii(t.form) == "that"; }

bool is_acl(const std::string& deprel) { return deprel == "acl" || deprel == "acl:relcl"; }

}  // namespace

bool ReannotationRule::matches(const Sentence& sentence, const Token& token) const {
  if (!is_that(token) || !that_deprels.count(token.deprel)) return false;
  if (token.head < 1 || token.head > static_cast<int>(sentence.tokens.size())) return false;
  return head_deprels.count(sentence.tokens[token.head - 1].deprel) > 0;
}

const ReannotationRule& relative_pronoun_rule() {
  static const ReannotationRule rule{"WPR-rule",
                                     kRelativePronounTag,
                                     {"nsubj", "nsubj:pass", "obj", "obl"},
                                     {"acl:relcl"},
                                     "PronType=Rel accepted as corroborating, not required"};
  return rule;
}

const ReannotationRule& complementizer_rule() {
  static const ReannotationRule rule{"CST-rule", kComplementizerTag, {"mark"}, {"acl", "ccomp"}, ""};
  return rule;
}

bool ReannotationOutcome::has_tag(const std::string& tag) const {
  for (const Edit& e : edits)
    if (e.new_tag == tag) return true;
  return false;
}

ReannotationOutcome reannotate_that(const Sentence& sentence, std::vector<std::string>* warnings) {
  ReannotationOutcome out{sentence, {}};
  const int n = static_cast<int>(sentence.tokens.size());
  for (Token& tok : out.sentence.tokens) {
    if (!is_that(tok)) continue;
    if (tok.head > n || tok.head < 0) {
      if (warnings)
        warnings->push_back(sentence.sent_id + ": token " + std::to_string(tok.id) + " has dangling head " +
                            std::to_string(tok.head) + ", skipped");
      continue;
    }
    for (const ReannotationRule* rule : {&relative_pronoun_rule(), &complementizer_rule()}) {
      // Rules are evaluated against the unedited sentence.
      if (rule->matches(sentence, sentence.tokens[tok.id - 1])) {
        out.edits.push_back(Edit{tok.id, tok.xpos, rule->tag, rule->name});
        tok.xpos = rule->tag;
        break;
      }
    }
  }
  return out;
}

std::vector<const DocumentOutcome*> CorpusReannotation::partition(const std::string& tag) const {
  std::vector<const DocumentOutcome*> out;
  for (const DocumentOutcome& o : outcomes)
    if (o.outcome.has_tag(tag)) out.push_back(&o);
  return out;
}

CorpusReannotation reannotate_corpus(const Corpus& corpus) {
  CorpusReannotation result;
  result.corpus.source_order = corpus.source_order;
  for (const Document& doc : corpus.documents) {
    Document edited{doc.doc_id, {}};
    edited.sentences.reserve(doc.sentences.size());
    for (const Sentence& s : doc.sentences) {
      ReannotationOutcome o = reannotate_that(s, &result.warnings);
      edited.sentences.push_back(o.sentence);
      if (!o.edits.empty()) result.outcomes.push_back(DocumentOutcome{doc.doc_id, std::move(o)});
    }
    result.corpus.documents.push_back(std::move(edited));
  }
  return result;
}

CorpusStats compute_stats(const Corpus& corpus, const std::vector<DocumentOutcome>& outcomes) {
  CorpusStats st;
  for (const DocumentOutcome& o : outcomes) {
    for (const Edit& e : o.outcome.edits) {
      ++st.reannotated_total;
      if (e.new_tag == kComplementizerTag) ++st.cst_count;
      if (e.new_tag == kRelativePronounTag) ++st.wpr_count;
    }
  }

  std::size_t left_to_right = 0;
  std::size_t distance_sum = 0;
  std::map<std::pair<std::string, std::string>, std::size_t> pairs;
  for (const Document& doc : corpus.documents) {
    for (const Sentence& s : doc.sentences) {
      const int n = static_cast<int>(s.tokens.size());
      for (const Token& t : s.tokens) {
        if (is_that(t)) ++st.total_that;
        if (!is_acl(t.deprel) || t.head < 1 || t.head > n) continue;
        const Token& head = s.tokens[t.head - 1];
        ++st.acl_relations;
        if (head.id < t.id) ++left_to_right;
        distance_sum += static_cast<std::size_t>(std::abs(head.id - t.id));
        ++pairs[{head.upos, t.upos}];
        if (t.deprel == "acl:relcl" && t.upos == "VERB") {
          bool has_that = false;
          for (const Token& c : s.tokens)
            if (c.head == t.id && is_that(c)) has_that = true;
          if (!has_that) ++st.acl_relcl_verbs_without_that;
        }
      }
    }
  }
  if (st.acl_relations > 0) {
    const double total = static_cast<double>(st.acl_relations);
    st.acl_left_to_right_fraction = static_cast<double>(left_to_right) / total;
    st.acl_mean_parent_child_distance = static_cast<double>(distance_sum) / total;
    for (const auto& [key, count] : pairs) st.acl_pos_pair_fractions[key] = static_cast<double>(count) / total;
  }
  return st;
}

std::string stats_to_json(const CorpusStats& st) {
  nlohmann::ordered_json j;
  j["total_that"] = st.total_that;
  j["reannotated_total"] = st.reannotated_total;
  j["cst_count"] = st.cst_count;
  j["wpr_count"] = st.wpr_count;
  j["acl_relcl_verbs_without_that"] = st.acl_relcl_verbs_without_that;
  j["acl_relations"] = st.acl_relations;
  if (st.acl_left_to_right_fraction) j["acl_left_to_right_fraction"] = *st.acl_left_to_right_fraction;
  if (st.acl_mean_parent_child_distance) j["acl_mean_parent_child_distance"] = *st.acl_mean_parent_child_distance;
  if (!st.acl_pos_pair_fractions.empty()) {
    nlohmann::ordered_json pairs = nlohmann::ordered_json::object();
    for (const auto& [key, frac] : st.acl_pos_pair_fractions) pairs[key.first + "-" + key.second] = frac;
    j["acl_pos_pair_fractions"] = pairs;
  }
  return j.dump(2) + "\n";
}

std::string display_outcomes(const std::vector<DocumentOutcome>& outcomes, std::size_t limit) {
  std::string out;
  for (const char* tag : {kRelativePronounTag, kComplementizerTag}) {
    out += tag;
    out += ' ';
    out += std::string(100, '-');
    out += '\n';
    std::size_t n = 0;
    for (const DocumentOutcome& o : outcomes) {
      if (n >= limit) break;
      if (!o.outcome.has_tag(tag)) continue;
      out += std::to_string(n) + " ";
      const Sentence& s = o.outcome.sentence;
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        if (i) out += ' ';
        const Token& t = s.tokens[i];
        bool edited = false;
        for (const Edit& e : o.outcome.edits)
          if (e.token_id == t.id) edited = true;
        if (edited)
          out += "[" + t.form + "/" + t.xpos + "]";
        else
          out += t.form;
      }
      out += "\n\n";
      ++n;
    }
  }
  return out;
}

std::string edits_tsv(const std::vector<DocumentOutcome>& outcomes) {
  std::string out = "doc_id\tsent_id\ttoken_id\told_xpos\tnew_tag\trule\n";
  for (const DocumentOutcome& o : outcomes) {
    for (const Edit& e : o.outcome.edits) {
      out += o.doc_id + '\t' + o.outcome.sentence.sent_id + '\t' + std::to_string(e.token_id) + '\t' + e.old_xpos +
             '\t' + e.new_tag + '\t' + e.rule + '\n';
    }
  }
  return out;
}

}  // namespace thattag
