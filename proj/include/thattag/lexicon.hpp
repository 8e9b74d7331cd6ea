#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "thattag/conllu.hpp"

namespace thattag {

struct TaggedRow {
  std::string form;
  std::string tag;

  bool operator==(const TaggedRow&) const = default;
};

// Token-per-row data: one "form<TAB>tag" pair per line, a blank line after
// each sentence. sentence_breaks holds the row index one past each
// sentence's last token.
struct TrainingFile {
  std::vector<TaggedRow> rows;
  std::vector<std::size_t> sentence_breaks;

  std::size_t sentence_count() const { return sentence_breaks.size(); }
  // Rows of sentence `i` as [begin, end).
  std::pair<std::size_t, std::size_t> sentence_span(std::size_t i) const;
  bool operator==(const TrainingFile&) const = default;
};

// With require_tag=false, lines may carry just the form (tag left empty);
// columns past the second are ignored.
TrainingFile parse_token_rows(std::string_view text, bool require_tag = true);
TrainingFile read_token_file(const std::filesystem::path& path, bool require_tag = true);
std::string format_token_rows(const TrainingFile& file);

struct TagCount {
  std::string tag;
  std::size_t count = 0;

  bool operator==(const TagCount&) const = default;
};

inline constexpr std::size_t kDefaultOpenClassMinForms = 10;

struct Lexicon {
  // Per form, tags by descending count (ties by tag name).
  std::map<std::string, std::vector<TagCount>> entries;
  std::vector<std::string> open_class_tags;

  std::size_t total_count() const;
  bool operator==(const Lexicon&) const = default;
};

// One file per document, "<doc_id>.txt". Throws MissingTag before writing
// anything when a token has XPOS "_".
std::size_t export_token_per_row(const Corpus& corpus, const std::filesystem::path& out_dir);

// Concatenates the first n "*.txt" files of token_dir (lexicographic order)
// into out_path and returns the number of token rows written.
std::size_t concat_first_n(const std::filesystem::path& token_dir, std::size_t n,
                           const std::filesystem::path& out_path);

// Open-class tags are those observed with at least `open_class_min_forms`
// distinct forms.
Lexicon build_lexicon(const TrainingFile& training, std::size_t open_class_min_forms = kDefaultOpenClassMinForms);

std::vector<std::string> infer_open_class(const Lexicon& lexicon, std::size_t min_forms);

// "form<TAB>tag<TAB>count" lines sorted by form, then descending count.
std::string format_lexicon(const Lexicon& lexicon);
Lexicon parse_lexicon(std::string_view text, std::size_t open_class_min_forms = kDefaultOpenClassMinForms);

// One tag per line; blank lines ignored. An empty file yields no open-class tags.
std::vector<std::string> read_open_class_file(const std::filesystem::path& path);

}  // namespace thattag
