#include "thattag/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "thattag/error.hpp"
#include "thattag/fsutil.hpp"

namespace fs = std::filesystem;

namespace thattag {

namespace {

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
  }
}

void sort_tag_counts(std::vector<TagCount>& v) {
  std::sort(v.begin(), v.end(), [](const TagCount& a, const TagCount& b) {
    return a.count != b.count ? a.count > b.count : a.tag < b.tag;
  });
}

}  // namespace

std::pair<std::size_t, std::size_t> TrainingFile::sentence_span(std::size_t i) const {
  return {i == 0 ? 0 : sentence_breaks[i - 1], sentence_breaks[i]};
}

TrainingFile parse_token_rows(std::string_view text, bool require_tag) {
  TrainingFile file;
  auto close_sentence = [&] {
    if (!file.rows.empty() && (file.sentence_breaks.empty() || file.sentence_breaks.back() != file.rows.size()))
      file.sentence_breaks.push_back(file.rows.size());
  };
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      close_sentence();
      return;
    }
    auto tab = line.find('\t');
    TaggedRow row;
    row.form = std::string(line.substr(0, tab));
    if (tab != std::string_view::npos) {
      std::string_view rest = line.substr(tab + 1);
      row.tag = std::string(rest.substr(0, rest.find('\t')));
    }
    if (row.form.empty()) throw MalformedRow(line_no, "empty form");
    if (require_tag && row.tag.empty()) throw MalformedRow(line_no, "missing tag for form " + row.form);
    file.rows.push_back(std::move(row));
  });
  close_sentence();
  return file;
}

TrainingFile read_token_file(const fs::path& path, bool require_tag) {
  try {
    return parse_token_rows(read_file(path), require_tag);
  } catch (const MalformedRow& e) {
    throw MalformedRow(e.line(), e.detail(), path.filename().string());
  }
}

std::string format_token_rows(const TrainingFile& file) {
  std::string out;
  for (std::size_t s = 0; s < file.sentence_count(); ++s) {
    auto [begin, end] = file.sentence_span(s);
    for (std::size_t i = begin; i < end; ++i) {
      out += file.rows[i].form;
      out += '\t';
      out += file.rows[i].tag;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::size_t Lexicon::total_count() const {
  std::size_t total = 0;
  for (const auto& [form, tags] : entries)
    for (const TagCount& tc : tags) total += tc.count;
  return total;
}

std::size_t export_token_per_row(const Corpus& corpus, const fs::path& out_dir) {
  for (const Document& doc : corpus.documents)
    for (const Sentence& s : doc.sentences)
      for (const Token& t : s.tokens)
        if (t.xpos == "_" || t.xpos.empty())
          throw MissingTag("document " + doc.doc_id + ", sentence " + s.sent_id + ", token " + std::to_string(t.id) +
                           " (" + t.form + ") has no XPOS tag");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  std::size_t files = 0;
  for (const Document& doc : corpus.documents) {
    std::string content;
    for (const Sentence& s : doc.sentences) {
      for (const Token& t : s.tokens) {
        content += t.form;
        content += '\t';
        content += t.xpos;
        content += '\n';
      }
      content += '\n';
    }
    write_file_atomic(out_dir / (doc.doc_id + ".txt"), content);
    ++files;
  }
  return files;
}

std::size_t concat_first_n(const fs::path& token_dir, std::size_t n, const fs::path& out_path) {
  if (n < 1) throw PreconditionError("concat_first_n: n must be >= 1");
  std::string content;
  std::size_t used = 0;
  for (const fs::path& file : list_files(token_dir, "*.txt")) {
    if (fs::weakly_canonical(file) == fs::weakly_canonical(out_path)) continue;
    std::string part = read_file(file);
    if (!part.empty() && part.back() != '\n') part += '\n';
    content += part;
    if (++used == n) break;
  }
  write_file_atomic(out_path, content);
  return parse_token_rows(content).rows.size();
}

std::vector<std::string> infer_open_class(const Lexicon& lexicon, std::size_t min_forms) {
  std::map<std::string, std::size_t> forms_per_tag;
  for (const auto& [form, tags] : lexicon.entries)
    for (const TagCount& tc : tags) ++forms_per_tag[tc.tag];
  std::vector<std::string> out;
  for (const auto& [tag, forms] : forms_per_tag)
    if (forms >= min_forms) out.push_back(tag);
  return out;
}

Lexicon build_lexicon(const TrainingFile& training, std::size_t open_class_min_forms) {
  if (training.rows.empty()) throw PreconditionError("build_lexicon: training data is empty");
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  for (const TaggedRow& row : training.rows) ++counts[row.form][row.tag];
  Lexicon lex;
  for (const auto& [form, tags] : counts) {
    std::vector<TagCount>& entry = lex.entries[form];
    for (const auto& [tag, c] : tags) entry.push_back(TagCount{tag, c});
    sort_tag_counts(entry);
  }
  lex.open_class_tags = infer_open_class(lex, open_class_min_forms);
  return lex;
}

std::string format_lexicon(const Lexicon& lexicon) {
  std::string out;
  for (const auto& [form, tags] : lexicon.entries) {
    for (const TagCount& tc : tags) {
      out += form;
      out += '\t';
      out += tc.tag;
      out += '\t';
      out += std::to_string(tc.count);
      out += '\n';
    }
  }
  return out;
}

Lexicon parse_lexicon(std::string_view text, std::size_t open_class_min_forms) {
  Lexicon lex;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) throw MalformedRow(line_no, "expected form<TAB>tag<TAB>count");
    std::string_view count_str = line.substr(t2 + 1);
    std::size_t count = 0;
    auto [ptr, ec] = std::from_chars(count_str.data(), count_str.data() + count_str.size(), count);
    if (ec != std::errc() || ptr != count_str.data() + count_str.size() || count == 0)
      throw MalformedRow(line_no, "bad count: " + std::string(count_str));
    std::string form(line.substr(0, t1));
    std::string tag(line.substr(t1 + 1, t2 - t1 - 1));
    if (form.empty() || tag.empty()) throw MalformedRow(line_no, "empty form or tag");
    auto& entry = lex.entries[form];
    for (const TagCount& tc : entry)
      if (tc.tag == tag) throw MalformedRow(line_no, "duplicate tag " + tag + " for form " + form);
    entry.push_back(TagCount{std::move(tag), count});
  });
  for (auto& [form, tags] : lex.entries) sort_tag_counts(tags);
  lex.open_class_tags = infer_open_class(lex, open_class_min_forms);
  return lex;
}

std::vector<std::string> read_open_class_file(const fs::path& path) {
  std::set<std::string> tags;
  for_each_line(read_file(path), [&](std::size_t, std::string_view line) {
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos) return;
    auto last = line.find_last_not_of(" \t");
    tags.emplace(line.substr(first, last - first + 1));
  });
  return {tags.begin(), tags.end()};
}

}  // namespace thattag
