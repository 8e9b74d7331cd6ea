#include "thattag/conllu.hpp"

#include <algorithm>
#include <charconv>

#include "thattag/error.hpp"
#include "thattag/fsutil.hpp"

namespace thattag {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_range_id(std::string_view id) {
  auto dash = id.find('-');
  return dash != std::string_view::npos && all_digits(id.substr(0, dash)) && all_digits(id.substr(dash + 1));
}

bool is_empty_node_id(std::string_view id) {
  auto dot = id.find('.');
  return dot != std::string_view::npos && all_digits(id.substr(0, dot)) && all_digits(id.substr(dot + 1));
}

std::map<std::string, std::string> decode_feats(std::string_view col, std::size_t line_no) {
  std::map<std::string, std::string> feats;
  if (col == "_") return feats;
  for (std::string_view item : split(col, '|')) {
    auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw MalformedRow(line_no, "feature without Key=Value form: " + std::string(item));
    feats.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
  }
  return feats;
}

struct Builder {
  std::string_view doc_id;
  ParsedDocument& out;
  Sentence current;
  std::size_t first_token_line = 0;
  std::size_t index = 0;

  void flush() {
    if (current.tokens.empty()) {
      if (!current.comments.empty())
        out.warnings.push_back(std::string(doc_id) + ": dropped comment block without tokens");
      current = Sentence{};
      return;
    }
    ++index;
    if (current.sent_id.empty()) current.sent_id = std::string(doc_id) + ":" + std::to_string(index);
    if (current.text.empty()) {
      for (const Token& t : current.tokens) {
        if (!current.text.empty()) current.text += ' ';
        current.text += t.form;
      }
    }
    for (const std::string& w : validate(current))
      out.warnings.push_back(std::string(doc_id) + " " + current.sent_id + ": " + w);
    out.sentences.push_back(std::move(current));
    current = Sentence{};
  }
};

std::string_view comment_value(std::string_view line, std::string_view key) {
  // "# key = value"
  std::string_view rest = line.substr(1);
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  if (rest.substr(0, key.size()) != key) return {};
  rest.remove_prefix(key.size());
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  if (rest.empty() || rest.front() != '=') return {};
  rest.remove_prefix(1);
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  return rest;
}

}  // namespace

const Document* Corpus::find(std::string_view doc_id) const {
  for (const Document& d : documents)
    if (d.doc_id == doc_id) return &d;
  return nullptr;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string encode_feats(const std::map<std::string, std::string>& feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto& [k, v] : feats) {
    if (!out.empty()) out += '|';
    out += k;
    out += '=';
    out += v;
  }
  return out;
}

ParsedDocument parse_conllu(std::string_view text, std::string_view doc_id) {
  ParsedDocument result;
  Builder b{doc_id, result, {}, 0, 0};
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      b.flush();
      continue;
    }
    if (line.front() == '#') {
      if (!b.current.tokens.empty()) b.flush();
      b.current.comments.emplace_back(line);
      if (auto v = comment_value(line, "sent_id"); !v.empty()) b.current.sent_id = std::string(v);
      if (auto v = comment_value(line, "text"); !v.empty()) b.current.text = std::string(v);
      continue;
    }

    auto cols = split(line, '\t');
    if (cols.size() != 10)
      throw MalformedRow(line_no, "expected 10 tab-separated columns, found " + std::to_string(cols.size()));
    if (is_range_id(cols[0])) {
      result.warnings.push_back(std::string(doc_id) + " line " + std::to_string(line_no) +
                                ": skipped multiword token " + std::string(cols[0]));
      continue;
    }
    if (is_empty_node_id(cols[0])) {
      result.warnings.push_back(std::string(doc_id) + " line " + std::to_string(line_no) +
                                ": skipped empty node " + std::string(cols[0]));
      continue;
    }

    Token tok;
    if (!parse_int(cols[0], tok.id) || tok.id < 1)
      throw MalformedRow(line_no, "non-numeric token id: " + std::string(cols[0]));
    if (tok.id != static_cast<int>(b.current.tokens.size()) + 1)
      throw MalformedRow(line_no, "token id " + std::to_string(tok.id) + " breaks the 1..n sequence");
    if (!parse_int(cols[6], tok.head) || tok.head < 0)
      throw MalformedRow(line_no, "non-numeric head: " + std::string(cols[6]));
    if (cols[1].empty()) throw MalformedRow(line_no, "empty form");
    tok.form = std::string(cols[1]);
    tok.lemma = std::string(cols[2]);
    tok.upos = std::string(cols[3]);
    tok.xpos = std::string(cols[4]);
    tok.feats = decode_feats(cols[5], line_no);
    tok.deprel = std::string(cols[7]);
    tok.deps = std::string(cols[8]);
    tok.misc = std::string(cols[9]);
    b.current.tokens.push_back(std::move(tok));
  }
  b.flush();
  return result;
}

std::string serialize_conllu(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const Sentence& s : sentences) {
    for (const std::string& c : s.comments) {
      out += c;
      out += '\n';
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const Token& t = s.tokens[i];
      out += std::to_string(i + 1);
      for (const std::string* col : {&t.form, &t.lemma, &t.upos, &t.xpos}) {
        out += '\t';
        out += *col;
      }
      out += '\t';
      out += encode_feats(t.feats);
      out += '\t';
      out += std::to_string(t.head);
      for (const std::string* col : {&t.deprel, &t.deps, &t.misc}) {
        out += '\t';
        out += *col;
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> validate(const Sentence& sentence) {
  std::vector<std::string> issues;
  const int n = static_cast<int>(sentence.tokens.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = sentence.tokens[i];
    if (t.id != i + 1) issues.push_back("token " + std::to_string(i + 1) + " has id " + std::to_string(t.id));
    if (t.form.empty()) issues.push_back("token " + std::to_string(t.id) + " has an empty form");
    if (t.head < 0 || t.head > n)
      issues.push_back("token " + std::to_string(t.id) + " has dangling head " + std::to_string(t.head));
    if (t.head == t.id) issues.push_back("token " + std::to_string(t.id) + " is its own head");
    if (t.head == 0) ++roots;
  }
  if (n > 0 && roots != 1) issues.push_back(std::to_string(roots) + " root tokens (expected 1)");
  return issues;
}

Corpus load_corpus(const std::filesystem::path& directory, const std::string& pattern,
                   std::vector<std::string>* warnings) {
  Corpus corpus;
  for (const auto& path : list_files(directory, pattern)) {
    std::string doc_id = path.stem().string();
    ParsedDocument parsed;
    try {
      parsed = parse_conllu(read_file(path), doc_id);
    } catch (const MalformedRow& e) {
      throw MalformedRow(e.line(), e.detail(), path.filename().string());
    }
    if (std::find(corpus.source_order.begin(), corpus.source_order.end(), doc_id) != corpus.source_order.end())
      throw Error("duplicate document id " + doc_id + " in " + directory.string());
    if (warnings) warnings->insert(warnings->end(), parsed.warnings.begin(), parsed.warnings.end());
    corpus.source_order.push_back(doc_id);
    corpus.documents.push_back(Document{std::move(doc_id), std::move(parsed.sentences)});
  }
  return corpus;
}

}  // namespace thattag
