#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace thattag {

// One basic-layer CoNLL-U token. Columns that hold "_" keep it verbatim,
// except FEATS which is decoded into a sorted map (empty means "_").
struct Token {
  int id = 0;
  std::string form;
  std::string lemma = "_";
  std::string upos = "_";
  std::string xpos = "_";
  std::map<std::string, std::string> feats;
  int head = 0;
  std::string deprel = "_";
  std::string deps = "_";
  std::string misc = "_";

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::string sent_id;
  std::string text;
  std::vector<Token> tokens;
  std::vector<std::string> comments;  // raw, including the leading '#'

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string doc_id;
  std::vector<Sentence> sentences;

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<std::string> source_order;

  const Document* find(std::string_view doc_id) const;
  bool operator==(const Corpus&) const = default;
};

struct ParsedDocument {
  std::vector<Sentence> sentences;
  std::vector<std::string> warnings;
};

std::string encode_feats(const std::map<std::string, std::string>& feats);

// Throws MalformedRow with the 1-based line number. Multiword ranges ("3-4")
// and empty nodes ("3.1") are dropped with a warning; dangling heads and
// root-count violations are warnings too. Sentences whose ids are not
// exactly 1..n are rejected.
ParsedDocument parse_conllu(std::string_view text, std::string_view doc_id);

std::string serialize_conllu(const std::vector<Sentence>& sentences);

// Structural problems of a sentence, empty when it satisfies every invariant.
std::vector<std::string> validate(const Sentence& sentence);

// Loads every regular file in `directory` matching `pattern` in lexicographic
// filename order. doc_id is the filename without extension.
Corpus load_corpus(const std::filesystem::path& directory, const std::string& pattern = "*.conllu",
                   std::vector<std::string>* warnings = nullptr);

std::string to_lower_ascii(std::string_view s);

}  // namespace thattag
