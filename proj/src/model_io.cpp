#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

#include "thattag/error.hpp"
#include "thattag/fsutil.hpp"
#include "thattag/tagger.hpp"

namespace thattag {

namespace {

constexpr std::string_view kMagic = "TTMODEL ";

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, ptr);
}

void append_distribution(std::string& out, const std::vector<double>& d) {
  for (double p : d) {
    out += '\t';
    append_double(out, p);
  }
}

std::string hex_byte(char c) {
  static const char* digits = "0123456789abcdef";
  const auto u = static_cast<unsigned char>(c);
  return {digits[u >> 4], digits[u & 15]};
}

// Line-oriented reader that remembers byte offsets for error reports.
class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::size_t offset() const { return line_start_; }

  std::vector<std::string_view> next_fields() {
    if (pos_ >= text_.size()) throw CorruptModel(text_.size(), "unexpected end of file");
    line_start_ = pos_;
    std::size_t nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) throw CorruptModel(text_.size(), "unterminated final line");
    std::string_view line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    return fields;
  }

  bool at_end() const { return pos_ >= text_.size(); }

  [[noreturn]] void fail(const std::string& what) const { throw CorruptModel(line_start_, what); }

  double to_double(std::string_view s) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v) || v < 0.0)
      fail("bad probability '" + std::string(s) + "'");
    return v;
  }

  long to_int(std::string_view s) const {
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) fail("bad integer '" + std::string(s) + "'");
    return v;
  }

  std::size_t section(std::string_view name) {
    auto f = next_fields();
    if (f.size() < 2 || f[0] != name) fail("expected section " + std::string(name));
    return static_cast<std::size_t>(to_int(f[1]));
  }

  std::vector<double> distribution(const std::vector<std::string_view>& f, std::size_t first, int size) const {
    if (f.size() != first + static_cast<std::size_t>(size)) fail("distribution has the wrong width");
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(size));
    for (std::size_t i = first; i < f.size(); ++i) d.push_back(to_double(f[i]));
    return d;
  }

  void check_sum(const std::vector<double>& d) const {
    double sum = 0.0;
    for (double p : d) sum += p;
    if (std::fabs(sum - 1.0) > 1e-9) fail("distribution does not sum to 1");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
};

}  // namespace

std::string serialize_model(const TaggerModel& model) {
  const TagsetInfo& tagset = model.tagset();
  std::string out = "TTMODEL ";
  out += kModelFormatVersion;
  out += '\n';

  std::vector<char> open(static_cast<std::size_t>(tagset.size()), 0);
  for (int t : model.open_class()) open[t] = 1;
  out += "[TAGSET]\t" + std::to_string(tagset.size()) + '\n';
  for (int t = 0; t < tagset.size(); ++t) {
    out += tagset.name(t);
    out += '\t';
    append_double(out, model.prior()[t]);
    out += open[t] ? "\t1\n" : "\t0\n";
  }

  out += "[LEXICAL]\t" + std::to_string(model.lexical().size()) + '\n';
  for (const auto& [form, dist] : model.lexical()) {
    out += form;
    out += '\t' + std::to_string(dist.size());
    for (const auto& [tag, p] : dist) {
      out += '\t' + std::to_string(tag) + '\t';
      append_double(out, p);
    }
    out += '\n';
  }

  const SuffixModel& suffix = model.suffix();
  out += "[SUFFIX]\t" + std::to_string(suffix.nodes.size()) + '\t' + std::to_string(suffix.max_length) + '\t';
  append_double(out, suffix.theta);
  out += '\n';
  std::function<void(int, std::string)> write_suffix = [&](int node, std::string edge) {
    const auto& n = suffix.nodes[node];
    out += std::to_string(n.children.size()) + '\t' + edge;
    append_distribution(out, n.distribution);
    out += '\n';
    for (const auto& [c, child] : n.children) write_suffix(child, hex_byte(c));
  };
  write_suffix(0, "-");

  const ContextTree& tree = model.context();
  out += "[TREE]\t" + std::to_string(tree.nodes.size()) + '\n';
  std::function<void(int)> write_tree = [&](int node) {
    const auto& n = tree.nodes[node];
    if (n.is_leaf()) {
      out += 'L';
      append_distribution(out, n.distribution);
      out += '\n';
      return;
    }
    out += "Q\t" + std::to_string(static_cast<int>(n.position)) + '\t' + std::to_string(n.tag) + '\n';
    write_tree(n.yes);
    write_tree(n.no);
  };
  write_tree(0);
  return out;
}

TaggerModel parse_model(std::string_view text) {
  if (text.substr(0, kMagic.size()) != kMagic) throw CorruptModel(0, "missing TTMODEL header");
  Reader r(text);
  {
    auto header = r.next_fields();
    std::string_view version = header[0].substr(kMagic.size());
    if (header.size() != 1 || version != kModelFormatVersion)
      throw VersionMismatch("model format " + std::string(version) + " is not supported (expected " +
                            kModelFormatVersion + ")");
  }

  const std::size_t n_tags = r.section("[TAGSET]");
  if (n_tags < 1 || n_tags > (1u << 20)) r.fail("bad tagset size");
  std::vector<std::string> names;
  std::vector<double> prior;
  std::vector<int> open_class;
  for (std::size_t i = 0; i < n_tags; ++i) {
    auto f = r.next_fields();
    if (f.size() != 3 || f[0].empty()) r.fail("bad tagset line");
    if (i == 0 && f[0] != kBoundaryTag) r.fail("first tag must be the boundary tag");
    names.emplace_back(f[0]);
    prior.push_back(r.to_double(f[1]));
    if (f[2] == "1" && i == 0) r.fail("the boundary tag cannot be open-class");
    if (f[2] == "1")
      open_class.push_back(static_cast<int>(i));
    else if (f[2] != "0")
      r.fail("bad open-class flag");
  }
  std::vector<std::string> real(names.begin() + 1, names.end());
  TagsetInfo tagset(real);
  if (tagset.tags() != names) r.fail("tagset is not sorted or has duplicates");
  const int size = tagset.size();
  {
    double sum = 0.0;
    for (double p : prior) sum += p;
    if (std::fabs(sum - 1.0) > 1e-9) r.fail("tag prior does not sum to 1");
  }

  std::map<std::string, LexicalDistribution> lexical;
  const std::size_t n_forms = r.section("[LEXICAL]");
  for (std::size_t i = 0; i < n_forms; ++i) {
    auto f = r.next_fields();
    if (f.size() < 2 || f[0].empty()) r.fail("bad lexical line");
    const auto k = static_cast<std::size_t>(r.to_int(f[1]));
    if (f.size() != 2 + 2 * k) r.fail("lexical entry has the wrong width");
    LexicalDistribution dist;
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const long tag = r.to_int(f[2 + 2 * j]);
      if (tag < 1 || tag >= size) r.fail("lexical tag id out of range");
      const double p = r.to_double(f[3 + 2 * j]);
      dist.emplace_back(static_cast<int>(tag), p);
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) r.fail("lexical distribution does not sum to 1");
    if (!lexical.emplace(std::string(f[0]), std::move(dist)).second) r.fail("duplicate lexical entry");
  }

  SuffixModel suffix;
  {
    auto f = r.next_fields();
    if (f.size() != 4 || f[0] != "[SUFFIX]") r.fail("expected section [SUFFIX]");
    const auto n_nodes = static_cast<std::size_t>(r.to_int(f[1]));
    suffix.max_length = static_cast<std::size_t>(r.to_int(f[2]));
    suffix.theta = r.to_double(f[3]);
    if (n_nodes < 1) r.fail("suffix model has no nodes");
    // Pre-order, each line: child count, edge byte (hex; "-" for the root), distribution.
    std::function<int(std::size_t, char*)> read_node = [&](std::size_t depth, char* edge) -> int {
      if (suffix.nodes.size() >= n_nodes) r.fail("more suffix nodes than declared");
      if (depth > suffix.max_length) r.fail("suffix deeper than the declared maximum");
      auto line = r.next_fields();
      if (line.size() < 2) r.fail("bad suffix line");
      const long children = r.to_int(line[0]);
      if (depth == 0) {
        if (line[1] != "-") r.fail("root suffix node must have edge '-'");
      } else {
        if (line[1].size() != 2) r.fail("bad suffix edge");
        unsigned value = 0;
        auto [ptr, ec] = std::from_chars(line[1].data(), line[1].data() + 2, value, 16);
        if (ec != std::errc() || ptr != line[1].data() + 2) r.fail("bad suffix edge");
        *edge = static_cast<char>(value);
      }
      const int index = static_cast<int>(suffix.nodes.size());
      suffix.nodes.emplace_back();
      suffix.nodes[index].distribution = r.distribution(line, 2, size);
      r.check_sum(suffix.nodes[index].distribution);
      for (long c = 0; c < children; ++c) {
        char child_edge = 0;
        const int child = read_node(depth + 1, &child_edge);
        if (!suffix.nodes[index].children.emplace(child_edge, child).second) r.fail("duplicate suffix edge");
      }
      return index;
    };
    read_node(0, nullptr);
    if (suffix.nodes.size() != n_nodes) r.fail("suffix node count does not match the header");
  }

  ContextTree tree;
  {
    const std::size_t n_nodes = r.section("[TREE]");
    if (n_nodes < 1) r.fail("context tree has no nodes");
    std::set<std::pair<long, long>> path;
    std::function<int()> read_node = [&]() -> int {
      if (tree.nodes.size() >= n_nodes) r.fail("more tree nodes than declared");
      auto line = r.next_fields();
      const int index = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      if (line[0] == "L") {
        tree.nodes[index].distribution = r.distribution(line, 1, size);
        r.check_sum(tree.nodes[index].distribution);
        return index;
      }
      if (line[0] != "Q" || line.size() != 3) r.fail("bad tree line");
      const long pos = r.to_int(line[1]);
      const long tag = r.to_int(line[2]);
      if (pos != 1 && pos != 2) r.fail("bad history position");
      if (tag >= size) r.fail("tree tag id out of range");
      if (!path.insert({pos, tag}).second) r.fail("test repeated on a root-to-leaf path");
      tree.nodes[index].position = static_cast<HistoryPosition>(pos);
      tree.nodes[index].tag = static_cast<int>(tag);
      const int yes = read_node();
      const int no = read_node();
      path.erase({pos, tag});
      tree.nodes[index].yes = yes;
      tree.nodes[index].no = no;
      return index;
    };
    read_node();
    if (tree.nodes.size() != n_nodes) r.fail("tree node count does not match the header");
  }
  if (!r.at_end()) {
    r.next_fields();
    r.fail("trailing data after [TREE]");
  }

  return TaggerModel(std::move(tagset), std::move(prior), std::move(lexical), std::move(tree), std::move(suffix),
                     std::move(open_class));
}

void save_model(const TaggerModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

TaggerModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

}  // namespace thattag
