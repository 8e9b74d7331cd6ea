#include "pipeline_config.hpp"

#include <charconv>

#include "thattag/annotate.hpp"
#include "thattag/error.hpp"
#include "thattag/fsutil.hpp"

namespace fs = std::filesystem;

namespace thattag {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw PreconditionError("config key " + std::string(key) + ": bad number '" + std::string(value) + "'");
  return out;
}

}  // namespace

PipelineConfig::PipelineConfig() : endpoint(resolve_endpoint(std::nullopt)) {}

void PipelineConfig::validate() const {
  check_size_ladder(size_ladder);
  if (target_form.empty()) throw PreconditionError("target_form must be non-empty");
  if (to_lower_ascii(target_form) != target_form) throw PreconditionError("target_form must be stored lowercased");
  if (endpoint.empty()) throw PreconditionError("endpoint must be non-empty");
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    std::string_view item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty()) throw PreconditionError("empty entry in size list '" + std::string(text) + "'");
    out.push_back(parse_number<std::size_t>("sizes", item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void apply_config_text(PipelineConfig& cfg, std::string_view text, const fs::path& base_dir) {
  auto path_value = [&](std::string_view v) {
    fs::path p{std::string(v)};
    return p.is_absolute() ? p : base_dir / p;
  };
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw PreconditionError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "endpoint") cfg.endpoint = value;
    else if (key == "model_name") cfg.model_name = value;
    else if (key == "size_ladder") cfg.size_ladder = parse_size_list(value);
    else if (key == "target_form") cfg.target_form = to_lower_ascii(value);
    else if (key == "raw_dir") cfg.raw_dir = path_value(value);
    else if (key == "annotated_dir") cfg.annotated_dir = path_value(value);
    else if (key == "reannotated_dir") cfg.reannotated_dir = path_value(value);
    else if (key == "token_dir") cfg.token_dir = path_value(value);
    else if (key == "grouped_dir") cfg.grouped_dir = path_value(value);
    else if (key == "models_dir") cfg.models_dir = path_value(value);
    else if (key == "reports_dir") cfg.reports_dir = path_value(value);
    else if (key == "wpr_test") cfg.wpr_test = path_value(value);
    else if (key == "cst_test") cfg.cst_test = path_value(value);
    else if (key == "open_class_file") cfg.open_class_file = path_value(value);
    else if (key == "open_class_min_forms") cfg.open_class_min_forms = parse_number<std::size_t>(key, value);
    else if (key == "min_samples") cfg.params.min_samples = parse_number<std::size_t>(key, value);
    else if (key == "min_gain") cfg.params.min_gain = parse_number<double>(key, value);
    else if (key == "add_lambda") cfg.params.add_lambda = parse_number<double>(key, value);
    else if (key == "suffix_length") cfg.params.suffix_length = parse_number<std::size_t>(key, value);
    else if (key == "rare_threshold") cfg.params.rare_threshold = parse_number<std::size_t>(key, value);
    else if (key == "beam") cfg.beam = parse_number<double>(key, value);
    else throw PreconditionError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
  }
}

void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
  apply_config_text(cfg, read_file(path), path.parent_path());
}

}  // namespace thattag
