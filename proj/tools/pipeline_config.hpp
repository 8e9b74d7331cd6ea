#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thattag/eval.hpp"
#include "thattag/tagger.hpp"

namespace thattag {

// Shared settings for every subcommand. Precedence: flags > config file >
// defaults (the endpoint default itself honours THAT_UDPIPE_URL).
struct PipelineConfig {
  std::string endpoint;
  std::string model_name = "english-ewt";
  std::vector<std::size_t> size_ladder = kDefaultSizeLadder;
  std::string target_form = "that";

  std::filesystem::path raw_dir = "raw";
  std::filesystem::path annotated_dir = "annotated";
  std::filesystem::path reannotated_dir = "reannotated";
  std::filesystem::path token_dir = "tokens";
  std::filesystem::path grouped_dir = "grouped";
  std::filesystem::path models_dir = "models";
  std::filesystem::path reports_dir = "reports";
  std::filesystem::path wpr_test;
  std::filesystem::path cst_test;
  std::optional<std::filesystem::path> open_class_file;
  std::size_t open_class_min_forms = kDefaultOpenClassMinForms;

  TrainParams params;
  double beam = kNoBeam;

  PipelineConfig();

  // Throws PreconditionError when an invariant is broken.
  void validate() const;
};

// Flat "key = value" lines; '#' starts a comment. Relative paths are
// resolved against base_dir. Unknown keys are rejected.
void apply_config_text(PipelineConfig& config, std::string_view text, const std::filesystem::path& base_dir);
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);

std::vector<std::size_t> parse_size_list(std::string_view text);

}  // namespace thattag
