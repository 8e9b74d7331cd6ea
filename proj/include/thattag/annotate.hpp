#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace thattag {

inline constexpr const char* kDefaultEndpoint = "https://lindat.mff.cuni.cz/services/udpipe/api/process";
inline constexpr const char* kOfflineEndpoint = "offline";
inline constexpr const char* kEndpointEnvVar = "THAT_UDPIPE_URL";

struct AnnotateRequest {
  std::string data;
  std::string model = "english-ewt";
  bool tokenizer = true;
  bool tagger = true;
  bool parser = true;

  // Throws PreconditionError on empty data or model.
  void validate() const;
  // Form fields exactly as the service expects them ("yes" for true).
  std::vector<std::pair<std::string, std::string>> form_fields() const;
};

struct AnnotateResponse {
  std::string conllu;
  int status = 0;
  std::string service_message;
};

// Explicit value, else $THAT_UDPIPE_URL, else the public endpoint.
std::string resolve_endpoint(const std::optional<std::string>& explicit_endpoint);

// Pulls the "result" member out of the service's JSON envelope.
std::string extract_result(std::string_view json_body);

// Form-encoded POST. Throws ServiceError on a non-200 status (or a 200 whose
// result is not CoNLL-U) and TransportError when the request never completes.
AnnotateResponse annotate_text(const AnnotateRequest& request, const std::string& endpoint);

struct AnnotateOptions {
  std::chrono::milliseconds min_interval{500};
};

struct AnnotateSummary {
  std::size_t files_done = 0;
  std::size_t files_skipped = 0;
  std::vector<std::pair<std::string, std::string>> files_failed;  // file name, reason
};

// Each "<name>.txt" becomes "<name>.conllu" in output_dir; existing outputs
// are skipped. With endpoint "offline", pre-annotated "*.conllu" inputs are
// validated and copied instead. Per-file failures are collected, not thrown.
AnnotateSummary annotate_directory(const std::filesystem::path& input_dir, const std::filesystem::path& output_dir,
                                   const AnnotateRequest& request_template, const std::string& endpoint,
                                   const AnnotateOptions& options = {});

}  // namespace thattag
