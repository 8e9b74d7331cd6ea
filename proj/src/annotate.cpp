#include "thattag/annotate.hpp"

#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "thattag/conllu.hpp"
#include "thattag/error.hpp"
#include "thattag/fsutil.hpp"

namespace fs = std::filesystem;

namespace thattag {

namespace {

std::string excerpt(std::string_view body) {
  constexpr std::size_t kMax = 200;
  return std::string(body.substr(0, kMax));
}

// "scheme://host[:port]" and "/path"
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw PreconditionError("endpoint is not a URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class RateLimiter {
 public:
  explicit RateLimiter(std::chrono::milliseconds interval) : interval_(interval) {}

  void wait() {
    const auto now = std::chrono::steady_clock::now();
    if (started_ && now < last_ + interval_) std::this_thread::sleep_until(last_ + interval_);
    last_ = std::chrono::steady_clock::now();
    started_ = true;
  }

 private:
  std::chrono::milliseconds interval_;
  std::chrono::steady_clock::time_point last_{};
  bool started_ = false;
};

}  // namespace

void AnnotateRequest::validate() const {
  if (data.empty()) throw PreconditionError("annotate request has empty data");
  if (model.empty()) throw PreconditionError("annotate request has empty model name");
}

std::vector<std::pair<std::string, std::string>> AnnotateRequest::form_fields() const {
  auto yes_no = [](bool b) { return std::string(b ? "yes" : "no"); };
  return {{"data", data},
          {"model", model},
          {"tokenizer", yes_no(tokenizer)},
          {"tagger", yes_no(tagger)},
          {"parser", yes_no(parser)}};
}

std::string resolve_endpoint(const std::optional<std::string>& explicit_endpoint) {
  if (explicit_endpoint && !explicit_endpoint->empty()) return *explicit_endpoint;
  if (const char* env = std::getenv(kEndpointEnvVar); env && *env) return env;
  return kDefaultEndpoint;
}

std::string extract_result(std::string_view json_body) {
  const auto j = nlohmann::json::parse(json_body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ServiceError(200, "response is not a JSON object: " + excerpt(json_body));
  auto it = j.find("result");
  if (it == j.end() || !it->is_string()) throw ServiceError(200, "response has no string 'result' member");
  return it->get<std::string>();
}

AnnotateResponse annotate_text(const AnnotateRequest& request, const std::string& endpoint) {
  request.validate();
  const auto [base, path] = split_url(endpoint);

  httplib::Client client(base);
  client.set_connection_timeout(30);
  client.set_read_timeout(300);
  client.set_follow_location(true);

  httplib::Params params;
  for (const auto& [k, v] : request.form_fields()) params.emplace(k, v);
  auto res = client.Post(path, params);
  if (!res) throw TransportError("request to " + endpoint + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw ServiceError(res->status, excerpt(res->body));

  AnnotateResponse response;
  response.status = res->status;
  response.conllu = extract_result(res->body);
  const auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (auto m = j.find("model"); m != j.end() && m->is_string()) response.service_message = m->get<std::string>();
  try {
    parse_conllu(response.conllu, "response");
  } catch (const MalformedRow& e) {
    throw ServiceError(res->status, std::string("result is not valid CoNLL-U: ") + e.what());
  }
  return response;
}

AnnotateSummary annotate_directory(const fs::path& input_dir, const fs::path& output_dir,
                                   const AnnotateRequest& request_template, const std::string& endpoint,
                                   const AnnotateOptions& options) {
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec || !fs::is_directory(output_dir)) throw IoError("cannot create output directory " + output_dir.string());

  AnnotateSummary summary;
  const bool offline = endpoint == kOfflineEndpoint;
  RateLimiter limiter(options.min_interval);

  for (const fs::path& input : list_files(input_dir, offline ? "*.conllu" : "*.txt")) {
    const fs::path output = output_dir / (input.stem().string() + ".conllu");
    if (fs::exists(output)) {
      ++summary.files_skipped;
      continue;
    }
    const std::string name = input.filename().string();
    std::string conllu;
    try {
      if (offline) {
        conllu = read_file(input);
        parse_conllu(conllu, input.stem().string());
      } else {
        AnnotateRequest req = request_template;
        req.data = read_file(input);
        limiter.wait();
        conllu = annotate_text(req, endpoint).conllu;
      }
    } catch (const Error& e) {
      summary.files_failed.emplace_back(name, e.what());
      continue;
    }
    write_file_atomic(output, conllu);
    ++summary.files_done;
  }
  return summary;
}

}  // namespace thattag
