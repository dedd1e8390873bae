#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "gdsl/error.hpp"
#include "gdsl/nlcmd.hpp"

namespace gdsl {

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string normalize_key(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  while (!out.empty() && (out.back() == ' ' || out.back() == '.' || out.back() == '!' || out.back() == '?')) out.pop_back();
  return out;
}

}  // namespace

MockBackend MockBackend::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read mock responses: " + path, "path");
  std::stringstream ss;
  ss << in.rdbuf();
  Json j = Json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::MalformedInput, "mock responses must be a JSON object", "path");
  }
  return MockBackend(std::move(j));
}

std::optional<Json> MockBackend::translate(const std::string& text, const std::string&) {
  if (auto it = responses_.find(text); it != responses_.end()) return *it;
  const std::string key = normalize_key(text);
  for (const auto& [k, v] : responses_.items()) {
    if (normalize_key(k) == key) return v;
  }
  return std::nullopt;
}

std::optional<Json> HttpLlmBackend::translate(const std::string& text, const std::string& document_summary) {
  // Only plain http endpoints: scheme://host[:port]/path
  const std::string& url = cfg_.endpoint;
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) return std::nullopt;
  const auto slash = url.find('/', scheme.size());
  const std::string host = url.substr(0, slash);
  const std::string path = slash == std::string::npos ? "/" : url.substr(slash);

  httplib::Client cli(host);
  const auto secs = cfg_.timeout.count() / 1000;
  const auto usecs = (cfg_.timeout.count() % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  const Json body{{"model", cfg_.model}, {"text", text}, {"document", document_summary}};
  auto res = cli.Post(path, headers, body.dump(), "application/json");
  if (!res || res->status != 200) return std::nullopt;
  Json j = Json::parse(res->body, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

std::unique_ptr<LlmBackend> backend_from_env() {
  const std::string kind = env_or("GDSL_LLM_BACKEND", "mock");
  if (kind == "none") return nullptr;
  if (kind == "http") {
    HttpLlmBackend::Config cfg;
    cfg.endpoint = env_or("GDSL_LLM_ENDPOINT", "");
    cfg.api_key = env_or("GDSL_LLM_API_KEY", "");
    cfg.model = env_or("GDSL_LLM_MODEL", "");
    const std::string t = env_or("GDSL_LLM_TIMEOUT_MS", "10000");
    char* end = nullptr;
    const long ms = std::strtol(t.c_str(), &end, 10);
    if (end && *end == '\0' && ms > 0) cfg.timeout = std::chrono::milliseconds(ms);
    return std::make_unique<HttpLlmBackend>(std::move(cfg));
  }
  const std::string file = env_or("GDSL_LLM_MOCK_FILE", "");
  if (!file.empty()) return std::make_unique<MockBackend>(MockBackend::from_file(file));
  return std::make_unique<MockBackend>();
}

}  // namespace gdsl
