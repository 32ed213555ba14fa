#include "wmlab/remote.hpp"

#include <httplib.h>
#include <json.hpp>

namespace wmlab {

namespace {

struct ParsedUrl {
  std::string host_port;  // scheme://host:port, as httplib::Client wants
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const std::size_t host_begin =
      scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  if (path_begin == std::string::npos) return {url, "/"};
  return {url.substr(0, path_begin), url.substr(path_begin)};
}

std::string post_json(const std::string& url, int timeout_ms,
                      const nlohmann::json& body) {
  const ParsedUrl parsed = split_url(url);
  httplib::Client client(parsed.host_port);
  client.set_connection_timeout(0, timeout_ms * 1000);
  client.set_read_timeout(0, timeout_ms * 1000);
  client.set_write_timeout(0, timeout_ms * 1000);

  const auto res =
      client.Post(parsed.path, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        err == httplib::Error::Read || err == httplib::Error::Write) {
      throw RemoteError(RemoteErrorKind::timeout,
                        "timeout talking to " + url);
    }
    throw RemoteError(RemoteErrorKind::transport,
                      "transport failure talking to " + url + ": " +
                          httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw RemoteError(RemoteErrorKind::application,
                      url + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

std::string extract_text(const std::string& body, const std::string& url) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw RemoteError(RemoteErrorKind::protocol,
                      url + " returned a non-JSON body");
  }
  if (!parsed.is_object() || !parsed.contains("text") ||
      !parsed["text"].is_string()) {
    throw RemoteError(RemoteErrorKind::protocol,
                      url + " response is missing the \"text\" field");
  }
  return parsed["text"].get<std::string>();
}

}  // namespace

std::string remote_generate(const RemoteLmConfig& config,
                            std::string_view prompt,
                            const GenerationParams& gen) {
  const nlohmann::json body = {
      {"prompt", std::string(prompt)},
      {"max_tokens", gen.length},
      {"temperature", gen.temperature},
      {"seed", gen.seed},
  };
  const std::string response = post_json(config.url, config.timeout_ms, body);
  return extract_text(response, config.url);
}

std::string translate(const TranslatorClient& client, std::string_view text) {
  const nlohmann::json body = {
      {"text", std::string(text)},
      {"source_lang", client.source_lang},
      {"target_lang", client.target_lang},
  };
  const std::string response = post_json(client.url, client.timeout_ms, body);
  const std::string translated = extract_text(response, client.url);
  if (translated.empty()) {
    throw RemoteError(RemoteErrorKind::empty_result,
                      client.url + " returned an empty translation");
  }
  return translated;
}

std::string rtt_via_translator(std::string_view text,
                               const TranslatorClient& forward,
                               const TranslatorClient& backward) {
  return translate(backward, translate(forward, text));
}

}  // namespace wmlab
