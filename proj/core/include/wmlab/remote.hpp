#pragma once

/**
 * HTTP clients for out-of-process services.
 *
 * Remote LM:    POST {url}  body {"prompt", "max_tokens", "temperature",
 *               "seed"} -> 200 {"text": "..."}
 * Translator:   POST {url}  body {"text", "source_lang", "target_lang"}
 *               -> 200 {"text": "..."}
 *
 * Failures carry a kind so the pipeline can distinguish transport
 * problems (unreachable, timeout) from protocol and application errors.
 */

#include "wmlab/lm.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace wmlab {

enum class RemoteErrorKind {
  transport,     // connect/refused/reset
  timeout,       // deadline exceeded
  protocol,      // malformed response body
  application,   // HTTP error status
  empty_result,  // syntactically valid but empty translation/generation
};

class RemoteError : public std::runtime_error {
 public:
  RemoteError(RemoteErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  RemoteErrorKind kind() const noexcept { return kind_; }

 private:
  RemoteErrorKind kind_;
};

struct RemoteLmConfig {
  std::string url;        // e.g. http://127.0.0.1:8080/generate
  int timeout_ms = 30000;
};

/// One generation round-trip; safe to call concurrently.
std::string remote_generate(const RemoteLmConfig& config,
                            std::string_view prompt,
                            const GenerationParams& gen);

struct TranslatorClient {
  std::string url;
  std::string source_lang;
  std::string target_lang;
  int timeout_ms = 30000;
};

std::string translate(const TranslatorClient& client, std::string_view text);

/// back(forward(text)).
std::string rtt_via_translator(std::string_view text,
                               const TranslatorClient& forward,
                               const TranslatorClient& backward);

}  // namespace wmlab
