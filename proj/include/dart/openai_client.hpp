#pragma once

#include <functional>
#include <optional>
#include <string>

#include "dart/records.hpp"

namespace dart::gateway {

// "http://host:port" with an optional "|model-name" suffix.
struct EndpointSpec {
    std::string base_url;
    std::string model = "default";

    static EndpointSpec parse(const std::string& s);
    std::string display() const;
};

struct RetryPolicy {
    int max_attempts = 3;
    int initial_backoff_ms = 500;
    double backoff_multiplier = 2.0;
    double jitter_fraction = 0.25;
};

struct ChatResult {
    bool ok = false;
    std::string content;
    std::optional<long long> completion_tokens;
    std::string finish_reason;  // server string ("stop", "length", ...)
    std::string error;          // transport detail when !ok
};

// What a transport returns for one attempt. `transport_ok` false means the
// request never produced an HTTP status (connect failure, timeout).
struct TransportResult {
    bool transport_ok = false;
    int status = 0;
    std::string body;
    std::string error;
};

using Transport = std::function<TransportResult(const std::string& base_url,
                                                const std::string& path,
                                                const std::string& body)>;

// Returns a transport backed by cpp-httplib. Reads the API key for the
// Authorization header from the DART_API_KEY environment variable.
Transport http_transport();

// Minimal OpenAI-compatible chat-completions client. 4xx statuses raise
// ConfigError immediately (the request itself is wrong); transport failures
// and 5xx retry with exponential backoff plus jitter, then surface as
// ok=false so callers can record an ERROR row instead of dropping it.
class ChatClient {
public:
    explicit ChatClient(RetryPolicy policy = {}, Transport transport = {});

    ChatResult complete(const EndpointSpec& endpoint, const std::string& user_prompt,
                        const SamplingParams& params) const;

    const RetryPolicy& policy() const { return policy_; }

private:
    RetryPolicy policy_;
    Transport transport_;
};

}  // namespace dart::gateway
