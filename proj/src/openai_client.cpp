#include "dart/openai_client.hpp"

#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include "dart/common.hpp"
#include "httplib.h"

namespace dart::gateway {

EndpointSpec EndpointSpec::parse(const std::string& s) {
    EndpointSpec spec;
    size_t bar = s.rfind('|');
    if (bar == std::string::npos) {
        spec.base_url = trim(s);
    } else {
        spec.base_url = trim(s.substr(0, bar));
        spec.model = trim(s.substr(bar + 1));
    }
    if (spec.base_url.empty()) throw ConfigError("empty endpoint url");
    if (spec.model.empty()) throw ConfigError("empty model name in endpoint '" + s + "'");
    return spec;
}

std::string EndpointSpec::display() const { return base_url + "|" + model; }

Transport http_transport() {
    return [](const std::string& base_url, const std::string& path,
              const std::string& body) -> TransportResult {
        httplib::Client client(base_url);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(600, 0);
        httplib::Headers headers;
        if (const char* key = std::getenv("DART_API_KEY"); key && *key) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
        auto res = client.Post(path, headers, body, "application/json");
        TransportResult out;
        if (!res) {
            out.error = "transport: " + httplib::to_string(res.error());
            return out;
        }
        out.transport_ok = true;
        out.status = res->status;
        out.body = res->body;
        return out;
    };
}

ChatClient::ChatClient(RetryPolicy policy, Transport transport)
    : policy_(policy), transport_(transport ? std::move(transport) : http_transport()) {}

ChatResult ChatClient::complete(const EndpointSpec& endpoint, const std::string& user_prompt,
                                const SamplingParams& params) const {
    params.validate();

    nlohmann::json body = {
        {"model", endpoint.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", user_prompt}}})},
        {"temperature", params.temperature},
        {"top_p", params.top_p},
        {"max_tokens", params.max_tokens},
    };
    if (params.seed) body["seed"] = *params.seed;
    std::string payload = body.dump();

    // Jitter is deterministic per process only in the sense that it does not
    // affect outputs, so a plain random_device seed is fine here.
    static thread_local std::mt19937 rng{std::random_device{}()};

    std::string last_error;
    for (int attempt = 0; attempt < std::max(policy_.max_attempts, 1); ++attempt) {
        if (attempt > 0) {
            double backoff = policy_.initial_backoff_ms *
                             std::pow(policy_.backoff_multiplier, attempt - 1);
            std::uniform_real_distribution<double> jitter(1.0 - policy_.jitter_fraction,
                                                          1.0 + policy_.jitter_fraction);
            auto delay = std::chrono::duration<double, std::milli>(backoff * jitter(rng));
            std::this_thread::sleep_for(delay);
        }

        TransportResult res = transport_(endpoint.base_url, "/v1/chat/completions", payload);
        if (!res.transport_ok) {
            last_error = res.error.empty() ? "transport failure" : res.error;
            continue;
        }
        if (res.status >= 400 && res.status < 500) {
            throw ConfigError("endpoint " + endpoint.base_url + " rejected request (HTTP " +
                              std::to_string(res.status) + "): " + res.body);
        }
        if (res.status != 200) {
            last_error = "HTTP " + std::to_string(res.status);
            continue;
        }

        ChatResult out;
        try {
            nlohmann::json j = nlohmann::json::parse(res.body);
            const auto& choice = j.at("choices").at(0);
            out.content = choice.at("message").at("content").get<std::string>();
            out.finish_reason = choice.value("finish_reason", "stop");
            if (j.contains("usage") && j["usage"].contains("completion_tokens")) {
                out.completion_tokens = j["usage"]["completion_tokens"].get<long long>();
            }
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("malformed completion payload: ") + e.what();
            continue;
        }
        out.ok = true;
        return out;
    }

    ChatResult failed;
    failed.error = last_error.empty() ? "no attempts made" : last_error;
    return failed;
}

}  // namespace dart::gateway
