#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace testutil {

// In-process OpenAI-compatible chat endpoint. The reply is a deterministic
// function of (model, prompt), so reruns are bit-stable.
class MockOpenAiServer {
public:
    // Returns {content, completion_tokens, finish_reason} for one request.
    struct Reply {
        std::string content;
        long long completion_tokens = -1;  // <0 omits the usage block
        std::string finish_reason = "stop";
        int status = 200;
    };
    using Handler = std::function<Reply(const std::string& model, const std::string& prompt)>;

    explicit MockOpenAiServer(Handler handler) : handler_(std::move(handler)) {
        server_.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         requests.fetch_add(1);
                         nlohmann::json body = nlohmann::json::parse(req.body);
                         std::string model = body.at("model").get<std::string>();
                         std::string prompt =
                             body.at("messages").at(0).at("content").get<std::string>();
                         Reply reply = handler_(model, prompt);
                         if (reply.status != 200) {
                             res.status = reply.status;
                             res.set_content("{\"error\":\"scripted failure\"}",
                                             "application/json");
                             return;
                         }
                         nlohmann::json out = {
                             {"id", "mock"},
                             {"object", "chat.completion"},
                             {"choices",
                              {{{"index", 0},
                                {"message", {{"role", "assistant"}, {"content", reply.content}}},
                                {"finish_reason", reply.finish_reason}}}},
                         };
                         if (reply.completion_tokens >= 0) {
                             out["usage"] = {{"completion_tokens", reply.completion_tokens},
                                             {"prompt_tokens", 10},
                                             {"total_tokens", reply.completion_tokens + 10}};
                         }
                         res.set_content(out.dump(), "application/json");
                     });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockOpenAiServer() { stop(); }

    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::atomic<int> requests{0};

private:
    Handler handler_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

// Scripted math model family: the model name carries alpha ("alpha-0.300"),
// the prompt carries the gold answer and a difficulty in brackets, e.g.
// "What is 2+3? [gold=5] [difficulty=0.4]". A model solves the problem iff
// alpha <= 1 - difficulty, and thinks longer the smaller alpha is.
inline MockOpenAiServer::Reply scripted_math_reply(const std::string& model,
                                                   const std::string& prompt) {
    double alpha = 0.0;
    if (auto pos = model.rfind('-'); pos != std::string::npos) {
        alpha = std::stod(model.substr(pos + 1));
    }
    auto bracket = [&](const std::string& key) -> std::string {
        std::string marker = "[" + key + "=";
        auto begin = prompt.find(marker);
        if (begin == std::string::npos) return "";
        begin += marker.size();
        auto end = prompt.find(']', begin);
        return prompt.substr(begin, end - begin);
    };
    std::string gold = bracket("gold");
    double difficulty = bracket("difficulty").empty() ? 0.0 : std::stod(bracket("difficulty"));

    bool correct = alpha <= 1.0 - difficulty + 1e-9;
    // Longer chains for smaller alpha and for harder problems.
    int think_words = 4 + static_cast<int>((1.0 - alpha) * 40.0 * (0.5 + difficulty));

    std::string think;
    for (int i = 0; i < think_words; ++i) {
        think += "step" + std::to_string(i) + " ";
    }
    std::string answer = correct ? gold : "987654321";
    MockOpenAiServer::Reply reply;
    reply.content = "<think>" + think + "</think>The answer is \\boxed{" + answer + "}.";
    reply.completion_tokens = think_words + 8;
    return reply;
}

}  // namespace testutil
