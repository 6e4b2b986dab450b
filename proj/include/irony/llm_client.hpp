#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace irony {

struct ChatRequest {
    std::string model_id;
    double temperature = 0.0;
    std::string prompt;
};

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Chat-completion transport: one prompt in, one completion out.
/// Implementations must be safe to call from several threads at once.
class LLMClient {
public:
    virtual ~LLMClient() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

struct LLMClientConfig {
    std::string model_id = "gpt-4";
    double temperature = 0.0;
    int max_attempts = 3;
    std::chrono::milliseconds backoff_base{500};
    std::chrono::milliseconds request_timeout{60000};
    int max_concurrent_requests = 4;

    /// Throws std::invalid_argument on a broken invariant.
    void validate() const;
};

/// Deterministic in-process client for tests and desk-scale runs.
///
/// Responses come from, in order: the canned map (keyed by the sentence
/// embedded in the prompt), then the echo template where `{text}` expands to
/// that sentence. A request fails with TransportError while its per-prompt
/// failure budget lasts.
class MockLLMClient : public LLMClient {
public:
    explicit MockLLMClient(std::string echo_template = "{text}");

    void set_canned(std::map<std::string, std::string> responses);
    /// Every prompt fails its first `n` attempts.
    void fail_first(int n);
    void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }

    std::string complete(const ChatRequest& request) override;

    int calls() const noexcept { return calls_.load(); }
    int max_in_flight() const noexcept { return max_in_flight_.load(); }
    void reset_counters();

private:
    std::string echo_template_;
    std::map<std::string, std::string> canned_;
    int fail_first_ = 0;
    std::chrono::milliseconds latency_{0};

    std::mutex mutex_;
    std::map<std::string, int> failures_seen_;
    std::atomic<int> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
};

/// OpenAI-style `POST /v1/chat/completions` adapter. The bearer token is read
/// from the named environment variable at construction; an unset variable throws
/// std::invalid_argument.
class ChatCompletionsClient : public LLMClient {
public:
    ChatCompletionsClient(std::string endpoint, std::string api_key_env,
                          std::chrono::milliseconds timeout);

    std::string complete(const ChatRequest& request) override;

    static std::string request_body(const ChatRequest& request);
    static std::string parse_response(const std::string& body);

private:
    std::string scheme_host_;
    std::string path_;
    std::string api_key_;
    std::chrono::milliseconds timeout_;
};

}  // namespace irony
