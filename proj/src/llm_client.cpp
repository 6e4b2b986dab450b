#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "irony/llm_client.hpp"

#include "irony/prompts.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <thread>

namespace irony {

void LLMClientConfig::validate() const {
    if (model_id.empty()) throw std::invalid_argument("augment.model_id must not be empty");
    if (!(temperature >= 0.0)) throw std::invalid_argument("augment.temperature must be >= 0");
    if (max_attempts < 1) throw std::invalid_argument("augment.max_attempts must be >= 1");
    if (max_concurrent_requests < 1) {
        throw std::invalid_argument("augment.max_concurrent_requests must be >= 1");
    }
    if (backoff_base.count() < 0) throw std::invalid_argument("augment.backoff_base must be >= 0");
}

MockLLMClient::MockLLMClient(std::string echo_template) : echo_template_(std::move(echo_template)) {}

void MockLLMClient::set_canned(std::map<std::string, std::string> responses) {
    canned_ = std::move(responses);
}

void MockLLMClient::fail_first(int n) { fail_first_ = n; }

void MockLLMClient::reset_counters() {
    std::lock_guard lock(mutex_);
    failures_seen_.clear();
    calls_ = 0;
    max_in_flight_ = 0;
}

std::string MockLLMClient::complete(const ChatRequest& request) {
    ++calls_;
    const int now = ++in_flight_;
    int prev = max_in_flight_.load();
    while (now > prev && !max_in_flight_.compare_exchange_weak(prev, now)) {
    }
    struct Leave {
        std::atomic<int>& n;
        ~Leave() { --n; }
    } leave{in_flight_};

    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

    if (fail_first_ > 0) {
        std::lock_guard lock(mutex_);
        int& seen = failures_seen_[request.prompt];
        if (seen < fail_first_) {
            ++seen;
            throw TransportError("mock: injected failure " + std::to_string(seen));
        }
    }

    const std::string sentence(sentence_of(request.prompt));
    if (auto it = canned_.find(sentence); it != canned_.end()) return it->second;

    std::string out;
    std::string_view tpl = echo_template_;
    constexpr std::string_view kSlot = "{text}";
    for (std::size_t pos = 0;;) {
        auto hit = tpl.find(kSlot, pos);
        if (hit == std::string_view::npos) {
            out += tpl.substr(pos);
            break;
        }
        out += tpl.substr(pos, hit - pos);
        out += sentence;
        pos = hit + kSlot.size();
    }
    return out;
}

ChatCompletionsClient::ChatCompletionsClient(std::string endpoint, std::string api_key_env,
                                             std::chrono::milliseconds timeout)
    : timeout_(timeout) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("endpoint must start with http:// or https://");
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    scheme_host_ = endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/v1/chat/completions" : endpoint.substr(path_start);
    const char* key = std::getenv(api_key_env.c_str());
    if (!key || !*key) {
        throw std::invalid_argument("environment variable " + api_key_env + " holding the API key is not set");
    }
    api_key_ = key;
}

std::string ChatCompletionsClient::request_body(const ChatRequest& request) {
    nlohmann::ordered_json body;
    body["model"] = request.model_id;
    body["temperature"] = request.temperature;
    body["n"] = 1;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
    return body.dump();
}

std::string ChatCompletionsClient::parse_response(const std::string& body) {
    try {
        const auto json = nlohmann::json::parse(body);
        return json.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
        throw TransportError(std::string("malformed chat completion response: ") + ex.what());
    }
}

std::string ChatCompletionsClient::complete(const ChatRequest& request) {
    httplib::Client client(scheme_host_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - seconds);
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    client.set_connection_timeout(seconds.count(), micros.count());

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto result = client.Post(path_, headers, request_body(request), "application/json");
    if (!result) {
        throw TransportError("chat completion request failed: " + httplib::to_string(result.error()));
    }
    if (result->status != 200) {
        throw TransportError("chat completion returned HTTP " + std::to_string(result->status));
    }
    return parse_response(result->body);
}

}  // namespace irony
