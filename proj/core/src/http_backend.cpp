#include "coa/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "coa/errors.hpp"

namespace coa {

namespace {

bool is_transient(int status) { return status == 408 || status == 429 || status >= 500; }

// Splits "https://host:port/path" into the client base and the request path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const std::size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos) {
        throw ConfigError("endpoint must start with http:// or https://: " + endpoint);
    }
    const std::size_t slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) {
        return {endpoint, "/v1/chat/completions"};
    }
    return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

}  // namespace

RateLimiter::RateLimiter(double max_per_second) {
    if (max_per_second > 0.0) {
        interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(1.0 / max_per_second));
    }
}

void RateLimiter::acquire() {
    if (interval_ == std::chrono::steady_clock::duration::zero()) {
        return;
    }
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_);
        next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

std::string chat_completion_body(const GenerationRequest& request, const std::string& model) {
    nlohmann::ordered_json body;
    body["model"] = model;
    body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", request.prompt}}});
    body["max_tokens"] = request.max_tokens;
    body["temperature"] = request.temperature;
    if (request.seed) {
        body["seed"] = *request.seed;
    }
    return body.dump();
}

std::string parse_chat_completion(const std::string& body) {
    try {
        const auto doc = nlohmann::json::parse(body);
        const auto& choice = doc.at("choices").at(0);
        if (choice.contains("message")) {
            const auto& content = choice.at("message").at("content");
            return content.is_null() ? std::string() : content.get<std::string>();
        }
        return choice.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("malformed completion response: ") + e.what());
    }
}

HttpBackend::HttpBackend(BackendDescriptor descriptor)
    : descriptor_(std::move(descriptor)), limiter_(descriptor_.max_requests_per_second) {
    descriptor_.validate();
    std::tie(scheme_host_port_, path_) = split_endpoint(descriptor_.endpoint);
}

std::size_t HttpBackend::attempts() const {
    std::lock_guard lock(stats_mutex_);
    return attempts_;
}

GenerationResponse HttpBackend::do_generate(const GenerationRequest& request) {
    const std::string body = chat_completion_body(request, descriptor_.model_name);
    httplib::Headers headers;
    if (!descriptor_.api_key_env.empty()) {
        if (const char* key = std::getenv(descriptor_.api_key_env.c_str()); key != nullptr && *key != '\0') {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }

    std::string last_error;
    for (int attempt = 1; attempt <= descriptor_.retry.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(descriptor_.retry.backoff(attempt - 1));
        }
        limiter_.acquire();
        {
            std::lock_guard lock(stats_mutex_);
            ++attempts_;
        }
        httplib::Client client(scheme_host_port_);
        client.set_connection_timeout(descriptor_.timeout);
        client.set_read_timeout(descriptor_.timeout);
        client.set_write_timeout(descriptor_.timeout);
        auto result = client.Post(path_, headers, body, "application/json");
        if (!result) {
            last_error = "connection error: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status == 200) {
            GenerationResponse response;
            response.text = parse_chat_completion(result->body);
            response.prompt_tokens = descriptor_.counter.count(request.prompt);
            response.generated_tokens = descriptor_.counter.count(response.text);
            return response;
        }
        last_error = "HTTP " + std::to_string(result->status);
        if (!is_transient(result->status)) {
            throw BackendError(last_error + " from " + descriptor_.endpoint + ": " + result->body.substr(0, 512));
        }
    }
    throw TransientExhausted("gave up after " + std::to_string(descriptor_.retry.max_attempts) +
                             " attempts against " + descriptor_.endpoint + " (" + last_error + ")");
}

}  // namespace coa
