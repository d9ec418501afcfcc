#pragma once

#include <chrono>
#include <mutex>
#include <string>

#include "coa/backend.hpp"

namespace coa {

/// Spaces request starts at least 1/rate seconds apart.
class RateLimiter {
public:
    explicit RateLimiter(double max_per_second);
    void acquire();

private:
    std::chrono::steady_clock::duration interval_{};
    std::chrono::steady_clock::time_point next_{};
    std::mutex mutex_;
};

/// Chat-completions style JSON body for `request`.
std::string chat_completion_body(const GenerationRequest& request, const std::string& model);

/// Extracts choices[0].message.content (or choices[0].text) from a response body.
std::string parse_chat_completion(const std::string& body);

/// Remote completion client with bounded exponential-backoff retry on
/// connection errors, 408, 429 and 5xx.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(BackendDescriptor descriptor);

    const BackendDescriptor& descriptor() const override { return descriptor_; }

    /// Total HTTP attempts made so far.
    std::size_t attempts() const;

protected:
    GenerationResponse do_generate(const GenerationRequest& request) override;

private:
    BackendDescriptor descriptor_;
    std::string scheme_host_port_;
    std::string path_;
    RateLimiter limiter_;
    mutable std::mutex stats_mutex_;
    std::size_t attempts_ = 0;
};

}  // namespace coa
