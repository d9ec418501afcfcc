#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "coa/text_budget.hpp"

namespace coa {

/// Default generation cap for the largest model class.
inline constexpr std::size_t kLargeModelMaxTokens = 2048;
/// Default generation cap for every other model.
inline constexpr std::size_t kDefaultMaxTokens = 1024;

struct GenerationRequest {
    std::string prompt;
    std::size_t max_tokens = kDefaultMaxTokens;
    double temperature = 0.0;
    std::optional<std::uint64_t> seed;
};

struct GenerationResponse {
    std::string text;
    std::size_t generated_tokens = 0;
    std::size_t prompt_tokens = 0;
};

enum class BackendKind { remote_http, scripted_oracle, replay };

std::string_view to_string(BackendKind kind) noexcept;
BackendKind parse_backend_kind(std::string_view name);

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds initial_backoff{500};
    double multiplier = 2.0;
    std::chrono::milliseconds max_backoff{8000};

    /// Delay before retry number `attempt` (1-based).
    std::chrono::milliseconds backoff(int attempt) const;
};

struct BackendDescriptor {
    BackendKind kind = BackendKind::scripted_oracle;
    std::string endpoint;
    std::string model_name = "default";
    std::size_t window = 8000;
    RetryPolicy retry;
    TokenCounter counter;
    /// Name of the environment variable holding the API credential.
    std::string api_key_env = "COA_API_KEY";
    std::chrono::seconds timeout{120};
    /// Zero disables rate limiting.
    double max_requests_per_second = 0.0;
    /// Replay store; used by the replay kind and by read-through recording.
    std::string cache_dir;

    void validate() const;
};

/// Content-addressed digest of a request as seen by a given model.
std::string cache_key(const GenerationRequest& request, std::string_view model_name);

/// A generation service. Implementations must tolerate concurrent calls.
class Backend {
public:
    virtual ~Backend() = default;

    /// Checks the window precondition, then delegates to the implementation.
    GenerationResponse generate(const GenerationRequest& request);

    virtual const BackendDescriptor& descriptor() const = 0;

protected:
    virtual GenerationResponse do_generate(const GenerationRequest& request) = 0;
};

/// Builds the backend described by `descriptor`. Scripted and remote kinds
/// are wrapped in a read-through replay cache when `cache_dir` is set.
std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor);

}  // namespace coa
