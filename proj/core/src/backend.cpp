#include "coa/backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "coa/digest.hpp"
#include "coa/errors.hpp"
#include "coa/http_backend.hpp"
#include "coa/replay_cache.hpp"
#include "coa/scripted_backend.hpp"

namespace coa {

std::string_view to_string(BackendKind kind) noexcept {
    switch (kind) {
        case BackendKind::remote_http: return "remote_http";
        case BackendKind::scripted_oracle: return "scripted";
        case BackendKind::replay: return "replay";
    }
    return "scripted";
}

BackendKind parse_backend_kind(std::string_view name) {
    if (name == "remote_http" || name == "http" || name == "remote") return BackendKind::remote_http;
    if (name == "scripted" || name == "scripted_oracle") return BackendKind::scripted_oracle;
    if (name == "replay") return BackendKind::replay;
    throw ConfigError("unknown backend '" + std::string(name) + "' (expected remote_http, scripted or replay)");
}

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
    const double scaled = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, std::max(0, attempt - 1));
    const double capped = std::min(scaled, static_cast<double>(max_backoff.count()));
    return std::chrono::milliseconds(static_cast<std::int64_t>(capped));
}

void BackendDescriptor::validate() const {
    if (window == 0) {
        throw ConfigError("backend window must be positive");
    }
    if (kind == BackendKind::remote_http && endpoint.empty()) {
        throw ConfigError("remote_http backend requires an endpoint");
    }
    if (kind == BackendKind::replay && cache_dir.empty()) {
        throw ConfigError("replay backend requires a cache directory");
    }
    if (retry.max_attempts < 1) {
        throw ConfigError("retry.max_attempts must be at least 1");
    }
}

std::string cache_key(const GenerationRequest& request, std::string_view model_name) {
    char temperature[32];
    std::snprintf(temperature, sizeof temperature, "%.17g", request.temperature);
    std::string material;
    material.reserve(request.prompt.size() + model_name.size() + 96);
    // Length-prefixed fields keep the encoding injective.
    auto field = [&material](std::string_view name, std::string_view value) {
        material.append(name);
        material.push_back(':');
        material.append(std::to_string(value.size()));
        material.push_back(':');
        material.append(value);
        material.push_back('\n');
    };
    field("model", model_name);
    field("max_tokens", std::to_string(request.max_tokens));
    field("temperature", temperature);
    field("seed", request.seed ? std::to_string(*request.seed) : std::string("none"));
    field("prompt", request.prompt);
    return sha256_hex(material);
}

GenerationResponse Backend::generate(const GenerationRequest& request) {
    const BackendDescriptor& desc = descriptor();
    const std::size_t prompt_tokens = desc.counter.count(request.prompt);
    if (prompt_tokens > desc.window) {
        throw ContextOverflow("prompt of " + std::to_string(prompt_tokens) + " tokens exceeds the " +
                              std::to_string(desc.window) + "-token window of " + desc.model_name);
    }
    return do_generate(request);
}

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor) {
    descriptor.validate();
    std::unique_ptr<Backend> inner;
    switch (descriptor.kind) {
        case BackendKind::replay:
            return std::make_unique<CachingBackend>(std::make_shared<ReplayCache>(descriptor.cache_dir), descriptor);
        case BackendKind::scripted_oracle:
            inner = std::make_unique<ScriptedOracleBackend>(descriptor);
            break;
        case BackendKind::remote_http:
            inner = std::make_unique<HttpBackend>(descriptor);
            break;
    }
    if (descriptor.cache_dir.empty()) {
        return inner;
    }
    return std::make_unique<CachingBackend>(std::make_shared<ReplayCache>(descriptor.cache_dir), std::move(inner));
}

}  // namespace coa
