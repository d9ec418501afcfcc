#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "coa/backend.hpp"

namespace coa {

/// One JSON file per request digest. Concurrent reads, serialized writes;
/// entries are written to a temporary file and renamed into place.
class ReplayCache {
public:
    explicit ReplayCache(std::filesystem::path dir);

    std::optional<GenerationResponse> get(const std::string& key) const;
    void put(const std::string& key, const GenerationResponse& response);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    std::filesystem::path entry_path(const std::string& key) const;

private:
    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
};

/// Serves requests from a ReplayCache. With an inner backend, misses are
/// forwarded and recorded; without one, a miss raises CacheMiss.
class CachingBackend final : public Backend {
public:
    CachingBackend(std::shared_ptr<ReplayCache> cache, std::unique_ptr<Backend> inner);
    CachingBackend(std::shared_ptr<ReplayCache> cache, BackendDescriptor descriptor);

    const BackendDescriptor& descriptor() const override { return descriptor_; }

protected:
    GenerationResponse do_generate(const GenerationRequest& request) override;

private:
    std::shared_ptr<ReplayCache> cache_;
    std::unique_ptr<Backend> inner_;
    BackendDescriptor descriptor_;
};

}  // namespace coa
