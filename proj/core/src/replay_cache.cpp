#include "coa/replay_cache.hpp"

#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "coa/errors.hpp"

namespace coa {

namespace fs = std::filesystem;

ReplayCache::ReplayCache(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
        throw ConfigError("cannot create cache directory " + dir_.string() + ": " + ec.message());
    }
}

fs::path ReplayCache::entry_path(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<GenerationResponse> ReplayCache::get(const std::string& key) const {
    std::shared_lock lock(mutex_);
    std::ifstream in(entry_path(key), std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        const auto doc = nlohmann::json::parse(buffer.str());
        GenerationResponse response;
        response.text = doc.at("text").get<std::string>();
        response.generated_tokens = doc.at("generated_tokens").get<std::size_t>();
        response.prompt_tokens = doc.at("prompt_tokens").get<std::size_t>();
        return response;
    } catch (const nlohmann::json::exception& e) {
        throw BackendError("corrupt cache entry " + entry_path(key).string() + ": " + e.what());
    }
}

void ReplayCache::put(const std::string& key, const GenerationResponse& response) {
    nlohmann::ordered_json doc;
    doc["text"] = response.text;
    doc["generated_tokens"] = response.generated_tokens;
    doc["prompt_tokens"] = response.prompt_tokens;
    const std::string body = doc.dump(2) + "\n";

    std::unique_lock lock(mutex_);
    std::ostringstream tmp_name;
    tmp_name << key << ".tmp." << std::this_thread::get_id();
    const fs::path tmp = dir_ / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << body;
        if (!out) {
            throw BackendError("cannot write cache entry " + tmp.string());
        }
    }
    fs::rename(tmp, entry_path(key));
}

CachingBackend::CachingBackend(std::shared_ptr<ReplayCache> cache, std::unique_ptr<Backend> inner)
    : cache_(std::move(cache)), inner_(std::move(inner)), descriptor_(inner_->descriptor()) {}

CachingBackend::CachingBackend(std::shared_ptr<ReplayCache> cache, BackendDescriptor descriptor)
    : cache_(std::move(cache)), descriptor_(std::move(descriptor)) {}

GenerationResponse CachingBackend::do_generate(const GenerationRequest& request) {
    const std::string key = cache_key(request, descriptor_.model_name);
    if (auto hit = cache_->get(key)) {
        return *hit;
    }
    if (!inner_) {
        throw CacheMiss("no cached response for request " + key + " in " + cache_->dir().string());
    }
    GenerationResponse response = inner_->generate(request);
    cache_->put(key, response);
    return response;
}

}  // namespace coa
