#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coa/backend.hpp"
#include "coa/pipeline.hpp"
#include "coa/replay_cache.hpp"
#include "coa/errors.hpp"

namespace coa::testing {

inline BackendDescriptor descriptor_for(std::size_t window, TokenCounter counter = TokenCounter::words()) {
    BackendDescriptor d;
    d.window = window;
    d.counter = counter;
    return d;
}

/// Returns canned replies in call order.
class SequenceBackend final : public Backend {
public:
    SequenceBackend(BackendDescriptor descriptor, std::vector<std::string> replies)
        : descriptor_(std::move(descriptor)), replies_(std::move(replies)) {}

    const BackendDescriptor& descriptor() const override { return descriptor_; }
    std::vector<std::string> prompts() const {
        std::lock_guard lock(mutex_);
        return prompts_;
    }

protected:
    GenerationResponse do_generate(const GenerationRequest& request) override {
        std::lock_guard lock(mutex_);
        if (next_ >= replies_.size()) throw BackendError("sequence backend exhausted");
        prompts_.push_back(request.prompt);
        GenerationResponse r;
        r.text = replies_[next_++];
        r.prompt_tokens = descriptor_.counter.count(request.prompt);
        r.generated_tokens = descriptor_.counter.count(r.text);
        return r;
    }

private:
    BackendDescriptor descriptor_;
    std::vector<std::string> replies_;
    std::vector<std::string> prompts_;
    std::size_t next_ = 0;
    mutable std::mutex mutex_;
};

/// Replies computed by a callback; counts calls.
class FunctionBackend final : public Backend {
public:
    using Fn = std::function<std::string(const GenerationRequest&)>;
    FunctionBackend(BackendDescriptor descriptor, Fn fn) : descriptor_(std::move(descriptor)), fn_(std::move(fn)) {}

    const BackendDescriptor& descriptor() const override { return descriptor_; }
    std::size_t calls() const { return calls_; }

protected:
    GenerationResponse do_generate(const GenerationRequest& request) override {
        ++calls_;
        GenerationResponse r;
        r.text = fn_(request);
        r.prompt_tokens = descriptor_.counter.count(request.prompt);
        r.generated_tokens = descriptor_.counter.count(r.text);
        return r;
    }

private:
    BackendDescriptor descriptor_;
    Fn fn_;
    std::atomic<std::size_t> calls_{0};
};

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        const auto base = std::filesystem::temp_directory_path();
        for (;;) {
            path_ = base / ("coa-test-" + std::to_string(rd()) + std::to_string(rd()));
            if (std::filesystem::create_directory(path_)) break;
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(COA_FIXTURE_DIR) / name; }

/// A recorded agent run from tests/fixtures: canned worker and manager outputs.
struct ReplayFixture {
    Sample sample;
    std::vector<std::string> workers;
    std::string manager;
    std::string rag;
    std::size_t chunk_words = 0;
    std::optional<double> manager_rouge;
    std::optional<double> rag_rouge;
};

inline ReplayFixture load_replay_fixture(const std::string& name) {
    const auto doc = nlohmann::json::parse(read_file(fixture(name)));
    ReplayFixture f;
    f.sample.id = doc.at("name").get<std::string>();
    f.sample.task = parse_task_kind(doc.at("task").get<std::string>());
    if (f.sample.task != TaskKind::generic_summarization) f.sample.query = doc.at("query").get<std::string>();
    f.sample.references = doc.at("gold").get<std::vector<std::string>>();
    for (const auto& chunk : doc.at("chunks")) f.sample.source += chunk.get<std::string>() + "\n";
    f.workers = doc.at("workers").get<std::vector<std::string>>();
    f.manager = doc.at("manager").get<std::string>();
    f.rag = doc.at("rag").get<std::string>();
    f.chunk_words = doc.at("chunk_words").get<std::size_t>();
    if (doc.contains("manager_rouge")) f.manager_rouge = doc.at("manager_rouge").get<double>();
    if (doc.contains("rag_rouge")) f.rag_rouge = doc.at("rag_rouge").get<double>();
    return f;
}

struct ReplayOutcome {
    PipelineResult recorded;
    PipelineResult replayed;
};

/// Records the fixture's chain through a cache, then reruns it cache-only.
inline ReplayOutcome record_and_replay(const ReplayFixture& f, const std::filesystem::path& cache_dir) {
    const PromptTemplates templates = PromptTemplates::for_task(f.sample.task);
    ChainSettings settings;
    settings.window = window_for_chunk_budget(f.sample, f.chunk_words, settings, templates);
    BackendDescriptor d = descriptor_for(settings.window);
    d.model_name = "fixture";
    auto cache = std::make_shared<ReplayCache>(cache_dir);
    std::vector<std::string> replies = f.workers;
    replies.push_back(f.manager);
    CachingBackend recorder(cache, std::make_unique<SequenceBackend>(d, replies));
    ReplayOutcome out;
    out.recorded = run_chain(f.sample, settings, templates, AgentBackends(recorder));
    CachingBackend replay(cache, d);
    out.replayed = run_chain(f.sample, settings, templates, AgentBackends(replay));
    return out;
}

}  // namespace coa::testing
