#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coa/backend.hpp"
#include "coa/prompts.hpp"
#include "coa/reading_order.hpp"
#include "coa/text_budget.hpp"
#include "coa/types.hpp"

namespace coa {

/// Default room kept for the incoming communication unit.
inline constexpr std::size_t kDefaultCuReserve = 1024;

struct ChainSettings {
    /// Agent context window k, in counter tokens.
    std::size_t window = 8000;
    std::size_t cu_reserve = kDefaultCuReserve;
    /// Also the max_tokens of every request.
    std::size_t generation_reserve = kDefaultMaxTokens;
    double temperature = 0.0;
    std::optional<std::uint64_t> seed;
    TokenCounter counter;
    /// false: the last worker's unit is the answer ("w/o Manager" ablation).
    bool use_manager = true;
    /// Feed the manager every unit instead of only the last one (ablation).
    bool manager_sees_all_units = false;
    /// Merge/Hierarchical worker fan-out.
    std::size_t parallelism = 1;

    /// Canonical text of every field, for digests.
    std::string canonical() const;
};

/// Worker and manager backends; the same one by default.
struct AgentBackends {
    Backend& worker;
    Backend& manager;

    explicit AgentBackends(Backend& both) : worker(both), manager(both) {}
    AgentBackends(Backend& worker_backend, Backend& manager_backend)
        : worker(worker_backend), manager(manager_backend) {}
};

/// Chunk plan shared by the chain and the parallel multi-agent baselines.
ChunkPlan plan_chunks(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates);

/// Smallest window whose chunk budget for `sample` equals `chunk_budget`.
std::size_t window_for_chunk_budget(const Sample& sample, std::size_t chunk_budget, const ChainSettings& settings,
                                    const PromptTemplates& templates);

/// Digest over the pipeline name, order, settings, templates and model names.
std::string pipeline_digest(std::string_view pipeline, const ChainSettings& settings, const PromptTemplates& templates,
                            const ReadingOrder& order, const AgentBackends& backends);

/// Sends one prompt, enforcing the window, and records the exchange.
/// Backend errors are rethrown as AgentFailure carrying role and index.
TranscriptEntry call_agent(Backend& backend, AgentRole role, std::size_t agent_index, std::string prompt,
                           const ChainSettings& settings, std::optional<std::size_t> chunk_index = std::nullopt);

/// One worker step. The returned unit has producer_index = previous + 1 and
/// is cut at whitespace to at most cu_reserve tokens.
CommunicationUnit run_worker(std::string_view chunk, const CommunicationUnit& previous,
                             const std::optional<std::string>& query, const PromptTemplates& templates,
                             Backend& backend, const ChainSettings& settings,
                             std::vector<TranscriptEntry>* transcript = nullptr,
                             std::optional<std::size_t> chunk_index = std::nullopt);

std::string run_manager(const CommunicationUnit& last, const std::optional<std::string>& query,
                        const PromptTemplates& templates, Backend& backend, const ChainSettings& settings,
                        std::vector<TranscriptEntry>* transcript = nullptr);

/// Split, run the workers strictly in `order`, then the manager.
/// `last_unit`, when given, receives the final worker's unit.
PipelineResult run_chain(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates,
                         AgentBackends backends, const ReadingOrder& order = {},
                         CommunicationUnit* last_unit = nullptr);

}  // namespace coa
