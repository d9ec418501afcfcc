#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coa/text_budget.hpp"

namespace coa {

enum class TaskKind { qa, multiple_choice, query_summarization, generic_summarization, code_completion };

std::string_view to_string(TaskKind kind) noexcept;
TaskKind parse_task_kind(std::string_view name);

/// One long-context task instance.
struct Sample {
    std::string id;
    std::string source;
    std::optional<std::string> query;
    std::vector<std::string> references;
    TaskKind task = TaskKind::qa;
    std::optional<std::size_t> reference_len;

    bool query_based() const noexcept { return query.has_value(); }
};

/// Message passed along the worker chain. Unit 0 is the empty initial unit.
struct CommunicationUnit {
    std::string text;
    std::size_t producer_index = 0;
};

enum class AgentRole { worker, manager, judge };

std::string_view to_string(AgentRole role) noexcept;
AgentRole parse_agent_role(std::string_view name);

struct TranscriptEntry {
    AgentRole role = AgentRole::worker;
    std::size_t agent_index = 0;
    std::size_t path_index = 0;
    std::optional<std::size_t> chunk_index;
    std::string prompt;
    std::string generation;
    std::size_t prompt_tokens = 0;
    std::size_t generated_tokens = 0;
};

/// Outcome of one reading path inside a multi-path run.
struct PathOutcome {
    std::string order;
    double temperature = 0.0;
    std::string final;
    std::string last_unit;
    std::optional<std::string> error;
};

/// Final answer plus the full audit trail of a pipeline run.
struct PipelineResult {
    std::string pipeline;
    std::string final;
    std::vector<TranscriptEntry> transcript;
    ChunkPlan chunk_plan;
    std::string config_digest;
    std::vector<PathOutcome> paths;
    std::string selection;
};

}  // namespace coa
