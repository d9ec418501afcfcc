#include "coa/types.hpp"

#include "coa/errors.hpp"

namespace coa {

std::string_view to_string(TaskKind kind) noexcept {
    switch (kind) {
        case TaskKind::qa: return "qa";
        case TaskKind::multiple_choice: return "multiple_choice";
        case TaskKind::query_summarization: return "query_summarization";
        case TaskKind::generic_summarization: return "generic_summarization";
        case TaskKind::code_completion: return "code_completion";
    }
    return "qa";
}

TaskKind parse_task_kind(std::string_view name) {
    for (TaskKind kind : {TaskKind::qa, TaskKind::multiple_choice, TaskKind::query_summarization,
                          TaskKind::generic_summarization, TaskKind::code_completion}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw ConfigError("unknown task kind '" + std::string(name) + "'");
}

std::string_view to_string(AgentRole role) noexcept {
    switch (role) {
        case AgentRole::worker: return "worker";
        case AgentRole::manager: return "manager";
        case AgentRole::judge: return "judge";
    }
    return "worker";
}

AgentRole parse_agent_role(std::string_view name) {
    if (name == "worker") return AgentRole::worker;
    if (name == "manager") return AgentRole::manager;
    if (name == "judge") return AgentRole::judge;
    throw ConfigError("unknown agent role '" + std::string(name) + "'");
}

}  // namespace coa
