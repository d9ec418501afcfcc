#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coa/text_budget.hpp"
#include "coa/types.hpp"

namespace coa {

/// Prompt layouts for every agent kind. Placeholders are `{chunk}`,
/// `{previous}`, `{query}`, `{requirement}`, `{source}`, `{summary}` and
/// `{candidates}`. Query variants are used when a sample carries a query.
struct PromptTemplates {
    std::string worker_query;
    std::string worker_nonquery;
    std::string manager_query;
    std::string manager_nonquery;
    std::string direct_query;
    std::string direct_nonquery;
    std::string hierarchical_worker_query;
    std::string hierarchical_worker_nonquery;
    std::string judge_query;
    std::string judge_nonquery;
    std::string task_requirement;

    static PromptTemplates for_task(TaskKind task);
};

std::string default_task_requirement(TaskKind task);

/// Pseudo query used to rank chunks of samples that carry none.
inline constexpr std::string_view kGenericSummaryQuery = "What is the summary of the whole government report?";

/// Marker shown to the hierarchical manager when no worker found evidence.
inline constexpr std::string_view kNoEvidenceMarker = "(no evidence found)";

/// Single-pass placeholder substitution; substituted values are never rescanned.
std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string_view, std::string_view>>& values);

std::string render_worker_prompt(const PromptTemplates& templates, std::string_view chunk,
                                 const CommunicationUnit& previous, const std::optional<std::string>& query);

std::string render_manager_prompt(const PromptTemplates& templates, std::string_view summary,
                                  const std::optional<std::string>& query);

/// Vanilla/RAG/Merge layout: requirement, source text, question, "Answer:".
std::string render_direct_prompt(const PromptTemplates& templates, std::string_view source,
                                 const std::optional<std::string>& query);

std::string render_hierarchical_worker_prompt(const PromptTemplates& templates, std::string_view chunk,
                                              const std::optional<std::string>& query);

std::string render_judge_prompt(const PromptTemplates& templates, const std::vector<std::string>& candidates,
                                const std::optional<std::string>& query);

/// Token cost of a template once rendered with empty slots.
std::size_t template_overhead(std::string_view rendered_empty, const TokenCounter& counter);

}  // namespace coa
