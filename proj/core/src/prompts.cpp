#include "coa/prompts.hpp"

namespace coa {

namespace {

constexpr std::string_view kWorkerQuery =
    "{chunk}\n"
    "Here is the summary of the previous source text: {previous}\n"
    "Question: {query}\n"
    "You need to read current source text and summary of previous source text (if any) and generate a "
    "summary to include them both. Later, this summary will be used for other agents to answer the Query, "
    "if any. So please write the summary that can include the evidence for answering the Query:";

constexpr std::string_view kWorkerNonQuery =
    "{chunk}\n"
    "Here is the summary of the previous source text: {previous}\n"
    "You need to read the current source text and summary of previous source text (if any) and generate a "
    "summary to include them both. Later, this summary will be used for other agents to generate a summary "
    "for the whole text. Thus, your generated summary should be relatively long.";

constexpr std::string_view kManagerQuery =
    "{requirement}\n"
    "The following are given passages. However, the source text is too long and has been summarized. You "
    "need to answer based on the summary:\n"
    "{summary}\n"
    "Question: {query}\n"
    "Answer:";

constexpr std::string_view kManagerNonQuery =
    "{requirement}\n"
    "The following are given passages. However, the source text is too long and has been summarized. You "
    "need to answer based on the summary:\n"
    "{summary}\n"
    "Answer:";

constexpr std::string_view kDirectQuery =
    "{requirement}\n"
    "{source}\n"
    "Question: {query}\n"
    "Answer:";

constexpr std::string_view kDirectNonQuery =
    "{requirement}\n"
    "{source}\n"
    "Answer:";

// Engine-defined: the tree-structured baseline has no published prompt.
constexpr std::string_view kHierarchicalWorkerQuery =
    "{chunk}\n"
    "Question: {query}\n"
    "Decide whether the text above contains information useful for answering the Question. Reply with "
    "\"Yes\" or \"No\" on the first line. If Yes, write a summary of the useful evidence on the following "
    "lines:";

constexpr std::string_view kHierarchicalWorkerNonQuery =
    "{chunk}\n"
    "Decide whether the text above contains information useful for summarizing the whole text. Reply with "
    "\"Yes\" or \"No\" on the first line. If Yes, write a summary of the useful content on the following "
    "lines:";

constexpr std::string_view kJudgeQuery =
    "{requirement}\n"
    "The following are final summaries produced by independent reading paths over the same source text.\n"
    "{candidates}\n"
    "Question: {query}\n"
    "Judge which summary is the most reliable and answer based on it. Answer:";

constexpr std::string_view kJudgeNonQuery =
    "{requirement}\n"
    "The following are final summaries produced by independent reading paths over the same source text.\n"
    "{candidates}\n"
    "Judge which summary is the most reliable and answer based on it. Answer:";

}  // namespace

std::string default_task_requirement(TaskKind task) {
    switch (task) {
        case TaskKind::qa:
            return "Answer the question based on the given passages. Only give me the answer and do not "
                   "output any other words.";
        case TaskKind::multiple_choice:
            return "Answer the multiple-choice question based on the given passages. Only give the letter of "
                   "the correct option.";
        case TaskKind::query_summarization:
            return "Answer the query based on the given transcript in a concise summary.";
        case TaskKind::generic_summarization:
            return "Write a one-page summary of the whole text.";
        case TaskKind::code_completion:
            return "Please complete the code given below. Only output the next line of code.";
    }
    return {};
}

PromptTemplates PromptTemplates::for_task(TaskKind task) {
    PromptTemplates t;
    t.worker_query = kWorkerQuery;
    t.worker_nonquery = kWorkerNonQuery;
    t.manager_query = kManagerQuery;
    t.manager_nonquery = kManagerNonQuery;
    t.direct_query = kDirectQuery;
    t.direct_nonquery = kDirectNonQuery;
    t.hierarchical_worker_query = kHierarchicalWorkerQuery;
    t.hierarchical_worker_nonquery = kHierarchicalWorkerNonQuery;
    t.judge_query = kJudgeQuery;
    t.judge_nonquery = kJudgeNonQuery;
    t.task_requirement = default_task_requirement(task);
    return t;
}

std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string_view, std::string_view>>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const std::size_t open = tmpl.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        out.append(tmpl.substr(pos, open - pos));
        const std::size_t close = tmpl.find('}', open);
        bool replaced = false;
        if (close != std::string_view::npos) {
            const std::string_view name = tmpl.substr(open + 1, close - open - 1);
            for (const auto& [key, value] : values) {
                if (key == name) {
                    out.append(value);
                    replaced = true;
                    break;
                }
            }
        }
        if (replaced) {
            pos = close + 1;
        } else {
            out.push_back('{');
            pos = open + 1;
        }
    }
    return out;
}

std::string render_worker_prompt(const PromptTemplates& templates, std::string_view chunk,
                                 const CommunicationUnit& previous, const std::optional<std::string>& query) {
    if (query) {
        return render_template(templates.worker_query,
                               {{"chunk", chunk}, {"previous", previous.text}, {"query", *query}});
    }
    return render_template(templates.worker_nonquery, {{"chunk", chunk}, {"previous", previous.text}});
}

std::string render_manager_prompt(const PromptTemplates& templates, std::string_view summary,
                                  const std::optional<std::string>& query) {
    if (query) {
        return render_template(templates.manager_query,
                               {{"requirement", templates.task_requirement}, {"summary", summary}, {"query", *query}});
    }
    return render_template(templates.manager_nonquery,
                           {{"requirement", templates.task_requirement}, {"summary", summary}});
}

std::string render_direct_prompt(const PromptTemplates& templates, std::string_view source,
                                 const std::optional<std::string>& query) {
    if (query) {
        return render_template(templates.direct_query,
                               {{"requirement", templates.task_requirement}, {"source", source}, {"query", *query}});
    }
    return render_template(templates.direct_nonquery, {{"requirement", templates.task_requirement}, {"source", source}});
}

std::string render_hierarchical_worker_prompt(const PromptTemplates& templates, std::string_view chunk,
                                              const std::optional<std::string>& query) {
    if (query) {
        return render_template(templates.hierarchical_worker_query, {{"chunk", chunk}, {"query", *query}});
    }
    return render_template(templates.hierarchical_worker_nonquery, {{"chunk", chunk}});
}

std::string render_judge_prompt(const PromptTemplates& templates, const std::vector<std::string>& candidates,
                                const std::optional<std::string>& query) {
    std::string listing;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i > 0) {
            listing += '\n';
        }
        const std::string_view body = trim(candidates[i]);
        listing += "Candidate " + std::to_string(i + 1) + ": ";
        listing += body.empty() ? std::string_view("(empty)") : body;
    }
    if (query) {
        return render_template(templates.judge_query,
                               {{"requirement", templates.task_requirement}, {"candidates", listing}, {"query", *query}});
    }
    return render_template(templates.judge_nonquery,
                           {{"requirement", templates.task_requirement}, {"candidates", listing}});
}

std::size_t template_overhead(std::string_view rendered_empty, const TokenCounter& counter) {
    return counter.count(rendered_empty);
}

}  // namespace coa
