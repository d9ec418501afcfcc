#include "coa/pipeline.hpp"

#include <cstdio>

#include "coa/digest.hpp"
#include "coa/errors.hpp"

namespace coa {

namespace {

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::size_t worker_overhead(const Sample& sample, const PromptTemplates& templates, const TokenCounter& counter) {
    const std::optional<std::string> empty_query = sample.query ? std::optional<std::string>("") : std::nullopt;
    return template_overhead(render_worker_prompt(templates, "", CommunicationUnit{}, empty_query), counter);
}

}  // namespace

std::string ChainSettings::canonical() const {
    std::string out;
    out += "window=" + std::to_string(window) + "\n";
    out += "cu_reserve=" + std::to_string(cu_reserve) + "\n";
    out += "generation_reserve=" + std::to_string(generation_reserve) + "\n";
    out += "temperature=" + format_double(temperature) + "\n";
    out += "seed=" + (seed ? std::to_string(*seed) : std::string("none")) + "\n";
    out += "counter=" + counter.name() + "\n";
    out += "use_manager=" + std::string(use_manager ? "1" : "0") + "\n";
    out += "manager_sees_all_units=" + std::string(manager_sees_all_units ? "1" : "0") + "\n";
    return out;
}

ChunkPlan plan_chunks(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates) {
    const std::size_t query_tokens = sample.query ? settings.counter.count(*sample.query) : 0;
    const std::size_t budget = compute_chunk_budget(settings.window, worker_overhead(sample, templates, settings.counter),
                                                    query_tokens, settings.cu_reserve, settings.generation_reserve);
    return split_chunks(sample.source, budget, settings.counter);
}

std::size_t window_for_chunk_budget(const Sample& sample, std::size_t chunk_budget, const ChainSettings& settings,
                                    const PromptTemplates& templates) {
    const std::size_t query_tokens = sample.query ? settings.counter.count(*sample.query) : 0;
    return chunk_budget + worker_overhead(sample, templates, settings.counter) + query_tokens + settings.cu_reserve +
           settings.generation_reserve;
}

std::string pipeline_digest(std::string_view pipeline, const ChainSettings& settings, const PromptTemplates& templates,
                            const ReadingOrder& order, const AgentBackends& backends) {
    std::string material = "pipeline=" + std::string(pipeline) + "\n";
    material += "order=" + order.name() + "\n";
    material += settings.canonical();
    material += "worker_model=" + backends.worker.descriptor().model_name + "\n";
    material += "manager_model=" + backends.manager.descriptor().model_name + "\n";
    for (const std::string* t : {&templates.worker_query, &templates.worker_nonquery, &templates.manager_query,
                                 &templates.manager_nonquery, &templates.direct_query, &templates.direct_nonquery,
                                 &templates.hierarchical_worker_query, &templates.hierarchical_worker_nonquery,
                                 &templates.judge_query, &templates.judge_nonquery, &templates.task_requirement}) {
        material += std::to_string(t->size()) + ":" + *t + "\n";
    }
    return sha256_hex(material);
}

TranscriptEntry call_agent(Backend& backend, AgentRole role, std::size_t agent_index, std::string prompt,
                           const ChainSettings& settings, std::optional<std::size_t> chunk_index) {
    TranscriptEntry entry;
    entry.role = role;
    entry.agent_index = agent_index;
    entry.chunk_index = chunk_index;
    entry.prompt_tokens = settings.counter.count(prompt);
    if (entry.prompt_tokens > settings.window) {
        throw AgentFailure(std::string(to_string(role)), agent_index,
                           "prompt of " + std::to_string(entry.prompt_tokens) + " tokens exceeds the window of " +
                               std::to_string(settings.window),
                           AgentFailure::Cause::template_overflow);
    }
    GenerationRequest request;
    request.prompt = std::move(prompt);
    request.max_tokens = settings.generation_reserve;
    request.temperature = settings.temperature;
    request.seed = settings.seed;
    try {
        GenerationResponse response = backend.generate(request);
        entry.generation = std::move(response.text);
        entry.generated_tokens = response.generated_tokens;
    } catch (const BackendError& e) {
        throw AgentFailure(std::string(to_string(role)), agent_index, e.what());
    }
    entry.prompt = std::move(request.prompt);
    return entry;
}

CommunicationUnit run_worker(std::string_view chunk, const CommunicationUnit& previous,
                             const std::optional<std::string>& query, const PromptTemplates& templates,
                             Backend& backend, const ChainSettings& settings, std::vector<TranscriptEntry>* transcript,
                             std::optional<std::size_t> chunk_index) {
    const std::size_t index = previous.producer_index + 1;
    TranscriptEntry entry = call_agent(backend, AgentRole::worker, index,
                                       render_worker_prompt(templates, chunk, previous, query), settings, chunk_index);
    CommunicationUnit unit;
    unit.producer_index = index;
    unit.text = settings.counter.count(entry.generation) <= settings.cu_reserve
                    ? entry.generation
                    : keep_head(entry.generation, settings.cu_reserve, settings.counter);
    if (transcript != nullptr) {
        transcript->push_back(std::move(entry));
    }
    return unit;
}

std::string run_manager(const CommunicationUnit& last, const std::optional<std::string>& query,
                        const PromptTemplates& templates, Backend& backend, const ChainSettings& settings,
                        std::vector<TranscriptEntry>* transcript) {
    TranscriptEntry entry =
        call_agent(backend, AgentRole::manager, 0, render_manager_prompt(templates, last.text, query), settings);
    std::string answer = entry.generation;
    if (transcript != nullptr) {
        transcript->push_back(std::move(entry));
    }
    return answer;
}

PipelineResult run_chain(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates,
                         AgentBackends backends, const ReadingOrder& order, CommunicationUnit* last_unit) {
    PipelineResult result;
    result.pipeline = settings.use_manager ? "coa" : "coa_no_manager";
    result.chunk_plan = plan_chunks(sample, settings, templates);
    result.config_digest = pipeline_digest(result.pipeline, settings, templates, order, backends);

    CommunicationUnit unit;
    std::string all_units;
    for (std::size_t chunk_index : order.indices(result.chunk_plan.chunk_count())) {
        unit = run_worker(result.chunk_plan.chunks[chunk_index].content(), unit, sample.query, templates,
                          backends.worker, settings, &result.transcript, chunk_index);
        if (settings.manager_sees_all_units) {
            if (!all_units.empty()) all_units += '\n';
            all_units += unit.text;
        }
    }

    if (last_unit != nullptr) {
        *last_unit = unit;
    }
    if (!settings.use_manager) {
        result.final = unit.text;
        return result;
    }
    CommunicationUnit summary = unit;
    if (settings.manager_sees_all_units) {
        summary.text = all_units;
    }
    result.final = std::string(trim(run_manager(summary, sample.query, templates, backends.manager, settings, &result.transcript)));
    return result;
}

}  // namespace coa
