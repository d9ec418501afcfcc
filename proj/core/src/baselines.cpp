#include "coa/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "coa/errors.hpp"
#include "coa/metrics.hpp"
#include "coa/multipath.hpp"
#include "parallel.hpp"

namespace coa {

namespace {

std::optional<std::string> empty_like(const std::optional<std::string>& query) {
    return query ? std::optional<std::string>("") : std::nullopt;
}

/// Content tokens a direct (single-call) prompt can hold.
std::size_t direct_budget(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates) {
    const std::size_t overhead = template_overhead(render_direct_prompt(templates, "", empty_like(sample.query)), settings.counter);
    const std::size_t query_tokens = sample.query ? settings.counter.count(*sample.query) : 0;
    return compute_chunk_budget(settings.window, overhead, query_tokens, 0, settings.generation_reserve);
}

std::string truncate_source(std::string_view source, std::size_t budget, TruncSide side, const TokenCounter& counter) {
    if (counter.count(source) <= budget) {
        return std::string(trim(source));
    }
    switch (side) {
        case TruncSide::head:
            return keep_head(source, budget, counter);
        case TruncSide::tail:
            return keep_tail(source, budget, counter);
        case TruncSide::middle_out: {
            const std::size_t tail_budget = budget / 2;
            std::string kept = keep_head(source, budget - tail_budget, counter);
            if (tail_budget > 0) {
                kept += '\n';
                kept += keep_tail(source, tail_budget, counter);
            }
            return kept;
        }
    }
    return {};
}

TranscriptEntry vote_entry(const std::vector<std::string>& answers, const std::string& winner) {
    TranscriptEntry entry;
    entry.role = AgentRole::manager;
    entry.agent_index = 0;
    entry.prompt = "majority vote over " + std::to_string(answers.size()) + " answers:";
    for (std::size_t i = 0; i < answers.size(); ++i) {
        entry.prompt += "\n" + std::to_string(i + 1) + ". " + answers[i];
    }
    entry.generation = winner;
    return entry;
}

ChainSettings base_settings(const ChainSettings& settings) {
    ChainSettings copy = settings;
    copy.use_manager = true;
    copy.manager_sees_all_units = false;
    return copy;
}

}  // namespace

std::string_view to_string(TruncSide side) noexcept {
    switch (side) {
        case TruncSide::head: return "head";
        case TruncSide::tail: return "tail";
        case TruncSide::middle_out: return "middle_out";
    }
    return "head";
}

TruncSide parse_trunc_side(std::string_view name) {
    if (name == "head") return TruncSide::head;
    if (name == "tail") return TruncSide::tail;
    if (name == "middle_out" || name == "middle") return TruncSide::middle_out;
    throw ConfigError("unknown truncation side '" + std::string(name) + "'");
}

std::string extract_answer(std::string_view generation) {
    std::string_view rest = generation;
    while (!rest.empty()) {
        const std::size_t newline = rest.find('\n');
        const std::string_view line = trim(rest.substr(0, newline));
        if (!line.empty()) return std::string(line);
        if (newline == std::string_view::npos) break;
        rest.remove_prefix(newline + 1);
    }
    return {};
}

std::vector<RankedChunk> rank_chunks(std::string_view query, const std::vector<std::string>& chunks,
                                     const Retriever& retriever) {
    std::vector<RankedChunk> ranked(chunks.size());
    if (retriever.scorer == Retriever::Scorer::external) {
        if (!retriever.external) {
            throw ConfigError("external retriever selected without a score source");
        }
        const std::vector<double> scores = retriever.external(query, chunks);
        if (scores.size() != chunks.size()) {
            throw ConfigError("external retriever returned " + std::to_string(scores.size()) + " scores for " +
                              std::to_string(chunks.size()) + " chunks");
        }
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            if (!std::isfinite(scores[i])) throw ConfigError("external retriever returned a non-finite score");
            ranked[i] = {i, scores[i]};
        }
    } else {
        std::vector<std::map<std::string, double>> term_freqs(chunks.size());
        std::map<std::string, std::size_t> doc_freq;
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            for (auto& token : normalized_tokens(chunks[i])) term_freqs[i][token] += 1.0;
            for (const auto& [term, tf] : term_freqs[i]) ++doc_freq[term];
        }
        const auto n = static_cast<double>(chunks.size());
        auto idf = [&](const std::string& term) {
            const auto it = doc_freq.find(term);
            const double df = it == doc_freq.end() ? 0.0 : static_cast<double>(it->second);
            return std::log((1.0 + n) / (1.0 + df)) + 1.0;
        };
        std::map<std::string, double> query_vec;
        for (auto& token : normalized_tokens(query)) query_vec[token] += 1.0;
        double query_norm = 0.0;
        for (auto& [term, weight] : query_vec) {
            weight *= idf(term);
            query_norm += weight * weight;
        }
        query_norm = std::sqrt(query_norm);
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            double dot = 0.0;
            double norm = 0.0;
            for (const auto& [term, tf] : term_freqs[i]) {
                const double weight = tf * idf(term);
                norm += weight * weight;
                if (auto it = query_vec.find(term); it != query_vec.end()) dot += weight * it->second;
            }
            norm = std::sqrt(norm);
            ranked[i] = {i, (query_norm > 0.0 && norm > 0.0) ? dot / (query_norm * norm) : 0.0};
        }
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedChunk& a, const RankedChunk& b) { return a.score > b.score; });
    return ranked;
}

PipelineResult run_vanilla(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates,
                           Backend& backend, TruncSide side) {
    PipelineResult result;
    result.pipeline = "vanilla";
    AgentBackends backends(backend);
    result.config_digest = pipeline_digest("vanilla:" + std::string(to_string(side)), base_settings(settings), templates,
                                           ReadingOrder{}, backends);
    const std::size_t budget = direct_budget(sample, settings, templates);
    std::string kept = truncate_source(sample.source, budget, side, settings.counter);

    Chunk chunk;
    chunk.offset = side == TruncSide::head ? sample.source.find_first_not_of(" \t\n\r\v\f") : sample.source.rfind(kept);
    if (chunk.offset == std::string::npos) chunk.offset = 0;
    chunk.text = kept;
    chunk.tokens = settings.counter.count(kept);
    result.chunk_plan.budget = budget;
    result.chunk_plan.source_len = settings.counter.count(sample.source);
    result.chunk_plan.chunks.push_back(std::move(chunk));

    result.transcript.push_back(call_agent(backend, AgentRole::manager, 0,
                                           render_direct_prompt(templates, kept, sample.query), settings));
    result.final = std::string(trim(result.transcript.back().generation));
    return result;
}

PipelineResult run_rag(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates,
                       Backend& backend, const Retriever& retriever) {
    PipelineResult result;
    result.pipeline = "rag";
    AgentBackends backends(backend);
    result.config_digest = pipeline_digest("rag:" + std::to_string(retriever.chunk_words), base_settings(settings),
                                           templates, ReadingOrder{}, backends);

    const ChunkPlan pieces = split_chunks(sample.source, std::max<std::size_t>(1, retriever.chunk_words),
                                          TokenCounter::words());
    std::vector<std::string> contents;
    contents.reserve(pieces.chunk_count());
    for (const Chunk& piece : pieces.chunks) contents.emplace_back(piece.content());

    const std::string ranking_query = sample.query ? *sample.query : std::string(kGenericSummaryQuery);
    const std::vector<RankedChunk> ranked = rank_chunks(ranking_query, contents, retriever);

    const std::size_t budget = direct_budget(sample, settings, templates);
    std::string retrieved;
    result.chunk_plan.budget = budget;
    result.chunk_plan.source_len = settings.counter.count(sample.source);
    for (const RankedChunk& r : ranked) {
        if (contents[r.index].empty()) continue;
        std::string candidate = retrieved.empty() ? contents[r.index] : retrieved + "\n\n" + contents[r.index];
        if (settings.counter.count(candidate) > budget) break;
        retrieved = std::move(candidate);
        Chunk chunk;
        chunk.offset = pieces.chunks[r.index].offset;
        chunk.text = contents[r.index];
        chunk.tokens = settings.counter.count(chunk.text);
        result.chunk_plan.chunks.push_back(std::move(chunk));
    }

    result.transcript.push_back(call_agent(backend, AgentRole::manager, 0,
                                           render_direct_prompt(templates, retrieved, sample.query), settings));
    result.final = std::string(trim(result.transcript.back().generation));
    return result;
}

PipelineResult run_merge(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates,
                         AgentBackends backends) {
    PipelineResult result;
    result.pipeline = "merge";
    result.config_digest = pipeline_digest("merge", base_settings(settings), templates, ReadingOrder{}, backends);
    result.chunk_plan = plan_chunks(sample, settings, templates);

    const std::size_t count = result.chunk_plan.chunk_count();
    std::vector<TranscriptEntry> entries(count);
    detail::parallel_for(count, settings.parallelism, [&](std::size_t i) {
        entries[i] = call_agent(backends.worker, AgentRole::worker, i + 1,
                                render_direct_prompt(templates, result.chunk_plan.chunks[i].content(), sample.query),
                                settings, i);
    });

    std::vector<std::string> answers;
    answers.reserve(count);
    for (const auto& entry : entries) answers.push_back(extract_answer(entry.generation));
    result.final = answers[vote_index(answers)];
    result.transcript = std::move(entries);
    result.transcript.push_back(vote_entry(answers, result.final));
    return result;
}

PipelineResult run_hierarchical(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates,
                                AgentBackends backends) {
    PipelineResult result;
    result.pipeline = "hierarchical";
    result.config_digest = pipeline_digest("hierarchical", base_settings(settings), templates, ReadingOrder{}, backends);
    result.chunk_plan = plan_chunks(sample, settings, templates);

    const std::size_t count = result.chunk_plan.chunk_count();
    std::vector<TranscriptEntry> entries(count);
    detail::parallel_for(count, settings.parallelism, [&](std::size_t i) {
        entries[i] = call_agent(backends.worker, AgentRole::worker, i + 1,
                                render_hierarchical_worker_prompt(templates, result.chunk_plan.chunks[i].content(),
                                                                  sample.query),
                                settings, i);
    });

    std::vector<std::string> units;
    for (const auto& entry : entries) {
        const std::string_view generation = trim(entry.generation);
        const std::size_t newline = generation.find('\n');
        const std::string verdict = normalize_answer(generation.substr(0, newline));
        if (!verdict.starts_with("yes")) continue;
        std::string_view body = newline == std::string_view::npos ? std::string_view{} : trim(generation.substr(newline + 1));
        if (body.empty()) continue;
        units.push_back(settings.counter.count(body) <= settings.cu_reserve
                            ? std::string(body)
                            : keep_head(body, settings.cu_reserve, settings.counter));
    }

    // Drop units from the highest chunk index until the manager prompt leaves room to answer.
    const std::size_t limit = settings.window > settings.generation_reserve ? settings.window - settings.generation_reserve : 0;
    std::string evidence;
    for (;;) {
        evidence.clear();
        for (const auto& unit : units) {
            if (!evidence.empty()) evidence += '\n';
            evidence += unit;
        }
        if (units.empty()) evidence = kNoEvidenceMarker;
        if (units.empty() || settings.counter.count(render_manager_prompt(templates, evidence, sample.query)) <= limit) {
            break;
        }
        units.pop_back();
    }

    result.transcript = std::move(entries);
    CommunicationUnit summary{evidence, count};
    result.final = std::string(trim(run_manager(summary, sample.query, templates, backends.manager, settings,
                                                &result.transcript)));
    return result;
}

}  // namespace coa
