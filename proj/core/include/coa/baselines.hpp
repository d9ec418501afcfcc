#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "coa/backend.hpp"
#include "coa/pipeline.hpp"

namespace coa {

enum class TruncSide { head, tail, middle_out };

std::string_view to_string(TruncSide side) noexcept;
TruncSide parse_trunc_side(std::string_view name);

/// Source words per retrieval chunk.
inline constexpr std::size_t kRetrievalChunkWords = 300;

struct Retriever {
    enum class Scorer { lexical_tfidf_cosine, external };

    /// Supplies one finite score per chunk for the external scorer.
    using ExternalScores = std::function<std::vector<double>(std::string_view query, const std::vector<std::string>& chunks)>;

    Scorer scorer = Scorer::lexical_tfidf_cosine;
    std::size_t chunk_words = kRetrievalChunkWords;
    ExternalScores external;
};

struct RankedChunk {
    std::size_t index = 0;
    double score = 0.0;
};

/// Descending score, ties by ascending index. The lexical scorer is cosine
/// similarity of tf-idf vectors (smoothed idf over the given chunks).
std::vector<RankedChunk> rank_chunks(std::string_view query, const std::vector<std::string>& chunks,
                                     const Retriever& retriever = {});

/// Single call on the source truncated to fill the window.
PipelineResult run_vanilla(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates,
                           Backend& backend, TruncSide side = TruncSide::head);

/// Retrieval chunks ranked against the query fill the window in rank order.
PipelineResult run_rag(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates,
                       Backend& backend, const Retriever& retriever = {});

/// Independent per-chunk answers combined by majority vote.
PipelineResult run_merge(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates,
                         AgentBackends backends);

/// Independent usefulness-filtered units read by one manager.
PipelineResult run_hierarchical(const Sample& sample, const ChainSettings& settings, const PromptTemplates& templates,
                                AgentBackends backends);

/// First non-empty line of a generation, trimmed.
std::string extract_answer(std::string_view generation);

}  // namespace coa
