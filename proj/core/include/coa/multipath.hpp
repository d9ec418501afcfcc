#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coa/backend.hpp"
#include "coa/metrics.hpp"
#include "coa/pipeline.hpp"

namespace coa {

enum class Selection { vote, judge, oracle };

std::string_view to_string(Selection selection) noexcept;
Selection parse_selection(std::string_view name);

/// Self-consistency sampling temperature.
inline constexpr double kSelfConsistencyTemperature = 0.7;

struct ReadingPath {
    ReadingOrder order;
    double temperature = 0.0;
    std::optional<std::uint64_t> seed;
};

struct PathSet {
    std::vector<ReadingPath> paths;
    Selection selection = Selection::vote;
    /// Metric used by oracle selection.
    MetricKind oracle_metric = MetricKind::f1;

    /// Left-to-right and right-to-left.
    static PathSet bidirection(Selection selection = Selection::vote);
    /// Five sampled left-to-right paths.
    static PathSet self_consistency(Selection selection = Selection::vote, std::uint64_t base_seed = 0);
    /// Five seeded permutations.
    static PathSet permutations(Selection selection = Selection::vote, std::uint64_t base_seed = 0);
    /// `bidirection`, `sc5` or `perm5`.
    static PathSet preset(std::string_view name, Selection selection = Selection::vote, std::uint64_t base_seed = 0);

    void validate() const;
};

/// Index of the majority class over normalized answers; ties go to the
/// earliest index. Requires at least one answer.
std::size_t vote_index(const std::vector<std::string>& answers);

/// First representative of the winning normalized class.
std::string select_by_vote(const std::vector<std::string>& answers);

/// One backend call listing every final unit; its generation is the answer.
std::string select_by_judge(const std::vector<CommunicationUnit>& units, const std::optional<std::string>& query,
                            const PromptTemplates& templates, Backend& backend, const ChainSettings& settings,
                            std::vector<TranscriptEntry>* transcript = nullptr);

/// (index, score) of the best-scoring answer; ties go to the earliest.
/// Throws MissingReferences without references.
std::pair<std::size_t, double> select_oracle(const std::vector<std::string>& answers,
                                             const std::vector<std::string>& references, MetricKind metric,
                                             TaskKind task = TaskKind::qa);

/// Runs the chain once per path and reduces with the configured selection.
/// Failed paths are recorded and skipped; all paths failing is an error.
PipelineResult run_multipath(const Sample& sample, const PathSet& paths, const ChainSettings& settings,
                             const PromptTemplates& templates, AgentBackends backends);

}  // namespace coa
