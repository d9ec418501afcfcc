#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coa/backend.hpp"
#include "coa/baselines.hpp"
#include "coa/cost_model.hpp"
#include "coa/metrics.hpp"
#include "coa/multipath.hpp"
#include "coa/pipeline.hpp"
#include "coa/types.hpp"

namespace coa {

enum class PipelineKind { coa, coa_no_manager, vanilla, rag, merge, hierarchical, multipath };

struct PipelineSpec {
    PipelineKind kind = PipelineKind::coa;
    /// Path-set preset for multipath: bidirection, sc5 or perm5.
    std::string preset;

    /// "coa", "vanilla", ..., "multipath:sc5".
    std::string name() const;
    static PipelineSpec parse(std::string_view name);
};

/// Context windows of the robustness sweep.
inline constexpr std::size_t kWindowPresets[] = {4000, 8000, 16000, 32000, 64000, 128000};

/// Everything that determines one matrix column.
struct RunConfig {
    PipelineSpec pipeline;
    ChainSettings settings;
    ReadingOrder order;
    BackendDescriptor backend;
    TruncSide trunc = TruncSide::head;
    std::size_t rag_chunk_words = kRetrievalChunkWords;
    Selection selection = Selection::vote;
    MetricKind oracle_metric = MetricKind::f1;
    std::uint64_t seed = 0;
    std::string dataset;
    std::string out_dir = "coa-out";

    /// Applies one key=value setting; throws ConfigError on unknown keys or bad values.
    void set(std::string_view key, std::string_view value);

    /// Settings that affect results, as ordered key=value pairs.
    std::vector<std::pair<std::string, std::string>> result_settings() const;
    /// result_settings plus plumbing (backend kind, endpoint, paths).
    std::vector<std::pair<std::string, std::string>> all_settings() const;

    /// Reproducibility anchor embedded in every PipelineResult. Independent
    /// of the backend kind and of filesystem paths.
    std::string digest() const;
    std::string label() const;
};

/// Flat "key = value" text; '#' starts a comment. Later keys win.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);
void apply_config_text(RunConfig& config, std::string_view text);

/// JSONL dataset; throws SchemaError (with line) or EmptyDataset.
std::vector<Sample> load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const std::vector<Sample>& samples);

/// Runs the configured pipeline on one sample.
PipelineResult run_pipeline(const RunConfig& config, const Sample& sample, Backend& backend);

struct CellResult {
    std::string sample_id;
    std::string config_label;
    std::string config_digest;
    std::string pipeline;
    std::size_t window = 0;
    std::string final;
    std::vector<std::pair<std::string, double>> scores;
    OpCounts ops;
    std::size_t agents = 0;
    std::string transcript;
    std::optional<std::string> error;
};

struct Aggregate {
    std::string config_label;
    std::string config_digest;
    std::size_t cells = 0;
    std::size_t failures = 0;
    std::vector<std::pair<std::string, double>> mean_scores;
    double mean_agents = 0.0;
};

struct RunReport {
    std::vector<RunConfig> configs;
    std::vector<CellResult> cells;
    std::vector<Aggregate> aggregates;

    std::size_t failures() const;
    const Aggregate* aggregate(std::string_view config_label) const;

    std::string to_json() const;
    std::string to_text() const;
    std::string to_csv() const;
};

struct MatrixOptions {
    std::filesystem::path out_dir = "coa-out";
    std::size_t parallelism = 1;
};

/// Executes every (config, sample) cell, persisting transcripts under
/// out_dir/transcripts. Cells whose transcript already exists are loaded
/// instead of re-run. Cell errors are recorded, never thrown.
RunReport run_matrix(const std::vector<RunConfig>& configs, const std::vector<Sample>& samples,
                     const MatrixOptions& options);

/// Writes report.json, report.txt and (optionally) report.csv into out_dir.
void write_report(const RunReport& report, const std::filesystem::path& out_dir, bool emit_csv);

/// Digest naming a cell's transcript file.
std::string cell_digest(const RunConfig& config, const Sample& sample);

struct ReplayCheck {
    std::size_t checked = 0;
    std::size_t identical = 0;
    std::vector<std::string> mismatches;
};

/// Re-runs every successful cell of `report` against a replay-only backend
/// over `cache_dir` and compares transcript bytes with the stored files.
ReplayCheck replay_verify(const RunReport& report, const std::vector<Sample>& samples,
                          const std::filesystem::path& out_dir, const std::string& cache_dir);

/// Reads the configs and cells back from report.json.
RunReport load_report(const std::filesystem::path& report_json);

}  // namespace coa
