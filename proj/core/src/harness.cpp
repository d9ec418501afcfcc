#include "coa/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coa/digest.hpp"
#include "coa/errors.hpp"
#include "coa/serialization.hpp"
#include "coa/text_budget.hpp"
#include "parallel.hpp"

namespace coa {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string shortest(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw Error("cannot format number");
    return std::string(buf, end);
}

std::string fixed4(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", value);
    return buf;
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view value) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
        throw ConfigError("setting '" + std::string(key) + "' expects a non-negative integer, got '" +
                          std::string(value) + "'");
    }
    return out;
}

double parse_number(std::string_view key, std::string_view value) {
    const std::string text(value);
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw ConfigError("setting '" + std::string(key) + "' expects a number, got '" + text + "'");
    }
    return out;
}

bool parse_flag(std::string_view key, std::string_view value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw ConfigError("setting '" + std::string(key) + "' expects a boolean, got '" + std::string(value) + "'");
}

void write_atomically(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::unique_ptr<Backend> backend_for(const RunConfig& config) {
    BackendDescriptor descriptor = config.backend;
    descriptor.window = config.settings.window;
    descriptor.counter = config.settings.counter;
    return make_backend(descriptor);
}

std::size_t agent_calls(const PipelineResult& result) {
    return static_cast<std::size_t>(std::count_if(result.transcript.begin(), result.transcript.end(),
                                                  [](const TranscriptEntry& e) { return !e.prompt.empty(); }));
}

void fill_cell(CellResult& cell, const PipelineResult& result, const Sample& sample) {
    cell.final = result.final;
    cell.ops = transcript_costs(result);
    cell.agents = agent_calls(result);
    if (sample.references.empty()) return;
    for (MetricKind metric : applicable_metrics(sample.task)) {
        cell.scores.emplace_back(std::string(to_string(metric)),
                                 score(metric, result.final, sample.references, sample.task));
    }
}

}  // namespace

std::string PipelineSpec::name() const {
    switch (kind) {
        case PipelineKind::coa: return "coa";
        case PipelineKind::coa_no_manager: return "coa_no_manager";
        case PipelineKind::vanilla: return "vanilla";
        case PipelineKind::rag: return "rag";
        case PipelineKind::merge: return "merge";
        case PipelineKind::hierarchical: return "hierarchical";
        case PipelineKind::multipath: return "multipath:" + preset;
    }
    return "coa";
}

PipelineSpec PipelineSpec::parse(std::string_view name) {
    if (name == "coa") return {PipelineKind::coa, {}};
    if (name == "coa_no_manager") return {PipelineKind::coa_no_manager, {}};
    if (name == "vanilla") return {PipelineKind::vanilla, {}};
    if (name == "rag") return {PipelineKind::rag, {}};
    if (name == "merge") return {PipelineKind::merge, {}};
    if (name == "hierarchical") return {PipelineKind::hierarchical, {}};
    constexpr std::string_view prefix = "multipath:";
    if (name.substr(0, prefix.size()) == prefix) {
        std::string preset(name.substr(prefix.size()));
        if (preset != "bidirection" && preset != "sc5" && preset != "perm5") {
            throw ConfigError("unknown path preset '" + preset + "' (expected bidirection, sc5 or perm5)");
        }
        return {PipelineKind::multipath, preset};
    }
    throw ConfigError("unknown pipeline '" + std::string(name) + "'");
}

void RunConfig::set(std::string_view key, std::string_view value) {
    try {
        if (key == "pipeline") {
            pipeline = PipelineSpec::parse(value);
        } else if (key == "paths") {
            pipeline = PipelineSpec::parse("multipath:" + std::string(value));
        } else if (key == "window") {
            settings.window = parse_unsigned<std::size_t>(key, value);
        } else if (key == "cu_reserve") {
            settings.cu_reserve = parse_unsigned<std::size_t>(key, value);
        } else if (key == "generation_reserve" || key == "max_tokens") {
            settings.generation_reserve = parse_unsigned<std::size_t>(key, value);
        } else if (key == "temperature") {
            settings.temperature = parse_number(key, value);
        } else if (key == "seed") {
            seed = parse_unsigned<std::uint64_t>(key, value);
        } else if (key == "counter") {
            settings.counter = TokenCounter::parse(value);
        } else if (key == "manager_sees_all_units") {
            settings.manager_sees_all_units = parse_flag(key, value);
        } else if (key == "parallelism") {
            settings.parallelism = std::max<std::size_t>(1, parse_unsigned<std::size_t>(key, value));
        } else if (key == "order") {
            order = ReadingOrder::parse(value);
        } else if (key == "trunc") {
            trunc = parse_trunc_side(value);
        } else if (key == "rag_chunk_words") {
            rag_chunk_words = parse_unsigned<std::size_t>(key, value);
        } else if (key == "selection") {
            selection = parse_selection(value);
        } else if (key == "oracle_metric") {
            oracle_metric = parse_metric_kind(value);
        } else if (key == "backend") {
            backend.kind = parse_backend_kind(value);
        } else if (key == "endpoint") {
            backend.endpoint = std::string(value);
        } else if (key == "model") {
            backend.model_name = std::string(value);
        } else if (key == "api_key_env") {
            backend.api_key_env = std::string(value);
        } else if (key == "timeout") {
            backend.timeout = std::chrono::seconds(parse_unsigned<std::int64_t>(key, value));
        } else if (key == "max_attempts") {
            backend.retry.max_attempts = parse_unsigned<int>(key, value);
        } else if (key == "rate_limit") {
            backend.max_requests_per_second = parse_number(key, value);
        } else if (key == "cache_dir") {
            backend.cache_dir = std::string(value);
        } else if (key == "dataset") {
            dataset = std::string(value);
        } else if (key == "out") {
            out_dir = std::string(value);
        } else {
            throw ConfigError("unknown setting '" + std::string(key) + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("setting '" + std::string(key) + "': " + e.what());
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::result_settings() const {
    std::vector<std::pair<std::string, std::string>> out{
        {"pipeline", pipeline.name()},
        {"window", std::to_string(settings.window)},
        {"cu_reserve", std::to_string(settings.cu_reserve)},
        {"generation_reserve", std::to_string(settings.generation_reserve)},
        {"temperature", shortest(settings.temperature)},
        {"seed", std::to_string(seed)},
        {"counter", settings.counter.name()},
        {"manager_sees_all_units", settings.manager_sees_all_units ? "1" : "0"},
        {"order", order.name()},
        {"trunc", std::string(to_string(trunc))},
        {"rag_chunk_words", std::to_string(rag_chunk_words)},
        {"selection", std::string(to_string(selection))},
        {"oracle_metric", std::string(to_string(oracle_metric))},
        {"model", backend.model_name},
    };
    return out;
}

std::vector<std::pair<std::string, std::string>> RunConfig::all_settings() const {
    auto out = result_settings();
    out.emplace_back("parallelism", std::to_string(settings.parallelism));
    out.emplace_back("backend", std::string(to_string(backend.kind)));
    out.emplace_back("endpoint", backend.endpoint);
    out.emplace_back("api_key_env", backend.api_key_env);
    out.emplace_back("timeout", std::to_string(backend.timeout.count()));
    out.emplace_back("max_attempts", std::to_string(backend.retry.max_attempts));
    out.emplace_back("rate_limit", shortest(backend.max_requests_per_second));
    out.emplace_back("cache_dir", backend.cache_dir);
    out.emplace_back("dataset", dataset);
    out.emplace_back("out", out_dir);
    return out;
}

std::string RunConfig::digest() const {
    std::string material = "coa-run\n";
    for (const auto& [key, value] : result_settings()) material += key + "=" + value + "\n";
    return sha256_hex(material);
}

std::string RunConfig::label() const {
    std::string out = pipeline.name() + "@" + std::to_string(settings.window);
    if (!(order == ReadingOrder::left_to_right())) out += "/" + order.name();
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string_view key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return out;
}

void apply_config_text(RunConfig& config, std::string_view text) {
    for (const auto& [key, value] : parse_config_text(text)) config.set(key, value);
}

std::vector<Sample> load_dataset(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open dataset " + path.string());
    std::vector<Sample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        samples.push_back(sample_from_jsonl_row(line, line_no));
    }
    if (samples.empty()) throw EmptyDataset("dataset " + path.string() + " has no samples");
    return samples;
}

void save_dataset(const fs::path& path, const std::vector<Sample>& samples) {
    std::string content;
    for (const Sample& sample : samples) content += to_jsonl_row(sample) + "\n";
    write_atomically(path, content);
}

PipelineResult run_pipeline(const RunConfig& config, const Sample& sample, Backend& backend) {
    const PromptTemplates templates = PromptTemplates::for_task(sample.task);
    ChainSettings settings = config.settings;
    settings.seed = config.seed;
    AgentBackends backends(backend);
    PipelineResult result;
    switch (config.pipeline.kind) {
        case PipelineKind::coa:
            result = run_chain(sample, settings, templates, backends, config.order);
            break;
        case PipelineKind::coa_no_manager:
            settings.use_manager = false;
            result = run_chain(sample, settings, templates, backends, config.order);
            break;
        case PipelineKind::vanilla:
            result = run_vanilla(sample, settings, templates, backend, config.trunc);
            break;
        case PipelineKind::rag: {
            Retriever retriever;
            retriever.chunk_words = config.rag_chunk_words;
            result = run_rag(sample, settings, templates, backend, retriever);
            break;
        }
        case PipelineKind::merge:
            result = run_merge(sample, settings, templates, backends);
            break;
        case PipelineKind::hierarchical:
            result = run_hierarchical(sample, settings, templates, backends);
            break;
        case PipelineKind::multipath: {
            PathSet paths = PathSet::preset(config.pipeline.preset, config.selection, config.seed);
            paths.oracle_metric = config.oracle_metric;
            result = run_multipath(sample, paths, settings, templates, backends);
            break;
        }
    }
    result.config_digest = config.digest();
    return result;
}

std::string cell_digest(const RunConfig& config, const Sample& sample) {
    return sha256_hex(config.digest() + "\n" + to_jsonl_row(sample));
}

std::size_t RunReport::failures() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return c.error.has_value(); }));
}

const Aggregate* RunReport::aggregate(std::string_view config_label) const {
    for (const Aggregate& a : aggregates) {
        if (a.config_label == config_label) return &a;
    }
    return nullptr;
}

namespace {

std::vector<Aggregate> aggregate_cells(const std::vector<RunConfig>& configs, const std::vector<CellResult>& cells) {
    std::vector<Aggregate> out;
    for (const RunConfig& config : configs) {
        Aggregate agg;
        agg.config_label = config.label();
        agg.config_digest = config.digest();
        std::vector<std::pair<std::string, std::pair<double, std::size_t>>> sums;
        std::size_t agents = 0;
        for (const CellResult& cell : cells) {
            if (cell.config_digest != agg.config_digest) continue;
            ++agg.cells;
            if (cell.error) {
                ++agg.failures;
                continue;
            }
            agents += cell.agents;
            for (const auto& [metric, value] : cell.scores) {
                auto it = std::find_if(sums.begin(), sums.end(), [&](const auto& s) { return s.first == metric; });
                if (it == sums.end()) {
                    sums.push_back({metric, {value, 1}});
                } else {
                    it->second.first += value;
                    ++it->second.second;
                }
            }
        }
        for (const auto& [metric, acc] : sums) {
            agg.mean_scores.emplace_back(metric, acc.first / static_cast<double>(acc.second));
        }
        const std::size_t ok = agg.cells - agg.failures;
        agg.mean_agents = ok == 0 ? 0.0 : static_cast<double>(agents) / static_cast<double>(ok);
        out.push_back(std::move(agg));
    }
    return out;
}

}  // namespace

RunReport run_matrix(const std::vector<RunConfig>& configs, const std::vector<Sample>& samples,
                     const MatrixOptions& options) {
    if (configs.empty()) throw ConfigError("no configurations to run");
    if (samples.empty()) throw EmptyDataset("no samples to run");
    for (const RunConfig& config : configs) config.backend.validate();

    std::vector<std::unique_ptr<Backend>> backends;
    backends.reserve(configs.size());
    for (const RunConfig& config : configs) backends.push_back(backend_for(config));

    const fs::path transcripts = options.out_dir / "transcripts";
    fs::create_directories(transcripts);

    const std::size_t total = configs.size() * samples.size();
    std::vector<CellResult> cells(total);
    detail::parallel_for(total, options.parallelism, [&](std::size_t i) {
        const RunConfig& config = configs[i / samples.size()];
        const Sample& sample = samples[i % samples.size()];
        CellResult& cell = cells[i];
        cell.sample_id = sample.id;
        cell.config_label = config.label();
        cell.config_digest = config.digest();
        cell.pipeline = config.pipeline.name();
        cell.window = config.settings.window;
        const std::string digest = cell_digest(config, sample);
        cell.transcript = "transcripts/" + digest + ".json";
        const fs::path file = options.out_dir / cell.transcript;

        std::optional<PipelineResult> result;
        if (auto existing = read_file(file)) {
            try {
                result = pipeline_result_from_json(*existing);
            } catch (const std::exception&) {
                result.reset();
            }
        }
        try {
            if (!result) {
                result = run_pipeline(config, sample, *backends[i / samples.size()]);
                write_atomically(file, to_json(*result));
            }
            fill_cell(cell, *result, sample);
        } catch (const std::exception& e) {
            cell = CellResult{cell.sample_id, cell.config_label, cell.config_digest, cell.pipeline, cell.window,
                              {}, {}, {}, 0, {}, std::string(e.what())};
        }
    });

    std::stable_sort(cells.begin(), cells.end(), [](const CellResult& a, const CellResult& b) {
        if (a.pipeline != b.pipeline) return a.pipeline < b.pipeline;
        if (a.window != b.window) return a.window < b.window;
        if (a.config_label != b.config_label) return a.config_label < b.config_label;
        return a.sample_id < b.sample_id;
    });

    RunReport report;
    report.configs = configs;
    report.cells = std::move(cells);
    report.aggregates = aggregate_cells(report.configs, report.cells);
    return report;
}

std::string RunReport::to_json() const {
    ordered_json doc;
    ordered_json cfgs = ordered_json::array();
    for (const RunConfig& config : configs) {
        ordered_json c;
        c["label"] = config.label();
        c["digest"] = config.digest();
        ordered_json settings;
        for (const auto& [key, value] : config.all_settings()) settings[key] = value;
        c["settings"] = std::move(settings);
        cfgs.push_back(std::move(c));
    }
    doc["configs"] = std::move(cfgs);

    ordered_json aggs = ordered_json::array();
    for (const Aggregate& agg : aggregates) {
        ordered_json a;
        a["config"] = agg.config_label;
        a["config_digest"] = agg.config_digest;
        a["cells"] = agg.cells;
        a["failures"] = agg.failures;
        ordered_json means;
        for (const auto& [metric, value] : agg.mean_scores) means[metric] = value;
        a["mean_scores"] = std::move(means);
        a["mean_agents"] = agg.mean_agents;
        aggs.push_back(std::move(a));
    }
    doc["aggregates"] = std::move(aggs);

    ordered_json rows = ordered_json::array();
    for (const CellResult& cell : cells) {
        ordered_json r;
        r["sample_id"] = cell.sample_id;
        r["config"] = cell.config_label;
        r["config_digest"] = cell.config_digest;
        r["pipeline"] = cell.pipeline;
        r["window"] = cell.window;
        if (cell.error) {
            r["error"] = *cell.error;
        } else {
            r["final"] = cell.final;
            ordered_json scores = ordered_json::object();
            for (const auto& [metric, value] : cell.scores) scores[metric] = value;
            r["scores"] = std::move(scores);
            r["ops"] = {{"enc_full", cell.ops.enc_full},
                        {"dec_full", cell.ops.dec_full},
                        {"enc_coa", cell.ops.enc_coa},
                        {"dec_coa", cell.ops.dec_coa}};
            r["agents"] = cell.agents;
            r["transcript"] = cell.transcript;
        }
        rows.push_back(std::move(r));
    }
    doc["cells"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string RunReport::to_text() const {
    std::string out;
    for (const Aggregate& agg : aggregates) {
        out += agg.config_label + "  cells=" + std::to_string(agg.cells) + " failures=" + std::to_string(agg.failures);
        for (const auto& [metric, value] : agg.mean_scores) out += " " + metric + "=" + fixed4(value * 100.0);
        out += " agents=" + fixed4(agg.mean_agents) + "\n";
    }
    out += "\n";
    for (const CellResult& cell : cells) {
        out += cell.config_label + "  " + cell.sample_id;
        if (cell.error) {
            out += "  ERROR " + *cell.error + "\n";
            continue;
        }
        for (const auto& [metric, value] : cell.scores) out += " " + metric + "=" + fixed4(value * 100.0);
        out += "\n";
    }
    return out;
}

std::string RunReport::to_csv() const {
    std::string out = "config,pipeline,window,sample_id,metric,score,agents,enc_coa,dec_coa,error\n";
    for (const CellResult& cell : cells) {
        const std::string prefix = csv_field(cell.config_label) + "," + csv_field(cell.pipeline) + "," +
                                   std::to_string(cell.window) + "," + csv_field(cell.sample_id) + ",";
        const std::string tail = "," + std::to_string(cell.agents) + "," + std::to_string(cell.ops.enc_coa) + "," +
                                 std::to_string(cell.ops.dec_coa) + "," + csv_field(cell.error.value_or("")) + "\n";
        if (cell.scores.empty()) {
            out += prefix + ",," + tail.substr(1);
            continue;
        }
        for (const auto& [metric, value] : cell.scores) out += prefix + metric + "," + shortest(value) + tail;
    }
    return out;
}

void write_report(const RunReport& report, const fs::path& out_dir, bool emit_csv) {
    write_atomically(out_dir / "report.json", report.to_json());
    write_atomically(out_dir / "report.txt", report.to_text());
    if (emit_csv) write_atomically(out_dir / "report.csv", report.to_csv());
}

RunReport load_report(const fs::path& report_json) {
    auto text = read_file(report_json);
    if (!text) throw ConfigError("cannot read " + report_json.string());
    RunReport report;
    try {
        const ordered_json doc = ordered_json::parse(*text);
        for (const auto& c : doc.at("configs")) {
            RunConfig config;
            for (const auto& [key, value] : c.at("settings").items()) config.set(key, value.get<std::string>());
            if (config.digest() != c.at("digest").get<std::string>()) {
                throw ConfigError("config digest mismatch for " + c.at("label").get<std::string>());
            }
            report.configs.push_back(std::move(config));
        }
        for (const auto& r : doc.at("cells")) {
            CellResult cell;
            cell.sample_id = r.at("sample_id").get<std::string>();
            cell.config_label = r.at("config").get<std::string>();
            cell.config_digest = r.at("config_digest").get<std::string>();
            cell.pipeline = r.at("pipeline").get<std::string>();
            cell.window = r.at("window").get<std::size_t>();
            if (r.contains("error")) {
                cell.error = r.at("error").get<std::string>();
            } else {
                cell.final = r.at("final").get<std::string>();
                for (const auto& [metric, value] : r.at("scores").items()) {
                    cell.scores.emplace_back(metric, value.get<double>());
                }
                const auto& ops = r.at("ops");
                cell.ops = {ops.at("enc_full").get<std::uint64_t>(), ops.at("dec_full").get<std::uint64_t>(),
                            ops.at("enc_coa").get<std::uint64_t>(), ops.at("dec_coa").get<std::uint64_t>()};
                cell.agents = r.at("agents").get<std::size_t>();
                cell.transcript = r.at("transcript").get<std::string>();
            }
            report.cells.push_back(std::move(cell));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed report " + report_json.string() + ": " + e.what());
    }
    report.aggregates = aggregate_cells(report.configs, report.cells);
    return report;
}

ReplayCheck replay_verify(const RunReport& report, const std::vector<Sample>& samples, const fs::path& out_dir,
                          const std::string& cache_dir) {
    ReplayCheck check;
    std::vector<std::unique_ptr<Backend>> backends;
    std::vector<RunConfig> replay_configs = report.configs;
    for (RunConfig& config : replay_configs) {
        config.backend.kind = BackendKind::replay;
        if (!cache_dir.empty()) config.backend.cache_dir = cache_dir;
        backends.push_back(backend_for(config));
    }
    for (const CellResult& cell : report.cells) {
        if (cell.error) continue;
        ++check.checked;
        const std::string where = cell.config_label + " " + cell.sample_id;
        auto config_it = std::find_if(replay_configs.begin(), replay_configs.end(),
                                      [&](const RunConfig& c) { return c.digest() == cell.config_digest; });
        auto sample_it =
            std::find_if(samples.begin(), samples.end(), [&](const Sample& s) { return s.id == cell.sample_id; });
        if (config_it == replay_configs.end() || sample_it == samples.end()) {
            check.mismatches.push_back(where + ": config or sample not found");
            continue;
        }
        const auto stored = read_file(out_dir / cell.transcript);
        if (!stored) {
            check.mismatches.push_back(where + ": transcript missing");
            continue;
        }
        try {
            const std::size_t index = static_cast<std::size_t>(config_it - replay_configs.begin());
            const std::string replayed = to_json(run_pipeline(*config_it, *sample_it, *backends[index]));
            if (replayed == *stored) {
                ++check.identical;
            } else {
                check.mismatches.push_back(where + ": transcript differs");
            }
        } catch (const std::exception& e) {
            check.mismatches.push_back(where + ": " + e.what());
        }
    }
    return check;
}

}  // namespace coa
