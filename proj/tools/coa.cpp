#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coa/cost_model.hpp"
#include "coa/errors.hpp"
#include "coa/harness.hpp"
#include "coa/metrics.hpp"
#include "coa/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

using Settings = std::vector<std::pair<std::string, std::string>>;

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw coa::ConfigError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const std::string_view trimmed = coa::trim(item);
        if (!trimmed.empty()) out.emplace_back(trimmed);
    }
    return out;
}

void put(Settings& settings, std::string key, std::string value) {
    for (auto& [k, v] : settings) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    settings.emplace_back(std::move(key), std::move(value));
}

std::string take(Settings& settings, const std::string& key) {
    std::string out;
    for (auto it = settings.begin(); it != settings.end();) {
        if (it->first == key) {
            out = it->second;
            it = settings.erase(it);
        } else {
            ++it;
        }
    }
    return out;
}

struct RunArgs {
    std::string config_file;
    std::vector<std::string> pipelines;
    std::vector<std::string> windows;
    std::string order;
    std::vector<std::string> paths;
    std::string selection;
    std::string backend;
    std::string endpoint;
    std::string model;
    std::string cache_dir;
    std::string seed;
    std::string dataset;
    std::string out;
    std::string counter;
    std::vector<std::string> extra;
    std::size_t parallelism = 1;
    bool emit_csv = false;
};

std::vector<coa::RunConfig> build_configs(const RunArgs& args) {
    Settings settings;
    if (!args.config_file.empty()) {
        for (auto& [k, v] : coa::parse_config_text(read_text(args.config_file))) put(settings, k, v);
    }
    auto flag = [&](const char* key, const std::string& value) {
        if (!value.empty()) put(settings, key, value);
    };
    if (!args.pipelines.empty()) {
        std::string joined;
        for (const auto& p : args.pipelines) joined += (joined.empty() ? "" : ",") + p;
        put(settings, "pipeline", joined);
    }
    if (!args.windows.empty()) {
        std::string joined;
        for (const auto& w : args.windows) joined += (joined.empty() ? "" : ",") + w;
        put(settings, "window", joined);
    }
    flag("order", args.order);
    flag("selection", args.selection);
    flag("backend", args.backend);
    flag("endpoint", args.endpoint);
    flag("model", args.model);
    flag("cache_dir", args.cache_dir);
    flag("seed", args.seed);
    flag("dataset", args.dataset);
    flag("out", args.out);
    flag("counter", args.counter);
    for (const std::string& kv : args.extra) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw coa::ConfigError("--set expects key=value, got '" + kv + "'");
        put(settings, std::string(coa::trim(kv.substr(0, eq))), std::string(coa::trim(kv.substr(eq + 1))));
    }

    std::vector<std::string> pipelines = split_list(take(settings, "pipeline"));
    std::vector<std::string> presets = split_list(take(settings, "paths"));
    presets.insert(presets.end(), args.paths.begin(), args.paths.end());
    const auto bare = std::remove(pipelines.begin(), pipelines.end(), std::string("multipath"));
    if (bare != pipelines.end() && presets.empty()) {
        throw coa::ConfigError("pipeline 'multipath' needs --paths (bidirection, sc5 or perm5)");
    }
    pipelines.erase(bare, pipelines.end());
    for (const std::string& preset : presets) pipelines.push_back("multipath:" + preset);
    if (pipelines.empty()) pipelines.push_back("coa");
    std::vector<std::string> windows = split_list(take(settings, "window"));
    if (windows.empty()) windows.push_back(std::to_string(coa::ChainSettings{}.window));

    coa::RunConfig base;
    for (const auto& [k, v] : settings) base.set(k, v);
    std::vector<coa::RunConfig> configs;
    for (const std::string& pipeline : pipelines) {
        for (const std::string& window : windows) {
            coa::RunConfig config = base;
            config.set("pipeline", pipeline);
            config.set("window", window);
            config.backend.validate();
            configs.push_back(std::move(config));
        }
    }
    return configs;
}

int cmd_run(const RunArgs& args) {
    const std::vector<coa::RunConfig> configs = build_configs(args);
    const coa::RunConfig& first = configs.front();
    if (first.dataset.empty()) throw coa::ConfigError("no dataset given (--dataset or dataset = ...)");
    const std::vector<coa::Sample> samples = coa::load_dataset(first.dataset);
    coa::MatrixOptions options;
    options.out_dir = first.out_dir;
    options.parallelism = args.parallelism;
    const coa::RunReport report = coa::run_matrix(configs, samples, options);
    coa::write_report(report, options.out_dir, args.emit_csv);
    std::cout << report.to_text();
    return report.failures() == 0 ? kExitOk : kExitPartial;
}

struct CostArgs {
    std::uint64_t n = 0;
    std::uint64_t k = 8000;
    std::uint64_t r = 0;
    bool json = false;
    bool simulate = false;
};

int cmd_cost(const CostArgs& args) {
    if (args.n == 0 || args.k == 0) throw coa::ConfigError("cost needs n >= 1 and k >= 1");
    coa::CostReport report = coa::closed_form_costs(args.n, args.k, args.r);
    if (args.simulate) report.measured = coa::simulate_ops(args.n, args.k, args.r);
    const coa::OpCounts& c = report.closed_form;
    if (args.json) {
        nlohmann::ordered_json doc;
        doc["n"] = report.n;
        doc["k"] = report.k;
        doc["r"] = report.r;
        doc["enc_full"] = c.enc_full;
        doc["dec_full"] = c.dec_full;
        doc["enc_coa"] = c.enc_coa;
        doc["dec_coa"] = c.dec_coa;
        doc["encode_ratio"] = report.encode_ratio();
        doc["asymptotic_ratio"] = coa::asymptotic_encode_ratio(args.n, args.k);
        if (report.measured) {
            doc["measured"] = {{"enc_full", report.measured->enc_full},
                               {"dec_full", report.measured->dec_full},
                               {"enc_coa", report.measured->enc_coa},
                               {"dec_coa", report.measured->dec_coa}};
        }
        std::cout << doc.dump(2) << "\n";
        return kExitOk;
    }
    auto row = [](const char* name, const coa::OpCounts& o) {
        std::printf("%-12s %20llu %20llu %20llu %20llu\n", name, static_cast<unsigned long long>(o.enc_full),
                    static_cast<unsigned long long>(o.dec_full), static_cast<unsigned long long>(o.enc_coa),
                    static_cast<unsigned long long>(o.dec_coa));
    };
    std::printf("n=%llu k=%llu r=%llu\n", static_cast<unsigned long long>(report.n),
                static_cast<unsigned long long>(report.k), static_cast<unsigned long long>(report.r));
    std::printf("%-12s %20s %20s %20s %20s\n", "", "enc_full", "dec_full", "enc_coa", "dec_coa");
    row("closed_form", c);
    if (report.measured) row("simulated", *report.measured);
    std::printf("encode ratio %.6f (asymptotic %.6f)\n", report.encode_ratio(),
                coa::asymptotic_encode_ratio(args.n, args.k));
    return kExitOk;
}

struct SynthArgs {
    std::string kind = "multihop";
    std::size_t count = 200;
    std::size_t total_tokens = 2000;
    std::size_t chunk_budget = 200;
    std::size_t hops = 2;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen_synth(const SynthArgs& args) {
    if (args.out.empty()) throw coa::ConfigError("gen-synth needs --out");
    std::vector<coa::Sample> samples;
    if (args.kind == "multihop") {
        samples = coa::gen_multihop_set(args.count, args.total_tokens, args.chunk_budget, args.hops, args.seed);
    } else if (args.kind == "position") {
        for (std::size_t s = 0; s < args.count; ++s) {
            auto sweep = coa::gen_position_sweep(args.total_tokens, args.chunk_budget, args.seed + s);
            samples.insert(samples.end(), sweep.begin(), sweep.end());
        }
    } else {
        throw coa::ConfigError("unknown synthetic kind '" + args.kind + "' (expected multihop or position)");
    }
    coa::save_dataset(args.out, samples);
    std::cout << "wrote " << samples.size() << " samples to " << args.out << "\n";
    return kExitOk;
}

struct ScoreArgs {
    std::string metric = "f1";
    std::string task = "qa";
    std::string prediction;
    std::vector<std::string> references;
    std::string fixtures;
};

int cmd_score(const ScoreArgs& args) {
    if (args.fixtures.empty()) {
        const coa::TaskKind task = coa::parse_task_kind(args.task);
        const double value = coa::score(coa::parse_metric_kind(args.metric), args.prediction, args.references, task);
        std::printf("%.10f\n", value);
        return kExitOk;
    }
    std::ifstream in(args.fixtures);
    if (!in) throw coa::ConfigError("cannot open " + args.fixtures);
    std::string line;
    std::size_t line_no = 0;
    std::size_t failed = 0;
    std::size_t total = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (coa::trim(line).empty()) continue;
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw coa::SchemaError(line_no, e.what());
        }
        const std::string metric = row.at("metric").get<std::string>();
        const coa::TaskKind task = coa::parse_task_kind(row.value("task", std::string("qa")));
        const double value = coa::score(coa::parse_metric_kind(metric), row.at("prediction").get<std::string>(),
                                        row.at("references").get<std::vector<std::string>>(), task);
        const double expected = row.at("expected").get<double>();
        const bool ok = std::fabs(value - expected) <= 1e-9;
        ++total;
        if (!ok) ++failed;
        std::printf("%s line %zu %s got %.12f expected %.12f\n", ok ? "PASS" : "FAIL", line_no, metric.c_str(), value,
                    expected);
    }
    std::printf("%zu/%zu fixtures match\n", total - failed, total);
    return failed == 0 ? kExitOk : kExitPartial;
}

struct ReplayArgs {
    std::string out = "coa-out";
    std::string cache_dir;
    std::string dataset;
};

int cmd_replay_verify(const ReplayArgs& args) {
    const std::filesystem::path out_dir = args.out;
    const coa::RunReport report = coa::load_report(out_dir / "report.json");
    if (report.configs.empty()) throw coa::ConfigError("report lists no configurations");
    const std::string dataset = args.dataset.empty() ? report.configs.front().dataset : args.dataset;
    const std::vector<coa::Sample> samples = coa::load_dataset(dataset);
    const coa::ReplayCheck check = coa::replay_verify(report, samples, out_dir, args.cache_dir);
    for (const std::string& m : check.mismatches) std::cout << "MISMATCH " << m << "\n";
    std::cout << check.identical << "/" << check.checked << " transcripts replay byte-identically\n";
    return check.mismatches.empty() ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chain-of-Agents orchestration engine"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Execute a (pipeline x window x sample) matrix");
    run_cmd->alias("run-matrix");
    run_cmd->add_option("--config", run.config_file, "Flat key = value config file; flags override it");
    run_cmd->add_option("--pipeline", run.pipelines,
                        "coa, coa_no_manager, vanilla, rag, merge, hierarchical or multipath:<preset>")
        ->delimiter(',');
    run_cmd->add_option("--window", run.windows, "Agent context window(s) in tokens")->delimiter(',');
    run_cmd->add_option("--order", run.order, "Reading order: l2r, r2l or perm:<seed>");
    run_cmd->add_option("--paths", run.paths, "Multi-path preset(s): bidirection, sc5, perm5")->delimiter(',');
    run_cmd->add_option("--selection", run.selection, "Multi-path selection: vote, judge or oracle");
    run_cmd->add_option("--backend", run.backend, "scripted, replay or remote");
    run_cmd->add_option("--endpoint", run.endpoint, "Remote completion endpoint URL");
    run_cmd->add_option("--model", run.model, "Model name sent to the backend");
    run_cmd->add_option("--cache-dir", run.cache_dir, "Replay cache directory");
    run_cmd->add_option("--seed", run.seed, "Run seed");
    run_cmd->add_option("--dataset", run.dataset, "JSONL dataset");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--counter", run.counter, "Token counter: word or chars:<n>");
    run_cmd->add_option("--set", run.extra, "Extra key=value setting (repeatable)");
    run_cmd->add_option("--parallelism", run.parallelism, "Concurrent matrix cells")->check(CLI::PositiveNumber);
    run_cmd->add_flag("--emit-csv", run.emit_csv, "Also write report.csv");

    CostArgs cost;
    auto* cost_cmd = app.add_subcommand("cost", "Attention-operation counts for full context vs chunked chain");
    cost_cmd->add_option("-n,--n", cost.n, "Input tokens")->required();
    cost_cmd->add_option("-k,--k", cost.k, "Agent window");
    cost_cmd->add_option("-r,--r", cost.r, "Output tokens");
    cost_cmd->add_flag("--json", cost.json, "Print JSON");
    cost_cmd->add_flag("--simulate", cost.simulate, "Also count token by token");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("gen-synth", "Write a synthetic needle dataset");
    synth_cmd->add_option("--kind", synth.kind, "multihop or position");
    synth_cmd->add_option("--count", synth.count, "Tasks (multihop) or seeds (position)");
    synth_cmd->add_option("--total-tokens", synth.total_tokens, "Source length in words");
    synth_cmd->add_option("--chunk-budget", synth.chunk_budget, "Words per chunk");
    synth_cmd->add_option("--hops", synth.hops, "Hops per multihop task");
    synth_cmd->add_option("--seed", synth.seed, "Base seed");
    synth_cmd->add_option("--out", synth.out, "Output JSONL")->required();

    ScoreArgs score;
    auto* score_cmd = app.add_subcommand("score", "Score one prediction or check a fixture file");
    score_cmd->add_option("--metric", score.metric, "f1, exact_match, rouge_geo or edit_similarity");
    score_cmd->add_option("--task", score.task, "Task kind");
    score_cmd->add_option("--prediction", score.prediction, "Predicted text");
    score_cmd->add_option("--reference", score.references, "Reference text (repeatable)");
    score_cmd->add_option("--fixtures", score.fixtures, "JSONL of {prediction, references, metric, expected}");

    ReplayArgs replay;
    auto* replay_cmd = app.add_subcommand("replay-verify", "Re-run a report against the replay cache");
    replay_cmd->add_option("--out", replay.out, "Directory holding report.json");
    replay_cmd->add_option("--cache-dir", replay.cache_dir, "Replay cache directory (default: from the report)");
    replay_cmd->add_option("--dataset", replay.dataset, "Dataset (default: from the report)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*cost_cmd) return cmd_cost(cost);
        if (*synth_cmd) return cmd_gen_synth(synth);
        if (*score_cmd) return cmd_score(score);
        if (*replay_cmd) return cmd_replay_verify(replay);
    } catch (const coa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const coa::SchemaError& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const coa::EmptyDataset& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const coa::SpecInfeasible& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPartial;
    }
    return kExitOk;
}
