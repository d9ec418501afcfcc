#include "coa/multipath.hpp"

#include <algorithm>
#include <map>

#include "coa/digest.hpp"
#include "coa/errors.hpp"
#include "parallel.hpp"

namespace coa {

std::string_view to_string(Selection selection) noexcept {
    switch (selection) {
        case Selection::vote: return "vote";
        case Selection::judge: return "judge";
        case Selection::oracle: return "oracle";
    }
    return "vote";
}

Selection parse_selection(std::string_view name) {
    if (name == "vote") return Selection::vote;
    if (name == "judge") return Selection::judge;
    if (name == "oracle") return Selection::oracle;
    throw ConfigError("unknown path selection '" + std::string(name) + "' (expected vote, judge or oracle)");
}

PathSet PathSet::bidirection(Selection selection) {
    PathSet set;
    set.selection = selection;
    set.paths = {{ReadingOrder::left_to_right(), 0.0, std::nullopt}, {ReadingOrder::right_to_left(), 0.0, std::nullopt}};
    return set;
}

PathSet PathSet::self_consistency(Selection selection, std::uint64_t base_seed) {
    PathSet set;
    set.selection = selection;
    for (std::uint64_t i = 0; i < 5; ++i) {
        set.paths.push_back({ReadingOrder::left_to_right(), kSelfConsistencyTemperature, base_seed + i});
    }
    return set;
}

PathSet PathSet::permutations(Selection selection, std::uint64_t base_seed) {
    PathSet set;
    set.selection = selection;
    for (std::uint64_t i = 1; i <= 5; ++i) {
        set.paths.push_back({ReadingOrder::permutation(base_seed + i), 0.0, std::nullopt});
    }
    return set;
}

PathSet PathSet::preset(std::string_view name, Selection selection, std::uint64_t base_seed) {
    if (name == "bidirection") return bidirection(selection);
    if (name == "sc5") return self_consistency(selection, base_seed);
    if (name == "perm5") return permutations(selection, base_seed);
    throw ConfigError("unknown path preset '" + std::string(name) + "' (expected bidirection, sc5 or perm5)");
}

void PathSet::validate() const {
    if (paths.empty()) {
        throw ConfigError("a path set needs at least one path");
    }
    for (const ReadingPath& path : paths) {
        if (path.temperature < 0.0) throw ConfigError("path temperature must be non-negative");
    }
}

std::size_t vote_index(const std::vector<std::string>& answers) {
    if (answers.empty()) {
        throw Error("majority vote over zero answers");
    }
    std::map<std::string, std::pair<std::size_t, std::size_t>> classes;  // normalized -> (count, first index)
    for (std::size_t i = 0; i < answers.size(); ++i) {
        auto [it, inserted] = classes.try_emplace(normalize_answer(answers[i]), 0, i);
        ++it->second.first;
    }
    std::size_t best_count = 0;
    std::size_t best_index = 0;
    for (const auto& [key, stats] : classes) {
        const auto [count, first] = stats;
        if (count > best_count || (count == best_count && first < best_index)) {
            best_count = count;
            best_index = first;
        }
    }
    return best_index;
}

std::string select_by_vote(const std::vector<std::string>& answers) { return answers[vote_index(answers)]; }

std::string select_by_judge(const std::vector<CommunicationUnit>& units, const std::optional<std::string>& query,
                            const PromptTemplates& templates, Backend& backend, const ChainSettings& settings,
                            std::vector<TranscriptEntry>* transcript) {
    if (units.empty()) {
        throw Error("judge selection over zero units");
    }
    std::vector<std::string> texts;
    texts.reserve(units.size());
    for (const auto& unit : units) texts.push_back(unit.text);
    TranscriptEntry entry = call_agent(backend, AgentRole::judge, 0, render_judge_prompt(templates, texts, query), settings);
    std::string answer(trim(entry.generation));
    if (transcript != nullptr) {
        transcript->push_back(std::move(entry));
    }
    return answer;
}

std::pair<std::size_t, double> select_oracle(const std::vector<std::string>& answers,
                                             const std::vector<std::string>& references, MetricKind metric,
                                             TaskKind task) {
    if (references.empty()) {
        throw MissingReferences("oracle selection requires references");
    }
    if (answers.empty()) {
        throw Error("oracle selection over zero answers");
    }
    std::size_t best = 0;
    double best_score = score(metric, answers[0], references, task);
    for (std::size_t i = 1; i < answers.size(); ++i) {
        const double s = score(metric, answers[i], references, task);
        if (s > best_score) {
            best = i;
            best_score = s;
        }
    }
    return {best, best_score};
}

PipelineResult run_multipath(const Sample& sample, const PathSet& paths, const ChainSettings& settings,
                             const PromptTemplates& templates, AgentBackends backends) {
    paths.validate();
    if (paths.selection == Selection::oracle && sample.references.empty()) {
        throw MissingReferences("oracle selection requires references on sample " + sample.id);
    }

    const std::size_t count = paths.paths.size();
    std::vector<std::optional<PipelineResult>> runs(count);
    std::vector<CommunicationUnit> last_units(count);
    std::vector<PathOutcome> outcomes(count);
    detail::parallel_for(count, settings.parallelism, [&](std::size_t p) {
        const ReadingPath& path = paths.paths[p];
        ChainSettings path_settings = settings;
        path_settings.temperature = path.temperature;
        if (path.seed) path_settings.seed = path.seed;
        outcomes[p].order = path.order.name();
        outcomes[p].temperature = path.temperature;
        try {
            runs[p] = run_chain(sample, path_settings, templates, backends, path.order, &last_units[p]);
            outcomes[p].final = runs[p]->final;
            outcomes[p].last_unit = last_units[p].text;
        } catch (const Error& e) {
            outcomes[p].error = e.what();
        }
    });

    PipelineResult result;
    result.pipeline = "multipath";
    result.selection = std::string(to_string(paths.selection));
    std::string digest_material = "multipath:" + result.selection + ":" + std::string(to_string(paths.oracle_metric));
    std::vector<std::string> answers;
    std::vector<CommunicationUnit> units;
    std::vector<std::size_t> survivors;
    for (std::size_t p = 0; p < count; ++p) {
        if (!runs[p]) continue;
        for (TranscriptEntry entry : runs[p]->transcript) {
            entry.path_index = p;
            result.transcript.push_back(std::move(entry));
        }
        if (result.chunk_plan.chunks.empty()) result.chunk_plan = runs[p]->chunk_plan;
        digest_material += "\n" + runs[p]->config_digest;
        answers.push_back(runs[p]->final);
        units.push_back(last_units[p]);
        survivors.push_back(p);
    }
    result.paths = std::move(outcomes);
    if (survivors.empty()) {
        std::string reasons;
        for (const auto& outcome : result.paths) reasons += "\n  " + outcome.order + ": " + outcome.error.value_or("");
        throw Error("all " + std::to_string(count) + " paths failed:" + reasons);
    }
    result.config_digest = sha256_hex(digest_material);

    switch (paths.selection) {
        case Selection::vote:
            result.final = select_by_vote(answers);
            break;
        case Selection::judge: {
            std::vector<TranscriptEntry> judge_entries;
            result.final = select_by_judge(units, sample.query, templates, backends.manager, settings, &judge_entries);
            for (auto& entry : judge_entries) {
                entry.path_index = count;
                result.transcript.push_back(std::move(entry));
            }
            break;
        }
        case Selection::oracle:
            result.final = answers[select_oracle(answers, sample.references, paths.oracle_metric, sample.task).first];
            break;
    }
    return result;
}

}  // namespace coa
