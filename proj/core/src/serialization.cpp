#include "coa/serialization.hpp"

#include <json.hpp>

#include "coa/errors.hpp"

namespace coa {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json chunk_plan_json(const ChunkPlan& plan) {
    ordered_json doc;
    doc["budget"] = plan.budget;
    doc["source_len"] = plan.source_len;
    doc["chunk_count"] = plan.chunk_count();
    ordered_json chunks = ordered_json::array();
    for (const Chunk& chunk : plan.chunks) {
        chunks.push_back({{"offset", chunk.offset}, {"tokens", chunk.tokens}, {"text", chunk.text}});
    }
    doc["chunks"] = std::move(chunks);
    return doc;
}

}  // namespace

std::string to_json(const PipelineResult& result) {
    ordered_json doc;
    doc["pipeline"] = result.pipeline;
    doc["config_digest"] = result.config_digest;
    doc["final"] = result.final;
    if (!result.selection.empty()) doc["selection"] = result.selection;
    doc["chunk_plan"] = chunk_plan_json(result.chunk_plan);
    ordered_json transcript = ordered_json::array();
    for (const TranscriptEntry& entry : result.transcript) {
        ordered_json e;
        e["role"] = std::string(to_string(entry.role));
        e["agent_index"] = entry.agent_index;
        e["path_index"] = entry.path_index;
        e["chunk_index"] = entry.chunk_index ? ordered_json(*entry.chunk_index) : ordered_json(nullptr);
        e["prompt_tokens"] = entry.prompt_tokens;
        e["generated_tokens"] = entry.generated_tokens;
        e["prompt"] = entry.prompt;
        e["generation"] = entry.generation;
        transcript.push_back(std::move(e));
    }
    doc["transcript"] = std::move(transcript);
    if (!result.paths.empty()) {
        ordered_json paths = ordered_json::array();
        for (const PathOutcome& path : result.paths) {
            ordered_json p;
            p["order"] = path.order;
            p["temperature"] = path.temperature;
            p["final"] = path.final;
            p["last_unit"] = path.last_unit;
            p["error"] = path.error ? ordered_json(*path.error) : ordered_json(nullptr);
            paths.push_back(std::move(p));
        }
        doc["paths"] = std::move(paths);
    }
    return doc.dump(2) + "\n";
}

PipelineResult pipeline_result_from_json(std::string_view json) {
    try {
        const auto doc = nlohmann::json::parse(json);
        PipelineResult result;
        result.pipeline = doc.at("pipeline").get<std::string>();
        result.config_digest = doc.at("config_digest").get<std::string>();
        result.final = doc.at("final").get<std::string>();
        result.selection = doc.value("selection", std::string());
        const auto& plan = doc.at("chunk_plan");
        result.chunk_plan.budget = plan.at("budget").get<std::size_t>();
        result.chunk_plan.source_len = plan.at("source_len").get<std::size_t>();
        for (const auto& c : plan.at("chunks")) {
            Chunk chunk;
            chunk.offset = c.at("offset").get<std::size_t>();
            chunk.tokens = c.at("tokens").get<std::size_t>();
            chunk.text = c.at("text").get<std::string>();
            result.chunk_plan.chunks.push_back(std::move(chunk));
        }
        for (const auto& e : doc.at("transcript")) {
            TranscriptEntry entry;
            entry.role = parse_agent_role(e.at("role").get<std::string>());
            entry.agent_index = e.at("agent_index").get<std::size_t>();
            entry.path_index = e.at("path_index").get<std::size_t>();
            if (!e.at("chunk_index").is_null()) entry.chunk_index = e.at("chunk_index").get<std::size_t>();
            entry.prompt_tokens = e.at("prompt_tokens").get<std::size_t>();
            entry.generated_tokens = e.at("generated_tokens").get<std::size_t>();
            entry.prompt = e.at("prompt").get<std::string>();
            entry.generation = e.at("generation").get<std::string>();
            result.transcript.push_back(std::move(entry));
        }
        if (doc.contains("paths")) {
            for (const auto& p : doc.at("paths")) {
                PathOutcome path;
                path.order = p.at("order").get<std::string>();
                path.temperature = p.at("temperature").get<double>();
                path.final = p.at("final").get<std::string>();
                path.last_unit = p.at("last_unit").get<std::string>();
                if (!p.at("error").is_null()) path.error = p.at("error").get<std::string>();
                result.paths.push_back(std::move(path));
            }
        }
        return result;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed transcript JSON: ") + e.what());
    }
}

std::string to_jsonl_row(const Sample& sample) {
    ordered_json row;
    row["id"] = sample.id;
    row["input"] = sample.source;
    if (sample.query) row["query"] = *sample.query;
    row["answers"] = sample.references;
    row["task"] = std::string(to_string(sample.task));
    if (sample.reference_len) row["length"] = *sample.reference_len;
    return row.dump();
}

Sample sample_from_jsonl_row(std::string_view row, std::size_t line_number) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(row);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(line_number, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError(line_number, "row is not a JSON object");
    auto require_string = [&](const char* field) -> std::string {
        if (!doc.contains(field)) throw SchemaError(line_number, std::string("missing field \"") + field + "\"");
        if (!doc[field].is_string()) throw SchemaError(line_number, std::string("field \"") + field + "\" must be a string");
        return doc[field].get<std::string>();
    };

    Sample sample;
    sample.id = require_string("id");
    sample.source = require_string("input");
    if (doc.contains("query") && !doc["query"].is_null()) {
        if (!doc["query"].is_string()) throw SchemaError(line_number, "field \"query\" must be a string");
        const std::string query = doc["query"].get<std::string>();
        if (!query.empty()) sample.query = query;
    }
    if (!doc.contains("answers")) throw SchemaError(line_number, "missing field \"answers\"");
    const auto& answers = doc["answers"];
    if (!answers.is_array() || answers.empty()) throw SchemaError(line_number, "field \"answers\" must be a non-empty array");
    for (const auto& answer : answers) {
        if (!answer.is_string()) throw SchemaError(line_number, "every answer must be a string");
        sample.references.push_back(answer.get<std::string>());
    }
    if (doc.contains("task")) {
        if (!doc["task"].is_string()) throw SchemaError(line_number, "field \"task\" must be a string");
        try {
            sample.task = parse_task_kind(doc["task"].get<std::string>());
        } catch (const ConfigError& e) {
            throw SchemaError(line_number, e.what());
        }
    } else {
        sample.task = sample.query ? TaskKind::qa : TaskKind::generic_summarization;
    }
    if (doc.contains("length") && doc["length"].is_number_unsigned()) {
        sample.reference_len = doc["length"].get<std::size_t>();
    }
    return sample;
}

}  // namespace coa
