#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "coa/types.hpp"

namespace coa {

/// Transcript document with a fixed field order; byte-stable for equal results.
std::string to_json(const PipelineResult& result);
PipelineResult pipeline_result_from_json(std::string_view json);

/// Dataset row: {"id", "input", "query"?, "answers", "task", "length"?}.
std::string to_jsonl_row(const Sample& sample);
/// Throws SchemaError carrying `line_number` on malformed rows.
Sample sample_from_jsonl_row(std::string_view row, std::size_t line_number);

}  // namespace coa
