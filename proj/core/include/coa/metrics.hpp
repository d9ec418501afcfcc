#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coa/types.hpp"

namespace coa {

/// QA-standard answer normalization: lowercase, drop ASCII punctuation,
/// drop the articles a/an/the, collapse whitespace. Idempotent.
std::string normalize_answer(std::string_view text);
std::vector<std::string> normalized_tokens(std::string_view text);

/// Max over references of token-multiset F1 on normalized tokens.
/// Throws MissingReferences when `references` is empty.
double f1_score(std::string_view prediction, const std::vector<std::string>& references);

/// Leading option letter such as "B", "(B)" or "B) ..." at the start of `text`.
std::optional<char> leading_option_letter(std::string_view text);

/// 1 when the normalized prediction equals a normalized reference. In
/// multiple-choice mode both sides are reduced to their option letter first.
int exact_match(std::string_view prediction, const std::vector<std::string>& references,
                bool multiple_choice = false);

enum class RougeTokenizer {
    /// normalize_answer tokens (articles dropped).
    normalized,
    /// Lowercase, every non-alphanumeric character is a separator, articles kept (default).
    scrolls,
};

struct RougeScores {
    double rouge1 = 0.0;
    double rouge2 = 0.0;
    double rouge_l = 0.0;
};

std::vector<std::string> rouge_tokens(std::string_view text, RougeTokenizer tokenizer);

/// F-measures of ROUGE-1, ROUGE-2 and whole-text ROUGE-L; no stemming, no stopwords.
RougeScores rouge_scores(std::string_view prediction, std::string_view reference,
                         RougeTokenizer tokenizer = RougeTokenizer::scrolls);

/// Geometric mean of the three F-measures; zero if any component is zero.
double rouge_geo_mean(std::string_view prediction, std::string_view reference,
                      RougeTokenizer tokenizer = RougeTokenizer::scrolls);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::u32string decode_utf8(std::string_view text);

/// First line of a code prediction that is not a comment or a fence.
std::string_view first_code_line(std::string_view prediction);

/// 1 - levenshtein / max length, over code points of the first code line.
double edit_similarity(std::string_view prediction, std::string_view reference);

enum class MetricKind { f1, exact_match, rouge_geo, edit_similarity };

std::string_view to_string(MetricKind kind) noexcept;
MetricKind parse_metric_kind(std::string_view name);

/// Metrics reported for a task; the first is the headline one.
std::vector<MetricKind> applicable_metrics(TaskKind task);

/// Scores against every reference and keeps the best.
double score(MetricKind metric, std::string_view prediction, const std::vector<std::string>& references,
             TaskKind task = TaskKind::qa);

}  // namespace coa
