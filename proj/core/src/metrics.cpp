#include "coa/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "coa/errors.hpp"
#include "coa/text_budget.hpp"

namespace coa {

namespace {

bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

void require_references(const std::vector<std::string>& references) {
    if (references.empty()) {
        throw MissingReferences("metric requires at least one reference");
    }
}

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
    std::map<Ngram, std::size_t> counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                       tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
    return counts;
}

double f_measure(std::size_t overlap, std::size_t predicted, std::size_t gold) {
    if (overlap == 0 || predicted == 0 || gold == 0) {
        return 0.0;
    }
    const double precision = static_cast<double>(overlap) / static_cast<double>(predicted);
    const double recall = static_cast<double>(overlap) / static_cast<double>(gold);
    return 2.0 * precision * recall / (precision + recall);
}

double rouge_n(const std::vector<std::string>& pred, const std::vector<std::string>& ref, std::size_t n) {
    const auto p = ngram_counts(pred, n);
    const auto r = ngram_counts(ref, n);
    std::size_t overlap = 0;
    for (const auto& [gram, count] : p) {
        if (auto it = r.find(gram); it != r.end()) {
            overlap += std::min(count, it->second);
        }
    }
    const std::size_t pred_total = pred.size() >= n ? pred.size() - n + 1 : 0;
    const std::size_t ref_total = ref.size() >= n ? ref.size() - n + 1 : 0;
    return f_measure(overlap, pred_total, ref_total);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (const std::string& x : a) {
        std::size_t diagonal = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const std::size_t above = row[j + 1];
            row[j + 1] = x == b[j] ? diagonal + 1 : std::max(row[j + 1], row[j]);
            diagonal = above;
        }
    }
    return row[b.size()];
}

}  // namespace

std::string normalize_answer(std::string_view text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_ascii_punct(c)) continue;
        cleaned.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
    std::string out;
    for (const std::string& token : split_ws(cleaned)) {
        if (token == "a" || token == "an" || token == "the") continue;
        if (!out.empty()) out.push_back(' ');
        out += token;
    }
    return out;
}

std::vector<std::string> normalized_tokens(std::string_view text) { return split_ws(normalize_answer(text)); }

double f1_score(std::string_view prediction, const std::vector<std::string>& references) {
    require_references(references);
    const auto pred = normalized_tokens(prediction);
    double best = 0.0;
    for (const std::string& reference : references) {
        const auto gold = normalized_tokens(reference);
        if (pred.empty() || gold.empty()) {
            best = std::max(best, pred.empty() && gold.empty() ? 1.0 : 0.0);
            continue;
        }
        std::map<std::string, std::size_t> gold_counts;
        for (const auto& token : gold) ++gold_counts[token];
        std::size_t common = 0;
        for (const auto& token : pred) {
            if (auto it = gold_counts.find(token); it != gold_counts.end() && it->second > 0) {
                --it->second;
                ++common;
            }
        }
        best = std::max(best, f_measure(common, pred.size(), gold.size()));
    }
    return best;
}

std::optional<char> leading_option_letter(std::string_view text) {
    text = trim(text);
    bool parenthesized = false;
    if (!text.empty() && text.front() == '(') {
        parenthesized = true;
        text.remove_prefix(1);
    }
    if (text.empty() || std::isalpha(static_cast<unsigned char>(text.front())) == 0) {
        return std::nullopt;
    }
    const char letter = text.front();
    if (!parenthesized && std::isupper(static_cast<unsigned char>(letter)) == 0) {
        return std::nullopt;
    }
    text.remove_prefix(1);
    if (parenthesized) {
        if (text.empty() || text.front() != ')') return std::nullopt;
    } else if (!text.empty()) {
        const char next = text.front();
        if (!is_space(next) && next != ')' && next != '.' && next != ':' && next != ',') return std::nullopt;
    }
    return static_cast<char>(std::toupper(static_cast<unsigned char>(letter)));
}

int exact_match(std::string_view prediction, const std::vector<std::string>& references, bool multiple_choice) {
    require_references(references);
    const auto pred_letter = multiple_choice ? leading_option_letter(prediction) : std::nullopt;
    const std::string pred = normalize_answer(prediction);
    for (const std::string& reference : references) {
        if (multiple_choice) {
            const auto ref_letter = leading_option_letter(reference);
            if (pred_letter && ref_letter) {
                if (*pred_letter == *ref_letter) return 1;
                continue;
            }
        }
        if (pred == normalize_answer(reference)) return 1;
    }
    return 0;
}

std::vector<std::string> rouge_tokens(std::string_view text, RougeTokenizer tokenizer) {
    if (tokenizer == RougeTokenizer::normalized) {
        return normalized_tokens(text);
    }
    std::string cleaned(text.size(), ' ');
    std::transform(text.begin(), text.end(), cleaned.begin(), [](char ch) {
        const auto c = static_cast<unsigned char>(ch);
        return c < 0x80 && std::isalnum(c) != 0 ? static_cast<char>(std::tolower(c)) : ' ';
    });
    return split_ws(cleaned);
}

RougeScores rouge_scores(std::string_view prediction, std::string_view reference, RougeTokenizer tokenizer) {
    const auto pred = rouge_tokens(prediction, tokenizer);
    const auto ref = rouge_tokens(reference, tokenizer);
    RougeScores scores;
    scores.rouge1 = rouge_n(pred, ref, 1);
    scores.rouge2 = rouge_n(pred, ref, 2);
    scores.rouge_l = f_measure(lcs_length(pred, ref), pred.size(), ref.size());
    return scores;
}

double rouge_geo_mean(std::string_view prediction, std::string_view reference, RougeTokenizer tokenizer) {
    const RougeScores s = rouge_scores(prediction, reference, tokenizer);
    if (s.rouge1 == 0.0 || s.rouge2 == 0.0 || s.rouge_l == 0.0) {
        return 0.0;
    }
    return std::cbrt(s.rouge1 * s.rouge2 * s.rouge_l);
}

std::u32string decode_utf8(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const auto lead = static_cast<unsigned char>(text[i]);
        std::size_t extra = 0;
        char32_t cp = lead;
        if (lead >= 0xC0 && lead < 0xE0) {
            extra = 1;
            cp = lead & 0x1FU;
        } else if (lead >= 0xE0 && lead < 0xF0) {
            extra = 2;
            cp = lead & 0x0FU;
        } else if (lead >= 0xF0 && lead < 0xF8) {
            extra = 3;
            cp = lead & 0x07U;
        }
        ++i;
        for (std::size_t k = 0; k < extra && i < text.size(); ++k, ++i) {
            cp = (cp << 6U) | (static_cast<unsigned char>(text[i]) & 0x3FU);
        }
        out.push_back(cp);
    }
    return out;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diagonal = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t above = row[j];
            const std::size_t substitution = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({above + 1, row[j - 1] + 1, substitution});
            diagonal = above;
        }
    }
    return row[b.size()];
}

std::string_view first_code_line(std::string_view prediction) {
    while (!prediction.empty() && prediction.front() == '\n') prediction.remove_prefix(1);
    std::string_view rest = prediction;
    while (!rest.empty()) {
        const std::size_t newline = rest.find('\n');
        const std::string_view line = rest.substr(0, newline);
        if (line.find('`') == std::string_view::npos && line.find('#') == std::string_view::npos &&
            line.find("//") == std::string_view::npos) {
            return line;
        }
        if (newline == std::string_view::npos) break;
        rest.remove_prefix(newline + 1);
    }
    return prediction;
}

double edit_similarity(std::string_view prediction, std::string_view reference) {
    const std::u32string pred = decode_utf8(first_code_line(prediction));
    const std::u32string ref = decode_utf8(reference);
    const std::size_t longest = std::max(pred.size(), ref.size());
    if (longest == 0) {
        return 1.0;
    }
    return 1.0 - static_cast<double>(levenshtein(pred, ref)) / static_cast<double>(longest);
}

std::string_view to_string(MetricKind kind) noexcept {
    switch (kind) {
        case MetricKind::f1: return "f1";
        case MetricKind::exact_match: return "exact_match";
        case MetricKind::rouge_geo: return "rouge_geo";
        case MetricKind::edit_similarity: return "edit_similarity";
    }
    return "f1";
}

MetricKind parse_metric_kind(std::string_view name) {
    for (MetricKind kind : {MetricKind::f1, MetricKind::exact_match, MetricKind::rouge_geo, MetricKind::edit_similarity}) {
        if (to_string(kind) == name) return kind;
    }
    if (name == "em") return MetricKind::exact_match;
    if (name == "rouge") return MetricKind::rouge_geo;
    if (name == "code_sim" || name == "edit_sim") return MetricKind::edit_similarity;
    throw ConfigError("unknown metric '" + std::string(name) + "'");
}

std::vector<MetricKind> applicable_metrics(TaskKind task) {
    switch (task) {
        case TaskKind::qa: return {MetricKind::f1, MetricKind::exact_match};
        case TaskKind::multiple_choice: return {MetricKind::exact_match};
        case TaskKind::query_summarization:
        case TaskKind::generic_summarization: return {MetricKind::rouge_geo};
        case TaskKind::code_completion: return {MetricKind::edit_similarity};
    }
    return {MetricKind::f1};
}

double score(MetricKind metric, std::string_view prediction, const std::vector<std::string>& references,
             TaskKind task) {
    require_references(references);
    switch (metric) {
        case MetricKind::f1:
            return f1_score(prediction, references);
        case MetricKind::exact_match:
            return exact_match(prediction, references, task == TaskKind::multiple_choice);
        case MetricKind::rouge_geo: {
            double best = 0.0;
            for (const auto& reference : references) best = std::max(best, rouge_geo_mean(prediction, reference));
            return best;
        }
        case MetricKind::edit_similarity: {
            double best = 0.0;
            for (const auto& reference : references) best = std::max(best, edit_similarity(prediction, reference));
            return best;
        }
    }
    return 0.0;
}

}  // namespace coa
