#include "coa/scripted_backend.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "coa/errors.hpp"

namespace coa {

namespace {

constexpr std::string_view kArrow = "\xE2\x86\x92";  // U+2192
constexpr std::string_view kPreviousMarker = "Here is the summary of the previous source text:";
constexpr std::string_view kHierarchicalMarker = "Reply with \"Yes\" or \"No\"";
constexpr std::string_view kJudgeMarker = "independent reading paths";
constexpr std::string_view kQuestionMarker = "Question:";

std::vector<std::string_view> tokens_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

bool is_identifier(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

std::string_view strip_punctuation(std::string_view s) {
    while (!s.empty() && std::ispunct(static_cast<unsigned char>(s.back())) && s.back() != '_') s.remove_suffix(1);
    while (!s.empty() && std::ispunct(static_cast<unsigned char>(s.front())) && s.front() != '_') s.remove_prefix(1);
    return s;
}

void append_unique(std::vector<KeyFact>& into, const std::vector<KeyFact>& from) {
    for (const KeyFact& fact : from) {
        if (std::find(into.begin(), into.end(), fact) == into.end()) {
            into.push_back(fact);
        }
    }
}

std::optional<KeyQuestion> last_question(std::string_view prompt) {
    const std::size_t pos = prompt.rfind(kQuestionMarker);
    if (pos == std::string_view::npos) {
        return std::nullopt;
    }
    std::string_view line = prompt.substr(pos + kQuestionMarker.size());
    line = line.substr(0, line.find('\n'));
    return parse_key_question(line);
}

/// Chain facts first (following the question from its start), then the rest.
std::vector<KeyFact> order_by_relevance(const std::vector<KeyFact>& facts, const std::optional<KeyQuestion>& question) {
    if (!question) {
        return facts;
    }
    std::vector<KeyFact> ordered;
    std::vector<bool> used(facts.size(), false);
    std::string current = question->start;
    std::set<std::string> visited{current};
    for (;;) {
        auto it = std::find_if(facts.begin(), facts.end(), [&](const KeyFact& f) { return f.subject == current; });
        if (it == facts.end()) break;
        const auto index = static_cast<std::size_t>(it - facts.begin());
        used[index] = true;
        ordered.push_back(*it);
        current = it->object;
        if (!visited.insert(current).second) break;
    }
    for (std::size_t i = 0; i < facts.size(); ++i) {
        if (!used[i]) ordered.push_back(facts[i]);
    }
    return ordered;
}

std::string format_units(const std::vector<KeyFact>& facts) {
    std::string out;
    for (const KeyFact& fact : facts) {
        if (!out.empty()) out += ' ';
        out += fact.subject;
        out += kArrow;
        out += fact.object;
    }
    return out;
}

}  // namespace

std::vector<KeyFact> extract_sentence_facts(std::string_view text) {
    const auto tokens = tokens_of(text);
    std::vector<KeyFact> facts;
    for (std::size_t i = 0; i + 5 < tokens.size(); ++i) {
        if (!iequals(tokens[i], "the") || tokens[i + 1] != "key" || tokens[i + 2] != "of" || tokens[i + 4] != "is") {
            continue;
        }
        std::string_view object = tokens[i + 5];
        if (!object.ends_with('.')) continue;
        object.remove_suffix(1);
        if (!is_identifier(tokens[i + 3]) || !is_identifier(object)) continue;
        facts.push_back({std::string(tokens[i + 3]), std::string(object)});
    }
    return facts;
}

std::vector<KeyFact> extract_arrow_facts(std::string_view text) {
    std::vector<KeyFact> facts;
    for (std::string_view token : tokens_of(text)) {
        const std::size_t arrow = token.find(kArrow);
        if (arrow == std::string_view::npos) continue;
        const std::string_view subject = strip_punctuation(token.substr(0, arrow));
        const std::string_view object = strip_punctuation(token.substr(arrow + kArrow.size()));
        if (is_identifier(subject) && is_identifier(object)) {
            facts.push_back({std::string(subject), std::string(object)});
        }
    }
    return facts;
}

std::optional<KeyQuestion> parse_key_question(std::string_view text) {
    const auto tokens = tokens_of(text);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (!iequals(tokens[i], "key") || !iequals(tokens[i + 1], "of")) continue;
        KeyQuestion question;
        std::size_t j = i;
        while (j + 1 < tokens.size() && iequals(tokens[j], "key") && iequals(tokens[j + 1], "of")) {
            ++question.hops;
            j += 2;
            if (j < tokens.size() && iequals(tokens[j], "the")) ++j;
        }
        if (j >= tokens.size()) return std::nullopt;
        const std::string_view start = strip_punctuation(tokens[j]);
        if (!is_identifier(start)) return std::nullopt;
        question.start = std::string(start);
        return question;
    }
    return std::nullopt;
}

std::optional<std::string> resolve_chain(const std::vector<KeyFact>& facts, const KeyQuestion& question) {
    std::string current = question.start;
    for (std::size_t hop = 0; hop < question.hops; ++hop) {
        auto it = std::find_if(facts.begin(), facts.end(), [&](const KeyFact& f) { return f.subject == current; });
        if (it == facts.end()) return std::nullopt;
        current = it->object;
    }
    return current;
}

std::string scripted_worker_rule(std::string_view prompt) {
    const std::size_t marker = prompt.find(kPreviousMarker);
    if (marker == std::string_view::npos) {
        throw MalformedPrompt("worker prompt lacks the previous-summary section");
    }
    const std::string_view chunk = prompt.substr(0, marker);
    std::string_view previous = prompt.substr(marker + kPreviousMarker.size());
    const std::size_t end = std::min(previous.find("\nQuestion:"), previous.find("\nYou need to read"));
    if (end == std::string_view::npos) {
        throw MalformedPrompt("worker prompt lacks the closing instruction");
    }
    previous = previous.substr(0, end);

    std::vector<KeyFact> facts;
    append_unique(facts, extract_arrow_facts(previous));
    append_unique(facts, extract_sentence_facts(previous));
    append_unique(facts, extract_sentence_facts(chunk));
    return format_units(order_by_relevance(facts, last_question(prompt)));
}

std::string scripted_hierarchical_rule(std::string_view prompt) {
    const std::size_t instruction = prompt.find("\nDecide whether");
    if (instruction == std::string_view::npos) {
        throw MalformedPrompt("hierarchical prompt lacks the judgment instruction");
    }
    std::string_view chunk = prompt.substr(0, instruction);
    const std::size_t question_pos = chunk.rfind("\nQuestion:");
    if (question_pos != std::string_view::npos) chunk = chunk.substr(0, question_pos);

    const std::vector<KeyFact> facts = extract_sentence_facts(chunk);
    const auto question = last_question(prompt);
    bool useful = !facts.empty();
    if (question) {
        // Only facts about an entity the question names look relevant in isolation.
        useful = std::any_of(facts.begin(), facts.end(), [&](const KeyFact& f) { return f.subject == question->start; });
    }
    if (!useful) return "No";
    return "Yes\n" + format_units(order_by_relevance(facts, question));
}

std::string scripted_judge_rule(std::string_view prompt) {
    const auto question = last_question(prompt);
    std::size_t pos = 0;
    while ((pos = prompt.find("Candidate ", pos)) != std::string_view::npos) {
        std::string_view line = prompt.substr(pos);
        line = line.substr(0, line.find('\n'));
        pos += line.size();
        if (!question) continue;
        if (auto answer = resolve_chain(extract_arrow_facts(line), *question)) {
            return *answer;
        }
    }
    return std::string(kUnknownAnswer);
}

std::string scripted_answer_rule(std::string_view prompt) {
    std::vector<KeyFact> facts = extract_arrow_facts(prompt);
    append_unique(facts, extract_sentence_facts(prompt));
    const auto question = last_question(prompt);
    if (!question) {
        return facts.empty() ? std::string(kUnknownAnswer) : format_units(facts);
    }
    if (auto answer = resolve_chain(facts, *question)) {
        return *answer;
    }
    return std::string(kUnknownAnswer);
}

std::string scripted_response(std::string_view prompt) {
    if (prompt.find(kHierarchicalMarker) != std::string_view::npos) return scripted_hierarchical_rule(prompt);
    if (prompt.find(kPreviousMarker) != std::string_view::npos) return scripted_worker_rule(prompt);
    if (prompt.find(kJudgeMarker) != std::string_view::npos) return scripted_judge_rule(prompt);
    return scripted_answer_rule(prompt);
}

ScriptedOracleBackend::ScriptedOracleBackend(BackendDescriptor descriptor) : descriptor_(std::move(descriptor)) {}

GenerationResponse ScriptedOracleBackend::do_generate(const GenerationRequest& request) {
    GenerationResponse response;
    response.text = scripted_response(request.prompt);
    response.prompt_tokens = descriptor_.counter.count(request.prompt);
    response.generated_tokens = descriptor_.counter.count(response.text);
    return response;
}

}  // namespace coa
