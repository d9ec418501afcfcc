#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coa/backend.hpp"

namespace coa {

/// A fact "The key of X is Y." as used by the synthetic tasks.
struct KeyFact {
    std::string subject;
    std::string object;

    friend bool operator==(const KeyFact&, const KeyFact&) = default;
};

/// Parsed "What is the key of the key of ... X?" question.
struct KeyQuestion {
    std::string start;
    std::size_t hops = 0;
};

/// Facts written in sentence form ("The key of X is Y.").
std::vector<KeyFact> extract_sentence_facts(std::string_view text);
/// Facts written in unit form ("X→Y").
std::vector<KeyFact> extract_arrow_facts(std::string_view text);
std::optional<KeyQuestion> parse_key_question(std::string_view text);

/// Follows the chain from the question's start entity; empty when any hop is missing.
std::optional<std::string> resolve_chain(const std::vector<KeyFact>& facts, const KeyQuestion& question);

/// Worker step: merges facts from the chunk with the ones restated in the
/// previous-summary section and emits them as "X→Y" pairs, chain facts first.
/// Throws MalformedPrompt when the worker layout is not recognised.
std::string scripted_worker_rule(std::string_view prompt);

/// Yes/No usefulness judgment followed by the unit, for the tree baseline.
std::string scripted_hierarchical_rule(std::string_view prompt);

/// Chooses the first candidate whose facts resolve the question.
std::string scripted_judge_rule(std::string_view prompt);

/// Answer step for manager and single-call prompts.
std::string scripted_answer_rule(std::string_view prompt);

/// Dispatches on the prompt layout. A pure function of the prompt.
std::string scripted_response(std::string_view prompt);

inline constexpr std::string_view kUnknownAnswer = "unknown";

/// Deterministic offline stand-in for a model; ignores temperature and seed.
class ScriptedOracleBackend final : public Backend {
public:
    explicit ScriptedOracleBackend(BackendDescriptor descriptor);

    const BackendDescriptor& descriptor() const override { return descriptor_; }

protected:
    GenerationResponse do_generate(const GenerationRequest& request) override;

private:
    BackendDescriptor descriptor_;
};

}  // namespace coa
