#include "coa/text_budget.hpp"

#include <algorithm>
#include <charconv>

#include "coa/errors.hpp"

namespace coa {

namespace {

bool is_continuation(char c) noexcept {
    return (static_cast<unsigned char>(c) & 0xC0U) == 0x80U;
}

std::size_t code_points(std::string_view text) noexcept {
    return static_cast<std::size_t>(
        std::count_if(text.begin(), text.end(), [](char c) { return !is_continuation(c); }));
}

/// Byte offset reached after advancing `n` code points from `from`.
std::size_t advance_code_points(std::string_view text, std::size_t from, std::size_t n) noexcept {
    std::size_t pos = from;
    while (pos < text.size() && n > 0) {
        ++pos;
        while (pos < text.size() && is_continuation(text[pos])) {
            ++pos;
        }
        --n;
    }
    return pos;
}

/// Offsets where a word begins.
std::vector<std::size_t> word_starts(std::string_view text) {
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!is_space(text[i]) && (i == 0 || is_space(text[i - 1]))) {
            starts.push_back(i);
        }
    }
    return starts;
}

std::string_view rtrim(std::string_view text) noexcept {
    while (!text.empty() && is_space(text.back())) {
        text.remove_suffix(1);
    }
    return text;
}

std::string_view ltrim(std::string_view text) noexcept {
    while (!text.empty() && is_space(text.front())) {
        text.remove_prefix(1);
    }
    return text;
}

// End offset of the chunk starting at `start` under the character-block scheme.
std::size_t char_block_chunk_end(std::string_view text, std::size_t start, std::size_t limit,
                                 bool hard_split) {
    const std::string_view rest = text.substr(start);
    if (code_points(rest) <= limit) {
        return text.size();
    }
    const std::size_t hard_end = advance_code_points(text, start, limit);
    // Largest word start in (start, hard_end] bounds the chunk.
    for (std::size_t pos = hard_end; pos > start; --pos) {
        if (pos < text.size() && !is_space(text[pos]) && is_space(text[pos - 1])) {
            return pos;
        }
    }
    // No word start fits. If the first word fits, cut inside the whitespace after it.
    std::size_t word_begin = start;
    while (word_begin < text.size() && is_space(text[word_begin])) {
        ++word_begin;
    }
    std::size_t word_end = word_begin;
    while (word_end < text.size() && !is_space(text[word_end])) {
        ++word_end;
    }
    if (word_end <= hard_end) {
        return hard_end;
    }
    if (!hard_split) {
        throw SingleUnitOverflow("unit of " + std::to_string(code_points(text.substr(word_begin, word_end - word_begin))) +
                                 " characters exceeds the chunk budget of " + std::to_string(limit) + " characters");
    }
    return hard_end;
}

}  // namespace

bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::string_view trim(std::string_view text) noexcept { return rtrim(ltrim(text)); }

TokenCounter TokenCounter::character_blocks(std::size_t block_size) {
    if (block_size == 0) {
        throw ConfigError("character block size must be positive");
    }
    TokenCounter counter;
    counter.scheme_ = Scheme::character_block;
    counter.block_size_ = block_size;
    return counter;
}

std::size_t TokenCounter::count(std::string_view text) const {
    if (scheme_ == Scheme::word) {
        std::size_t words = 0;
        bool in_word = false;
        for (char c : text) {
            const bool space = is_space(c);
            if (!space && !in_word) {
                ++words;
            }
            in_word = !space;
        }
        return words;
    }
    const std::size_t points = code_points(text);
    return (points + block_size_ - 1) / block_size_;
}

std::string TokenCounter::name() const {
    if (scheme_ == Scheme::word) {
        return "word";
    }
    return "chars:" + std::to_string(block_size_);
}

TokenCounter TokenCounter::parse(std::string_view name) {
    if (name == "word" || name == "words") {
        return words();
    }
    constexpr std::string_view prefix = "chars:";
    if (name.starts_with(prefix)) {
        const std::string_view digits = name.substr(prefix.size());
        std::size_t size = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), size);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && size > 0) {
            return character_blocks(size);
        }
    }
    throw ConfigError("unknown token counter '" + std::string(name) + "' (expected word or chars:<n>)");
}

std::string_view Chunk::content() const { return trim(text); }

std::string ChunkPlan::join() const {
    std::string out;
    for (const Chunk& chunk : chunks) {
        out += chunk.text;
    }
    return out;
}

ChunkPlan split_chunks(std::string_view source, std::size_t budget, const TokenCounter& counter,
                       SplitOptions options) {
    if (budget == 0) {
        throw BudgetExhausted("chunk budget must be at least one token");
    }
    ChunkPlan plan;
    plan.budget = budget;
    plan.source_len = counter.count(source);

    std::vector<std::size_t> ends;
    if (counter.scheme() == TokenCounter::Scheme::word) {
        const std::vector<std::size_t> starts = word_starts(source);
        for (std::size_t next = budget; next < starts.size(); next += budget) {
            ends.push_back(starts[next]);
        }
        ends.push_back(source.size());
    } else {
        const std::size_t limit = budget * counter.block_size();
        std::size_t start = 0;
        do {
            start = char_block_chunk_end(source, start, limit, options.hard_split_fallback);
            ends.push_back(start);
        } while (start < source.size());
    }

    std::size_t start = 0;
    for (std::size_t end : ends) {
        Chunk chunk;
        chunk.offset = start;
        chunk.text = std::string(source.substr(start, end - start));
        chunk.tokens = counter.count(chunk.text);
        plan.chunks.push_back(std::move(chunk));
        start = end;
    }
    return plan;
}

std::size_t compute_chunk_budget(std::size_t window, std::size_t instruction_tokens,
                                 std::size_t query_tokens, std::size_t cu_reserve,
                                 std::size_t generation_reserve) {
    const std::size_t reserved = instruction_tokens + query_tokens + cu_reserve + generation_reserve;
    if (window <= reserved) {
        throw BudgetExhausted("window of " + std::to_string(window) + " tokens leaves no room for content after " +
                              std::to_string(reserved) + " reserved tokens");
    }
    return window - reserved;
}

std::size_t compute_chunk_budget(std::size_t window, std::string_view worker_instruction,
                                 std::string_view query, std::size_t cu_reserve,
                                 std::size_t generation_reserve, const TokenCounter& counter) {
    return compute_chunk_budget(window, counter.count(worker_instruction), counter.count(query), cu_reserve,
                                generation_reserve);
}

std::string keep_head(std::string_view text, std::size_t budget, const TokenCounter& counter) {
    if (budget == 0) {
        return {};
    }
    const ChunkPlan plan = split_chunks(text, budget, counter);
    return std::string(rtrim(plan.chunks.front().text));
}

std::string keep_tail(std::string_view text, std::size_t budget, const TokenCounter& counter) {
    if (budget == 0) {
        return {};
    }
    if (counter.count(text) <= budget) {
        return std::string(ltrim(text));
    }
    const std::vector<std::size_t> starts = word_starts(text);
    if (counter.scheme() == TokenCounter::Scheme::word) {
        return std::string(text.substr(starts[starts.size() - budget]));
    }
    const std::size_t limit = budget * counter.block_size();
    for (std::size_t start : starts) {
        if (code_points(text.substr(start)) <= limit) {
            return std::string(text.substr(start));
        }
    }
    // Last word alone is too long: keep its final characters.
    const std::size_t total = code_points(text);
    return std::string(text.substr(advance_code_points(text, 0, total - limit)));
}

}  // namespace coa
