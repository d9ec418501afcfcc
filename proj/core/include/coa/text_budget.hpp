#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace coa {

/// Approximates model tokens. The word scheme counts maximal runs of
/// non-whitespace; the character-block scheme counts ceil(code points / size).
class TokenCounter {
public:
    enum class Scheme { word, character_block };

    static TokenCounter words() { return TokenCounter{}; }
    static TokenCounter character_blocks(std::size_t block_size);

    Scheme scheme() const noexcept { return scheme_; }
    std::size_t block_size() const noexcept { return block_size_; }

    std::size_t count(std::string_view text) const;

    /// "word" or "chars:<size>".
    std::string name() const;
    static TokenCounter parse(std::string_view name);

    friend bool operator==(const TokenCounter&, const TokenCounter&) = default;

private:
    Scheme scheme_ = Scheme::word;
    std::size_t block_size_ = 1;
};

/// One chunk of a source text. `text` carries the separating whitespace that
/// follows it so that the chunks concatenate back to the source exactly.
struct Chunk {
    std::size_t offset = 0;
    std::string text;
    std::size_t tokens = 0;

    /// The chunk without leading/trailing whitespace; what prompts consume.
    std::string_view content() const;
};

struct ChunkPlan {
    std::vector<Chunk> chunks;
    std::size_t budget = 0;
    std::size_t source_len = 0;

    std::size_t chunk_count() const noexcept { return chunks.size(); }
    std::string join() const;
};

struct SplitOptions {
    /// Split a single over-long unit by characters instead of failing.
    bool hard_split_fallback = true;
};

/// Greedy left-to-right split: each chunk is the longest prefix of the
/// remaining text that fits `budget` and ends on a whitespace boundary.
/// Throws SingleUnitOverflow when one unbreakable unit exceeds the budget
/// and the fallback is disabled.
ChunkPlan split_chunks(std::string_view source, std::size_t budget,
                       const TokenCounter& counter, SplitOptions options = {});

/// Content tokens left in a window once the fixed prompt parts and the
/// reserves are paid for. Throws BudgetExhausted when nothing remains.
std::size_t compute_chunk_budget(std::size_t window, std::size_t instruction_tokens,
                                 std::size_t query_tokens, std::size_t cu_reserve,
                                 std::size_t generation_reserve);

std::size_t compute_chunk_budget(std::size_t window, std::string_view worker_instruction,
                                 std::string_view query, std::size_t cu_reserve,
                                 std::size_t generation_reserve, const TokenCounter& counter);

/// Longest prefix of `text` with at most `budget` tokens, cut at whitespace
/// (trailing whitespace dropped).
std::string keep_head(std::string_view text, std::size_t budget, const TokenCounter& counter);

/// Longest suffix of `text` with at most `budget` tokens, cut at whitespace
/// (leading whitespace dropped).
std::string keep_tail(std::string_view text, std::size_t budget, const TokenCounter& counter);

bool is_space(char c) noexcept;
std::string_view trim(std::string_view text) noexcept;

}  // namespace coa
