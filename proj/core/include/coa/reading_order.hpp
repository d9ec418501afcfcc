#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace coa {

enum class OrderKind { left_to_right, right_to_left, permutation };

/// Sequence in which chunks are handed to the worker chain.
struct ReadingOrder {
    OrderKind kind = OrderKind::left_to_right;
    std::uint64_t seed = 0;

    static ReadingOrder left_to_right() { return {}; }
    static ReadingOrder right_to_left() { return {OrderKind::right_to_left, 0}; }
    static ReadingOrder permutation(std::uint64_t seed) { return {OrderKind::permutation, seed}; }

    /// A bijection on [0, chunk_count); fixed for a fixed seed on every platform.
    std::vector<std::size_t> indices(std::size_t chunk_count) const;

    /// "l2r", "r2l" or "perm:<seed>".
    std::string name() const;
    static ReadingOrder parse(std::string_view name);

    friend bool operator==(const ReadingOrder&, const ReadingOrder&) = default;
};

}  // namespace coa
