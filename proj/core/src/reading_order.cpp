#include "coa/reading_order.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <random>

#include "coa/errors.hpp"

namespace coa {

namespace {

// Unbiased draw in [0, bound) by rejection; portable unlike uniform_int_distribution.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = 0;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

}  // namespace

std::vector<std::size_t> ReadingOrder::indices(std::size_t chunk_count) const {
    std::vector<std::size_t> order(chunk_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    switch (kind) {
        case OrderKind::left_to_right:
            break;
        case OrderKind::right_to_left:
            std::reverse(order.begin(), order.end());
            break;
        case OrderKind::permutation: {
            std::mt19937_64 rng(seed);
            for (std::size_t i = chunk_count; i > 1; --i) {
                const auto j = static_cast<std::size_t>(bounded(rng, i));
                std::swap(order[i - 1], order[j]);
            }
            break;
        }
    }
    return order;
}

std::string ReadingOrder::name() const {
    switch (kind) {
        case OrderKind::left_to_right: return "l2r";
        case OrderKind::right_to_left: return "r2l";
        case OrderKind::permutation: return "perm:" + std::to_string(seed);
    }
    return "l2r";
}

ReadingOrder ReadingOrder::parse(std::string_view name) {
    if (name == "l2r" || name == "left_to_right") return left_to_right();
    if (name == "r2l" || name == "right_to_left") return right_to_left();
    for (std::string_view prefix : {std::string_view("perm:"), std::string_view("permutation:")}) {
        if (name.starts_with(prefix)) {
            const std::string_view digits = name.substr(prefix.size());
            std::uint64_t seed = 0;
            const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
            if (ec == std::errc{} && ptr == digits.data() + digits.size()) {
                return permutation(seed);
            }
        }
    }
    throw ConfigError("unknown reading order '" + std::string(name) + "' (expected l2r, r2l or perm:<seed>)");
}

}  // namespace coa
