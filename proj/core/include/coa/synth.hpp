#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coa/types.hpp"

namespace coa {

/// A chain of `hops` key facts e0→e1→…→e_hops hidden in seeded filler.
/// Fact j is placed inside chunk gold_chunk_positions[j] (0-based) of the
/// word-greedy split with `chunk_budget` words per chunk.
struct NeedleSpec {
    std::size_t total_tokens = 2000;
    std::size_t chunk_budget = 200;
    std::size_t hops = 1;
    std::vector<std::size_t> gold_chunk_positions{0};
    std::uint64_t seed = 0;
    std::string id_prefix = "needle";
};

/// Words of one fact sentence ("The key of X is Y.").
inline constexpr std::size_t kFactWords = 6;

/// Chunks a source of `total_tokens` words splits into at `chunk_budget`.
std::size_t synthetic_chunk_count(std::size_t total_tokens, std::size_t chunk_budget);

/// Throws SpecInfeasible when a position is out of range or a chunk cannot hold its facts.
Sample gen_needle_task(const NeedleSpec& spec);

/// One single-hop sample per chunk position, identical except for the needle.
Sample gen_position_sample(std::size_t total_tokens, std::size_t chunk_budget, std::size_t position, std::uint64_t seed);
std::vector<Sample> gen_position_sweep(std::size_t total_tokens, std::size_t chunk_budget, std::uint64_t seed);

/// `count` tasks of `hops` hops, each hop in a distinct chunk chosen at random
/// (any order), seeds seed, seed+1, ...
std::vector<Sample> gen_multihop_set(std::size_t count, std::size_t total_tokens, std::size_t chunk_budget,
                                     std::size_t hops, std::uint64_t seed);

}  // namespace coa
