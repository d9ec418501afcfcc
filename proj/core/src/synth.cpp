#include "coa/synth.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <random>
#include <set>

#include "coa/errors.hpp"

namespace coa {

namespace {

// Filler vocabulary. Must never contain the fact or question words.
constexpr std::array<std::string_view, 64> kLorem = {
    "lorem",   "ipsum",    "dolor",     "sit",      "amet",     "consectetur", "adipiscing", "elit",
    "sed",     "do",       "eiusmod",   "tempor",   "incididunt", "ut",        "labore",     "et",
    "dolore",  "magna",    "aliqua",    "enim",     "ad",       "minim",       "veniam",     "quis",
    "nostrud", "exercitation", "ullamco", "laboris", "nisi",    "aliquip",     "ex",         "ea",
    "commodo", "consequat", "duis",     "aute",     "irure",    "in",          "reprehenderit", "voluptate",
    "velit",   "esse",     "cillum",    "fugiat",   "nulla",    "pariatur",    "excepteur",  "sint",
    "occaecat", "cupidatat", "non",     "proident", "sunt",     "culpa",       "qui",        "officia",
    "deserunt", "mollit",  "anim",      "id",       "est",      "laborum",     "vitae",      "porta",
};

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t value = 0;
    do {
        value = rng();
    } while (value >= limit);
    return value % bound;
}

std::string make_entity(std::mt19937_64& rng) {
    std::string name;
    for (int syllable = 0; syllable < 3; ++syllable) {
        name.push_back(kConsonants[draw(rng, kConsonants.size())]);
        name.push_back(kVowels[draw(rng, kVowels.size())]);
    }
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    return name;
}

std::vector<std::string> make_entities(std::mt19937_64& rng, std::size_t count) {
    std::set<std::string> seen;
    std::vector<std::string> entities;
    while (entities.size() < count) {
        std::string name = make_entity(rng);
        std::string lower = name;
        lower[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(lower[0])));
        const bool clashes = std::find(kLorem.begin(), kLorem.end(), lower) != kLorem.end();
        if (!clashes && seen.insert(name).second) entities.push_back(std::move(name));
    }
    return entities;
}

std::vector<std::string> make_filler(std::mt19937_64& rng, std::size_t words) {
    std::vector<std::string> out;
    out.reserve(words);
    std::size_t sentence_left = 0;
    for (std::size_t i = 0; i < words; ++i) {
        std::string word(kLorem[draw(rng, kLorem.size())]);
        if (sentence_left == 0) {
            sentence_left = 6 + draw(rng, 9);
            word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
        }
        if (--sentence_left == 0) word.push_back('.');
        out.push_back(std::move(word));
    }
    if (!out.empty() && !out.back().ends_with('.')) out.back().push_back('.');
    return out;
}

std::string key_question(const std::string& start, std::size_t hops) {
    std::string q = "What is";
    for (std::size_t h = 0; h < hops; ++h) q += " the key of";
    return q + " " + start + "?";
}

}  // namespace

std::size_t synthetic_chunk_count(std::size_t total_tokens, std::size_t chunk_budget) {
    if (chunk_budget == 0) throw SpecInfeasible("chunk budget must be positive");
    return std::max<std::size_t>(1, (total_tokens + chunk_budget - 1) / chunk_budget);
}

Sample gen_needle_task(const NeedleSpec& spec) {
    if (spec.hops == 0) throw SpecInfeasible("a needle task needs at least one hop");
    if (spec.gold_chunk_positions.size() != spec.hops) {
        throw SpecInfeasible("expected " + std::to_string(spec.hops) + " gold positions, got " +
                             std::to_string(spec.gold_chunk_positions.size()));
    }
    const std::size_t chunks = synthetic_chunk_count(spec.total_tokens, spec.chunk_budget);
    std::vector<std::size_t> per_chunk(chunks, 0);
    for (std::size_t position : spec.gold_chunk_positions) {
        if (position >= chunks) {
            throw SpecInfeasible("gold position " + std::to_string(position) + " exceeds the " + std::to_string(chunks) +
                                 " chunks implied by n=" + std::to_string(spec.total_tokens) +
                                 " and budget=" + std::to_string(spec.chunk_budget));
        }
        ++per_chunk[position];
    }
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t length = std::min(spec.chunk_budget, spec.total_tokens - c * spec.chunk_budget);
        if (per_chunk[c] * kFactWords > length) {
            throw SpecInfeasible("chunk " + std::to_string(c) + " of " + std::to_string(length) + " words cannot hold " +
                                 std::to_string(per_chunk[c]) + " facts");
        }
    }

    std::mt19937_64 rng(spec.seed);
    const std::vector<std::string> entities = make_entities(rng, spec.hops + 1);
    std::vector<std::string> words = make_filler(rng, spec.total_tokens);

    // Placement draws come last so that varying the positions keeps filler and entities fixed.
    for (std::size_t c = 0; c < chunks; ++c) {
        if (per_chunk[c] == 0) continue;
        const std::size_t lo = c * spec.chunk_budget;
        const std::size_t length = std::min(spec.chunk_budget, spec.total_tokens - lo);
        const std::size_t span = per_chunk[c] * kFactWords;
        std::size_t at = lo + static_cast<std::size_t>(draw(rng, length - span + 1));
        for (std::size_t hop = 0; hop < spec.hops; ++hop) {
            if (spec.gold_chunk_positions[hop] != c) continue;
            if (at > 0 && !words[at - 1].ends_with('.')) words[at - 1].push_back('.');
            const std::array<std::string, kFactWords> fact = {"The", "key", "of", entities[hop], "is",
                                                             entities[hop + 1] + "."};
            std::copy(fact.begin(), fact.end(), words.begin() + static_cast<std::ptrdiff_t>(at));
            at += kFactWords;
            if (at < words.size()) {
                words[at][0] = static_cast<char>(std::toupper(static_cast<unsigned char>(words[at][0])));
            }
        }
    }

    Sample sample;
    sample.id = spec.id_prefix + "-s" + std::to_string(spec.seed) + "-h" + std::to_string(spec.hops) + "-p";
    for (std::size_t i = 0; i < spec.gold_chunk_positions.size(); ++i) {
        sample.id += (i == 0 ? "" : ".") + std::to_string(spec.gold_chunk_positions[i]);
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0) sample.source.push_back(' ');
        sample.source += words[i];
    }
    sample.query = key_question(entities.front(), spec.hops);
    sample.references = {entities.back()};
    sample.task = TaskKind::qa;
    sample.reference_len = 1;
    return sample;
}

Sample gen_position_sample(std::size_t total_tokens, std::size_t chunk_budget, std::size_t position, std::uint64_t seed) {
    NeedleSpec spec;
    spec.total_tokens = total_tokens;
    spec.chunk_budget = chunk_budget;
    spec.hops = 1;
    spec.gold_chunk_positions = {position};
    spec.seed = seed;
    spec.id_prefix = "sweep";
    return gen_needle_task(spec);
}

std::vector<Sample> gen_position_sweep(std::size_t total_tokens, std::size_t chunk_budget, std::uint64_t seed) {
    const std::size_t chunks = synthetic_chunk_count(total_tokens, chunk_budget);
    if (chunks < 2) throw SpecInfeasible("a position sweep needs at least two chunks");
    std::vector<Sample> samples;
    samples.reserve(chunks);
    for (std::size_t position = 0; position < chunks; ++position) {
        samples.push_back(gen_position_sample(total_tokens, chunk_budget, position, seed));
    }
    return samples;
}

std::vector<Sample> gen_multihop_set(std::size_t count, std::size_t total_tokens, std::size_t chunk_budget,
                                     std::size_t hops, std::uint64_t seed) {
    const std::size_t chunks = synthetic_chunk_count(total_tokens, chunk_budget);
    if (hops > chunks) throw SpecInfeasible("more hops than chunks");
    std::vector<Sample> samples;
    samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(seed + i + 0x9E3779B97F4A7C15ULL);
        std::vector<std::size_t> pool(chunks);
        for (std::size_t c = 0; c < chunks; ++c) pool[c] = c;
        for (std::size_t c = chunks; c > 1; --c) std::swap(pool[c - 1], pool[draw(rng, c)]);
        NeedleSpec spec;
        spec.total_tokens = total_tokens;
        spec.chunk_budget = chunk_budget;
        spec.hops = hops;
        spec.gold_chunk_positions.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(hops));
        spec.seed = seed + i;
        spec.id_prefix = "multihop";
        samples.push_back(gen_needle_task(spec));
    }
    return samples;
}

}  // namespace coa
