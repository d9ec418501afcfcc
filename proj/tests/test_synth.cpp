#include <doctest.h>

#include <algorithm>
#include <regex>
#include <set>

#include "coa/errors.hpp"
#include "coa/serialization.hpp"
#include "coa/synth.hpp"

using namespace coa;

namespace {

struct FoundFact {
    std::string subject;
    std::string object;
    std::size_t chunk = 0;
};

/// Independent scan: every "The key of X is Y." with the chunk it sits in.
std::vector<FoundFact> scan_facts(const Sample& s, std::size_t budget) {
    const ChunkPlan plan = split_chunks(s.source, budget, TokenCounter::words());
    const std::regex fact(R"(The key of (\S+) is (\S+)\.)");
    std::vector<FoundFact> found;
    for (std::size_t c = 0; c < plan.chunks.size(); ++c) {
        const std::string& text = plan.chunks[c].text;
        for (auto it = std::sregex_iterator(text.begin(), text.end(), fact); it != std::sregex_iterator(); ++it) {
            found.push_back({(*it)[1].str(), (*it)[2].str(), c});
        }
    }
    return found;
}

}  // namespace

TEST_SUITE("synth") {
    TEST_CASE("needle tasks are deterministic") {
        NeedleSpec spec;
        spec.total_tokens = 800;
        spec.chunk_budget = 100;
        spec.hops = 3;
        spec.gold_chunk_positions = {6, 1, 3};
        spec.seed = 12;
        const Sample a = gen_needle_task(spec);
        const Sample b = gen_needle_task(spec);
        CHECK(a.source == b.source);
        CHECK(a.id == b.id);
        CHECK(a.query == b.query);
        CHECK(a.references == b.references);
        spec.seed = 13;
        CHECK(gen_needle_task(spec).source != a.source);
    }

    TEST_CASE("facts sit in the requested chunks") {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            NeedleSpec spec;
            spec.total_tokens = 1000 + seed * 7;
            spec.chunk_budget = 120;
            spec.hops = 1 + seed % 4;
            spec.gold_chunk_positions.clear();
            for (std::size_t h = 0; h < spec.hops; ++h) spec.gold_chunk_positions.push_back((seed + 3 * h) % 8);
            std::sort(spec.gold_chunk_positions.begin(), spec.gold_chunk_positions.end());
            spec.gold_chunk_positions.erase(std::unique(spec.gold_chunk_positions.begin(), spec.gold_chunk_positions.end()),
                                            spec.gold_chunk_positions.end());
            spec.hops = spec.gold_chunk_positions.size();
            spec.seed = seed;
            const Sample s = gen_needle_task(spec);
            CHECK(TokenCounter::words().count(s.source) == spec.total_tokens);
            CHECK(split_chunks(s.source, spec.chunk_budget, TokenCounter::words()).chunk_count() ==
                  synthetic_chunk_count(spec.total_tokens, spec.chunk_budget));
            const auto facts = scan_facts(s, spec.chunk_budget);
            REQUIRE(facts.size() == spec.hops);
            // Follow the chain from the question entity.
            const std::regex question(R"(What is (?:the key of )+(\S+)\?)");
            std::smatch m;
            REQUIRE(s.query.has_value());
            REQUIRE(std::regex_match(*s.query, m, question));
            std::string entity = m[1].str();
            for (std::size_t h = 0; h < spec.hops; ++h) {
                const auto it = std::find_if(facts.begin(), facts.end(), [&](const FoundFact& f) { return f.subject == entity; });
                REQUIRE(it != facts.end());
                CHECK(it->chunk == spec.gold_chunk_positions[h]);
                entity = it->object;
            }
            CHECK(entity == s.references.at(0));
        }
    }

    TEST_CASE("hops may appear in any chunk order") {
        NeedleSpec spec;
        spec.total_tokens = 600;
        spec.chunk_budget = 100;
        spec.hops = 2;
        spec.gold_chunk_positions = {4, 0};
        const Sample s = gen_needle_task(spec);
        const auto facts = scan_facts(s, 100);
        REQUIRE(facts.size() == 2);
        CHECK(facts[0].chunk == 0);
        CHECK(facts[1].chunk == 4);
        CHECK(facts[1].object == facts[0].subject);
    }

    TEST_CASE("infeasible specs") {
        NeedleSpec spec;
        spec.total_tokens = 300;
        spec.chunk_budget = 100;
        spec.gold_chunk_positions = {3};
        CHECK_THROWS_AS(gen_needle_task(spec), SpecInfeasible);
        spec.gold_chunk_positions = {0, 1};
        CHECK_THROWS_AS(gen_needle_task(spec), SpecInfeasible);
        spec.hops = 0;
        spec.gold_chunk_positions = {};
        CHECK_THROWS_AS(gen_needle_task(spec), SpecInfeasible);
        spec.hops = 2;
        spec.chunk_budget = 5;
        spec.gold_chunk_positions = {0, 1};
        CHECK_THROWS_AS(gen_needle_task(spec), SpecInfeasible);
        CHECK_THROWS_AS(gen_position_sweep(100, 100, 0), SpecInfeasible);
        CHECK_THROWS_AS(gen_multihop_set(3, 200, 100, 3, 0), SpecInfeasible);
    }

    TEST_CASE("position sweep gives one sample per chunk") {
        const auto sweep = gen_position_sweep(1000, 100, 7);
        REQUIRE(sweep.size() == 10);
        for (std::size_t p = 0; p < sweep.size(); ++p) {
            const auto facts = scan_facts(sweep[p], 100);
            REQUIRE(facts.size() == 1);
            CHECK(facts[0].chunk == p);
            CHECK(sweep[p].query == sweep[0].query);
            CHECK(sweep[p].references == sweep[0].references);
        }
        CHECK(synthetic_chunk_count(1000, 100) == 10);
        CHECK(synthetic_chunk_count(1001, 100) == 11);
    }

    TEST_CASE("multihop sets use distinct chunks and distinct ids") {
        const auto set = gen_multihop_set(25, 900, 100, 3, 40);
        REQUIRE(set.size() == 25);
        std::set<std::string> ids;
        for (const Sample& s : set) {
            ids.insert(s.id);
            const auto facts = scan_facts(s, 100);
            REQUIRE(facts.size() == 3);
            std::set<std::size_t> chunks;
            for (const auto& f : facts) chunks.insert(f.chunk);
            CHECK(chunks.size() == 3);
        }
        CHECK(ids.size() == 25);
    }

    TEST_CASE("jsonl round trip") {
        for (const Sample& s : gen_multihop_set(5, 400, 100, 2, 1)) {
            const Sample back = sample_from_jsonl_row(to_jsonl_row(s), 1);
            CHECK(back.id == s.id);
            CHECK(back.source == s.source);
            CHECK(back.query == s.query);
            CHECK(back.references == s.references);
            CHECK(back.task == s.task);
            CHECK(to_jsonl_row(back) == to_jsonl_row(s));
        }
    }
}
