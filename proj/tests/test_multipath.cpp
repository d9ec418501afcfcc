#include <doctest.h>

#include <random>

#include "coa/errors.hpp"
#include "coa/multipath.hpp"
#include "coa/scripted_backend.hpp"
#include "coa/synth.hpp"
#include "support.hpp"

using namespace coa;
using coa::testing::FunctionBackend;

namespace {

Sample two_hop(std::uint64_t seed = 9) {
    NeedleSpec spec;
    spec.total_tokens = 500;
    spec.chunk_budget = 100;
    spec.hops = 2;
    spec.gold_chunk_positions = {1, 3};
    spec.seed = seed;
    return gen_needle_task(spec);
}

ChainSettings settings_for(const Sample& s, const PromptTemplates& t) {
    ChainSettings settings;
    settings.cu_reserve = 64;
    settings.generation_reserve = 32;
    settings.window = window_for_chunk_budget(s, 100, settings, t);
    return settings;
}

}  // namespace

TEST_SUITE("multipath") {
    TEST_CASE("vote examples") {
        CHECK(select_by_vote({"the Sun", "Sun!", "Mars"}) == "the Sun");
        CHECK(select_by_vote({"Mars", "Sun", "sun", "Mars."}) == "Mars");
        CHECK(select_by_vote({"x"}) == "x");
        CHECK_THROWS_AS(vote_index({}), Error);
    }

    TEST_CASE("oracle examples") {
        const auto [index, best] = select_oracle({"Mars", "the Sun", "Sun"}, {"Sun"}, MetricKind::f1);
        CHECK(index == 1);
        CHECK(best == doctest::Approx(1.0));
        CHECK(select_oracle({"a b", "c d"}, {"z"}, MetricKind::f1).first == 0);
        CHECK_THROWS_AS(select_oracle({"Sun"}, {}, MetricKind::f1), MissingReferences);
    }

    TEST_CASE("judge lists every candidate") {
        const PromptTemplates t = PromptTemplates::for_task(TaskKind::qa);
        ChainSettings settings;
        settings.window = 4000;
        std::string seen;
        FunctionBackend backend(coa::testing::descriptor_for(4000), [&](const GenerationRequest& r) {
            seen = r.prompt;
            return " Sun \n";
        });
        std::vector<TranscriptEntry> entries;
        const std::string answer = select_by_judge({{"unit one", 1}, {"", 2}, {"unit three", 3}}, std::string("Q?"), t,
                                                   backend, settings, &entries);
        CHECK(answer == "Sun");
        REQUIRE(entries.size() == 1);
        CHECK(entries[0].role == AgentRole::judge);
        CHECK(seen.find("unit one") != std::string::npos);
        CHECK(seen.find("(empty)") != std::string::npos);
        CHECK(seen.find("unit three") != std::string::npos);
        CHECK(seen.find("unit one") < seen.find("unit three"));
    }

    TEST_CASE("presets") {
        CHECK(PathSet::bidirection().paths.size() == 2);
        CHECK(PathSet::bidirection().paths[1].order == ReadingOrder::right_to_left());
        const PathSet sc = PathSet::preset("sc5", Selection::judge, 10);
        REQUIRE(sc.paths.size() == 5);
        CHECK(sc.selection == Selection::judge);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(sc.paths[i].temperature == kSelfConsistencyTemperature);
            CHECK(sc.paths[i].seed == 10 + i);
            CHECK(sc.paths[i].order == ReadingOrder::left_to_right());
        }
        const PathSet perm = PathSet::preset("perm5", Selection::vote, 10);
        REQUIRE(perm.paths.size() == 5);
        for (std::size_t i = 0; i < 5; ++i) CHECK(perm.paths[i].order == ReadingOrder::permutation(11 + i));
        CHECK_THROWS_AS(PathSet::preset("all"), ConfigError);
        CHECK_THROWS_AS(PathSet{}.validate(), ConfigError);
        CHECK(parse_selection("oracle") == Selection::oracle);
        CHECK_THROWS_AS(parse_selection("best"), ConfigError);
    }

    TEST_CASE("permutation orders are reproducible bijections") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto a = ReadingOrder::permutation(seed).indices(17);
            CHECK(a == ReadingOrder::permutation(seed).indices(17));
            auto sorted = a;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
        }
        CHECK(ReadingOrder::permutation(1).indices(17) != ReadingOrder::permutation(2).indices(17));
    }

    TEST_CASE("identical paths give the single-path answer") {
        const Sample s = two_hop();
        const PromptTemplates t = PromptTemplates::for_task(s.task);
        const ChainSettings settings = settings_for(s, t);
        ScriptedOracleBackend backend(coa::testing::descriptor_for(settings.window));
        const PipelineResult single = run_chain(s, settings, t, AgentBackends(backend));
        for (const Selection sel : {Selection::vote, Selection::judge, Selection::oracle}) {
            PathSet set;
            set.selection = sel;
            set.paths.assign(3, ReadingPath{});
            const PipelineResult multi = run_multipath(s, set, settings, t, AgentBackends(backend));
            CHECK(multi.final == single.final);
            CHECK(multi.final == s.references[0]);
            CHECK(multi.paths.size() == 3);
            CHECK(multi.pipeline == "multipath");
            CHECK(multi.selection == std::string(to_string(sel)));
            const std::size_t expected = 3 * single.transcript.size() + (sel == Selection::judge ? 1 : 0);
            CHECK(multi.transcript.size() == expected);
            if (sel == Selection::judge) CHECK(multi.transcript.back().path_index == 3);
        }
    }

    TEST_CASE("every reading order finds a two-hop answer") {
        const Sample s = two_hop(21);
        const PromptTemplates t = PromptTemplates::for_task(s.task);
        const ChainSettings settings = settings_for(s, t);
        ScriptedOracleBackend backend(coa::testing::descriptor_for(settings.window));
        for (const char* preset : {"bidirection", "perm5"}) {
            const PipelineResult r = run_multipath(s, PathSet::preset(preset), settings, t, AgentBackends(backend));
            CHECK(r.final == s.references[0]);
            for (const PathOutcome& p : r.paths) CHECK(p.final == s.references[0]);
        }
    }

    TEST_CASE("failed paths are recorded and skipped") {
        const Sample s = two_hop();
        const PromptTemplates t = PromptTemplates::for_task(s.task);
        ChainSettings settings = settings_for(s, t);
        ScriptedOracleBackend oracle(coa::testing::descriptor_for(settings.window));
        FunctionBackend flaky(coa::testing::descriptor_for(settings.window), [&](const GenerationRequest& r) {
            if (r.temperature > 0.0) throw BackendError("sampling unsupported");
            return scripted_response(r.prompt);
        });
        PathSet set;
        set.paths = {ReadingPath{}, ReadingPath{ReadingOrder::right_to_left(), 0.5, 3}};
        const PipelineResult r = run_multipath(s, set, settings, t, AgentBackends(flaky));
        CHECK(r.final == s.references[0]);
        REQUIRE(r.paths.size() == 2);
        CHECK_FALSE(r.paths[0].error.has_value());
        REQUIRE(r.paths[1].error.has_value());
        CHECK(r.paths[1].order == "r2l");
        for (const TranscriptEntry& e : r.transcript) CHECK(e.path_index == 0);

        PathSet broken;
        broken.paths = {ReadingPath{ReadingOrder::left_to_right(), 0.5, 1}, ReadingPath{ReadingOrder::right_to_left(), 0.5, 2}};
        CHECK_THROWS_AS(run_multipath(s, broken, settings, t, AgentBackends(flaky)), Error);
    }

    TEST_CASE("oracle selection needs references") {
        Sample s = two_hop();
        s.references.clear();
        const PromptTemplates t = PromptTemplates::for_task(s.task);
        const ChainSettings settings = settings_for(s, t);
        ScriptedOracleBackend backend(coa::testing::descriptor_for(settings.window));
        CHECK_THROWS_AS(run_multipath(s, PathSet::bidirection(Selection::oracle), settings, t, AgentBackends(backend)),
                        MissingReferences);
    }

    TEST_CASE("oracle dominates vote on random answer sets") {
        std::mt19937_64 rng(5);
        const std::vector<std::string> vocab = {"sun", "mars", "moon", "red planet", "the sun", "venus"};
        for (int round = 0; round < 100; ++round) {
            std::vector<std::string> answers(1 + rng() % 6);
            for (auto& a : answers) a = vocab[rng() % vocab.size()];
            const std::vector<std::string> refs = {vocab[rng() % vocab.size()]};
            const double oracle = select_oracle(answers, refs, MetricKind::f1).second;
            const double vote = f1_score(select_by_vote(answers), refs);
            double lowest = 1.0;
            for (const auto& a : answers) lowest = std::min(lowest, f1_score(a, refs));
            CHECK(oracle >= vote);
            CHECK(vote >= lowest);
        }
    }

    TEST_CASE("paths run in parallel with the same result") {
        const Sample s = two_hop(33);
        const PromptTemplates t = PromptTemplates::for_task(s.task);
        ChainSettings settings = settings_for(s, t);
        ScriptedOracleBackend backend(coa::testing::descriptor_for(settings.window));
        const PipelineResult a = run_multipath(s, PathSet::permutations(), settings, t, AgentBackends(backend));
        settings.parallelism = 5;
        const PipelineResult b = run_multipath(s, PathSet::permutations(), settings, t, AgentBackends(backend));
        CHECK(a.final == b.final);
        REQUIRE(a.transcript.size() == b.transcript.size());
        for (std::size_t i = 0; i < a.transcript.size(); ++i) CHECK(a.transcript[i].prompt == b.transcript[i].prompt);
    }
}
