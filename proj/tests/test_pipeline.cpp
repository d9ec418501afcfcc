#include <doctest.h>

#include <algorithm>
#include <set>

#include "coa/baselines.hpp"
#include "coa/errors.hpp"
#include "coa/pipeline.hpp"
#include "coa/reading_order.hpp"
#include "coa/replay_cache.hpp"
#include "coa/scripted_backend.hpp"
#include "coa/serialization.hpp"
#include "coa/synth.hpp"
#include "support.hpp"

using namespace coa;

namespace {

const std::string kArrow = "\xE2\x86\x92";

struct Setup {
    Sample sample;
    ChainSettings settings;
    PromptTemplates templates;
};

Setup needle_setup(std::size_t total, std::size_t budget, std::vector<std::size_t> positions, std::uint64_t seed = 1) {
    NeedleSpec spec;
    spec.total_tokens = total;
    spec.chunk_budget = budget;
    spec.hops = positions.size();
    spec.gold_chunk_positions = std::move(positions);
    spec.seed = seed;
    Setup s{gen_needle_task(spec), {}, {}};
    s.templates = PromptTemplates::for_task(s.sample.task);
    s.settings.cu_reserve = 64;
    s.settings.generation_reserve = 64;
    s.settings.window = window_for_chunk_budget(s.sample, budget, s.settings, s.templates);
    return s;
}

ScriptedOracleBackend scripted(const ChainSettings& settings) {
    return ScriptedOracleBackend(coa::testing::descriptor_for(settings.window, settings.counter));
}

}  // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("chunk plan matches the requested budget") {
        const Setup s = needle_setup(300, 100, {0, 2});
        const ChunkPlan plan = plan_chunks(s.sample, s.settings, s.templates);
        CHECK(plan.budget == 100);
        CHECK(plan.chunk_count() == 3);
        CHECK(plan.join() == s.sample.source);
    }

    TEST_CASE("two-hop chain across chunks 1 and 3 of 3") {
        const Setup s = needle_setup(300, 100, {0, 2});
        auto backend = scripted(s.settings);
        const PipelineResult r = run_chain(s.sample, s.settings, s.templates, AgentBackends(backend));
        CHECK(r.final == s.sample.references.front());
        CHECK(r.pipeline == "coa");
        CHECK(r.transcript.size() == r.chunk_plan.chunk_count() + 1);
        CHECK(r.transcript.back().role == AgentRole::manager);

        const PipelineResult merged = run_merge(s.sample, s.settings, s.templates, AgentBackends(backend));
        CHECK(merged.final != s.sample.references.front());
    }

    TEST_CASE("hop order does not matter to the chain") {
        const Setup s = needle_setup(300, 100, {2, 0});
        auto backend = scripted(s.settings);
        CHECK(run_chain(s.sample, s.settings, s.templates, AgentBackends(backend)).final == s.sample.references.front());
    }

    TEST_CASE("degenerate single-chunk chain") {
        const Setup s = needle_setup(80, 100, {0});
        auto backend = scripted(s.settings);
        const PipelineResult r = run_chain(s.sample, s.settings, s.templates, AgentBackends(backend));
        CHECK(r.chunk_plan.chunk_count() == 1);
        REQUIRE(r.transcript.size() == 2);
        CHECK(r.transcript[0].role == AgentRole::worker);
        CHECK(r.transcript[0].agent_index == 1);
        CHECK(r.transcript[1].role == AgentRole::manager);
        CHECK(r.final == s.sample.references.front());
    }

    TEST_CASE("sequentiality, receptive field and window safety") {
        const Setup s = needle_setup(500, 100, {1, 3});
        auto backend = scripted(s.settings);
        const PipelineResult r = run_chain(s.sample, s.settings, s.templates, AgentBackends(backend));
        const std::size_t l = r.chunk_plan.chunk_count();
        std::set<std::size_t> seen;
        for (std::size_t i = 0; i < l; ++i) {
            const TranscriptEntry& e = r.transcript[i];
            CHECK(e.role == AgentRole::worker);
            CHECK(e.agent_index == i + 1);
            REQUIRE(e.chunk_index);
            seen.insert(*e.chunk_index);
            CHECK(e.prompt.find(r.chunk_plan.chunks[*e.chunk_index].content()) != std::string::npos);
            if (i > 0) CHECK(e.prompt.find(r.transcript[i - 1].generation) != std::string::npos);
        }
        CHECK(seen.size() == l);
        for (const TranscriptEntry& e : r.transcript) {
            CHECK(e.prompt_tokens <= s.settings.window);
            CHECK(e.prompt_tokens == s.settings.counter.count(e.prompt));
        }
    }

    TEST_CASE("chain is deterministic") {
        const Setup s = needle_setup(400, 100, {3, 0});
        auto backend = scripted(s.settings);
        const std::string a = to_json(run_chain(s.sample, s.settings, s.templates, AgentBackends(backend)));
        const std::string b = to_json(run_chain(s.sample, s.settings, s.templates, AgentBackends(backend)));
        CHECK(a == b);
    }

    TEST_CASE("without a manager the last unit is the answer") {
        Setup s = needle_setup(400, 100, {0});
        s.settings.use_manager = false;
        auto backend = scripted(s.settings);
        CommunicationUnit last;
        const PipelineResult r = run_chain(s.sample, s.settings, s.templates, AgentBackends(backend), {}, &last);
        CHECK(r.pipeline == "coa_no_manager");
        CHECK(r.transcript.size() == r.chunk_plan.chunk_count());
        CHECK(r.final == last.text);
        CHECK(last.producer_index == r.chunk_plan.chunk_count());
        CHECK(r.final.find(kArrow) != std::string::npos);
    }

    TEST_CASE("right-to-left reads the last chunk first") {
        const Setup s = needle_setup(300, 100, {0, 2});
        auto backend = scripted(s.settings);
        const PipelineResult r =
            run_chain(s.sample, s.settings, s.templates, AgentBackends(backend), ReadingOrder::right_to_left());
        CHECK(*r.transcript[0].chunk_index == 2);
        CHECK(*r.transcript[2].chunk_index == 0);
        CHECK(r.final == s.sample.references.front());
    }

    TEST_CASE("worker examples") {
        const PromptTemplates t = PromptTemplates::for_task(TaskKind::qa);
        ChainSettings settings;
        settings.window = 400;
        settings.cu_reserve = 50;
        settings.generation_reserve = 50;
        auto backend = scripted(settings);
        const std::optional<std::string> q = "What is the key of the key of A?";
        std::vector<TranscriptEntry> transcript;
        const CommunicationUnit u1 = run_worker("The key of A is B.", CommunicationUnit{}, q, t, backend, settings, &transcript);
        CHECK(u1.producer_index == 1);
        CHECK(u1.text.find("A" + kArrow + "B") != std::string::npos);
        const CommunicationUnit u2 = run_worker("The key of B is C.", u1, q, t, backend, settings, &transcript);
        CHECK(u2.producer_index == 2);
        CHECK(u2.text.find("A" + kArrow + "B") != std::string::npos);
        CHECK(u2.text.find("B" + kArrow + "C") != std::string::npos);
        const CommunicationUnit u3 = run_worker("nothing useful here", u1, q, t, backend, settings, &transcript);
        CHECK(u3.text.find("A" + kArrow + "B") != std::string::npos);
        CHECK(transcript.size() == 3);
        CHECK(run_manager(CommunicationUnit{"A" + kArrow + "B, B" + kArrow + "C", 2}, q, t, backend, settings) == "C");
    }

    TEST_CASE("units are cut to the reserve keeping the head") {
        const PromptTemplates t = PromptTemplates::for_task(TaskKind::qa);
        ChainSettings settings;
        settings.window = 200;
        settings.cu_reserve = 3;
        settings.generation_reserve = 10;
        coa::testing::FunctionBackend backend(coa::testing::descriptor_for(200),
                                              [](const GenerationRequest&) { return "w1 w2 w3 w4 w5"; });
        std::vector<TranscriptEntry> transcript;
        const CommunicationUnit u = run_worker("chunk", CommunicationUnit{}, std::nullopt, t, backend, settings, &transcript);
        CHECK(u.text == "w1 w2 w3");
        CHECK(transcript[0].generation == "w1 w2 w3 w4 w5");
    }

    TEST_CASE("backend failures carry the agent index") {
        const Setup s = needle_setup(300, 100, {0});
        coa::testing::SequenceBackend backend(coa::testing::descriptor_for(s.settings.window), {"u1", "u2"});
        try {
            run_chain(s.sample, s.settings, s.templates, AgentBackends(backend));
            FAIL("expected AgentFailure");
        } catch (const AgentFailure& e) {
            CHECK(e.role() == "worker");
            CHECK(e.agent_index() == 3);
            CHECK(e.cause() == AgentFailure::Cause::backend);
        }
    }

    TEST_CASE("oversized manager prompt is a template overflow") {
        Setup s = needle_setup(500, 100, {0});
        s.settings.manager_sees_all_units = true;
        coa::testing::FunctionBackend backend(coa::testing::descriptor_for(s.settings.window), [&](const GenerationRequest&) {
            std::string out;
            for (std::size_t i = 0; i < s.settings.cu_reserve; ++i) out += "word ";
            return out;
        });
        try {
            run_chain(s.sample, s.settings, s.templates, AgentBackends(backend));
            FAIL("expected AgentFailure");
        } catch (const AgentFailure& e) {
            CHECK(e.role() == "manager");
            CHECK(e.cause() == AgentFailure::Cause::template_overflow);
        }
    }

    TEST_CASE("manager may use its own backend") {
        const Setup s = needle_setup(200, 100, {0});
        auto worker = scripted(s.settings);
        coa::testing::SequenceBackend manager(coa::testing::descriptor_for(s.settings.window), {"  from manager \n"});
        const PipelineResult r = run_chain(s.sample, s.settings, s.templates, AgentBackends(worker, manager));
        CHECK(r.final == "from manager");
        CHECK(manager.prompts().size() == 1);
    }

    TEST_CASE("digest reflects configuration") {
        const Setup s = needle_setup(200, 100, {0});
        auto backend = scripted(s.settings);
        const std::string base = run_chain(s.sample, s.settings, s.templates, AgentBackends(backend)).config_digest;
        ChainSettings other = s.settings;
        other.temperature = 0.5;
        CHECK(run_chain(s.sample, other, s.templates, AgentBackends(backend)).config_digest != base);
        CHECK(run_chain(s.sample, s.settings, s.templates, AgentBackends(backend), ReadingOrder::right_to_left())
                  .config_digest != base);
        CHECK(base.size() == 64);
    }

    TEST_CASE("replay closure") {
        coa::testing::TempDir dir;
        const Setup s = needle_setup(400, 100, {0, 3});
        BackendDescriptor rec = coa::testing::descriptor_for(s.settings.window);
        rec.cache_dir = (dir.path() / "cache").string();
        auto recording = make_backend(rec);
        const std::string recorded = to_json(run_chain(s.sample, s.settings, s.templates, AgentBackends(*recording)));
        BackendDescriptor rep = rec;
        rep.kind = BackendKind::replay;
        auto replaying = make_backend(rep);
        const std::string replayed = to_json(run_chain(s.sample, s.settings, s.templates, AgentBackends(*replaying)));
        CHECK(recorded == replayed);
        const PipelineResult parsed = pipeline_result_from_json(recorded);
        CHECK(to_json(parsed) == recorded);
    }

    TEST_CASE("reading orders") {
        CHECK(ReadingOrder::left_to_right().indices(4) == std::vector<std::size_t>{0, 1, 2, 3});
        CHECK(ReadingOrder::right_to_left().indices(4) == std::vector<std::size_t>{3, 2, 1, 0});
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto p = ReadingOrder::permutation(seed).indices(9);
            auto sorted = p;
            std::sort(sorted.begin(), sorted.end());
            REQUIRE(sorted == ReadingOrder::left_to_right().indices(9));
            REQUIRE(p == ReadingOrder::permutation(seed).indices(9));
        }
        CHECK(ReadingOrder::permutation(1).indices(9) != ReadingOrder::permutation(2).indices(9));
        CHECK(ReadingOrder::permutation(3).indices(0).empty());
        CHECK(ReadingOrder::parse("perm:17") == ReadingOrder::permutation(17));
        CHECK(ReadingOrder::parse(ReadingOrder::right_to_left().name()) == ReadingOrder::right_to_left());
        CHECK(ReadingOrder::permutation(17).name() == "perm:17");
        CHECK_THROWS_AS(ReadingOrder::parse("sideways"), ConfigError);
    }
}
