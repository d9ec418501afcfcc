#include <benchmark/benchmark.h>

#include "coa/cost_model.hpp"
#include "coa/metrics.hpp"
#include "coa/pipeline.hpp"
#include "coa/scripted_backend.hpp"
#include "coa/synth.hpp"

namespace {

void BM_SplitWords(benchmark::State& state) {
    coa::NeedleSpec spec;
    spec.total_tokens = static_cast<std::size_t>(state.range(0));
    spec.chunk_budget = 500;
    const coa::Sample sample = coa::gen_needle_task(spec);
    for (auto _ : state) {
        benchmark::DoNotOptimize(coa::split_chunks(sample.source, 500, coa::TokenCounter::words()));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SplitWords)->Arg(10000)->Arg(100000);

void BM_SplitCharBlocks(benchmark::State& state) {
    coa::NeedleSpec spec;
    spec.total_tokens = static_cast<std::size_t>(state.range(0));
    spec.chunk_budget = 500;
    const coa::Sample sample = coa::gen_needle_task(spec);
    const auto counter = coa::TokenCounter::character_blocks(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(coa::split_chunks(sample.source, 500, counter));
    }
}
BENCHMARK(BM_SplitCharBlocks)->Arg(10000)->Arg(100000);

void BM_RougeGeoMean(benchmark::State& state) {
    coa::NeedleSpec spec;
    spec.total_tokens = static_cast<std::size_t>(state.range(0));
    spec.chunk_budget = spec.total_tokens;
    spec.seed = 1;
    const std::string a = coa::gen_needle_task(spec).source;
    spec.seed = 2;
    const std::string b = coa::gen_needle_task(spec).source;
    for (auto _ : state) {
        benchmark::DoNotOptimize(coa::rouge_geo_mean(a, b));
    }
}
BENCHMARK(BM_RougeGeoMean)->Arg(100)->Arg(1000);

void BM_SimulateOps(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(coa::simulate_ops(n, 8000, 256));
    }
}
BENCHMARK(BM_SimulateOps)->Arg(100000)->Arg(1000000);

void BM_ScriptedChain(benchmark::State& state) {
    coa::NeedleSpec spec;
    spec.total_tokens = static_cast<std::size_t>(state.range(0));
    spec.chunk_budget = 500;
    spec.hops = 2;
    spec.gold_chunk_positions = {0, coa::synthetic_chunk_count(spec.total_tokens, 500) - 1};
    const coa::Sample sample = coa::gen_needle_task(spec);
    const auto templates = coa::PromptTemplates::for_task(sample.task);
    coa::ChainSettings settings;
    settings.cu_reserve = 64;
    settings.generation_reserve = 32;
    settings.window = coa::window_for_chunk_budget(sample, 500, settings, templates);
    coa::BackendDescriptor descriptor;
    descriptor.window = settings.window;
    coa::ScriptedOracleBackend backend(descriptor);
    for (auto _ : state) {
        benchmark::DoNotOptimize(coa::run_chain(sample, settings, templates, coa::AgentBackends(backend)));
    }
}
BENCHMARK(BM_ScriptedChain)->Arg(10000)->Arg(50000);

}  // namespace

BENCHMARK_MAIN();
