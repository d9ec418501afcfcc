#include <doctest.h>

#include "coa/baselines.hpp"
#include "coa/cost_model.hpp"
#include "coa/errors.hpp"
#include "support.hpp"

using namespace coa;

namespace {

/// Counts attended positions one token at a time.
OpCounts count_by_hand(std::uint64_t n, std::uint64_t k, std::uint64_t r, bool pad_last_chunk) {
    OpCounts ops;
    for (std::uint64_t t = 1; t <= n; ++t) ops.enc_full += t;
    for (std::uint64_t j = 1; j <= r; ++j) ops.dec_full += n + j;
    for (std::uint64_t start = 0; start < n; start += k) {
        const std::uint64_t len = pad_last_chunk ? k : std::min(k, n - start);
        for (std::uint64_t t = 1; t <= len; ++t) ops.enc_coa += t;
        for (std::uint64_t j = 1; j <= r; ++j) ops.dec_coa += len + j;
    }
    return ops;
}

}  // namespace

TEST_SUITE("cost_model") {
    TEST_CASE("spot values") {
        const CostReport report = closed_form_costs(16, 4, 0);
        CHECK(report.closed_form.enc_full == 136);
        CHECK(report.closed_form.enc_coa == 40);
        CHECK(report.closed_form.dec_full == 0);
        CHECK(report.closed_form.dec_coa == 0);
        CHECK(report.encode_ratio() == doctest::Approx(3.4));
        const CostReport decoded = closed_form_costs(16, 4, 2);
        CHECK(decoded.closed_form.dec_full == 35);
        CHECK(decoded.closed_form.dec_coa == 44);
        CHECK(encode_ops(0) == 0);
        CHECK(decode_ops(5, 0) == 0);
        CHECK_THROWS_AS(closed_form_costs(0, 4, 0), ConfigError);
        CHECK_THROWS_AS(simulate_ops(4, 0, 0), ConfigError);
    }

    TEST_CASE("closed form matches the simulation when k divides n and bounds it otherwise") {
        for (std::uint64_t k : {4ULL, 16ULL, 64ULL}) {
            for (std::uint64_t r : {0ULL, 8ULL}) {
                for (std::uint64_t n = 1; n <= 512; ++n) {
                    const OpCounts closed = closed_form_costs(n, k, r).closed_form;
                    const OpCounts simulated = simulate_ops(n, k, r);
                    CHECK(simulated == count_by_hand(n, k, r, false));
                    CHECK(closed == count_by_hand(n, k, r, true));
                    CHECK(closed.enc_full == simulated.enc_full);
                    CHECK(closed.dec_full == simulated.dec_full);
                    if (n % k == 0) {
                        CHECK(closed == simulated);
                    } else {
                        CHECK(closed.enc_coa >= simulated.enc_coa);
                        CHECK(closed.dec_coa >= simulated.dec_coa);
                    }
                }
            }
        }
    }

    TEST_CASE("large input ratio") {
        const CostReport report = closed_form_costs(100000, 8000, 0);
        CHECK(report.closed_form.enc_full == 5000050000ULL);
        CHECK(report.closed_form.enc_coa == 32004000ULL * 13);
        const double expected = 5000050000.0 / (32004000.0 * 13);
        CHECK(report.encode_ratio() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(std::abs(report.encode_ratio() / asymptotic_encode_ratio(100000, 8000) - 1.0) < 0.01);
    }

    TEST_CASE("transcript accounting") {
        PipelineResult empty;
        CHECK(transcript_costs(empty) == OpCounts{});

        Sample s;
        s.id = "v";
        s.source = "one two three four five six seven";
        s.query = "Q?";
        const PromptTemplates t = PromptTemplates::for_task(TaskKind::qa);
        ChainSettings settings;
        settings.window = 2000;
        settings.generation_reserve = 16;
        coa::testing::FunctionBackend backend(coa::testing::descriptor_for(2000),
                                              [](const GenerationRequest&) { return "three words here"; });
        const PipelineResult r = run_vanilla(s, settings, t, backend);
        const OpCounts ops = transcript_costs(r);
        CHECK(ops.enc_full == 7 * 8 / 2);
        CHECK(ops.dec_full == decode_ops(7, 3));
        const std::uint64_t prompt = r.transcript[0].prompt_tokens;
        CHECK(ops.enc_coa == prompt * (prompt + 1) / 2);
        CHECK(ops.dec_coa == (2 * prompt + 3 + 1) * 3 / 2);
    }
}
