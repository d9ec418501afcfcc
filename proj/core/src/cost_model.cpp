#include "coa/cost_model.hpp"

#include "coa/errors.hpp"

namespace coa {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

double CostReport::encode_ratio() const {
    return closed_form.enc_coa == 0 ? 0.0
                                    : static_cast<double>(closed_form.enc_full) / static_cast<double>(closed_form.enc_coa);
}

std::uint64_t encode_ops(std::uint64_t prompt) { return prompt * (prompt + 1) / 2; }

std::uint64_t decode_ops(std::uint64_t prompt, std::uint64_t generated) {
    return (2 * prompt + generated + 1) * generated / 2;
}

CostReport closed_form_costs(std::uint64_t n, std::uint64_t k, std::uint64_t r) {
    if (n == 0 || k == 0) {
        throw ConfigError("cost model requires n >= 1 and k >= 1");
    }
    CostReport report;
    report.n = n;
    report.k = k;
    report.r = r;
    const std::uint64_t chunks = ceil_div(n, k);
    report.closed_form.enc_full = encode_ops(n);
    report.closed_form.dec_full = decode_ops(n, r);
    report.closed_form.enc_coa = encode_ops(k) * chunks;
    report.closed_form.dec_coa = decode_ops(k, r) * chunks;
    return report;
}

OpCounts simulate_ops(std::uint64_t n, std::uint64_t k, std::uint64_t r) {
    if (n == 0 || k == 0) {
        throw ConfigError("cost model requires n >= 1 and k >= 1");
    }
    auto encode_segment = [](std::uint64_t length) {
        std::uint64_t ops = 0;
        for (std::uint64_t t = 1; t <= length; ++t) ops += t;
        return ops;
    };
    auto decode_segment = [r](std::uint64_t length) {
        std::uint64_t ops = 0;
        for (std::uint64_t j = 1; j <= r; ++j) ops += length + j;
        return ops;
    };
    OpCounts ops;
    ops.enc_full = encode_segment(n);
    ops.dec_full = decode_segment(n);
    for (std::uint64_t start = 0; start < n; start += k) {
        const std::uint64_t length = std::min(k, n - start);
        ops.enc_coa += encode_segment(length);
        ops.dec_coa += decode_segment(length);
    }
    return ops;
}

OpCounts transcript_costs(const PipelineResult& result) {
    OpCounts ops;
    if (result.transcript.empty()) {
        return ops;
    }
    for (const TranscriptEntry& entry : result.transcript) {
        ops.enc_coa += encode_ops(entry.prompt_tokens);
        ops.dec_coa += decode_ops(entry.prompt_tokens, entry.generated_tokens);
    }
    const std::uint64_t n = result.chunk_plan.source_len;
    ops.enc_full = encode_ops(n);
    ops.dec_full = decode_ops(n, result.transcript.back().generated_tokens);
    return ops;
}

double asymptotic_encode_ratio(std::uint64_t n, std::uint64_t k) {
    const double nk = static_cast<double>(n) / static_cast<double>(k);
    return nk * (nk / static_cast<double>(ceil_div(n, k)));
}

}  // namespace coa
