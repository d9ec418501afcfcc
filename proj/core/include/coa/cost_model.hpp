#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "coa/types.hpp"

namespace coa {

/// Attention-operation counts: each query position contributes the number
/// of positions it attends to.
struct OpCounts {
    std::uint64_t enc_full = 0;
    std::uint64_t dec_full = 0;
    std::uint64_t enc_coa = 0;
    std::uint64_t dec_coa = 0;

    friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

struct CostReport {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    std::uint64_t r = 0;
    OpCounts closed_form;
    std::optional<OpCounts> measured;

    /// enc_full / enc_coa of the closed form.
    double encode_ratio() const;
};

/// Exact integer evaluation:
///   enc_full = n(n+1)/2,              dec_full = (2n+r+1)r/2,
///   enc_coa  = k(k+1)/2 * ceil(n/k),  dec_coa  = (2k+r+1)r/2 * ceil(n/k).
/// Requires n >= 1, k >= 1.
CostReport closed_form_costs(std::uint64_t n, std::uint64_t k, std::uint64_t r);

/// Token-by-token count. Encoding token t attends t positions; decoding token
/// j after a segment of length s attends s+j. The chained variant uses true
/// chunk lengths, so the last partial chunk is cheaper than the closed form.
OpCounts simulate_ops(std::uint64_t n, std::uint64_t k, std::uint64_t r);

/// Same accounting applied to the recorded calls of a run. The *_coa fields
/// sum every call actually made; the *_full fields price one full-context call
/// over the source (chunk_plan.source_len) producing the final generation.
OpCounts transcript_costs(const PipelineResult& result);

/// Ops of one call with `prompt` encoded tokens and `generated` decoded tokens.
std::uint64_t encode_ops(std::uint64_t prompt);
std::uint64_t decode_ops(std::uint64_t prompt, std::uint64_t generated);

/// Leading asymptotic encode ratio: (n/k) scaled by the occupancy n / (k * ceil(n/k)).
double asymptotic_encode_ratio(std::uint64_t n, std::uint64_t k);

}  // namespace coa
