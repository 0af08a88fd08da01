#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dehnlab/certificate.hpp"
#include "dehnlab/cost_model.hpp"
#include "dehnlab/word.hpp"

namespace dehnlab {

// Combinatorial filling calculus.  All operations are stateless; every
// certificate they emit replays exactly under verify_certificate.

// Strictly upper-triangular shortcut word representing I -> empty word.
// Cost envelope: C_NP * n^3 h^2 with n the letter count and
// h = max(1, log2 max|coeff|).
FillingCertificate fill_triangular(const Word& w, int p, const CostModel& cm,
                                   std::uint64_t budget = TranscriptBuilder::kDefaultMoveBudget);

struct ParabolicSplit {
    std::vector<Word> projections; // one word over SigmaHat_{S_i} per block
    FillingCertificate cert;       // w -> p_1(w) ... p_k(w)
};

// Splits a word with block-diagonal evaluation along a contiguous partition
// whose blocks all have size <= p-2.  Letters must be within-block or
// upper-cross-block.  Cost envelope: C_Para * l^2.
ParabolicSplit parabolic_split(const Word& w, const BlockPartition& part, const CostModel& cm,
                               std::uint64_t budget = TranscriptBuilder::kDefaultMoveBudget);

// Certificate reducing the commutator [w_S, w_T] to the empty word for words
// over disjoint index supports of size <= p-2.  Cost envelope:
// C_Com * (l^(w_S) + l^(w_T))^2.
FillingCertificate commute_disjoint(const Word& w_S, const Word& w_T, int p, const CostModel& cm,
                                    std::uint64_t budget = TranscriptBuilder::kDefaultMoveBudget);

// Identity word over the {lo, lo+1} block's alphabet -> empty word, via the
// rank-1 symmetric-space template.  Cost envelope: C_Rank2 * l^2.
FillingCertificate fill_rank2(const Word& w, int p, const CostModel& cm, int lo = 0,
                              std::uint64_t budget = TranscriptBuilder::kDefaultMoveBudget);

// internal helpers shared with the template filler
namespace detail {

// index support of a word (diagonal letters contribute their -1 positions)
std::vector<int> word_support(const Word& w, int p);

// normalizes the strictly upper-triangular region [begin, end-of-word) into
// row normal form; requires every letter there strictly upper
void triangular_normalize(TranscriptBuilder& tb, std::int64_t begin);

} // namespace detail

} // namespace dehnlab
