#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dehnlab/certificate.hpp"
#include "dehnlab/cost_model.hpp"
#include "dehnlab/word.hpp"

namespace dehnlab {

// Brute-force filler over the explicit relator set of SL(p;Z), p = 3 by
// default.  Counts exact relator applications; free reductions are not
// charged.  The relator set is fixed and serialized with reports:
//   - commuting pairs        [e_ij, e_kl]            (j != k, l != i)
//   - chained pairs          [e_ij, e_jk] e_ik^-1
//   - braid relation         (e_ij e_ji^-1 e_ij)^4
//   - diagonal spellings     d * (product of s_ij^2 letters)^-1
//   - diagonal products      d1 d2 d3 with d1 d2 = d3^-1
//   - diagonal conjugation   d e_ij d^-1 e_ij(-+1)
// The last two families are derivable from the first four; they are included
// so that short diagonal words fill inside small depth budgets.

struct OracleOptions {
    int max_cost = 8;              // relator applications
    std::int64_t node_budget = 400000;
    int max_len_slack = 6;         // prune words longer than start + slack
    bool allow_insertions = true;  // free-position relator insertions
};

struct OracleStep {
    std::int64_t pos = 0;
    std::vector<Letter> before; // subword replaced
    std::vector<Letter> after;  // replacement (before * after^-1 is a relator)
    bool free_step = false;     // free reduction, cost 0
};

struct OracleFill {
    int relator_count = 0;
    std::vector<OracleStep> steps;
};

// empty result means DepthExceeded (not a disproof)
std::optional<OracleFill> steinberg_oracle_fill(const Word& w, int p = 3,
                                                const OracleOptions& opt = {});

// engine certificate from an oracle fill: each relator application becomes a
// verified subword replacement, each free reduction a free move
FillingCertificate certificate_from_oracle(const Word& w, const OracleFill& fill, int p,
                                           const CostModel& cm);

// all identity words over Sigma of exactly the given length (free reductions
// allowed), deduplicated as letter sequences; p = 3 intended
std::vector<Word> enumerate_identity_words(int p, int length, std::size_t cap);

} // namespace dehnlab
