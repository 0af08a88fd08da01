#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dehnlab/cost_model.hpp"
#include "dehnlab/errors.hpp"
#include "dehnlab/word.hpp"

namespace dehnlab {

// Word under rewriting.  A gap buffer keeps splices cheap: transcripts touch
// positions in nearly monotone sweeps.
class GapBuffer {
public:
    GapBuffer() = default;
    explicit GapBuffer(const Word& w);

    std::size_t size() const { return buf_.size() - (gap_end_ - gap_start_); }
    const Letter& at(std::size_t pos) const {
        return buf_[pos < gap_start_ ? pos : pos + (gap_end_ - gap_start_)];
    }
    void replace(std::size_t pos, std::size_t count, const Letter* repl, std::size_t repl_count);
    void insert(std::size_t pos, const Letter* ls, std::size_t count) { replace(pos, 0, ls, count); }
    void erase(std::size_t pos, std::size_t count) { replace(pos, count, nullptr, 0); }

    Word to_word(Alphabet a = Alphabet::SigmaHat) const;

private:
    void move_gap(std::size_t pos);

    std::vector<Letter> buf_;
    std::size_t gap_start_ = 0, gap_end_ = 0;
};

enum class MoveKind : std::uint8_t {
    FreeInsertDelete, // 0-cost insertion/deletion of a formal inverse pair
    Add,              // s_ij(x) s_ij(y) <-> s_ij(x+y); sign normalization
    Multiply,         // [s_ij(x), s_jk(y)] <-> s_ik(xy)
    Commute,          // s_ij(x) s_kl(y) <-> s_kl(y) s_ij(x), j != k, l != i
    SwapConj,         // s_ij-conjugation: permutes indices, flips signs
    DiagConj,         // diagonal letters: push past coefficient letters, merge, split
    ShortEquiv,       // verified evaluation-preserving subword replacement
};

// sub-variants
enum : std::uint8_t {
    kAddMerge = 0,
    kAddNormalizeSign = 1,
    kDiagPush = 0,   // [X, d] -> [d, X'] forward; [d, X] -> [X', d] reverse
    kDiagMerge = 1,  // [d1, d2] -> [d12]
    kDiagSplit = 2,  // [d12] -> [d1, d2], payload letters = {d1}
    kDiagDrop = 3,   // [I] -> []
    kDiagInsert = 4, // [] -> [I]
    kDiagSign = 5,   // d^-1 -> d
    kDiagSwap = 6,   // [d1, d2] -> [d2, d1]
};

constexpr std::uint32_t kNoPayload = std::numeric_limits<std::uint32_t>::max();

struct MovePayload {
    std::vector<Letter> letters;  // FreeInsert letter, DiagSplit part, ShortEquiv replacement
    std::vector<Letter> letters2; // ShortEquiv site (the side rewritten away going forward)
    Int x, y;                     // chosen factors for reverse Multiply / split Add
};

struct Move {
    MoveKind kind = MoveKind::FreeInsertDelete;
    std::uint8_t sub = 0;
    std::int8_t dir = 1; // +1 forward, -1 reverse
    bool fallback = false;
    std::int64_t pos = 0;
    std::int32_t len = 0; // block length for free deletes
    std::int16_t i = 0, j = 0, k = 0, l = 0;
    std::uint32_t payload = kNoPayload;
};

// Applies m to w in place and returns the charged cost.  Throws
// PatternMismatch / IndexClash when the site does not match.
double apply_move(GapBuffer& w, const Move& m, const std::vector<MovePayload>& payloads, int p,
                  const CostModel& cm);

const char* move_kind_name(MoveKind k);

} // namespace dehnlab
