#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dehnlab/cost_model.hpp"
#include "dehnlab/moves.hpp"
#include "dehnlab/word.hpp"

namespace dehnlab {

// Replayable sequence of evaluation-preserving macro moves with an
// accumulated model cost.  certified drops to false the moment a move with
// the fallback flag is recorded.
struct FillingCertificate {
    int p = 0;
    Word initial{Alphabet::SigmaHat};
    Word final_word{Alphabet::SigmaHat};
    std::vector<Move> moves;
    std::vector<MovePayload> payloads;
    double total_cost = 0.0;
    bool certified = true;
    std::map<std::string, double> cost_by_class;

    std::string json() const;
    static FillingCertificate from_json_text(const std::string& text, const CostModel& cm);
};

struct VerifyReport {
    bool ok = true;
    std::string reason;
    std::int64_t move_index = -1;
    double replayed_cost = 0.0;

    explicit operator bool() const { return ok; }
};

// Replays every move with exact arithmetic: per-move local evaluation
// invariance, final word, cost resummation, certified flag.
VerifyReport verify_certificate(const FillingCertificate& c, const CostModel& cm);

// Engine-side transcript: owns the evolving word, applies each move as it is
// recorded, accumulates cost, and enforces the move budget.
class TranscriptBuilder {
public:
    static constexpr std::uint64_t kDefaultMoveBudget = 1000000;

    TranscriptBuilder(Word initial, int p, const CostModel& cm,
                      std::uint64_t move_budget = kDefaultMoveBudget);

    int p() const { return p_; }
    std::size_t size() const { return buf_.size(); }
    const Letter& at(std::size_t pos) const { return buf_.at(pos); }
    Word word() const { return buf_.to_word(); }
    double cost() const { return cost_; }
    std::uint64_t move_count() const { return cert_.moves.size(); }

    // primitive emitters; pos is an absolute index into the current word
    void free_insert(std::int64_t pos, const Letter& l);
    void free_insert_block(std::int64_t pos, const std::vector<Letter>& u);
    void free_delete(std::int64_t pos, std::int32_t block_len = 1);
    void add_merge(std::int64_t pos);
    void add_split(std::int64_t pos, int i, int j, Int x, Int y);
    void add_normalize(std::int64_t pos);
    void multiply(std::int64_t pos);
    void multiply_expand(std::int64_t pos, int mid, Int x, Int y);
    void commute(std::int64_t pos);
    void swap_conj(std::int64_t pos, int i, int j);
    void swap_conj_expand(std::int64_t pos, int i, int j);
    void diag_push(std::int64_t pos);
    void diag_pull(std::int64_t pos);
    void diag_merge(std::int64_t pos);
    void diag_split(std::int64_t pos, Letter d1);
    void diag_drop(std::int64_t pos);
    void diag_sign(std::int64_t pos);
    void diag_swap(std::int64_t pos);
    void short_equiv(std::int64_t pos, std::vector<Letter> site, std::vector<Letter> repl,
                     bool fallback = false);

    // replay sub's moves at an offset; sub.initial must sit at [pos, pos + n)
    void embed(const FillingCertificate& sub, std::int64_t pos);

    // tag for the per-class cost breakdown; subsequent costs accumulate there
    void set_cost_class(const std::string& name) { cost_class_ = name; }

    FillingCertificate take();

private:
    void emit(Move m);

    int p_;
    const CostModel& cm_;
    GapBuffer buf_;
    FillingCertificate cert_;
    double cost_ = 0.0;
    std::uint64_t budget_;
    std::string cost_class_;
};

} // namespace dehnlab
