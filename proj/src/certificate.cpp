#include "dehnlab/certificate.hpp"

#include <nlohmann/json.hpp>

namespace dehnlab {

using nlohmann::ordered_json;

namespace {

// letters consumed by the move at its position, before application
std::size_t move_site_length(const Move& m, const std::vector<MovePayload>& payloads,
                             const GapBuffer& w) {
    switch (m.kind) {
    case MoveKind::FreeInsertDelete: return m.dir > 0 ? 0 : 2 * static_cast<std::size_t>(m.len);
    case MoveKind::Add:
        if (m.sub == kAddNormalizeSign) return 1;
        if (m.dir > 0) return 2;
        // split of an empty merge result has no site
        if (m.payload != kNoPayload && m.payload < payloads.size() &&
            payloads[m.payload].x + payloads[m.payload].y == 0)
            return 0;
        return 1;
    case MoveKind::Multiply: return m.dir > 0 ? 4 : 1;
    case MoveKind::Commute: return 2;
    case MoveKind::SwapConj: return m.dir > 0 ? 7 : 1;
    case MoveKind::DiagConj:
        switch (m.sub) {
        case kDiagPush: return 2;
        case kDiagMerge: return 2;
        case kDiagSplit: return 1;
        case kDiagDrop: return 1;
        case kDiagInsert: return 0;
        case kDiagSign: return 1;
        case kDiagSwap: return 2;
        default: return 0;
        }
    case MoveKind::ShortEquiv:
        if (m.payload == kNoPayload || m.payload >= payloads.size())
            throw PatternMismatch("short_equiv payload missing");
        return (m.dir > 0 ? payloads[m.payload].letters2 : payloads[m.payload].letters).size();
    }
    (void)w;
    return 0;
}

} // namespace

VerifyReport verify_certificate(const FillingCertificate& c, const CostModel& cm) {
    VerifyReport rep;
    GapBuffer w(c.initial);
    IntMatrix target = c.initial.evaluate(c.p);
    double cost = 0.0;
    bool certified = true;
    for (std::size_t mi = 0; mi < c.moves.size(); ++mi) {
        const Move& m = c.moves[mi];
        std::size_t site_len;
        IntMatrix before = IntMatrix::identity(c.p);
        try {
            site_len = move_site_length(m, c.payloads, w);
            if (static_cast<std::size_t>(m.pos) + site_len > w.size())
                throw PatternMismatch("site out of range");
            for (std::size_t t = 0; t < site_len; ++t)
                before = before * w.at(static_cast<std::size_t>(m.pos) + t).eval(c.p);
            std::size_t size_before = w.size();
            cost += apply_move(w, m, c.payloads, c.p, cm);
            std::size_t repl_len = site_len + w.size() - size_before;
            IntMatrix after = IntMatrix::identity(c.p);
            for (std::size_t t = 0; t < repl_len; ++t)
                after = after * w.at(static_cast<std::size_t>(m.pos) + t).eval(c.p);
            if (before != after) {
                rep.ok = false;
                rep.reason = "local evaluation changed";
                rep.move_index = static_cast<std::int64_t>(mi);
                return rep;
            }
        } catch (const Error& e) {
            rep.ok = false;
            rep.reason = e.what();
            rep.move_index = static_cast<std::int64_t>(mi);
            return rep;
        }
        if (m.fallback) certified = false;
    }
    rep.replayed_cost = cost;
    Word final_got = w.to_word();
    if (!(final_got == c.final_word)) {
        rep.ok = false;
        rep.reason = "final word differs from replay";
        return rep;
    }
    if (final_got.evaluate(c.p) != target) {
        rep.ok = false;
        rep.reason = "final evaluation differs";
        return rep;
    }
    if (cost != c.total_cost) {
        rep.ok = false;
        rep.reason = "cost sum differs";
        return rep;
    }
    if (certified != c.certified) {
        rep.ok = false;
        rep.reason = "certified flag inconsistent";
        return rep;
    }
    return rep;
}

TranscriptBuilder::TranscriptBuilder(Word initial, int p, const CostModel& cm, std::uint64_t budget)
    : p_(p), cm_(cm), buf_(initial), budget_(budget) {
    cert_.p = p;
    cert_.initial = std::move(initial);
}

void TranscriptBuilder::emit(Move m) {
    if (cert_.moves.size() >= budget_) throw MoveBudgetExceeded("move budget exhausted");
    double c = apply_move(buf_, m, cert_.payloads, p_, cm_);
    cost_ += c;
    if (!cost_class_.empty()) cert_.cost_by_class[cost_class_] += c;
    if (m.fallback) cert_.certified = false;
    cert_.moves.push_back(std::move(m));
}

void TranscriptBuilder::free_insert(std::int64_t pos, const Letter& l) {
    free_insert_block(pos, {l});
}

void TranscriptBuilder::free_insert_block(std::int64_t pos, const std::vector<Letter>& u) {
    Move m;
    m.kind = MoveKind::FreeInsertDelete;
    m.dir = 1;
    m.pos = pos;
    m.len = static_cast<std::int32_t>(u.size());
    m.payload = static_cast<std::uint32_t>(cert_.payloads.size());
    MovePayload pl;
    pl.letters = u;
    cert_.payloads.push_back(std::move(pl));
    emit(std::move(m));
}

void TranscriptBuilder::free_delete(std::int64_t pos, std::int32_t block_len) {
    Move m;
    m.kind = MoveKind::FreeInsertDelete;
    m.dir = -1;
    m.pos = pos;
    m.len = block_len;
    emit(std::move(m));
}

void TranscriptBuilder::add_merge(std::int64_t pos) {
    Move m;
    m.kind = MoveKind::Add;
    m.sub = kAddMerge;
    m.dir = 1;
    m.pos = pos;
    emit(std::move(m));
}

void TranscriptBuilder::add_split(std::int64_t pos, int i, int j, Int x, Int y) {
    Move m;
    m.kind = MoveKind::Add;
    m.sub = kAddMerge;
    m.dir = -1;
    m.pos = pos;
    m.i = static_cast<std::int16_t>(i);
    m.j = static_cast<std::int16_t>(j);
    m.payload = static_cast<std::uint32_t>(cert_.payloads.size());
    MovePayload pl;
    pl.x = std::move(x);
    pl.y = std::move(y);
    cert_.payloads.push_back(std::move(pl));
    emit(std::move(m));
}

void TranscriptBuilder::add_normalize(std::int64_t pos) {
    Move m;
    m.kind = MoveKind::Add;
    m.sub = kAddNormalizeSign;
    m.dir = 1;
    m.pos = pos;
    emit(std::move(m));
}

void TranscriptBuilder::multiply(std::int64_t pos) {
    Move m;
    m.kind = MoveKind::Multiply;
    m.dir = 1;
    m.pos = pos;
    emit(std::move(m));
}

void TranscriptBuilder::multiply_expand(std::int64_t pos, int mid, Int x, Int y) {
    Move m;
    m.kind = MoveKind::Multiply;
    m.dir = -1;
    m.pos = pos;
    m.j = static_cast<std::int16_t>(mid);
    m.payload = static_cast<std::uint32_t>(cert_.payloads.size());
    MovePayload pl;
    pl.x = std::move(x);
    pl.y = std::move(y);
    cert_.payloads.push_back(std::move(pl));
    emit(std::move(m));
}

void TranscriptBuilder::commute(std::int64_t pos) {
    Move m;
    m.kind = MoveKind::Commute;
    m.pos = pos;
    emit(std::move(m));
}

void TranscriptBuilder::swap_conj(std::int64_t pos, int i, int j) {
    Move m;
    m.kind = MoveKind::SwapConj;
    m.dir = 1;
    m.pos = pos;
    m.i = static_cast<std::int16_t>(i);
    m.j = static_cast<std::int16_t>(j);
    emit(std::move(m));
}

void TranscriptBuilder::swap_conj_expand(std::int64_t pos, int i, int j) {
    Move m;
    m.kind = MoveKind::SwapConj;
    m.dir = -1;
    m.pos = pos;
    m.i = static_cast<std::int16_t>(i);
    m.j = static_cast<std::int16_t>(j);
    emit(std::move(m));
}

void TranscriptBuilder::diag_push(std::int64_t pos) {
    Move m;
    m.kind = MoveKind::DiagConj;
    m.sub = kDiagPush;
    m.dir = 1;
    m.pos = pos;
    emit(std::move(m));
}

void TranscriptBuilder::diag_pull(std::int64_t pos) {
    Move m;
    m.kind = MoveKind::DiagConj;
    m.sub = kDiagPush;
    m.dir = -1;
    m.pos = pos;
    emit(std::move(m));
}

void TranscriptBuilder::diag_merge(std::int64_t pos) {
    Move m;
    m.kind = MoveKind::DiagConj;
    m.sub = kDiagMerge;
    m.pos = pos;
    emit(std::move(m));
}

void TranscriptBuilder::diag_split(std::int64_t pos, Letter d1) {
    Move m;
    m.kind = MoveKind::DiagConj;
    m.sub = kDiagSplit;
    m.pos = pos;
    m.payload = static_cast<std::uint32_t>(cert_.payloads.size());
    MovePayload pl;
    pl.letters.push_back(std::move(d1));
    cert_.payloads.push_back(std::move(pl));
    emit(std::move(m));
}

void TranscriptBuilder::diag_drop(std::int64_t pos) {
    Move m;
    m.kind = MoveKind::DiagConj;
    m.sub = kDiagDrop;
    m.pos = pos;
    emit(std::move(m));
}

void TranscriptBuilder::diag_sign(std::int64_t pos) {
    Move m;
    m.kind = MoveKind::DiagConj;
    m.sub = kDiagSign;
    m.pos = pos;
    emit(std::move(m));
}

void TranscriptBuilder::diag_swap(std::int64_t pos) {
    Move m;
    m.kind = MoveKind::DiagConj;
    m.sub = kDiagSwap;
    m.pos = pos;
    emit(std::move(m));
}

void TranscriptBuilder::short_equiv(std::int64_t pos, std::vector<Letter> site,
                                    std::vector<Letter> repl, bool fallback) {
    Move m;
    m.kind = MoveKind::ShortEquiv;
    m.dir = 1;
    m.pos = pos;
    m.fallback = fallback;
    m.payload = static_cast<std::uint32_t>(cert_.payloads.size());
    MovePayload pl;
    pl.letters2 = std::move(site);
    pl.letters = std::move(repl);
    cert_.payloads.push_back(std::move(pl));
    emit(std::move(m));
}

void TranscriptBuilder::embed(const FillingCertificate& sub, std::int64_t pos) {
    std::uint32_t payload_base = static_cast<std::uint32_t>(cert_.payloads.size());
    cert_.payloads.insert(cert_.payloads.end(), sub.payloads.begin(), sub.payloads.end());
    for (Move m : sub.moves) {
        m.pos += pos;
        if (m.payload != kNoPayload) m.payload += payload_base;
        emit(std::move(m));
    }
}

FillingCertificate TranscriptBuilder::take() {
    cert_.final_word = buf_.to_word();
    cert_.total_cost = cost_;
    return std::move(cert_);
}

std::string FillingCertificate::json() const {
    ordered_json root;
    root["p"] = p;
    root["initial"] = initial.str();
    root["final"] = final_word.str();
    root["total_cost"] = total_cost;
    root["certified"] = certified;
    if (!cost_by_class.empty()) root["cost_by_class"] = cost_by_class;
    ordered_json ms = ordered_json::array();
    for (const Move& m : moves) {
        ordered_json jm;
        jm["kind"] = move_kind_name(m.kind);
        jm["sub"] = m.sub;
        jm["dir"] = m.dir;
        jm["pos"] = m.pos;
        jm["len"] = m.len;
        jm["site"] = {m.i, m.j, m.k, m.l};
        if (m.fallback) jm["fallback"] = true;
        if (m.payload != kNoPayload) {
            const MovePayload& pl = payloads[m.payload];
            ordered_json jp;
            if (!pl.letters.empty()) jp["letters"] = Word(Alphabet::SigmaHat, pl.letters).str();
            if (!pl.letters2.empty()) jp["letters2"] = Word(Alphabet::SigmaHat, pl.letters2).str();
            if (pl.x != 0) jp["x"] = pl.x.str();
            if (pl.y != 0) jp["y"] = pl.y.str();
            jm["params"] = jp;
        }
        ms.push_back(jm);
    }
    root["moves"] = ms;
    return root.dump(2);
}

FillingCertificate FillingCertificate::from_json_text(const std::string& text, const CostModel& cm) {
    ordered_json root = ordered_json::parse(text);
    FillingCertificate c;
    c.p = root.at("p").get<int>();
    c.initial = Word::parse(root.at("initial").get<std::string>());
    c.final_word = Word::parse(root.at("final").get<std::string>());
    c.total_cost = root.at("total_cost").get<double>();
    c.certified = root.at("certified").get<bool>();
    if (root.contains("cost_by_class"))
        c.cost_by_class = root.at("cost_by_class").get<std::map<std::string, double>>();
    for (const auto& jm : root.at("moves")) {
        Move m;
        std::string kind = jm.at("kind").get<std::string>();
        if (kind == "free") m.kind = MoveKind::FreeInsertDelete;
        else if (kind == "add") m.kind = MoveKind::Add;
        else if (kind == "multiply") m.kind = MoveKind::Multiply;
        else if (kind == "commute") m.kind = MoveKind::Commute;
        else if (kind == "swap_conj") m.kind = MoveKind::SwapConj;
        else if (kind == "diag_conj") m.kind = MoveKind::DiagConj;
        else if (kind == "short_equiv") m.kind = MoveKind::ShortEquiv;
        else throw ParseError("unknown move kind " + kind);
        m.sub = jm.at("sub").get<std::uint8_t>();
        m.dir = jm.at("dir").get<std::int8_t>();
        m.pos = jm.at("pos").get<std::int64_t>();
        m.len = jm.at("len").get<std::int32_t>();
        auto site = jm.at("site");
        m.i = site[0].get<std::int16_t>();
        m.j = site[1].get<std::int16_t>();
        m.k = site[2].get<std::int16_t>();
        m.l = site[3].get<std::int16_t>();
        if (jm.contains("fallback")) m.fallback = jm.at("fallback").get<bool>();
        if (jm.contains("params")) {
            MovePayload pl;
            const auto& jp = jm.at("params");
            if (jp.contains("letters")) pl.letters = Word::parse(jp.at("letters").get<std::string>()).letters();
            if (jp.contains("letters2")) pl.letters2 = Word::parse(jp.at("letters2").get<std::string>()).letters();
            if (jp.contains("x")) pl.x = Int(jp.at("x").get<std::string>());
            if (jp.contains("y")) pl.y = Int(jp.at("y").get<std::string>());
            m.payload = static_cast<std::uint32_t>(c.payloads.size());
            c.payloads.push_back(std::move(pl));
        }
        c.moves.push_back(std::move(m));
    }
    (void)cm;
    return c;
}

std::string CostModel::json() const {
    ordered_json j;
    j["C_Add"] = C_Add;
    j["C_Mul"] = C_Mul;
    j["C_Com"] = C_Com;
    j["C_Swap"] = C_Swap;
    j["C_Diag"] = C_Diag;
    j["C_ShortEquiv"] = C_ShortEquiv;
    j["C_NP"] = C_NP;
    j["C_Para"] = C_Para;
    j["C_Rank2"] = C_Rank2;
    return j.dump(2);
}

CostModel CostModel::from_json_text(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    CostModel cm;
    cm.C_Add = j.value("C_Add", cm.C_Add);
    cm.C_Mul = j.value("C_Mul", cm.C_Mul);
    cm.C_Com = j.value("C_Com", cm.C_Com);
    cm.C_Swap = j.value("C_Swap", cm.C_Swap);
    cm.C_Diag = j.value("C_Diag", cm.C_Diag);
    cm.C_ShortEquiv = j.value("C_ShortEquiv", cm.C_ShortEquiv);
    cm.C_NP = j.value("C_NP", cm.C_NP);
    cm.C_Para = j.value("C_Para", cm.C_Para);
    cm.C_Rank2 = j.value("C_Rank2", cm.C_Rank2);
    if (!cm.valid()) throw ParseError("cost model constants must be positive");
    return cm;
}

} // namespace dehnlab
