#include "dehnlab/oracle.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace dehnlab {

namespace {

std::string key_of(const std::vector<Letter>& ls) {
    std::string k;
    for (const Letter& l : ls) {
        k.push_back(static_cast<char>('0' + static_cast<int>(l.kind)));
        k.push_back(l.sign > 0 ? '+' : '-');
        if (l.kind == Letter::Kind::Diagonal) {
            for (std::int8_t s : l.diag) k.push_back(s > 0 ? '1' : '0');
        } else {
            k.push_back(static_cast<char>('a' + l.i));
            k.push_back(static_cast<char>('a' + l.j));
            if (l.kind == Letter::Kind::Shortcut) k += l.coeff.str();
        }
        k.push_back('|');
    }
    return k;
}

std::vector<Letter> inverse_of(const std::vector<Letter>& ls) {
    std::vector<Letter> out;
    out.reserve(ls.size());
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) out.push_back(it->inverse());
    return out;
}

// leftmost-first free reduction, recording each cancellation
void free_reduce_recorded(std::vector<Letter>& w, std::vector<OracleStep>* steps) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t t = 0; t + 1 < w.size(); ++t) {
            if (w[t + 1].is_formal_inverse_of(w[t])) {
                if (steps) {
                    OracleStep s;
                    s.pos = static_cast<std::int64_t>(t);
                    s.free_step = true;
                    steps->push_back(std::move(s));
                }
                w.erase(w.begin() + static_cast<std::ptrdiff_t>(t),
                        w.begin() + static_cast<std::ptrdiff_t>(t) + 2);
                changed = true;
                break;
            }
        }
    }
}

struct Rule {
    std::vector<Letter> lhs, rhs;
};

struct RelatorTable {
    std::vector<Word> relators;
    std::vector<Rule> rules;
    // rules grouped by first lhs letter key; empty-lhs rules listed separately
    std::unordered_map<std::string, std::vector<int>> by_head;
    std::vector<int> insertions;
};

Letter elem(int i, int j, int sign) { return Letter::elementary(i, j, sign); }

void push_relator(std::vector<Word>& out, std::vector<Letter> ls, int p) {
    Word w(Alphabet::Sigma, std::move(ls));
    if (!w.evaluate(p).is_identity()) throw Error("oracle relator does not represent I");
    out.push_back(std::move(w));
}

std::vector<std::vector<std::int8_t>> diagonal_elements(int p) {
    std::vector<std::vector<std::int8_t>> out;
    for (int mask = 0; mask < (1 << p); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) % 2 != 0) continue;
        std::vector<std::int8_t> d(static_cast<std::size_t>(p), 1);
        for (int t = 0; t < p; ++t)
            if (mask & (1 << t)) d[static_cast<std::size_t>(t)] = -1;
        out.push_back(std::move(d));
    }
    return out;
}

// canonical spelling of a sign diagonal: product of s_ab^2 over paired -1s
std::vector<Letter> diagonal_spelling(const std::vector<std::int8_t>& d) {
    std::vector<int> neg;
    for (int t = 0; t < static_cast<int>(d.size()); ++t)
        if (d[static_cast<std::size_t>(t)] < 0) neg.push_back(t);
    std::vector<Letter> out;
    for (std::size_t t = 0; t + 1 < neg.size(); t += 2) {
        int a = neg[t], b = neg[t + 1];
        for (int rep = 0; rep < 2; ++rep) {
            out.push_back(elem(b, a, -1));
            out.push_back(elem(a, b, 1));
            out.push_back(elem(b, a, -1));
        }
    }
    return out;
}

RelatorTable build_relators(int p) {
    RelatorTable tab;
    std::vector<Word>& rs = tab.relators;

    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            if (i == j) continue;
            for (int k = 0; k < p; ++k)
                for (int l = 0; l < p; ++l) {
                    if (k == l) continue;
                    if (std::make_pair(i, j) >= std::make_pair(k, l)) continue;
                    if (j == k || l == i) continue;
                    push_relator(rs, {elem(i, j, 1), elem(k, l, 1), elem(i, j, -1), elem(k, l, -1)}, p);
                }
            for (int k = 0; k < p; ++k) {
                if (k == i || k == j) continue;
                push_relator(rs, {elem(i, j, 1), elem(j, k, 1), elem(i, j, -1), elem(j, k, -1), elem(i, k, -1)},
                             p);
            }
        }
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            std::vector<Letter> braid;
            for (int rep = 0; rep < 4; ++rep) {
                braid.push_back(elem(i, j, 1));
                braid.push_back(elem(j, i, -1));
                braid.push_back(elem(i, j, 1));
            }
            push_relator(rs, std::move(braid), p);
        }

    auto diags = diagonal_elements(p);
    for (const auto& d : diags) {
        std::vector<Letter> spell = diagonal_spelling(d);
        std::vector<Letter> rel;
        rel.push_back(Letter::diagonal(d));
        for (auto it = spell.rbegin(); it != spell.rend(); ++it) rel.push_back(it->inverse());
        push_relator(rs, std::move(rel), p);
    }
    for (const auto& d1 : diags)
        for (const auto& d2 : diags) {
            std::vector<std::int8_t> d3(d1);
            for (std::size_t t = 0; t < d3.size(); ++t) d3[t] = static_cast<std::int8_t>(d3[t] * d2[t]);
            push_relator(rs, {Letter::diagonal(d1), Letter::diagonal(d2), Letter::diagonal(d3, -1)}, p);
        }
    for (const auto& d : diags) {
        bool identity = true;
        for (std::int8_t s : d)
            if (s < 0) identity = false;
        if (identity) continue;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                if (i == j) continue;
                int ee = d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(j)];
                push_relator(rs, {Letter::diagonal(d), elem(i, j, 1), Letter::diagonal(d, -1),
                                  elem(i, j, ee < 0 ? 1 : -1)},
                             p);
            }
    }

    // rules: for every rotation q of r or r^-1 and every split q = u v,
    // u may be rewritten to v^-1
    std::unordered_map<std::string, int> seen;
    auto add_rule = [&](std::vector<Letter> lhs, std::vector<Letter> rhs) {
        free_reduce_recorded(lhs, nullptr);
        free_reduce_recorded(rhs, nullptr);
        if (lhs.size() > 6 || rhs.size() > 7) return;
        if (lhs.empty() && rhs.empty()) return;
        std::string k = key_of(lhs) + "=>" + key_of(rhs);
        if (seen.count(k)) return;
        seen[k] = 1;
        int id = static_cast<int>(tab.rules.size());
        tab.rules.push_back(Rule{lhs, rhs});
        if (lhs.empty())
            tab.insertions.push_back(id);
        else
            tab.by_head[key_of({lhs[0]})].push_back(id);
    };
    for (const Word& r : rs) {
        for (int invert = 0; invert < 2; ++invert) {
            std::vector<Letter> base = invert ? inverse_of(r.letters()) : r.letters();
            for (std::size_t rot = 0; rot < base.size(); ++rot) {
                std::vector<Letter> q(base.begin() + static_cast<std::ptrdiff_t>(rot), base.end());
                q.insert(q.end(), base.begin(), base.begin() + static_cast<std::ptrdiff_t>(rot));
                for (std::size_t split = 0; split <= q.size(); ++split) {
                    std::vector<Letter> u(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(split));
                    std::vector<Letter> v(q.begin() + static_cast<std::ptrdiff_t>(split), q.end());
                    add_rule(u, inverse_of(v));
                }
            }
        }
    }
    return tab;
}

const RelatorTable& relator_table(int p) {
    static std::unordered_map<int, RelatorTable> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, build_relators(p)).first;
    return it->second;
}

} // namespace

std::optional<OracleFill> steinberg_oracle_fill(const Word& w, int p, const OracleOptions& opt) {
    const RelatorTable& tab = relator_table(p);

    std::vector<Letter> start = w.letters();
    free_reduce_recorded(start, nullptr);
    const std::size_t max_len = start.size() + static_cast<std::size_t>(opt.max_len_slack);

    struct NodeInfo {
        int cost;
        std::string parent;
        int rule = -1;
        std::int64_t pos = -1;
    };
    std::unordered_map<std::string, NodeInfo> visited;
    std::unordered_map<std::string, std::vector<Letter>> words;

    std::string start_key = key_of(start);
    visited[start_key] = NodeInfo{0, "", -1, -1};
    words[start_key] = start;

    std::deque<std::string> frontier{start_key};
    std::int64_t nodes = 0;
    std::string goal;

    if (start.empty()) goal = start_key;

    while (!frontier.empty() && goal.empty()) {
        std::string cur_key = frontier.front();
        frontier.pop_front();
        const std::vector<Letter> cur = words[cur_key];
        int cur_cost = visited[cur_key].cost;
        if (cur_cost >= opt.max_cost) continue;

        auto try_rule = [&](int rid, std::size_t pos) {
            const Rule& rule = tab.rules[static_cast<std::size_t>(rid)];
            if (pos + rule.lhs.size() > cur.size()) return;
            for (std::size_t t = 0; t < rule.lhs.size(); ++t)
                if (!(cur[pos + t] == rule.lhs[t])) return;
            std::vector<Letter> next(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(pos));
            next.insert(next.end(), rule.rhs.begin(), rule.rhs.end());
            next.insert(next.end(), cur.begin() + static_cast<std::ptrdiff_t>(pos + rule.lhs.size()),
                        cur.end());
            free_reduce_recorded(next, nullptr);
            if (next.size() > max_len) return;
            std::string nk = key_of(next);
            if (visited.count(nk)) return;
            ++nodes;
            visited[nk] = NodeInfo{cur_cost + 1, cur_key, rid, static_cast<std::int64_t>(pos)};
            words[nk] = next;
            if (next.empty()) goal = nk;
            frontier.push_back(nk);
        };

        for (std::size_t pos = 0; pos < cur.size() && goal.empty(); ++pos) {
            auto it = tab.by_head.find(key_of({cur[pos]}));
            if (it == tab.by_head.end()) continue;
            for (int rid : it->second) {
                try_rule(rid, pos);
                if (!goal.empty() || nodes > opt.node_budget) break;
            }
            if (nodes > opt.node_budget) break;
        }
        if (goal.empty() && nodes <= opt.node_budget && opt.allow_insertions) {
            for (std::size_t pos = 0; pos <= cur.size() && goal.empty(); ++pos)
                for (int rid : tab.insertions) {
                    try_rule(rid, pos);
                    if (!goal.empty() || nodes > opt.node_budget) break;
                }
        }
        if (nodes > opt.node_budget && goal.empty()) return std::nullopt;
    }
    if (goal.empty()) return std::nullopt;

    // reconstruct the chain of rule applications
    std::vector<NodeInfo> chain;
    std::string at = goal;
    while (at != start_key) {
        chain.push_back(visited[at]);
        at = visited[at].parent;
    }
    std::reverse(chain.begin(), chain.end());

    // replay on the original word, recording the exact steps
    OracleFill fill;
    std::vector<Letter> cur = w.letters();
    free_reduce_recorded(cur, &fill.steps);
    for (const NodeInfo& n : chain) {
        const Rule& rule = tab.rules[static_cast<std::size_t>(n.rule)];
        OracleStep s;
        s.pos = n.pos;
        s.before = rule.lhs;
        s.after = rule.rhs;
        fill.steps.push_back(s);
        ++fill.relator_count;
        cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(n.pos),
                  cur.begin() + static_cast<std::ptrdiff_t>(n.pos) + static_cast<std::ptrdiff_t>(rule.lhs.size()));
        cur.insert(cur.begin() + static_cast<std::ptrdiff_t>(n.pos), rule.rhs.begin(), rule.rhs.end());
        free_reduce_recorded(cur, &fill.steps);
    }
    if (!cur.empty()) throw Error("oracle replay did not reach the empty word");
    return fill;
}

FillingCertificate certificate_from_oracle(const Word& w, const OracleFill& fill, int p,
                                           const CostModel& cm) {
    TranscriptBuilder tb(w, p, cm);
    for (const OracleStep& s : fill.steps) {
        if (s.free_step)
            tb.free_delete(s.pos, 1);
        else
            tb.short_equiv(s.pos, s.before, s.after, false);
    }
    if (tb.size() != 0) throw Error("oracle certificate did not empty the word");
    return tb.take();
}

std::vector<Word> enumerate_identity_words(int p, int length, std::size_t cap) {
    // alphabet: signed elementary letters plus positive diagonal letters
    std::vector<Letter> alphabet;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            if (i == j) continue;
            alphabet.push_back(elem(i, j, 1));
            alphabet.push_back(elem(i, j, -1));
        }
    for (const auto& d : diagonal_elements(p)) alphabet.push_back(Letter::diagonal(d));

    std::vector<Word> out;
    std::vector<Letter> word;
    std::vector<IntMatrix> prefix{IntMatrix::identity(p)};

    struct Frame {
        std::size_t next = 0;
    };
    std::vector<Frame> stack(1);
    while (!stack.empty()) {
        if (out.size() >= cap) break;
        Frame& f = stack.back();
        if (static_cast<int>(word.size()) == length) {
            if (prefix.back().is_identity()) out.push_back(Word(Alphabet::Sigma, word));
            stack.pop_back();
            if (!word.empty()) {
                word.pop_back();
                prefix.pop_back();
            }
            continue;
        }
        if (f.next >= alphabet.size()) {
            stack.pop_back();
            if (!word.empty()) {
                word.pop_back();
                prefix.pop_back();
            }
            continue;
        }
        const Letter& l = alphabet[f.next++];
        word.push_back(l);
        prefix.push_back(prefix.back() * l.eval(p));
        stack.push_back(Frame{});
    }
    return out;
}

} // namespace dehnlab
