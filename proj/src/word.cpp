#include "dehnlab/word.hpp"

#include <sstream>

namespace dehnlab {

std::string Letter::str() const {
    std::string out;
    switch (kind) {
    case Kind::Elementary:
        out = "E";
        if (sign < 0) out += "-";
        out += " " + std::to_string(i + 1) + " " + std::to_string(j + 1);
        return out;
    case Kind::Shortcut:
        out = "S";
        if (sign < 0) out += "-";
        out += " " + std::to_string(i + 1) + " " + std::to_string(j + 1) + " " + coeff.str();
        return out;
    case Kind::Diagonal: {
        out = "D";
        if (sign < 0) out += "-";
        out += " ";
        for (std::size_t k = 0; k < diag.size(); ++k) out += (k ? "," : "") + std::string(diag[k] > 0 ? "1" : "-1");
        return out;
    }
    }
    throw Error("unreachable");
}

std::string Word::str() const {
    std::string out;
    for (std::size_t k = 0; k < letters_.size(); ++k) {
        if (k) out += " ";
        out += letters_[k].str();
    }
    return out;
}

namespace {

int parse_index(const std::string& tok) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("bad index token '" + tok + "'");
    }
    if (pos != tok.size() || v < 1) throw ParseError("bad index token '" + tok + "'");
    return v - 1;
}

} // namespace

Word Word::parse(const std::string& line, Alphabet a) {
    std::istringstream in(line);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);

    Word w(a);
    std::size_t k = 0;
    auto need = [&](std::size_t n) {
        if (k + n > toks.size()) throw ParseError("truncated word");
    };
    while (k < toks.size()) {
        std::string head = toks[k++];
        int sign = 1;
        if (head.size() == 2 && head[1] == '-') {
            sign = -1;
            head = head.substr(0, 1);
        }
        if (head == "E") {
            need(2);
            int i = parse_index(toks[k]);
            int j = parse_index(toks[k + 1]);
            k += 2;
            if (i == j) throw ParseError("E letter with i == j");
            w.push_back(Letter::elementary(i, j, sign));
        } else if (head == "S") {
            need(3);
            int i = parse_index(toks[k]);
            int j = parse_index(toks[k + 1]);
            Int x;
            try {
                x = Int(toks[k + 2]);
            } catch (const std::exception&) {
                throw ParseError("bad coefficient '" + toks[k + 2] + "'");
            }
            k += 3;
            if (i == j) throw ParseError("S letter with a == b");
            if (x == 0) throw ParseError("S letter with x == 0");
            w.push_back(Letter::shortcut(i, j, std::move(x), sign));
        } else if (head == "D") {
            need(1);
            std::vector<std::int8_t> signs;
            std::string body = toks[k++];
            std::size_t pos = 0;
            while (pos < body.size()) {
                std::size_t comma = body.find(',', pos);
                std::string piece = body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
                if (piece == "1" || piece == "+1")
                    signs.push_back(1);
                else if (piece == "-1")
                    signs.push_back(-1);
                else
                    throw ParseError("bad diagonal entry '" + piece + "'");
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            w.push_back(Letter::diagonal(std::move(signs), sign));
        } else {
            throw ParseError("unknown letter kind '" + head + "'");
        }
    }
    return w;
}

bool in_block_group(const IntMatrix& g, const BlockPartition& part) {
    if (part.dim() != g.dim()) throw DimensionMismatch("partition dim != matrix dim");
    for (int b = 0; b + 1 < part.count(); ++b) {
        int cut = part.end(b);
        for (int i = cut; i < g.dim(); ++i)
            for (int j = 0; j < cut; ++j)
                if (g(i, j) != 0) return false;
    }
    return true;
}

BlockPartition minimal_parabolic(const IntMatrix& g) {
    const int p = g.dim();
    // a cut after column c is valid iff the lower-left c x (p-c) corner is zero
    std::vector<int> sizes;
    int last = 0;
    for (int c = 1; c < p; ++c) {
        bool zero = true;
        for (int i = c; i < p && zero; ++i)
            for (int j = 0; j < c; ++j)
                if (g(i, j) != 0) {
                    zero = false;
                    break;
                }
        if (zero) {
            sizes.push_back(c - last);
            last = c;
        }
    }
    sizes.push_back(p - last);
    return BlockPartition(sizes);
}

} // namespace dehnlab
