#pragma once

// Line-oriented text format for explicit game structures.
//
//   # comment
//   agents: a b
//   actions a: L R
//   states: s0 s1
//   atoms: p q                  (optional; label atoms are auto-declared)
//   initial: s0
//   labels s1: p
//   indist a: {s0 s1} {s2}      (unlisted agents get the identity partition)
//   protocol s0 a: L            (optional; full protocol by default)
//   trans s0 (L,R) -> s1
//
// Saving is canonical: sections in a fixed order, entries sorted, so equal
// structures produce byte-identical files.

#include "gamut/model.hpp"

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace gamut {

namespace detail {

inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '@' ||
           c == '-';
}

// Splits one line into identifiers and the punctuation : { } ( ) , ->
inline std::vector<std::string> line_tokens(const std::string& line, int lineno) {
    std::vector<std::string> toks;
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
            toks.push_back("->");
            i += 2;
            continue;
        }
        if (c == ':' || c == '{' || c == '}' || c == '(' || c == ')' || c == ',') {
            toks.push_back(std::string(1, c));
            ++i;
            continue;
        }
        if (ident_char(c)) {
            size_t j = i;
            while (j < line.size() && ident_char(line[j])) ++j;
            toks.push_back(line.substr(i, j - i));
            i = j;
            continue;
        }
        throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'",
                    lineno, static_cast<int>(i) + 1);
    }
    return toks;
}

} // namespace detail

inline RawIcgs parse_model_text(const std::string& text) {
    RawIcgs raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = detail::line_tokens(line, lineno);
        if (toks.empty()) continue;
        size_t p = 0;
        auto need = [&](const std::string& what) -> std::string {
            if (p >= toks.size())
                throw Error(ErrorKind::Syntax, "expected " + what, lineno, 0);
            return toks[p++];
        };
        auto expect = [&](const std::string& tok) {
            if (p >= toks.size() || toks[p] != tok)
                throw Error(ErrorKind::Syntax, "expected '" + tok + "'", lineno, 0);
            ++p;
        };
        auto rest = [&]() {
            std::vector<std::string> out;
            while (p < toks.size()) out.push_back(toks[p++]);
            return out;
        };

        const std::string head = toks[p++];
        if (head == "agents") {
            expect(":");
            auto v = rest();
            raw.agents.insert(raw.agents.end(), v.begin(), v.end());
        } else if (head == "actions") {
            std::string agent = need("agent name");
            expect(":");
            auto& acts = raw.actions[agent];
            auto v = rest();
            acts.insert(acts.end(), v.begin(), v.end());
        } else if (head == "states") {
            expect(":");
            auto v = rest();
            raw.states.insert(raw.states.end(), v.begin(), v.end());
        } else if (head == "atoms") {
            expect(":");
            auto v = rest();
            raw.atoms.insert(raw.atoms.end(), v.begin(), v.end());
        } else if (head == "initial") {
            expect(":");
            auto v = rest();
            raw.initial.insert(raw.initial.end(), v.begin(), v.end());
        } else if (head == "labels") {
            std::string state = need("state name");
            expect(":");
            auto& l = raw.labels[state];
            auto v = rest();
            l.insert(l.end(), v.begin(), v.end());
        } else if (head == "indist") {
            std::string agent = need("agent name");
            expect(":");
            auto& blocks = raw.indist[agent];
            while (p < toks.size()) {
                expect("{");
                std::vector<std::string> block;
                while (p < toks.size() && toks[p] != "}") block.push_back(toks[p++]);
                expect("}");
                blocks.push_back(std::move(block));
            }
        } else if (head == "protocol") {
            std::string state = need("state name");
            std::string agent = need("agent name");
            expect(":");
            auto& acts = raw.protocol[{state, agent}];
            auto v = rest();
            acts.insert(acts.end(), v.begin(), v.end());
        } else if (head == "trans") {
            std::string state = need("state name");
            expect("(");
            std::vector<std::string> joint;
            joint.push_back(need("action name"));
            while (p < toks.size() && toks[p] == ",") {
                ++p;
                joint.push_back(need("action name"));
            }
            expect(")");
            expect("->");
            std::string target = need("target state");
            if (p != toks.size())
                throw Error(ErrorKind::Syntax, "trailing tokens after transition", lineno, 0);
            raw.trans.emplace_back(state, std::move(joint), target);
        } else {
            throw Error(ErrorKind::Syntax, "unknown directive '" + head + "'", lineno, 0);
        }
    }
    return raw;
}

inline Icgs load_model_text(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    return build_icgs(parse_model_text(text), warnings);
}

inline std::string save_model_text(const Icgs& m) {
    std::ostringstream out;
    auto names = [&](const std::vector<Idx>& ids, const std::vector<std::string>& table) {
        std::string s;
        for (size_t i = 0; i < ids.size(); ++i) {
            if (i) s += ' ';
            s += table[ids[i]];
        }
        return s;
    };

    out << "agents:";
    for (const auto& a : m.agents) out << ' ' << a;
    out << '\n';
    for (Idx a = 0; a < m.agents.size(); ++a) {
        out << "actions " << m.agents[a] << ':';
        for (const auto& act : m.actions[a]) out << ' ' << act;
        out << '\n';
    }
    out << "states:";
    for (const auto& s : m.states) out << ' ' << s;
    out << '\n';
    if (!m.atoms.empty()) {
        out << "atoms:";
        for (const auto& p : m.atoms) out << ' ' << p;
        out << '\n';
    }
    out << "initial: " << names(m.initial, m.states) << '\n';
    for (Idx s = 0; s < m.states.size(); ++s)
        if (!m.labels[s].empty())
            out << "labels " << m.states[s] << ": " << names(m.labels[s], m.atoms) << '\n';
    for (Idx a = 0; a < m.agents.size(); ++a) {
        out << "indist " << m.agents[a] << ':';
        for (const auto& cls : m.classes[a]) out << " {" << names(cls, m.states) << '}';
        out << '\n';
    }
    for (Idx s = 0; s < m.states.size(); ++s)
        for (Idx a = 0; a < m.agents.size(); ++a)
            if (m.protocol[s][a].size() != m.actions[a].size())
                out << "protocol " << m.states[s] << ' ' << m.agents[a] << ": "
                    << names(m.protocol[s][a], m.actions[a]) << '\n';
    for (const auto& [key, target] : m.transition) {
        const auto& [s, j] = key;
        out << "trans " << m.states[s] << " (";
        for (Idx a = 0; a < j.size(); ++a) {
            if (a) out << ',';
            out << m.actions[a][j[a]];
        }
        out << ") -> " << m.states[target] << '\n';
    }
    return out.str();
}

// FNV-1a over the canonical text; used to identify instances in reports.
inline std::string model_digest(const Icgs& m) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : save_model_text(m)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

} // namespace gamut
