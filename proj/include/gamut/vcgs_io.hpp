#pragma once

// Text format for guarded-command game structures, one block per agent with
// the environment block last:
//
//   agent a {
//     atoms: act.a.L turn.a;
//     init: cls.a.s0 ~> turn.a := F, vis(act.a.L, b) := F;
//     update: turn.a & cls.a.s0 ~> act.a.L := T, turn.a := F;
//   }
//   env {
//     atoms: st.s0 cls.a.s0 turn.env;
//     props: p q;
//     init: T ~> vis(cls.a.s0, a) := T;
//   }
//
// Guards use !, &, | over atoms and the constants T and F. The env block
// may carry a name (default "env") and declares the proposition atoms.

#include "gamut/model_io.hpp" // shared line-lexing helpers
#include "gamut/vcgs.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace gamut {

namespace detail {

struct VTok {
    std::string text; // identifiers and multi-char operators
    int line, col;
};

inline std::vector<VTok> vlex(const std::string& src) {
    std::vector<VTok> toks;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](std::string t) { toks.push_back({std::move(t), line, col}); };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') { ++line; col = 1; ++i; continue; }
        if (std::isspace(static_cast<unsigned char>(c))) { ++col; ++i; continue; }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if (c == '~' && i + 1 < src.size() && src[i + 1] == '>') {
            push("~>"); i += 2; col += 2; continue;
        }
        if (c == ':' && i + 1 < src.size() && src[i + 1] == '=') {
            push(":="); i += 2; col += 2; continue;
        }
        if (std::string("{}(),;:!&|").find(c) != std::string::npos) {
            push(std::string(1, c)); ++i; ++col; continue;
        }
        if (ident_char(c)) {
            size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            push(src.substr(i, j - i));
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        throw Error(ErrorKind::Syntax, std::string("unexpected character '") + c + "'", line,
                    col);
    }
    toks.push_back({"", line, col});
    return toks;
}

// Name-based intermediate structures; resolved into a Vcgs afterwards.
struct RawGuard {
    Guard::Op op = Guard::Op::Const;
    std::string atom;
    bool value = false;
    std::shared_ptr<RawGuard> lhs, rhs;
};

struct RawVCommand {
    CommandKind kind;
    std::shared_ptr<RawGuard> guard;
    std::vector<std::pair<std::string, bool>> sets;
    std::vector<std::tuple<std::string, std::string, bool>> vis;
};

struct RawVAgent {
    std::string name;
    bool is_env = false;
    std::vector<std::string> atoms;
    std::vector<std::string> props;
    std::vector<RawVCommand> commands;
};

class VcgsParser {
public:
    explicit VcgsParser(const std::string& src) : toks_(vlex(src)) {}

    std::vector<RawVAgent> parse() {
        std::vector<RawVAgent> out;
        while (!at_end()) out.push_back(block());
        return out;
    }

private:
    const VTok& cur() const { return toks_[pos_]; }
    bool at_end() const { return cur().text.empty(); }
    void advance() { ++pos_; }
    [[noreturn]] void fail(const std::string& what) {
        throw Error(ErrorKind::Syntax,
                    "expected " + what + ", got '" + (at_end() ? "<end>" : cur().text) + "'",
                    cur().line, cur().col);
    }
    void expect(const std::string& t) {
        if (cur().text != t) fail("'" + t + "'");
        advance();
    }
    std::string ident(const char* what) {
        if (at_end() || !ident_char(cur().text[0])) fail(what);
        std::string s = cur().text;
        advance();
        return s;
    }

    RawVAgent block() {
        RawVAgent ag;
        if (cur().text == "agent") {
            advance();
            ag.name = ident("agent name");
        } else if (cur().text == "env") {
            advance();
            ag.is_env = true;
            ag.name = cur().text == "{" ? "env" : ident("agent name");
        } else {
            fail("'agent' or 'env' block");
        }
        expect("{");
        while (cur().text != "}") {
            std::string head = ident("block entry");
            if (head == "atoms") {
                expect(":");
                while (cur().text != ";") ag.atoms.push_back(ident("atom name"));
                expect(";");
            } else if (head == "props") {
                expect(":");
                while (cur().text != ";") ag.props.push_back(ident("atom name"));
                expect(";");
            } else if (head == "init" || head == "update") {
                expect(":");
                RawVCommand cmd;
                cmd.kind = head == "init" ? CommandKind::Init : CommandKind::Update;
                cmd.guard = guard_or();
                expect("~>");
                while (cur().text != ";") {
                    if (!cmd.sets.empty() || !cmd.vis.empty()) expect(",");
                    if (cur().text == "vis" && toks_[pos_ + 1].text == "(") {
                        advance();
                        expect("(");
                        std::string atom = ident("atom name");
                        expect(",");
                        std::string obs = ident("observer agent");
                        expect(")");
                        expect(":=");
                        cmd.vis.emplace_back(atom, obs, bool_value());
                    } else {
                        std::string atom = ident("atom name");
                        expect(":=");
                        cmd.sets.emplace_back(atom, bool_value());
                    }
                }
                expect(";");
                ag.commands.push_back(std::move(cmd));
            } else {
                fail("'atoms', 'props', 'init' or 'update'");
            }
        }
        expect("}");
        return ag;
    }

    bool bool_value() {
        std::string v = ident("'T' or 'F'");
        if (v == "T") return true;
        if (v == "F") return false;
        throw Error(ErrorKind::Syntax, "expected 'T' or 'F', got '" + v + "'", cur().line,
                    cur().col);
    }

    std::shared_ptr<RawGuard> guard_or() {
        auto g = guard_and();
        while (cur().text == "|") {
            advance();
            auto n = std::make_shared<RawGuard>();
            n->op = Guard::Op::Or;
            n->lhs = g;
            n->rhs = guard_and();
            g = n;
        }
        return g;
    }

    std::shared_ptr<RawGuard> guard_and() {
        auto g = guard_unary();
        while (cur().text == "&") {
            advance();
            auto n = std::make_shared<RawGuard>();
            n->op = Guard::Op::And;
            n->lhs = g;
            n->rhs = guard_unary();
            g = n;
        }
        return g;
    }

    std::shared_ptr<RawGuard> guard_unary() {
        auto n = std::make_shared<RawGuard>();
        if (cur().text == "!") {
            advance();
            n->op = Guard::Op::Not;
            n->lhs = guard_unary();
            return n;
        }
        if (cur().text == "(") {
            advance();
            auto g = guard_or();
            expect(")");
            return g;
        }
        std::string name = ident("guard atom");
        if (name == "T" || name == "F") {
            n->op = Guard::Op::Const;
            n->value = name == "T";
            return n;
        }
        n->op = Guard::Op::Atom;
        n->atom = name;
        return n;
    }

    std::vector<VTok> toks_;
    size_t pos_ = 0;
};

} // namespace detail

inline Vcgs load_vcgs_text(const std::string& text) {
    detail::VcgsParser parser(text);
    auto blocks = parser.parse();
    if (blocks.empty()) throw Error(ErrorKind::Input, "no agent blocks");
    int envs = 0;
    for (const auto& b : blocks) envs += b.is_env ? 1 : 0;
    if (envs != 1) throw Error(ErrorKind::Input, "exactly one env block is required");
    if (!blocks.back().is_env)
        throw Error(ErrorKind::Input, "the env block must come last");
    for (const auto& b : blocks)
        if (!b.is_env && !b.props.empty())
            throw Error(ErrorKind::Input,
                        "props may only be declared in the env block (agent '" + b.name + "')");

    Vcgs v;
    // Atom table: every name mentioned anywhere, sorted. Undeclared but
    // referenced atoms are kept so well_formedness can report them.
    std::vector<std::string> names;
    for (const auto& b : blocks) {
        names.insert(names.end(), b.atoms.begin(), b.atoms.end());
        names.insert(names.end(), b.props.begin(), b.props.end());
        for (const auto& c : b.commands) {
            auto walk = [&](auto&& self, const std::shared_ptr<detail::RawGuard>& g) -> void {
                if (!g) return;
                if (g->op == Guard::Op::Atom) names.push_back(g->atom);
                self(self, g->lhs);
                self(self, g->rhs);
            };
            walk(walk, c.guard);
            for (const auto& [a, _] : c.sets) names.push_back(a);
            for (const auto& [a, o, _] : c.vis) names.push_back(a);
        }
    }
    v.atom_names = detail::sorted_unique(std::move(names));

    auto atom_id = [&](const std::string& n) { return *v.atom_index(n); };
    std::map<std::string, Idx> agent_id;
    for (Idx i = 0; i < blocks.size(); ++i) {
        if (agent_id.count(blocks[i].name))
            throw Error(ErrorKind::Input, "duplicate agent '" + blocks[i].name + "'");
        agent_id[blocks[i].name] = i;
    }

    for (const auto& b : blocks) {
        AgentSpec spec;
        spec.name = b.name;
        for (const auto& n : b.atoms) spec.atoms.push_back(atom_id(n));
        if (b.is_env)
            for (const auto& n : b.props) {
                Idx id = atom_id(n);
                spec.atoms.push_back(id);
                v.props.push_back(id);
            }
        std::sort(spec.atoms.begin(), spec.atoms.end());
        spec.atoms.erase(std::unique(spec.atoms.begin(), spec.atoms.end()), spec.atoms.end());
        for (const auto& c : b.commands) {
            Command cmd;
            cmd.kind = c.kind;
            auto conv = [&](auto&& self, const std::shared_ptr<detail::RawGuard>& g) -> GuardPtr {
                if (!g) return nullptr;
                switch (g->op) {
                case Guard::Op::Atom: return g_atom(atom_id(g->atom));
                case Guard::Op::Const: return g_const(g->value);
                case Guard::Op::Not: return g_not(self(self, g->lhs));
                default: {
                    auto n = std::make_shared<Guard>();
                    n->op = g->op;
                    n->lhs = self(self, g->lhs);
                    n->rhs = self(self, g->rhs);
                    return n;
                }
                }
            };
            cmd.guard = conv(conv, c.guard);
            for (const auto& [a, val] : c.sets) cmd.sets.push_back({atom_id(a), val});
            for (const auto& [a, obs, val] : c.vis) {
                auto it = agent_id.find(obs);
                if (it == agent_id.end())
                    throw Error(ErrorKind::Input, "vis names unknown agent '" + obs + "'");
                cmd.vis.push_back({atom_id(a), it->second, val});
            }
            spec.commands.push_back(std::move(cmd));
        }
        v.agents.push_back(std::move(spec));
    }
    std::sort(v.props.begin(), v.props.end());
    return v;
}

// ── Canonical save ──────────────────────────────────────────────────────────

namespace detail {

inline void print_guard(const Vcgs& v, const GuardPtr& g, int need, std::string& out) {
    // ! binds tighter than &, which binds tighter than |.
    int lvl = g->op == Guard::Op::Or ? 0 : g->op == Guard::Op::And ? 1 : 2;
    bool parens = lvl < need;
    if (parens) out += '(';
    switch (g->op) {
    case Guard::Op::Atom: out += v.atom_names[g->atom]; break;
    case Guard::Op::Const: out += g->value ? "T" : "F"; break;
    case Guard::Op::Not:
        out += '!';
        print_guard(v, g->lhs, 2, out);
        break;
    case Guard::Op::And:
        print_guard(v, g->lhs, 1, out);
        out += " & ";
        print_guard(v, g->rhs, 2, out);
        break;
    case Guard::Op::Or:
        print_guard(v, g->lhs, 0, out);
        out += " | ";
        print_guard(v, g->rhs, 1, out);
        break;
    }
    if (parens) out += ')';
}

} // namespace detail

inline std::string save_vcgs_text(const Vcgs& v) {
    std::ostringstream out;
    for (Idx a = 0; a < v.agents.size(); ++a) {
        const auto& spec = v.agents[a];
        const bool is_env = a == v.env();
        if (is_env) {
            out << "env";
            if (spec.name != "env") out << ' ' << spec.name;
            out << " {\n";
        } else {
            out << "agent " << spec.name << " {\n";
        }
        out << "  atoms:";
        for (Idx atom : spec.atoms)
            if (!is_env ||
                !std::binary_search(v.props.begin(), v.props.end(), atom))
                out << ' ' << v.atom_names[atom];
        out << ";\n";
        if (is_env && !v.props.empty()) {
            out << "  props:";
            for (Idx p : v.props) out << ' ' << v.atom_names[p];
            out << ";\n";
        }
        for (const auto& cmd : spec.commands) {
            out << "  " << (cmd.kind == CommandKind::Init ? "init" : "update") << ": ";
            std::string g;
            detail::print_guard(v, cmd.guard, 0, g);
            out << g << " ~>";
            bool first = true;
            for (const auto& as : cmd.sets) {
                out << (first ? " " : ", ") << v.atom_names[as.atom] << " := "
                    << (as.value ? 'T' : 'F');
                first = false;
            }
            for (const auto& va : cmd.vis) {
                out << (first ? " " : ", ") << "vis(" << v.atom_names[va.atom] << ", "
                    << v.agents[va.observer].name << ") := " << (va.value ? 'T' : 'F');
                first = false;
            }
            out << ";\n";
        }
        out << "}\n";
    }
    return out.str();
}

} // namespace gamut
