#include "gamut/formula.hpp"
#include "gamut/parser.hpp"
#include "gamut/transform.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace gamut;

namespace {

// Seeded random formula generator used by the round-trip and transform-law
// properties. Raw mt19937 draws with modulo keep it reproducible across
// platforms.
struct FormulaGen {
    std::mt19937 rng;
    std::vector<std::string> atoms{"p", "q"};
    std::vector<std::vector<std::string>> coalitions{{}, {"a"}, {"b"}, {"a", "b"}};

    explicit FormulaGen(unsigned seed) : rng(seed) {}

    unsigned pick(unsigned n) { return static_cast<unsigned>(rng() % n); }

    FormulaPtr state(Dialect d, int depth) {
        unsigned r = depth <= 0 ? pick(3) : pick(7);
        switch (r) {
        case 0: return f_atom(atoms[pick(static_cast<unsigned>(atoms.size()))]);
        case 1: return f_const(pick(2) == 0);
        case 2: return f_atom(atoms[pick(static_cast<unsigned>(atoms.size()))]);
        case 3: return f_not(state(d, depth - 1));
        case 4: return f_and(state(d, depth - 1), state(d, depth - 1));
        case 5: return f_or(state(d, depth - 1), state(d, depth - 1));
        default: {
            auto coal = coalitions[pick(static_cast<unsigned>(coalitions.size()))];
            return f_coalition(coal, path(d, depth - 1));
        }
        }
    }

    FormulaPtr path(Dialect d, int depth) {
        if (d == Dialect::Atl) {
            switch (pick(3)) {
            case 0: return f_x(state(d, depth));
            case 1: return f_g(state(d, depth));
            default: return f_u(state(d, depth), state(d, depth));
            }
        }
        unsigned r = depth <= 0 ? 4 : pick(5);
        switch (r) {
        case 0: return f_x(path(d, depth - 1));
        case 1: return f_g(path(d, depth - 1));
        case 2: return f_f(path(d, depth - 1));
        case 3: return f_u(path(d, depth - 1), path(d, depth - 1));
        default: return state(d, depth - 1);
        }
    }
};

} // namespace

TEST_CASE("parser handles the grammar base cases") {
    auto f = parse_formula("<<a>> X p", Dialect::Atl);
    REQUIRE(f->op == FOp::Coalition);
    REQUIRE(f->agents == std::vector<std::string>{"a"});
    REQUIRE(f->lhs->op == FOp::X);
    REQUIRE(f->lhs->lhs->op == FOp::Atom);
    REQUIRE(f->lhs->lhs->atom == "p");

    auto nested = parse_formula("<<a>> X <<a>> X p", Dialect::Atl);
    REQUIRE(nested->op == FOp::Coalition);
    REQUIRE(nested->lhs->op == FOp::X);
    REQUIRE(nested->lhs->lhs->op == FOp::Coalition);

    // Same string, parsed with general coalition names.
    auto general = parse_formula("<<A>> X <<A>> X p", Dialect::Atl);
    REQUIRE(print_formula(general) == "<<A>> X <<A>> X p");
}

TEST_CASE("dialect violations are distinct from syntax errors") {
    REQUIRE_THROWS_MATCHES(parse_formula("X X p", Dialect::Atl), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == ErrorKind::Dialect; }));
    REQUIRE_THROWS_MATCHES(parse_formula("<<a>> X X p", Dialect::Atl), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == ErrorKind::Dialect; }));
    REQUIRE_THROWS_MATCHES(parse_formula("<<a>> X (p", Dialect::Atl), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == ErrorKind::Syntax; }));
    REQUIRE_THROWS_MATCHES(parse_formula("p &", Dialect::AtlStar), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == ErrorKind::Syntax; }));
    // ATL* allows nested path operators under one coalition.
    REQUIRE_NOTHROW(parse_formula("<<a>> X X p", Dialect::AtlStar));
    // But bare path operators at the top stay illegal.
    REQUIRE_THROWS_MATCHES(parse_formula("X p", Dialect::AtlStar), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == ErrorKind::Dialect; }));
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parse_formula("p &\n  & q", Dialect::Atl);
        FAIL("expected syntax error");
    } catch (const Error& e) {
        REQUIRE(e.kind() == ErrorKind::Syntax);
        REQUIRE(e.line() == 2);
        REQUIRE(e.column() == 3);
    }
}

TEST_CASE("printing uses minimal parentheses") {
    REQUIRE(print_formula(f_atom("p")) == "p");
    REQUIRE(print_formula(f_and(f_or(f_atom("p"), f_atom("q")), f_atom("r"))) ==
            "(p | q) & r");
    REQUIRE(print_formula(f_or(f_atom("p"), f_and(f_atom("q"), f_atom("r")))) ==
            "p | q & r");
    // U is right-associative; a left-nested U needs parentheses.
    auto left = f_coalition({"a"}, f_u(f_u(f_atom("p"), f_atom("q")), f_atom("r")));
    REQUIRE(print_formula(left) == "<<a>> (p U q) U r");
    auto right = f_coalition({"a"}, f_u(f_atom("p"), f_u(f_atom("q"), f_atom("r"))));
    REQUIRE(print_formula(right) == "<<a>> p U q U r");
}

TEST_CASE("F is sugar for true U in the ATL dialect") {
    auto f = parse_formula("<<a>> F p", Dialect::Atl);
    REQUIRE(f->lhs->op == FOp::U);
    REQUIRE(f->lhs->lhs->op == FOp::True);
    auto g = parse_formula("<<a>> F p", Dialect::AtlStar);
    REQUIRE(g->lhs->op == FOp::F);
}

TEST_CASE("parse/print round-trips on random formulas") {
    for (auto dialect : {Dialect::Atl, Dialect::AtlStar}) {
        FormulaGen gen(dialect == Dialect::Atl ? 11u : 12u);
        for (int i = 0; i < 600; ++i) {
            FormulaPtr f = gen.state(dialect, 4);
            std::string text = print_formula(f);
            INFO(text);
            FormulaPtr back = parse_formula(text, dialect);
            REQUIRE(equal(f, back));
        }
    }
}

TEST_CASE("subformula closure is children-first and distinct") {
    auto f = parse_formula("<<a>> X p", Dialect::Atl);
    auto cl = subformula_closure(f);
    REQUIRE(cl.size() == 3);
    REQUIRE(print_formula(cl[0]) == "p");
    REQUIRE(print_formula(cl[1]) == "X p");
    REQUIRE(print_formula(cl[2]) == "<<a>> X p");

    auto u = parse_formula("<<a>> (p U q)", Dialect::Atl);
    auto cu = subformula_closure(u);
    REQUIRE(cu.size() == 4);
    REQUIRE(print_formula(cu[0]) == "p");
    REQUIRE(print_formula(cu[1]) == "q");
    REQUIRE(print_formula(cu[2]) == "p U q");
    REQUIRE(print_formula(cu[3]) == "<<a>> p U q");

    REQUIRE(subformula_closure(f_atom("p")).size() == 1);
}

TEST_CASE("duplicate_next on the proof examples") {
    // ATL*: X p becomes X X p.
    auto xp = parse_formula("<<>> X p", Dialect::AtlStar);
    auto xxp = duplicate_next(xp, Dialect::AtlStar);
    REQUIRE(print_formula(xxp) == "<<>> X X p");

    // ATL: the coalition-next is duplicated with the same coalition.
    auto cx = parse_formula("<<a>> X p", Dialect::Atl);
    REQUIRE(print_formula(duplicate_next(cx, Dialect::Atl)) == "<<a>> X <<a>> X p");

    // No next operators: identity.
    auto gq = parse_formula("p & <<a>> G q", Dialect::Atl);
    REQUIRE(equal(duplicate_next(gq, Dialect::Atl), gq));

    // Nested X duplicates independently: X X p -> X X X X p.
    auto xx = parse_formula("<<a>> X X p", Dialect::AtlStar);
    REQUIRE(print_formula(duplicate_next(xx, Dialect::AtlStar)) == "<<a>> X X X X p");
}

TEST_CASE("duplicate_next laws on random formulas") {
    SECTION("ATL*: X count exactly doubles, dialect preserved") {
        FormulaGen gen(21);
        for (int i = 0; i < 500; ++i) {
            FormulaPtr f = gen.state(Dialect::AtlStar, 4);
            FormulaPtr d = duplicate_next(f, Dialect::AtlStar);
            REQUIRE(count_op(d, FOp::X) == 2 * count_op(f, FOp::X));
            REQUIRE(conforms(d, Dialect::AtlStar));
        }
    }
    SECTION("ATL: coalition-next doubles, G and U preserved, dialect preserved") {
        FormulaGen gen(22);
        for (int i = 0; i < 500; ++i) {
            FormulaPtr f = gen.state(Dialect::Atl, 4);
            FormulaPtr d = duplicate_next(f, Dialect::Atl);
            REQUIRE(count_coalition_next(d) == 2 * count_coalition_next(f));
            REQUIRE(count_op(d, FOp::G) == count_op(f, FOp::G));
            REQUIRE(count_op(d, FOp::U) == count_op(f, FOp::U));
            REQUIRE(conforms(d, Dialect::Atl));
        }
    }
    SECTION("idempotent on X-free formulas") {
        FormulaGen gen(23);
        int seen = 0;
        for (int i = 0; i < 400 && seen < 50; ++i) {
            FormulaPtr f = gen.state(Dialect::Atl, 3);
            if (count_op(f, FOp::X) != 0) continue;
            ++seen;
            REQUIRE(equal(duplicate_next(f, Dialect::Atl), f));
        }
        REQUIRE(seen == 50);
    }
}

TEST_CASE("duplicate_next preserves coalitions on non-next modalities") {
    FormulaGen gen(31);
    auto non_next_coalitions = [](const FormulaPtr& f) {
        std::vector<std::vector<std::string>> out;
        auto visit = [&](auto&& self, const FormulaPtr& n) -> void {
            if (n->op == FOp::Coalition && n->lhs->op != FOp::X) out.push_back(n->agents);
            if (n->lhs) self(self, n->lhs);
            if (n->rhs) self(self, n->rhs);
        };
        visit(visit, f);
        std::sort(out.begin(), out.end());
        return out;
    };
    for (int i = 0; i < 300; ++i) {
        FormulaPtr f = gen.state(Dialect::Atl, 4);
        FormulaPtr d = duplicate_next(f, Dialect::Atl);
        REQUIRE(non_next_coalitions(d) == non_next_coalitions(f));
    }
}
