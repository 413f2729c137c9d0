// Acceptance suite: one case per release criterion, each printing a
// pass/fail line with its runtime. Run via ctest or directly with -s.

#include "gamut/check.hpp"
#include "gamut/gen.hpp"
#include "gamut/model_io.hpp"
#include "gamut/oracle.hpp"
#include "gamut/parser.hpp"
#include "gamut/quotient.hpp"
#include "gamut/reduction.hpp"
#include "gamut/semantics.hpp"
#include "gamut/transform.hpp"
#include "gamut/xval.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace gamut;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void verdict_line(int n, const char* name, bool pass, double secs) {
    std::ostringstream line;
    line << "criterion " << n << " (" << name << "): " << (pass ? "PASS" : "FAIL") << " in "
         << secs << "s";
    std::cout << line.str() << std::endl;
}

std::string model_file(const char* name) {
    return std::string(GAMUT_MODELS_DIR) + "/" + name;
}

Icgs load_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_model_text(ss.str());
}

ReductionConfig calibrated() {
    ReductionConfig cfg;
    cfg.label_mode = LabelMode::Target;
    cfg.initial_label_mode = InitialLabelMode::Initial;
    return cfg;
}

} // namespace

TEST_CASE("criterion 1: reduction size law") {
    Stopwatch sw;
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 100 && ok; ++seed) {
        GenParams gp;
        gp.seed = seed * 101;
        gp.states = 2 + static_cast<int>(seed % 4);          // up to 5
        gp.agents = 1 + static_cast<int>(seed % 2);          // up to 2
        gp.actions = 2 + static_cast<int>((seed >> 3) % 2);  // up to 3
        gp.max_classes = 3;
        Icgs m = gen_model(gp);
        SizeReport r = size_report(compile(m));

        size_t expect_atoms = 0;
        for (Idx a = 0; a < m.agents.size(); ++a)
            expect_atoms += m.actions[a].size() + 1;
        expect_atoms += m.states.size();
        for (Idx a = 0; a < m.agents.size(); ++a) expect_atoms += m.classes[a].size();
        expect_atoms += 1;
        if (r.total_atoms() != expect_atoms) {
            ok = false;
            detail = "atom count mismatch at seed " + std::to_string(gp.seed);
        }
        size_t joint_product = 1;
        for (Idx a = 0; a < m.agents.size(); ++a) {
            size_t idx = r.owner_index(m.agents[a]);
            size_t expect_updates = m.actions[a].size() * m.classes[a].size() + 1;
            if (r.updates[idx] != expect_updates || r.atoms[idx] != m.actions[a].size() + 1) {
                ok = false;
                detail = "agent counts mismatch at seed " + std::to_string(gp.seed);
            }
            joint_product *= m.actions[a].size();
        }
        size_t env = r.owner_index("env");
        if (r.updates[env] != m.states.size() * joint_product + 1) {
            ok = false;
            detail = "environment update count mismatch at seed " + std::to_string(gp.seed);
        }
    }
    double secs = sw.seconds();
    verdict_line(1, "reduction size law", ok && secs < 5.0, secs);
    INFO(detail);
    REQUIRE(ok);
    REQUIRE(secs < 5.0);
}

TEST_CASE("criterion 2: structural fidelity of the macro quotient") {
    Stopwatch sw;
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 50 && ok; ++seed) {
        QuotientCheck qc = quotient_of_instance(seed * 977, 5, 2, 3, calibrated());
        if (!qc.ok()) {
            ok = false;
            detail = "seed " + std::to_string(seed * 977) + ": " + qc.detail;
        }
    }
    double secs = sw.seconds();
    verdict_line(2, "structural fidelity", ok && secs < 60.0, secs);
    INFO(detail);
    REQUIRE(ok);
    REQUIRE(secs < 60.0);
}

TEST_CASE("criterion 3: equivalence at desk scale") {
    Stopwatch sw;
    namespace fs = std::filesystem;
    fs::path repro = fs::temp_directory_path() / "gamut_acceptance_repro";
    fs::remove_all(repro);

    XvalParams cal_params;
    cal_params.seed = 20250809;
    cal_params.count = 200;
    cal_params.repro_dir = (repro / "calibrate").string();
    CalibrationReport cal = run_calibrate(cal_params);
    bool found = !cal.full_agreement.empty();

    bool fresh_ok = false;
    if (found) {
        XvalParams xp;
        xp.seed = 977001;
        xp.count = 200;
        xp.config = cal.runs[cal.full_agreement.front()].config;
        xp.repro_dir = (repro / "fresh").string();
        XvalReport rep = run_xvalidate(xp);
        fresh_ok = rep.rate().has_value() && *rep.rate() == 1.0 && rep.skipped == 0;
    }
    double secs = sw.seconds();
    bool ok = found && fresh_ok;
    verdict_line(3, "reduction equivalence", ok && secs < 600.0, secs);
    if (!ok)
        std::cout << "  disagreement bundles (if any) kept under " << repro.string() << "\n";
    REQUIRE(found);
    REQUIRE(fresh_ok);
    REQUIRE(secs < 600.0);
    fs::remove_all(repro);
}

TEST_CASE("criterion 4: checker agrees with the oracle") {
    Stopwatch sw;
    bool ok = true;
    std::string detail;
    int checked = 0;
    std::uint64_t seed = 0;
    while (checked < 200 && ok && seed < 4000) {
        ++seed;
        GenParams gp;
        gp.seed = seed * 31 + 7;
        gp.states = 2 + static_cast<int>(seed % 3); // up to 4
        gp.agents = 1 + static_cast<int>(seed % 2);
        gp.actions = 2;
        gp.max_classes = 2;
        Icgs m = gen_model(gp);

        SamplerParams sp;
        sp.seed = gp.seed ^ 0xabcdef;
        sp.dialect = seed % 2 ? Dialect::Atl : Dialect::AtlStar;
        sp.temporal_depth = 2;
        FormulaSampler sampler(m, sp);
        FormulaPtr f = sampler.sample();

        bool main = sp.dialect == Dialect::Atl ? check_atl(m, 0, f).value
                                               : check_atlstar(m, 0, f).value;
        bool ref;
        try {
            ref = oracle_check(m, 0, f, sp.dialect);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Resource) continue; // outside oracle caps
            throw;
        }
        if (main != ref) {
            ok = false;
            detail = "seed " + std::to_string(gp.seed) + " formula " + print_formula(f);
        }
        ++checked;
    }
    double secs = sw.seconds();
    bool complete = checked == 200;
    verdict_line(4, "oracle agreement", ok && complete && secs < 300.0, secs);
    INFO(detail);
    REQUIRE(ok);
    REQUIRE(complete);
    REQUIRE(secs < 300.0);
}

TEST_CASE("criterion 5: perfect-information collapse") {
    Stopwatch sw;
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 100 && ok; ++seed) {
        GenParams gp;
        gp.seed = seed * 131;
        gp.states = 2 + static_cast<int>(seed % 4); // up to 5
        gp.agents = 1 + static_cast<int>(seed % 2);
        gp.actions = 2;
        gp.max_classes = 0; // identity partitions
        Icgs m = gen_model(gp);

        SamplerParams sp;
        sp.seed = gp.seed ^ 0x5151;
        sp.dialect = Dialect::Atl;
        sp.allow_nested_next = false; // committed-chain semantics is not the classic one
        FormulaSampler sampler(m, sp);
        FormulaPtr f = sampler.sample();

        Oracle::Caps caps;
        caps.max_states = 6;
        Oracle oracle(m, caps);
        auto pi = oracle.eval_perfect_info(f);
        auto main = eval_state_set(m, f, CheckConfig{});
        for (Idx s = 0; s < m.states.size(); ++s)
            if (static_cast<bool>(main[s]) != static_cast<bool>(pi[s])) {
                ok = false;
                detail = "seed " + std::to_string(gp.seed) + " state " + m.states[s] +
                         " formula " + print_formula(f);
            }
    }
    double secs = sw.seconds();
    verdict_line(5, "perfect-information collapse", ok && secs < 60.0, secs);
    INFO(detail);
    REQUIRE(ok);
    REQUIRE(secs < 60.0);
}

TEST_CASE("criterion 6: uniformity witness") {
    Stopwatch sw;
    Icgs gadget = load_file(model_file("gadget.icgs"));
    FormulaPtr f = parse_formula("<<a>> X <<a>> X win", Dialect::Atl);
    Idx q0 = *gadget.state_index("q0");

    Icgs pi = gadget;
    for (Idx a = 0; a < pi.agents.size(); ++a) {
        pi.classes[a].clear();
        for (Idx s = 0; s < pi.states.size(); ++s) {
            pi.class_of[a][s] = s;
            pi.classes[a].push_back({s});
        }
    }

    bool ok = true;
    for (int threads : {1, 2, 8}) {
        if (check_atl(gadget, q0, f, {}, threads).value) ok = false;
        if (!check_atl(pi, q0, f, {}, threads).value) ok = false;
    }
    double secs = sw.seconds();
    verdict_line(6, "uniformity witness", ok && secs < 1.0, secs);
    REQUIRE(ok);
    REQUIRE(secs < 1.0);
}

TEST_CASE("criterion 7: formula transform laws") {
    Stopwatch sw;
    bool ok = true;
    std::string detail;
    std::vector<std::string> agents{"a", "b"};

    SamplerParams star;
    star.seed = 424242;
    star.dialect = Dialect::AtlStar;
    star.temporal_depth = 3;
    FormulaSampler star_sampler(agents, star);
    for (int i = 0; i < 500 && ok; ++i) {
        FormulaPtr f = star_sampler.sample();
        FormulaPtr d = duplicate_next(f, Dialect::AtlStar);
        if (count_op(d, FOp::X) != 2 * count_op(f, FOp::X)) {
            ok = false;
            detail = "X count: " + print_formula(f);
        }
        FormulaPtr back = parse_formula(print_formula(f), Dialect::AtlStar);
        if (!equal(back, f)) {
            ok = false;
            detail = "round-trip: " + print_formula(f);
        }
    }

    SamplerParams atl;
    atl.seed = 434343;
    atl.dialect = Dialect::Atl;
    atl.temporal_depth = 3;
    FormulaSampler atl_sampler(agents, atl);
    for (int i = 0; i < 500 && ok; ++i) {
        FormulaPtr f = atl_sampler.sample();
        FormulaPtr d = duplicate_next(f, Dialect::Atl);
        if (count_coalition_next(d) != 2 * count_coalition_next(f)) {
            ok = false;
            detail = "coalition-next count: " + print_formula(f);
        }
        if (count_op(d, FOp::G) != count_op(f, FOp::G) ||
            count_op(d, FOp::U) != count_op(f, FOp::U)) {
            ok = false;
            detail = "G/U preservation: " + print_formula(f);
        }
        FormulaPtr back = parse_formula(print_formula(f), Dialect::Atl);
        if (!equal(back, f)) {
            ok = false;
            detail = "round-trip: " + print_formula(f);
        }
    }
    double secs = sw.seconds();
    verdict_line(7, "formula transform laws", ok && secs < 5.0, secs);
    INFO(detail);
    REQUIRE(ok);
    REQUIRE(secs < 5.0);
}

TEST_CASE("criterion 8: information monotonicity") {
    Stopwatch sw;
    bool ok = true;
    std::string detail;
    int checked = 0;
    std::uint64_t seed = 0;
    while (checked < 100 && ok && seed < 2000) {
        ++seed;
        GenParams gp;
        gp.seed = seed * 53 + 11;
        gp.states = 3 + static_cast<int>(seed % 2);
        gp.agents = 1 + static_cast<int>(seed % 2);
        gp.actions = 2;
        gp.max_classes = 2;
        Icgs m = gen_model(gp);

        RawIcgs raw = parse_model_text(save_model_text(m));
        bool split = false;
        for (auto& [agent, blocks] : raw.indist) {
            for (auto& block : blocks) {
                if (block.size() < 2) continue;
                std::vector<std::string> half(block.begin() + block.size() / 2, block.end());
                block.resize(block.size() / 2);
                blocks.push_back(half);
                split = true;
                break;
            }
            if (split) break;
        }
        if (!split) continue;
        Icgs refined = build_icgs(raw);

        SamplerParams sp;
        sp.seed = gp.seed ^ 0x7777;
        sp.dialect = Dialect::Atl;
        sp.coalition_positive = true;
        FormulaSampler sampler(m, sp);
        FormulaPtr f = sampler.sample();
        if (f->op != FOp::Coalition) continue;

        auto before = eval_state_set(m, f, CheckConfig{});
        auto after = eval_state_set(refined, f, CheckConfig{});
        for (Idx s = 0; s < m.states.size(); ++s)
            if (before[s] && !after[s]) {
                ok = false;
                detail = "seed " + std::to_string(gp.seed) + " state " + m.states[s] +
                         " formula " + print_formula(f);
            }
        ++checked;
    }
    double secs = sw.seconds();
    bool complete = checked == 100;
    verdict_line(8, "information monotonicity", ok && complete && secs < 120.0, secs);
    INFO(detail);
    REQUIRE(ok);
    REQUIRE(complete);
    REQUIRE(secs < 120.0);
}
