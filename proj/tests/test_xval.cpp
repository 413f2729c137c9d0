#include "gamut/quotient.hpp"
#include "gamut/xval.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

using namespace gamut;

namespace {

ReductionConfig calibrated() {
    ReductionConfig cfg;
    cfg.label_mode = LabelMode::Target;
    cfg.initial_label_mode = InitialLabelMode::Initial;
    return cfg;
}

} // namespace

TEST_CASE("macro quotient reproduces the toggle instance") {
    Icgs m = load_model_text(R"(
agents: a
actions a: L R
states: s0 s1
initial: s0 s1
labels s1: p
indist a: {s0 s1}
trans s0 (L) -> s1
trans s0 (R) -> s0
trans s1 (L) -> s0
trans s1 (R) -> s1
)");
    for (const auto& cfg : calibration_grid()) {
        Vcgs v = compile(m, cfg);
        Unfolded u = unfold(v);
        QuotientCheck qc = macro_quotient_check(m, v, u);
        INFO(cfg.describe() << ": " << qc.detail);
        REQUIRE(qc.ok());
    }
}

TEST_CASE("macro quotient holds on random instances under every configuration") {
    for (std::uint64_t seed = 900; seed < 910; ++seed) {
        QuotientCheck qc = quotient_of_instance(seed, 4, 2, 2, calibrated());
        INFO("seed " << seed << ": " << qc.detail);
        REQUIRE(qc.ok());
    }
    // The quotient is label-independent: the paper-literal configuration
    // must pass as well.
    QuotientCheck qc = quotient_of_instance(901, 4, 2, 2, ReductionConfig{});
    INFO(qc.detail);
    REQUIRE(qc.ok());
}

TEST_CASE("records are reproducible from seed and index") {
    XvalParams xp;
    xp.seed = 42;
    xp.count = 8;
    xp.config = calibrated();
    XvalReport rep = run_xvalidate(xp);
    REQUIRE(rep.records.size() == 8);
    for (const auto& rec : rep.records) {
        XvalRecord again = xval_one(xp, rec.index);
        REQUIRE(again.digest == rec.digest);
        REQUIRE(again.formula == rec.formula);
        REQUIRE(again.verdict_model == rec.verdict_model);
        REQUIRE(again.verdict_reduction == rec.verdict_reduction);
    }
}

TEST_CASE("empty batches have no agreement rate") {
    XvalParams xp;
    xp.count = 0;
    XvalReport rep = run_xvalidate(xp);
    REQUIRE(rep.records.empty());
    REQUIRE(!rep.rate().has_value());
}

TEST_CASE("calibration finds the aligned configuration") {
    XvalParams xp;
    xp.seed = 7;
    xp.count = 40;
    CalibrationReport cal = run_calibrate(xp);
    REQUIRE(cal.runs.size() == 4);

    // The target-labels + initial-labels configuration tracks the source
    // structure tick for tick; it must agree everywhere.
    size_t aligned = SIZE_MAX;
    for (size_t i = 0; i < cal.runs.size(); ++i) {
        const auto& cfg = cal.runs[i].config;
        if (cfg.label_mode == LabelMode::Target &&
            cfg.initial_label_mode == InitialLabelMode::Initial)
            aligned = i;
    }
    REQUIRE(aligned != SIZE_MAX);
    INFO("aligned run disagreements: " << cal.runs[aligned].disagreements);
    REQUIRE(cal.runs[aligned].rate().has_value());
    REQUIRE(*cal.runs[aligned].rate() == 1.0);
    REQUIRE(std::find(cal.full_agreement.begin(), cal.full_agreement.end(), aligned) !=
            cal.full_agreement.end());

    // The paper-literal configuration lags the labels by a step; the batch
    // contains formulas that expose it.
    size_t literal = SIZE_MAX;
    for (size_t i = 0; i < cal.runs.size(); ++i) {
        const auto& cfg = cal.runs[i].config;
        if (cfg.label_mode == LabelMode::Source &&
            cfg.initial_label_mode == InitialLabelMode::None)
            literal = i;
    }
    REQUIRE(literal != SIZE_MAX);
    REQUIRE(cal.runs[literal].rate().has_value());
    REQUIRE(*cal.runs[literal].rate() < 1.0);
}

TEST_CASE("disagreements dump a repro bundle that replays") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "gamut_repro_test";
    fs::remove_all(dir);

    // A mis-set configuration produces disagreements quickly.
    XvalParams xp;
    xp.seed = 7;
    xp.count = 40;
    xp.repro_dir = dir.string();
    XvalReport rep = run_xvalidate(xp); // paper-literal default config
    REQUIRE(rep.disagreements > 0);
    size_t bundles = 0;
    for (const auto& rec : rep.records) {
        if (rec.agree || rec.skipped) continue;
        ++bundles;
        fs::path cas = dir / ("case_" + std::to_string(rec.index));
        REQUIRE(fs::exists(cas / "model.icgs"));
        REQUIRE(fs::exists(cas / "formula.txt"));
        // The bundle reproduces in isolation.
        XvalRecord again = xval_one(xp, rec.index);
        REQUIRE(again.agree == rec.agree);
        REQUIRE(again.verdict_model == rec.verdict_model);
        REQUIRE(again.verdict_reduction == rec.verdict_reduction);
    }
    REQUIRE(bundles == rep.disagreements);
    fs::remove_all(dir);
}
