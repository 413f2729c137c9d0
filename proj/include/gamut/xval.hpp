#pragma once

// Cross-validation harness: generate (model, formula) pairs, check the
// formula on the model, compile and unfold the reduction, check the
// duplicated formula there, and record agreement. Calibration runs the
// sweep over the four label configurations and reports which of them reach
// full agreement.
//
// Every record is reproducible from (seed, index): the per-instance seed is
// a mix of the two, so one instance can be replayed in isolation.

#include "gamut/check.hpp"
#include "gamut/gen.hpp"
#include "gamut/model_io.hpp"
#include "gamut/quotient.hpp"
#include "gamut/reduction.hpp"
#include "gamut/semantics.hpp"
#include "gamut/transform.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace gamut {

struct XvalParams {
    std::uint64_t seed = 1;
    int count = 200;
    ReductionConfig config;
    int max_states = 4;
    int max_agents = 2;
    int max_actions = 2;
    size_t unfold_bound = 20000;
    int threads = 1;
    std::string repro_dir; // when nonempty, disagreements are dumped here
};

struct XvalRecord {
    size_t index = 0;
    std::string digest;
    std::string formula;
    bool verdict_model = false;
    bool verdict_reduction = false;
    bool agree = false;
    bool skipped = false; // unfold bound exceeded
};

struct XvalReport {
    ReductionConfig config;
    std::uint64_t seed = 0;
    std::vector<XvalRecord> records;
    size_t agreements = 0;
    size_t disagreements = 0;
    size_t skipped = 0;

    std::optional<double> rate() const {
        size_t n = agreements + disagreements;
        if (n == 0) return std::nullopt;
        return static_cast<double>(agreements) / static_cast<double>(n);
    }
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct XvalInstance {
    Icgs model;
    FormulaPtr formula;
};

inline XvalInstance xval_instance(const XvalParams& xp, size_t index) {
    std::uint64_t s = mix_seed(xp.seed, index);
    GenParams gp;
    gp.seed = s;
    gp.states = 2 + static_cast<int>(s % static_cast<std::uint64_t>(xp.max_states - 1));
    gp.agents = 1 + static_cast<int>((s >> 8) % static_cast<std::uint64_t>(xp.max_agents));
    gp.actions = 2 > xp.max_actions ? xp.max_actions : 2;
    gp.max_classes = 2;
    XvalInstance inst;
    inst.model = gen_model(gp);

    SamplerParams sp;
    sp.seed = s ^ 0x5bf03635ull;
    sp.dialect = Dialect::Atl;
    sp.temporal_depth = 2;
    FormulaSampler sampler(inst.model, sp);
    // Keep the coalition-next shape present throughout the batch.
    inst.formula = index % 5 == 0 ? sampler.sample_nested_next() : sampler.sample();
    return inst;
}

inline void dump_repro(const XvalParams& xp, const XvalRecord& rec, const Icgs& m,
                       const FormulaPtr& f) {
    namespace fs = std::filesystem;
    fs::path dir = fs::path(xp.repro_dir) / ("case_" + std::to_string(rec.index));
    fs::create_directories(dir);
    std::ofstream(dir / "model.icgs") << save_model_text(m);
    std::ofstream(dir / "formula.txt") << print_formula(f) << "\n"
                                       << print_formula(duplicate_next(f, Dialect::Atl))
                                       << "\n";
    std::ofstream cfg(dir / "config.txt");
    cfg << xp.config.describe() << "\nseed " << xp.seed << " index " << rec.index << "\n";
    std::ofstream notes(dir / "README.txt");
    notes << "Disagreement record.\n"
          << "model verdict:     " << (rec.verdict_model ? "true" : "false") << "\n"
          << "reduction verdict: " << (rec.verdict_reduction ? "true" : "false") << "\n"
          << "Replay: gamut xvalidate --seed " << xp.seed << " --count " << xp.count
          << " --index " << rec.index << " [config flags above]\n";
}

} // namespace detail

// Runs one instance; `index` picks it out of the deterministic stream.
inline XvalRecord xval_one(const XvalParams& xp, size_t index) {
    auto inst = detail::xval_instance(xp, index);
    XvalRecord rec;
    rec.index = index;
    rec.digest = model_digest(inst.model);
    rec.formula = print_formula(inst.formula);

    bool model_verdict = true;
    for (Idx s : inst.model.initial)
        model_verdict =
            model_verdict && check_atl(inst.model, s, inst.formula, {}, xp.threads).value;
    rec.verdict_model = model_verdict;

    try {
        Vcgs delta = compile(inst.model, xp.config);
        Unfolded u = unfold(delta, xp.unfold_bound);
        FormulaPtr dup = duplicate_next(inst.formula, Dialect::Atl);
        bool red_verdict = true;
        for (Idx s : u.icgs.initial)
            red_verdict = red_verdict && check_atl(u.icgs, s, dup, {}, xp.threads).value;
        rec.verdict_reduction = red_verdict;
        rec.agree = rec.verdict_model == rec.verdict_reduction;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Resource) throw;
        rec.skipped = true;
    }
    if (!rec.skipped && !rec.agree && !xp.repro_dir.empty())
        detail::dump_repro(xp, rec, inst.model, inst.formula);
    return rec;
}

inline XvalReport run_xvalidate(const XvalParams& xp) {
    XvalReport report;
    report.config = xp.config;
    report.seed = xp.seed;
    for (size_t i = 0; i < static_cast<size_t>(xp.count); ++i) {
        XvalRecord rec = xval_one(xp, i);
        if (rec.skipped)
            ++report.skipped;
        else if (rec.agree)
            ++report.agreements;
        else
            ++report.disagreements;
        report.records.push_back(std::move(rec));
    }
    return report;
}

// The four label configurations, paper-literal first.
inline std::vector<ReductionConfig> calibration_grid() {
    std::vector<ReductionConfig> grid;
    for (auto lm : {LabelMode::Source, LabelMode::Target})
        for (auto im : {InitialLabelMode::None, InitialLabelMode::Initial}) {
            ReductionConfig cfg;
            cfg.label_mode = lm;
            cfg.initial_label_mode = im;
            grid.push_back(cfg);
        }
    return grid;
}

struct CalibrationReport {
    std::vector<XvalReport> runs;      // one per grid configuration
    std::vector<size_t> full_agreement; // indices of runs with rate 1.0
};

inline CalibrationReport run_calibrate(XvalParams base) {
    CalibrationReport cal;
    for (const auto& cfg : calibration_grid()) {
        XvalParams xp = base;
        xp.config = cfg;
        XvalReport rep = run_xvalidate(xp);
        auto rate = rep.rate();
        if (rate && *rate == 1.0) cal.full_agreement.push_back(cal.runs.size());
        cal.runs.push_back(std::move(rep));
    }
    return cal;
}

// Structural fidelity sweep used by tests and the acceptance suite: the
// macro-step quotient of each generated instance must reproduce it.
inline QuotientCheck quotient_of_instance(std::uint64_t seed, int max_states, int max_agents,
                                          int max_actions, const ReductionConfig& cfg,
                                          size_t unfold_bound = 50000) {
    GenParams gp;
    gp.seed = seed;
    gp.states = 2 + static_cast<int>(seed % static_cast<std::uint64_t>(max_states - 1));
    gp.agents = 1 + static_cast<int>((seed >> 8) % static_cast<std::uint64_t>(max_agents));
    gp.actions = 2 + static_cast<int>((seed >> 16) % static_cast<std::uint64_t>(max_actions - 1));
    gp.max_classes = 3;
    Icgs m = gen_model(gp);
    Vcgs v = compile(m, cfg);
    Unfolded u = unfold(v, unfold_bound);
    return macro_quotient_check(m, v, u);
}

} // namespace gamut
