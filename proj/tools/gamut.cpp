// Command-line front end: compile models to guarded-command structures,
// unfold them back, check formulas, generate random instances, and run the
// cross-validation and calibration sweeps.
//
// Exit codes: 0 success or verdict true, 1 verdict false or disagreement,
// 2 usage, 3 input error, 4 resource bound exceeded.

#include "gamut/check.hpp"
#include "gamut/gen.hpp"
#include "gamut/model_io.hpp"
#include "gamut/oracle.hpp"
#include "gamut/parser.hpp"
#include "gamut/quotient.hpp"
#include "gamut/reduction.hpp"
#include "gamut/semantics.hpp"
#include "gamut/transform.hpp"
#include "gamut/vcgs_io.hpp"
#include "gamut/xval.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace gamut;
using nlohmann::json;

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Resource: return 4;
    default: return 3;
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Input, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Input, "cannot write '" + path + "'");
    out << content;
}

std::string swap_ext(const std::string& path, const std::string& ext) {
    auto slash = path.find_last_of('/');
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + ext;
    return path.substr(0, dot) + ext;
}

Icgs load_validated_model(const std::string& path) {
    std::vector<std::string> warnings;
    Icgs m = load_model_text(slurp(path), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    auto report = validate_icgs(m);
    if (!report.clean()) {
        for (const auto& v : report.violations)
            std::cerr << path << ": " << v.code << ": " << v.message << "\n";
        throw Error(ErrorKind::Input, "model does not validate");
    }
    return m;
}

Icgs identity_partitions(const Icgs& m) {
    Icgs out = m;
    for (Idx a = 0; a < m.agents.size(); ++a) {
        out.classes[a].clear();
        out.class_of[a].resize(m.states.size());
        for (Idx s = 0; s < m.states.size(); ++s) {
            out.class_of[a][s] = s;
            out.classes[a].push_back({s});
        }
    }
    return out;
}

struct ConfigFlags {
    std::string label_mode = "source";
    std::string initial_labels = "none";
    std::string protocol_mode = "full";

    void attach(CLI::App* cmd) {
        cmd->add_option("--label-mode", label_mode, "move commands assert source|target labels")
            ->check(CLI::IsMember({"source", "target"}));
        cmd->add_option("--initial-labels", initial_labels,
                        "state-choice commands assert labels: none|initial")
            ->check(CLI::IsMember({"none", "initial"}));
        cmd->add_option("--protocol-mode", protocol_mode,
                        "action commands per class: full|restrict")
            ->check(CLI::IsMember({"full", "restrict"}));
    }
    ReductionConfig value() const {
        ReductionConfig cfg;
        cfg.label_mode = label_mode == "target" ? LabelMode::Target : LabelMode::Source;
        cfg.initial_label_mode = initial_labels == "initial" ? InitialLabelMode::Initial
                                                             : InitialLabelMode::None;
        cfg.protocol_mode =
            protocol_mode == "restrict" ? ProtocolMode::Restrict : ProtocolMode::Full;
        return cfg;
    }
};

json config_json(const ReductionConfig& cfg) {
    return json{{"label_mode", cfg.label_mode == LabelMode::Target ? "target" : "source"},
                {"initial_label_mode",
                 cfg.initial_label_mode == InitialLabelMode::Initial ? "initial" : "none"},
                {"protocol_mode",
                 cfg.protocol_mode == ProtocolMode::Restrict ? "restrict" : "full"}};
}

json report_json(const XvalReport& rep, int count) {
    json records = json::array();
    for (const auto& r : rep.records)
        records.push_back({{"index", r.index},
                           {"model_digest", r.digest},
                           {"formula", r.formula},
                           {"verdict_model", r.verdict_model},
                           {"verdict_reduction", r.verdict_reduction},
                           {"agree", r.agree},
                           {"skipped", r.skipped}});
    json j{{"seed", rep.seed},
           {"count", count},
           {"config", config_json(rep.config)},
           {"agreements", rep.agreements},
           {"disagreements", rep.disagreements},
           {"skipped", rep.skipped},
           {"records", std::move(records)}};
    auto rate = rep.rate();
    if (rate)
        j["agreement_rate"] = *rate;
    else
        j["agreement_rate"] = nullptr;
    return j;
}

std::string rate_text(const XvalReport& rep) {
    auto rate = rep.rate();
    if (!rate) return "n/a";
    std::ostringstream ss;
    ss << *rate;
    return ss.str();
}

void print_size_report(const SizeReport& r) {
    std::cout << "atoms " << r.total_atoms() << " (+" << r.props << " propositions)\n";
    for (size_t i = 0; i < r.owners.size(); ++i)
        std::cout << "  " << r.owners[i] << ": atoms " << r.atoms[i] << ", init " << r.inits[i]
                  << ", update " << r.updates[i] << "\n";
}

// ── Subcommand bodies ───────────────────────────────────────────────────────

int cmd_compile(const std::string& in, std::string out, const ConfigFlags& flags) {
    Icgs m = load_validated_model(in);
    Vcgs v = compile(m, flags.value());
    if (out.empty()) out = swap_ext(in, ".vcgs");
    spill(out, save_vcgs_text(v));
    print_size_report(size_report(v));
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_unfold(const std::string& in, std::string out, size_t bound) {
    Vcgs v = load_vcgs_text(slurp(in));
    auto wf = well_formedness(v);
    for (const auto& w : wf.warnings)
        std::cerr << "warning: " << w.code << ": " << w.message << "\n";
    if (!wf.clean()) {
        for (const auto& viol : wf.violations)
            std::cerr << in << ": " << viol.code << ": " << viol.message << "\n";
        throw Error(ErrorKind::Input, "structure is not well-formed");
    }
    Unfolded u = unfold(v, bound);
    if (out.empty()) out = swap_ext(in, ".unfolded.icgs");
    spill(out, save_model_text(u.icgs));
    std::cout << "states " << u.icgs.states.size() << "\n";
    std::cout << "edges " << u.icgs.transition.size() << "\n";
    std::cout << "initial " << u.icgs.initial.size() << "\n";
    for (Idx ia = 0; ia < u.icgs.agents.size(); ++ia) {
        Idx va = u.vcgs_agent_of[ia];
        if (va == v.env()) continue;
        size_t active = 0;
        for (Idx s = 0; s < u.icgs.states.size(); ++s)
            if (!enabled_commands(v, u.globals[s], va).empty()) ++active;
        std::cout << "active states for " << u.icgs.agents[ia] << ": " << active << "\n";
    }
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_check(const std::string& in, const std::string& formula_text,
              const std::string& dialect_name, const std::string& state_name, bool vcgs_input,
              bool perfect_info, int threads, size_t bound) {
    Dialect dialect = dialect_name == "atlstar" || dialect_name == "atl*" ? Dialect::AtlStar
                                                                          : Dialect::Atl;
    FormulaPtr f = parse_formula(formula_text, dialect);

    Icgs m;
    bool from_vcgs =
        vcgs_input || (in.size() > 5 && in.substr(in.size() - 5) == ".vcgs");
    if (from_vcgs) {
        Vcgs v = load_vcgs_text(slurp(in));
        auto wf = well_formedness(v);
        if (!wf.clean())
            throw Error(ErrorKind::Input,
                        "structure is not well-formed: " + wf.violations.front().message);
        m = unfold(v, bound).icgs;
    } else {
        m = load_validated_model(in);
    }
    if (perfect_info) m = identity_partitions(m);

    std::vector<Idx> targets;
    if (!state_name.empty()) {
        auto s = m.state_index(state_name);
        if (!s) throw Error(ErrorKind::Input, "unknown state '" + state_name + "'");
        targets.push_back(*s);
    } else {
        if (m.initial.empty()) throw Error(ErrorKind::Input, "model has no initial states");
        targets = m.initial;
    }

    bool verdict = true;
    std::vector<std::string> witnesses;
    for (Idx s : targets) {
        Verdict v = dialect == Dialect::Atl ? check_atl(m, s, f, {}, threads)
                                            : check_atlstar(m, s, f, {}, threads);
        verdict = verdict && v.value;
        if (v.value && v.witness) witnesses.push_back(m.states[s] + ": " + *v.witness);
    }
    std::cout << (verdict ? "true" : "false") << "\n";
    if (verdict)
        for (const auto& w : witnesses) std::cout << "witness " << w << "\n";
    return verdict ? 0 : 1;
}

int cmd_gen(const GenParams& gp, std::string out) {
    Icgs m = gen_model(gp);
    auto report = validate_icgs(m);
    if (!report.clean())
        throw Error(ErrorKind::Input, "generated model failed validation (internal)");
    if (out.empty()) out = "gen-" + std::to_string(gp.seed) + ".icgs";
    spill(out, save_model_text(m));
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_xvalidate(XvalParams xp, std::optional<size_t> index, bool as_json) {
    if (index) {
        XvalRecord rec = xval_one(xp, *index);
        if (as_json) {
            XvalReport one;
            one.config = xp.config;
            one.seed = xp.seed;
            if (rec.skipped)
                ++one.skipped;
            else if (rec.agree)
                ++one.agreements;
            else
                ++one.disagreements;
            one.records.push_back(rec);
            std::cout << report_json(one, 1).dump(2) << "\n";
        } else {
            std::cout << "index " << rec.index << " digest " << rec.digest << " formula \""
                      << rec.formula << "\"\n";
            if (rec.skipped)
                std::cout << "skipped (unfold bound)\n";
            else
                std::cout << "model " << (rec.verdict_model ? "true" : "false") << ", reduction "
                          << (rec.verdict_reduction ? "true" : "false") << ", "
                          << (rec.agree ? "agree" : "DISAGREE") << "\n";
        }
        return rec.skipped || rec.agree ? 0 : 1;
    }

    XvalReport rep = run_xvalidate(xp);
    if (as_json) {
        std::cout << report_json(rep, xp.count).dump(2) << "\n";
    } else {
        std::cout << "config: " << xp.config.describe() << "\n";
        std::cout << "instances " << rep.records.size() << ", agree " << rep.agreements
                  << ", disagree " << rep.disagreements << ", skipped " << rep.skipped << "\n";
        std::cout << "agreement rate: " << rate_text(rep) << "\n";
        for (const auto& rec : rep.records)
            if (!rec.agree && !rec.skipped)
                std::cout << "DISAGREE at index " << rec.index << ": \"" << rec.formula
                          << "\" model=" << (rec.verdict_model ? "true" : "false")
                          << " reduction=" << (rec.verdict_reduction ? "true" : "false")
                          << "\n";
    }
    return rep.disagreements == 0 ? 0 : 1;
}

int cmd_calibrate(XvalParams base, bool as_json) {
    CalibrationReport cal = run_calibrate(base);
    if (as_json) {
        json runs = json::array();
        for (const auto& rep : cal.runs) runs.push_back(report_json(rep, base.count));
        json winners = json::array();
        for (size_t i : cal.full_agreement) winners.push_back(config_json(cal.runs[i].config));
        std::cout << json{{"seed", base.seed},
                          {"count", base.count},
                          {"runs", std::move(runs)},
                          {"full_agreement_configs", std::move(winners)}}
                         .dump(2)
                  << "\n";
        return 0;
    }
    for (const auto& rep : cal.runs)
        std::cout << rep.config.describe() << "  ->  rate " << rate_text(rep) << " (agree "
                  << rep.agreements << ", disagree " << rep.disagreements << ", skipped "
                  << rep.skipped << ")\n";
    if (cal.full_agreement.empty()) {
        std::cout << "no configuration reached full agreement\n";
    } else {
        std::cout << "full agreement:\n";
        for (size_t i : cal.full_agreement)
            std::cout << "  " << cal.runs[i].config.describe() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"explicit-state ATL/ATL* checking under uniform strategies, with a "
                 "guarded-command reduction"};
    app.require_subcommand(1);

    auto* compile_cmd = app.add_subcommand("compile", "compile a model to guarded commands");
    std::string compile_in, compile_out;
    ConfigFlags compile_flags;
    compile_cmd->add_option("model", compile_in, "model file (.icgs)")->required();
    compile_cmd->add_option("-o,--output", compile_out, "output file (default: .vcgs)");
    compile_flags.attach(compile_cmd);

    auto* unfold_cmd = app.add_subcommand("unfold", "unfold guarded commands to a model");
    std::string unfold_in, unfold_out;
    size_t unfold_bound = 100000;
    unfold_cmd->add_option("vcgs", unfold_in, "structure file (.vcgs)")->required();
    unfold_cmd->add_option("-o,--output", unfold_out, "output file");
    unfold_cmd->add_option("--bound", unfold_bound, "reachable state bound");

    auto* check_cmd = app.add_subcommand("check", "check a formula");
    std::string check_in, check_formula, check_dialect = "atl", check_state;
    bool check_vcgs = false, check_pi = false;
    int check_threads = 1;
    size_t check_bound = 100000;
    check_cmd->add_option("file", check_in, "model (.icgs) or structure (.vcgs)")->required();
    check_cmd->add_option("-f,--formula", check_formula, "formula text")->required();
    check_cmd->add_option("--dialect", check_dialect, "atl or atlstar")
        ->check(CLI::IsMember({"atl", "atlstar", "atl*"}));
    check_cmd->add_option("--state", check_state,
                          "state to check (default: all initial states, conjunctively)");
    check_cmd->add_flag("--vcgs", check_vcgs, "treat the input as a structure file");
    check_cmd->add_flag("--perfect-info", check_pi, "replace partitions with identity");
    check_cmd->add_option("--threads", check_threads, "strategy sweep threads");
    check_cmd->add_option("--bound", check_bound, "unfold bound for structure inputs");

    auto* gen_cmd = app.add_subcommand("gen", "generate a random model");
    GenParams gp;
    std::string gen_out;
    gen_cmd->add_option("--seed", gp.seed, "random seed")->required();
    gen_cmd->add_option("--states", gp.states, "state count")->check(CLI::Range(1, 64));
    gen_cmd->add_option("--agents", gp.agents, "agent count")->check(CLI::Range(1, 4));
    gen_cmd->add_option("--actions", gp.actions, "actions per agent")->check(CLI::Range(1, 8));
    gen_cmd->add_option("--classes", gp.max_classes,
                        "partition blocks per agent (0 = identity)");
    gen_cmd->add_option("-o,--output", gen_out, "output file");

    auto* xval_cmd = app.add_subcommand("xvalidate", "cross-validate reduction verdicts");
    XvalParams xp;
    ConfigFlags xval_flags;
    bool xval_json = false;
    size_t xval_index_raw = 0;
    xval_cmd->add_option("--seed", xp.seed, "batch seed")->required();
    xval_cmd->add_option("--count", xp.count, "instance count")->required();
    xval_flags.attach(xval_cmd);
    xval_cmd->add_option("--states", xp.max_states, "max states")->check(CLI::Range(2, 4));
    xval_cmd->add_option("--agents", xp.max_agents, "max agents")->check(CLI::Range(1, 2));
    xval_cmd->add_option("--actions", xp.max_actions, "max actions")->check(CLI::Range(1, 2));
    xval_cmd->add_option("--bound", xp.unfold_bound, "unfold bound per instance");
    xval_cmd->add_option("--threads", xp.threads, "strategy sweep threads");
    xval_cmd->add_option("--repro-dir", xp.repro_dir, "dump disagreement bundles here");
    auto* index_opt = xval_cmd->add_option("--index", xval_index_raw, "replay one instance");
    xval_cmd->add_flag("--json", xval_json, "emit the report as JSON");

    auto* cal_cmd = app.add_subcommand("calibrate", "sweep the label configurations");
    XvalParams cal_xp;
    bool cal_json = false;
    cal_cmd->add_option("--seed", cal_xp.seed, "batch seed")->required();
    cal_cmd->add_option("--count", cal_xp.count, "instances per configuration")->required();
    cal_cmd->add_option("--bound", cal_xp.unfold_bound, "unfold bound per instance");
    cal_cmd->add_option("--threads", cal_xp.threads, "strategy sweep threads");
    cal_cmd->add_flag("--json", cal_json, "emit the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(compile_cmd))
            return cmd_compile(compile_in, compile_out, compile_flags);
        if (app.got_subcommand(unfold_cmd))
            return cmd_unfold(unfold_in, unfold_out, unfold_bound);
        if (app.got_subcommand(check_cmd))
            return cmd_check(check_in, check_formula, check_dialect, check_state, check_vcgs,
                             check_pi, check_threads, check_bound);
        if (app.got_subcommand(gen_cmd)) return cmd_gen(gp, gen_out);
        if (app.got_subcommand(xval_cmd)) {
            xp.config = xval_flags.value();
            std::optional<size_t> index;
            if (index_opt->count() > 0) index = xval_index_raw;
            return cmd_xvalidate(xp, index, xval_json);
        }
        if (app.got_subcommand(cal_cmd)) return cmd_calibrate(cal_xp, cal_json);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
