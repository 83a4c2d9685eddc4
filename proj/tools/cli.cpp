#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nosig/epr.hpp"
#include "nosig/io.hpp"
#include "nosig/map_classifier.hpp"
#include "nosig/quantum_logic.hpp"
#include "nosig/randomness.hpp"
#include "nosig/random.hpp"
#include "nosig/thermo.hpp"

#ifndef NOSIG_VERSION
#define NOSIG_VERSION "0.0.0"
#endif

namespace nosig::cli {

namespace {

using io::json;

json manifest(const std::string& sub, const std::vector<std::string>& inputs, const json& seed, const json& tolerances,
              const std::string& output) {
    return {{"subcommand", sub},
            {"inputs", inputs},
            {"seed", seed},
            {"tolerances", tolerances},
            {"output", output.empty() ? json(nullptr) : json(output)},
            {"tool_version", NOSIG_VERSION}};
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io::InputError("cannot write '" + path + "'");
    f << text;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct AuditArgs {
    std::string input, out;
    int bases = 100;
    std::uint64_t seed = 1;
    double theta = kDefaultThetaSig;
    int samples = kResidualSamples;
};

int audit_detector(const AuditArgs& a, std::ostream& out) {
    const Detector d = io::detector_from_json(io::read_file(a.input));
    if (a.bases < 1) throw io::InputError("--bases must be positive");
    const SignalingReport rep = signaling_audit(d, d.dim(), a.bases, a.seed, a.theta);
    const QuadraticFit fit = gleason_fit(d, d.dim(), a.seed, a.samples);
    json j = {{"schema_version", io::kSchemaVersion},
              {"manifest", manifest("audit-detector", {a.input}, a.seed,
                                    {{"theta_sig", a.theta}, {"quadratic_residual", 1e-9}}, a.out)},
              {"detector", {{"form", to_string(d.form())}, {"dim", d.dim()}}},
              {"report", io::signaling_report_to_json(rep)},
              {"gleason_fit", io::quadratic_fit_to_json(fit)}};
    j["gleason_fit"]["quadratic"] = fit.residual <= 1e-9;
    emit(io::dump(j), a.out, out);
    return rep.verdict == Verdict::Signal ? kExitFinding : kExitOk;
}

struct ClassifyArgs {
    std::string input, out;
    double tol = 1e-8;
    std::uint64_t seed = 0xc1a55;
    int samples = 64;
};

int classify_map(const ClassifyArgs& a, std::ostream& out) {
    const OperatorMap w = io::operator_map_from_json(io::read_file(a.input));
    ClassifyOptions opt;
    opt.tol = a.tol;
    opt.verify_tol = a.tol;
    opt.samples = a.samples;
    opt.seed = a.seed;
    const Classification c = classify(w, opt);
    json j = {{"schema_version", io::kSchemaVersion},
              {"manifest", manifest("classify-map", {a.input}, a.seed, {{"tol", a.tol}}, a.out)},
              {"dim_h", w.dim_h()},
              {"dim_k", w.dim_k()},
              {"classification", io::classification_to_json(c)}};
    const bool preserving = !std::holds_alternative<NotRankOnePreserving>(c);
    if (preserving) {
        const OperatorMap ws = symmetrize(w);
        j["verify_error"] = verify_classification(ws, c, a.samples, child_seed(a.seed, 7));
        if (!std::holds_alternative<DegenerateType>(c)) {
            j["superposition_error"] = superposition_probe_error(ws, c, a.samples, child_seed(a.seed, 8));
        }
        if (w.dim_h() == 2 && w.dim_k() == 2) j["pauli"] = io::pauli_residuals_to_json(pauli_constraints(w));
    }
    emit(io::dump(j), a.out, out);
    return preserving ? kExitOk : kExitFinding;
}

struct LogicArgs {
    std::string input, out, checks = "poset,model,cns,successive,guz,covering";
    double tol = logic::hilbert::kTol;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, sep);)
        if (!p.empty()) parts.push_back(p);
    return parts;
}

json finite_checks(const logic::CollapseModel& m) {
    const logic::ChainReport rep = logic::derivation_chain(m);
    json guz_ce = json::array();
    for (const auto& c : rep.guz.counterexamples) {
        guz_ce.push_back({{"p", m.state(c.p).id}, {"q", m.state(c.q).id}, {"a", m.logic().id(c.a)}});
    }
    json cov_ce = json::array();
    for (const auto& c : rep.covering.counterexamples) {
        cov_ce.push_back({{"atom", m.logic().id(c.atom)}, {"element", m.logic().id(c.element)}, {"reason", c.reason}});
    }
    // Worst CNS deviation, reported exactly.
    logic::Prob worst(0);
    const auto partitions = logic::orthogonal_partitions(m.logic());
    for (int p = 0; p < m.state_count(); ++p) {
        for (int a = 0; a < m.logic().size(); ++a) {
            std::vector<std::vector<int>> usable;
            for (const auto& part : partitions) {
                bool ok = true;
                for (int b : part) {
                    const auto c = m.logic().commutes(a, b);
                    ok = ok && c && *c;
                }
                if (ok) usable.push_back(part);
            }
            const auto r = logic::cns_check(m, p, a, usable);
            if (r.worst_deviation > worst) worst = r.worst_deviation;
        }
    }
    return {{"poset", {{"pass", rep.poset.valid}, {"is_boolean", rep.poset.is_boolean}, {"violations", rep.poset.violations}}},
            {"model", {{"pass", rep.model.valid}, {"violations", rep.model.violations}}},
            {"cns",
             {{"pass", rep.cns_all},
              {"cases", rep.cns_cases},
              {"skipped_pairs", rep.cns_skipped_pairs},
              {"worst_deviation", io::prob_to_string(worst)}}},
            {"successive", {{"pass", rep.successive_all}, {"cases", rep.successive_cases}}},
            {"guz", {{"pass", rep.guz.holds}, {"premises", rep.guz.premises}, {"counterexamples", guz_ce}}},
            {"covering", {{"pass", rep.covering.holds}, {"pairs", rep.covering.pairs_checked}, {"counterexamples", cov_ce}}}};
}

json hilbert_checks(const json& spec, double tol, json& seed_out) {
    auto get_int = [&](const char* name, int fallback) {
        if (!spec.contains(name)) return fallback;
        if (!spec[name].is_number_integer() || spec[name].get<int>() < 1) {
            throw io::InputError(std::string("field '") + name + "' must be a positive integer");
        }
        return spec[name].get<int>();
    };
    const int dim = get_int("dim", 3);
    if (dim < 2 || dim > 8) throw io::InputError("Hilbert probes support 2 <= dim <= 8");
    std::uint64_t seed = 1;
    if (spec.contains("seed")) {
        if (!spec["seed"].is_number_unsigned()) throw io::InputError("field 'seed' must be a non-negative integer");
        seed = spec["seed"].get<std::uint64_t>();
    }
    seed_out = seed;
    const auto probes = logic::hilbert::make_probes(dim, get_int("states", 20), get_int("frames", 5), seed);
    const auto cns = logic::hilbert::cns_check(probes, tol);
    const auto succ = logic::hilbert::successive_check(probes, tol);
    const auto guz = logic::hilbert::guz_check(dim, get_int("guz_probes", 10000), child_seed(seed, 11), tol);
    const auto cov = logic::hilbert::covering_check(dim, get_int("subspaces", 50), get_int("rays", 20), child_seed(seed, 12));
    return {{"cns", {{"pass", cns.holds}, {"cases", cns.cases}, {"worst_deviation", cns.worst}}},
            {"successive", {{"pass", succ.holds}, {"cases", succ.cases}, {"worst_deviation", succ.worst}}},
            {"guz", {{"pass", guz.holds}, {"probes", guz.probes}, {"premises", guz.premises}, {"worst", guz.worst}}},
            {"covering", {{"pass", cov.holds}, {"pairs", cov.pairs}, {"worst_gap", cov.worst_gap}}}};
}

int logic_check(const LogicArgs& a, std::ostream& out) {
    const json model = io::read_file(a.input);
    const auto requested = split(a.checks, ',');
    if (requested.empty()) throw io::InputError("--checks lists no checks");
    json all;
    json seed = nullptr;
    const bool hilbert = model.is_object() && model.value("kind", "") == "hilbert";
    if (hilbert) {
        all = hilbert_checks(model, a.tol, seed);
    } else {
        all = finite_checks(io::collapse_model_from_json(model));
    }
    json verdicts = json::object();
    bool pass = true;
    for (const auto& name : requested) {
        if (!all.contains(name)) {
            if (hilbert && (name == "poset" || name == "model")) continue;
            throw io::InputError("unknown check '" + name + "'");
        }
        verdicts[name] = all[name];
        pass = pass && all[name]["pass"].get<bool>();
    }
    json j = {{"schema_version", io::kSchemaVersion},
              {"manifest", manifest("logic-check", {a.input}, seed, {{"hilbert_tol", a.tol}}, a.out)},
              {"model_kind", hilbert ? "hilbert" : "collapse_model"},
              {"checks", verdicts},
              {"all_pass", pass}};
    emit(io::dump(j), a.out, out);
    return pass ? kExitOk : kExitFinding;
}

struct RandomnessArgs {
    std::string config, out;
    std::string message = "1010";
    int block = 1000;
    std::string src_a = "periodic:01";
    std::string src_b = "random";
    std::string predictor = "adaptive";
    double tau = randomness::kDecisionThreshold;
    std::uint64_t seed = 1;
};

int randomness_demo(RandomnessArgs a, const CLI::App& sub, std::ostream& out) {
    if (!a.config.empty()) {
        const json c = io::read_file(a.config);
        if (!c.is_object()) throw io::InputError("randomness config must be a JSON object");
        auto take_str = [&](const char* key, const char* flag, std::string& dst) {
            if (c.contains(key) && sub.count(flag) == 0) {
                if (!c[key].is_string()) throw io::InputError(std::string("field '") + key + "' must be a string");
                dst = c[key].get<std::string>();
            }
        };
        take_str("message", "--message", a.message);
        take_str("src_a", "--src-a", a.src_a);
        take_str("src_b", "--src-b", a.src_b);
        take_str("predictor", "--predictor", a.predictor);
        if (c.contains("block") && sub.count("--block") == 0) {
            if (!c["block"].is_number_integer()) throw io::InputError("field 'block' must be an integer");
            a.block = c["block"].get<int>();
        }
        if (c.contains("tau") && sub.count("--tau") == 0) {
            if (!c["tau"].is_number()) throw io::InputError("field 'tau' must be a number");
            a.tau = c["tau"].get<double>();
        }
        if (c.contains("seed") && sub.count("--seed") == 0) {
            if (!c["seed"].is_number_unsigned()) throw io::InputError("field 'seed' must be a non-negative integer");
            a.seed = c["seed"].get<std::uint64_t>();
        }
    }
    randomness::Bits message;
    randomness::Predictor pr = randomness::Predictor::last_bit();
    try {
        message = randomness::parse_bits(a.message);
        pr = randomness::Predictor::from_name(a.predictor);
    } catch (const std::invalid_argument& e) {
        throw io::InputError(e.what());
    }
    if (a.block < 100) throw io::InputError("--block must be at least 100");
    auto src_1 = io::bit_source_from_spec(a.src_a, child_seed(a.seed, 1));
    auto src_0 = io::bit_source_from_spec(a.src_b, child_seed(a.seed, 2));
    const auto run = randomness::transmit(message, a.block, std::move(src_0), std::move(src_1), pr, a.tau);
    std::vector<std::string> inputs;
    if (!a.config.empty()) inputs.push_back(a.config);
    json j = {{"schema_version", io::kSchemaVersion},
              {"manifest", manifest("randomness-demo", inputs, a.seed, {{"tau", a.tau}}, a.out)},
              {"parameters",
               {{"message", a.message},
                {"block", a.block},
                {"src_a", a.src_a},
                {"src_b", a.src_b},
                {"predictor", a.predictor}}},
              {"run", io::channel_run_to_json(run)}};
    emit(io::dump(j), a.out, out);
    return kExitOk;
}

struct ThermoArgs {
    std::string config, out, csv;
    int seeds = 20;
    std::uint64_t seed = 1;
    int threads = 0;
};

std::string thermo_csv(const std::vector<thermo::RunResult>& runs, const json& man) {
    std::string s = "# manifest: " + man.dump() + "\n";
    s += "time";
    for (const auto& r : runs) {
        for (const char* col : {"T_A", "T_B", "N_A", "N_B", "S", "open"}) s += "," + std::string(col) + "_" + r.mode;
    }
    s += "\n";
    const std::size_t rows = runs.empty() ? 0 : runs.front().series.size();
    for (std::size_t i = 0; i < rows; ++i) {
        s += fmt(runs.front().series[i].time);
        for (const auto& r : runs) {
            const auto& p = r.series[i];
            s += "," + fmt(p.t_a) + "," + fmt(p.t_b) + "," + std::to_string(p.n_a) + "," + std::to_string(p.n_b) + "," +
                 fmt(p.entropy) + "," + (p.open ? "1" : "0");
        }
        s += "\n";
    }
    return s;
}

int thermo_demo(ThermoArgs a, const CLI::App& sub, std::ostream& out) {
    const json c = io::read_file(a.config);
    const thermo::GasConfig cfg = io::gas_config_from_json(c);
    if (c.contains("seeds") && sub.count("--seeds") == 0) {
        if (!c["seeds"].is_number_integer()) throw io::InputError("field 'seeds' must be an integer");
        a.seeds = c["seeds"].get<int>();
    }
    if (c.contains("base_seed") && sub.count("--seed") == 0) {
        if (!c["base_seed"].is_number_unsigned()) throw io::InputError("field 'base_seed' must be a non-negative integer");
        a.seed = c["base_seed"].get<std::uint64_t>();
    }
    if (a.seeds < 2) throw io::InputError("--seeds must be at least 2");
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < a.seeds; ++i) seeds.push_back(a.seed + static_cast<std::uint64_t>(i));
    std::vector<thermo::RunResult> runs;
    const thermo::EnsembleSummary sum = thermo::run_ensemble(cfg, seeds, a.threads, a.csv.empty() ? nullptr : &runs);
    std::vector<std::string> outputs;
    const json man = manifest("thermo-demo", {a.config}, a.seed, {{"separation_sigma", 5.0}, {"null_sigma", 2.0}, {"energy_drift", 1e-9}},
                              a.out);
    json j = {{"schema_version", io::kSchemaVersion},
              {"manifest", man},
              {"config", io::gas_config_to_json(cfg)},
              {"seeds", seeds},
              {"summary", io::ensemble_to_json(sum)},
              {"criteria",
               {{"separated", sum.separated},
                {"null_consistent", sum.null_consistent},
                {"energy_conserved", sum.max_energy_drift <= 1e-9}}}};
    if (!a.csv.empty()) {
        j["csv"] = a.csv;
        std::ofstream f(a.csv, std::ios::binary);
        if (!f) throw io::InputError("cannot write '" + a.csv + "'");
        f << thermo_csv(runs, man);
    }
    emit(io::dump(j), a.out, out);
    return kExitOk;
}

int export_model(const std::string& name, const std::string& path, std::ostream& out) {
    auto numbered = [&](const std::string& prefix) -> int {
        if (name.rfind(prefix, 0) != 0) return -1;
        const std::string n = name.substr(prefix.size());
        if (n.empty() || n.size() > 2 || n.find_first_not_of("0123456789") != std::string::npos) return -1;
        return std::stoi(n);
    };
    json j;
    try {
        if (name == "broken") {
            j = io::collapse_model_to_json(logic::broken_collapse_model());
        } else if (const int n = numbered("boolean-"); n >= 0) {
            j = io::collapse_model_to_json(logic::boolean_model(n));
        } else if (const int m = numbered("mo-"); m >= 0) {
            j = io::collapse_model_to_json(logic::mo_model(m));
        } else {
            throw io::InputError("unknown model '" + name + "' (boolean-N, mo-N, broken)");
        }
    } catch (const logic::LogicError& e) {
        throw io::InputError(e.what());
    }
    emit(io::dump(j), path, out);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"nosig: no-signaling audits, map classification, quantum-logic checks and demos", "nosig"};
    app.require_subcommand(1);
    app.set_version_flag("--version", NOSIG_VERSION);

    AuditArgs audit;
    auto* s_audit = app.add_subcommand("audit-detector", "Audit a detector for arm-B signaling; exit 2 on Signal");
    s_audit->add_option("input", audit.input, "Detector JSON")->required();
    s_audit->add_option("--bases", audit.bases, "Number of seeded Haar bases at arm A")->capture_default_str();
    s_audit->add_option("--seed", audit.seed, "Seed")->capture_default_str();
    s_audit->add_option("--theta-sig", audit.theta, "Signaling threshold on max - min rate")->capture_default_str();
    s_audit->add_option("--samples", audit.samples, "Residual samples for the quadratic fit")->capture_default_str();
    s_audit->add_option("-o,--out", audit.out, "Output path (default stdout)");

    ClassifyArgs cls;
    auto* s_cls = app.add_subcommand("classify-map", "Classify an operator map; exit 2 when not rank-one preserving");
    s_cls->add_option("input", cls.input, "Operator map JSON")->required();
    s_cls->add_option("--tol", cls.tol, "Tolerance for rank-one tests and verification")->capture_default_str();
    s_cls->add_option("--seed", cls.seed, "Seed for probe states")->capture_default_str();
    s_cls->add_option("--samples", cls.samples, "Probe states")->capture_default_str();
    s_cls->add_option("-o,--out", cls.out, "Output path (default stdout)");

    LogicArgs lg;
    auto* s_logic = app.add_subcommand("logic-check", "Check CNS, successive rates, Guz property and covering law");
    s_logic->add_option("input", lg.input, "Collapse model or Hilbert probe JSON")->required();
    s_logic->add_option("--checks", lg.checks, "Comma-separated checks")->capture_default_str();
    s_logic->add_option("--tol", lg.tol, "Tolerance for Hilbert probes")->capture_default_str();
    s_logic->add_option("-o,--out", lg.out, "Output path (default stdout)");

    RandomnessArgs rnd;
    auto* s_rnd = app.add_subcommand("randomness-demo", "Send a message by switching arm-A bit sources");
    s_rnd->add_option("config", rnd.config, "Optional JSON with the same fields");
    s_rnd->add_option("--message", rnd.message, "Message bits")->capture_default_str();
    s_rnd->add_option("--block", rnd.block, "Bits per message bit")->capture_default_str();
    s_rnd->add_option("--src-a", rnd.src_a, "Source for 1 bits (non-randomizing)")->capture_default_str();
    s_rnd->add_option("--src-b", rnd.src_b, "Source for 0 bits (randomizing)")->capture_default_str();
    s_rnd->add_option("--predictor", rnd.predictor, "Arm-B predictor")->capture_default_str();
    s_rnd->add_option("--tau", rnd.tau, "Decision threshold on the advantage")->capture_default_str();
    s_rnd->add_option("--seed", rnd.seed, "Seed for unseeded sources")->capture_default_str();
    s_rnd->add_option("-o,--out", rnd.out, "Output path (default stdout)");

    ThermoArgs th;
    auto* s_th = app.add_subcommand("thermo-demo", "Paired-seed valve ensemble: baseline, anticipatory, shuffled");
    s_th->add_option("config", th.config, "Thermo config JSON")->required();
    s_th->add_option("--seeds", th.seeds, "Number of paired seeds")->capture_default_str();
    s_th->add_option("--seed", th.seed, "First seed")->capture_default_str();
    s_th->add_option("--threads", th.threads, "Worker threads (0 = all cores); results do not depend on it");
    s_th->add_option("--csv", th.csv, "Write the first seed's time series here");
    s_th->add_option("-o,--out", th.out, "Output path (default stdout)");

    std::string model_name, model_out;
    auto* s_exp = app.add_subcommand("export-model", "Write a shipped finite collapse model as JSON");
    s_exp->add_option("name", model_name, "boolean-N, mo-N or broken")->required();
    s_exp->add_option("-o,--out", model_out, "Output path (default stdout)");

    std::vector<std::string> owned{"nosig"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : owned) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (s_audit->parsed()) return audit_detector(audit, out);
        if (s_cls->parsed()) return classify_map(cls, out);
        if (s_logic->parsed()) return logic_check(lg, out);
        if (s_rnd->parsed()) return randomness_demo(rnd, *s_rnd, out);
        if (s_th->parsed()) return thermo_demo(th, *s_th, out);
        if (s_exp->parsed()) return export_model(model_name, model_out, out);
    } catch (const ClassificationError& e) {
        err << "error: classification failed verification: " << e.what() << " (worst error " << e.worst_error() << ")\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace nosig::cli
