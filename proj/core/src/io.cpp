#include "nosig/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace nosig::io {

namespace {

const json& field(const json& j, const char* name) {
    if (!j.is_object()) throw InputError("expected a JSON object");
    const auto it = j.find(name);
    if (it == j.end()) throw InputError(std::string("missing field '") + name + "'");
    return *it;
}

int positive_int(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_number_integer() || v.get<long long>() <= 0 || v.get<long long>() > 1 << 20) {
        throw InputError(std::string("field '") + name + "' must be a positive integer");
    }
    return v.get<int>();
}

double number(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_number()) throw InputError(std::string("field '") + name + "' must be a number");
    return v.get<double>();
}

std::string text(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_string()) throw InputError(std::string("field '") + name + "' must be a string");
    return v.get<std::string>();
}

void expect_kind(const json& j, const char* kind) {
    if (j.is_object() && j.contains("kind") && j["kind"] != kind) {
        throw InputError(std::string("expected kind '") + kind + "'");
    }
}

}  // namespace

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw InputError("complex numbers are [re, im] pairs");
}

json matrix_to_json(const ComplexMatrix& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(complex_to_json(m(r, c)));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

ComplexMatrix matrix_from_json(const json& j) {
    const int rows = positive_int(j, "rows");
    const int cols = positive_int(j, "cols");
    const json& data = field(j, "data");
    if (!data.is_array() || data.size() != static_cast<std::size_t>(rows) * cols) {
        throw InputError("matrix data must hold rows*cols entries");
    }
    ComplexMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = complex_from_json(data[r * cols + c]);
    return m;
}

json vector_to_json(const ComplexVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

ComplexVector vector_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InputError("vectors are non-empty arrays of [re, im] pairs");
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

Detector detector_from_json(const json& j) {
    expect_kind(j, "detector");
    const std::string form = text(j, "form");
    try {
        if (form == "quadratic") return Detector::quadratic(matrix_from_json(field(j, "R")));
        if (form == "power") return Detector::power(matrix_from_json(field(j, "R")), number(j, "exponent"));
        if (form == "cloner") return Detector::cloner(PureState(vector_from_json(field(j, "target")), 1e-9));
    } catch (const LinalgError& e) {
        throw InputError(std::string("invalid detector data: ") + e.what());
    }
    throw InputError("unknown detector form '" + form + "'");
}

json detector_to_json(const Detector& d) {
    json j = {{"schema_version", kSchemaVersion}, {"kind", "detector"}, {"form", to_string(d.form())}, {"dim", d.dim()}};
    switch (d.form()) {
        case DetectorForm::Quadratic: j["R"] = matrix_to_json(*d.operator_data()); break;
        case DetectorForm::Power:
            j["R"] = matrix_to_json(*d.operator_data());
            j["exponent"] = d.exponent();
            break;
        case DetectorForm::Cloner: j["target"] = vector_to_json(d.clone_target()->amplitudes()); break;
        default: throw InputError("detector form has no file representation");
    }
    return j;
}

json signaling_report_to_json(const SignalingReport& r) {
    return {{"rates", r.rates},
            {"max_minus_min", r.max_minus_min},
            {"variance", r.variance},
            {"theta_sig", r.theta_sig},
            {"verdict", to_string(r.verdict)}};
}

json quadratic_fit_to_json(const QuadraticFit& f) { return {{"R", matrix_to_json(f.r)}, {"residual", f.residual}}; }

OperatorMap operator_map_from_json(const json& j) {
    expect_kind(j, "operator_map");
    const int h = positive_int(j, "dim_h");
    const int k = positive_int(j, "dim_k");
    if (j.contains("kraus")) {
        const json& list = j["kraus"];
        if (!list.is_array() || list.empty()) throw InputError("'kraus' must be a non-empty list of matrices");
        std::vector<ComplexMatrix> ops;
        for (const auto& m : list) {
            ops.push_back(matrix_from_json(m));
            if (ops.back().rows() != k || ops.back().cols() != h) throw InputError("Kraus operators must be dim_k x dim_h");
        }
        return OperatorMap::from_action(h, k, [&ops, k](const ComplexMatrix& a) {
            ComplexMatrix out = ComplexMatrix::Zero(k, k);
            for (const auto& op : ops) out += op * a * op.adjoint();
            return out;
        });
    }
    const json& list = field(j, "blocks");
    if (!list.is_array() || list.size() != static_cast<std::size_t>(k) * k) {
        throw InputError("'blocks' must list dim_k^2 matrices");
    }
    std::vector<ComplexMatrix> blocks;
    for (const auto& m : list) {
        blocks.push_back(matrix_from_json(m));
        if (blocks.back().rows() != h || blocks.back().cols() != h) throw InputError("blocks must be dim_h x dim_h");
    }
    return OperatorMap(h, k, std::move(blocks));
}

json operator_map_to_json(const OperatorMap& w) {
    json blocks = json::array();
    for (const auto& b : w.blocks()) blocks.push_back(matrix_to_json(b));
    return {{"schema_version", kSchemaVersion},
            {"kind", "operator_map"},
            {"dim_h", w.dim_h()},
            {"dim_k", w.dim_k()},
            {"blocks", blocks}};
}

json classification_to_json(const Classification& c) {
    json j = {{"type", type_name(c)}};
    if (const auto* lin = std::get_if<LinearType>(&c)) {
        j["C"] = matrix_to_json(lin->c);
        if (lin->degenerate_form) {
            j["degenerate_form"] = {{"D", matrix_to_json(lin->degenerate_form->d)},
                                    {"k", vector_to_json(lin->degenerate_form->k)}};
        }
    } else if (const auto* anti = std::get_if<AntilinearType>(&c)) {
        j["C0"] = matrix_to_json(anti->c0);
    } else if (const auto* deg = std::get_if<DegenerateType>(&c)) {
        j["D"] = matrix_to_json(deg->d);
        j["k"] = vector_to_json(deg->k);
    } else {
        j["witness"] = vector_to_json(std::get<NotRankOnePreserving>(c).witness.amplitudes());
    }
    return j;
}

json pauli_residuals_to_json(const PauliResiduals& r) {
    const auto& p = r.params;
    return {{"params",
             {{"alpha", p.alpha},
              {"gamma", p.gamma},
              {"beta", p.beta},
              {"delta", p.delta},
              {"A", complex_to_json(p.a)},
              {"B", json::array({complex_to_json(p.b[0]), complex_to_json(p.b[1]), complex_to_json(p.b[2])})}}},
            {"eq1", r.eq1},
            {"eq2", r.eq2},
            {"eq3", r.eq3},
            {"eq4", r.eq4},
            {"eq5", r.eq5},
            {"eq6", r.eq6},
            {"eq7", r.eq7},
            {"off_axis", r.off_axis},
            {"max_abs", r.max_abs()}};
}

std::string prob_to_string(const logic::Prob& p) {
    std::string s = std::to_string(p.numerator());
    if (p.denominator() != 1) s += "/" + std::to_string(p.denominator());
    return s;
}

logic::Prob prob_from_json(const json& j) {
    if (j.is_number_integer()) return logic::Prob(j.get<std::int64_t>());
    if (!j.is_string()) throw InputError("probabilities are integers or \"p/q\" strings");
    const std::string s = j.get<std::string>();
    try {
        const auto slash = s.find('/');
        std::size_t used = 0;
        const std::int64_t num = std::stoll(s.substr(0, slash), &used);
        if (used != (slash == std::string::npos ? s.size() : slash)) throw InputError("bad probability '" + s + "'");
        if (slash == std::string::npos) return logic::Prob(num);
        const std::string den_text = s.substr(slash + 1);
        const std::int64_t den = std::stoll(den_text, &used);
        if (used != den_text.size() || den <= 0) throw InputError("bad probability '" + s + "'");
        return logic::Prob(num, den);
    } catch (const std::logic_error&) {
        throw InputError("bad probability '" + s + "'");
    }
}

logic::CollapseModel collapse_model_from_json(const json& j) {
    expect_kind(j, "collapse_model");
    const json& elems = field(j, "elements");
    if (!elems.is_array() || elems.empty()) throw InputError("'elements' must be a non-empty list of ids");
    std::vector<std::string> ids;
    std::map<std::string, int> index;
    for (const auto& e : elems) {
        if (!e.is_string()) throw InputError("element ids must be strings");
        if (!index.emplace(e.get<std::string>(), static_cast<int>(ids.size())).second) {
            throw InputError("duplicate element '" + e.get<std::string>() + "'");
        }
        ids.push_back(e.get<std::string>());
    }
    auto elem = [&](const json& e) {
        if (!e.is_string() || !index.count(e.get<std::string>())) throw InputError("unknown element " + e.dump());
        return index.at(e.get<std::string>());
    };

    std::vector<std::pair<int, int>> order;
    for (const auto& pair : field(j, "order")) {
        if (!pair.is_array() || pair.size() != 2) throw InputError("order entries are [lower, upper] pairs");
        order.emplace_back(elem(pair[0]), elem(pair[1]));
    }
    const json& comp = field(j, "complement");
    if (!comp.is_object()) throw InputError("'complement' maps every element id to an element id");
    std::vector<int> complement(ids.size(), -1);
    for (const auto& [key, value] : comp.items()) complement[elem(json(key))] = elem(value);
    for (std::size_t a = 0; a < ids.size(); ++a)
        if (complement[a] < 0) throw InputError("element '" + ids[a] + "' has no complement");

    std::vector<logic::StateMeasure> states;
    std::map<std::string, int> state_index;
    for (const auto& s : field(j, "states")) {
        logic::StateMeasure st;
        st.id = text(s, "id");
        st.values.assign(ids.size(), logic::Prob(0));
        std::vector<bool> seen(ids.size(), false);
        const json& values = field(s, "values");
        if (!values.is_object()) throw InputError("state values map element ids to probabilities");
        for (const auto& [key, value] : values.items()) {
            const int a = elem(json(key));
            st.values[a] = prob_from_json(value);
            seen[a] = true;
        }
        for (std::size_t a = 0; a < ids.size(); ++a)
            if (!seen[a]) throw InputError("state '" + st.id + "' does not assign '" + ids[a] + "'");
        if (!state_index.emplace(st.id, static_cast<int>(states.size())).second) {
            throw InputError("duplicate state '" + st.id + "'");
        }
        states.push_back(std::move(st));
    }
    auto state = [&](const json& s) {
        if (!s.is_string() || !state_index.count(s.get<std::string>())) throw InputError("unknown state " + s.dump());
        return state_index.at(s.get<std::string>());
    };
    std::map<int, int> pure;
    const json& pj = field(j, "pure");
    if (!pj.is_object()) throw InputError("'pure' maps pure state ids to atoms");
    for (const auto& [key, value] : pj.items()) pure[state(json(key))] = elem(value);
    std::map<std::pair<int, int>, int> collapse;
    for (const auto& c : field(j, "collapse")) {
        collapse[{state(field(c, "state")), elem(field(c, "element"))}] = state(field(c, "to"));
    }
    try {
        return logic::CollapseModel(logic::OrthoPoset(std::move(ids), order, std::move(complement)), std::move(states),
                                    std::move(pure), std::move(collapse));
    } catch (const logic::LogicError& e) {
        throw InputError(e.what());
    }
}

json collapse_model_to_json(const logic::CollapseModel& m) {
    const auto& l = m.logic();
    json elements = json::array();
    json order = json::array();
    json complement = json::object();
    for (int a = 0; a < l.size(); ++a) {
        elements.push_back(l.id(a));
        complement[l.id(a)] = l.id(l.complement(a));
        // Covering pairs generate the order; the reader takes the closure.
        for (int b = 0; b < l.size(); ++b)
            if (l.covers(b, a)) order.push_back({l.id(a), l.id(b)});
    }
    json states = json::array();
    for (const auto& s : m.states()) {
        json values = json::object();
        for (int a = 0; a < l.size(); ++a) values[l.id(a)] = prob_to_string(s(a));
        states.push_back({{"id", s.id}, {"values", values}});
    }
    json pure = json::object();
    for (const auto& [p, atom] : m.indicator_map()) pure[m.state(p).id] = l.id(atom);
    json collapse = json::array();
    for (const auto& [key, target] : m.collapse_table()) {
        collapse.push_back({{"state", m.state(key.first).id}, {"element", l.id(key.second)}, {"to", m.state(target).id}});
    }
    return {{"schema_version", kSchemaVersion},
            {"kind", "collapse_model"},
            {"elements", elements},
            {"order", order},
            {"complement", complement},
            {"states", states},
            {"pure", pure},
            {"collapse", collapse}};
}

json channel_run_to_json(const randomness::ChannelRun& run) {
    return {{"message", randomness::format_bits(run.message)},
            {"block_length", run.block_length},
            {"tau", run.tau},
            {"predictor", run.predictor},
            {"random_source", run.random_source},
            {"nonrandom_source", run.nonrandom_source},
            {"arm_a", randomness::format_bits(run.arm_a)},
            {"arm_b", randomness::format_bits(run.arm_b)},
            {"mirror_ok", run.arm_a == run.arm_b},
            {"advantages", run.advantages},
            {"decoded", randomness::format_bits(run.decoded)},
            {"accuracy", run.accuracy},
            {"capacity_bits", randomness::capacity_estimate(run)}};
}

randomness::BitSource bit_source_from_spec(const std::string& spec, std::uint64_t default_seed) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.empty()) throw InputError("empty source spec");
    auto seed_at = [&](std::size_t i) -> std::uint64_t {
        if (parts.size() <= i) return default_seed;
        try {
            std::size_t used = 0;
            const auto v = std::stoull(parts[i], &used);
            if (used != parts[i].size()) throw InputError("bad seed '" + parts[i] + "'");
            return v;
        } catch (const std::logic_error&) {
            throw InputError("bad seed '" + parts[i] + "'");
        }
    };
    try {
        if (parts[0] == "random" && parts.size() <= 2) return randomness::BitSource::seeded_random(seed_at(1));
        if (parts[0] == "periodic" && parts.size() == 2) return randomness::BitSource::periodic(parts[1]);
        if (parts[0] == "markov" && (parts.size() == 2 || parts.size() == 3)) {
            std::size_t used = 0;
            const double bias = std::stod(parts[1], &used);
            if (used != parts[1].size()) throw InputError("bad Markov bias '" + parts[1] + "'");
            return randomness::BitSource::markov(bias, seed_at(2));
        }
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("bad source spec '") + spec + "': " + e.what());
    }
    throw InputError("unknown source spec '" + spec + "'");
}

thermo::GasConfig gas_config_from_json(const json& j) {
    if (!j.is_object()) throw InputError("thermo config must be a JSON object");
    thermo::GasConfig c;
    static const std::set<std::string> known = {
        "schema_version", "kind", "lx", "ly", "n", "radius", "temperature", "window_half_width",
        "orifice_half_width", "sampling_interval", "threshold", "threshold_percentile", "calibration_intervals",
        "open_intervals", "lead", "intervals", "open_fraction", "max_openings", "seeds", "base_seed"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw InputError("unknown thermo config field '" + key + "'");
    }
    auto num = [&](const char* name, double& out) {
        if (j.contains(name)) out = number(j, name);
    };
    auto integer = [&](const char* name, int& out) {
        if (!j.contains(name)) return;
        if (!j[name].is_number_integer()) throw InputError(std::string("field '") + name + "' must be an integer");
        out = j[name].get<int>();
    };
    num("lx", c.lx);
    num("ly", c.ly);
    integer("n", c.n);
    num("radius", c.radius);
    num("temperature", c.temperature);
    num("window_half_width", c.window_half_width);
    num("orifice_half_width", c.orifice_half_width);
    num("sampling_interval", c.sampling_interval);
    num("threshold", c.threshold);
    num("threshold_percentile", c.threshold_percentile);
    integer("calibration_intervals", c.calibration_intervals);
    integer("open_intervals", c.open_intervals);
    num("lead", c.lead);
    integer("intervals", c.intervals);
    num("open_fraction", c.open_fraction);
    integer("max_openings", c.max_openings);
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("invalid thermo config: ") + e.what());
    }
    return c;
}

json gas_config_to_json(const thermo::GasConfig& c) {
    return {{"lx", c.lx},
            {"ly", c.ly},
            {"n", c.n},
            {"radius", c.radius},
            {"temperature", c.temperature},
            {"window_half_width", c.window_half_width},
            {"orifice_half_width", c.orifice_half_width},
            {"sampling_interval", c.sampling_interval},
            {"threshold", c.threshold},
            {"threshold_percentile", c.threshold_percentile},
            {"calibration_intervals", c.calibration_intervals},
            {"open_intervals", c.open_intervals},
            {"lead", c.lead},
            {"intervals", c.intervals},
            {"open_fraction", c.open_fraction},
            {"max_openings", c.max_openings}};
}

json ensemble_to_json(const thermo::EnsembleSummary& s) {
    json seeds = json::array();
    for (const auto& o : s.seeds) {
        seeds.push_back({{"seed", o.seed},
                         {"threshold", o.threshold},
                         {"gap_baseline", o.gap_baseline},
                         {"gap_anticipatory", o.gap_anticipatory},
                         {"gap_null", o.gap_null},
                         {"openings_baseline", o.openings_baseline},
                         {"openings_anticipatory", o.openings_anticipatory},
                         {"entropy_change_baseline", o.entropy_change_baseline},
                         {"entropy_change_anticipatory", o.entropy_change_anticipatory},
                         {"energy_drift", o.energy_drift}});
    }
    return {{"seeds", seeds},
            {"mean_gap_baseline", s.mean_baseline},
            {"std_gap_baseline", s.std_baseline},
            {"mean_gap_anticipatory", s.mean_anticipatory},
            {"std_gap_anticipatory", s.std_anticipatory},
            {"mean_gap_null", s.mean_null},
            {"std_gap_null", s.std_null},
            {"separation", s.separation},
            {"null_z", s.null_z},
            {"max_energy_drift", s.max_energy_drift},
            {"separated", s.separated},
            {"null_consistent", s.null_consistent}};
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

json read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace nosig::io
