// JSON encodings shared by the command-line tool and the tests.
//
// Complex numbers are [re, im] pairs; a bare number is accepted on input as
// a real entry. Matrices are {"rows", "cols", "data"} with data row-major.
// Exact probabilities are strings "p/q" (or integers).

#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "nosig/epr.hpp"
#include "nosig/map_classifier.hpp"
#include "nosig/quantum_logic.hpp"
#include "nosig/randomness.hpp"
#include "nosig/thermo.hpp"

namespace nosig::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or schema-violating input.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json complex_to_json(Complex z);
Complex complex_from_json(const json& j);

json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const json& j);

/// {"kind": "detector", "form": "quadratic", "R": M}
/// {"kind": "detector", "form": "cloner", "target": v}
/// {"kind": "detector", "form": "power", "R": M, "exponent": x}
Detector detector_from_json(const json& j);
json detector_to_json(const Detector& d);

json signaling_report_to_json(const SignalingReport& r);
json quadratic_fit_to_json(const QuadraticFit& f);

/// {"kind": "operator_map", "dim_h", "dim_k", "blocks": [L_00, L_01, ...]}
/// with blocks in row-major (i, j) order, or
/// {"kind": "operator_map", "dim_h", "dim_k", "kraus": [K_1, ...]}
/// for W(A) = sum K A K*.
OperatorMap operator_map_from_json(const json& j);
json operator_map_to_json(const OperatorMap& w);

json classification_to_json(const Classification& c);
json pauli_residuals_to_json(const PauliResiduals& r);

std::string prob_to_string(const logic::Prob& p);
logic::Prob prob_from_json(const json& j);

/// {"kind": "collapse_model", "elements", "order": [[a, b]], "complement",
///  "states": [{"id", "values": {element: prob}}], "pure": {state: atom},
///  "collapse": [{"state", "element", "to"}]}; references are by id.
logic::CollapseModel collapse_model_from_json(const json& j);
json collapse_model_to_json(const logic::CollapseModel& m);

json channel_run_to_json(const randomness::ChannelRun& run);

/// Source spec: "random", "random:SEED", "periodic:PATTERN",
/// "markov:BIAS" or "markov:BIAS:SEED". Unseeded sources use default_seed.
randomness::BitSource bit_source_from_spec(const std::string& spec, std::uint64_t default_seed);

/// Fields of GasConfig by name; missing fields keep their defaults.
thermo::GasConfig gas_config_from_json(const json& j);
json gas_config_to_json(const thermo::GasConfig& c);
json ensemble_to_json(const thermo::EnsembleSummary& s);

/// Parses text; throws InputError with the parser message on failure.
json parse(const std::string& text);
json read_file(const std::string& path);

/// Pretty-printed with a trailing newline.
std::string dump(const json& j);

}  // namespace nosig::io
