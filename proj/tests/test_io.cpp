#include <doctest.h>

#include "nosig/io.hpp"
#include "nosig/random.hpp"

using namespace nosig;
using io::json;

TEST_SUITE("io") {

TEST_CASE("complex and matrix encodings round trip") {
    Rng rng(1);
    const ComplexMatrix m = random_matrix(2, 3, rng);
    const json j = io::matrix_to_json(m);
    CHECK(j["rows"] == 2);
    CHECK(j["cols"] == 3);
    CHECK(max_abs(io::matrix_from_json(j) - m) == 0.0);
    CHECK(io::complex_from_json(json(2.5)) == Complex(2.5, 0));
    CHECK(io::complex_from_json(json::parse("[1, -2]")) == Complex(1, -2));
}

TEST_CASE("malformed matrices are input errors") {
    CHECK_THROWS_AS(io::matrix_from_json(json::parse(R"({"rows": 2, "cols": 2, "data": [1, 2, 3]})")), io::InputError);
    CHECK_THROWS_AS(io::matrix_from_json(json::parse(R"({"rows": 1, "cols": 1, "data": [[1, 2, 3]]})")), io::InputError);
    CHECK_THROWS_AS(io::complex_from_json(json("x")), io::InputError);
    CHECK_THROWS_AS(io::parse("{not json"), io::InputError);
    CHECK_THROWS_AS(io::read_file("/nonexistent/file.json"), io::InputError);
}

TEST_CASE("detectors round trip") {
    const Detector d = Detector::quadratic(0.5 * ComplexMatrix::Identity(2, 2));
    const Detector back = io::detector_from_json(io::detector_to_json(d));
    CHECK(back.form() == DetectorForm::Quadratic);
    CHECK(back.rate(PureState::basis_vector(2, 1)) == doctest::Approx(0.5));
    const Detector c = io::detector_from_json(io::detector_to_json(Detector::cloner(PureState::basis_vector(3, 2))));
    CHECK(c.form() == DetectorForm::Cloner);
    CHECK(c.rate(PureState::basis_vector(3, 2)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(io::detector_from_json(json::parse(R"({"kind": "detector", "form": "magic"})")), io::InputError);
    CHECK_THROWS_AS(io::detector_from_json(json::parse(R"({"kind": "map", "form": "quadratic"})")), io::InputError);
}

TEST_CASE("Kraus and block encodings agree") {
    const json k = json::parse(R"({"kind": "operator_map", "dim_h": 2, "dim_k": 2,
        "kraus": [{"rows": 2, "cols": 2, "data": [1, 0, 0, 1]}]})");
    const OperatorMap a = io::operator_map_from_json(k);
    const OperatorMap b = io::operator_map_from_json(io::operator_map_to_json(OperatorMap::identity(2)));
    for (std::size_t i = 0; i < a.blocks().size(); ++i) CHECK(max_abs(a.blocks()[i] - b.blocks()[i]) < 1e-15);
    const json bad = json::parse(R"({"kind": "operator_map", "dim_h": 2, "dim_k": 2, "blocks": []})");
    CHECK_THROWS_AS(io::operator_map_from_json(bad), io::InputError);
}

TEST_CASE("exact probabilities") {
    CHECK(io::prob_to_string(logic::Prob(3, 4)) == "3/4");
    CHECK(io::prob_to_string(logic::Prob(1)) == "1");
    CHECK(io::prob_from_json(json("6/8")) == logic::Prob(3, 4));
    CHECK(io::prob_from_json(json(1)) == logic::Prob(1));
    CHECK_THROWS_AS(io::prob_from_json(json("1/0")), io::InputError);
    CHECK_THROWS_AS(io::prob_from_json(json("a/b")), io::InputError);
    CHECK_THROWS_AS(io::prob_from_json(json(0.5)), io::InputError);
}

TEST_CASE("collapse models round trip") {
    for (const auto& m : {logic::boolean_model(3), logic::mo_model(4), logic::broken_collapse_model()}) {
        const json j = io::collapse_model_to_json(m);
        const logic::CollapseModel back = io::collapse_model_from_json(j);
        CHECK(io::dump(io::collapse_model_to_json(back)) == io::dump(j));
    }
}

TEST_CASE("collapse model references are checked") {
    json j = io::collapse_model_to_json(logic::boolean_model(2));
    j["collapse"][0]["to"] = "nobody";
    CHECK_THROWS_AS(io::collapse_model_from_json(j), io::InputError);
}

TEST_CASE("source specs") {
    auto a = io::bit_source_from_spec("random:5", 1);
    auto b = randomness::BitSource::seeded_random(5);
    CHECK(a.emit(64) == b.emit(64));
    CHECK(io::bit_source_from_spec("periodic:10", 0).emit(3) == randomness::Bits{1, 0, 1});
    CHECK(io::bit_source_from_spec("markov:0.9:3", 0).kind() == randomness::BitSource::Kind::Markov);
    CHECK_THROWS_AS(io::bit_source_from_spec("markov:x", 0), io::InputError);
    CHECK_THROWS_AS(io::bit_source_from_spec("noise", 0), io::InputError);
    CHECK_THROWS_AS(io::bit_source_from_spec("random:12a", 0), io::InputError);
}

TEST_CASE("gas configs") {
    const thermo::GasConfig c = io::gas_config_from_json(json::parse(R"({"n": 100, "lx": 40})"));
    CHECK(c.n == 100);
    CHECK(c.lx == 40.0);
    CHECK(c.ly == thermo::GasConfig{}.ly);
    const thermo::GasConfig back = io::gas_config_from_json(io::gas_config_to_json(c));
    CHECK(thermo::config_digest(back) == thermo::config_digest(c));
    CHECK_THROWS_AS(io::gas_config_from_json(json::parse(R"({"particles": 3})")), io::InputError);
    CHECK_THROWS_AS(io::gas_config_from_json(json::parse(R"({"n": 1})")), io::InputError);
    CHECK_THROWS_AS(io::gas_config_from_json(json::parse(R"({"n": 2.5})")), io::InputError);
}

TEST_CASE("dump is stable and newline terminated") {
    const json j = json::parse(R"({"b": 1, "a": [1, 2]})");
    const std::string s = io::dump(j);
    CHECK(s.back() == '\n');
    CHECK(s == io::dump(json::parse(s)));
}

}
