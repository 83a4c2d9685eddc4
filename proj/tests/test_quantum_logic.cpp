#include <doctest.h>

#include <cmath>

#include "nosig/quantum_logic.hpp"
#include "nosig/random.hpp"

using namespace nosig;
using namespace nosig::logic;

TEST_SUITE("quantum_logic") {

TEST_CASE("Boolean algebras are orthomodular and Boolean") {
    for (int n = 1; n <= 4; ++n) {
        const OrthoPoset l = OrthoPoset::boolean(n);
        CHECK(l.size() == (1 << n));
        const PosetReport r = validate_poset(l);
        CHECK(r.valid);
        CHECK(r.is_boolean);
        CHECK(l.atoms().size() == static_cast<std::size_t>(n));
    }
}

TEST_CASE("MO_n is orthomodular but not Boolean") {
    for (int n = 2; n <= 5; ++n) {
        const OrthoPoset l = OrthoPoset::mo(n);
        CHECK(l.size() == 2 * n + 2);
        const PosetReport r = validate_poset(l);
        CHECK(r.valid);
        CHECK_FALSE(r.is_boolean);
        const int x1 = l.index_of("x1"), x2 = l.index_of("x2");
        CHECK(*l.join(x1, x2) == l.top());
        CHECK(*l.meet(x1, x2) == l.bottom());
        CHECK_FALSE(*l.commutes(x1, x2));
        CHECK(*l.commutes(x1, l.complement(x1)));
    }
}

TEST_CASE("malformed orthoposets are rejected") {
    const PosetReport fake = validate_poset(OrthoPoset::pentagon_fake());
    CHECK_FALSE(fake.valid);
    CHECK_FALSE(fake.violations.empty());
    const PosetReport hex = validate_poset(OrthoPoset::benzene());
    CHECK_FALSE(hex.valid);
    bool mentions_orthomodular = false;
    for (const auto& v : hex.violations) mentions_orthomodular |= v.find("orthomodular") != std::string::npos;
    CHECK(mentions_orthomodular);
    CHECK_THROWS_AS(OrthoPoset({"a"}, {}, {1}), LogicError);
}

TEST_CASE("covering law holds on the shipped lattices") {
    for (int n = 1; n <= 4; ++n) CHECK(covering_law_check(OrthoPoset::boolean(n)).holds);
    for (int n = 2; n <= 5; ++n) CHECK(covering_law_check(OrthoPoset::mo(n)).holds);
}

TEST_CASE("orthogonal partitions of 2^2") {
    // {1}, {a, a'}: two partitions.
    CHECK(orthogonal_partitions(OrthoPoset::boolean(2)).size() == 2);
    // 2^3: Bell number B_3 = 5.
    CHECK(orthogonal_partitions(OrthoPoset::boolean(3)).size() == 5);
    // MO_3: {1} plus one {x, x'} per block.
    CHECK(orthogonal_partitions(OrthoPoset::mo(3)).size() == 4);
}

TEST_CASE("Boolean model conditioning matches Bayes") {
    const CollapseModel m = boolean_model(3);
    CHECK(validate_model(m).valid);
    const OrthoPoset& l = m.logic();
    for (int p = 0; p < m.state_count(); ++p) {
        const auto& st = m.state(p);
        for (int b = 0; b < l.size(); ++b) {
            if (st(b) == Prob(0)) continue;
            const auto t = m.collapse(p, b);
            REQUIRE(t.has_value());
            // Oracle in floating point: p_b(a) = p(a ^ b) / p(b).
            for (int a = 0; a < l.size(); ++a) {
                const double expect = to_double(st(*l.meet(a, b))) / to_double(st(b));
                CHECK(std::abs(to_double(m.state(*t)(a)) - expect) < 1e-15);
            }
        }
    }
}

TEST_CASE("MO model transition table") {
    const CollapseModel m = mo_model(3);
    CHECK(validate_model(m).valid);
    const auto pure = m.pure_states();
    CHECK(pure.size() == 6);
    for (int p : pure) {
        CHECK(transition_prob(m, p, p) == Prob(1));
        // Values on each block {x, x'} sum to one.
        for (int k = 1; k <= 3; ++k) {
            const int x = m.logic().index_of("x" + std::to_string(k));
            CHECK(m.state(p)(x) + m.state(p)(m.logic().complement(x)) == Prob(1));
        }
        for (int q : pure) {
            const Prob t = transition_prob(m, p, q);
            CHECK(t == m.state(p)(m.indicator(q)));
            if (q != p) CHECK(t < Prob(1));
        }
    }
}

TEST_CASE("collapse rate cases") {
    const CollapseModel m = boolean_model(2);
    const int d0 = m.state_index("d0");
    const int mix = m.state_index("m0");
    const int a0 = m.indicator(d0), a1 = m.indicator(m.state_index("d1"));
    CHECK(collapse_rate(m, d0, a1) == Prob(0));
    CHECK(collapse_rate(m, d0, a0) == Prob(1));
    CHECK(collapse_rate(m, mix, a0) == Prob(1, 2));
    CHECK(collapse_rate(m, mix, m.logic().top()) == Prob(1));
}

TEST_CASE("derivation chain passes on the shipped good models") {
    for (int n = 1; n <= 4; ++n) {
        const ChainReport r = derivation_chain(boolean_model(n));
        CHECK(r.poset.valid);
        CHECK(r.model.valid);
        CHECK(r.cns_all);
        CHECK(r.successive_all);
        CHECK(r.guz.holds);
        CHECK(r.covering.holds);
        CHECK(r.cns_cases > 0);
    }
    for (int n = 2; n <= 5; ++n) {
        const ChainReport r = derivation_chain(mo_model(n));
        CHECK(r.model.valid);
        CHECK(r.cns_all);
        CHECK(r.successive_all);
        CHECK(r.guz.holds);
        CHECK(r.guz.premises > 0);
        CHECK(r.covering.holds);
    }
}

TEST_CASE("broken collapse model fails CNS") {
    const CollapseModel m = broken_collapse_model();
    const ChainReport r = derivation_chain(m);
    CHECK_FALSE(r.cns_all);
    CHECK_FALSE(r.model.valid);
    const int d0 = m.state_index("d0");
    const int a0 = m.indicator(d0);
    const CnsResult c = cns_check(m, d0, a0, {{m.logic().top()}});
    CHECK_FALSE(c.holds);
    CHECK(c.worst_deviation == Prob(1));
}

TEST_CASE("CNS requires commuting partitions") {
    const CollapseModel m = mo_model(2);
    const int x1 = m.logic().index_of("x1"), x2 = m.logic().index_of("x2");
    const std::vector<std::vector<int>> part{{x2, m.logic().complement(x2)}};
    CHECK_THROWS_AS(cns_check(m, 0, x1, part), LogicError);
    CHECK_THROWS_AS(successive_rate_identity(m, 0, x1, x2), LogicError);
    CHECK_THROWS_AS(cns_check(m, 0, x1, {{x1}}), LogicError);
}

TEST_CASE("successive rates are not applicable at zero probability") {
    const CollapseModel m = boolean_model(2);
    const int d0 = m.state_index("d0");
    const int a1 = m.indicator(m.state_index("d1"));
    CHECK_FALSE(successive_rate_identity(m, d0, a1, m.logic().top()).applicable);
}

TEST_CASE("model validation catches a wrong collapse target") {
    const CollapseModel good = boolean_model(2);
    auto table = good.collapse_table();
    const int d0 = good.state_index("d0"), d1 = good.state_index("d1");
    table[{d0, good.logic().top()}] = d1;
    const CollapseModel bad(good.logic(), good.states(), good.indicator_map(), table);
    CHECK_FALSE(validate_model(bad).valid);
}

TEST_CASE("Hilbert: Lueders collapse and probabilities") {
    Rng rng(3);
    const PureState psi = random_state(3, rng);
    const ComplexMatrix p = hilbert::projector(random_matrix(3, 2, rng));
    CHECK(max_abs(p * p - p) < 1e-12);
    const auto col = hilbert::lueders(psi, p);
    REQUIRE(col.has_value());
    const ComplexVector pv = p * psi.amplitudes();
    CHECK(std::abs(hilbert::probability(psi, p) - pv.squaredNorm()) < 1e-14);
    CHECK(std::abs(std::abs(col->amplitudes().dot(pv)) - pv.norm()) < 1e-12);
    CHECK(hilbert::collapse_condition_defect(psi, p) < 1e-12);
    ComplexMatrix q = ComplexMatrix::Zero(3, 3);
    q(0, 0) = 1;
    CHECK_FALSE(hilbert::lueders(PureState::basis_vector(3, 1), q).has_value());
}

TEST_CASE("Hilbert: probe checks in dimension 3") {
    const auto probes = hilbert::make_probes(3, 10, 3, 7);
    const auto cns = hilbert::cns_check(probes);
    CHECK(cns.holds);
    CHECK(cns.worst < 1e-10);
    const auto succ = hilbert::successive_check(probes);
    CHECK(succ.holds);
    const auto guz = hilbert::guz_check(3, 200, 9);
    CHECK(guz.holds);
    CHECK(guz.premises >= 100);
    const auto cov = hilbert::covering_check(3, 20, 10, 11);
    CHECK(cov.holds);
    CHECK(cov.pairs > 0);
}

TEST_CASE("Hilbert: CNS oracle on a product frame") {
    // psi on C^2 (x) C^2, A acts on the left factor, B_j are right-factor
    // projectors. CNS reduces to the partial trace being unchanged.
    Rng rng(12);
    const PureState psi = random_state(4, rng);
    ComplexMatrix a = ComplexMatrix::Zero(4, 4);
    a.block(0, 0, 2, 2) = ComplexMatrix::Identity(2, 2);
    std::vector<ComplexMatrix> part;
    for (int j = 0; j < 2; ++j) {
        ComplexMatrix b = ComplexMatrix::Zero(4, 4);
        b(j, j) = 1;
        b(2 + j, 2 + j) = 1;
        part.push_back(b);
    }
    const double lhs = std::norm(psi[0]) + std::norm(psi[1]);
    CHECK(std::abs(hilbert::probability(psi, a) - lhs) < 1e-14);
    CHECK(hilbert::cns_deviation(psi, a, part) < 1e-14);
    ComplexMatrix bad = ComplexMatrix::Zero(4, 4);
    bad(0, 0) = 1;
    CHECK_THROWS(hilbert::cns_deviation(psi, a, {bad}));
}

TEST_CASE("Hilbert: frame partitions enumerate set partitions") {
    const ComplexMatrix u = random_unitary(3, 1);
    CHECK(hilbert::frame_partitions(u).size() == 5);
    CHECK(hilbert::frame_propositions(u).size() == 7);
    CHECK(hilbert::frame_partitions(random_unitary(4, 1)).size() == 15);
}

}
