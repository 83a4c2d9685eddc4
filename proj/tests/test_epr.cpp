#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nosig/epr.hpp"
#include "oracles.hpp"

using namespace nosig;

namespace {

ComplexMatrix random_effect(int dim, Rng& rng) {
    // Hermitian with spectrum in [0, 1].
    const ComplexMatrix u = random_unitary(dim, rng.next_u64());
    RealVector ev(dim);
    for (int i = 0; i < dim; ++i) ev(i) = rng.uniform();
    return u * ev.cast<Complex>().asDiagonal() * u.adjoint();
}

}  // namespace

TEST_SUITE("epr") {

TEST_CASE("EPR state is maximally correlated") {
    const EprState s = EprState::standard(3);
    const ComplexVector psi = s.psi();
    CHECK(std::abs(psi.norm() - 1.0) < 1e-15);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(psi(i * 3 + i) - 1.0 / std::sqrt(3.0)) < 1e-15);
}

TEST_CASE("collapse ensemble matches direct projection") {
    Rng rng(21);
    for (int dim = 2; dim <= 5; ++dim) {
        const Basis h(random_unitary(dim, rng.next_u64()));
        const ComplexMatrix r = random_effect(dim, rng);
        const Detector d = Detector::quadratic(r);
        const Ensemble e = collapse_arm_b(EprState::standard(dim), h);
        REQUIRE(e.members.size() == static_cast<std::size_t>(dim));
        for (double w : e.weights) CHECK(std::abs(w - 1.0 / dim) < 1e-14);
        const double expect = oracle::arm_b_rate(h.unitary(), [&](const oracle::Vec& v) { return oracle::quadratic(r, v); });
        CHECK(std::abs(arm_b_rate(d, e) - expect) < 1e-12);
    }
}

TEST_CASE("non-orthonormal measurement columns are rejected") {
    ComplexMatrix h(2, 2);
    h << 1, 1, 0, 1;
    CHECK_THROWS(collapse_arm_b(EprState::standard(2), h));
}

TEST_CASE("quadratic detectors do not signal") {
    Rng rng(7);
    for (int dim = 2; dim <= 6; ++dim) {
        const ComplexMatrix r = random_effect(dim, rng);
        const SignalingReport rep = signaling_audit(Detector::quadratic(r), dim, 30, 99);
        CHECK(rep.verdict == Verdict::NoSignal);
        const double trace_rate = r.trace().real() / dim;
        for (double x : rep.rates) CHECK(std::abs(x - trace_rate) < 1e-12);
    }
}

TEST_CASE("cloner detector signals by the pinned spread") {
    const PureState c = PureState::basis_vector(3, 0);
    const Detector d = Detector::cloner(c);
    const SignalingReport rep = signaling_audit(d, 3, 100, 1);
    // Enumeration oracle over the same 101 bases; frozen.
    const double pinned = 0.221911507997965;
    double lo = 2, hi = -1;
    for (int k = 0; k <= 100; ++k) {
        const double x = oracle::arm_b_rate(audit_basis(3, 1, k).unitary(),
                                            [&](const oracle::Vec& v) { return oracle::cloner(c.amplitudes(), v); });
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    CHECK(std::abs((hi - lo) - pinned) < 1e-12);
    CHECK(std::abs(rep.max_minus_min - pinned) < 1e-12);
    CHECK(rep.verdict == Verdict::Signal);
    // Computational basis: every collapsed state is a basis vector.
    CHECK(std::abs(rep.rates[0] - 1.0 / 3.0) < 1e-14);
}

TEST_CASE("power detector with exponent 1 is quadratic") {
    Rng rng(8);
    const ComplexMatrix r = random_effect(3, rng);
    CHECK(signaling_audit(Detector::power(r, 1.0), 3, 20, 5).verdict == Verdict::NoSignal);
    CHECK(signaling_audit(Detector::power(r, 2.0), 3, 20, 5).verdict == Verdict::Signal);
}

TEST_CASE("detector contract is enforced") {
    const Detector bad(2, [](const PureState&) { return 1.5; }, DetectorForm::Custom);
    const Ensemble e = collapse_arm_b(EprState::standard(2), Basis::computational(2));
    CHECK_THROWS_AS(arm_b_rate(bad, e), DetectorContractError);
    ComplexMatrix big = 2.0 * ComplexMatrix::Identity(2, 2);
    CHECK_THROWS(Detector::quadratic(big));
}

TEST_CASE("Gleason fit agrees with a least-squares oracle") {
    Rng rng(13);
    for (int dim = 2; dim <= 5; ++dim) {
        const ComplexMatrix r = random_effect(dim, rng);
        const Detector d = Detector::quadratic(r);
        const QuadraticFit fit = gleason_fit(d, dim, 4);
        CHECK(fit.residual < 1e-12);
        CHECK(max_abs(fit.r - r) < 1e-12);

        std::vector<oracle::Vec> states;
        std::vector<double> values;
        for (int s = 0; s < 4 * dim * dim; ++s) {
            states.push_back(random_state(dim, rng).amplitudes());
            values.push_back(d.rate(PureState(states.back())));
        }
        CHECK(max_abs(oracle::least_squares_form(states, values) - fit.r) < 1e-10);
    }
}

TEST_CASE("Gleason fit exposes non-quadratic detectors") {
    const QuadraticFit fit = gleason_fit(Detector::cloner(PureState::basis_vector(3, 0)), 3);
    CHECK(fit.residual > 1e-3);
}

TEST_CASE("tomography frame") {
    const auto frame = tomography_frame(4);
    CHECK(frame.size() == 16);
    CHECK(std::abs(frame[0][0] - Complex(1, 0)) < 1e-15);
}

TEST_CASE("sampled detector is seeded") {
    const Detector d = Detector::quadratic(0.3 * ComplexMatrix::Identity(2, 2));
    SampledDetector a(d, 5), b(d, 5);
    const PureState phi = PureState::basis_vector(2, 0);
    const auto ca = a.clicks(phi, 100000);
    CHECK(ca == b.clicks(phi, 100000));
    CHECK(std::abs(ca / 100000.0 - 0.3) < 4 * std::sqrt(0.21 / 100000));
}

TEST_CASE("transformer tomography reproduces linear transformers") {
    Rng rng(17);
    const ComplexMatrix c = random_matrix(3, 2, rng);
    const Transformer t = Transformer::linear_conjugation(c);
    const TransformerTomography tomo = reconstruct_transformer(t);
    CHECK(tomo.residual() < 1e-10);
    CHECK(tomo.hermiticity_defect() < 1e-12);
    const LinearityResult lin = linearity_test(t, tomo, 20, 3);
    CHECK(lin.consistent);
    CHECK(lin.worst_error < 1e-10);

    const Transformer anti = Transformer::antilinear(random_matrix(2, 3, rng));
    CHECK(linearity_test(anti, reconstruct_transformer(anti), 20, 3).consistent);

    ComplexVector psi(2);
    psi << 0.6, Complex(0, 0.8);
    const Transformer deg = Transformer::degenerate(random_psd(3, 2, rng), psi);
    CHECK(linearity_test(deg, reconstruct_transformer(deg), 20, 3).consistent);
}

TEST_CASE("the cloner fails the linearity test on mixtures") {
    const Transformer t = Transformer::cloner(2);
    const LinearityResult lin = linearity_test(t, reconstruct_transformer(t), 20, 3);
    CHECK_FALSE(lin.consistent);
    CHECK(lin.worst_error_mixture > 1e-3);
}

TEST_CASE("composed detector of a linear transformer is quadratic") {
    Rng rng(19);
    const ComplexMatrix u = random_unitary(3, 2);
    const Detector d = compose(Transformer::linear_conjugation(u), random_effect(3, rng));
    CHECK(signaling_audit(d, 3, 20, 1).verdict == Verdict::NoSignal);
    const Detector dc = compose(Transformer::cloner(2), 0.5 * ComplexMatrix::Identity(4, 4) + 0.5 * matrix_unit(4, 0, 0));
    CHECK(signaling_audit(dc, 2, 20, 1).verdict == Verdict::Signal);
}

}
