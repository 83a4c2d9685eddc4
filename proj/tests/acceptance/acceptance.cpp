// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "nosig/epr.hpp"
#include "nosig/io.hpp"
#include "nosig/map_classifier.hpp"
#include "nosig/quantum_logic.hpp"
#include "nosig/random.hpp"
#include "nosig/randomness.hpp"
#include "nosig/thermo.hpp"
#include "oracles.hpp"

using namespace nosig;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& measured) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), measured.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

ComplexMatrix random_effect(int dim, Rng& rng) {
    const ComplexMatrix u = random_unitary(dim, rng.next_u64());
    RealVector ev(dim);
    for (int i = 0; i < dim; ++i) ev(i) = rng.uniform();
    return u * ev.cast<Complex>().asDiagonal() * u.adjoint();
}

void trace_identity() {
    const auto t0 = Clock::now();
    Rng rng(101);
    double worst = 0.0;
    for (int dim = 2; dim <= 6; ++dim) {
        const ComplexMatrix r = random_effect(dim, rng);
        const SignalingReport rep = signaling_audit(Detector::quadratic(r), dim, 100, child_seed(101, dim));
        for (double x : rep.rates) worst = std::max(worst, std::abs(x - r.trace().real() / dim));
    }
    const double t = seconds_since(t0);
    report(1, worst <= 1e-10 && t < 5.0, "quadratic detectors: arm-B rate = Tr(R)/N, dims 2-6, 100 bases",
           fmt("worst %.2e, %.2f s", worst, t));
}

void cloner_signal() {
    const PureState c = PureState::basis_vector(3, 0);
    const SignalingReport rep = signaling_audit(Detector::cloner(c), 3, 100, 1);
    const double pinned = 0.221911507997965;
    const bool pass = rep.max_minus_min > 0.01 && std::abs(rep.max_minus_min - pinned) < 1e-12 && rep.verdict == Verdict::Signal;
    report(2, pass, "dim-3 cloner signals over 100 bases", fmt("spread %.15f, pinned %.15f", rep.max_minus_min, pinned));
}

void gleason_round_trip() {
    Rng rng(303);
    double worst_res = 0.0, worst_gap = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int dim = 3 + i % 4;
        const ComplexMatrix r = random_effect(dim, rng);
        const QuadraticFit fit = gleason_fit(Detector::quadratic(r), dim, child_seed(303, i));
        worst_res = std::max(worst_res, fit.residual);
        worst_gap = std::max(worst_gap, max_abs(fit.r - r));
    }
    report(3, worst_res <= 1e-9 && worst_gap <= 1e-9, "Gleason fit round trip on 100 Hermitian R, dims 3-6",
           fmt("residual %.2e, |R_fit - R| %.2e", worst_res, worst_gap));
}

void linearity_forcing() {
    const auto t0 = Clock::now();
    Rng rng(404);
    double worst_ok = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int dim = 2 + i % 3;
        const int kind = i % 3;
        Transformer t = kind == 0   ? Transformer::linear_conjugation(random_unitary(dim, rng.next_u64()))
                        : kind == 1 ? Transformer::antilinear(random_unitary(dim, rng.next_u64()))
                                    : Transformer::degenerate(random_psd(dim, dim, rng), random_state(dim, rng).amplitudes());
        const auto tomo = reconstruct_transformer(t, child_seed(404, i));
        const LinearityResult lin = linearity_test(t, tomo, 16, child_seed(405, i));
        worst_ok = std::max(worst_ok, lin.consistent ? lin.worst_error : 1.0);
    }
    const Transformer cl = Transformer::cloner(2);
    const LinearityResult bad = linearity_test(cl, reconstruct_transformer(cl), 16, 7);
    const double t = seconds_since(t0);
    report(4, worst_ok <= 1e-8 && !bad.consistent && bad.worst_error_mixture > 1e-3 && t < 30.0,
           "linearity forced for 50 transformers, cloner rejected",
           fmt("worst consistent %.2e, cloner mixture error %.3f, %.2f s", worst_ok, bad.worst_error_mixture, t));
}

void classifier_round_trip() {
    Rng rng(505);
    int wrong = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int dh = 2 + i % 4, dk = 2 + (i / 4) % 4;
        const OperatorMap lin = OperatorMap::conjugation(random_matrix(dk, dh, rng));
        const OperatorMap anti = OperatorMap::antilinear(random_matrix(dk, dh, rng));
        const OperatorMap deg = OperatorMap::degenerate(random_psd(dh, 2 + i % (dh - 1), rng), random_state(dk, rng).amplitudes());
        const Classification c1 = classify(lin), c2 = classify(anti), c3 = classify(deg);
        wrong += !std::holds_alternative<LinearType>(c1);
        wrong += !std::holds_alternative<AntilinearType>(c2);
        wrong += !std::holds_alternative<DegenerateType>(c3);
        const std::uint64_t s = child_seed(505, i);
        worst = std::max({worst, verify_classification(lin, c1, 16, s), verify_classification(anti, c2, 16, s),
                          verify_classification(deg, c3, 16, s)});
    }
    int rejected = 0;
    for (int i = 0; i < 20; ++i) {
        const int d = 2 + i % 4;
        const ComplexMatrix k1 = random_matrix(d, d, rng), k2 = random_matrix(d, d, rng);
        const OperatorMap w = OperatorMap::from_action(d, d, [&](const ComplexMatrix& a) {
            return ComplexMatrix(k1 * a * k1.adjoint() + k2 * a * k2.adjoint());
        });
        rejected += std::holds_alternative<NotRankOnePreserving>(classify(w));
    }
    report(5, wrong == 0 && worst <= 1e-8 && rejected == 20, "classifier round trip, 300 maps dims 2-5; Kraus rank 2 rejected",
           fmt("misclassified %.0f, worst verify %.2e, rejected %.0f/20", wrong, worst, rejected));
}

void pauli_constraints_check() {
    Rng rng(606);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const ComplexMatrix m = random_matrix(2, 2, rng);
        const OperatorMap w = i % 3 == 0   ? OperatorMap::conjugation(m)
                              : i % 3 == 1 ? OperatorMap::antilinear(m)
                                           : OperatorMap::degenerate(random_psd(2, 2, rng), random_state(2, rng).amplitudes());
        worst = std::max(worst, pauli_constraints(w).max_abs());
    }
    auto proportional_to_identity = [](const ComplexMatrix& c) {
        return std::abs(std::abs(c(0, 0)) - 1.0) < 1e-10 && max_abs(c - c(0, 0) * ComplexMatrix::Identity(2, 2)) < 1e-10;
    };
    const Classification plus = classify(case_one_form(true));
    const Classification minus = classify(case_one_form(false));
    const bool case_one = std::holds_alternative<LinearType>(plus) && proportional_to_identity(std::get<LinearType>(plus).c) &&
                          std::holds_alternative<AntilinearType>(minus) &&
                          proportional_to_identity(std::get<AntilinearType>(minus).c0);
    const Classification iia = classify(subcase_iia_form());
    const ComplexMatrix p = matrix_unit(2, 0, 0);
    bool sub_a = std::holds_alternative<LinearType>(iia);
    if (sub_a) {
        const ComplexMatrix c = std::get<LinearType>(iia).c;
        sub_a = max_abs(c * c.adjoint() - p) < 1e-10;
    }
    const Classification iib = classify(subcase_iib_form());
    bool sub_b = std::holds_alternative<DegenerateType>(iib);
    if (sub_b) {
        const auto& d = std::get<DegenerateType>(iib);
        sub_b = max_abs(d.d - ComplexMatrix::Identity(2, 2)) < 1e-10 && std::abs(std::abs(d.k(0)) - 1.0) < 1e-10;
    }
    report(6, worst <= 1e-10 && case_one && sub_a && sub_b, "dim-2 Pauli relations and canonical forms",
           fmt("worst residual %.2e", worst) + (case_one ? ", Case I +/- = I / J" : ", Case I wrong") + (sub_a ? ", IIa = P rho P" : ", IIa wrong") +
               (sub_b ? ", IIb = Tr(rho) k k*" : ", IIb wrong"));
}

void logic_chain() {
    const auto t0 = Clock::now();
    bool good = true;
    for (int n = 1; n <= 4; ++n) {
        const auto r = logic::derivation_chain(logic::boolean_model(n));
        good = good && r.model.valid && r.cns_all && r.successive_all && r.guz.holds && r.covering.holds;
    }
    for (int n = 2; n <= 5; ++n) {
        const auto r = logic::derivation_chain(logic::mo_model(n));
        good = good && r.model.valid && r.cns_all && r.successive_all && r.guz.holds && r.covering.holds;
    }
    const auto probes = logic::hilbert::make_probes(3, 20, 5, 1);
    const auto cns = logic::hilbert::cns_check(probes);
    const auto succ = logic::hilbert::successive_check(probes);
    const auto guz = logic::hilbert::guz_check(3, 10000, child_seed(1, 11));
    const auto cov = logic::hilbert::covering_check(3, 50, 20, child_seed(1, 12));
    const bool hilbert = cns.holds && succ.holds && guz.holds && cov.holds;
    const bool broken_fails = !logic::derivation_chain(logic::broken_collapse_model()).cns_all;
    const double t = seconds_since(t0);
    report(7, good && hilbert && broken_fails && t < 60.0,
           "CNS, successive rates, Guz, covering: Boolean n<=4, MO_n<=5, Hilbert d=3; broken model fails CNS",
           fmt("Hilbert worst CNS %.1e, worst successive %.1e, %.2f s", cns.worst, succ.worst, t));
}

void randomness_channel() {
    using namespace randomness;
    Rng rng(808);
    Bits msg;
    for (int i = 0; i < 32; ++i) msg.push_back(static_cast<std::uint8_t>(rng.bit()));
    const ChannelRun good = transmit(msg, 1000, BitSource::seeded_random(81), BitSource::periodic("01"), Predictor::adaptive());
    const ChannelRun same = transmit(msg, 1000, BitSource::seeded_random(82), BitSource::seeded_random(83), Predictor::adaptive());
    const FalsePositiveResult fp = false_positive_rate(84, 1000000, 1000, Predictor::flip());
    const double tail = binomial_tail(999, kDecisionThreshold);
    const bool pass = good.accuracy == 1.0 && same.accuracy >= 0.35 && same.accuracy <= 0.65 && fp.rate < 1e-4;
    report(8, pass, "randomness channel: periodic vs random decodes, identical sources do not, false positives rare",
           fmt("accuracy %.3f / %.3f, false-positive rate %.1e", good.accuracy, same.accuracy, fp.rate) +
               fmt(" (binomial tail %.1e)", tail));
}

void thermo_separation() {
    const auto t0 = Clock::now();
    thermo::GasConfig cfg;
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < 20; ++i) seeds.push_back(1000 + i);
    const thermo::EnsembleSummary s = thermo::run_ensemble(cfg, seeds);
    const double t = seconds_since(t0);
    const bool pass = s.separated && s.null_consistent && s.max_energy_drift <= 1e-9 && t < 600.0;
    report(9, pass, "thermo: anticipatory gap > 5 sigma of baseline, null within 2 sigma, energy drift <= 1e-9",
           fmt("separation %.2f sigma, null %.2f sigma, ", s.separation, s.null_z) +
               fmt("drift %.1e, %.0f s", s.max_energy_drift, t));
}

void determinism() {
    const std::string ex = NOSIG_EXAMPLES_DIR;
    const std::vector<std::vector<std::string>> runs{
        {"audit-detector", ex + "/detector_quadratic.json"},
        {"audit-detector", ex + "/detector_cloner.json"},
        {"classify-map", ex + "/map_identity.json"},
        {"classify-map", ex + "/map_depolarizing.json"},
        {"logic-check", ex + "/model_broken.json"},
        {"logic-check", ex + "/hilbert_d3.json"},
        {"randomness-demo", ex + "/randomness.json"},
        {"thermo-demo", ex + "/thermo_small.json"},
        {"export-model", "mo-3"}};
    int identical = 0;
    for (const auto& args : runs) {
        std::ostringstream o1, o2, e1, e2;
        const int c1 = cli::run(args, o1, e1);
        const int c2 = cli::run(args, o2, e2);
        identical += c1 == c2 && o1.str() == o2.str() && !o1.str().empty();
    }
    report(10, identical == static_cast<int>(runs.size()), "every subcommand reruns byte-identically",
           fmt("%.0f/%.0f identical", identical, static_cast<double>(runs.size())));
}

}  // namespace

int main() {
    trace_identity();
    cloner_signal();
    gleason_round_trip();
    linearity_forcing();
    classifier_round_trip();
    pauli_constraints_check();
    logic_chain();
    randomness_channel();
    determinism();
    thermo_separation();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
