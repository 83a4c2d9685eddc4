#include <benchmark/benchmark.h>

#include "nosig/epr.hpp"
#include "nosig/map_classifier.hpp"
#include "nosig/quantum_logic.hpp"
#include "nosig/random.hpp"
#include "nosig/randomness.hpp"
#include "nosig/thermo.hpp"

using namespace nosig;

static void BM_Eigh(benchmark::State& state) {
    Rng rng(1);
    const ComplexMatrix h = random_hermitian(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(eigh(h));
}
BENCHMARK(BM_Eigh)->DenseRange(2, 8, 2);

static void BM_SignalingAudit(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const Detector d = Detector::cloner(PureState::basis_vector(dim, 0));
    for (auto _ : state) benchmark::DoNotOptimize(signaling_audit(d, dim, 100, 1));
}
BENCHMARK(BM_SignalingAudit)->Arg(3)->Arg(6);

static void BM_GleasonFit(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const Detector d = Detector::quadratic(0.5 * ComplexMatrix::Identity(dim, dim));
    for (auto _ : state) benchmark::DoNotOptimize(gleason_fit(d, dim));
}
BENCHMARK(BM_GleasonFit)->Arg(3)->Arg(6);

static void BM_Classify(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    Rng rng(2);
    const OperatorMap w = OperatorMap::antilinear(random_matrix(dim, dim, rng));
    for (auto _ : state) benchmark::DoNotOptimize(classify(w));
}
BENCHMARK(BM_Classify)->DenseRange(2, 5);

static void BM_DerivationChain(benchmark::State& state) {
    const logic::CollapseModel m = logic::boolean_model(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(logic::derivation_chain(m));
}
BENCHMARK(BM_DerivationChain)->DenseRange(2, 4);

static void BM_Transmit(benchmark::State& state) {
    const auto msg = randomness::parse_bits("10110010101100101011001010110010");
    for (auto _ : state) {
        benchmark::DoNotOptimize(randomness::transmit(msg, 1000, randomness::BitSource::seeded_random(1),
                                                      randomness::BitSource::periodic("01"),
                                                      randomness::Predictor::adaptive()));
    }
}
BENCHMARK(BM_Transmit);

static void BM_GasInterval(benchmark::State& state) {
    thermo::GasConfig cfg;
    cfg.n = static_cast<int>(state.range(0));
    thermo::GasState g(cfg, 1);
    for (auto _ : state) benchmark::DoNotOptimize(g.advance_interval(false));
}
BENCHMARK(BM_GasInterval)->Arg(100)->Arg(400);
BENCHMARK_MAIN();
