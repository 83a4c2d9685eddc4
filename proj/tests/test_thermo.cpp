#include <doctest.h>

#include <cmath>

#include "nosig/thermo.hpp"
#include "oracles.hpp"

using namespace nosig::thermo;

namespace {

GasConfig small_config() {
    GasConfig c;
    c.lx = 30;
    c.ly = 15;
    c.n = 60;
    c.window_half_width = 3;
    c.orifice_half_width = 3;
    c.calibration_intervals = 100;
    c.intervals = 120;
    c.max_openings = 10;
    return c;
}

GasConfig box() {
    GasConfig c;
    c.lx = 20;
    c.ly = 10;
    c.window_half_width = 2;
    c.orifice_half_width = 2;
    return c;
}

void run_for(GasState& g, double t, double dt, bool open = false) {
    const int steps = static_cast<int>(std::lround(t / dt));
    for (int i = 0; i < steps; ++i) g.step(dt, open);
}

bool same_series(const RunResult& a, const RunResult& b, std::size_t upto) {
    for (std::size_t i = 0; i < upto; ++i) {
        const auto& x = a.series[i];
        const auto& y = b.series[i];
        if (x.t_a != y.t_a || x.t_b != y.t_b || x.n_a != y.n_a || x.energy != y.energy) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("thermo") {

TEST_CASE("config validation") {
    GasConfig c;
    CHECK_NOTHROW(c.validate());
    c.orifice_half_width = 10;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = GasConfig{};
    c.radius = 20;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = GasConfig{};
    c.n = 100000;
    CHECK_THROWS_AS(GasState(c, 1), std::invalid_argument);
}

TEST_CASE("seeded initial state") {
    const GasConfig c = small_config();
    const GasState a(c, 3), b(c, 3);
    CHECK(a.positions().size() == 60);
    for (int i = 0; i < a.size(); ++i) {
        CHECK(a.positions()[i].x == b.positions()[i].x);
        CHECK(a.velocities()[i].y == b.velocities()[i].y);
    }
    const ChamberStats s = a.chambers();
    CHECK(s.n_a == 30);
    CHECK(s.n_b == 30);
    CHECK(s.t_a() == doctest::Approx(c.temperature).epsilon(1e-12));
    CHECK(s.t_b() == doctest::Approx(c.temperature).epsilon(1e-12));
}

TEST_CASE("free flight is a straight line") {
    GasState g(box(), {{3, 3}, {15, 7}}, {{0.5, 0.25}, {-0.3, 0.1}});
    run_for(g, 4.0, 0.05);
    CHECK(g.positions()[0].x == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(g.positions()[0].y == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(g.positions()[1].x == doctest::Approx(13.8).epsilon(1e-12));
    CHECK(g.time() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("outer walls reflect") {
    GasState g(box(), {{2, 5}, {18.8, 5}}, {{-1, 0}, {1, 0}});
    run_for(g, 3.0, 0.05);
    CHECK(g.velocities()[0].x == 1.0);
    CHECK(g.velocities()[1].x == -1.0);
    CHECK(g.kinetic_energy() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("head-on collision exchanges velocities") {
    GasState g(box(), {{4, 5}, {6, 5}}, {{1, 0}, {-1, 0}});
    double vx1 = 1, vy1 = 0, vx2 = -1, vy2 = 0;
    oracle::elastic_pair(4, 5, 6, 5, vx1, vy1, vx2, vy2);
    run_for(g, 1.0, 0.05);
    CHECK(g.velocities()[0].x == doctest::Approx(vx1).epsilon(1e-14));
    CHECK(g.velocities()[1].x == doctest::Approx(vx2).epsilon(1e-14));
    CHECK(std::abs(g.velocities()[0].y) < 1e-14);
    CHECK(g.positions()[0].x < g.positions()[1].x);
}

TEST_CASE("oblique collision conserves momentum and energy") {
    GasState g(box(), {{4, 5}, {6, 5.4}}, {{1, 0.1}, {-1, 0}});
    const double e0 = g.kinetic_energy();
    run_for(g, 1.5, 0.05);
    const auto& v = g.velocities();
    CHECK(v[0].x + v[1].x == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std::abs(v[0].y + v[1].y - 0.1) < 1e-14);
    CHECK(g.kinetic_energy() == doctest::Approx(e0).epsilon(1e-14));
    CHECK(std::abs(v[0].y - 0.1) > 1e-3);
}

TEST_CASE("steps above the stability bound are refused") {
    GasState g(box(), {{3, 3}, {15, 7}}, {{1, 0}, {0, 1}});
    CHECK(g.stability_bound() == doctest::Approx(0.125));
    CHECK_THROWS_AS(g.step(0.2, false), std::invalid_argument);
}

TEST_CASE("closed partition reflects and records window flux") {
    GasState g(box(), {{9, 5}, {3, 1}}, {{1, 0}, {0, 0.5}});
    const FluxSample f = g.advance_interval(false);
    CHECK(f.flux_a == doctest::Approx(2.0));
    CHECK(f.flux_b == 0.0);
    CHECK(g.velocities()[0].x == -1.0);
    CHECK(g.chambers().n_a == 2);
}

TEST_CASE("flux outside the window is not recorded") {
    GasState g(box(), {{9, 1}, {3, 9}}, {{1, 0}, {0, 0}});
    const FluxSample f = g.advance_interval(false);
    CHECK(f.flux_a == 0.0);
    CHECK(g.velocities()[0].x == -1.0);
}

TEST_CASE("open orifice lets centres through") {
    GasState g(box(), {{9, 5}, {3, 1}}, {{1, 0}, {0, 0.5}});
    const FluxSample f = g.advance_interval(true);
    CHECK(f.passed_ab == 1);
    CHECK(g.chambers().n_b == 1);
    CHECK(g.velocities()[0].x == 1.0);
}

TEST_CASE("energy is conserved in a closed run") {
    GasState g(small_config(), 8);
    const double e0 = g.kinetic_energy();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        g.advance_interval(i % 7 == 3);
        worst = std::max(worst, std::abs(g.kinetic_energy() - e0) / e0);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("orifice schedule") {
    CHECK_THROWS(OrificeSchedule({{2.0, 1.0}, {2.5, 1.0}}));
    CHECK_THROWS(OrificeSchedule({{2.0, 0.0}}));
    const OrificeSchedule s({{2.0, 1.0}, {5.0, 2.0}});
    CHECK(s.open_during(2.0, 3.0));
    CHECK_FALSE(s.open_during(3.0, 4.0));
    CHECK(s.open_during(6.0, 7.0));
}

TEST_CASE("fluctuation detection") {
    std::vector<FluxSample> t(4);
    for (int i = 0; i < 4; ++i) t[i].time = i;
    t[1].flux_a = 5;
    t[3].flux_a = 2;
    t[3].flux_b = 1.5;
    const ValveSpec v{3, 1.0, 1.0};
    const auto hits = detect_fluctuations(t, v);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0] == 1.0);
}

TEST_CASE("final quarter gap") {
    RunResult r;
    for (int i = 0; i < 8; ++i) r.series.push_back({double(i), 1.0 + i, 1.0, 0, 0, 0, 0, false});
    CHECK(r.final_quarter_gap() == doctest::Approx(6.5));
}

TEST_CASE("no activations means anticipatory equals baseline") {
    const GasConfig c = small_config();
    const RunResult base = run_baseline(c, 4, 1e9);
    const RunResult ant = run_anticipatory(c, 4, 1e9);
    CHECK(base.schedule.empty());
    CHECK(ant.schedule.empty());
    REQUIRE(base.series.size() == ant.series.size());
    CHECK(same_series(base, ant, base.series.size()));
}

TEST_CASE("replay matches the closed pass before the first opening") {
    const GasConfig c = small_config();
    const double thr = calibrate_threshold(c, 21);
    const RetroChannel ch = record_activations(c, 4, thr);
    REQUIRE_FALSE(ch.activation_times.empty());
    const RunResult closed = run_schedule(c, 4, OrificeSchedule{}, "closed", thr);
    const RunResult rep = replay(c, 4, ch);
    const auto before = static_cast<std::size_t>(std::floor(ch.activation_times.front() / c.sampling_interval));
    CHECK(same_series(closed, rep, before));
    CHECK(rep.schedule.size() == ch.activation_times.size());
}

TEST_CASE("replay rejects a mismatched seed or config") {
    const GasConfig c = small_config();
    const RetroChannel ch = record_activations(c, 4, 0.5);
    CHECK_THROWS_AS(replay(c, 5, ch), std::invalid_argument);
    GasConfig d = c;
    d.radius = 0.45;
    CHECK_THROWS_AS(replay(d, 4, ch), std::invalid_argument);
    CHECK(config_digest(c) != config_digest(d));
}

TEST_CASE("shuffled null keeps the opening count") {
    const GasConfig c = small_config();
    const RunResult r = run_shuffled(c, 2, 7, 99, 0.5);
    CHECK(r.schedule.size() == 7);
    CHECK(r.energy_drift < 1e-12);
}

TEST_CASE("anticipatory openings pass molecules from A to B") {
    const GasConfig c = small_config();
    const double thr = calibrate_threshold(c, 6);
    const RunResult ant = run_anticipatory(c, 6, thr);
    CHECK_FALSE(ant.schedule.empty());
    CHECK(ant.passed_ab > ant.passed_ba);
}

TEST_CASE("ensemble is deterministic and thread independent") {
    const GasConfig c = small_config();
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    const EnsembleSummary a = run_ensemble(c, seeds, 1);
    const EnsembleSummary b = run_ensemble(c, seeds, 3);
    REQUIRE(a.seeds.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.seeds[i].gap_baseline == b.seeds[i].gap_baseline);
        CHECK(a.seeds[i].gap_anticipatory == b.seeds[i].gap_anticipatory);
        CHECK(a.seeds[i].gap_null == b.seeds[i].gap_null);
    }
    CHECK(a.separation == b.separation);
    CHECK(a.max_energy_drift < 1e-12);
}

}
