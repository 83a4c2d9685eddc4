#include "nosig/thermo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "nosig/random.hpp"

namespace nosig::thermo {

void GasConfig::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    };
    require(lx > 0 && ly > 0, "box dimensions must be positive");
    require(n >= 2, "need at least two particles");
    require(radius > 0 && 4 * radius < std::min(0.5 * lx, ly), "radius must be positive and small against the chambers");
    require(temperature > 0, "temperature must be positive");
    require(window_half_width > 0 && window_half_width <= 0.5 * ly, "window must fit on the partition");
    require(orifice_half_width > 0 && orifice_half_width <= window_half_width, "orifice must lie inside the window");
    require(sampling_interval > 0, "sampling interval must be positive");
    require(threshold_percentile > 0 && threshold_percentile < 1, "threshold percentile must lie in (0, 1)");
    require(calibration_intervals >= 10, "calibration needs at least 10 intervals");
    require(open_intervals >= 1, "openings last at least one interval");
    require(lead >= 0, "lead must be non-negative");
    require(intervals >= 4, "need at least four intervals");
    require(open_fraction > 0 && open_fraction <= 1, "opening fraction must lie in (0, 1]");
    require(max_openings >= 0, "max openings must be non-negative");
}

OrificeSchedule::OrificeSchedule(std::vector<Opening> openings) : openings_(std::move(openings)) {
    for (std::size_t i = 0; i < openings_.size(); ++i) {
        if (openings_[i].duration <= 0) throw std::invalid_argument("opening duration must be positive");
        if (i > 0 && openings_[i].open_time < openings_[i - 1].open_time + openings_[i - 1].duration) {
            throw std::invalid_argument("openings must be sorted and non-overlapping");
        }
    }
}

bool OrificeSchedule::open_during(double t0, double t1) const {
    const double eps = 1e-9 * std::max(1.0, std::abs(t1));
    for (const auto& o : openings_) {
        if (o.open_time <= t0 + eps && t1 <= o.open_time + o.duration + eps) return true;
    }
    return false;
}

GasState::GasState(const GasConfig& cfg, std::uint64_t seed) : cfg_(cfg), seed_(seed) {
    cfg_.validate();
    Rng rng(seed);
    const double half = cfg_.partition();
    const int counts[2] = {cfg_.n / 2, cfg_.n - cfg_.n / 2};
    for (int side = 0; side < 2; ++side) {
        const int m = counts[side];
        const int cols = static_cast<int>(std::ceil(std::sqrt(m * half / cfg_.ly)));
        const int rows = (m + cols - 1) / cols;
        const double sx = half / cols;
        const double sy = cfg_.ly / rows;
        if (std::min(sx, sy) < 2.2 * cfg_.radius) throw std::invalid_argument("too many particles for the chamber");
        const double jx = 0.5 * (0.5 * sx - cfg_.radius * 1.1);
        const double jy = 0.5 * (0.5 * sy - cfg_.radius * 1.1);
        const double x0 = side == 0 ? 0.0 : half;
        const std::size_t first = pos_.size();
        for (int i = 0; i < m; ++i) {
            const int cx = i % cols;
            const int cy = i / cols;
            pos_.push_back({x0 + (cx + 0.5) * sx + jx * (2 * rng.uniform() - 1),
                            (cy + 0.5) * sy + jy * (2 * rng.uniform() - 1)});
            vel_.push_back({rng.normal(), rng.normal()});
        }
        double ke = 0.0;
        for (std::size_t i = first; i < vel_.size(); ++i) ke += 0.5 * (vel_[i].x * vel_[i].x + vel_[i].y * vel_[i].y);
        const double scale = std::sqrt(cfg_.temperature * m / ke);
        for (std::size_t i = first; i < vel_.size(); ++i) {
            vel_[i].x *= scale;
            vel_[i].y *= scale;
        }
    }
}

GasState::GasState(const GasConfig& cfg, std::vector<Vec2> positions, std::vector<Vec2> velocities)
    : cfg_(cfg), pos_(std::move(positions)), vel_(std::move(velocities)) {
    if (pos_.size() != vel_.size()) throw std::invalid_argument("positions and velocities differ in length");
    cfg_.n = static_cast<int>(pos_.size());
    if (cfg_.n < 2) cfg_.n = 2;
    cfg_.validate();
    cfg_.n = static_cast<int>(pos_.size());
}

double GasState::stability_bound() const {
    double v2 = 0.0;
    for (const auto& v : vel_) v2 = std::max(v2, v.x * v.x + v.y * v.y);
    if (v2 == 0.0) return std::numeric_limits<double>::infinity();
    return cfg_.radius / std::sqrt(v2) / 4.0;
}

double GasState::kinetic_energy() const {
    double ke = 0.0;
    for (const auto& v : vel_) ke += 0.5 * (v.x * v.x + v.y * v.y);
    return ke;
}

ChamberStats GasState::chambers() const {
    ChamberStats c;
    const double px = cfg_.partition();
    for (std::size_t i = 0; i < pos_.size(); ++i) {
        const double ke = 0.5 * (vel_[i].x * vel_[i].x + vel_[i].y * vel_[i].y);
        if (pos_[i].x < px) {
            ++c.n_a;
            c.ke_a += ke;
        } else {
            ++c.n_b;
            c.ke_b += ke;
        }
    }
    return c;
}

double GasState::entropy() const {
    const ChamberStats c = chambers();
    const double area = cfg_.partition() * cfg_.ly;
    double s = 0.0;
    if (c.n_a > 0) s += c.n_a * (std::log(area / c.n_a) + std::log(c.t_a()));
    if (c.n_b > 0) s += c.n_b * (std::log(area / c.n_b) + std::log(c.t_b()));
    return s;
}

void GasState::step(double dt, bool orifice_open) {
    if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
    if (dt > stability_bound() * (1.0 + 1e-12)) throw std::invalid_argument("time step exceeds the stability bound");
    step_unchecked(dt, orifice_open);
}

void GasState::step_unchecked(double dt, bool orifice_open) {
    const double px = cfg_.partition();
    const double r = cfg_.radius;
    const double mid = 0.5 * cfg_.ly;
    for (std::size_t i = 0; i < pos_.size(); ++i) {
        auto& p = pos_[i];
        auto& v = vel_[i];
        const bool was_a = p.x < px;
        p.x += v.x * dt;
        p.y += v.y * dt;

        if (p.x < r && v.x < 0) v.x = -v.x;
        if (p.x > cfg_.lx - r && v.x > 0) v.x = -v.x;
        if (p.y < r && v.y < 0) v.y = -v.y;
        if (p.y > cfg_.ly - r && v.y > 0) v.y = -v.y;

        const double off = std::abs(p.y - mid);
        const bool through = orifice_open && off < cfg_.orifice_half_width;
        const bool on_window = off < cfg_.window_half_width;
        if (was_a) {
            if (p.x >= px) {
                if (through) {
                    ++acc_.passed_ab;
                    continue;
                }
                p.x = 2 * px - p.x;
            }
            if (!through && p.x + r > px && v.x > 0) {
                if (on_window) acc_.flux_a += 2 * v.x;
                v.x = -v.x;
            }
        } else {
            if (p.x < px) {
                if (through) {
                    ++acc_.passed_ba;
                    continue;
                }
                p.x = 2 * px - p.x;
                if (p.x < px) p.x = px;
            }
            if (!through && p.x - r < px && v.x < 0) {
                if (on_window) acc_.flux_b -= 2 * v.x;
                v.x = -v.x;
            }
        }
    }
    collide();
    time_ += dt;
}

void GasState::collide() {
    const double px = cfg_.partition();
    const double d2max = 4 * cfg_.radius * cfg_.radius;
    const double cell = std::max(2 * cfg_.radius, 1e-9);
    const int nx = std::max(1, static_cast<int>(cfg_.lx / cell));
    const int ny = std::max(1, static_cast<int>(cfg_.ly / cell));
    const double wx = cfg_.lx / nx;
    const double wy = cfg_.ly / ny;
    cell_head_.assign(static_cast<std::size_t>(nx) * ny, -1);
    cell_next_.assign(pos_.size(), -1);
    auto cell_of = [&](const Vec2& p, int& cx, int& cy) {
        cx = std::clamp(static_cast<int>(std::floor(p.x / wx)), 0, nx - 1);
        cy = std::clamp(static_cast<int>(std::floor(p.y / wy)), 0, ny - 1);
    };
    for (int i = static_cast<int>(pos_.size()) - 1; i >= 0; --i) {
        int cx, cy;
        cell_of(pos_[i], cx, cy);
        const int c = cy * nx + cx;
        cell_next_[i] = cell_head_[c];
        cell_head_[c] = i;
    }
    for (int i = 0; i < static_cast<int>(pos_.size()); ++i) {
        int cx, cy;
        cell_of(pos_[i], cx, cy);
        const bool side_a = pos_[i].x < px;
        for (int dy = -1; dy <= 1; ++dy) {
            const int yy = cy + dy;
            if (yy < 0 || yy >= ny) continue;
            for (int dx = -1; dx <= 1; ++dx) {
                const int xx = cx + dx;
                if (xx < 0 || xx >= nx) continue;
                for (int j = cell_head_[yy * nx + xx]; j >= 0; j = cell_next_[j]) {
                    if (j <= i || (pos_[j].x < px) != side_a) continue;
                    const double rx = pos_[i].x - pos_[j].x;
                    const double ry = pos_[i].y - pos_[j].y;
                    const double d2 = rx * rx + ry * ry;
                    if (d2 >= d2max || d2 == 0.0) continue;
                    const double b = (vel_[i].x - vel_[j].x) * rx + (vel_[i].y - vel_[j].y) * ry;
                    if (b >= 0) continue;
                    const double f = b / d2;
                    vel_[i].x -= f * rx;
                    vel_[i].y -= f * ry;
                    vel_[j].x += f * rx;
                    vel_[j].y += f * ry;
                }
            }
        }
    }
}

FluxSample GasState::advance_interval(bool orifice_open) {
    const double t0 = time_;
    const double span = cfg_.sampling_interval;
    acc_ = FluxSample{};
    acc_.time = t0;
    const int nominal = std::max(1, static_cast<int>(std::ceil(span / stability_bound())));
    const double base = span / nominal;
    double done = 0.0;
    while (span - done > 1e-12 * span) {
        const double dt = std::min({base, span - done, stability_bound()});
        step_unchecked(dt, orifice_open);
        done += dt;
    }
    time_ = t0 + span;
    return acc_;
}

std::vector<double> detect_fluctuations(const std::vector<FluxSample>& trajectory, const ValveSpec& valve) {
    std::vector<double> out;
    for (const auto& f : trajectory) {
        if ((f.flux_a - f.flux_b) / valve.sampling_interval > valve.threshold) out.push_back(f.time);
    }
    return out;
}

double calibrate_threshold(const GasConfig& cfg, std::uint64_t seed) {
    GasState s(cfg, child_seed(seed, 0xca11b));
    std::vector<double> diffs;
    for (int k = 0; k < cfg.calibration_intervals; ++k) {
        const FluxSample f = s.advance_interval(false);
        diffs.push_back((f.flux_a - f.flux_b) / cfg.sampling_interval);
    }
    std::sort(diffs.begin(), diffs.end());
    const auto idx = static_cast<std::size_t>(std::floor(cfg.threshold_percentile * (diffs.size() - 1)));
    double q = diffs[idx];
    if (q <= 0) {
        const auto it = std::upper_bound(diffs.begin(), diffs.end(), 0.0);
        q = it != diffs.end() ? *it : 1.0;
    }
    return q;
}

double RunResult::final_quarter_gap() const {
    if (series.empty()) return 0.0;
    const std::size_t start = series.size() - std::max<std::size_t>(1, series.size() / 4);
    double sum = 0.0;
    for (std::size_t i = start; i < series.size(); ++i) sum += series[i].t_a - series[i].t_b;
    return sum / static_cast<double>(series.size() - start);
}

std::string config_digest(const GasConfig& c) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "lx=%.17g;ly=%.17g;n=%d;r=%.17g;T=%.17g;w=%.17g;h=%.17g;dt=%.17g;thr=%.17g;q=%.17g;cal=%d;"
                  "open=%d;lead=%.17g;intervals=%d;frac=%.17g;max=%d",
                  c.lx, c.ly, c.n, c.radius, c.temperature, c.window_half_width, c.orifice_half_width,
                  c.sampling_interval, c.threshold, c.threshold_percentile, c.calibration_intervals, c.open_intervals,
                  c.lead, c.intervals, c.open_fraction, c.max_openings);
    return buf;
}

namespace {

TimePoint snapshot(const GasState& s, bool open) {
    const ChamberStats c = s.chambers();
    TimePoint tp;
    tp.time = s.time();
    tp.t_a = c.t_a();
    tp.t_b = c.t_b();
    tp.n_a = c.n_a;
    tp.n_b = c.n_b;
    tp.entropy = s.entropy();
    tp.energy = c.ke_a + c.ke_b;
    tp.open = open;
    return tp;
}

struct Recorder {
    RunResult res;
    double e0 = 0.0;

    Recorder(const GasState& s, std::string mode, double threshold) {
        res.mode = std::move(mode);
        res.seed = s.seed();
        res.threshold = threshold;
        res.series.push_back(snapshot(s, false));
        e0 = res.series.front().energy;
    }

    void add(const GasState& s, const FluxSample& f, bool open) {
        res.flux.push_back(f);
        res.series.push_back(snapshot(s, open));
        res.passed_ab += f.passed_ab;
        res.passed_ba += f.passed_ba;
        res.energy_drift = std::max(res.energy_drift, std::abs(res.series.back().energy - e0) / e0);
    }
};

int opening_limit(const GasConfig& cfg) { return static_cast<int>(std::floor(cfg.open_fraction * cfg.intervals)); }

bool activated(const GasConfig& cfg, const FluxSample& f, double threshold) {
    return (f.flux_a - f.flux_b) / cfg.sampling_interval > threshold;
}

Opening opening_at(const GasConfig& cfg, int k) {
    return {k * cfg.sampling_interval, cfg.open_intervals * cfg.sampling_interval};
}

}  // namespace

RetroChannel record_activations(const GasConfig& cfg, std::uint64_t seed, double threshold) {
    GasState s(cfg, seed);
    RetroChannel ch;
    ch.lead = cfg.lead;
    ch.seed = seed;
    ch.config_digest = config_digest(cfg);
    const int limit = opening_limit(cfg);
    int blocked_until = -1;
    for (int k = 0; k < cfg.intervals; ++k) {
        const FluxSample f = s.advance_interval(false);
        if (k > blocked_until && k + cfg.open_intervals <= limit &&
            static_cast<int>(ch.activation_times.size()) < cfg.max_openings && activated(cfg, f, threshold)) {
            ch.activation_times.push_back(k * cfg.sampling_interval);
            blocked_until = k + cfg.open_intervals - 1;
        }
    }
    return ch;
}

RunResult run_schedule(const GasConfig& cfg, std::uint64_t seed, const OrificeSchedule& schedule,
                       const std::string& mode, double threshold) {
    GasState s(cfg, seed);
    Recorder rec(s, mode, threshold);
    rec.res.schedule = schedule;
    for (int k = 0; k < cfg.intervals; ++k) {
        const double t0 = k * cfg.sampling_interval;
        const bool open = schedule.open_during(t0, t0 + cfg.sampling_interval);
        const FluxSample f = s.advance_interval(open);
        rec.add(s, f, open);
    }
    return std::move(rec.res);
}

RunResult replay(const GasConfig& cfg, std::uint64_t seed, const RetroChannel& channel) {
    if (channel.seed != seed) throw std::invalid_argument("replay seed differs from the recording pass");
    if (channel.config_digest != config_digest(cfg)) throw std::invalid_argument("replay config differs from the recording pass");
    std::vector<Opening> openings;
    for (double t : channel.activation_times) openings.push_back({t, cfg.open_intervals * cfg.sampling_interval});
    return run_schedule(cfg, seed, OrificeSchedule(std::move(openings)), "two-pass", 0.0);
}

RunResult run_baseline(const GasConfig& cfg, std::uint64_t seed, double threshold) {
    GasState s(cfg, seed);
    Recorder rec(s, "baseline", threshold);
    const int limit = opening_limit(cfg);
    std::vector<Opening> openings;
    int open_from = -1;
    int open_until = -1;
    for (int k = 0; k < cfg.intervals; ++k) {
        const bool open = k >= open_from && k <= open_until;
        const FluxSample f = s.advance_interval(open);
        rec.add(s, f, open);
        if (!open && k + 1 + cfg.open_intervals <= limit && static_cast<int>(openings.size()) < cfg.max_openings &&
            activated(cfg, f, threshold)) {
            open_from = k + 1;
            open_until = k + cfg.open_intervals;
            openings.push_back(opening_at(cfg, open_from));
        }
    }
    rec.res.schedule = OrificeSchedule(std::move(openings));
    return std::move(rec.res);
}

RunResult run_anticipatory(const GasConfig& cfg, std::uint64_t seed, double threshold) {
    GasState s(cfg, seed);
    Recorder rec(s, "anticipatory", threshold);
    const int limit = opening_limit(cfg);
    std::vector<Opening> openings;
    int open_until = -1;
    for (int k = 0; k < cfg.intervals; ++k) {
        if (k <= open_until) {
            const FluxSample f = s.advance_interval(true);
            rec.add(s, f, true);
            continue;
        }
        if (k + cfg.open_intervals <= limit && static_cast<int>(openings.size()) < cfg.max_openings) {
            GasState ahead = s;
            const FluxSample probe = ahead.advance_interval(false);
            if (!activated(cfg, probe, threshold)) {
                s = std::move(ahead);
                rec.add(s, probe, false);
                continue;
            }
            openings.push_back(opening_at(cfg, k));
            open_until = k + cfg.open_intervals - 1;
            const FluxSample f = s.advance_interval(true);
            rec.add(s, f, true);
            continue;
        }
        const FluxSample f = s.advance_interval(false);
        rec.add(s, f, false);
    }
    rec.res.schedule = OrificeSchedule(std::move(openings));
    return std::move(rec.res);
}

RunResult run_shuffled(const GasConfig& cfg, std::uint64_t seed, int count, std::uint64_t shuffle_seed,
                       double threshold) {
    const int limit = opening_limit(cfg);
    std::vector<int> slots;
    for (int k = 0; k + cfg.open_intervals <= limit; k += cfg.open_intervals) slots.push_back(k);
    if (count > static_cast<int>(slots.size())) throw std::invalid_argument("more openings than free slots");
    Rng rng(shuffle_seed);
    for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
        const std::size_t j = i + rng.below(slots.size() - i);
        std::swap(slots[i], slots[j]);
    }
    slots.resize(count);
    std::sort(slots.begin(), slots.end());
    std::vector<Opening> openings;
    for (int k : slots) openings.push_back(opening_at(cfg, k));
    return run_schedule(cfg, seed, OrificeSchedule(std::move(openings)), "shuffled", threshold);
}

namespace {

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
    mean = xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

double entropy_change(const RunResult& r) {
    const std::size_t start = r.series.size() - std::max<std::size_t>(1, r.series.size() / 4);
    double sum = 0.0;
    for (std::size_t i = start; i < r.series.size(); ++i) sum += r.series[i].entropy;
    return sum / static_cast<double>(r.series.size() - start) - r.series.front().entropy;
}

}  // namespace

EnsembleSummary run_ensemble(const GasConfig& cfg, const std::vector<std::uint64_t>& seeds, int threads,
                             std::vector<RunResult>* example_runs) {
    cfg.validate();
    EnsembleSummary sum;
    sum.seeds.resize(seeds.size());
    std::vector<RunResult> first(3);

    auto work = [&](std::size_t i) {
        const std::uint64_t seed = seeds[i];
        const double thr = cfg.threshold > 0 ? cfg.threshold : calibrate_threshold(cfg, seed);
        RunResult base = run_baseline(cfg, seed, thr);
        RunResult ant = run_anticipatory(cfg, seed, thr);
        RunResult null = run_shuffled(cfg, seed, static_cast<int>(ant.schedule.size()), child_seed(seed, 0x5f1e), thr);
        SeedOutcome& o = sum.seeds[i];
        o.seed = seed;
        o.threshold = thr;
        o.gap_baseline = base.final_quarter_gap();
        o.gap_anticipatory = ant.final_quarter_gap();
        o.gap_null = null.final_quarter_gap();
        o.openings_baseline = static_cast<int>(base.schedule.size());
        o.openings_anticipatory = static_cast<int>(ant.schedule.size());
        o.entropy_change_baseline = entropy_change(base);
        o.entropy_change_anticipatory = entropy_change(ant);
        o.energy_drift = std::max({base.energy_drift, ant.energy_drift, null.energy_drift});
        if (i == 0 && example_runs) {
            first[0] = std::move(base);
            first[1] = std::move(ant);
            first[2] = std::move(null);
        }
    };

    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max<int>(1, static_cast<int>(seeds.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < seeds.size(); i = next++) work(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    std::vector<double> gb, ga, gn;
    for (const auto& o : sum.seeds) {
        gb.push_back(o.gap_baseline);
        ga.push_back(o.gap_anticipatory);
        gn.push_back(o.gap_null);
        sum.max_energy_drift = std::max(sum.max_energy_drift, o.energy_drift);
    }
    mean_std(gb, sum.mean_baseline, sum.std_baseline);
    mean_std(ga, sum.mean_anticipatory, sum.std_anticipatory);
    mean_std(gn, sum.mean_null, sum.std_null);
    if (sum.std_baseline > 0) {
        sum.separation = std::abs(sum.mean_anticipatory) / sum.std_baseline;
        sum.null_z = std::abs(sum.mean_null - sum.mean_baseline) / sum.std_baseline;
    }
    sum.separated = sum.separation > 5.0;
    sum.null_consistent = sum.std_baseline > 0 && sum.null_z <= 2.0;
    if (example_runs) *example_runs = std::move(first);
    return sum;
}

}  // namespace nosig::thermo
