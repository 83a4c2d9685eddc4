// Partitioned two-dimensional hard-disk gas with a pressure-activated valve.
//
// Chamber A is x < partition, chamber B is x > partition. The valve window
// is the stretch |y - ly/2| < window_half_width of the partition; momentum
// delivered to it from each side is recorded per sampling interval. An
// orifice of half-width orifice_half_width can be opened in the middle of
// the window, letting disk centres through.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nosig::thermo {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct GasConfig {
    double lx = 80.0;
    double ly = 40.0;
    int n = 400;
    double radius = 0.5;
    double temperature = 1.0;
    double window_half_width = 5.0;
    double orifice_half_width = 5.0;
    double sampling_interval = 1.0;
    /// Activation threshold on (flux_A - flux_B) / interval; <= 0 means
    /// calibrate it at `threshold_percentile` from a closed run.
    double threshold = 0.0;
    double threshold_percentile = 0.95;
    int calibration_intervals = 400;
    /// Opening length, in sampling intervals.
    int open_intervals = 1;
    /// Lead of the retro-message (time units); bookkeeping only.
    double lead = 1.0;
    int intervals = 1400;
    /// Openings are only scheduled in the first `open_fraction` of the run.
    double open_fraction = 0.75;
    int max_openings = 50;

    double partition() const { return 0.5 * lx; }
    /// Throws std::invalid_argument on a malformed configuration.
    void validate() const;
};

struct ValveSpec {
    double window_half_width = 5.0;
    double threshold = 1.0;
    double sampling_interval = 1.0;
};

struct Opening {
    double open_time = 0.0;
    double duration = 0.0;
};

/// Sorted, non-overlapping opening intervals.
class OrificeSchedule {
public:
    OrificeSchedule() = default;
    explicit OrificeSchedule(std::vector<Opening> openings);

    const std::vector<Opening>& openings() const { return openings_; }
    bool empty() const { return openings_.empty(); }
    std::size_t size() const { return openings_.size(); }
    /// Open throughout [t0, t1)?
    bool open_during(double t0, double t1) const;

private:
    std::vector<Opening> openings_;
};

struct FluxSample {
    double time = 0.0;    // start of the interval
    double flux_a = 0.0;  // momentum delivered to the window from A
    double flux_b = 0.0;
    int passed_ab = 0;
    int passed_ba = 0;
};

struct ChamberStats {
    int n_a = 0;
    int n_b = 0;
    double ke_a = 0.0;
    double ke_b = 0.0;
    double t_a() const { return n_a ? ke_a / n_a : 0.0; }
    double t_b() const { return n_b ? ke_b / n_b : 0.0; }
};

class GasState {
public:
    GasState(const GasConfig& cfg, std::uint64_t seed);
    /// Explicit particles (for tests); velocities are taken as given.
    GasState(const GasConfig& cfg, std::vector<Vec2> positions, std::vector<Vec2> velocities);

    const GasConfig& config() const { return cfg_; }
    std::uint64_t seed() const { return seed_; }
    double time() const { return time_; }
    const std::vector<Vec2>& positions() const { return pos_; }
    const std::vector<Vec2>& velocities() const { return vel_; }
    int size() const { return static_cast<int>(pos_.size()); }

    /// radius / v_max / 4.
    double stability_bound() const;
    double kinetic_energy() const;
    ChamberStats chambers() const;
    /// sum_c N_c (ln(A_c / N_c) + ln T_c).
    double entropy() const;

    /// One step of length dt; the partition is a wall unless `orifice_open`.
    /// Throws std::invalid_argument when dt exceeds stability_bound().
    void step(double dt, bool orifice_open);

    /// Advances one sampling interval in equal sub-steps, each within the
    /// stability bound, and reports the window flux.
    FluxSample advance_interval(bool orifice_open);

private:
    GasConfig cfg_;
    std::uint64_t seed_ = 0;
    double time_ = 0.0;
    std::vector<Vec2> pos_;
    std::vector<Vec2> vel_;
    std::vector<int> cell_head_;
    std::vector<int> cell_next_;
    FluxSample acc_;

    void step_unchecked(double dt, bool orifice_open);
    void collide();
};

/// Interval starts whose (flux_A - flux_B) / interval exceeds the threshold.
std::vector<double> detect_fluctuations(const std::vector<FluxSample>& trajectory, const ValveSpec& valve);

/// Closed run; the q-quantile of (flux_A - flux_B) / interval.
double calibrate_threshold(const GasConfig& cfg, std::uint64_t seed);

struct TimePoint {
    double time = 0.0;  // end of the interval
    double t_a = 0.0, t_b = 0.0;
    int n_a = 0, n_b = 0;
    double entropy = 0.0;
    double energy = 0.0;
    bool open = false;
};

struct RunResult {
    std::string mode;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    OrificeSchedule schedule;
    std::vector<TimePoint> series;
    std::vector<FluxSample> flux;
    double energy_drift = 0.0;  // max |E(t) - E(0)| / E(0)
    int passed_ab = 0;
    int passed_ba = 0;

    /// Mean of T_A - T_B over the last quarter of the series.
    double final_quarter_gap() const;
};

/// Message from the future: the activation times a closed pass produced.
struct RetroChannel {
    double lead = 0.0;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::vector<double> activation_times;
};

/// Stable textual digest of every field of the config.
std::string config_digest(const GasConfig& cfg);

/// Pass 1: closed run recording activations (capped at max_openings,
/// restricted to the opening window).
RetroChannel record_activations(const GasConfig& cfg, std::uint64_t seed, double threshold);

/// Pass 2: same seed, orifice opened at each recorded activation. Throws
/// std::invalid_argument when seed or config differ from pass 1.
RunResult replay(const GasConfig& cfg, std::uint64_t seed, const RetroChannel& channel);

/// Runs the given schedule from the seeded initial state.
RunResult run_schedule(const GasConfig& cfg, std::uint64_t seed, const OrificeSchedule& schedule,
                       const std::string& mode, double threshold);

/// The valve reacts: after an activating interval it opens for the next
/// one, by which time the molecules that pushed it have recoiled.
RunResult run_baseline(const GasConfig& cfg, std::uint64_t seed, double threshold);

/// Two passes per opening: a closed look-ahead finds the next activation,
/// and the run reuses the look-ahead state up to it, then opens the orifice
/// over the activating interval.
RunResult run_anticipatory(const GasConfig& cfg, std::uint64_t seed, double threshold);

/// Same number of openings as `count`, at seeded random interval starts.
RunResult run_shuffled(const GasConfig& cfg, std::uint64_t seed, int count, std::uint64_t shuffle_seed,
                       double threshold);

struct SeedOutcome {
    std::uint64_t seed = 0;
    double threshold = 0.0;
    double gap_baseline = 0.0;
    double gap_anticipatory = 0.0;
    double gap_null = 0.0;
    int openings_baseline = 0;
    int openings_anticipatory = 0;
    double entropy_change_baseline = 0.0;
    double entropy_change_anticipatory = 0.0;
    double energy_drift = 0.0;
};

struct EnsembleSummary {
    std::vector<SeedOutcome> seeds;
    double mean_baseline = 0.0, std_baseline = 0.0;
    double mean_anticipatory = 0.0, std_anticipatory = 0.0;
    double mean_null = 0.0, std_null = 0.0;
    double separation = 0.0;  // |mean_anticipatory| / std_baseline
    double null_z = 0.0;      // |mean_null - mean_baseline| / std_baseline
    double max_energy_drift = 0.0;
    bool separated = false;   // separation > 5
    bool null_consistent = false;  // null_z <= 2
};

/// Paired seeds: every seed runs baseline, anticipatory and shuffled null
/// from the same initial state. Seeds are processed on `threads` workers;
/// the result does not depend on the thread count.
EnsembleSummary run_ensemble(const GasConfig& cfg, const std::vector<std::uint64_t>& seeds, int threads = 0,
                             std::vector<RunResult>* example_runs = nullptr);

}  // namespace nosig::thermo
