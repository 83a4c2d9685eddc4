// Mirrored bit sequences, computable predictors, and a channel that sends
// bits by switching arm A between a random and a predictable source.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace nosig::randomness {

using Bits = std::vector<std::uint8_t>;

Bits parse_bits(const std::string& s);
std::string format_bits(const Bits& bits);

class BitSource {
public:
    enum class Kind { SeededRandom, Periodic, Markov };

    static BitSource seeded_random(std::uint64_t seed);
    /// Repeats `pattern` (a non-empty string of '0'/'1') forever.
    static BitSource periodic(const std::string& pattern);
    /// First bit uniform, then each bit repeats the previous one with
    /// probability `bias`.
    static BitSource markov(double bias, std::uint64_t seed);

    Kind kind() const { return kind_; }
    std::string describe() const;

    std::uint8_t next();
    Bits emit(std::size_t n);

private:
    BitSource(Kind kind, std::uint64_t seed);

    Kind kind_;
    std::uint64_t seed_ = 0;
    Bits pattern_;
    double bias_ = 0.5;
    std::mt19937_64 engine_;
    std::uint64_t word_ = 0;
    int word_bits_ = 0;
    std::size_t position_ = 0;
    std::uint8_t last_ = 0;

    std::uint8_t raw_bit();
    double raw_uniform();
};

/// Online predictor: predict() sees only bits already pushed with update().
class Predictor {
public:
    enum class Kind { LastBit, Flip, Majority, LfsrFit, Adaptive };

    static Predictor last_bit();
    static Predictor flip();
    /// Majority of the last k bits (ties go to the most recent bit).
    static Predictor majority(int k);
    /// Shortest LFSR (Berlekamp-Massey) over the last `window` bits.
    static Predictor lfsr_fit(int window = 32);
    /// Follows whichever of last-bit, flip, majority-3 and lfsr-fit has
    /// the most hits so far.
    static Predictor adaptive();

    /// Parses "last-bit", "flip", "majority-K", "lfsr-fit", "adaptive".
    static Predictor from_name(const std::string& name);

    Kind kind() const { return kind_; }
    std::string name() const;

    void reset();
    std::uint8_t predict() const;
    void update(std::uint8_t bit);

private:
    explicit Predictor(Kind kind, int param = 0);

    Kind kind_;
    int param_;
    Bits history_;  // last `capacity()` bits only
    std::vector<Predictor> experts_;
    std::vector<long> hits_;

    std::size_t capacity() const;
};

/// (hits)/(n-1) - 1/2, predicting bits[i] from bits[0..i-1] for i >= 1.
/// Throws std::invalid_argument when bits.size() < 2.
double predictor_advantage(Predictor pr, const Bits& bits);

inline constexpr double kDecisionThreshold = 0.1;

struct ChannelRun {
    Bits message;
    int block_length = 0;
    double tau = kDecisionThreshold;
    std::string predictor;
    std::string random_source;
    std::string nonrandom_source;
    Bits arm_a;
    Bits arm_b;
    std::vector<double> advantages;  // one per block, measured on arm B
    Bits decoded;
    double accuracy = 1.0;  // 1 for an empty message
};

/// Arm B of a singlet pair measured along the same axis: the same sequence.
Bits mirror(const Bits& arm_a);

/// Each message bit selects the block source at arm A (1 -> nonrandom).
/// Arm B decodes 1 when the block advantage exceeds tau.
ChannelRun transmit(const Bits& message, int block_length, BitSource random_src, BitSource nonrandom_src,
                    const Predictor& pr, double tau = kDecisionThreshold);

/// Plug-in mutual information (bits) between sent and decoded bits.
double capacity_estimate(const ChannelRun& run);

/// 1 - H(p) for a binary symmetric channel with success probability p.
double bsc_capacity(double p);

struct FalsePositiveResult {
    long blocks = 0;
    long positives = 0;
    double rate = 0.0;
    double worst_advantage = 0.0;
};

/// Decodes `blocks` blocks of a seeded random stream and counts advantages
/// above tau. Restricted to the last-bit and flip predictors, whose hit
/// counts reduce to counting repeats.
FalsePositiveResult false_positive_rate(std::uint64_t seed, long blocks, int block_length, const Predictor& pr,
                                        double tau = kDecisionThreshold);

/// P(Binomial(n, 1/2) / n - 1/2 > tau), exact tail via log-gamma.
double binomial_tail(int n, double tau);

}  // namespace nosig::randomness
