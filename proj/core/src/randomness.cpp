#include "nosig/randomness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "nosig/random.hpp"

namespace nosig::randomness {

Bits parse_bits(const std::string& s) {
    Bits out;
    out.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("bit strings may only contain '0' and '1'");
        out.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return out;
}

std::string format_bits(const Bits& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

BitSource::BitSource(Kind kind, std::uint64_t seed) : kind_(kind), seed_(seed), engine_(mix_seed(seed)) {}

BitSource BitSource::seeded_random(std::uint64_t seed) { return BitSource(Kind::SeededRandom, seed); }

BitSource BitSource::periodic(const std::string& pattern) {
    BitSource src(Kind::Periodic, 0);
    src.pattern_ = parse_bits(pattern);
    if (src.pattern_.empty()) throw std::invalid_argument("periodic pattern must not be empty");
    return src;
}

BitSource BitSource::markov(double bias, std::uint64_t seed) {
    if (!(bias >= 0.0 && bias <= 1.0)) throw std::invalid_argument("Markov bias must lie in [0, 1]");
    BitSource src(Kind::Markov, seed);
    src.bias_ = bias;
    return src;
}

std::string BitSource::describe() const {
    switch (kind_) {
        case Kind::SeededRandom: return "random(seed=" + std::to_string(seed_) + ")";
        case Kind::Periodic: return "periodic(" + format_bits(pattern_) + ")";
        case Kind::Markov: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "markov(bias=%.17g,seed=%llu)", bias_, static_cast<unsigned long long>(seed_));
            return buf;
        }
    }
    return {};
}

std::uint8_t BitSource::raw_bit() {
    if (word_bits_ == 0) {
        word_ = engine_();
        word_bits_ = 64;
    }
    const auto b = static_cast<std::uint8_t>(word_ & 1u);
    word_ >>= 1;
    --word_bits_;
    return b;
}

double BitSource::raw_uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint8_t BitSource::next() {
    switch (kind_) {
        case Kind::SeededRandom: return raw_bit();
        case Kind::Periodic: {
            const auto b = pattern_[position_ % pattern_.size()];
            ++position_;
            return b;
        }
        case Kind::Markov: {
            if (position_++ == 0) {
                last_ = raw_uniform() < 0.5 ? 1 : 0;
            } else if (raw_uniform() >= bias_) {
                last_ ^= 1u;
            }
            return last_;
        }
    }
    return 0;
}

Bits BitSource::emit(std::size_t n) {
    Bits out(n);
    for (auto& b : out) b = next();
    return out;
}

Predictor::Predictor(Kind kind, int param) : kind_(kind), param_(param) {
    if (kind_ == Kind::Adaptive) {
        experts_ = {last_bit(), flip(), majority(3), lfsr_fit(32)};
        hits_.assign(experts_.size(), 0);
    }
}

Predictor Predictor::last_bit() { return Predictor(Kind::LastBit); }
Predictor Predictor::flip() { return Predictor(Kind::Flip); }

Predictor Predictor::majority(int k) {
    if (k < 1) throw std::invalid_argument("majority window must be positive");
    return Predictor(Kind::Majority, k);
}

Predictor Predictor::lfsr_fit(int window) {
    if (window < 2) throw std::invalid_argument("LFSR window must be at least 2");
    return Predictor(Kind::LfsrFit, window);
}

Predictor Predictor::adaptive() { return Predictor(Kind::Adaptive); }

Predictor Predictor::from_name(const std::string& name) {
    if (name == "last-bit") return last_bit();
    if (name == "flip") return flip();
    if (name == "lfsr-fit") return lfsr_fit();
    if (name == "adaptive") return adaptive();
    const std::string prefix = "majority-";
    if (name.rfind(prefix, 0) == 0) {
        const std::string k = name.substr(prefix.size());
        if (!k.empty() && std::all_of(k.begin(), k.end(), [](char c) { return c >= '0' && c <= '9'; }) && k.size() < 6) {
            return majority(std::stoi(k));
        }
    }
    throw std::invalid_argument("unknown predictor '" + name + "'");
}

std::string Predictor::name() const {
    switch (kind_) {
        case Kind::LastBit: return "last-bit";
        case Kind::Flip: return "flip";
        case Kind::Majority: return "majority-" + std::to_string(param_);
        case Kind::LfsrFit: return param_ == 32 ? "lfsr-fit" : "lfsr-fit-" + std::to_string(param_);
        case Kind::Adaptive: return "adaptive";
    }
    return {};
}

std::size_t Predictor::capacity() const {
    switch (kind_) {
        case Kind::LastBit:
        case Kind::Flip: return 1;
        case Kind::Majority:
        case Kind::LfsrFit: return static_cast<std::size_t>(param_);
        case Kind::Adaptive: return 0;
    }
    return 0;
}

void Predictor::reset() {
    history_.clear();
    for (auto& e : experts_) e.reset();
    std::fill(hits_.begin(), hits_.end(), 0);
}

namespace {

// Berlekamp-Massey over GF(2); returns the connection polynomial c with
// c[0] = 1 and its length L.
std::pair<Bits, int> berlekamp_massey(const Bits& s) {
    const std::size_t n = s.size();
    Bits c(n + 1, 0), b(n + 1, 0);
    c[0] = b[0] = 1;
    int l = 0;
    int m = -1;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint8_t d = s[i];
        for (int j = 1; j <= l; ++j) d ^= c[j] & s[i - j];
        if (!d) continue;
        const Bits t = c;
        const std::size_t shift = i - m;
        for (std::size_t j = 0; j + shift <= n; ++j) c[j + shift] ^= b[j];
        if (2 * l <= static_cast<int>(i)) {
            l = static_cast<int>(i) + 1 - l;
            m = static_cast<int>(i);
            b = t;
        }
    }
    return {c, l};
}

}  // namespace

std::uint8_t Predictor::predict() const {
    switch (kind_) {
        case Kind::LastBit: return history_.empty() ? 0 : history_.back();
        case Kind::Flip: return history_.empty() ? 0 : history_.back() ^ 1u;
        case Kind::Majority: {
            if (history_.empty()) return 0;
            const long ones = std::count(history_.begin(), history_.end(), 1);
            const long zeros = static_cast<long>(history_.size()) - ones;
            if (ones == zeros) return history_.back();
            return ones > zeros ? 1 : 0;
        }
        case Kind::LfsrFit: {
            if (history_.empty()) return 0;
            const auto [c, l] = berlekamp_massey(history_);
            const std::size_t n = history_.size();
            std::uint8_t next = 0;
            for (int j = 1; j <= l; ++j) next ^= c[j] & history_[n - j];
            return next;
        }
        case Kind::Adaptive: {
            std::size_t best = 0;
            for (std::size_t i = 1; i < experts_.size(); ++i)
                if (hits_[i] > hits_[best]) best = i;
            return experts_[best].predict();
        }
    }
    return 0;
}

void Predictor::update(std::uint8_t bit) {
    if (kind_ == Kind::Adaptive) {
        for (std::size_t i = 0; i < experts_.size(); ++i) {
            if (experts_[i].predict() == bit) ++hits_[i];
            experts_[i].update(bit);
        }
        return;
    }
    history_.push_back(bit);
    if (history_.size() > capacity()) history_.erase(history_.begin());
}

double predictor_advantage(Predictor pr, const Bits& bits) {
    if (bits.size() < 2) throw std::invalid_argument("predictor advantage needs at least two bits");
    pr.reset();
    pr.update(bits[0]);
    long hits = 0;
    for (std::size_t i = 1; i < bits.size(); ++i) {
        if (pr.predict() == bits[i]) ++hits;
        pr.update(bits[i]);
    }
    return static_cast<double>(hits) / static_cast<double>(bits.size() - 1) - 0.5;
}

Bits mirror(const Bits& arm_a) { return arm_a; }

ChannelRun transmit(const Bits& message, int block_length, BitSource random_src, BitSource nonrandom_src,
                    const Predictor& pr, double tau) {
    if (block_length < 100) throw std::invalid_argument("block length must be at least 100");
    ChannelRun run;
    run.message = message;
    run.block_length = block_length;
    run.tau = tau;
    run.predictor = pr.name();
    run.random_source = random_src.describe();
    run.nonrandom_source = nonrandom_src.describe();
    for (auto bit : message) {
        const Bits block = bit ? nonrandom_src.emit(block_length) : random_src.emit(block_length);
        run.arm_a.insert(run.arm_a.end(), block.begin(), block.end());
        const Bits seen = mirror(block);
        run.arm_b.insert(run.arm_b.end(), seen.begin(), seen.end());
        const double adv = predictor_advantage(pr, seen);
        run.advantages.push_back(adv);
        run.decoded.push_back(adv > tau ? 1 : 0);
    }
    if (!message.empty()) {
        long correct = 0;
        for (std::size_t i = 0; i < message.size(); ++i) correct += message[i] == run.decoded[i];
        run.accuracy = static_cast<double>(correct) / static_cast<double>(message.size());
    }
    return run;
}

double capacity_estimate(const ChannelRun& run) {
    const std::size_t n = run.message.size();
    if (n == 0) return 0.0;
    double joint[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < n; ++i) joint[run.message[i]][run.decoded[i]] += 1.0 / static_cast<double>(n);
    const double px[2] = {joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]};
    const double py[2] = {joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]};
    double mi = 0.0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            if (joint[x][y] > 0.0) mi += joint[x][y] * std::log2(joint[x][y] / (px[x] * py[y]));
    return std::max(0.0, mi);
}

double bsc_capacity(double p) {
    if (p <= 0.0 || p >= 1.0) return 1.0;
    return 1.0 + p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p);
}

FalsePositiveResult false_positive_rate(std::uint64_t seed, long blocks, int block_length, const Predictor& pr,
                                        double tau) {
    if (pr.kind() != Predictor::Kind::LastBit && pr.kind() != Predictor::Kind::Flip) {
        throw std::invalid_argument("false-positive scan supports the last-bit and flip predictors");
    }
    if (block_length < 2) throw std::invalid_argument("block length must be at least 2");
    const bool repeat = pr.kind() == Predictor::Kind::LastBit;
    BitSource src = BitSource::seeded_random(seed);
    FalsePositiveResult res;
    res.blocks = blocks;
    res.worst_advantage = -0.5;
    for (long k = 0; k < blocks; ++k) {
        std::uint8_t prev = src.next();
        long hits = 0;
        for (int i = 1; i < block_length; ++i) {
            const std::uint8_t b = src.next();
            hits += (b == prev) == repeat;
            prev = b;
        }
        const double adv = static_cast<double>(hits) / (block_length - 1) - 0.5;
        res.worst_advantage = std::max(res.worst_advantage, adv);
        if (adv > tau) ++res.positives;
    }
    res.rate = blocks > 0 ? static_cast<double>(res.positives) / static_cast<double>(blocks) : 0.0;
    return res;
}

double binomial_tail(int n, double tau) {
    if (n <= 0) return 0.0;
    const double cut = n * (0.5 + tau);
    double total = 0.0;
    const double log_norm = n * std::log(0.5);
    for (int k = n; k >= 0 && k > cut; --k) {
        total += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + log_norm);
    }
    return total;
}

}  // namespace nosig::randomness
