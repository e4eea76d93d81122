#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace sounder {

inline constexpr int kMinDegree = 5;
inline constexpr int kMaxDegree = 12;

namespace detail {

inline void check_degree(int degree) {
    if (degree < kMinDegree || degree > kMaxDegree)
        throw InvalidArgument("register degree " + std::to_string(degree) +
                              " out of supported range [" + std::to_string(kMinDegree) +
                              ", " + std::to_string(kMaxDegree) + "]");
}

} // namespace detail

/// Built-in feedback masks, one per supported degree, each yielding a
/// maximal-length sequence. Bit k-1 of the mask selects register stage k
/// as an XOR feedback input; the last stage is always selected.
inline std::uint32_t default_taps(int degree) {
    detail::check_degree(degree);
    static constexpr std::uint32_t kTable[] = {
        0x014, //  5: stages 5,3
        0x030, //  6: stages 6,5
        0x060, //  7: stages 7,6
        0x0B8, //  8: stages 8,6,5,4
        0x110, //  9: stages 9,5
        0x240, // 10: stages 10,7
        0x500, // 11: stages 11,9
        0xE08, // 12: stages 12,11,10,4
    };
    return kTable[degree - kMinDegree];
}

/// Fibonacci (many-to-one) shift-register description.
///
/// State bit k-1 holds stage k. Each step emits stage `degree` as the
/// output chip, XORs the tapped stages into a feedback bit, shifts every
/// stage up by one, and inserts the feedback bit into stage 1.
struct LfsrConfig {
    int degree;
    std::uint32_t taps;
    std::uint32_t initial_state;

    LfsrConfig(int degree_, std::uint32_t taps_, std::uint32_t initial_state_ = 1)
        : degree(degree_), taps(taps_), initial_state(initial_state_) {
        detail::check_degree(degree);
        const std::uint32_t mask = state_mask();
        if (taps == 0 || (taps & ~mask) != 0)
            throw InvalidArgument("feedback mask 0x" + to_hex(taps) +
                                  " has taps outside stages 1.." + std::to_string(degree));
        if ((taps >> (degree - 1)) == 0)
            throw InvalidArgument("feedback mask 0x" + to_hex(taps) +
                                  " must tap the last stage " + std::to_string(degree));
        if (initial_state == 0 || (initial_state & ~mask) != 0)
            throw InvalidArgument("initial state 0x" + to_hex(initial_state) +
                                  " must be a nonzero " + std::to_string(degree) + "-bit value");
    }

    static LfsrConfig with_default_taps(int degree, std::uint32_t initial_state = 1) {
        return LfsrConfig(degree, default_taps(degree), initial_state);
    }

    std::uint32_t state_mask() const { return (1u << degree) - 1u; }

    /// Sequence length of a maximal-length register of this degree.
    std::size_t full_period() const { return state_mask(); }

    friend bool operator==(const LfsrConfig&, const LfsrConfig&) = default;

private:
    static std::string to_hex(std::uint32_t v) {
        static const char* digits = "0123456789ABCDEF";
        std::string s;
        do {
            s.insert(s.begin(), digits[v & 0xF]);
            v >>= 4;
        } while (v != 0);
        return s;
    }
};

/// One full period of a binary pseudo-noise sequence.
struct PnSequence {
    std::vector<std::uint8_t> chips; // 0/1 values, length 2^degree - 1
    int degree = 0;

    std::size_t length() const { return chips.size(); }

    /// Chip i mapped to the bipolar alphabet: 1 -> +1.0, 0 -> -1.0.
    double bipolar(std::size_t i) const { return chips[i] ? 1.0 : -1.0; }
};

/// Runs the register for one full period and returns the emitted chips.
/// Throws NonMaximalTapsError if the state orbit closes early, i.e. the
/// feedback mask is not maximal for this degree.
inline PnSequence generate_pn(const LfsrConfig& cfg) {
    const std::uint32_t mask = cfg.state_mask();
    const std::size_t period = cfg.full_period();
    PnSequence seq;
    seq.degree = cfg.degree;
    seq.chips.reserve(period);
    std::uint32_t state = cfg.initial_state;
    for (std::size_t step = 0; step < period; ++step) {
        seq.chips.push_back(static_cast<std::uint8_t>((state >> (cfg.degree - 1)) & 1u));
        const std::uint32_t fb = static_cast<std::uint32_t>(std::popcount(state & cfg.taps)) & 1u;
        state = ((state << 1) | fb) & mask;
        if (state == cfg.initial_state && step + 1 < period)
            throw NonMaximalTapsError(step + 1, period);
    }
    // The state map is a bijection, so the orbit through initial_state has
    // closed by now or the early-return check above already fired.
    return seq;
}

/// Circular autocorrelation of the bipolar sequence at an integer chip lag.
/// For a maximal-length sequence this is `length()` at lag 0 and -1 at
/// every other lag.
inline double periodic_autocorrelation(const PnSequence& seq, long lag) {
    const long n = static_cast<long>(seq.length());
    if (n == 0)
        throw InvalidArgument("autocorrelation of an empty sequence");
    if (lag < 0 || lag >= n)
        throw InvalidArgument("lag " + std::to_string(lag) + " out of range [0, " +
                              std::to_string(n) + ")");
    long acc = 0;
    for (long i = 0; i < n; ++i) {
        const bool match = seq.chips[i] == seq.chips[(i + lag) % n];
        acc += match ? 1 : -1;
    }
    return static_cast<double>(acc);
}

/// Circular run-length census: maps (chip value, run length) to the number
/// of such runs in one period.
inline std::map<std::pair<int, int>, std::size_t> run_length_histogram(const PnSequence& seq) {
    const std::size_t n = seq.length();
    std::map<std::pair<int, int>, std::size_t> hist;
    if (n == 0)
        return hist;
    std::size_t start = n; // first index opening a run, scanning circularly
    for (std::size_t i = 0; i < n; ++i) {
        if (seq.chips[i] != seq.chips[(i + n - 1) % n]) {
            start = i;
            break;
        }
    }
    if (start == n) { // constant sequence: one circular run
        hist[{seq.chips[0], static_cast<int>(n)}] = 1;
        return hist;
    }
    std::size_t i = start;
    do {
        const int value = seq.chips[i];
        int len = 0;
        do {
            ++len;
            i = (i + 1) % n;
        } while (i != start && seq.chips[i] == value);
        ++hist[{value, len}];
    } while (i != start);
    return hist;
}

/// Chips as a compact '0'/'1' string, e.g. for logs and goldens.
inline std::string to_bit_string(const PnSequence& seq) {
    std::string s;
    s.reserve(seq.length());
    for (auto c : seq.chips)
        s.push_back(c ? '1' : '0');
    return s;
}

/// Chips as bipolar values, one per row (single-column CSV body).
inline std::string to_bipolar_csv(const PnSequence& seq) {
    std::string s;
    s.reserve(seq.length() * 3);
    for (auto c : seq.chips) {
        s += c ? "1" : "-1";
        s.push_back('\n');
    }
    return s;
}

} // namespace sounder
