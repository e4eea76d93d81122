#pragma once

// Test-side reference implementations, written independently of the library:
// a vector-based shift register, brute-force sequence statistics, a direct
// O(n^2) DFT, and small numeric helpers. Everything here favours obviousness
// over speed so library results can be checked against first principles.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

// Bit-by-bit Fibonacci register: stages[0] is stage 1, stages.back() is the
// output stage. `tap_stages` lists the 1-based stages feeding the XOR.
struct BitLfsr {
    std::vector<int> stages;
    std::vector<int> tap_stages;

    static BitLfsr make(int degree, const std::vector<int>& tap_stages, std::uint32_t seed) {
        BitLfsr r;
        r.stages.assign(degree, 0);
        for (int k = 0; k < degree; ++k)
            r.stages[k] = (seed >> k) & 1u;
        r.tap_stages = tap_stages;
        return r;
    }

    int step() {
        const int out = stages.back();
        int fb = 0;
        for (int k : tap_stages)
            fb ^= stages[k - 1];
        for (std::size_t i = stages.size(); i-- > 1;)
            stages[i] = stages[i - 1];
        stages[0] = fb;
        return out;
    }

    std::vector<int> run(std::size_t n) {
        std::vector<int> out(n);
        for (auto& b : out)
            b = step();
        return out;
    }
};

// Steps the register until the state vector first repeats; returns the
// orbit length (sequence period).
inline std::size_t brute_force_period(int degree, const std::vector<int>& tap_stages,
                                      std::uint32_t seed) {
    BitLfsr r = BitLfsr::make(degree, tap_stages, seed);
    const std::vector<int> start = r.stages;
    std::size_t steps = 0;
    do {
        r.step();
        ++steps;
    } while (r.stages != start && steps < (std::size_t{1} << (degree + 1)));
    return steps;
}

inline std::vector<int> mask_to_stages(int degree, std::uint32_t mask) {
    std::vector<int> stages;
    for (int k = 1; k <= degree; ++k)
        if ((mask >> (k - 1)) & 1u)
            stages.push_back(k);
    return stages;
}

// Circular +-1 autocorrelation of a 0/1 vector, evaluated directly.
inline long circular_autocorrelation(const std::vector<int>& bits, std::size_t lag) {
    const std::size_t n = bits.size();
    long acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int a = bits[i] ? 1 : -1;
        const int b = bits[(i + lag) % n] ? 1 : -1;
        acc += a * b;
    }
    return acc;
}

// Circular run census of a 0/1 vector by explicit double-length scan.
inline std::map<std::pair<int, int>, std::size_t> circular_runs(const std::vector<int>& bits) {
    std::map<std::pair<int, int>, std::size_t> hist;
    const std::size_t n = bits.size();
    if (n == 0)
        return hist;
    bool constant = true;
    for (auto b : bits)
        constant = constant && (b == bits[0]);
    if (constant) {
        hist[{bits[0], static_cast<int>(n)}] = 1;
        return hist;
    }
    // rotate so position 0 starts a run, then scan linearly
    std::size_t first = 0;
    while (bits[first] == bits[(first + n - 1) % n])
        ++first;
    std::vector<int> rot(n);
    for (std::size_t i = 0; i < n; ++i)
        rot[i] = bits[(first + i) % n];
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && rot[j] == rot[i])
            ++j;
        ++hist[{rot[i], static_cast<int>(j - i)}];
        i = j;
    }
    return hist;
}

// Direct DFT bin, O(n) per bin: X[k] = sum_i x[i] exp(-2 pi i k n / N).
inline std::complex<double> dft_bin(const std::vector<std::complex<double>>& x, std::size_t k) {
    const double n = static_cast<double>(x.size());
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double phase = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(i) / n;
        acc += x[i] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return acc;
}

// Least-squares straight line through (x, y); returns {slope, intercept, r2}.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += e * e;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

} // namespace oracle
