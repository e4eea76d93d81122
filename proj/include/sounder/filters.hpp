#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"

namespace sounder {

/// Discrete single-pole lowpass y[n] = y[n-1] + a * (x[n] - y[n-1]) with
/// a = 1 - exp(-2*pi*fc/fs). Unity DC gain, -3 dB near fc for fc << fs.
class OnePoleLowpass {
public:
    OnePoleLowpass(double cutoff_hz, double sample_rate_hz) {
        if (sample_rate_hz <= 0.0)
            throw InvalidArgument("sample rate must be positive, got " +
                                  std::to_string(sample_rate_hz));
        if (cutoff_hz <= 0.0 || cutoff_hz >= sample_rate_hz / 2.0)
            throw InvalidArgument("cutoff " + std::to_string(cutoff_hz) +
                                  " Hz must lie in (0, sample_rate/2)");
        alpha_ = 1.0 - std::exp(-2.0 * M_PI * cutoff_hz / sample_rate_hz);
    }

    double coefficient() const { return alpha_; }

    /// Causal pass over a real sequence, state starting at 0.
    std::vector<double> run(const std::vector<double>& x) const {
        std::vector<double> y(x.size());
        double state = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            state += alpha_ * (x[i] - state);
            y[i] = state;
        }
        return y;
    }

    /// Causal pass over a complex sequence (real and imaginary parts are
    /// filtered independently).
    std::vector<std::complex<double>> run(const std::vector<std::complex<double>>& x) const {
        std::vector<std::complex<double>> y(x.size());
        std::complex<double> state = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            state += alpha_ * (x[i] - state);
            y[i] = state;
        }
        return y;
    }

    /// Forward-backward pass: same magnitude shaping applied twice, zero
    /// net group delay. Used where a filter must not displace peaks.
    template <typename T>
    std::vector<T> run_zero_phase(const std::vector<T>& x) const {
        std::vector<T> y = run(x);
        std::reverse(y.begin(), y.end());
        y = run(y);
        std::reverse(y.begin(), y.end());
        return y;
    }

    /// Causal pass treating x as one period of a periodic sequence: one
    /// warm-up lap seeds the state, a second lap is kept. Removes start-up
    /// transients when the input really is periodic.
    template <typename T>
    std::vector<T> run_circular(const std::vector<T>& x) const {
        T state{};
        for (const auto& v : x)
            state += alpha_ * (v - state);
        std::vector<T> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            state += alpha_ * (x[i] - state);
            y[i] = state;
        }
        return y;
    }

    /// Circular forward-backward pass: zero net group delay and no edge
    /// transients for periodic inputs.
    template <typename T>
    std::vector<T> run_zero_phase_circular(const std::vector<T>& x) const {
        std::vector<T> y = run_circular(x);
        std::reverse(y.begin(), y.end());
        y = run_circular(y);
        std::reverse(y.begin(), y.end());
        return y;
    }

    /// Magnitude response of the causal filter at frequency f.
    double magnitude_at(double freq_hz, double sample_rate_hz) const {
        const double w = 2.0 * M_PI * freq_hz / sample_rate_hz;
        const std::complex<double> z = std::polar(1.0, w);
        return std::abs(alpha_ * z / (z - std::complex<double>(1.0 - alpha_, 0.0)));
    }

private:
    double alpha_ = 0.0;
};

} // namespace sounder
