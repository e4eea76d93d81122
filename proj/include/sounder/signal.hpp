#pragma once

#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"

namespace sounder {

/// Uniformly sampled complex baseband signal.
struct SampledSignal {
    std::vector<std::complex<double>> samples;
    double sample_rate_hz = 0.0;
    double start_time_s = 0.0;

    SampledSignal() = default;

    SampledSignal(std::vector<std::complex<double>> samples_, double sample_rate_hz_,
                  double start_time_s_ = 0.0)
        : samples(std::move(samples_)), sample_rate_hz(sample_rate_hz_),
          start_time_s(start_time_s_) {
        if (sample_rate_hz <= 0.0)
            throw InvalidArgument("sample rate must be positive, got " +
                                  std::to_string(sample_rate_hz));
        if (samples.empty())
            throw InvalidArgument("signal must contain at least one sample");
    }

    std::size_t size() const { return samples.size(); }

    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }

    /// Time of sample i.
    double time_at(std::size_t i) const {
        return start_time_s + static_cast<double>(i) / sample_rate_hz;
    }

    /// Mean of |x[i]|^2 over all samples.
    double mean_power() const {
        double acc = 0.0;
        for (const auto& v : samples)
            acc += std::norm(v);
        return acc / static_cast<double>(samples.size());
    }
};

} // namespace sounder
