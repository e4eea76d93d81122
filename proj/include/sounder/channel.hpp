#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "signal.hpp"

namespace sounder {

/// One propagation path: excess delay plus a complex gain (magnitude and
/// carrier phase rotation).
struct ChannelTap {
    double delay_s = 0.0;
    std::complex<double> gain{1.0, 0.0};

    bool operator==(const ChannelTap&) const = default;
};

/// Static tapped-delay-line multipath model with optional additive white
/// Gaussian noise. `noise_density` is the mean complex noise power per
/// sample, E[|n|^2]; zero disables noise entirely.
struct MultipathChannel {
    std::vector<ChannelTap> taps;
    double noise_density = 0.0;
    std::uint64_t noise_seed = 0;

    MultipathChannel(std::vector<ChannelTap> taps_, double noise_density_ = 0.0,
                     std::uint64_t noise_seed_ = 0)
        : taps(std::move(taps_)), noise_density(noise_density_), noise_seed(noise_seed_) {
        if (taps.empty())
            throw InvalidArgument("channel needs at least one tap");
        for (const auto& t : taps) {
            if (t.delay_s < 0.0)
                throw InvalidArgument("tap delay must be nonnegative, got " +
                                      std::to_string(t.delay_s) + " s");
            if (!std::isfinite(t.delay_s) || !std::isfinite(t.gain.real()) ||
                !std::isfinite(t.gain.imag()))
                throw InvalidArgument("tap parameters must be finite");
        }
        if (!(noise_density >= 0.0))
            throw InvalidArgument("noise density must be nonnegative, got " +
                                  std::to_string(noise_density));
    }

    MultipathChannel(std::initializer_list<ChannelTap> taps_, double noise_density_ = 0.0,
                     std::uint64_t noise_seed_ = 0)
        : MultipathChannel(std::vector<ChannelTap>(taps_), noise_density_, noise_seed_) {}

    /// Channel whose noise level realises a target SNR against a signal of
    /// the given mean power at the receiver input.
    static MultipathChannel with_snr(std::vector<ChannelTap> taps_, double snr_db,
                                     double signal_power, std::uint64_t noise_seed_ = 0) {
        if (!(signal_power > 0.0))
            throw InvalidArgument("signal power must be positive to set an SNR");
        const double density = signal_power / std::pow(10.0, snr_db / 10.0);
        return MultipathChannel(std::move(taps_), density, noise_seed_);
    }
};

/// Circularly symmetric complex Gaussian noise, total power `density` per
/// sample (half in each quadrature). Fully determined by the seed.
inline SampledSignal add_noise(const SampledSignal& sig, double density, std::uint64_t seed) {
    if (!(density >= 0.0))
        throw InvalidArgument("noise density must be nonnegative, got " +
                              std::to_string(density));
    if (density == 0.0)
        return sig;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(density / 2.0));
    SampledSignal out = sig;
    for (auto& v : out.samples)
        v += std::complex<double>(gauss(gen), gauss(gen));
    return out;
}

/// Passes a signal through the channel: each tap contributes a copy delayed
/// by the nearest whole sample and scaled by its complex gain, then noise is
/// added. Delays at or beyond the signal duration cannot be represented and
/// are rejected.
inline SampledSignal apply(const MultipathChannel& ch, const SampledSignal& sig) {
    const std::size_t n = sig.size();
    std::vector<std::complex<double>> acc(n, {0.0, 0.0});
    for (const auto& tap : ch.taps) {
        const auto shift = static_cast<long long>(std::llround(tap.delay_s * sig.sample_rate_hz));
        if (shift >= static_cast<long long>(n))
            throw PreconditionError("tap delay " + std::to_string(tap.delay_s) +
                                    " s does not fit in a signal of " +
                                    std::to_string(sig.duration_s()) + " s");
        for (std::size_t i = static_cast<std::size_t>(shift); i < n; ++i)
            acc[i] += tap.gain * sig.samples[i - static_cast<std::size_t>(shift)];
    }
    SampledSignal out(std::move(acc), sig.sample_rate_hz, sig.start_time_s);
    return add_noise(out, ch.noise_density, ch.noise_seed);
}

} // namespace sounder
