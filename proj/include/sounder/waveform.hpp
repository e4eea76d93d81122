#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "pn.hpp"
#include "signal.hpp"

namespace sounder {

/// Hardware chip-rate ceiling; higher rates are allowed in simulation but
/// front ends should warn past this point.
inline constexpr double kMaxHardwareChipRateHz = 1.0e9;

/// Non-return-to-zero synthesis: each chip is held for `oversampling`
/// samples at amplitude +-1, so sample_rate = chip_rate * oversampling.
/// `periods` full sequence repetitions are emitted.
inline SampledSignal synthesize_nrz(const PnSequence& seq, double chip_rate_hz,
                                    int oversampling = 8, int periods = 1) {
    if (seq.length() == 0)
        throw InvalidArgument("cannot synthesize an empty sequence");
    if (chip_rate_hz <= 0.0)
        throw InvalidArgument("chip rate must be positive, got " + std::to_string(chip_rate_hz));
    if (oversampling < 4)
        throw InvalidArgument("oversampling factor " + std::to_string(oversampling) +
                              " is below the minimum of 4 (edge aliasing)");
    if (periods < 1)
        throw InvalidArgument("periods must be at least 1, got " + std::to_string(periods));

    const std::size_t n = seq.length() * static_cast<std::size_t>(oversampling) *
                          static_cast<std::size_t>(periods);
    std::vector<std::complex<double>> samples;
    samples.reserve(n);
    for (int p = 0; p < periods; ++p)
        for (std::size_t c = 0; c < seq.length(); ++c)
            samples.insert(samples.end(), static_cast<std::size_t>(oversampling),
                           std::complex<double>(seq.bipolar(c), 0.0));
    return SampledSignal(std::move(samples), chip_rate_hz * oversampling);
}

/// Two-sided periodogram, centred on DC with strictly increasing frequency.
///
/// `power` is the linear periodogram |X[k]|^2 / nfft^2; with nfft equal to
/// the signal length its sum equals the time-domain mean power (Parseval).
/// `power_db` is the same data normalised so the peak sits at 0 dB, floored
/// at -300 dB.
struct Spectrum {
    std::vector<double> freq_hz;
    std::vector<double> power;
    std::vector<double> power_db;
    double bin_hz = 0.0;

    std::size_t size() const { return freq_hz.size(); }
};

/// Rectangular-window periodogram of a sampled signal. nfft == 0 means
/// "use the signal length"; nfft > length zero-pads; nfft < length is
/// rejected rather than silently truncating.
inline Spectrum power_spectrum(const SampledSignal& sig, std::size_t nfft = 0) {
    const std::size_t n = sig.size();
    if (nfft == 0)
        nfft = n;
    if (nfft < n)
        throw InvalidArgument("nfft " + std::to_string(nfft) + " smaller than signal length " +
                              std::to_string(n) + "; truncation must be explicit");
    std::vector<std::complex<double>> x(sig.samples);
    x.resize(nfft, {0.0, 0.0});
    const auto X = fft(std::move(x));

    Spectrum spec;
    spec.bin_hz = sig.sample_rate_hz / static_cast<double>(nfft);
    spec.freq_hz.resize(nfft);
    spec.power.resize(nfft);
    const std::size_t half = nfft / 2; // DC lands at index `half` after the shift
    const double scale = 1.0 / (static_cast<double>(nfft) * static_cast<double>(nfft));
    for (std::size_t i = 0; i < nfft; ++i) {
        const std::size_t k = (i + nfft - half) % nfft; // unshifted bin index
        spec.freq_hz[i] = (static_cast<double>(i) - static_cast<double>(half)) * spec.bin_hz;
        spec.power[i] = std::norm(X[k]) * scale;
    }
    const double peak = *std::max_element(spec.power.begin(), spec.power.end());
    spec.power_db.resize(nfft);
    for (std::size_t i = 0; i < nfft; ++i) {
        const double rel = peak > 0.0 ? spec.power[i] / peak : 0.0;
        spec.power_db[i] = rel > 0.0 ? std::max(-300.0, 10.0 * std::log10(rel)) : -300.0;
    }
    return spec;
}

/// First spectral null above DC: the lowest positive frequency whose bin
/// power falls below `floor_db` relative to the peak. Meaningful for
/// periodograms of an integer number of sequence periods (nfft == length),
/// where nulls are exact bin zeros.
inline double first_null_hz(const Spectrum& spec, double floor_db = -60.0) {
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (spec.freq_hz[i] <= 0.0)
            continue;
        if (spec.power_db[i] <= floor_db)
            return spec.freq_hz[i];
    }
    throw PreconditionError("no spectral null below " + std::to_string(floor_db) +
                            " dB found above DC");
}

/// Width of the main lobe between the nulls nearest DC on either side.
inline double null_to_null_bandwidth_hz(const Spectrum& spec, double floor_db = -60.0) {
    const double upper = first_null_hz(spec, floor_db);
    for (std::size_t i = spec.size(); i-- > 0;) {
        if (spec.freq_hz[i] >= 0.0)
            continue;
        if (spec.power_db[i] <= floor_db)
            return upper - spec.freq_hz[i];
    }
    throw PreconditionError("no spectral null below " + std::to_string(floor_db) +
                            " dB found below DC");
}

} // namespace sounder
