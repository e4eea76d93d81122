#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "filters.hpp"
#include "pn.hpp"
#include "signal.hpp"

namespace sounder {

/// Time-dilation factor of a sliding correlator whose transmit and receive
/// clocks differ slightly: tx / (tx - rx).
inline double sliding_factor(double tx_chip_rate_hz, double rx_chip_rate_hz) {
    if (!(tx_chip_rate_hz > 0.0) || !(rx_chip_rate_hz > 0.0))
        throw InvalidArgument("chip rates must be positive");
    if (!(rx_chip_rate_hz < tx_chip_rate_hz))
        throw InvalidArgument("receive chip rate must be strictly below the transmit rate");
    return tx_chip_rate_hz / (tx_chip_rate_hz - rx_chip_rate_hz);
}

/// Sliding-correlation setup: the sequence is clocked at `tx_chip_rate_hz`
/// on the transmit side and at the slightly slower `rx_chip_rate_hz` in the
/// receiver, so the replica slides through one full period every
/// slide_period_s() and delays appear stretched by sliding_factor().
struct SlideParams {
    double tx_chip_rate_hz;
    double rx_chip_rate_hz;
    LfsrConfig pn;
    double lpf_cutoff_hz; // integration bandwidth of the correlator lowpass

    SlideParams(double tx_chip_rate_hz_, double rx_chip_rate_hz_, LfsrConfig pn_,
                double lpf_cutoff_hz_ = 0.0)
        : tx_chip_rate_hz(tx_chip_rate_hz_), rx_chip_rate_hz(rx_chip_rate_hz_),
          pn(pn_), lpf_cutoff_hz(lpf_cutoff_hz_) {
        (void)sliding_factor(tx_chip_rate_hz, rx_chip_rate_hz); // validates the rates
        const double offset = tx_chip_rate_hz - rx_chip_rate_hz;
        if (lpf_cutoff_hz == 0.0)
            lpf_cutoff_hz = offset / 10.0;
        if (!(lpf_cutoff_hz > 0.0) || !(lpf_cutoff_hz < offset))
            throw InvalidArgument("lowpass cutoff " + std::to_string(lpf_cutoff_hz) +
                                  " Hz must lie in (0, " + std::to_string(offset) +
                                  ") Hz, the clock offset");
    }

    double sliding_factor_value() const {
        return sliding_factor(tx_chip_rate_hz, rx_chip_rate_hz);
    }

    /// Observation time for the replica to slide across one full sequence
    /// period: sliding_factor * period / tx rate.
    double slide_period_s() const {
        return sliding_factor_value() * static_cast<double>(pn.full_period()) / tx_chip_rate_hz;
    }

    /// One chip of true delay maps to this much observation time.
    double dilated_chip_s() const { return sliding_factor_value() / tx_chip_rate_hz; }
};

enum class DelayAxis { Dilated, TrueDelay };

/// Correlator output power against either the raw (dilated) observation
/// time or, after undilation, the true excess delay.
struct PowerDelayProfile {
    std::vector<double> time_s;
    std::vector<double> power; // linear, nonnegative
    DelayAxis axis = DelayAxis::Dilated;
    double dilation_factor = 1.0;
    double chip_duration_s = 0.0; // one true-delay chip, 1 / tx rate
};

/// One detected propagation path.
struct PathEstimate {
    double delay_s = 0.0;
    double relative_power_db = 0.0; // 0 dB marks the strongest path
};

namespace detail {

/// Sequence chips clocked out at `chip_rate_hz` and sampled on the absolute
/// grid j = first_sample .. first_sample + count - 1 at `sample_rate_hz`.
/// Chip k spans samples [round(k*fs/rate), round((k+1)*fs/rate)).
inline std::vector<double> clocked_chips(const PnSequence& seq, double chip_rate_hz,
                                         double sample_rate_hz, long long first_sample,
                                         std::size_t count) {
    std::vector<double> out(count);
    const double samples_per_chip = sample_rate_hz / chip_rate_hz;
    auto edge = [&](long long k) { return std::llround(static_cast<double>(k) * samples_per_chip); };
    long long k = static_cast<long long>(std::floor(static_cast<double>(first_sample) /
                                                    samples_per_chip));
    for (std::size_t i = 0; i < count; ++i) {
        const long long j = first_sample + static_cast<long long>(i);
        while (edge(k + 1) <= j)
            ++k;
        while (edge(k) > j)
            --k;
        const auto period = static_cast<long long>(seq.length());
        const long long idx = ((k % period) + period) % period;
        out[i] = seq.bipolar(static_cast<std::size_t>(idx));
    }
    return out;
}

inline void require_slide_window(const SampledSignal& sig, const SlideParams& p,
                                 const char* what) {
    if (sig.sample_rate_hz < 4.0 * p.tx_chip_rate_hz)
        throw PreconditionError(std::string(what) + ": sample rate " +
                                std::to_string(sig.sample_rate_hz) +
                                " Hz is below 4x the transmit chip rate");
    const double needed = p.slide_period_s();
    // half a sample of slack so durations equal to the slide period up to
    // floating-point rounding are accepted
    if (sig.duration_s() < needed - 0.5 / sig.sample_rate_hz)
        throw PreconditionError(std::string(what) + ": signal spans " +
                                std::to_string(sig.duration_s()) + " s but one slide period needs " +
                                std::to_string(needed) + " s");
}

} // namespace detail

/// Core sliding correlation: multiplies the received signal by the slower
/// replica, lowpass-filters the product (forward-backward, so the filter
/// never displaces the correlation peaks), and returns |.|^2 over exactly
/// one slide period. Peaks appear at observation times t_zero + gamma*delay.
inline PowerDelayProfile slide_correlate(const SampledSignal& rx, const SlideParams& p) {
    detail::require_slide_window(rx, p, "slide_correlate");
    const double fs = rx.sample_rate_hz;
    const auto n_out = std::min<std::size_t>(
        static_cast<std::size_t>(std::llround(p.slide_period_s() * fs)), rx.size());

    const auto seq = generate_pn(p.pn);
    const auto first = std::llround(rx.start_time_s * fs);
    const auto replica = detail::clocked_chips(seq, p.rx_chip_rate_hz, fs, first, rx.size());

    // Over one slide period the mixer product is periodic (exactly so for
    // integer sliding factors), so the lowpass runs circularly: no start-up
    // transient can attenuate peaks near the window edges, and the
    // forward-backward pass keeps peaks where the mixing put them.
    std::vector<std::complex<double>> product(n_out);
    for (std::size_t i = 0; i < n_out; ++i)
        product[i] = rx.samples[i] * replica[i];
    const OnePoleLowpass lpf(p.lpf_cutoff_hz, fs);
    const auto filtered = lpf.run_zero_phase_circular(product);

    PowerDelayProfile pdp;
    pdp.axis = DelayAxis::Dilated;
    pdp.dilation_factor = p.sliding_factor_value();
    pdp.chip_duration_s = 1.0 / p.tx_chip_rate_hz;
    pdp.time_s.resize(n_out);
    pdp.power.resize(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
        pdp.time_s[i] = rx.start_time_s + static_cast<double>(i) / fs;
        pdp.power[i] = std::norm(filtered[i]);
    }
    return pdp;
}

/// Zero-delay reference: correlates the transmit-clocked sequence with the
/// replica directly (a cabled TX->RX loop), processed exactly like
/// slide_correlate. Its envelope peak marks where zero excess delay falls
/// on the observation-time axis.
inline SampledSignal sync_reference(const SlideParams& p, double duration_s,
                                    double sample_rate_hz) {
    if (!(duration_s > 0.0))
        throw InvalidArgument("duration must be positive");
    const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
    if (n == 0)
        throw InvalidArgument("duration too short for even one sample");

    const auto seq = generate_pn(p.pn);
    const auto tx = detail::clocked_chips(seq, p.tx_chip_rate_hz, sample_rate_hz, 0, n);
    SampledSignal probe(std::vector<std::complex<double>>(n), sample_rate_hz, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        probe.samples[i] = {tx[i], 0.0};
    detail::require_slide_window(probe, p, "sync_reference");

    const auto replica = detail::clocked_chips(seq, p.rx_chip_rate_hz, sample_rate_hz, 0, n);
    std::vector<std::complex<double>> product(n);
    for (std::size_t i = 0; i < n; ++i)
        product[i] = probe.samples[i] * replica[i];
    const OnePoleLowpass lpf(p.lpf_cutoff_hz, sample_rate_hz);
    return SampledSignal(lpf.run_zero_phase_circular(product), sample_rate_hz, 0.0);
}

/// Time of the strongest squared-envelope sample (earliest wins ties).
inline double envelope_peak_time(const SampledSignal& sig) {
    std::size_t best = 0;
    double best_power = -1.0;
    for (std::size_t i = 0; i < sig.size(); ++i) {
        const double pw = std::norm(sig.samples[i]);
        if (pw > best_power) {
            best_power = pw;
            best = i;
        }
    }
    return sig.time_at(best);
}

/// Maps a dilated profile back to true excess delay: subtract the zero
/// reference, divide by the dilation factor, wrap into one sequence period
/// and rotate so the axis starts at the smallest delay.
inline PowerDelayProfile undilate(const PowerDelayProfile& pdp, double t_zero) {
    if (pdp.axis != DelayAxis::Dilated)
        throw InvalidArgument("undilate expects a dilated-axis profile");
    const std::size_t n = pdp.time_s.size();
    if (n < 2)
        throw InvalidArgument("profile too short to undilate");
    const double gamma = pdp.dilation_factor;
    const double dt = pdp.time_s[1] - pdp.time_s[0];
    const double period = static_cast<double>(n) * dt / gamma;

    std::vector<double> delay(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = std::fmod((pdp.time_s[i] - t_zero) / gamma, period);
        if (d < 0.0)
            d += period;
        delay[i] = d;
    }
    const std::size_t pivot =
        static_cast<std::size_t>(std::min_element(delay.begin(), delay.end()) - delay.begin());

    PowerDelayProfile out;
    out.axis = DelayAxis::TrueDelay;
    out.dilation_factor = gamma;
    out.chip_duration_s = pdp.chip_duration_s;
    out.time_s.resize(n);
    out.power.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (pivot + i) % n;
        out.time_s[i] = delay[j];
        out.power[i] = pdp.power[j];
    }
    return out;
}

/// Inverse of undilate for the no-wrap case (t_zero at the window start):
/// scales the axis back to observation time. When undilation wrapped the
/// axis, the result is the same circular profile, rotated.
inline PowerDelayProfile redilate(const PowerDelayProfile& pdp, double t_zero) {
    if (pdp.axis != DelayAxis::TrueDelay)
        throw InvalidArgument("redilate expects a true-delay profile");
    PowerDelayProfile out = pdp;
    out.axis = DelayAxis::Dilated;
    for (auto& t : out.time_s)
        t = t * pdp.dilation_factor + t_zero;
    return out;
}

/// Peak picking on a true-delay profile: smooths with a circular one-chip
/// moving average, then reports every circular local maximum within
/// `threshold_db` of the strongest as a path. The strongest path reads
/// 0 dB. An all-flat or empty profile yields no paths.
inline std::vector<PathEstimate> extract_paths(const PowerDelayProfile& pdp,
                                               double threshold_db = 20.0) {
    if (pdp.axis != DelayAxis::TrueDelay)
        throw InvalidArgument("extract_paths expects a true-delay profile");
    if (!(threshold_db > 0.0))
        throw InvalidArgument("threshold must be positive dB, got " +
                              std::to_string(threshold_db));
    const std::size_t n = pdp.time_s.size();
    if (n < 3)
        return {};
    const double dt = pdp.time_s[1] - pdp.time_s[0];
    const auto window = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(pdp.chip_duration_s / dt)));

    // circular moving average over one chip, centred, via prefix sums
    std::vector<double> smooth(n, 0.0);
    const long long half = static_cast<long long>(window) / 2;
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        prefix[i + 1] = prefix[i] + pdp.power[i];
    const double total = prefix[n];
    auto range_sum = [&](long long lo, long long hi) { // sum over [lo, hi), circular
        double acc = 0.0;
        long long span = hi - lo;
        const long long base = ((lo % static_cast<long long>(n)) + n) % static_cast<long long>(n);
        acc += static_cast<double>(span / static_cast<long long>(n)) * total;
        span %= static_cast<long long>(n);
        const long long end = base + span;
        if (end <= static_cast<long long>(n))
            acc += prefix[end] - prefix[base];
        else
            acc += (total - prefix[base]) + prefix[end - n];
        return acc;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const long long lo = static_cast<long long>(i) - half;
        smooth[i] = range_sum(lo, lo + static_cast<long long>(window)) /
                    static_cast<double>(window);
    }

    const double peak = *std::max_element(smooth.begin(), smooth.end());
    if (!(peak > 0.0))
        return {};
    const double floor = peak * std::pow(10.0, -threshold_db / 10.0);

    std::vector<PathEstimate> paths;
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = smooth[(i + n - 1) % n];
        const double next = smooth[(i + 1) % n];
        if (smooth[i] > prev && smooth[i] >= next && smooth[i] >= floor)
            paths.push_back({pdp.time_s[i], 10.0 * std::log10(smooth[i] / peak)});
    }
    return paths;
}

} // namespace sounder
