#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "filters.hpp"
#include "signal.hpp"

namespace sounder {

/// Single-ended to differential splitter. The ideal split costs 3.01 dB of
/// amplitude per leg (half the power each); anything on top of that is
/// excess insertion loss. The response is flat in band.
struct BalunModel {
    double insertion_loss_db = 0.0; // excess beyond the ideal 3.01 dB split
    double bandwidth_hz = 700.0e6;

    BalunModel(double insertion_loss_db_ = 0.0, double bandwidth_hz_ = 700.0e6)
        : insertion_loss_db(insertion_loss_db_), bandwidth_hz(bandwidth_hz_) {
        if (insertion_loss_db < 0.0)
            throw InvalidArgument("insertion loss must be nonnegative, got " +
                                  std::to_string(insertion_loss_db));
        if (!(bandwidth_hz > 0.0))
            throw InvalidArgument("balun bandwidth must be positive");
    }

    /// Per-leg amplitude factor: 10^(-(3.01 + excess)/20).
    double leg_gain() const { return std::pow(10.0, -(3.01 + insertion_loss_db) / 20.0); }
};

/// Splits a single-ended signal into an antiphase pair; each leg carries the
/// input scaled by the balun's leg gain, the second leg inverted.
inline std::pair<SampledSignal, SampledSignal> balun_split(const SampledSignal& sig,
                                                           const BalunModel& m = {}) {
    const double k = m.leg_gain();
    SampledSignal pos = sig, neg = sig;
    for (std::size_t i = 0; i < sig.size(); ++i) {
        pos.samples[i] = sig.samples[i] * k;
        neg.samples[i] = -pos.samples[i];
    }
    return {std::move(pos), std::move(neg)};
}

/// Differential-to-single-ended converter: merges the pair, lowpass-filters
/// with a single-pole 3 dB point at `cutoff_hz`, then applies the selected
/// gain. The hardware gain switch offers 3, 10, or 20 dB; 0 dB is accepted
/// as a unity-gain test mode.
struct DiffAmpModel {
    double cutoff_hz = 150.0e3;
    double gain_db = 0.0;

    DiffAmpModel(double cutoff_hz_ = 150.0e3, double gain_db_ = 0.0)
        : cutoff_hz(cutoff_hz_), gain_db(gain_db_) {
        if (!(cutoff_hz > 0.0))
            throw InvalidArgument("cutoff must be positive, got " + std::to_string(cutoff_hz));
        if (gain_db != 0.0 && gain_db != 3.0 && gain_db != 10.0 && gain_db != 20.0)
            throw InvalidArgument("gain must be one of the switch positions 3, 10, 20 dB "
                                  "(or 0 dB test mode), got " +
                                  std::to_string(gain_db));
    }
};

inline SampledSignal diff_merge_filter_amplify(const SampledSignal& pos,
                                               const SampledSignal& neg,
                                               const DiffAmpModel& m = {}) {
    if (pos.sample_rate_hz != neg.sample_rate_hz || pos.size() != neg.size())
        throw PreconditionError("differential pair mismatch: " + std::to_string(pos.size()) +
                                " samples at " + std::to_string(pos.sample_rate_hz) + " Hz vs " +
                                std::to_string(neg.size()) + " at " +
                                std::to_string(neg.sample_rate_hz));
    std::vector<std::complex<double>> merged(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
        merged[i] = pos.samples[i] - neg.samples[i];
    const OnePoleLowpass lpf(m.cutoff_hz, pos.sample_rate_hz);
    auto filtered = lpf.run(merged);
    const double g = std::pow(10.0, m.gain_db / 20.0);
    for (auto& v : filtered)
        v *= g;
    return SampledSignal(std::move(filtered), pos.sample_rate_hz, pos.start_time_s);
}

/// Comparator-style clock buffer: toggles between +/- out_vpp/2 when the
/// input's real part crosses hysteresis thresholds at +/- sensitivity_vpp/4.
/// An input swinging less than the sensitivity never fires a threshold, so
/// the output holds its state (which starts low). Toggling implied by the
/// input above `max_toggle_hz` is beyond the device and raises an error.
inline SampledSignal clock_buffer(const SampledSignal& sig, double sensitivity_vpp,
                                  double out_vpp, double max_toggle_hz) {
    if (!(sensitivity_vpp > 0.0) || !(out_vpp > 0.0) || !(max_toggle_hz > 0.0))
        throw InvalidArgument("sensitivity, output swing and toggle capacity must be positive");

    double lo = 0.0, hi = 0.0;
    for (const auto& v : sig.samples) {
        lo = std::min(lo, v.real());
        hi = std::max(hi, v.real());
    }
    const bool alive = (hi - lo) >= sensitivity_vpp;

    const double rail = out_vpp / 2.0;
    const double upper = sensitivity_vpp / 4.0;
    const double lower = -upper;
    bool state = false; // powers up low
    std::size_t transitions = 0;
    std::vector<std::complex<double>> out(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) {
        if (alive) {
            const double x = sig.samples[i].real();
            if (!state && x > upper) {
                state = true;
                ++transitions;
            } else if (state && x < lower) {
                state = false;
                ++transitions;
            }
        }
        out[i] = {state ? rail : -rail, 0.0};
    }

    const double estimated_hz =
        static_cast<double>(transitions) / (2.0 * sig.duration_s());
    if (estimated_hz > max_toggle_hz)
        throw PreconditionError("input toggles at about " + std::to_string(estimated_hz) +
                                " Hz, beyond the " + std::to_string(max_toggle_hz) +
                                " Hz capacity");
    return SampledSignal(std::move(out), sig.sample_rate_hz, sig.start_time_s);
}

/// One row of the board's current-draw table. A passive unit has no rails
/// and draws nothing; the power-supply row is the regulator block itself:
/// its standby figure is the regulator overhead added to the input current,
/// and its active figure is the measured whole-board ceiling.
struct PowerUnit {
    std::string name;
    std::vector<std::string> rails; // supply rails the unit draws from
    double standby_a = 0.0;
    double active_a = 0.0;
};

struct PowerTable {
    std::vector<PowerUnit> units;

    explicit PowerTable(std::vector<PowerUnit> units_) : units(std::move(units_)) {
        for (const auto& u : units) {
            if (u.standby_a < 0.0 || u.active_a < u.standby_a)
                throw InvalidArgument("unit '" + u.name +
                                      "' needs active >= standby >= 0 current");
        }
    }

    /// Measured board currents: the regulator block itself, the clock
    /// buffer on 3.3 V, the differential converter straddling +/-2.5 V
    /// (sub-milliamp standby figures are taken at their 1 mA bound), and
    /// the passive single-ended converter.
    static PowerTable builtin() {
        return PowerTable({
            {"power_supply", {}, 0.004, 0.172},
            {"clock_buffer", {"3.3 V"}, 0.001, 0.044},
            {"diff_converter", {"+2.5 V", "-2.5 V"}, 0.001, 0.005},
            {"balun", {}, 0.0, 0.0},
        });
    }

    const PowerUnit* find(const std::string& name) const {
        for (const auto& u : units)
            if (u.name == name)
                return &u;
        return nullptr;
    }
};

struct PowerReport {
    std::map<std::string, double> rail_current_a; // per-rail load current
    double overhead_a = 0.0;                      // regulator block's own draw
    double input_current_a = 0.0;                 // total at the 5 V input
    double board_ceiling_a = 0.0;                 // measured whole-board peak
};

/// Sums per-rail currents with each named unit at its active figure and the
/// rest on standby. Regulators pass current through 1:1 (the negative rail's
/// charge pump is charged at parity, an optimistic simplification), so the
/// input current is the rail total plus the regulator overhead.
inline PowerReport power_budget(const PowerTable& table,
                                const std::set<std::string>& active_units) {
    for (const auto& name : active_units)
        if (table.find(name) == nullptr)
            throw InvalidArgument("unknown power unit '" + name + "'");

    PowerReport report;
    for (const auto& u : table.units) {
        if (u.name == "power_supply") {
            report.overhead_a = u.standby_a;
            report.board_ceiling_a = u.active_a;
            continue;
        }
        const double draw = active_units.count(u.name) ? u.active_a : u.standby_a;
        for (const auto& rail : u.rails)
            report.rail_current_a[rail] += draw;
    }
    report.input_current_a = report.overhead_a;
    for (const auto& [rail, amps] : report.rail_current_a) {
        (void)rail;
        report.input_current_a += amps;
    }
    return report;
}

} // namespace sounder
