#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "correlator.hpp"
#include "errors.hpp"
#include "waveform.hpp"

namespace sounder {

namespace detail {

inline std::string format_fixed(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace detail

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out)
        throw Error("write to '" + path + "' failed");
}

/// CSV rows of a power delay profile: time (observation time while dilated,
/// true delay after undilation), linear power, and dB relative to the peak
/// (floored at -300 dB for zero samples).
inline std::string pdp_csv(const PowerDelayProfile& pdp) {
    std::string text = pdp.axis == DelayAxis::Dilated ? "obs_time_s" : "delay_s";
    text += ",power_linear,power_db\n";
    const double peak =
        pdp.power.empty() ? 0.0 : *std::max_element(pdp.power.begin(), pdp.power.end());
    for (std::size_t i = 0; i < pdp.time_s.size(); ++i) {
        const double p = pdp.power[i];
        const double db = (peak > 0.0 && p > 0.0)
                              ? std::max(10.0 * std::log10(p / peak), -300.0)
                              : -300.0;
        text += detail::format_fixed(pdp.time_s[i]);
        text += ',';
        text += detail::format_fixed(p);
        text += ',';
        text += detail::format_fixed(db);
        text += '\n';
    }
    return text;
}

inline void write_pdp_csv(const std::string& path, const PowerDelayProfile& pdp) {
    write_text_file(path, pdp_csv(pdp));
}

/// CSV rows of a spectrum: frequency and peak-normalized power in dB.
inline std::string spectrum_csv(const Spectrum& spec) {
    std::string text = "freq_hz,power_db\n";
    for (std::size_t i = 0; i < spec.freq_hz.size(); ++i) {
        text += detail::format_fixed(spec.freq_hz[i]);
        text += ',';
        text += detail::format_fixed(spec.power_db[i]);
        text += '\n';
    }
    return text;
}

inline void write_spectrum_csv(const std::string& path, const Spectrum& spec) {
    write_text_file(path, spectrum_csv(spec));
}

/// Extracted paths as a JSON array of {delay_ns, power_db} records.
inline nlohmann::ordered_json paths_json(const std::vector<PathEstimate>& paths) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : paths)
        arr.push_back({{"delay_ns", p.delay_s * 1.0e9}, {"power_db", p.relative_power_db}});
    return arr;
}

inline void write_paths_json(const std::string& path,
                             const std::vector<PathEstimate>& paths) {
    write_text_file(path, paths_json(paths).dump(2) + "\n");
}

} // namespace sounder
