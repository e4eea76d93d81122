#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "channel.hpp"
#include "config.hpp"
#include "correlator.hpp"
#include "io.hpp"
#include "waveform.hpp"

namespace sounder {

struct SoundingSummary {
    double sliding_factor = 0.0;
    double slide_period_s = 0.0;
    double dilated_chip_s = 0.0;
    double resolution_s = 0.0;     // one chip of true delay, 1 / alpha
    double null_to_null_hz = 0.0;  // spectral width of the transmit waveform
    double t_zero_s = 0.0;         // zero-delay reference on the observation axis
    std::size_t path_count = 0;
};

struct SoundingResult {
    PowerDelayProfile dilated;
    PowerDelayProfile profile; // true-delay axis
    std::vector<PathEstimate> paths;
    SoundingSummary summary;
    std::vector<std::string> artifacts; // files written, in write order
};

/// The full receive chain in software: synthesize the transmit waveform,
/// push it through the channel, slide-correlate, locate zero delay with the
/// sync reference, undilate, and pick paths. Pure function of the config.
inline SoundingResult run_sounding(const ExperimentConfig& cfg) {
    const auto params = cfg.slide_params();
    const double gamma = params.sliding_factor_value();
    const auto seq = generate_pn(params.pn);

    const int periods =
        cfg.periods > 0 ? cfg.periods : static_cast<int>(std::ceil(gamma)) + 1;
    const auto tx = synthesize_nrz(seq, cfg.alpha_hz, cfg.oversampling, periods);

    const auto taps = cfg.taps_in_seconds();
    const MultipathChannel channel =
        cfg.snr_db ? MultipathChannel::with_snr(taps, *cfg.snr_db, tx.mean_power(),
                                                derive_seed(cfg.rng_seed, "channel.noise"))
                   : MultipathChannel(taps);
    const auto rx = apply(channel, tx);

    SoundingResult r;
    r.dilated = slide_correlate(rx, params);
    const auto sync = sync_reference(params, params.slide_period_s(), tx.sample_rate_hz);
    const double t_zero = envelope_peak_time(sync);
    r.profile = undilate(r.dilated, t_zero);
    r.paths = extract_paths(r.profile, cfg.threshold_db);

    const auto spectrum = power_spectrum(synthesize_nrz(seq, cfg.alpha_hz, cfg.oversampling, 1));
    r.summary.sliding_factor = gamma;
    r.summary.slide_period_s = params.slide_period_s();
    r.summary.dilated_chip_s = params.dilated_chip_s();
    r.summary.resolution_s = 1.0 / cfg.alpha_hz;
    r.summary.null_to_null_hz = null_to_null_bandwidth_hz(spectrum);
    r.summary.t_zero_s = t_zero;
    r.summary.path_count = r.paths.size();
    return r;
}

/// Output directory for artifacts: the SOUNDER_OUT_DIR environment variable
/// when set, the config's outputs.dir otherwise.
inline std::string output_directory(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("SOUNDER_OUT_DIR"); env != nullptr && *env != '\0')
        return env;
    return cfg.out_dir;
}

inline nlohmann::ordered_json summary_json(const SoundingSummary& s) {
    return {
        {"schema", 1},
        {"sliding_factor", s.sliding_factor},
        {"slide_period_s", s.slide_period_s},
        {"dilated_chip_s", s.dilated_chip_s},
        {"resolution_s", s.resolution_s},
        {"null_to_null_hz", s.null_to_null_hz},
        {"t_zero_s", s.t_zero_s},
        {"path_count", s.path_count},
    };
}

/// run_sounding plus artifact files: dilated and true-delay profiles as CSV,
/// extracted paths and the summary as JSON, per the config's format list.
inline SoundingResult run_sounding_to_files(const ExperimentConfig& cfg) {
    auto r = run_sounding(cfg);
    const std::filesystem::path dir = output_directory(cfg);
    std::filesystem::create_directories(dir);
    const auto emit = [&](const char* name, const std::string& content) {
        const auto path = (dir / name).string();
        write_text_file(path, content);
        r.artifacts.push_back(path);
    };
    if (cfg.write_csv) {
        emit("pdp_dilated.csv", pdp_csv(r.dilated));
        emit("pdp.csv", pdp_csv(r.profile));
    }
    if (cfg.write_json) {
        emit("paths.json", paths_json(r.paths).dump(2) + "\n");
        emit("summary.json", summary_json(r.summary).dump(2) + "\n");
    }
    return r;
}

} // namespace sounder
