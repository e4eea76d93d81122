#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "channel.hpp"
#include "correlator.hpp"
#include "errors.hpp"
#include "pn.hpp"

namespace sounder {

/// Deterministic seed derivation: one root seed in the config, one derived
/// stream per named stage, so adding a stage never perturbs the others.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stage) {
    return splitmix64(root ^ fnv1a64(stage));
}

/// One channel tap as written in the config: delay in nanoseconds plus a
/// complex gain. Kept in file units so a config survives a save/load loop
/// bit for bit.
struct ConfigTap {
    double delay_ns = 0.0;
    double gain_re = 1.0;
    double gain_im = 0.0;

    bool operator==(const ConfigTap&) const = default;
};

/// Everything one sounding run needs, as read from a key = value file.
struct ExperimentConfig {
    int pn_degree = 5;
    std::uint32_t pn_taps = 0; // 0 = table default for the degree
    std::uint32_t pn_seed = 1;

    double alpha_hz = 1.0e9;  // transmit chip rate
    double beta_hz = 0.995e9; // receive chip rate

    int oversampling = 8;
    int periods = 0; // 0 = enough to cover one slide period
    std::uint64_t rng_seed = 0;

    std::vector<ConfigTap> channel_taps; // empty = single direct path
    std::optional<double> snr_db;        // absent = noiseless

    double lpf_bandwidth_hz = 0.0; // 0 = a tenth of the clock offset
    double threshold_db = 20.0;

    std::string out_dir = "out";
    bool write_csv = true;
    bool write_json = true;

    bool operator==(const ExperimentConfig&) const = default;

    LfsrConfig lfsr() const {
        return pn_taps == 0 ? LfsrConfig::with_default_taps(pn_degree, pn_seed)
                            : LfsrConfig(pn_degree, pn_taps, pn_seed);
    }

    SlideParams slide_params() const {
        return SlideParams(alpha_hz, beta_hz, lfsr(), lpf_bandwidth_hz);
    }

    std::vector<ChannelTap> taps_in_seconds() const {
        if (channel_taps.empty())
            return {{0.0, {1.0, 0.0}}};
        std::vector<ChannelTap> taps;
        for (const auto& t : channel_taps)
            taps.push_back({t.delay_ns * 1.0e-9, {t.gain_re, t.gain_im}});
        return taps;
    }
};

namespace detail {

inline std::string strip(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return "";
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline double parse_double(const std::string& key, int line, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError(key, "line " + std::to_string(line) + ": '" + text +
                                   "' is not a number");
    return v;
}

template <typename UInt>
UInt parse_unsigned(const std::string& key, int line, const std::string& text) {
    UInt v = 0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        begin += 2;
        base = 16;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, v, base);
    if (ec != std::errc{} || ptr != end || begin == end)
        throw ConfigError(key, "line " + std::to_string(line) + ": '" + text +
                                   "' is not an unsigned integer");
    return v;
}

inline int parse_int(const std::string& key, int line, const std::string& text) {
    int v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError(key, "line " + std::to_string(line) + ": '" + text +
                                   "' is not an integer");
    return v;
}

inline std::vector<double> parse_numbers(const std::string& key, int line,
                                         const std::string& text, std::size_t want) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string word;
    while (in >> word)
        out.push_back(parse_double(key, line, word));
    if (out.size() != want)
        throw ConfigError(key, "line " + std::to_string(line) + ": expected " +
                                   std::to_string(want) + " numbers, got " +
                                   std::to_string(out.size()));
    return out;
}

inline std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Parses the key = value experiment format: '#' starts a comment, keys are
/// dotted, `channel.tap` may repeat, anything unrecognized is an error that
/// names the key and line. The file must carry `schema = 1`. All embedded
/// domain invariants are revalidated before the config is returned.
inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    bool schema_seen = false;
    std::set<std::string> seen;
    int line_no = 0;

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const std::string lineText = detail::strip(raw);
        if (lineText.empty())
            continue;
        const auto eq = lineText.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineText, "line " + std::to_string(line_no) +
                                            ": expected 'key = value'");
        const std::string key = detail::strip(lineText.substr(0, eq));
        const std::string value = detail::strip(lineText.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(key.empty() ? "(empty)" : key,
                              "line " + std::to_string(line_no) + ": expected 'key = value'");

        if (key != "channel.tap" && !seen.insert(key).second)
            throw ConfigError(key, "line " + std::to_string(line_no) + ": duplicate key");

        if (key == "schema") {
            if (detail::parse_int(key, line_no, value) != 1)
                throw ConfigError(key, "unsupported schema version " + value + ", expected 1");
            schema_seen = true;
        } else if (key == "pn.degree") {
            cfg.pn_degree = detail::parse_int(key, line_no, value);
        } else if (key == "pn.taps") {
            cfg.pn_taps = detail::parse_unsigned<std::uint32_t>(key, line_no, value);
        } else if (key == "pn.seed") {
            cfg.pn_seed = detail::parse_unsigned<std::uint32_t>(key, line_no, value);
        } else if (key == "rates.alpha_hz") {
            cfg.alpha_hz = detail::parse_double(key, line_no, value);
        } else if (key == "rates.beta_hz") {
            cfg.beta_hz = detail::parse_double(key, line_no, value);
        } else if (key == "sim.oversampling") {
            cfg.oversampling = detail::parse_int(key, line_no, value);
        } else if (key == "sim.periods") {
            cfg.periods = detail::parse_int(key, line_no, value);
        } else if (key == "sim.rng_seed") {
            cfg.rng_seed = detail::parse_unsigned<std::uint64_t>(key, line_no, value);
        } else if (key == "channel.tap") {
            const auto v = detail::parse_numbers(key, line_no, value, 3);
            cfg.channel_taps.push_back({v[0], v[1], v[2]});
        } else if (key == "channel.snr_db") {
            cfg.snr_db = detail::parse_double(key, line_no, value);
        } else if (key == "correlator.lpf_bandwidth_hz") {
            cfg.lpf_bandwidth_hz = detail::parse_double(key, line_no, value);
        } else if (key == "correlator.threshold_db") {
            cfg.threshold_db = detail::parse_double(key, line_no, value);
        } else if (key == "outputs.dir") {
            cfg.out_dir = value;
        } else if (key == "outputs.formats") {
            cfg.write_csv = cfg.write_json = false;
            std::string token;
            std::istringstream list(value);
            while (std::getline(list, token, ',')) {
                token = detail::strip(token);
                if (token == "csv")
                    cfg.write_csv = true;
                else if (token == "json")
                    cfg.write_json = true;
                else
                    throw ConfigError(key, "line " + std::to_string(line_no) +
                                               ": unknown format '" + token +
                                               "', expected csv or json");
            }
        } else {
            throw ConfigError(key, "line " + std::to_string(line_no) + ": unknown key '" +
                                       key + "'");
        }
    }

    if (!schema_seen)
        throw ConfigError("schema", "missing 'schema = 1' line");

    // revalidate every embedded domain type, blaming the config key
    try {
        (void)cfg.lfsr();
    } catch (const Error& e) {
        throw ConfigError("pn", e.what());
    }
    if (!(cfg.alpha_hz > 0.0))
        throw ConfigError("rates.alpha_hz", "chip rate must be positive");
    try {
        (void)sliding_factor(cfg.alpha_hz, cfg.beta_hz);
    } catch (const Error& e) {
        throw ConfigError("rates.beta_hz", e.what());
    }
    try {
        (void)cfg.slide_params();
    } catch (const Error& e) {
        throw ConfigError("correlator.lpf_bandwidth_hz", e.what());
    }
    if (cfg.oversampling < 4)
        throw ConfigError("sim.oversampling", "oversampling must be at least 4, got " +
                                                  std::to_string(cfg.oversampling));
    if (cfg.periods < 0)
        throw ConfigError("sim.periods", "periods must be nonnegative, got " +
                                             std::to_string(cfg.periods));
    try {
        (void)MultipathChannel(cfg.taps_in_seconds());
    } catch (const Error& e) {
        throw ConfigError("channel.tap", e.what());
    }
    if (!(cfg.threshold_db > 0.0))
        throw ConfigError("correlator.threshold_db", "threshold must be positive dB, got " +
                                                         detail::format_g(cfg.threshold_db));
    if (cfg.out_dir.empty())
        throw ConfigError("outputs.dir", "output directory must not be empty");
    if (!cfg.write_csv && !cfg.write_json)
        throw ConfigError("outputs.formats", "at least one of csv, json is required");
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

/// Canonical text form; parse(serialize(cfg)) == cfg, field for field.
inline std::string serialize_config(const ExperimentConfig& cfg) {
    using detail::format_g;
    std::ostringstream out;
    char taps[16];
    std::snprintf(taps, sizeof taps, "0x%X", cfg.pn_taps);
    out << "schema = 1\n";
    out << "pn.degree = " << cfg.pn_degree << "\n";
    out << "pn.taps = " << taps << "\n";
    out << "pn.seed = " << cfg.pn_seed << "\n";
    out << "rates.alpha_hz = " << format_g(cfg.alpha_hz) << "\n";
    out << "rates.beta_hz = " << format_g(cfg.beta_hz) << "\n";
    out << "sim.oversampling = " << cfg.oversampling << "\n";
    out << "sim.periods = " << cfg.periods << "\n";
    out << "sim.rng_seed = " << cfg.rng_seed << "\n";
    for (const auto& t : cfg.channel_taps)
        out << "channel.tap = " << format_g(t.delay_ns) << " " << format_g(t.gain_re) << " "
            << format_g(t.gain_im) << "\n";
    if (cfg.snr_db)
        out << "channel.snr_db = " << format_g(*cfg.snr_db) << "\n";
    out << "correlator.lpf_bandwidth_hz = " << format_g(cfg.lpf_bandwidth_hz) << "\n";
    out << "correlator.threshold_db = " << format_g(cfg.threshold_db) << "\n";
    out << "outputs.dir = " << cfg.out_dir << "\n";
    if (cfg.write_csv && cfg.write_json)
        out << "outputs.formats = csv,json\n";
    else if (cfg.write_csv)
        out << "outputs.formats = csv\n";
    else
        out << "outputs.formats = json\n"; // both-off configs never validate
    return out.str();
}

} // namespace sounder
